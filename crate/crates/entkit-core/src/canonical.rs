//! Canonical representatives and phase-insensitive distances.
//!
//! Bases and decompositions are only defined up to a phase on each vector and
//! a permutation of elements. The helpers here pick deterministic
//! representatives (for stable output) and measure distances that quotient
//! both freedoms out (for comparisons).

use nalgebra as na;
use num_complex::Complex64 as C64;

use crate::linalg::CVector;
use crate::tolerances;

/// Unit phase factor that makes the first component of `v` with magnitude
/// above the anchor real positive; `1` when no component qualifies.
pub fn canonical_phase_factor(v: &CVector) -> C64 {
    for entry in v.iter() {
        if entry.norm() > tolerances::PHASE_ANCHOR {
            return entry.conj() / entry.norm();
        }
    }
    C64::new(1.0, 0.0)
}

/// Multiplies `v` by [`canonical_phase_factor`].
pub fn canonical_phase(v: &CVector) -> CVector {
    v * canonical_phase_factor(v)
}

/// Lexicographic key of a vector after phase fixing and entry rounding.
pub fn lex_key(v: &CVector) -> Vec<(i64, i64)> {
    let fixed = canonical_phase(v);
    fixed
        .iter()
        .map(|z| {
            (
                (z.re / tolerances::LEX_ROUND).round() as i64,
                (z.im / tolerances::LEX_ROUND).round() as i64,
            )
        })
        .collect()
}

/// Rounds a weight or eigenvalue to the tie-breaking quantum.
pub fn round_weight(w: f64) -> i64 {
    (w / tolerances::WEIGHT_ROUND).round() as i64
}

/// Distance between `u` and `v` minimized over a global phase on `v`:
/// `min_theta |u - e^{i theta} v|`. The minimizing phase is applied
/// explicitly before subtracting, so near-equal rays measure as near zero
/// without square-root cancellation.
pub fn phase_aligned_distance(u: &CVector, v: &CVector) -> f64 {
    assert_eq!(u.len(), v.len(), "phase-aligned distance needs equal dims");
    let overlap: C64 = v.dotc(u);
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    (u - v * phase).norm()
}

/// Matches two equal-length vector families up to phase and permutation and
/// returns the largest matched distance. Families of different sizes are
/// infinitely far apart.
pub fn family_distance(a: &[CVector], b: &[CVector]) -> f64 {
    matched_distance(a.len(), b.len(), |i, j| phase_aligned_distance(&a[i], &b[j]))
}

/// Like [`family_distance`] but with per-element weights: the cost of pairing
/// `(p, u)` with `(q, v)` is `max(|p - q|, d(u, v))`.
pub fn weighted_family_distance(
    a_weights: &[f64],
    a_vectors: &[CVector],
    b_weights: &[f64],
    b_vectors: &[CVector],
) -> f64 {
    assert_eq!(a_weights.len(), a_vectors.len());
    assert_eq!(b_weights.len(), b_vectors.len());
    matched_distance(a_vectors.len(), b_vectors.len(), |i, j| {
        phase_aligned_distance(&a_vectors[i], &b_vectors[j])
            .max((a_weights[i] - b_weights[j]).abs())
    })
}

fn matched_distance<F>(na: usize, nb: usize, cost: F) -> f64
where
    F: Fn(usize, usize) -> f64,
{
    if na != nb {
        return f64::INFINITY;
    }
    if na == 0 {
        return 0.0;
    }
    let mut pairs = Vec::with_capacity(na * na);
    for i in 0..na {
        for j in 0..na {
            pairs.push((cost(i, j), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut used_a = vec![false; na];
    let mut used_b = vec![false; na];
    let mut worst: f64 = 0.0;
    let mut matched = 0;
    for (c, i, j) in pairs {
        if used_a[i] || used_b[j] {
            continue;
        }
        used_a[i] = true;
        used_b[j] = true;
        worst = worst.max(c);
        matched += 1;
        if matched == na {
            break;
        }
    }
    worst
}

/// Frobenius distance between two operators.
pub fn operator_distance(a: &na::DMatrix<C64>, b: &na::DMatrix<C64>) -> f64 {
    assert_eq!(a.shape(), b.shape(), "operator distance needs equal shapes");
    (a - b).norm()
}
