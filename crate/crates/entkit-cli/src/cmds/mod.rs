//! One module per command family. Every command loads its files, runs the
//! library, and assembles a [`crate::render::Document`]; all comparison
//! tolerances are multiplied by the diagnostic scale factor.

pub mod decomp;
pub mod diagram;
pub mod prepare;
pub mod simulate;
pub mod spectral;
pub mod twins;

use entkit_core::{state, BipartiteState, CMatrix};

/// Reduced density operator picked by the subsystem flag: 1 nearby, 2 remote.
pub fn reduced_for(st: &BipartiteState, subsystem: u8) -> (CMatrix, &'static str) {
    let (rho1, rho2) = state::reduced_states(st);
    match subsystem {
        1 => (rho1, "nearby"),
        _ => (rho2, "remote"),
    }
}
