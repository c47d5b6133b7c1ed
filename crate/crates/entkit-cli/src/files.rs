//! JSON file formats. Complex numbers are `[re, im]` pairs; vectors are
//! arrays of pairs; matrices are row-major arrays of such arrays. Parsed
//! documents are echoed verbatim into the output, so every format is both
//! input and output.

use std::path::Path;

use entkit_core::{BipartiteState, CMatrix, CVector, Decomposition, Observable, Subsystem};
use num_complex::Complex64 as C64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{precondition, CliError, CliResult};

/// A bipartite state as its coefficient matrix: entry `[j][k]` multiplies
/// the j-th nearby and k-th remote basis vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub d1: usize,
    pub d2: usize,
    pub coefficients: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// A single vector of one subsystem.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorFile {
    pub entries: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// An ordered list of vectors, used for measurement and range bases.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisFile {
    pub vectors: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompTerm {
    pub weight: f64,
    pub vector: Vec<[f64; 2]>,
}

/// A convex decomposition of a density operator into weighted unit vectors.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompFile {
    pub terms: Vec<DecompTerm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// A Hermitian observable on one subsystem: 1 is nearby, 2 is remote.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableFile {
    pub subsystem: u8,
    pub matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

fn read<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io { path: path.to_owned(), message: e.to_string() })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_owned(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn pair(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

fn row_matrix(
    rows: &[Vec<[f64; 2]>],
    path: &Path,
    field: &'static str,
) -> CliResult<CMatrix> {
    let nrows = rows.len();
    if nrows == 0 {
        return Err(CliError::File { path: path.to_owned(), field, message: "no rows".into() });
    }
    let ncols = rows[0].len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(CliError::File {
                path: path.to_owned(),
                field,
                message: format!("row {i} has {} entries, row 0 has {ncols}", row.len()),
            });
        }
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| pair(rows[i][j])))
}

fn column(entries: &[[f64; 2]], path: &Path, field: &'static str) -> CliResult<CVector> {
    if entries.is_empty() {
        return Err(CliError::File { path: path.to_owned(), field, message: "no entries".into() });
    }
    Ok(CVector::from_iterator(entries.len(), entries.iter().map(|&p| pair(p))))
}

/// Parsed file content paired with its echo for the output document.
pub struct Loaded<T> {
    pub value: T,
    pub echo: Value,
}

fn echo_of<F: Serialize>(file: &F, path: &Path) -> Value {
    let mut value = serde_json::to_value(file).expect("file schemas serialize");
    value
        .as_object_mut()
        .expect("file schemas are objects")
        .insert("path".into(), Value::String(path.display().to_string()));
    value
}

pub fn load_state(path: &Path) -> CliResult<Loaded<BipartiteState>> {
    let file: StateFile = read(path)?;
    if file.coefficients.len() != file.d1 {
        return Err(CliError::File {
            path: path.to_owned(),
            field: "coefficients",
            message: format!("{} rows, expected d1 = {}", file.coefficients.len(), file.d1),
        });
    }
    for (i, row) in file.coefficients.iter().enumerate() {
        if row.len() != file.d2 {
            return Err(CliError::File {
                path: path.to_owned(),
                field: "coefficients",
                message: format!("row {i} has {} entries, expected d2 = {}", row.len(), file.d2),
            });
        }
    }
    let coeffs = CMatrix::from_fn(file.d1, file.d2, |i, j| pair(file.coefficients[i][j]));
    let value = BipartiteState::new(coeffs).map_err(|e| CliError::File {
        path: path.to_owned(),
        field: "coefficients",
        message: e.to_string(),
    })?;
    let echo = echo_of(&file, path);
    Ok(Loaded { value, echo })
}

pub fn load_vector(path: &Path) -> CliResult<Loaded<CVector>> {
    let file: VectorFile = read(path)?;
    let value = column(&file.entries, path, "entries")?;
    let echo = echo_of(&file, path);
    Ok(Loaded { value, echo })
}

pub fn load_basis(path: &Path) -> CliResult<Loaded<Vec<CVector>>> {
    let file: BasisFile = read(path)?;
    if file.vectors.is_empty() {
        return Err(CliError::File {
            path: path.to_owned(),
            field: "vectors",
            message: "no vectors".into(),
        });
    }
    let value = file
        .vectors
        .iter()
        .map(|entries| column(entries, path, "vectors"))
        .collect::<CliResult<Vec<_>>>()?;
    let echo = echo_of(&file, path);
    Ok(Loaded { value, echo })
}

pub fn load_decomp(path: &Path) -> CliResult<Loaded<Decomposition>> {
    let file: DecompFile = read(path)?;
    let terms = file
        .terms
        .iter()
        .map(|t| Ok((t.weight, column(&t.vector, path, "terms")?)))
        .collect::<CliResult<Vec<_>>>()?;
    let value = Decomposition::new(terms).map_err(|e| CliError::File {
        path: path.to_owned(),
        field: "terms",
        message: e.to_string(),
    })?;
    let echo = echo_of(&file, path);
    Ok(Loaded { value, echo })
}

pub fn load_observable(path: &Path) -> CliResult<Loaded<Observable>> {
    let file: ObservableFile = read(path)?;
    let subsystem = match file.subsystem {
        1 => Subsystem::Nearby,
        2 => Subsystem::Remote,
        other => {
            return Err(CliError::File {
                path: path.to_owned(),
                field: "subsystem",
                message: format!("{other} is not a subsystem, expected 1 or 2"),
            })
        }
    };
    let matrix = row_matrix(&file.matrix, path, "matrix")?;
    let value = Observable::new(matrix, subsystem).map_err(precondition)?;
    let echo = echo_of(&file, path);
    Ok(Loaded { value, echo })
}
