//! JSON matrix files.
//!
//! One object per file with a `kind` tag, a `dims` header and complex entries
//! written as `[re, im]` pairs:
//!
//! ```json
//! {"kind": "density", "dims": [2], "matrix": [[[0.5, 0], [0, -0.5]], [[0, 0.5], [0.5, 0]]]}
//! {"kind": "pure", "dims": [2], "vector": [[0.7071067811865476, 0], [0, 0.7071067811865476]]}
//! {"kind": "bipartite", "dims": [2, 2], "matrix": [...]}
//! {"kind": "kraus_set", "dims": [d_out, d_in], "trace_preserving": true, "operators": [[...], ...]}
//! ```

use imkit_core::{BipartiteState, Complex64, ComplexMatrix, ComplexVector, DensityMatrix, KrausSet, PureState, Tolerances};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub type Entry = [f64; 2];
pub type MatrixRows = Vec<Vec<Entry>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityFile {
    pub kind: String,
    pub dims: Vec<usize>,
    pub matrix: MatrixRows,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PureFile {
    pub kind: String,
    pub dims: Vec<usize>,
    pub vector: Vec<Entry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KrausFile {
    pub kind: String,
    pub dims: Vec<usize>,
    pub trace_preserving: bool,
    pub operators: Vec<MatrixRows>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixFile {
    Density(DensityFile),
    Pure(PureFile),
    Bipartite(DensityFile),
    Kraus(KrausFile),
}

#[derive(Deserialize)]
struct KindProbe {
    kind: String,
}

/// A validated file.
#[derive(Debug, Clone)]
pub enum Loaded {
    Density(DensityMatrix),
    Pure(PureState),
    Bipartite(BipartiteState),
    Kraus(KrausSet),
}

impl Loaded {
    pub fn kind(&self) -> &'static str {
        match self {
            Loaded::Density(_) => "density",
            Loaded::Pure(_) => "pure",
            Loaded::Bipartite(_) => "bipartite",
            Loaded::Kraus(_) => "kraus_set",
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        match self {
            Loaded::Density(r) => vec![r.dim()],
            Loaded::Pure(p) => vec![p.dim()],
            Loaded::Bipartite(b) => {
                let (a, b) = b.dims();
                vec![a, b]
            }
            Loaded::Kraus(k) => vec![k.d_out(), k.d_in()],
        }
    }

    /// Any state file as a density matrix.
    pub fn density(&self) -> Option<DensityMatrix> {
        match self {
            Loaded::Density(r) => Some(r.clone()),
            Loaded::Pure(p) => Some(p.projector()),
            Loaded::Bipartite(b) => Some(b.state().clone()),
            Loaded::Kraus(_) => None,
        }
    }
}

fn parse_error(path: &str, text: &str, field: &str, msg: impl std::fmt::Display) -> CliError {
    let needle = format!("\"{field}\"");
    match text.lines().position(|l| l.contains(&needle)) {
        Some(line) => CliError::Parse(format!("{path}: line {}, field `{field}`: {msg}", line + 1)),
        None => CliError::Parse(format!("{path}: field `{field}`: {msg}")),
    }
}

fn json_error(path: &str, e: serde_json::Error) -> CliError {
    CliError::Parse(format!("{path}: {e}"))
}

impl MatrixFile {
    pub fn parse(path: &str, text: &str) -> Result<MatrixFile, CliError> {
        let probe: KindProbe = serde_json::from_str(text).map_err(|e| json_error(path, e))?;
        match probe.kind.as_str() {
            "density" => Ok(MatrixFile::Density(serde_json::from_str(text).map_err(|e| json_error(path, e))?)),
            "bipartite" => Ok(MatrixFile::Bipartite(serde_json::from_str(text).map_err(|e| json_error(path, e))?)),
            "pure" => Ok(MatrixFile::Pure(serde_json::from_str(text).map_err(|e| json_error(path, e))?)),
            "kraus_set" => Ok(MatrixFile::Kraus(serde_json::from_str(text).map_err(|e| json_error(path, e))?)),
            other => Err(parse_error(
                path,
                text,
                "kind",
                format!("unknown kind `{other}` (expected density, pure, bipartite or kraus_set)"),
            )),
        }
    }

    #[cfg(test)]
    pub fn to_json(&self) -> String {
        let value = match self {
            MatrixFile::Density(f) | MatrixFile::Bipartite(f) => serde_json::to_string_pretty(f),
            MatrixFile::Pure(f) => serde_json::to_string_pretty(f),
            MatrixFile::Kraus(f) => serde_json::to_string_pretty(f),
        };
        value.expect("matrix files serialize")
    }

    /// Checks shapes against `dims` and the invariants of the target type.
    pub fn validate(&self, path: &str, text: &str, tol: &Tolerances) -> Result<Loaded, CliError> {
        let invariant = |e: imkit_core::Error| CliError::Invariant(format!("{path}: {e}"));
        match self {
            MatrixFile::Density(f) => {
                let [d] = dims_n::<1>(path, text, &f.dims)?;
                let m = to_matrix(path, text, "matrix", &f.matrix, d, d)?;
                Ok(Loaded::Density(DensityMatrix::with_tolerances(m, tol).map_err(invariant)?))
            }
            MatrixFile::Bipartite(f) => {
                let [da, db] = dims_n::<2>(path, text, &f.dims)?;
                let m = to_matrix(path, text, "matrix", &f.matrix, da * db, da * db)?;
                let rho = DensityMatrix::with_tolerances(m, tol).map_err(invariant)?;
                Ok(Loaded::Bipartite(BipartiteState::new(rho, da, db).map_err(invariant)?))
            }
            MatrixFile::Pure(f) => {
                let [d] = dims_n::<1>(path, text, &f.dims)?;
                if f.vector.len() != d {
                    return Err(parse_error(path, text, "vector", format!("expected {d} entries, found {}", f.vector.len())));
                }
                let v = ComplexVector::from_iterator(d, f.vector.iter().map(|e| Complex64::new(e[0], e[1])));
                Ok(Loaded::Pure(PureState::with_tolerances(v, tol).map_err(invariant)?))
            }
            MatrixFile::Kraus(f) => {
                let [d_out, d_in] = dims_n::<2>(path, text, &f.dims)?;
                let ops = f
                    .operators
                    .iter()
                    .map(|op| to_matrix(path, text, "operators", op, d_out, d_in))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Loaded::Kraus(KrausSet::with_tolerances(ops, f.trace_preserving, tol).map_err(invariant)?))
            }
        }
    }
}

fn dims_n<const N: usize>(path: &str, text: &str, dims: &[usize]) -> Result<[usize; N], CliError> {
    let arr: [usize; N] = dims
        .try_into()
        .map_err(|_| parse_error(path, text, "dims", format!("expected {N} dimension(s), found {}", dims.len())))?;
    if arr.contains(&0) {
        return Err(parse_error(path, text, "dims", "dimensions must be positive"));
    }
    Ok(arr)
}

fn to_matrix(path: &str, text: &str, field: &str, rows: &MatrixRows, nr: usize, nc: usize) -> Result<ComplexMatrix, CliError> {
    if rows.len() != nr {
        return Err(parse_error(path, text, field, format!("expected {nr} rows, found {}", rows.len())));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != nc {
            return Err(parse_error(path, text, field, format!("row {i}: expected {nc} entries, found {}", row.len())));
        }
    }
    Ok(ComplexMatrix::from_fn(nr, nc, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

pub fn matrix_rows(m: &ComplexMatrix) -> MatrixRows {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn vector_entries(v: &ComplexVector) -> Vec<Entry> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn kraus_file(k: &KrausSet) -> KrausFile {
    KrausFile {
        kind: "kraus_set".into(),
        dims: vec![k.d_out(), k.d_in()],
        trace_preserving: k.trace_preserving(),
        operators: k.ops().iter().map(matrix_rows).collect(),
    }
}
