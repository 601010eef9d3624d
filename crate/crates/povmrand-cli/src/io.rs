//! Input file schemas.
//!
//! Complex numbers are [re, im] pairs; matrices are row-major flat lists of
//! pairs. Operators on a system-plus-ancilla space use the A (x) Q index
//! convention with the ancilla fastest-varying: index = a * dim_q + q.

use povmrand::linalg::C64;
use povmrand::{ComplexMatrix, DensityState, Ket, Povm};
use serde::Deserialize;
use std::path::Path;

#[derive(Debug)]
pub enum InputError {
    /// I/O or JSON syntax trouble (exit code 2).
    Parse(String),
    /// Structurally fine but not a valid POVM/state (exit code 1).
    Invalid(String),
}

#[derive(Deserialize)]
pub struct PovmFile {
    pub dim: usize,
    pub elements: Vec<Vec<[f64; 2]>>,
}

#[derive(Deserialize)]
pub struct StateFile {
    pub dim: usize,
    #[serde(default)]
    pub ket: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub matrix: Option<Vec<[f64; 2]>>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError::Parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| InputError::Parse(format!("cannot parse {}: {e}", path.display())))
}

fn entries_to_matrix(dim: usize, entries: &[[f64; 2]], what: &str) -> Result<ComplexMatrix, InputError> {
    if entries.len() != dim * dim {
        return Err(InputError::Invalid(format!(
            "{what}: expected {} entries for dim {dim}, found {}",
            dim * dim,
            entries.len()
        )));
    }
    Ok(ComplexMatrix::from_rows(
        dim,
        dim,
        entries.iter().map(|[re, im]| C64::new(*re, *im)).collect(),
    ))
}

pub fn load_povm(path: &Path) -> Result<Povm, InputError> {
    let file: PovmFile = read_json(path)?;
    if file.dim == 0 {
        return Err(InputError::Invalid("dim must be positive".into()));
    }
    let mut elements = Vec::with_capacity(file.elements.len());
    for (i, raw) in file.elements.iter().enumerate() {
        elements.push(entries_to_matrix(file.dim, raw, &format!("element {i}"))?);
    }
    Povm::new(file.dim, elements).map_err(|e| InputError::Invalid(e.to_string()))
}

/// Parse a POVM file without running the validity check; `cmd_validate`
/// wants to report the violation itself rather than fail on it.
pub fn load_povm_unvalidated(path: &Path) -> Result<(usize, Vec<ComplexMatrix>), InputError> {
    let file: PovmFile = read_json(path)?;
    if file.dim == 0 {
        return Err(InputError::Invalid("dim must be positive".into()));
    }
    let mut elements = Vec::with_capacity(file.elements.len());
    for (i, raw) in file.elements.iter().enumerate() {
        elements.push(entries_to_matrix(file.dim, raw, &format!("element {i}"))?);
    }
    Ok((file.dim, elements))
}

/// A state file holds either a ket or a density matrix; kets are promoted to
/// their projectors.
pub fn load_state(path: &Path) -> Result<DensityState, InputError> {
    let file: StateFile = read_json(path)?;
    if file.dim == 0 {
        return Err(InputError::Invalid("dim must be positive".into()));
    }
    match (&file.ket, &file.matrix) {
        (Some(raw), None) => {
            if raw.len() != file.dim {
                return Err(InputError::Invalid(format!(
                    "ket: expected {} amplitudes, found {}",
                    file.dim,
                    raw.len()
                )));
            }
            let amps: Vec<C64> = raw.iter().map(|[re, im]| C64::new(*re, *im)).collect();
            let ket = Ket::new(amps).map_err(|e| InputError::Invalid(e.to_string()))?;
            Ok(DensityState::from_ket(&ket))
        }
        (None, Some(raw)) => {
            let m = entries_to_matrix(file.dim, raw, "matrix")?;
            DensityState::new(m).map_err(|e| InputError::Invalid(e.to_string()))
        }
        _ => Err(InputError::Invalid(
            "state file must contain exactly one of `ket` or `matrix`".into(),
        )),
    }
}
