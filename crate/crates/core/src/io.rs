//! JSON files for states, densities and operators.
//!
//! ```text
//! state:    {"num_qubits": n, "amplitudes": [[re, im], ...]}   basis-index order
//! density:  {"num_qubits": n, "matrix": [[re, im], ...]}       row-major
//! ```
//!
//! Operators use the density layout without the density invariants.
//! Numbers are written with 17 significant digits so every `f64` survives
//! a write/read cycle bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexScalar};
use crate::state::{DensityMatrix, StateVector};

#[derive(Debug, Clone, Deserialize)]
pub struct StateFile {
    pub num_qubits: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct MatrixFile {
    pub num_qubits: usize,
    pub matrix: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn parse(json: &str) -> Result<Self> {
        let file: Self = serde_json::from_str(json)?;
        let expected = checked_dim(file.num_qubits)?;
        if file.amplitudes.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for {} qubits",
                file.amplitudes.len(),
                file.num_qubits
            )));
        }
        Ok(file)
    }

    pub fn complex_amplitudes(&self) -> Vec<ComplexScalar> {
        to_complex(&self.amplitudes)
    }

    /// Strict conversion: the amplitudes must already be normalized.
    pub fn into_state(self) -> Result<StateVector> {
        StateVector::from_amplitudes(self.complex_amplitudes())
    }
}

impl MatrixFile {
    pub fn parse(json: &str) -> Result<Self> {
        let file: Self = serde_json::from_str(json)?;
        let dim = checked_dim(file.num_qubits)?;
        if file.matrix.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {dim}x{dim} matrix",
                file.matrix.len()
            )));
        }
        Ok(file)
    }

    pub fn into_matrix(self) -> Result<ComplexMatrix> {
        let dim = 1 << self.num_qubits;
        ComplexMatrix::new(dim, dim, to_complex(&self.matrix))
    }

    pub fn into_density(self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.into_matrix()?)
    }
}

fn checked_dim(num_qubits: usize) -> Result<usize> {
    if num_qubits > 16 {
        return Err(Error::DimensionMismatch(format!(
            "{num_qubits} qubits is too many"
        )));
    }
    Ok(1 << num_qubits)
}

fn to_complex(pairs: &[[f64; 2]]) -> Vec<ComplexScalar> {
    pairs
        .iter()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect()
}

fn push_pairs(out: &mut String, entries: &[ComplexScalar]) {
    out.push('[');
    for (k, z) in entries.iter().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "[{:.16e}, {:.16e}]", z.re, z.im);
    }
    out.push(']');
}

fn render(num_qubits: usize, key: &str, entries: &[ComplexScalar]) -> String {
    let mut out = format!("{{\"num_qubits\": {num_qubits}, \"{key}\": ");
    push_pairs(&mut out, entries);
    out.push_str("}\n");
    out
}

pub fn state_to_json(state: &StateVector) -> String {
    render(
        state.num_qubits(),
        "amplitudes",
        state.amplitudes().entries(),
    )
}

pub fn density_to_json(rho: &DensityMatrix) -> String {
    render(rho.num_qubits(), "matrix", rho.matrix().entries())
}

/// Square operators on whole qubit registers, in the density layout.
pub fn operator_to_json(op: &ComplexMatrix) -> Result<String> {
    if !op.is_square() || !op.rows().is_power_of_two() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} is not a qubit-register operator",
            op.rows(),
            op.cols()
        )));
    }
    Ok(render(
        op.rows().trailing_zeros() as usize,
        "matrix",
        op.entries(),
    ))
}

pub fn state_from_json(json: &str) -> Result<StateVector> {
    StateFile::parse(json)?.into_state()
}

pub fn density_from_json(json: &str) -> Result<DensityMatrix> {
    MatrixFile::parse(json)?.into_density()
}

pub fn operator_from_json(json: &str) -> Result<ComplexMatrix> {
    MatrixFile::parse(json)?.into_matrix()
}

pub fn write_state(path: &Path, state: &StateVector) -> Result<()> {
    fs::write(path, state_to_json(state))?;
    Ok(())
}

pub fn read_state(path: &Path) -> Result<StateVector> {
    state_from_json(&fs::read_to_string(path)?)
}

pub fn write_density(path: &Path, rho: &DensityMatrix) -> Result<()> {
    fs::write(path, density_to_json(rho))?;
    Ok(())
}

pub fn read_density(path: &Path) -> Result<DensityMatrix> {
    density_from_json(&fs::read_to_string(path)?)
}
