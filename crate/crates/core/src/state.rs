//! Qubit registers: pure states, density matrices, partial trace, operator
//! embedding and projective measure-and-discard channels.
//!
//! Register convention: qubit 0 is the most significant bit of a
//! computational-basis index, so a register `(q0, q1, ..., q(n-1))` matches
//! the left-to-right order of `q0 ⊗ q1 ⊗ ... ⊗ q(n-1)`. [`bit_shift`] is the
//! only place this mapping is written down.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexScalar, ONE, ZERO};
use crate::random::{complex_gaussian, SeededRng};

/// Default tolerance for normalization, Hermiticity, trace and unitarity gates.
pub const DEFAULT_TOL: f64 = 1e-10;

const POSITIVITY_PROBES: usize = 64;
const POSITIVITY_PROBE_SEED: u64 = 0x5eed_0f9e_0be5;

/// Shift that isolates the bit of `qubit` in an `n`-qubit basis index.
#[inline]
pub fn bit_shift(qubit: usize, num_qubits: usize) -> usize {
    num_qubits - 1 - qubit
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::DimensionMismatch(format!(
            "dimension {dim} is not a power of two"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

fn check_indices(indices: &[usize], num_qubits: usize) -> Result<()> {
    let mut seen = vec![false; num_qubits];
    for &q in indices {
        if q >= num_qubits {
            return Err(Error::IndexOutOfRange {
                index: q,
                num_qubits,
            });
        }
        if std::mem::replace(&mut seen[q], true) {
            return Err(Error::DuplicateIndex(q));
        }
    }
    Ok(())
}

/// Gathers the bits of `index` at `qubits` (in the given order) into a
/// compact sub-index, first listed qubit most significant.
fn gather_bits(index: usize, qubits: &[usize], num_qubits: usize) -> usize {
    qubits.iter().fold(0, |acc, &q| {
        (acc << 1) | ((index >> bit_shift(q, num_qubits)) & 1)
    })
}

/// Inverse of [`gather_bits`]: places the bits of `sub` onto `qubits`.
fn scatter_bits(sub: usize, qubits: &[usize], num_qubits: usize) -> usize {
    let m = qubits.len();
    qubits.iter().enumerate().fold(0, |acc, (k, &q)| {
        acc | (((sub >> (m - 1 - k)) & 1) << bit_shift(q, num_qubits))
    })
}

/// Lifts `u`, acting on `targets` in the given order, to the full
/// `num_qubits` register with identity on every other qubit.
pub fn embed(u: &ComplexMatrix, targets: &[usize], num_qubits: usize) -> Result<ComplexMatrix> {
    u.require_square()?;
    check_indices(targets, num_qubits)?;
    if u.rows() != 1 << targets.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator on {} target qubits",
            u.rows(),
            u.cols(),
            targets.len()
        )));
    }
    let dim = 1usize << num_qubits;
    let target_mask = scatter_bits((1 << targets.len()) - 1, targets, num_qubits);
    let mut out = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        let rest = i & !target_mask;
        let ri = gather_bits(i, targets, num_qubits);
        for cj in 0..u.cols() {
            let z = u[(ri, cj)];
            if z != ZERO {
                out[(i, rest | scatter_bits(cj, targets, num_qubits))] = z;
            }
        }
    }
    Ok(out)
}

/// Normalized pure state on an ordered qubit register.
#[derive(Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: ComplexMatrix,
}

impl StateVector {
    /// Wraps a column vector, requiring unit norm within [`DEFAULT_TOL`].
    pub fn new(amplitudes: ComplexMatrix) -> Result<Self> {
        if !amplitudes.is_column() {
            return Err(Error::DimensionMismatch(
                "state must be a column vector".into(),
            ));
        }
        let num_qubits = qubits_for_dim(amplitudes.rows())?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::InvalidState(format!("norm {norm} is not 1")));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn from_amplitudes(amplitudes: Vec<ComplexScalar>) -> Result<Self> {
        Self::new(ComplexMatrix::new(amplitudes.len(), 1, amplitudes)?)
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<ComplexScalar>) -> Result<Self> {
        let v = ComplexMatrix::new(amplitudes.len(), 1, amplitudes)?;
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Self::new(v.scale(Complex64::new(1.0 / norm, 0.0)))
    }

    /// Computational basis state `|index⟩` on `num_qubits` qubits.
    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let dim = 1 << num_qubits;
        assert!(index < dim, "basis index {index} out of range");
        Self {
            num_qubits,
            amplitudes: ComplexMatrix::basis(dim, index),
        }
    }

    /// Single-qubit `|+⟩ = (|0⟩ + |1⟩)/√2`.
    pub fn plus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            num_qubits: 1,
            amplitudes: ComplexMatrix::column(vec![h, h]),
        }
    }

    pub(crate) fn from_column_unchecked(amplitudes: ComplexMatrix) -> Self {
        let num_qubits = amplitudes.rows().trailing_zeros() as usize;
        Self {
            num_qubits,
            amplitudes,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.rows()
    }

    pub fn amplitudes(&self) -> &ComplexMatrix {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> ComplexScalar {
        self.amplitudes[(index, 0)]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Register concatenation `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            num_qubits: self.num_qubits + other.num_qubits,
            amplitudes: self.amplitudes.tensor(&other.amplitudes),
        }
    }

    pub fn inner(&self, other: &Self) -> Result<ComplexScalar> {
        self.amplitudes.inner(&other.amplitudes)
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> DensityMatrix {
        let m = self
            .amplitudes
            .outer(&self.amplitudes)
            .expect("column vector outer product");
        DensityMatrix {
            num_qubits: self.num_qubits,
            matrix: m,
        }
    }

    /// `U|ψ⟩` for a full-register unitary `u`.
    pub fn apply_unitary(&self, u: &ComplexMatrix) -> Result<Self> {
        require_unitary_on(u, self.dim())?;
        Ok(Self {
            num_qubits: self.num_qubits,
            amplitudes: u.matmul(&self.amplitudes)?,
        })
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateVector({} qubits) ", self.num_qubits)?;
        f.debug_list()
            .entries(self.amplitudes.entries().iter().map(|z| (z.re, z.im)))
            .finish()
    }
}

fn require_unitary_on(u: &ComplexMatrix, dim: usize) -> Result<()> {
    u.require_square()?;
    if u.rows() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator on a {dim}-dimensional state",
            u.rows(),
            u.cols()
        )));
    }
    if !u.is_unitary(DEFAULT_TOL)? {
        return Err(Error::NotUnitary { tol: DEFAULT_TOL });
    }
    Ok(())
}

/// Hermitian, unit-trace, positive operator on a qubit register.
#[derive(Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace within [`DEFAULT_TOL`] and probes
    /// positivity with seeded random vectors.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        matrix.require_square()?;
        let num_qubits = qubits_for_dim(matrix.rows())?;
        let rho = Self { num_qubits, matrix };
        rho.validate(DEFAULT_TOL)?;
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        let num_qubits = matrix.rows().trailing_zeros() as usize;
        Self { num_qubits, matrix }
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1 << num_qubits;
        Self {
            num_qubits,
            matrix: ComplexMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0)),
        }
    }

    /// Checks the density-matrix invariants. Positivity is probed, not proven.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if !self.matrix.is_hermitian(tol)? {
            return Err(Error::InvalidState(
                "density matrix is not Hermitian".into(),
            ));
        }
        let tr = self.matrix.trace()?;
        if (tr - ONE).norm() > tol {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let mut rng = SeededRng::new(POSITIVITY_PROBE_SEED);
        for _ in 0..POSITIVITY_PROBES {
            let v = ComplexMatrix::column(
                (0..self.dim())
                    .map(|_| complex_gaussian(&mut rng))
                    .collect(),
            );
            let v = v.scale(Complex64::new(1.0 / v.norm(), 0.0));
            let expectation = v.inner(&self.matrix.matmul(&v)?)?.re;
            if expectation < -tol {
                return Err(Error::InvalidState(format!(
                    "negative expectation {expectation} on positivity probe"
                )));
            }
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> ComplexScalar {
        self.matrix.trace().expect("density matrices are square")
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        let m = &self.matrix;
        let mut acc = 0.0;
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                acc += (m[(i, j)] * m[(j, i)]).re;
            }
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.matrix.max_abs_diff(&other.matrix)
    }

    /// Reduced state on `keep`. Kept qubits come out in ascending register
    /// order whatever order they are listed in; an empty `keep` yields the
    /// 1x1 trace.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let n = self.num_qubits;
        check_indices(keep, n)?;
        let mut kept = keep.to_vec();
        kept.sort_unstable();
        let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();

        let kept_offsets: Vec<usize> = (0..1usize << kept.len())
            .map(|a| scatter_bits(a, &kept, n))
            .collect();
        let traced_offsets: Vec<usize> = (0..1usize << traced.len())
            .map(|e| scatter_bits(e, &traced, n))
            .collect();

        let out_dim = kept_offsets.len();
        let mut out = ComplexMatrix::zeros(out_dim, out_dim);
        for (a, &ra) in kept_offsets.iter().enumerate() {
            for (b, &rb) in kept_offsets.iter().enumerate() {
                out[(a, b)] = traced_offsets
                    .iter()
                    .map(|&e| self.matrix[(ra | e, rb | e)])
                    .sum();
            }
        }
        Ok(Self {
            num_qubits: kept.len(),
            matrix: out,
        })
    }

    /// `U ρ U†` for a full-register unitary `u`.
    pub fn apply_unitary(&self, u: &ComplexMatrix) -> Result<Self> {
        require_unitary_on(u, self.dim())?;
        Ok(self.conjugate_by(u))
    }

    fn conjugate_by(&self, op: &ComplexMatrix) -> Self {
        let m = &(op * &self.matrix) * &op.dagger();
        Self {
            num_qubits: self.num_qubits,
            matrix: m,
        }
    }

    /// Non-selective projective measurement of `qubit` in `basis`:
    /// `ρ → P0 ρ P0 + P1 ρ P1`.
    pub fn measure_discard(&self, qubit: usize, basis: &MeasurementBasis) -> Result<Self> {
        if qubit >= self.num_qubits {
            return Err(Error::IndexOutOfRange {
                index: qubit,
                num_qubits: self.num_qubits,
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim(), self.dim());
        for projector in basis.projectors() {
            let p = embed(&projector, &[qubit], self.num_qubits)?;
            out = &out + self.conjugate_by(&p).matrix();
        }
        Ok(Self {
            num_qubits: self.num_qubits,
            matrix: out,
        })
    }

    /// Kraus-form channel `ρ → Σ K ρ K†` with full-register Kraus operators.
    pub fn apply_kraus(&self, kraus: &[ComplexMatrix]) -> Result<Self> {
        let mut out = ComplexMatrix::zeros(self.dim(), self.dim());
        for k in kraus {
            if k.rows() != self.dim() || k.cols() != self.dim() {
                return Err(Error::DimensionMismatch("Kraus operator size".into()));
            }
            out = &out + self.conjugate_by(k).matrix();
        }
        Ok(Self {
            num_qubits: self.num_qubits,
            matrix: out,
        })
    }

    /// Unnormalized projection `P ρ P` for a full-register projector.
    pub(crate) fn project(&self, projector: &ComplexMatrix) -> Self {
        self.conjugate_by(projector)
    }

    /// Divides by the trace. Fails on a (numerically) zero-weight branch.
    pub(crate) fn renormalized(&self) -> Result<Self> {
        let tr = self.trace().re;
        if tr <= f64::EPSILON {
            return Err(Error::InvalidState("zero-probability branch".into()));
        }
        Ok(Self {
            num_qubits: self.num_qubits,
            matrix: self.matrix.scale(Complex64::new(1.0 / tr, 0.0)),
        })
    }

    /// `⟨target|ρ|target⟩`.
    pub fn fidelity_pure(&self, target: &StateVector) -> Result<f64> {
        if target.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}-dimensional target against {}-dimensional density",
                target.dim(),
                self.dim()
            )));
        }
        let v = target.amplitudes();
        Ok(v.inner(&self.matrix.matmul(v)?)?.re)
    }
}

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "DensityMatrix({} qubits) {:?}",
            self.num_qubits, self.matrix
        )
    }
}

/// Clamps a fidelity carrying floating-point residue into `[0, 1]`.
pub fn clamp_fidelity(f: f64) -> f64 {
    f.clamp(0.0, 1.0)
}

/// Rank-1 projective qubit basis given by Bloch angles:
/// `|b0⟩ = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩` and its orthogonal partner
/// `|b1⟩ = sin(θ/2)|0⟩ − e^{iφ} cos(θ/2)|1⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementBasis {
    pub theta: f64,
    pub phi: f64,
}

impl MeasurementBasis {
    pub const Z: Self = Self {
        theta: 0.0,
        phi: 0.0,
    };
    pub const X: Self = Self {
        theta: std::f64::consts::FRAC_PI_2,
        phi: 0.0,
    };
    pub const Y: Self = Self {
        theta: std::f64::consts::FRAC_PI_2,
        phi: std::f64::consts::FRAC_PI_2,
    };

    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    pub fn vectors(&self) -> [StateVector; 2] {
        let (s, c) = (self.theta / 2.0).sin_cos();
        let phase = Complex64::from_polar(1.0, self.phi);
        let b0 = ComplexMatrix::column(vec![Complex64::new(c, 0.0), phase * s]);
        let b1 = ComplexMatrix::column(vec![Complex64::new(s, 0.0), -phase * c]);
        [
            StateVector::from_column_unchecked(b0),
            StateVector::from_column_unchecked(b1),
        ]
    }

    pub fn projectors(&self) -> [ComplexMatrix; 2] {
        self.vectors().map(|v| v.to_density().matrix)
    }
}
