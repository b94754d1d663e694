//! The three-partite masking scheme.
//!
//! One data qubit `A` and two Bell pairs `(S1, N1)`, `(S2, N2)` form a
//! five-qubit register in the fixed order `(A, S1, N1, S2, N2)`. The encoder
//!
//! ```text
//! U_enc = ½ Σ_μ α_μ⁻¹ σ_μ(A) ⊗ σ_μ(S1) ⊗ I(N1) ⊗ σ_μ(S2) ⊗ I(N2)
//! ```
//!
//! hides the data qubit in the correlations between the systems
//! `X = {A}`, `Y = {S1, N1}` and `Z = {S2, N2}`. Any two systems can undo it
//! with the pair decoders built here.
//!
//! Decoders are built on their native 8- or 16-dimensional subsystems and
//! lifted into the register through [`embed`]; nothing is hand-assembled at
//! 32 dimensions except the encoder itself.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexScalar, I, ONE, ZERO};
use crate::state::{embed, DensityMatrix, StateVector};

/// Index into `{I, σx, σy, σz}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliIndex(u8);

impl PauliIndex {
    pub const ALL: [PauliIndex; 4] = [PauliIndex(0), PauliIndex(1), PauliIndex(2), PauliIndex(3)];

    pub fn new(mu: u8) -> Result<Self> {
        if mu < 4 {
            Ok(Self(mu))
        } else {
            Err(Error::Precondition(format!(
                "Pauli index {mu} not in 0..=3"
            )))
        }
    }

    pub fn mu(self) -> u8 {
        self.0
    }

    /// `σ_0 = I`, `σ_1 = X`, `σ_2 = Y = [[0, −i], [i, 0]]`, `σ_3 = Z`.
    pub fn matrix(self) -> ComplexMatrix {
        match self.0 {
            0 => ComplexMatrix::identity(2),
            1 => ComplexMatrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]),
            2 => ComplexMatrix::from_rows(&[&[ZERO, -I], &[I, ZERO]]),
            _ => ComplexMatrix::diag(&[ONE, -ONE]),
        }
    }

    /// Phase coefficient paired with `σ_μ`.
    pub fn alpha(self) -> AlphaCoeff {
        AlphaCoeff(if self.0 == 0 { ONE } else { I })
    }
}

/// `α_0 = 1`, `α_1 = α_2 = α_3 = i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaCoeff(ComplexScalar);

impl AlphaCoeff {
    pub fn value(self) -> ComplexScalar {
        self.0
    }

    /// Exact inverse; both values are unit-modulus with a single nonzero
    /// component, so the conjugate is exact.
    pub fn inverse(self) -> ComplexScalar {
        self.0.conj()
    }
}

pub const QUBIT_A: usize = 0;
pub const QUBIT_S1: usize = 1;
pub const QUBIT_N1: usize = 2;
pub const QUBIT_S2: usize = 3;
pub const QUBIT_N2: usize = 4;
pub const REGISTER_QUBITS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum System {
    X,
    Y,
    Z,
}

impl System {
    pub const ALL: [System; 3] = [System::X, System::Y, System::Z];

    pub fn qubits(self) -> &'static [usize] {
        match self {
            System::X => &[QUBIT_A],
            System::Y => &[QUBIT_S1, QUBIT_N1],
            System::Z => &[QUBIT_S2, QUBIT_N2],
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            System::X => "X",
            System::Y => "Y",
            System::Z => "Z",
        })
    }
}

/// A pair of systems holding enough correlation to decode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairId {
    XY,
    XZ,
    YZ,
}

impl PairId {
    pub const ALL: [PairId; 3] = [PairId::XY, PairId::XZ, PairId::YZ];

    pub fn systems(self) -> [System; 2] {
        match self {
            PairId::XY => [System::X, System::Y],
            PairId::XZ => [System::X, System::Z],
            PairId::YZ => [System::Y, System::Z],
        }
    }

    /// Register qubits covered by the pair, ascending. This is also the
    /// order the decoder's native subsystem uses.
    pub fn qubits(self) -> Vec<usize> {
        self.systems()
            .iter()
            .flat_map(|s| s.qubits().iter().copied())
            .collect()
    }

    /// Qubit on which the decoded state appears.
    pub fn output_qubit(self) -> usize {
        match self {
            PairId::XY | PairId::XZ => QUBIT_A,
            PairId::YZ => QUBIT_S1,
        }
    }

    /// The third system, the one this pair does not need.
    pub fn complement(self) -> System {
        match self {
            PairId::XY => System::Z,
            PairId::XZ => System::Y,
            PairId::YZ => System::X,
        }
    }

    /// Decoder on the pair's native subsystem.
    pub fn decoder(self) -> &'static ComplexMatrix {
        static XY: OnceLock<ComplexMatrix> = OnceLock::new();
        static XZ: OnceLock<ComplexMatrix> = OnceLock::new();
        static YZ: OnceLock<ComplexMatrix> = OnceLock::new();
        match self {
            PairId::XY => XY.get_or_init(build_u_dec_xy),
            PairId::XZ => XZ.get_or_init(build_u_dec_xz),
            PairId::YZ => YZ.get_or_init(build_u_dec_yz),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PairId::XY => "xy",
            PairId::XZ => "xz",
            PairId::YZ => "yz",
        }
    }
}

impl fmt::Display for PairId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PairId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xy" => Ok(PairId::XY),
            "xz" => Ok(PairId::XZ),
            "yz" => Ok(PairId::YZ),
            other => Err(Error::Precondition(format!("unknown pair {other:?}"))),
        }
    }
}

/// `(|00⟩ + |11⟩)/√2`.
pub fn bell_phi() -> StateVector {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    StateVector::from_amplitudes(vec![h, ZERO, ZERO, h]).expect("normalized Bell state")
}

/// `(σ_μ ⊗ I)|φ⟩`.
pub fn phi_mu(mu: PauliIndex) -> StateVector {
    let op = mu.matrix().tensor(&ComplexMatrix::identity(2));
    bell_phi()
        .apply_unitary(&op)
        .expect("Pauli operators are unitary")
}

fn bell_projector(mu: PauliIndex) -> ComplexMatrix {
    phi_mu(mu).to_density().matrix().clone()
}

/// Encoder on `(A, S1, N1, S2, N2)`, 32x32.
pub fn build_u_enc() -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    let half = Complex64::new(0.5, 0.0);
    PauliIndex::ALL
        .iter()
        .map(|&mu| {
            let s = mu.matrix();
            s.tensor(&s)
                .tensor(&id)
                .tensor(&s)
                .tensor(&id)
                .scale(mu.alpha().inverse() * half)
        })
        .reduce(|acc, term| &acc + &term)
        .expect("four terms")
}

/// Decoder for systems `Y, Z` on `(S1, N1, S2, N2)`, 16x16; output on `S1`.
pub fn build_u_dec_yz() -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    PauliIndex::ALL
        .iter()
        .map(|&mu| {
            bell_projector(mu)
                .tensor(&id)
                .tensor(&mu.matrix().transpose())
                .scale(mu.alpha().value())
        })
        .reduce(|acc, term| &acc + &term)
        .expect("four terms")
}

fn data_qubit_decoder() -> ComplexMatrix {
    PauliIndex::ALL
        .iter()
        .map(|&mu| {
            mu.matrix()
                .tensor(&bell_projector(mu))
                .scale(mu.alpha().value())
        })
        .reduce(|acc, term| &acc + &term)
        .expect("four terms")
}

/// Decoder for systems `X, Y` on `(A, S1, N1)`, 8x8; output on `A`.
pub fn build_u_dec_xy() -> ComplexMatrix {
    data_qubit_decoder()
}

/// Decoder for systems `X, Z` on `(A, S2, N2)`, 8x8; output on `A`. The
/// matrix equals the `XY` decoder; only the target qubits differ.
pub fn build_u_dec_xz() -> ComplexMatrix {
    data_qubit_decoder()
}

fn encoder() -> &'static ComplexMatrix {
    static ENC: OnceLock<ComplexMatrix> = OnceLock::new();
    ENC.get_or_init(build_u_enc)
}

/// Encodes a single data qubit into the five-qubit register:
/// `U_enc (|ψ⟩ ⊗ |φ⟩ ⊗ |φ⟩)`.
pub fn mask(psi: &StateVector) -> Result<StateVector> {
    if psi.num_qubits() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "mask takes one qubit, got {}",
            psi.num_qubits()
        )));
    }
    let input = psi.tensor(&bell_phi()).tensor(&bell_phi());
    input.apply_unitary(encoder())
}

/// Result of a pair decode.
#[derive(Clone, Debug)]
pub struct Decoded {
    /// Reduced state on the pair's output qubit.
    pub recovered: DensityMatrix,
    /// Whole post-decode state, on the same register as the input.
    pub post_global: DensityMatrix,
}

/// Runs the pair decoder on either the full five-qubit state or the reduced
/// state of the pair's own qubits (ascending register order).
pub fn decode(pair: PairId, state: &DensityMatrix) -> Result<Decoded> {
    let pair_qubits = pair.qubits();
    let n = state.num_qubits();
    let (targets, output) = if n == REGISTER_QUBITS {
        (pair_qubits.clone(), pair.output_qubit())
    } else if n == pair_qubits.len() {
        let local = pair_qubits
            .iter()
            .position(|&q| q == pair.output_qubit())
            .expect("output qubit belongs to its pair");
        ((0..n).collect(), local)
    } else {
        return Err(Error::DimensionMismatch(format!(
            "{n}-qubit state matches neither the register nor pair {pair}"
        )));
    };
    let u = embed(pair.decoder(), &targets, n)?;
    let post_global = state.apply_unitary(&u)?;
    let recovered = post_global.partial_trace(&[output])?;
    Ok(Decoded {
        recovered,
        post_global,
    })
}

/// Pure-state convenience wrapper around [`decode`].
pub fn decode_pure(pair: PairId, state: &StateVector) -> Result<Decoded> {
    decode(pair, &state.to_density())
}

/// Reduced state of one system.
pub fn reduced_system(state: &DensityMatrix, system: System) -> Result<DensityMatrix> {
    state.partial_trace(system.qubits())
}

/// Reduced state of a pair of systems, the input form accepted by [`decode`].
pub fn reduced_pair(state: &DensityMatrix, pair: PairId) -> Result<DensityMatrix> {
    state.partial_trace(&pair.qubits())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{haar_random_qubit, SeededRng};

    fn c(re: f64, im: f64) -> ComplexScalar {
        Complex64::new(re, im)
    }

    #[test]
    fn pauli_conventions() {
        let y = PauliIndex::new(2).unwrap().matrix();
        assert_eq!(y[(0, 1)], -I);
        assert_eq!(y[(1, 0)], I);
        assert!(PauliIndex::new(4).is_err());
        for mu in PauliIndex::ALL {
            assert_eq!(mu.alpha().value() * mu.alpha().inverse(), ONE);
        }
        assert_eq!(PauliIndex::ALL[0].alpha().value(), ONE);
    }

    #[test]
    fn partition_covers_register() {
        let mut all: Vec<usize> = System::ALL
            .iter()
            .flat_map(|s| s.qubits().to_vec())
            .collect();
        all.sort_unstable();
        assert_eq!(all, vec![0, 1, 2, 3, 4]);
        for pair in PairId::ALL {
            assert!(pair.qubits().contains(&pair.output_qubit()));
            assert!(!pair.systems().contains(&pair.complement()));
            assert_eq!(pair.name().parse::<PairId>().unwrap(), pair);
        }
        assert!("xx".parse::<PairId>().is_err());
    }

    #[test]
    fn bell_state() {
        let phi = bell_phi();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [h, 0.0, 0.0, h];
        for (k, &e) in expected.iter().enumerate() {
            assert_eq!(phi.amplitude(k), c(e, 0.0));
        }
        assert!((phi.norm() - 1.0).abs() < 1e-15);
        let rho = phi.to_density();
        let half = DensityMatrix::maximally_mixed(1);
        assert!(
            rho.partial_trace(&[0])
                .unwrap()
                .max_abs_diff(&half)
                .unwrap()
                < 1e-15
        );
        assert!(
            rho.partial_trace(&[1])
                .unwrap()
                .max_abs_diff(&half)
                .unwrap()
                < 1e-15
        );
    }

    #[test]
    fn bell_basis() {
        assert_eq!(phi_mu(PauliIndex::ALL[0]), bell_phi());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi_plus = ComplexMatrix::column(vec![ZERO, c(h, 0.0), c(h, 0.0), ZERO]);
        assert!(
            phi_mu(PauliIndex::ALL[1])
                .amplitudes()
                .max_abs_diff(&psi_plus)
                .unwrap()
                < 1e-15
        );
        for a in PauliIndex::ALL {
            for b in PauliIndex::ALL {
                let ip = phi_mu(a).inner(&phi_mu(b)).unwrap();
                let expected = if a == b { ONE } else { ZERO };
                assert!((ip - expected).norm() < 1e-12, "<{a:?}|{b:?}> = {ip}");
            }
        }
    }

    #[test]
    fn encoder_shape_and_entries() {
        let u = build_u_enc();
        assert_eq!((u.rows(), u.cols()), (32, 32));
        assert!(u.is_unitary(1e-10).unwrap());
        // Only the I and Z terms are diagonal: ½(1 + α_3⁻¹) = (1 − i)/2.
        assert!((u[(0, 0)] - c(0.5, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn decoders_are_unitary() {
        let yz = build_u_dec_yz();
        assert_eq!((yz.rows(), yz.cols()), (16, 16));
        assert!(yz.is_unitary(1e-10).unwrap());
        for d in [build_u_dec_xy(), build_u_dec_xz()] {
            assert_eq!((d.rows(), d.cols()), (8, 8));
            assert!(d.is_unitary(1e-10).unwrap());
        }
        assert_eq!(
            build_u_dec_xy().max_abs_diff(&build_u_dec_xz()).unwrap(),
            0.0
        );
    }

    #[test]
    fn xy_decoder_block_structure() {
        // On the |φ_ν⟩ sector of (S1, N1) the decoder acts as α_ν σ_ν on A.
        let d = build_u_dec_xy();
        for nu in PauliIndex::ALL {
            let expected_a = nu.matrix().scale(nu.alpha().value());
            for a in 0..2 {
                let input = StateVector::basis(1, a).tensor(&phi_mu(nu));
                let out = d.matmul(input.amplitudes()).unwrap();
                let want = expected_a
                    .matmul(StateVector::basis(1, a).amplitudes())
                    .unwrap()
                    .tensor(phi_mu(nu).amplitudes());
                assert!(out.max_abs_diff(&want).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn mask_basis_amplitude() {
        let g = mask(&StateVector::basis(1, 0)).unwrap();
        assert_eq!(g.num_qubits(), 5);
        assert!((g.amplitude(0) - c(0.25, -0.25)).norm() < 1e-15);
        assert!(mask(&bell_phi()).is_err());
    }

    #[test]
    fn mask_preserves_norm() {
        let mut rng = SeededRng::new(11);
        for _ in 0..20 {
            let g = mask(&haar_random_qubit(&mut rng)).unwrap();
            assert!((g.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn decode_from_full_and_reduced() {
        let mut rng = SeededRng::new(12);
        for _ in 0..10 {
            let psi = haar_random_qubit(&mut rng);
            let rho = mask(&psi).unwrap().to_density();
            for pair in PairId::ALL {
                let full = decode(pair, &rho).unwrap();
                assert!(full.recovered.fidelity_pure(&psi).unwrap() >= 1.0 - 1e-10);
                let reduced = decode(pair, &reduced_pair(&rho, pair).unwrap()).unwrap();
                assert!(reduced.recovered.fidelity_pure(&psi).unwrap() >= 1.0 - 1e-10);
                assert_eq!(reduced.post_global.num_qubits(), pair.qubits().len());
            }
        }
    }

    #[test]
    fn decode_rejects_wrong_register() {
        let rho = DensityMatrix::maximally_mixed(2);
        assert!(matches!(
            decode(PairId::XY, &rho),
            Err(Error::DimensionMismatch(_))
        ));
        // XY and XZ decode three qubits; YZ needs four.
        let three = DensityMatrix::maximally_mixed(3);
        assert!(decode(PairId::XZ, &three).is_ok());
        assert!(decode(PairId::YZ, &three).is_err());
    }

    #[test]
    fn classical_bits_mask_and_decode() {
        for bit in 0..2 {
            let psi = StateVector::basis(1, bit);
            let out = decode_pure(PairId::YZ, &mask(&psi).unwrap()).unwrap();
            assert!((out.recovered.fidelity_pure(&psi).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn xy_decode_leaves_data_qubit_pure() {
        let psi = haar_random_qubit(&mut SeededRng::new(13));
        let out = decode_pure(PairId::XY, &mask(&psi).unwrap()).unwrap();
        assert!((out.recovered.purity() - 1.0).abs() < 1e-10);
    }
}
