//! Seeded, reproducible sampling of states, bases and single-qubit unitaries.
//!
//! All randomness flows through [`SeededRng`], a ChaCha8 stream. ChaCha output
//! is fixed by its seed across platforms and crate releases, so any report
//! can be regenerated from the seed it records.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, ComplexScalar, I};
use crate::state::{MeasurementBasis, StateVector};

#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Stream for `name` under `master`; see [`derive_seed`].
    pub fn derived(master: u64, name: &str) -> Self {
        Self::new(derive_seed(master, name))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Stable sub-seed from a master seed and a scenario name (FNV-1a over the
/// name, mixed with the master through splitmix64).
pub fn derive_seed(master: u64, name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(master ^ h)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Complex number with independent standard normal real and imaginary parts.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> ComplexScalar {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Haar-random qubit: a normalized pair of complex Gaussians.
pub fn haar_random_qubit<R: Rng + ?Sized>(rng: &mut R) -> StateVector {
    loop {
        let a = complex_gaussian(rng);
        let b = complex_gaussian(rng);
        if let Ok(s) = StateVector::normalized(vec![a, b]) {
            return s;
        }
    }
}

/// Basis whose `|b0⟩` is uniform on the Bloch sphere.
pub fn random_basis<R: Rng + ?Sized>(rng: &mut R) -> MeasurementBasis {
    let u: f64 = rng.random();
    let v: f64 = rng.random();
    MeasurementBasis::new((1.0 - 2.0 * u).acos(), 2.0 * PI * v)
}

/// Single-qubit unitary `e^{iγ} (cos(t/2) I − i sin(t/2) n·σ)` with the axis
/// `n` drawn by Bloch angles and the angles `t`, `γ` uniform.
pub fn random_qubit_unitary<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix {
    let axis = random_basis(rng);
    let t: f64 = 2.0 * PI * rng.random::<f64>();
    let gamma: f64 = 2.0 * PI * rng.random::<f64>();

    let (st, ct) = axis.theta.sin_cos();
    let (sp, cp) = axis.phi.sin_cos();
    let (nx, ny, nz) = (st * cp, st * sp, ct);
    let n_sigma = ComplexMatrix::from_rows(&[
        &[Complex64::new(nz, 0.0), Complex64::new(nx, -ny)],
        &[Complex64::new(nx, ny), Complex64::new(-nz, 0.0)],
    ]);
    let (s, c) = (t / 2.0).sin_cos();
    let rotation =
        &ComplexMatrix::identity(2).scale(Complex64::new(c, 0.0)) - &n_sigma.scale(I * s);
    rotation.scale(Complex64::from_polar(1.0, gamma))
}
