//! Simulation and numerical certification of three-partite quantum
//! information masking.
//!
//! A single data qubit is encoded into the correlations of three systems
//! `X = {A}`, `Y = {S1, N1}` and `Z = {S2, N2}`. The crate builds the encoder
//! and the three pair decoders, and checks numerically that
//!
//! * no single system carries the data ([`scenarios::verify_masking`]);
//! * any two systems recover it ([`scenarios::verify_recovery`]);
//! * once one pair decodes, nothing is left for the others
//!   ([`scenarios::verify_exclusivity`]);
//! * measuring `X` and discarding the outcome hands the data to `Y, Z`
//!   ([`scenarios::verify_dispatch`]);
//! * no local action on `X` changes what `Y, Z` hold
//!   ([`scenarios::verify_no_signaling`]).
//!
//! Teleportation is simulated alongside for contrast
//! ([`scenarios::teleportation_demo`]).

pub mod cli;
pub mod error;
pub mod io;
pub mod linalg;
pub mod masking;
pub mod random;
pub mod report;
pub mod scenarios;
pub mod state;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexScalar};
pub use masking::{
    bell_phi, build_u_dec_xy, build_u_dec_xz, build_u_dec_yz, build_u_enc, decode, decode_pure,
    mask, phi_mu, Decoded, PairId, PauliIndex, System,
};
pub use random::{haar_random_qubit, SeededRng};
pub use report::VerificationReport;
pub use scenarios::{run_all, SuiteConfig};
pub use state::{embed, DensityMatrix, MeasurementBasis, StateVector};
