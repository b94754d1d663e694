//! Executable checks of the scheme's properties, plus the teleportation
//! contrast.
//!
//! Every verifier is a pure function of `(trials, tol, seed)`. Comparisons
//! that test independence from the data state use the `|0⟩` trial as their
//! baseline, so trial 0 of those scenarios is always `|0⟩` and the remaining
//! trials are Haar draws.

use std::thread;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::masking::{
    decode, mask, phi_mu, reduced_pair, reduced_system, PairId, PauliIndex, System, QUBIT_A,
};
use crate::random::{
    derive_seed, haar_random_qubit, random_basis, random_qubit_unitary, SeededRng,
};
use crate::report::{TrialRecord, VerificationReport};
use crate::state::{clamp_fidelity, embed, DensityMatrix, MeasurementBasis, StateVector};

pub const MASKING: &str = "masking";
pub const EXCLUSIVITY: &str = "exclusivity";
pub const DISPATCH: &str = "dispatch";
pub const NO_SIGNALING: &str = "nosignal";
pub const TELEPORTATION: &str = "teleportation";

pub fn recovery_name(pair: PairId) -> String {
    format!("recovery-{pair}")
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Precondition(msg.to_owned()))
    }
}

/// `|0⟩` followed by `trials - 1` Haar-random qubits.
fn anchored_states(trials: usize, rng: &mut SeededRng) -> Vec<StateVector> {
    std::iter::once(StateVector::basis(1, 0))
        .chain((1..trials).map(|_| haar_random_qubit(rng)))
        .collect()
}

fn haar_states(trials: usize, rng: &mut SeededRng) -> Vec<StateVector> {
    (0..trials).map(|_| haar_random_qubit(rng)).collect()
}

fn fidelity_deviation(rho: &DensityMatrix, psi: &StateVector) -> Result<(f64, f64)> {
    let f = rho.fidelity_pure(psi)?;
    Ok(((1.0 - f).abs(), clamp_fidelity(f)))
}

/// Single-system reduced states must not depend on the masked state.
pub fn verify_masking(trials: usize, tol: f64, seed: u64) -> Result<VerificationReport> {
    require(trials >= 2, "masking needs at least 2 trials")?;
    let states = anchored_states(trials, &mut SeededRng::new(seed));
    verify_masking_states(&states, tol, seed)
}

/// [`verify_masking`] over explicit input states; the first is the baseline.
pub fn verify_masking_states(
    states: &[StateVector],
    tol: f64,
    seed: u64,
) -> Result<VerificationReport> {
    require(states.len() >= 2, "masking needs at least 2 states")?;
    let reduce = |psi: &StateVector| -> Result<Vec<DensityMatrix>> {
        let rho = mask(psi)?.to_density();
        System::ALL
            .iter()
            .map(|&s| reduced_system(&rho, s))
            .collect()
    };
    let baseline = reduce(&states[0])?;
    let mut details = Vec::with_capacity(states.len());
    for (k, psi) in states.iter().enumerate() {
        let reduced = reduce(psi)?;
        let mut record = TrialRecord::new(k, 0.0);
        for ((system, r), b) in System::ALL.iter().zip(&reduced).zip(&baseline) {
            let d = r.max_abs_diff(b)?;
            record.deviation = record.deviation.max(d);
            record = record.with(&format!("deviation_{system}"), d);
        }
        details.push(record);
    }
    Ok(VerificationReport::from_trials(MASKING, seed, tol, details))
}

/// Pair decode fidelity, from the full register and from the reduced
/// two-system state.
pub fn verify_recovery(
    pair: PairId,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<VerificationReport> {
    require(trials >= 1, "recovery needs at least 1 trial")?;
    let states = haar_states(trials, &mut SeededRng::new(seed));
    verify_recovery_states(pair, &states, tol, seed)
}

pub fn verify_recovery_states(
    pair: PairId,
    states: &[StateVector],
    tol: f64,
    seed: u64,
) -> Result<VerificationReport> {
    require(!states.is_empty(), "recovery needs at least 1 state")?;
    let mut details = Vec::with_capacity(states.len());
    for (k, psi) in states.iter().enumerate() {
        let rho = mask(psi)?.to_density();
        let (dev_full, f_full) = fidelity_deviation(&decode(pair, &rho)?.recovered, psi)?;
        let reduced = reduced_pair(&rho, pair)?;
        let (dev_red, f_red) = fidelity_deviation(&decode(pair, &reduced)?.recovered, psi)?;
        details.push(
            TrialRecord::new(k, dev_full.max(dev_red))
                .with("fidelity_full", f_full)
                .with("fidelity_reduced", f_red),
        );
    }
    Ok(VerificationReport::from_trials(
        &recovery_name(pair),
        seed,
        tol,
        details,
    ))
}

/// After an `XY` decode, a `YZ` decode must yield a state that carries
/// nothing about the input. The YZ fidelity to the input is recorded per
/// trial as `yz_fidelity` and never asserted.
pub fn verify_exclusivity(trials: usize, tol: f64, seed: u64) -> Result<VerificationReport> {
    require(
        trials >= 2,
        "exclusivity needs at least 2 trials to compare",
    )?;
    let states = anchored_states(trials, &mut SeededRng::new(seed));
    verify_exclusivity_states(&states, tol, seed)
}

pub fn verify_exclusivity_states(
    states: &[StateVector],
    tol: f64,
    seed: u64,
) -> Result<VerificationReport> {
    require(states.len() >= 2, "exclusivity needs at least 2 states")?;
    let second_decode = |psi: &StateVector| -> Result<(DensityMatrix, f64)> {
        let after_xy = decode(PairId::XY, &mask(psi)?.to_density())?;
        let yz = decode(PairId::YZ, &after_xy.post_global)?.recovered;
        let f = yz.fidelity_pure(psi)?;
        Ok((yz, clamp_fidelity(f)))
    };
    let (baseline, _) = second_decode(&states[0])?;
    let mut details = Vec::with_capacity(states.len());
    for (k, psi) in states.iter().enumerate() {
        let (yz, f) = second_decode(psi)?;
        details.push(TrialRecord::new(k, yz.max_abs_diff(&baseline)?).with("yz_fidelity", f));
    }
    Ok(VerificationReport::from_trials(
        EXCLUSIVITY,
        seed,
        tol,
        details,
    ))
}

/// Measurement basis used on `A` for each dispatch trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DispatchBasis {
    Fixed(MeasurementBasis),
    /// A fresh Bloch-uniform basis every trial.
    Random,
}

/// Measure `A` and discard the outcome, then decode from `Y, Z` alone.
///
/// The `XY` decode after the measurement is recorded per trial as
/// `xy_fidelity_after_dispatch` for inspection; nothing is asserted about it.
pub fn verify_dispatch(
    basis: DispatchBasis,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<VerificationReport> {
    require(trials >= 1, "dispatch needs at least 1 trial")?;
    let mut rng = SeededRng::new(seed);
    let mut details = Vec::with_capacity(trials);
    for k in 0..trials {
        let psi = haar_random_qubit(&mut rng);
        let b = match basis {
            DispatchBasis::Fixed(b) => b,
            DispatchBasis::Random => random_basis(&mut rng),
        };
        let measured = mask(&psi)?.to_density().measure_discard(QUBIT_A, &b)?;
        let yz = decode(PairId::YZ, &reduced_pair(&measured, PairId::YZ)?)?;
        let (dev, f) = fidelity_deviation(&yz.recovered, &psi)?;
        let xy = decode(PairId::XY, &measured)?;
        let f_xy = clamp_fidelity(xy.recovered.fidelity_pure(&psi)?);
        details.push(
            TrialRecord::new(k, dev)
                .with("fidelity", f)
                .with("xy_fidelity_after_dispatch", f_xy)
                .with("theta", b.theta)
                .with("phi", b.phi),
        );
    }
    Ok(VerificationReport::from_trials(
        DISPATCH, seed, tol, details,
    ))
}

/// Local actions applied to system `X` in the no-signaling battery, on top
/// of the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ActionBattery {
    pub measurements: usize,
    pub unitaries: usize,
}

impl Default for ActionBattery {
    fn default() -> Self {
        Self {
            measurements: 2,
            unitaries: 2,
        }
    }
}

impl ActionBattery {
    pub fn actions(&self) -> usize {
        1 + self.measurements + self.unitaries
    }

    pub fn comparisons(&self) -> usize {
        let n = self.actions();
        n * (n - 1) / 2
    }
}

/// `ρ_YZ` must be identical under every local action on `X`.
pub fn verify_no_signaling(trials: usize, tol: f64, seed: u64) -> Result<VerificationReport> {
    verify_no_signaling_with(ActionBattery::default(), trials, tol, seed)
}

pub fn verify_no_signaling_with(
    battery: ActionBattery,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<VerificationReport> {
    require(trials >= 1, "no-signaling needs at least 1 trial")?;
    require(
        battery.actions() >= 2,
        "no-signaling needs at least 2 local actions",
    )?;
    let mut rng = SeededRng::new(seed);
    let mut details = Vec::with_capacity(trials);
    for k in 0..trials {
        let psi = haar_random_qubit(&mut rng);
        let rho = mask(&psi)?.to_density();
        let mut remote = vec![reduced_pair(&rho, PairId::YZ)?];
        for _ in 0..battery.measurements {
            let b = random_basis(&mut rng);
            remote.push(reduced_pair(
                &rho.measure_discard(QUBIT_A, &b)?,
                PairId::YZ,
            )?);
        }
        for _ in 0..battery.unitaries {
            let u = embed(
                &random_qubit_unitary(&mut rng),
                &[QUBIT_A],
                rho.num_qubits(),
            )?;
            remote.push(reduced_pair(&rho.apply_unitary(&u)?, PairId::YZ)?);
        }
        let mut worst: f64 = 0.0;
        let mut comparisons = 0usize;
        for i in 0..remote.len() {
            for j in i + 1..remote.len() {
                worst = worst.max(remote[i].max_abs_diff(&remote[j])?);
                comparisons += 1;
            }
        }
        details.push(TrialRecord::new(k, worst).with("comparisons", comparisons as f64));
    }
    Ok(VerificationReport::from_trials(
        NO_SIGNALING,
        seed,
        tol,
        details,
    ))
}

/// Bell-measurement outcomes on (A, S), in the order of their corrections
/// `I, σx, σz, σzσx`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BellOutcome {
    PhiPlus,
    PsiPlus,
    PhiMinus,
    PsiMinus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PhiPlus,
        BellOutcome::PsiPlus,
        BellOutcome::PhiMinus,
        BellOutcome::PsiMinus,
    ];

    /// Outcome state, as `(σ_μ ⊗ I)|φ⟩`. `σ_y` gives `i|Ψ−⟩`; the phase
    /// drops out of the projector.
    pub fn state(self) -> StateVector {
        let mu = match self {
            BellOutcome::PhiPlus => 0,
            BellOutcome::PsiPlus => 1,
            BellOutcome::PsiMinus => 2,
            BellOutcome::PhiMinus => 3,
        };
        phi_mu(PauliIndex::ALL[mu])
    }

    /// Bob's correction for this outcome.
    pub fn correction(self) -> ComplexMatrix {
        let x = PauliIndex::ALL[1].matrix();
        let z = PauliIndex::ALL[3].matrix();
        match self {
            BellOutcome::PhiPlus => ComplexMatrix::identity(2),
            BellOutcome::PsiPlus => x,
            BellOutcome::PhiMinus => z,
            BellOutcome::PsiMinus => &z * &x,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BellOutcome::PhiPlus => "phi+",
            BellOutcome::PsiPlus => "psi+",
            BellOutcome::PhiMinus => "phi-",
            BellOutcome::PsiMinus => "psi-",
        }
    }
}

#[derive(Clone, Debug)]
pub struct TeleportationRecord {
    /// Bob's state averaged over all four outcomes, before any correction.
    pub pre_correction_bob: DensityMatrix,
    pub outcome_probabilities: [f64; 4],
    /// Fidelity to the input after the matching correction, per outcome.
    pub per_outcome_fidelity: [f64; 4],
    pub average_post_fidelity: f64,
    /// One Born-rule sample of the outcome, drawn from the seed.
    pub sampled_outcome: BellOutcome,
    /// Bob's corrected state in the sampled branch.
    pub sampled_bob: DensityMatrix,
}

const TELE_A: usize = 0;
const TELE_S: usize = 1;
const TELE_N: usize = 2;

/// Standard teleportation of `psi` over `(|00⟩ + |11⟩)/√2` shared by `S`
/// (sender) and `N` (receiver).
pub fn teleportation_demo(psi: &StateVector, seed: u64) -> Result<TeleportationRecord> {
    use rand::Rng;

    if psi.num_qubits() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "teleportation takes one qubit, got {}",
            psi.num_qubits()
        )));
    }
    let rho = psi.tensor(&crate::masking::bell_phi()).to_density();
    let mut pre = ComplexMatrix::zeros(2, 2);
    let mut probabilities = [0.0; 4];
    let mut fidelities = [0.0; 4];
    let mut corrected_states = Vec::with_capacity(4);
    for (k, outcome) in BellOutcome::ALL.iter().enumerate() {
        let projector = embed(outcome.state().to_density().matrix(), &[TELE_A, TELE_S], 3)?;
        let branch = rho.project(&projector);
        let bob = branch.partial_trace(&[TELE_N])?;
        pre = &pre + bob.matrix();
        probabilities[k] = bob.trace().re;
        let corrected = bob.renormalized()?.apply_unitary(&outcome.correction())?;
        fidelities[k] = corrected.fidelity_pure(psi)?;
        corrected_states.push(corrected);
    }
    let average = probabilities
        .iter()
        .zip(&fidelities)
        .map(|(p, f)| p * f)
        .sum();

    let draw: f64 = SeededRng::new(seed).random();
    let mut acc = 0.0;
    let mut sampled = BellOutcome::ALL.len() - 1;
    for (k, p) in probabilities.iter().enumerate() {
        acc += p;
        if draw < acc {
            sampled = k;
            break;
        }
    }

    Ok(TeleportationRecord {
        pre_correction_bob: DensityMatrix::from_matrix_unchecked(pre),
        outcome_probabilities: probabilities,
        per_outcome_fidelity: fidelities,
        average_post_fidelity: average,
        sampled_outcome: BellOutcome::ALL[sampled],
        sampled_bob: corrected_states.swap_remove(sampled),
    })
}

/// Report form of [`teleportation_demo`]: the uncorrected receiver state
/// must be `I/2` and every corrected branch must have fidelity 1.
pub fn verify_teleportation(trials: usize, tol: f64, seed: u64) -> Result<VerificationReport> {
    require(trials >= 1, "teleportation needs at least 1 trial")?;
    let mut rng = SeededRng::new(seed);
    let mixed = DensityMatrix::maximally_mixed(1);
    let mut details = Vec::with_capacity(trials);
    for k in 0..trials {
        let psi = haar_random_qubit(&mut rng);
        let rec = teleportation_demo(&psi, derive_seed(seed, &format!("trial-{k}")))?;
        let pre_dev = rec.pre_correction_bob.max_abs_diff(&mixed)?;
        let fid_dev = rec
            .per_outcome_fidelity
            .iter()
            .map(|f| (1.0 - f).abs())
            .fold(0.0, f64::max);
        details.push(
            TrialRecord::new(k, pre_dev.max(fid_dev))
                .with("pre_correction_deviation", pre_dev)
                .with(
                    "uncorrected_fidelity",
                    rec.pre_correction_bob.fidelity_pure(&psi)?,
                ),
        );
    }
    Ok(VerificationReport::from_trials(
        TELEPORTATION,
        seed,
        tol,
        details,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuiteConfig {
    pub trials: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            trials: 100,
            tol: 1e-10,
            seed: 42,
        }
    }
}

/// A scenario selectable on its own.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    Masking,
    Recovery(PairId),
    Exclusivity,
    Dispatch,
    NoSignaling,
    Teleportation,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::Masking,
        Scenario::Recovery(PairId::XY),
        Scenario::Recovery(PairId::XZ),
        Scenario::Recovery(PairId::YZ),
        Scenario::Exclusivity,
        Scenario::Dispatch,
        Scenario::NoSignaling,
        Scenario::Teleportation,
    ];

    pub fn name(self) -> String {
        match self {
            Scenario::Masking => MASKING.into(),
            Scenario::Recovery(p) => recovery_name(p),
            Scenario::Exclusivity => EXCLUSIVITY.into(),
            Scenario::Dispatch => DISPATCH.into(),
            Scenario::NoSignaling => NO_SIGNALING.into(),
            Scenario::Teleportation => TELEPORTATION.into(),
        }
    }

    pub fn min_trials(self) -> usize {
        match self {
            Scenario::Masking | Scenario::Exclusivity => 2,
            _ => 1,
        }
    }

    /// Sub-seed under a master seed. The three recovery scenarios share one
    /// stream so they run on the same input states.
    pub fn seed(self, master: u64) -> u64 {
        match self {
            Scenario::Recovery(_) => derive_seed(master, "recovery"),
            other => derive_seed(master, &other.name()),
        }
    }

    pub fn run(self, trials: usize, tol: f64, seed: u64) -> Result<VerificationReport> {
        match self {
            Scenario::Masking => verify_masking(trials, tol, seed),
            Scenario::Recovery(p) => verify_recovery(p, trials, tol, seed),
            Scenario::Exclusivity => verify_exclusivity(trials, tol, seed),
            Scenario::Dispatch => verify_dispatch(DispatchBasis::Random, trials, tol, seed),
            Scenario::NoSignaling => verify_no_signaling(trials, tol, seed),
            Scenario::Teleportation => verify_teleportation(trials, tol, seed),
        }
    }

    /// Runs under a master seed; errors become failed reports.
    pub fn run_config(self, config: &SuiteConfig) -> VerificationReport {
        let seed = self.seed(config.seed);
        self.run(config.trials, config.tol, seed)
            .unwrap_or_else(|e| {
                VerificationReport::failed(
                    &self.name(),
                    config.trials,
                    seed,
                    config.tol,
                    e.to_string(),
                )
            })
    }
}

/// Runs the listed scenarios concurrently, each on its own derived stream,
/// and returns their reports in the listed order.
pub fn run_scenarios(scenarios: &[Scenario], config: &SuiteConfig) -> Vec<VerificationReport> {
    thread::scope(|scope| {
        let handles: Vec<_> = scenarios
            .iter()
            .map(|&s| (s, scope.spawn(move || s.run_config(config))))
            .collect();
        handles
            .into_iter()
            .map(|(s, h)| {
                h.join().unwrap_or_else(|_| {
                    VerificationReport::failed(
                        &s.name(),
                        config.trials,
                        s.seed(config.seed),
                        config.tol,
                        "scenario panicked".into(),
                    )
                })
            })
            .collect()
    })
}

pub fn run_all(config: &SuiteConfig) -> Vec<VerificationReport> {
    run_scenarios(&Scenario::ALL, config)
}
