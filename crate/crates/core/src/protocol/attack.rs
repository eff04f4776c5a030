//! Dishonest-participant and outsider scenarios.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::run::{run_protocol, ProtocolTree};
use super::steps::{
    alice_bell_measurement, apply_correction, bob_measurement, prepare_composite, MACHINE_QUBIT,
};
use super::types::{Bits, PauliCorrection, RunConfig, SecretState};
use crate::cloning::{self, CloneMachineSpec, Convention, InputQubit, COPY, ORIGINAL};
use crate::error::{Error, Result};
use crate::kernel::{
    apply_on, enumerate_outcomes, fidelity, gates, BellState, MeasurementBasis, StateVector,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackKind {
    DishonestReceiver,
    DishonestController,
    OutsideEve,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Baseline {
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AttackReport {
    pub kind: AttackKind,
    pub shots: u64,
    pub seed: u64,
    /// Sampled mean recovered fidelity of the attacker's main strategy.
    pub mean_fidelity: Option<f64>,
    /// Exact expectation of the same quantity.
    pub analytic_mean: Option<f64>,
    pub baselines: Vec<Baseline>,
    /// Quantum transfers between Bob and Charlie seen over all runs.
    pub bob_charlie_quantum_events: Option<usize>,
    pub notes: Vec<String>,
}

fn baseline(name: &str, value: f64) -> Baseline {
    Baseline {
        name: name.to_string(),
        value,
    }
}

pub fn attack_scenario(kind: AttackKind, config: &RunConfig, shots: u64) -> Result<AttackReport> {
    if shots == 0 {
        return Err(Error::InvalidConfig(
            "attack needs at least one shot".into(),
        ));
    }
    match kind {
        AttackKind::DishonestReceiver => dishonest_receiver(config, shots),
        AttackKind::DishonestController => dishonest_controller(config, shots),
        AttackKind::OutsideEve => outside_eve(config, shots),
    }
}

/// Mean fidelity of a uniform guess over the four corrections, averaged over
/// the decodable branches weighted by their probability.
fn blind_guess_mean(tree: &ProtocolTree, target: &StateVector) -> Result<Option<f64>> {
    let mut num = 0.0;
    let mut den = 0.0;
    for node in &tree.alice {
        for leaf in node.charlie.iter().filter(|l| l.bell == BellState::PsiPlus) {
            let Some(m) = &leaf.machine else { continue };
            let w = node.probability * node.bob_zero * leaf.weight;
            let mut avg = 0.0;
            for c in PauliCorrection::ALL {
                avg += fidelity(target, &apply_correction(m, c)?)? / 4.0;
            }
            num += w * avg;
            den += w;
        }
    }
    Ok((den > 0.0).then(|| num / den))
}

/// Charlie decodes without Alice's bits by guessing a correction uniformly.
fn dishonest_receiver(config: &RunConfig, shots: u64) -> Result<AttackReport> {
    let tree = ProtocolTree::build(&config.secret, &config.wparams, config.convention)?;
    let target = config.secret.state(MACHINE_QUBIT);
    let analytic_mean = blind_guess_mean(&tree, &target)?;

    // Decodable leaves with their success weights.
    let leaves: Vec<(f64, &StateVector)> = tree
        .alice
        .iter()
        .flat_map(|n| {
            n.charlie
                .iter()
                .filter(|l| l.bell == BellState::PsiPlus)
                .filter_map(move |l| {
                    l.machine
                        .as_ref()
                        .map(|m| (n.probability * n.bob_zero * l.weight, m))
                })
        })
        .filter(|(w, _)| *w > 0.0)
        .collect();
    let mut notes =
        vec!["the receiver applies one of the four corrections uniformly at random".to_string()];
    let mean_fidelity = if leaves.is_empty() {
        notes.push("no decodable branch exists for these parameters".to_string());
        None
    } else {
        let total: f64 = leaves.iter().map(|(w, _)| w).sum();
        let sum = (0..shots)
            .into_par_iter()
            .map(|i| -> Result<f64> {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ i);
                let u = rng.gen::<f64>() * total;
                let mut acc = 0.0;
                let mut chosen = leaves[leaves.len() - 1].1;
                for (w, m) in &leaves {
                    acc += w;
                    if u < acc {
                        chosen = m;
                        break;
                    }
                }
                let guess = PauliCorrection::ALL[rng.gen_range(0..4)];
                fidelity(&target, &apply_correction(chosen, guess)?)
            })
            .collect::<Result<Vec<f64>>>()?
            .iter()
            .sum::<f64>();
        Some(sum / shots as f64)
    };
    Ok(AttackReport {
        kind: AttackKind::DishonestReceiver,
        shots,
        seed: config.seed,
        mean_fidelity,
        analytic_mean,
        baselines: vec![
            baseline("honest_decoding", 1.0),
            baseline("blind_guess", 0.5),
        ],
        bob_charlie_quantum_events: None,
        notes,
    })
}

/// What the controller can do with Charlie's qubit: a default cloner
/// (`p = q = 0`) and no knowledge of the shared-state parameters. A φ−
/// outcome on the clone modes is undone with σ_z; `bits` selects the
/// decoding-table correction when Alice's bits are used, identity otherwise.
pub fn controller_decode<R: Rng + ?Sized>(
    c_state: &StateVector,
    bits: Option<Bits>,
    rng: &mut R,
) -> Result<StateVector> {
    let input = InputQubit::from_state(c_state)?;
    let out = cloning::clone(
        &input,
        &CloneMachineSpec::wootters_zurek(Convention::PhysicalIsometry),
    );
    let records = enumerate_outcomes(&out.state, &MeasurementBasis::bell(), &[ORIGINAL, COPY])?;
    let rec = crate::kernel::sample_record(records, rng);
    let mut machine = rec
        .collapsed
        .expect("sampled outcome has non-zero probability")
        .relabel([MACHINE_QUBIT])?;
    if rec.outcome == BellState::PhiMinus.index() {
        machine = apply_on(&machine, &gates::pauli_z(), &[MACHINE_QUBIT])?;
    }
    match bits {
        Some(b) => apply_correction(&machine, PauliCorrection::for_bits(b)),
        None => Ok(machine),
    }
}

/// Exact mean fidelity of [`controller_decode`], conditioned on Bob reading 0.
fn controller_exact(
    secret: &SecretState,
    config: &RunConfig,
    use_bits: bool,
) -> Result<Option<f64>> {
    let target = secret.state(MACHINE_QUBIT);
    let mut num = 0.0;
    let mut den = 0.0;
    for o in alice_bell_measurement(&prepare_composite(secret, &config.wparams))? {
        let Some(bc) = &o.bc_state else { continue };
        let bob = bob_measurement(bc)?;
        let Some(c_state) = &bob[0].c_state else {
            continue;
        };
        let w = o.probability * bob[0].probability;
        let input = InputQubit::from_state(c_state)?;
        let out = cloning::clone(
            &input,
            &CloneMachineSpec::wootters_zurek(Convention::PhysicalIsometry),
        );
        for rec in enumerate_outcomes(&out.state, &MeasurementBasis::bell(), &[ORIGINAL, COPY])? {
            let Some(m) = rec.collapsed else { continue };
            let mut m = m.relabel([MACHINE_QUBIT])?;
            if rec.outcome == BellState::PhiMinus.index() {
                m = apply_on(&m, &gates::pauli_z(), &[MACHINE_QUBIT])?;
            }
            if use_bits {
                m = apply_correction(&m, PauliCorrection::for_bits(o.bits))?;
            }
            num += w * rec.probability * fidelity(&target, &m)?;
        }
        den += w;
    }
    Ok((den > 0.0).then(|| num / den))
}

fn dishonest_controller(config: &RunConfig, shots: u64) -> Result<AttackReport> {
    let secret = &config.secret;
    let target = secret.state(MACHINE_QUBIT);
    // Alice outcome → (weight, Charlie's qubit after Bob reads 0, bits)
    let mut paths = Vec::new();
    for o in alice_bell_measurement(&prepare_composite(secret, &config.wparams))? {
        let Some(bc) = &o.bc_state else { continue };
        let bob = bob_measurement(bc)?;
        if let Some(c_state) = bob[0].c_state.clone() {
            paths.push((o.probability * bob[0].probability, c_state, o.bits));
        }
    }
    let total: f64 = paths.iter().map(|p| p.0).sum();
    let sample = |use_bits: bool| -> Result<Option<f64>> {
        if paths.is_empty() {
            return Ok(None);
        }
        let fids = (0..shots)
            .into_par_iter()
            .map(|i| -> Result<f64> {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ i);
                let u = rng.gen::<f64>() * total;
                let mut acc = 0.0;
                let mut chosen = &paths[paths.len() - 1];
                for p in &paths {
                    acc += p.0;
                    if u < acc {
                        chosen = p;
                        break;
                    }
                }
                let bits = use_bits.then_some(chosen.2);
                fidelity(&target, &controller_decode(&chosen.1, bits, &mut rng)?)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(Some(fids.iter().sum::<f64>() / shots as f64))
    };
    let withheld = sample(false)?;
    let with_bits = sample(true)?;
    let exact_withheld = controller_exact(secret, config, false)?;
    let exact_with_bits = controller_exact(secret, config, true)?;
    let mut baselines = vec![baseline("honest_decoding", 1.0)];
    if let Some(v) = with_bits {
        baselines.push(baseline("default_cloner_with_bits", v));
    }
    if let Some(v) = exact_with_bits {
        baselines.push(baseline("default_cloner_with_bits_exact", v));
    }
    Ok(AttackReport {
        kind: AttackKind::DishonestController,
        shots,
        seed: config.seed,
        mean_fidelity: withheld,
        analytic_mean: exact_withheld,
        baselines,
        bob_charlie_quantum_events: None,
        notes: vec![
            "the controller decodes with a p = q = 0 cloner and no shared-state parameters".into(),
            "main strategy: Alice's bits withheld, identity correction".into(),
        ],
    })
}

fn outside_eve(config: &RunConfig, shots: u64) -> Result<AttackReport> {
    let runs = shots.min(1000);
    let mut count = 0;
    let mut transfers = std::collections::BTreeSet::new();
    for i in 0..runs {
        let t = run_protocol(&RunConfig {
            seed: config.seed ^ i,
            ..*config
        })?;
        for e in t.events.iter().filter(|e| e.is_quantum_transfer()) {
            transfers.insert(e.party.clone());
            let p = e.party.as_str();
            if p.contains("bob") && p.contains("charlie") {
                count += 1;
            }
        }
    }
    let mut notes = vec![format!(
        "quantum transfers observed: {}",
        transfers.into_iter().collect::<Vec<_>>().join(", ")
    )];
    if count == 0 {
        notes.push("no qubit carrying the message travels between Bob and Charlie".into());
    }
    Ok(AttackReport {
        kind: AttackKind::OutsideEve,
        shots: runs,
        seed: config.seed,
        mean_fidelity: None,
        analytic_mean: None,
        baselines: Vec::new(),
        bob_charlie_quantum_events: Some(count),
        notes,
    })
}
