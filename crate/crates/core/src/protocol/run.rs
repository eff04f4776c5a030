use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::steps::{
    alice_bell_measurement, bob_measurement, charlie_clone_and_bell, charlie_cloner,
    charlie_correction, prepare_composite, MACHINE_QUBIT,
};
use super::types::{Bits, PauliCorrection, RunConfig, SecretState, WStateParams};
use crate::cloning::Convention;
use crate::error::Result;
use crate::kernel::{fidelity, BasisKind, BellState, StateVector};

/// Terminal state of the Charlie step for one (Alice, Bob = 0) path.
#[derive(Clone, Debug, PartialEq)]
pub struct CharlieLeaf {
    pub bell: BellState,
    /// Physical branch probability, or the raw weight under the paper-literal
    /// convention.
    pub weight: f64,
    /// Machine qubit before correction.
    pub machine: Option<StateVector>,
    pub corrected: Option<StateVector>,
    pub fidelity: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AliceNode {
    pub bell: BellState,
    pub bits: Bits,
    pub probability: f64,
    /// `P(Bob = 0 | Alice outcome)`.
    pub bob_zero: f64,
    /// Charlie's qubit after Bob reads 0.
    pub c_state: Option<StateVector>,
    pub charlie: Vec<CharlieLeaf>,
}

/// Every outcome of one protocol attempt, computed once per configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolTree {
    pub secret: SecretState,
    pub wparams: WStateParams,
    pub convention: Convention,
    pub alice: Vec<AliceNode>,
}

impl ProtocolTree {
    pub fn build(secret: &SecretState, w: &WStateParams, convention: Convention) -> Result<Self> {
        let spec = charlie_cloner(w, convention);
        let target = secret.state(MACHINE_QUBIT);
        let mut alice = Vec::with_capacity(4);
        for o in alice_bell_measurement(&prepare_composite(secret, w))? {
            let mut node = AliceNode {
                bell: o.bell,
                bits: o.bits,
                probability: o.probability,
                bob_zero: 0.0,
                c_state: None,
                charlie: Vec::new(),
            };
            if let Some(bc) = &o.bc_state {
                let bob = bob_measurement(bc)?;
                node.bob_zero = bob[0].probability;
                if let Some(c_state) = &bob[0].c_state {
                    for ch in charlie_clone_and_bell(c_state, &spec)? {
                        let corrected = match (&ch.machine_state, ch.decodable()) {
                            (Some(m), true) => Some(charlie_correction(m, o.bits)?),
                            _ => None,
                        };
                        let fid = corrected
                            .as_ref()
                            .map(|s| fidelity(&target, s))
                            .transpose()?;
                        node.charlie.push(CharlieLeaf {
                            bell: ch.bell,
                            weight: ch.probability,
                            machine: ch.machine_state.clone(),
                            corrected,
                            fidelity: fid,
                        });
                    }
                    node.c_state = Some(c_state.clone());
                }
            }
            alice.push(node);
        }
        Ok(Self {
            secret: *secret,
            wparams: *w,
            convention,
            alice,
        })
    }

    /// Success probability summed over the tree.
    pub fn success_probability(&self) -> f64 {
        self.alice
            .iter()
            .map(|n| {
                let psi = n
                    .charlie
                    .iter()
                    .find(|l| l.bell == BellState::PsiPlus)
                    .map_or(0.0, |l| l.weight);
                n.probability * n.bob_zero * psi
            })
            .sum()
    }

    /// Probability that Charlie's step reports ψ+; clipped to 1 under the
    /// paper-literal convention.
    fn psi_plus_chance(&self, node: &AliceNode) -> f64 {
        node.charlie
            .iter()
            .find(|l| l.bell == BellState::PsiPlus)
            .map_or(0.0, |l| l.weight.min(1.0))
    }

    /// Samples one attempt.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Attempt {
        let a = pick(rng, self.alice.iter().map(|n| n.probability));
        let node = &self.alice[a];
        let bob_bit = if rng.gen::<f64>() < node.bob_zero {
            0
        } else {
            1
        };
        if bob_bit == 1 || node.charlie.is_empty() {
            return Attempt {
                alice: a,
                bob_bit: 1,
                charlie: None,
            };
        }
        let charlie = match self.convention {
            Convention::PhysicalIsometry => pick(rng, node.charlie.iter().map(|l| l.weight)),
            Convention::PaperLiteral => {
                if rng.gen::<f64>() < self.psi_plus_chance(node) {
                    BellState::PsiPlus.index()
                } else {
                    let others = node.charlie.iter().map(|l| {
                        if l.bell == BellState::PsiPlus {
                            0.0
                        } else {
                            l.weight
                        }
                    });
                    pick(rng, others)
                }
            }
        };
        Attempt {
            alice: a,
            bob_bit,
            charlie: Some(charlie),
        }
    }
}

/// Indices into a [`ProtocolTree`] for one sampled attempt.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Attempt {
    pub alice: usize,
    pub bob_bit: u8,
    pub charlie: Option<usize>,
}

impl Attempt {
    pub fn succeeded(&self, tree: &ProtocolTree) -> bool {
        self.charlie
            .map(|c| tree.alice[self.alice].charlie[c].bell == BellState::PsiPlus)
            .unwrap_or(false)
    }
}

fn pick<R: Rng + ?Sized>(rng: &mut R, weights: impl Iterator<Item = f64> + Clone) -> usize {
    let total: f64 = weights.clone().sum();
    let u = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, w) in weights.enumerate() {
        if w <= 0.0 {
            continue;
        }
        last = i;
        acc += w;
        if u < acc {
            return i;
        }
    }
    last
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    Prepare,
    Distribute,
    AliceBell,
    ClassicalMessage,
    BobMeasure,
    Clone,
    CharlieBell,
    Correct,
    Abort,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Event {
    pub attempt: u32,
    pub step: Step,
    pub party: String,
    pub basis: Option<BasisKind>,
    pub outcome: Option<String>,
    pub bits: Option<Bits>,
    pub probability: Option<f64>,
}

impl Event {
    fn new(attempt: u32, step: Step, party: &str) -> Self {
        Self {
            attempt,
            step,
            party: party.to_string(),
            basis: None,
            outcome: None,
            bits: None,
            probability: None,
        }
    }

    fn basis(mut self, basis: BasisKind) -> Self {
        self.basis = Some(basis);
        self
    }

    fn outcome(mut self, outcome: impl Into<String>) -> Self {
        self.outcome = Some(outcome.into());
        self
    }

    fn bits(mut self, bits: Bits) -> Self {
        self.bits = Some(bits);
        self
    }

    fn probability(mut self, p: f64) -> Self {
        self.probability = Some(p);
        self
    }

    /// Whether a qubit travels over this event.
    pub fn is_quantum_transfer(&self) -> bool {
        self.step == Step::Distribute
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AbortStage {
    BobOne,
    CharlieNotPsiPlus,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Succeeded { fidelity: f64 },
    Aborted { stage: AbortStage },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolTranscript {
    pub config: RunConfig,
    pub events: Vec<Event>,
    pub outcome: Outcome,
    pub fidelity: Option<f64>,
    /// Product of the step probabilities along the final attempt.
    pub branch_probability: f64,
    pub attempts: u32,
}

impl ProtocolTranscript {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serializes")
    }

    pub fn retries(&self) -> u32 {
        self.attempts.saturating_sub(1)
    }
}

fn record_attempt(
    tree: &ProtocolTree,
    attempt: &Attempt,
    n: u32,
    events: &mut Vec<Event>,
) -> (Outcome, f64) {
    let node = &tree.alice[attempt.alice];
    events.push(Event::new(n, Step::Prepare, "alice"));
    events.push(Event::new(n, Step::Distribute, "alice->bob").outcome("B"));
    events.push(Event::new(n, Step::Distribute, "alice->charlie").outcome("C"));
    events.push(
        Event::new(n, Step::AliceBell, "alice")
            .basis(BasisKind::Bell)
            .outcome(node.bell.name())
            .bits(node.bits)
            .probability(node.probability),
    );
    events.push(Event::new(n, Step::ClassicalMessage, "alice->bob").bits(node.bits));
    let bob_p = if attempt.bob_bit == 0 {
        node.bob_zero
    } else {
        1.0 - node.bob_zero
    };
    events.push(
        Event::new(n, Step::BobMeasure, "bob")
            .basis(BasisKind::Computational)
            .outcome(attempt.bob_bit.to_string())
            .probability(bob_p),
    );
    let mut branch = node.probability * bob_p;
    let Some(c) = attempt.charlie else {
        events.push(Event::new(n, Step::Abort, "bob").outcome("bob_one"));
        return (
            Outcome::Aborted {
                stage: AbortStage::BobOne,
            },
            branch,
        );
    };
    events.push(Event::new(n, Step::ClassicalMessage, "bob->charlie").bits(node.bits));
    events.push(Event::new(n, Step::Clone, "charlie"));
    let leaf = &node.charlie[c];
    events.push(
        Event::new(n, Step::CharlieBell, "charlie")
            .basis(BasisKind::Bell)
            .outcome(leaf.bell.name())
            .probability(leaf.weight),
    );
    branch *= leaf.weight;
    match leaf.fidelity {
        Some(f) => {
            events.push(
                Event::new(n, Step::Correct, "charlie")
                    .outcome(PauliCorrection::for_bits(node.bits).name())
                    .bits(node.bits),
            );
            (Outcome::Succeeded { fidelity: f }, branch)
        }
        None => {
            events.push(Event::new(n, Step::Abort, "charlie").outcome("charlie_not_psi_plus"));
            (
                Outcome::Aborted {
                    stage: AbortStage::CharlieNotPsiPlus,
                },
                branch,
            )
        }
    }
}

/// Runs the protocol with sampled outcomes, retrying aborted attempts.
pub fn run_protocol(config: &RunConfig) -> Result<ProtocolTranscript> {
    let tree = ProtocolTree::build(&config.secret, &config.wparams, config.convention)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut events = Vec::new();
    let mut n = 0;
    loop {
        n += 1;
        let attempt = tree.sample(&mut rng);
        let (outcome, branch) = record_attempt(&tree, &attempt, n, &mut events);
        let done = matches!(outcome, Outcome::Succeeded { .. }) || n > config.max_retries;
        if done {
            let fidelity = match outcome {
                Outcome::Succeeded { fidelity } => Some(fidelity),
                Outcome::Aborted { .. } => None,
            };
            return Ok(ProtocolTranscript {
                config: *config,
                events,
                outcome,
                fidelity,
                branch_probability: branch,
                attempts: n,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn config(seed: u64, convention: Convention) -> RunConfig {
        RunConfig {
            secret: SecretState::real(0.6, 0.8).unwrap(),
            wparams: WStateParams::from_squares(0.25, 0.5, 0.25).unwrap(),
            convention,
            seed,
            max_retries: 50,
        }
    }

    #[test]
    fn success_has_unit_fidelity() {
        for seed in 0..20 {
            let t = run_protocol(&config(seed, Convention::PaperLiteral)).unwrap();
            if let Outcome::Succeeded { fidelity } = t.outcome {
                assert_relative_eq!(fidelity, 1.0, epsilon = 1e-12);
                assert_eq!(t.fidelity, Some(fidelity));
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = run_protocol(&config(42, Convention::PaperLiteral)).unwrap();
        let b = run_protocol(&config(42, Convention::PaperLiteral)).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn zero_gamma_always_aborts() {
        let mut c = config(3, Convention::PaperLiteral);
        c.wparams = WStateParams::from_squares(0.5, 0.5, 0.0).unwrap();
        c.max_retries = 10;
        let t = run_protocol(&c).unwrap();
        assert!(matches!(t.outcome, Outcome::Aborted { .. }));
        assert_eq!(t.attempts, 11);
        assert!(t.fidelity.is_none());
    }

    #[test]
    fn event_order_of_a_successful_attempt() {
        let t = (0..50)
            .map(|s| run_protocol(&config(s, Convention::PaperLiteral)).unwrap())
            .find(|t| t.attempts == 1 && t.fidelity.is_some())
            .expect("some seed succeeds first time");
        let steps: Vec<Step> = t.events.iter().map(|e| e.step).collect();
        assert_eq!(
            steps,
            vec![
                Step::Prepare,
                Step::Distribute,
                Step::Distribute,
                Step::AliceBell,
                Step::ClassicalMessage,
                Step::BobMeasure,
                Step::ClassicalMessage,
                Step::Clone,
                Step::CharlieBell,
                Step::Correct,
            ]
        );
        assert!(t.branch_probability <= 1.0);
    }

    #[test]
    fn transcript_json_fields() {
        let t = run_protocol(&config(42, Convention::PhysicalIsometry)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        for key in [
            "config",
            "events",
            "outcome",
            "fidelity",
            "branch_probability",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        let e = &v["events"][3];
        for key in ["step", "party", "basis", "outcome", "bits", "probability"] {
            assert!(e.get(key).is_some(), "{key}");
        }
        assert_eq!(e["step"], "alice_bell");
    }

    #[test]
    fn physical_tree_is_complete() {
        let tree = ProtocolTree::build(
            &SecretState::real(0.6, 0.8).unwrap(),
            &WStateParams::from_squares(0.3, 0.3, 0.4).unwrap(),
            Convention::PhysicalIsometry,
        )
        .unwrap();
        let mut total = 0.0;
        for n in &tree.alice {
            total += n.probability * (1.0 - n.bob_zero);
            total += n.probability * n.bob_zero * n.charlie.iter().map(|l| l.weight).sum::<f64>();
        }
        assert_relative_eq!(total, 1.0, epsilon = 1e-12);
    }
}
