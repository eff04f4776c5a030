use num_complex::Complex64;

use super::types::{Bits, PauliCorrection, SecretState, WStateParams};
use crate::cloning::{self, CloneMachineSpec, Convention, InputQubit, COPY, MACHINE, ORIGINAL};
use crate::error::Result;
use crate::kernel::{
    apply_on, enumerate_outcomes, tensor, BellState, MeasurementBasis, StateVector,
};

/// Alice's secret qubit.
pub const SECRET: &str = "A1";
/// Alice's share of the W state.
pub const ALICE: &str = "A2";
pub const BOB: &str = "B";
pub const CHARLIE: &str = "C";
/// Charlie's machine qubit once the clone modes are measured.
pub const MACHINE_QUBIT: &str = "Q";

/// `|φ⟩_A1 ⊗ |W⟩_{A2 B C}` over `(A1, A2, B, C)`.
pub fn prepare_composite(secret: &SecretState, w: &WStateParams) -> StateVector {
    tensor(&[&secret.state(SECRET), &w.state([ALICE, BOB, CHARLIE])]).expect("disjoint labels")
}

#[derive(Clone, Debug, PartialEq)]
pub struct AliceOutcome {
    pub bell: BellState,
    pub bits: Bits,
    pub probability: f64,
    /// Unnormalized `⟨bell|ψ⟩` over `(B, C)`.
    pub branch: StateVector,
    /// Normalized `(B, C)` state; absent on null branches.
    pub bc_state: Option<StateVector>,
}

pub fn alice_bell_measurement(composite: &StateVector) -> Result<Vec<AliceOutcome>> {
    let records = enumerate_outcomes(composite, &MeasurementBasis::bell(), &[SECRET, ALICE])?;
    records
        .into_iter()
        .map(|r| {
            let bell = BellState::from_index(r.outcome).expect("four Bell outcomes");
            let bc_state = r
                .collapsed
                .map(|s| s.permuted(&[BOB, CHARLIE]))
                .transpose()?;
            Ok(AliceOutcome {
                bell,
                bits: Bits::from_bell(bell),
                probability: r.probability,
                branch: r.branch.permuted(&[BOB, CHARLIE])?,
                bc_state,
            })
        })
        .collect()
}

/// The `(B, C)` state left by each Bell outcome, scaled by `√2`:
/// amplitudes over `|00⟩, |01⟩, |10⟩, |11⟩`.
pub fn table1_bc_state(bell: BellState, secret: &SecretState, w: &WStateParams) -> [Complex64; 4] {
    let (a, b) = (secret.a, secret.b);
    let z = Complex64::new(0.0, 0.0);
    match bell {
        BellState::PhiPlus => [b * w.gamma, a * w.alpha, a * w.beta, z],
        BellState::PhiMinus => [-b * w.gamma, a * w.alpha, a * w.beta, z],
        BellState::PsiPlus => [a * w.gamma, b * w.alpha, b * w.beta, z],
        BellState::PsiMinus => [a * w.gamma, -b * w.alpha, -b * w.beta, z],
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BobOutcome {
    pub bit: u8,
    /// Conditional on the `(B, C)` state handed in.
    pub probability: f64,
    /// Charlie's collapsed qubit; absent on null branches.
    pub c_state: Option<StateVector>,
}

impl BobOutcome {
    /// Outcome 1 aborts the run.
    pub fn aborts(&self) -> bool {
        self.bit == 1
    }
}

pub fn bob_measurement(bc_state: &StateVector) -> Result<Vec<BobOutcome>> {
    let records = enumerate_outcomes(bc_state, &MeasurementBasis::computational(1), &[BOB])?;
    Ok(records
        .into_iter()
        .map(|r| BobOutcome {
            bit: r.outcome as u8,
            probability: r.probability,
            c_state: r.collapsed,
        })
        .collect())
}

/// Cloner Charlie builds from his knowledge of the shared state: `p = α`, `q = γ`.
pub fn charlie_cloner(w: &WStateParams, convention: Convention) -> CloneMachineSpec {
    CloneMachineSpec {
        p: w.alpha,
        q: w.gamma,
        convention,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CharlieOutcome {
    pub bell: BellState,
    /// Squared norm of the branch. Under the paper-literal convention this is
    /// read off the unnormalized image and can exceed 1.
    pub probability: f64,
    /// Normalized machine qubit; absent on null branches.
    pub machine_state: Option<StateVector>,
}

impl CharlieOutcome {
    pub fn decodable(&self) -> bool {
        self.bell == BellState::PsiPlus
    }
}

pub fn charlie_clone_and_bell(
    c_state: &StateVector,
    spec: &CloneMachineSpec,
) -> Result<Vec<CharlieOutcome>> {
    let input = InputQubit::from_state(c_state)?;
    let out = cloning::clone(&input, spec);
    let records = enumerate_outcomes(&out.state, &MeasurementBasis::bell(), &[ORIGINAL, COPY])?;
    records
        .into_iter()
        .map(|r| {
            debug_assert_eq!(r.branch.labels(), &[MACHINE]);
            Ok(CharlieOutcome {
                bell: BellState::from_index(r.outcome).expect("four Bell outcomes"),
                probability: r.probability,
                machine_state: r
                    .collapsed
                    .map(|s| s.relabel([MACHINE_QUBIT]))
                    .transpose()?,
            })
        })
        .collect()
}

/// Machine state after a ψ+ outcome for each Alice outcome, as printed in the
/// third column of the decoding table.
pub fn expected_machine_state(bits: Bits, secret: &SecretState) -> [Complex64; 2] {
    let (a, b) = (secret.a, secret.b);
    match bits.to_bell() {
        BellState::PhiPlus => [b, a],
        BellState::PhiMinus => [-b, a],
        BellState::PsiPlus => [a, b],
        BellState::PsiMinus => [a, -b],
    }
}

pub fn apply_correction(state: &StateVector, correction: PauliCorrection) -> Result<StateVector> {
    let label = state.labels().first().cloned().unwrap_or_default();
    apply_on(state, &correction.operator(), &[label.as_str()])
}

/// Applies the decoding-table correction selected by `bits`.
pub fn charlie_correction(machine_state: &StateVector, bits: Bits) -> Result<StateVector> {
    apply_correction(machine_state, PauliCorrection::for_bits(bits))
}
