//! Three-party controlled QSDC over a W-class channel.
//!
//! Alice holds `A1` (the secret) and `A2`, Bob holds `B`, Charlie holds `C`.
//! Alice Bell-measures her pair, Bob measures `B` and aborts on 1, and
//! Charlie clones `C` with `p = α`, `q = γ`, Bell-measures the clone modes
//! and, on ψ+, corrects the machine qubit from Alice's relayed bits.

mod attack;
mod probability;
mod run;
mod steps;
mod types;

pub use attack::{attack_scenario, controller_decode, AttackKind, AttackReport, Baseline};
pub use probability::{
    analytic, enumerate_branches, monte_carlo, physical_closed_form, success_probability, Branch,
    Method, MonteCarloEstimate,
};
pub use run::{
    run_protocol, AbortStage, AliceNode, Attempt, CharlieLeaf, Event, Outcome, ProtocolTranscript,
    ProtocolTree, Step,
};
pub use steps::{
    alice_bell_measurement, apply_correction, bob_measurement, charlie_clone_and_bell,
    charlie_cloner, charlie_correction, expected_machine_state, prepare_composite, table1_bc_state,
    AliceOutcome, BobOutcome, CharlieOutcome, ALICE, BOB, CHARLIE, MACHINE_QUBIT, SECRET,
};
pub use types::{
    Bits, ClassicalMessage, Party, PauliCorrection, RunConfig, SecretState, WStateParams,
};
