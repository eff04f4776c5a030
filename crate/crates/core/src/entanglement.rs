//! One-to-rest concurrences and the concurrence fill of three-qubit pure states.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{partial_trace, StateVector};
use crate::protocol::WStateParams;

/// Radicands in `(-RADICAND_TOLERANCE, 0)` are clamped to zero.
pub const RADICAND_TOLERANCE: f64 = 1e-10;
const TRIPLE_FLOOR: f64 = -1e-12;

const DEFAULT_LABELS: [&str; 3] = ["A", "B", "C"];

/// Squared one-to-rest concurrences, `4 det ρ_i` for each qubit in label order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceTriple {
    pub c2_a_bc: f64,
    pub c2_b_ac: f64,
    pub c2_c_ab: f64,
}

impl ConcurrenceTriple {
    pub fn new(c2_a_bc: f64, c2_b_ac: f64, c2_c_ab: f64) -> Self {
        Self {
            c2_a_bc,
            c2_b_ac,
            c2_c_ab,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.c2_a_bc, self.c2_b_ac, self.c2_c_ab]
    }

    pub fn q(&self) -> f64 {
        self.as_array().iter().sum::<f64>() / 2.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FillReport {
    pub q: f64,
    pub fill: f64,
    pub triple: ConcurrenceTriple,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WnParams {
    pub n: u32,
    pub phase_gamma: f64,
    pub phase_delta: f64,
}

impl WnParams {
    pub fn new(n: u32, phase_gamma: f64, phase_delta: f64) -> Result<Self> {
        check_n(n)?;
        Ok(Self {
            n,
            phase_gamma,
            phase_delta,
        })
    }
}

fn check_n(n: u32) -> Result<()> {
    if n < 1 {
        return Err(Error::OutOfRange {
            what: "n",
            value: f64::from(n),
        });
    }
    Ok(())
}

pub fn concurrence_triple(state: &StateVector) -> Result<ConcurrenceTriple> {
    if state.num_qubits() != 3 {
        return Err(Error::WrongQubitCount {
            expected: 3,
            found: state.num_qubits(),
        });
    }
    if !state.is_normalized() {
        return Err(Error::NotNormalized {
            norm_sqr: state.norm_sqr(),
        });
    }
    let mut c2 = [0.0; 3];
    for (slot, label) in c2.iter_mut().zip(state.labels()) {
        let rho = partial_trace(state, &[label.as_str()])?;
        *slot = clamp_triple(4.0 * rho.det2()?.re);
    }
    Ok(ConcurrenceTriple::new(c2[0], c2[1], c2[2]))
}

fn clamp_triple(v: f64) -> f64 {
    if (TRIPLE_FLOOR..0.0).contains(&v) {
        0.0
    } else {
        v
    }
}

/// Closed-form triple for `α|001⟩ + β|010⟩ + γ|100⟩` over `(A, B, C)`.
pub fn w_class_triple(w: &WStateParams) -> ConcurrenceTriple {
    let (a, b, g) = w.squares();
    let c = |x: f64| 4.0 * x - 4.0 * x * x;
    ConcurrenceTriple::new(c(g), c(b), c(a))
}

fn fourth_root_checked(radicand: f64) -> Result<f64> {
    if radicand < -RADICAND_TOLERANCE || !radicand.is_finite() {
        return Err(Error::NegativeRadicand(radicand));
    }
    Ok(radicand.max(0.0).powf(0.25))
}

/// Heron-like fill from a triple.
pub fn fill_from_triple(triple: ConcurrenceTriple) -> Result<FillReport> {
    let q = triple.q();
    let radicand = 16.0 / 3.0 * q * triple.as_array().iter().map(|c| q - c).product::<f64>();
    Ok(FillReport {
        q,
        fill: fourth_root_checked(radicand)?,
        triple,
    })
}

pub fn concurrence_fill(state: &StateVector) -> Result<FillReport> {
    fill_from_triple(concurrence_triple(state)?)
}

/// Fill of a W-class state via the squared-magnitude closed form.
pub fn concurrence_fill_w(w: &WStateParams) -> Result<FillReport> {
    let (a, b, g) = w.squares();
    let (a2, b2, g2) = (a * a, b * b, g * g);
    let s = 1.0 - a2 - b2 - g2;
    let radicand = s
        * (1.0 - b2 - a2 + g2 - 2.0 * g)
        * (1.0 - a2 - g2 + b2 - 2.0 * b)
        * (1.0 - g2 - b2 + a2 - 2.0 * a);
    let fill = 4.0 / 3f64.powf(0.25) * fourth_root_checked(radicand)?;
    Ok(FillReport {
        q: 2.0 * s,
        fill,
        triple: w_class_triple(w),
    })
}

/// `(|100⟩ + √n e^{iγ}|010⟩ + √(n+1) e^{iδ}|001⟩)/√(2+2n)`.
pub fn wn_state(params: &WnParams) -> Result<StateVector> {
    check_n(params.n)?;
    let n = f64::from(params.n);
    let norm = (2.0 + 2.0 * n).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    amps[0b100] = Complex64::new(1.0 / norm, 0.0);
    amps[0b010] = Complex64::from_polar(n.sqrt() / norm, params.phase_gamma);
    amps[0b001] = Complex64::from_polar((n + 1.0).sqrt() / norm, params.phase_delta);
    StateVector::new(DEFAULT_LABELS, amps)
}

pub fn wn_fill(n: u32) -> Result<f64> {
    check_n(n)?;
    let n = f64::from(n);
    let inner = n * n * (n * n + 3.0 * n + 1.0) / (3.0 * (1.0 + n).powi(6));
    Ok(2.0 * inner.powf(0.25))
}
