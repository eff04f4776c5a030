//! Analytic bridges between success probability, cloning quality and
//! entanglement of the shared state.

mod cubic;
mod figures;

pub use cubic::{cubic_residual, ps_from_fill, CardanoTrace, RootMethod, RootReport};
pub use figures::{figure_series, format_sig, write_svg, Figure, GridSpec, SweepTable};

use serde::{Deserialize, Serialize};

use crate::cloning::{average_hs_distance, CloneMachineSpec};
use crate::entanglement::ConcurrenceTriple;
use crate::protocol::WStateParams;

/// Fill of the balanced W state as printed, used as the ceiling for sweeps.
pub const FILL_CEILING: f64 = 0.88889;
/// Upper end of the β² range swept for the fill/probability figure.
pub const FIG3_BETA_SQ_MAX: f64 = 0.17;

/// `4β²(1−β²)`.
pub(crate) fn c2_b(beta_sq: f64) -> f64 {
    4.0 * beta_sq * (1.0 - beta_sq)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    pub ps: f64,
    pub beta_sq: f64,
    pub alpha_sq: Option<f64>,
    pub gamma_sq: Option<f64>,
    pub dbar: f64,
    pub fill: f64,
}

impl TradeoffPoint {
    /// The point realized by a normalized parameter set.
    pub fn realized(w: &WStateParams) -> Self {
        let (a, b, g) = w.squares();
        let ps = 4.0 * a * g;
        Self {
            ps,
            beta_sq: b,
            alpha_sq: Some(a),
            gamma_sq: Some(g),
            dbar: dbar_from_ps(ps, b, a, g),
            fill: fill_from_ps(ps, b),
        }
    }
}

/// Average HS distance written in terms of `ps`.
pub fn dbar_from_ps(ps: f64, beta_sq: f64, alpha_sq: f64, gamma_sq: f64) -> f64 {
    let num = (1.0 - beta_sq + ps / 2.0).powi(2) + ps * ps / 4.0 - ps / 2.0;
    let den = (1.0 + 2.0 * gamma_sq).powi(2) * (1.0 + 2.0 * alpha_sq).powi(2);
    4.0 / 3.0 * num / den + 1.0 / 3.0
}

/// `D̄` of the cloner Charlie builds from `w`.
pub fn constrained_dbar(w: &WStateParams) -> f64 {
    average_hs_distance(
        &CloneMachineSpec::new(w.alpha, w.gamma, Default::default()).expect("finite"),
    )
}

/// Left-hand side of the sub-1/3 condition, quadratic in `ps`.
pub fn window_quadratic(ps: f64, beta_sq: f64) -> f64 {
    (1.0 - beta_sq + ps / 2.0).powi(2) + ps * ps / 4.0 - ps / 2.0
}

/// β² below which the window is empty: `(3−√2)/2`.
pub fn window_threshold() -> f64 {
    (3.0 - std::f64::consts::SQRT_2) / 2.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsWindow {
    pub beta_sq: f64,
    /// `None` when the quadratic has no real root.
    pub bounds: Option<(f64, f64)>,
}

impl PsWindow {
    pub fn is_empty(&self) -> bool {
        self.bounds.is_none()
    }
}

pub fn ps_window(beta_sq: f64) -> PsWindow {
    let disc = 12.0 * beta_sq - 4.0 * beta_sq * beta_sq - 7.0;
    let bounds = if beta_sq < window_threshold() - 1e-12 {
        None
    } else {
        let centre = -(0.5 - beta_sq);
        let half = 0.5 * disc.max(0.0).sqrt();
        Some((centre - half, centre + half))
    };
    PsWindow { beta_sq, bounds }
}

/// Range of `|α|² + |γ|²` left by the smallest admissible β².
pub fn alpha_gamma_budget() -> (f64, f64) {
    (0.0, std::f64::consts::FRAC_1_SQRT_2 - 0.5)
}

/// `(64/3 · ps² · β⁴ · (ps + 4β² − 4β⁴))^{1/4}`.
pub fn fill_from_ps(ps: f64, beta_sq: f64) -> f64 {
    let b4 = beta_sq * beta_sq;
    (64.0 / 3.0 * ps * ps * b4 * (ps + c2_b(beta_sq)))
        .max(0.0)
        .powf(0.25)
}

/// Squared concurrences written through `ps`.
///
/// A vanishing `|α|²` or `|γ|²` falls back to `4x(1−x)` for that entry.
pub fn cfill_components(ps: f64, w: &WStateParams) -> ConcurrenceTriple {
    let (a, b, g) = w.squares();
    let through = |num: f64, den: f64, own: f64| {
        if den > 0.0 {
            ps * num / den
        } else {
            4.0 * own * (1.0 - own)
        }
    };
    ConcurrenceTriple::new(through(1.0 - g, a, g), c2_b(b), through(1.0 - a, g, a))
}

/// Printed lower and upper fill bounds at fixed β².
pub fn fill_bounds(beta_sq: f64) -> (f64, f64) {
    let core = beta_sq.powi(5) * (1.0 - beta_sq).powi(3);
    let lower = (16384.0 / 81.0 * core).powf(0.25);
    let upper = (8192.0 / 81.0 * core + 64.0 / 3.0 * beta_sq * beta_sq).powf(0.25);
    (lower, upper)
}
