//! Two-parameter symmetric cloning machine.
//!
//! ```text
//! |0⟩_a|0⟩_b|Q⟩_c → (|00⟩ + p(|01⟩+|10⟩)) |Q0⟩_c
//! |1⟩_a|0⟩_b|Q⟩_c → (|11⟩ + q(|01⟩+|10⟩)) |Q1⟩_c
//! ```
//!
//! The machine is a single qubit with `|Q0⟩ ∝ |0⟩`, `|Q1⟩ ∝ |1⟩`. Labels of
//! the output are `a` (original), `b` (copy) and `c` (machine).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{hs_distance, partial_trace, DensityMatrix, StateVector};

pub const ORIGINAL: &str = "a";
pub const COPY: &str = "b";
pub const MACHINE: &str = "c";

const INPUT_TOLERANCE: f64 = 1e-9;

/// How the machine kets are normalized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `|Q0⟩ = |0⟩`, `|Q1⟩ = |1⟩`. Linear but not norm-preserving.
    #[default]
    PaperLiteral,
    /// `|Q0⟩ = |0⟩/√(1+2|p|²)`, `|Q1⟩ = |1⟩/√(1+2|q|²)`. An isometry.
    PhysicalIsometry,
}

impl Convention {
    pub fn name(self) -> &'static str {
        match self {
            Convention::PaperLiteral => "paper_literal",
            Convention::PhysicalIsometry => "physical_isometry",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CloneMachineSpec {
    pub p: Complex64,
    pub q: Complex64,
    pub convention: Convention,
}

impl CloneMachineSpec {
    pub fn new(p: Complex64, q: Complex64, convention: Convention) -> Result<Self> {
        for (what, v) in [("p", p), ("q", q)] {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::OutOfRange {
                    what: if what == "p" { "cloner p" } else { "cloner q" },
                    value: f64::NAN,
                });
            }
        }
        Ok(Self { p, q, convention })
    }

    /// Real parameters, paper-literal convention.
    pub fn real(p: f64, q: f64) -> Self {
        Self {
            p: Complex64::new(p, 0.0),
            q: Complex64::new(q, 0.0),
            convention: Convention::PaperLiteral,
        }
    }

    /// The Wootters–Zurek limit `p = q = 0`.
    pub fn wootters_zurek(convention: Convention) -> Self {
        Self {
            convention,
            ..Self::real(0.0, 0.0)
        }
    }

    pub fn with_convention(self, convention: Convention) -> Self {
        Self { convention, ..self }
    }

    /// `⟨Q0|Q0⟩ = 1/(1+2|p|²)` from unitarity.
    pub fn unitarity_norm0(&self) -> f64 {
        1.0 / (1.0 + 2.0 * self.p.norm_sqr())
    }

    /// `⟨Q1|Q1⟩ = 1/(1+2|q|²)` from unitarity.
    pub fn unitarity_norm1(&self) -> f64 {
        1.0 / (1.0 + 2.0 * self.q.norm_sqr())
    }

    /// Amplitude scale of `|Q0⟩` and `|Q1⟩` under the chosen convention.
    fn machine_scales(&self) -> (f64, f64) {
        match self.convention {
            Convention::PaperLiteral => (1.0, 1.0),
            Convention::PhysicalIsometry => {
                (self.unitarity_norm0().sqrt(), self.unitarity_norm1().sqrt())
            }
        }
    }
}

/// Input `x|0⟩ + y|1⟩` to be cloned.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputQubit {
    pub x: Complex64,
    pub y: Complex64,
}

impl InputQubit {
    pub fn new(x: Complex64, y: Complex64) -> Result<Self> {
        let norm_sqr = x.norm_sqr() + y.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > INPUT_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { x, y })
    }

    /// Real input with `|x|² = m`.
    pub fn from_m(m: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&m) {
            return Err(Error::OutOfRange {
                what: "m",
                value: m,
            });
        }
        Ok(Self {
            x: Complex64::new(m.sqrt(), 0.0),
            y: Complex64::new((1.0 - m).sqrt(), 0.0),
        })
    }

    pub fn from_state(state: &StateVector) -> Result<Self> {
        if state.num_qubits() != 1 {
            return Err(Error::WrongQubitCount {
                expected: 1,
                found: state.num_qubits(),
            });
        }
        Self::new(state.amplitude(0), state.amplitude(1))
    }

    pub fn m(&self) -> f64 {
        self.x.norm_sqr()
    }

    pub fn state(&self, label: &str) -> StateVector {
        StateVector::qubit(label, self.x, self.y).expect("input qubit is normalized")
    }

    /// `ρ^in = |χ⟩⟨χ|`.
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(&self.state(ORIGINAL))
    }
}

/// Images of the two basis inputs over labels `(a, b, c)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CloneMap {
    pub spec: CloneMachineSpec,
    pub image0: Vec<Complex64>,
    pub image1: Vec<Complex64>,
}

pub fn build_clone_map(spec: &CloneMachineSpec) -> CloneMap {
    let (s0, s1) = spec.machine_scales();
    let z = Complex64::new(0.0, 0.0);
    let mut image0 = vec![z; 8];
    let mut image1 = vec![z; 8];
    // index = a·4 + b·2 + c
    image0[0b000] = Complex64::new(s0, 0.0);
    image0[0b010] = spec.p * s0;
    image0[0b100] = spec.p * s0;
    image1[0b111] = Complex64::new(s1, 0.0);
    image1[0b011] = spec.q * s1;
    image1[0b101] = spec.q * s1;
    CloneMap {
        spec: *spec,
        image0,
        image1,
    }
}

impl CloneMap {
    /// Linear extension to `x|0⟩ + y|1⟩`, flagged unnormalized.
    pub fn apply(&self, input: &InputQubit) -> StateVector {
        let amps = self
            .image0
            .iter()
            .zip(&self.image1)
            .map(|(u, v)| input.x * u + input.y * v)
            .collect();
        StateVector::unnormalized([ORIGINAL, COPY, MACHINE], amps)
            .expect("three labels, eight amplitudes")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CloneOutput {
    pub input: InputQubit,
    pub spec: CloneMachineSpec,
    /// Over `(a, b, c)`; flagged unnormalized under the paper-literal convention.
    pub state: StateVector,
    /// Squared norm of the raw image before any renormalization.
    pub norm_sqr: f64,
}

impl CloneOutput {
    pub fn normalized(&self) -> bool {
        self.state.is_normalized()
    }
}

pub fn clone(input: &InputQubit, spec: &CloneMachineSpec) -> CloneOutput {
    let raw = build_clone_map(spec).apply(input);
    let norm_sqr = raw.norm_sqr();
    let state = match spec.convention {
        Convention::PaperLiteral => raw,
        Convention::PhysicalIsometry => raw.normalize().expect("isometry output is non-zero"),
    };
    CloneOutput {
        input: *input,
        spec: *spec,
        state,
        norm_sqr,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Original,
    Copy,
    Pair,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionStyle {
    /// True partial trace of the renormalized output.
    Exact,
    /// The printed diagonal operators: machine-block cross terms dropped,
    /// unitarity norms for `⟨Qi|Qi⟩`, and a factor 2 on the `|ξ⟩⟨ξ|` weight
    /// carried into the single-mode marginal.
    PaperDiagonal,
}

pub fn reduced_outputs(out: &CloneOutput, which: Mode, style: ReductionStyle) -> DensityMatrix {
    match style {
        ReductionStyle::Exact => {
            let state = out.state.normalize().expect("clone output is non-zero");
            let keep: &[&str] = match which {
                Mode::Original => &[ORIGINAL],
                Mode::Copy => &[COPY],
                Mode::Pair => &[ORIGINAL, COPY],
            };
            partial_trace(&state, keep).expect("labels exist")
        }
        ReductionStyle::PaperDiagonal => paper_diagonal(out.input.m(), &out.spec, which),
    }
}

fn paper_diagonal(m: f64, spec: &CloneMachineSpec, which: Mode) -> DensityMatrix {
    let n0 = spec.unitarity_norm0();
    let n1 = spec.unitarity_norm1();
    let (pp, qq) = (spec.p.norm_sqr(), spec.q.norm_sqr());
    match which {
        Mode::Pair => {
            let xi = 2.0 * m * pp * n0 + 2.0 * (1.0 - m) * qq * n1;
            let h = 0.5 * xi;
            let r = |v: f64| Complex64::new(v, 0.0);
            let z = r(0.0);
            #[rustfmt::skip]
            let entries = vec![
                r(m * n0), z, z, z,
                z, r(h), r(h), z,
                z, r(h), r(h), z,
                z, z, z, r((1.0 - m) * n1),
            ];
            DensityMatrix::from_entries(vec![ORIGINAL.into(), COPY.into()], entries).expect("4x4")
        }
        Mode::Original | Mode::Copy => {
            let label = if which == Mode::Original {
                ORIGINAL
            } else {
                COPY
            };
            let d0 = m * (1.0 + 2.0 * pp) * n0 + 2.0 * (1.0 - m) * qq * n1;
            let d1 = 2.0 * m * pp * n0 + (1.0 - m) * (1.0 + 2.0 * qq) * n1;
            DensityMatrix::diagonal(vec![label.into()], &[d0, d1]).expect("2x2")
        }
    }
}

/// `s = 2|p|²/(1+2|p|²)` and `t = 2|q|²/(1+2|q|²)`.
fn s_t(spec: &CloneMachineSpec) -> (f64, f64) {
    let pp = spec.p.norm_sqr();
    let qq = spec.q.norm_sqr();
    (2.0 * pp / (1.0 + 2.0 * pp), 2.0 * qq / (1.0 + 2.0 * qq))
}

/// `D_a(m)` for a real input with `|x|² = m`:
///
/// ```text
/// 2m²(2|q|⁴/(1+2|q|²)² + 2|p|⁴/(1+2|p|²)² − 1) + 2m(1 − 4|q|⁴/(1+2|q|²)²) + 4|q|⁴/(1+2|q|²)²
/// ```
pub fn analytic_hs_distance(m: f64, spec: &CloneMachineSpec) -> Result<f64> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::OutOfRange {
            what: "m",
            value: m,
        });
    }
    let (s, t) = s_t(spec);
    let (s2, t2) = (s * s, t * t);
    Ok(2.0 * m * m * (t2 / 2.0 + s2 / 2.0 - 1.0) + 2.0 * m * (1.0 - t2) + t2)
}

/// `(4/3)[|q|⁴/(1+2|q|²)² + |p|⁴/(1+2|p|²)²] + 1/3`.
pub fn average_hs_distance(spec: &CloneMachineSpec) -> f64 {
    let pp = spec.p.norm_sqr();
    let qq = spec.q.norm_sqr();
    let term = |v: f64| v * v / ((1.0 + 2.0 * v) * (1.0 + 2.0 * v));
    4.0 / 3.0 * (term(qq) + term(pp)) + 1.0 / 3.0
}

/// `D_a(m)` by the matrix route: HS distance between `ρ^in` and the printed
/// diagonal `ρ_a` for the real input with `|x|² = m`.
pub fn matrix_hs_distance(m: f64, spec: &CloneMachineSpec) -> Result<f64> {
    let input = InputQubit::from_m(m)?;
    hs_distance(&input.density(), &paper_diagonal(m, spec, Mode::Original))
}

/// Composite Simpson estimate of `∫₀¹ D_a(m) dm` over the matrix route.
pub fn average_hs_distance_simpson(spec: &CloneMachineSpec, panels: usize) -> f64 {
    let n = panels.max(2) + panels % 2;
    let h = 1.0 / n as f64;
    let f = |i: usize| matrix_hs_distance((i as f64 * h).min(1.0), spec).expect("m in [0, 1]");
    let mut sum = f(0) + f(n);
    for i in 1..n {
        sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i);
    }
    sum * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::BellState;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn wz_limit_copies_basis_states() {
        for conv in [Convention::PaperLiteral, Convention::PhysicalIsometry] {
            let spec = CloneMachineSpec::wootters_zurek(conv);
            let out0 = clone(&InputQubit::from_m(1.0).unwrap(), &spec);
            assert_eq!(out0.state.amplitude(0b000), c(1.0, 0.0));
            let out1 = clone(&InputQubit::from_m(0.0).unwrap(), &spec);
            assert_eq!(out1.state.amplitude(0b111), c(1.0, 0.0));
            assert_eq!(out1.state.norm_sqr(), 1.0);
        }
    }

    #[test]
    fn wz_limit_on_superposition() {
        let input = InputQubit::new(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let out = clone(&input, &CloneMachineSpec::real(0.0, 0.0));
        assert_eq!(out.state.amplitude(0b000), input.x);
        assert_eq!(out.state.amplitude(0b111), input.y);
        let rho = reduced_outputs(&out, Mode::Original, ReductionStyle::Exact);
        let expected = DensityMatrix::diagonal(vec!["a".into()], &[0.36, 0.64]).unwrap();
        assert!(rho.max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn machine_and_copy_traced_out_of_zero_input() {
        let out = clone(
            &InputQubit::from_m(1.0).unwrap(),
            &CloneMachineSpec::real(0.0, 0.0),
        );
        let rho = partial_trace(&out.state, &["a"]).unwrap();
        let zero = DensityMatrix::diagonal(vec!["a".into()], &[1.0, 0.0]).unwrap();
        assert!(rho.max_abs_diff(&zero).unwrap() < 1e-15);
    }

    #[test]
    fn image_norms() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let phys = CloneMachineSpec::real(h, h).with_convention(Convention::PhysicalIsometry);
        let out = clone(&InputQubit::from_m(1.0).unwrap(), &phys);
        assert_relative_eq!(out.state.norm_sqr(), 1.0, epsilon = 1e-12);
        let lit = CloneMachineSpec::real(1.0, 1.0);
        let out = clone(&InputQubit::from_m(1.0).unwrap(), &lit);
        assert!(!out.normalized());
        assert_relative_eq!(out.norm_sqr, 3.0, epsilon = 1e-15);
        assert_relative_eq!(out.state.norm_sqr(), 3.0, epsilon = 1e-15);
    }

    #[test]
    fn balanced_input_physical_norm() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let spec = CloneMachineSpec::real(0.5, 0.5).with_convention(Convention::PhysicalIsometry);
        let input = InputQubit::new(c(h, 0.0), c(h, 0.0)).unwrap();
        let norm = build_clone_map(&spec).apply(&input).norm_sqr();
        assert_relative_eq!(norm, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn paper_diagonal_is_symmetric_and_wz_trace_one() {
        let input = InputQubit::new(c(0.6, 0.0), c(0.8, 0.0)).unwrap();
        let out = clone(&input, &CloneMachineSpec::real(0.3, -0.7));
        let a = reduced_outputs(&out, Mode::Original, ReductionStyle::PaperDiagonal);
        let b = reduced_outputs(&out, Mode::Copy, ReductionStyle::PaperDiagonal);
        assert_eq!(a.entries(), b.entries());

        let wz = clone(&input, &CloneMachineSpec::real(0.0, 0.0));
        let a = reduced_outputs(&wz, Mode::Original, ReductionStyle::PaperDiagonal);
        let expected = DensityMatrix::diagonal(vec!["a".into()], &[0.36, 0.64]).unwrap();
        assert!(a.max_abs_diff(&expected).unwrap() < 1e-15);
        assert_relative_eq!(a.trace().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn paper_diagonal_trace_exceeds_one() {
        let out = clone(
            &InputQubit::from_m(0.5).unwrap(),
            &CloneMachineSpec::real(1.0, 1.0),
        );
        let a = reduced_outputs(&out, Mode::Original, ReductionStyle::PaperDiagonal);
        // diag(1/2 + 1/3, 1/3 + 1/2)
        assert_relative_eq!(a.trace().re, 5.0 / 3.0, epsilon = 1e-15);
        let ab = reduced_outputs(&out, Mode::Pair, ReductionStyle::PaperDiagonal);
        assert_relative_eq!(ab.trace().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn hs_distance_reference_points() {
        let wz = CloneMachineSpec::real(0.0, 0.0);
        assert_eq!(analytic_hs_distance(1.0, &wz).unwrap(), 0.0);
        assert_relative_eq!(
            analytic_hs_distance(0.5, &wz).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert_relative_eq!(matrix_hs_distance(0.5, &wz).unwrap(), 0.5, epsilon = 1e-15);
        for i in 0..=20 {
            let m = i as f64 / 20.0;
            assert_relative_eq!(
                analytic_hs_distance(m, &wz).unwrap(),
                2.0 * m * (1.0 - m),
                epsilon = 1e-15
            );
        }
        assert!(analytic_hs_distance(1.5, &wz).is_err());
        assert!(analytic_hs_distance(-0.1, &wz).is_err());
    }

    #[test]
    fn average_reference_values() {
        assert_eq!(
            average_hs_distance(&CloneMachineSpec::real(0.0, 0.0)),
            1.0 / 3.0
        );
        assert_relative_eq!(
            average_hs_distance(&CloneMachineSpec::real(1.0, 1.0)),
            17.0 / 27.0,
            epsilon = 1e-15
        );
        let r = 0.1f64.sqrt();
        let spec = CloneMachineSpec::real(r, r);
        assert_relative_eq!(
            average_hs_distance(&spec),
            1.0 / 54.0 + 1.0 / 3.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            average_hs_distance_simpson(&spec, 10_000),
            1.0 / 54.0 + 1.0 / 3.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn psi_plus_component_of_cloned_state() {
        // Bell-decomposing (a,b) of the cloned u|0⟩+v|1⟩ leaves √2(u p|Q0⟩ + v q|Q1⟩) on ψ+.
        let (u, v) = (c(0.6, 0.0), c(0.0, 0.8));
        let spec = CloneMachineSpec::real(0.4, 0.9);
        let out = clone(&InputQubit::new(u, v).unwrap(), &spec);
        let rec = crate::kernel::enumerate_outcomes(
            &out.state,
            &crate::kernel::MeasurementBasis::bell(),
            &["a", "b"],
        )
        .unwrap();
        let psi = &rec[BellState::PsiPlus.index()].branch;
        let r2 = std::f64::consts::SQRT_2;
        assert!((psi.amplitude(0) - u * 0.4 * r2).norm() < 1e-15);
        assert!((psi.amplitude(1) - v * 0.9 * r2).norm() < 1e-15);
        assert!(rec[BellState::PsiMinus.index()].probability < 1e-30);
    }

    fn arb_amp(max: f64) -> impl Strategy<Value = Complex64> {
        (0.0..max, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
    }

    fn arb_input() -> impl Strategy<Value = InputQubit> {
        (
            0.0f64..=1.0,
            0.0..std::f64::consts::TAU,
            0.0..std::f64::consts::TAU,
        )
            .prop_map(|(m, a, b)| {
                InputQubit::new(
                    Complex64::from_polar(m.sqrt(), a),
                    Complex64::from_polar((1.0 - m).sqrt(), b),
                )
                .unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn physical_cloner_is_an_isometry(input in arb_input(), p in arb_amp(2.0), q in arb_amp(2.0)) {
            let spec = CloneMachineSpec::new(p, q, Convention::PhysicalIsometry).unwrap();
            let out = clone(&input, &spec);
            prop_assert!((out.state.norm_sqr() - 1.0).abs() < 1e-12);
            prop_assert!((out.norm_sqr - 1.0).abs() < 1e-12);
        }

        #[test]
        fn exact_marginals_are_symmetric(input in arb_input(), p in arb_amp(2.0), q in arb_amp(2.0), phys in any::<bool>()) {
            let conv = if phys { Convention::PhysicalIsometry } else { Convention::PaperLiteral };
            let out = clone(&input, &CloneMachineSpec::new(p, q, conv).unwrap());
            let a = reduced_outputs(&out, Mode::Original, ReductionStyle::Exact);
            let b = reduced_outputs(&out, Mode::Copy, ReductionStyle::Exact);
            prop_assert!(a.max_abs_diff(&b).unwrap() < 1e-12);
        }

        #[test]
        fn wz_limit_has_no_mixed_terms(input in arb_input(), phys in any::<bool>()) {
            let conv = if phys { Convention::PhysicalIsometry } else { Convention::PaperLiteral };
            let out = clone(&input, &CloneMachineSpec::wootters_zurek(conv));
            for i in [0b010, 0b011, 0b100, 0b101] {
                prop_assert!(out.state.amplitude(i).norm() <= 1e-15);
            }
        }

        #[test]
        fn analytic_matches_matrix_route(m in 0.0f64..=1.0, p in arb_amp(2.0), q in arb_amp(2.0)) {
            let spec = CloneMachineSpec::new(p, q, Convention::PaperLiteral).unwrap();
            let d = analytic_hs_distance(m, &spec).unwrap();
            prop_assert!((d - matrix_hs_distance(m, &spec).unwrap()).abs() < 1e-10);
        }

        #[test]
        fn average_exceeds_wz_bound(p in arb_amp(2.0), q in arb_amp(2.0)) {
            let spec = CloneMachineSpec::new(p, q, Convention::PaperLiteral).unwrap();
            let d = average_hs_distance(&spec);
            prop_assert!(d >= 1.0 / 3.0);
            if p.norm_sqr() + q.norm_sqr() > 1e-6 {
                prop_assert!(d > 1.0 / 3.0 + 1e-12);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn simpson_oracle_matches_closed_form(p in arb_amp(2.0), q in arb_amp(2.0)) {
            let spec = CloneMachineSpec::new(p, q, Convention::PaperLiteral).unwrap();
            let numeric = average_hs_distance_simpson(&spec, 10_000);
            prop_assert!((numeric - average_hs_distance(&spec)).abs() < 1e-9);
        }
    }
}
