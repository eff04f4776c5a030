use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{c2_b, fill_bounds};

const BRACKET_EPS: f64 = 1e-9;
const BISECTION_WIDTH: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootMethod {
    Numeric,
    PaperClosedForm,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootReport {
    pub method: RootMethod,
    pub ps: f64,
    /// `ps³ + c ps² − k` at the returned root.
    pub residual: f64,
}

/// Intermediate quantities of the printed Cardano reduction.
///
/// `u3`/`v3` are the roots of the resolvent quadratic; `paper_root` is their
/// plain sum, as printed, with no cube roots and no shift by `a1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CardanoTrace {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub h: f64,
    pub g: f64,
    pub discriminant: f64,
    pub u3: f64,
    pub v3: f64,
    pub paper_root: f64,
}

impl CardanoTrace {
    pub fn new(fill: f64, beta_sq: f64) -> Self {
        let c = c2_b(beta_sq);
        let k = constant_term(fill, beta_sq);
        let (a0, a1, a2, a3) = (1.0, c / 3.0, 0.0, -k);
        let h = a0 * a2 - a1 * a1;
        let g = a0 * a0 * a3 - 3.0 * a0 * a1 * a2 + 2.0 * a1.powi(3);
        let f4 = fill.powi(4);
        let b4 = beta_sq * beta_sq;
        let discriminant = 9.0 / 4096.0 * f4 * f4 / (b4 * b4) - 12.0 / 1728.0 * f4 / b4 * c.powi(3);
        let lead = 3.0 * f4 / (64.0 * b4) - 2.0 / 27.0 * c.powi(3);
        let root = discriminant.max(0.0).sqrt();
        let u3 = (lead + root) / 2.0;
        let v3 = (lead - root) / 2.0;
        let paper_root =
            3.0 / 64.0 * f4 / b4 - 128.0 / 27.0 * beta_sq.powi(3) * (1.0 - beta_sq).powi(3);
        Self {
            a0,
            a1,
            a2,
            a3,
            h,
            g,
            discriminant,
            u3,
            v3,
            paper_root,
        }
    }

    /// The real root with cube roots taken and the `a1` shift applied.
    pub fn corrected_root(&self) -> f64 {
        if self.discriminant >= 0.0 {
            self.u3.cbrt() + self.v3.cbrt() - self.a1
        } else {
            // Three real roots: the trigonometric form, largest branch.
            let r = (-self.h).sqrt();
            let phi = (-self.g / (2.0 * r.powi(3))).clamp(-1.0, 1.0).acos();
            2.0 * r * (phi / 3.0).cos() - self.a1
        }
    }
}

fn constant_term(fill: f64, beta_sq: f64) -> f64 {
    3.0 * fill.powi(4) / (64.0 * beta_sq * beta_sq)
}

/// `P³ + 4β²(1−β²)P² − 3F⁴/(64β⁴)`.
pub fn cubic_residual(ps: f64, fill: f64, beta_sq: f64) -> f64 {
    ps.powi(3) + c2_b(beta_sq) * ps * ps - constant_term(fill, beta_sq)
}

fn check_inputs(fill: f64, beta_sq: f64) -> Result<()> {
    if !(fill >= 0.0 && fill.is_finite()) {
        return Err(Error::OutOfRange {
            what: "fill",
            value: fill,
        });
    }
    if !(beta_sq > 0.0 && beta_sq < 1.0) {
        return Err(Error::OutOfRange {
            what: "beta^2",
            value: beta_sq,
        });
    }
    Ok(())
}

pub fn ps_from_fill(fill: f64, beta_sq: f64, method: RootMethod) -> Result<RootReport> {
    check_inputs(fill, beta_sq)?;
    let ps = match method {
        RootMethod::Numeric => numeric_root(fill, beta_sq)?,
        RootMethod::PaperClosedForm => CardanoTrace::new(fill, beta_sq).paper_root,
    };
    Ok(RootReport {
        method,
        ps,
        residual: cubic_residual(ps, fill, beta_sq),
    })
}

fn numeric_root(fill: f64, beta_sq: f64) -> Result<f64> {
    let f = |p: f64| cubic_residual(p, fill, beta_sq);
    let (mut lo, mut hi) = (0.0, 1.0 + BRACKET_EPS);
    if f(lo) >= 0.0 {
        return Ok(0.0);
    }
    if f(hi) < 0.0 {
        let (lower, upper) = fill_bounds(beta_sq);
        return Err(Error::FillOutOfRange {
            fill,
            beta_sq,
            lower,
            upper,
        });
    }
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut p = 0.5 * (lo + hi);
    let slope = 3.0 * p * p + 2.0 * c2_b(beta_sq) * p;
    if slope > 0.0 {
        let polished = p - f(p) / slope;
        if polished.abs() <= hi + BISECTION_WIDTH && f(polished).abs() <= f(p).abs() {
            p = polished;
        }
    }
    Ok(p.min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tradeoff::fill_from_ps;
    use proptest::prelude::*;

    #[test]
    fn round_trip_example() {
        let f = fill_from_ps(0.81, 0.1);
        let r = ps_from_fill(f, 0.1, RootMethod::Numeric).unwrap();
        assert!((r.ps - 0.81).abs() < 1e-8);
        assert!(r.residual.abs() <= 1e-12);
    }

    #[test]
    fn printed_closed_form_misses_the_root() {
        let f = fill_from_ps(0.81, 0.1);
        let r = ps_from_fill(f, 0.1, RootMethod::PaperClosedForm).unwrap();
        assert!((r.ps - 0.76418).abs() < 1e-4, "{}", r.ps);
        assert!(r.residual.abs() > 1e-3);
        assert!((r.residual + 0.1111).abs() < 1e-3, "{}", r.residual);
        let t = CardanoTrace::new(f, 0.1);
        assert!((t.paper_root + t.g).abs() < 1e-12);
        assert!((t.u3 + t.v3 + t.g).abs() < 1e-12);
        assert!((t.corrected_root() - 0.81).abs() < 1e-9);
    }

    #[test]
    fn printed_discriminant_is_the_resolvent_one() {
        let t = CardanoTrace::new(0.5, 0.12);
        let exact = t.g * t.g + 4.0 * t.h.powi(3);
        assert!((t.discriminant - exact).abs() < 1e-12);
        assert!((t.u3 * t.v3 + t.h.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn lower_bound_root() {
        let (lower, _) = fill_bounds(0.1);
        assert!((lower - 0.19596).abs() < 1e-5);
        let r = ps_from_fill(lower, 0.1, RootMethod::Numeric).unwrap();
        assert!((r.ps - 0.12).abs() < 1e-9, "{}", r.ps);
    }

    #[test]
    fn zero_fill_and_bad_inputs() {
        assert_eq!(ps_from_fill(0.0, 0.1, RootMethod::Numeric).unwrap().ps, 0.0);
        assert!(ps_from_fill(-0.1, 0.1, RootMethod::Numeric).is_err());
        assert!(ps_from_fill(0.5, 0.0, RootMethod::Numeric).is_err());
        assert!(matches!(
            ps_from_fill(0.99, 0.1, RootMethod::Numeric),
            Err(Error::FillOutOfRange { .. })
        ));
    }

    #[test]
    fn residual_grid() {
        for i in 1..=50 {
            let b = 0.17 * i as f64 / 50.0;
            let top = fill_from_ps(1.0, b);
            for j in 1..=50 {
                let f = top * j as f64 / 50.0;
                let r = ps_from_fill(f, b, RootMethod::Numeric).unwrap();
                assert!(r.residual.abs() <= 1e-12, "b={b} f={f} res={}", r.residual);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]
        #[test]
        fn inversion(p in 0.0f64..1.0, b in 1e-3f64..0.17) {
            let f = fill_from_ps(p, b);
            let r = ps_from_fill(f, b, RootMethod::Numeric).unwrap();
            prop_assert!((r.ps - p).abs() <= 1e-8, "p={} got={}", p, r.ps);
        }

        #[test]
        fn monotone_in_fill(b in 1e-3f64..0.17, x in 0.01f64..0.98) {
            let top = fill_from_ps(1.0, b);
            let f1 = top * x;
            let f2 = top * (x + 0.01);
            let p1 = ps_from_fill(f1, b, RootMethod::Numeric).unwrap().ps;
            let p2 = ps_from_fill(f2, b, RootMethod::Numeric).unwrap().ps;
            prop_assert!(p2 > p1);
        }

        #[test]
        fn corrected_cardano_agrees(p in 0.01f64..1.0, b in 1e-2f64..0.17) {
            let f = fill_from_ps(p, b);
            let t = CardanoTrace::new(f, b);
            prop_assert!((t.corrected_root() - p).abs() < 1e-7);
        }
    }
}
