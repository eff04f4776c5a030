use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::run::ProtocolTree;
use super::types::{SecretState, WStateParams};
use crate::cloning::Convention;
use crate::error::{Error, Result};
use crate::kernel::BellState;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    /// `4|α|²|γ|²`.
    Analytic,
    /// Exact sum over every branch.
    Enumerate(Convention),
    MonteCarlo {
        convention: Convention,
        shots: u64,
        seed: u64,
    },
}

/// Success probability. The secret defaults to `(|0⟩ + |1⟩)/√2` when a
/// state-dependent method is used without one.
pub fn success_probability(
    w: &WStateParams,
    method: Method,
    secret: Option<&SecretState>,
) -> Result<f64> {
    let secret = secret.copied().unwrap_or_else(SecretState::balanced);
    match method {
        Method::Analytic => Ok(analytic(w)),
        Method::Enumerate(convention) => {
            Ok(ProtocolTree::build(&secret, w, convention)?.success_probability())
        }
        Method::MonteCarlo {
            convention,
            shots,
            seed,
        } => Ok(monte_carlo(&secret, w, convention, shots, seed)?.estimate),
    }
}

pub fn analytic(w: &WStateParams) -> f64 {
    4.0 * w.alpha.norm_sqr() * w.gamma.norm_sqr()
}

/// Success probability under the isometric cloner,
/// `2|α|²|γ|²(1/(1+2|α|²) + 1/(1+2|γ|²))`. Independent of the secret.
pub fn physical_closed_form(w: &WStateParams) -> f64 {
    let (a2, _, g2) = w.squares();
    2.0 * a2 * g2 * (1.0 / (1.0 + 2.0 * a2) + 1.0 / (1.0 + 2.0 * g2))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub shots: u64,
    pub successes: u64,
    pub estimate: f64,
    /// Binomial standard error of `estimate`.
    pub std_error: f64,
}

/// Samples `shots` independent attempts; shot `i` uses seed `seed ^ i`.
pub fn monte_carlo(
    secret: &SecretState,
    w: &WStateParams,
    convention: Convention,
    shots: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if shots == 0 {
        return Err(Error::InvalidConfig(
            "monte carlo needs at least one shot".into(),
        ));
    }
    let tree = ProtocolTree::build(secret, w, convention)?;
    let successes: u64 = (0..shots)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i);
            u64::from(tree.sample(&mut rng).succeeded(&tree))
        })
        .sum();
    let estimate = successes as f64 / shots as f64;
    Ok(MonteCarloEstimate {
        shots,
        successes,
        estimate,
        std_error: (estimate * (1.0 - estimate) / shots as f64).sqrt(),
    })
}

/// One leaf of the protocol tree.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Branch {
    pub alice: BellState,
    pub bob: u8,
    /// `None` when Bob's outcome ends the attempt.
    pub charlie: Option<BellState>,
    pub probability: f64,
    /// Recovered fidelity on decodable leaves.
    pub fidelity: Option<f64>,
}

pub fn enumerate_branches(
    secret: &SecretState,
    w: &WStateParams,
    convention: Convention,
) -> Result<Vec<Branch>> {
    let tree = ProtocolTree::build(secret, w, convention)?;
    let mut out = Vec::new();
    for node in &tree.alice {
        out.push(Branch {
            alice: node.bell,
            bob: 1,
            charlie: None,
            probability: node.probability * (1.0 - node.bob_zero),
            fidelity: None,
        });
        for leaf in &node.charlie {
            out.push(Branch {
                alice: node.bell,
                bob: 0,
                charlie: Some(leaf.bell),
                probability: node.probability * node.bob_zero * leaf.weight,
                fidelity: leaf.fidelity,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn reference_values() {
        let w = WStateParams::from_squares(0.25, 0.5, 0.25).unwrap();
        assert_relative_eq!(analytic(&w), 0.25, epsilon = 1e-15);
        let e = success_probability(&w, Method::Enumerate(Convention::PaperLiteral), None).unwrap();
        assert_relative_eq!(e, 0.25, epsilon = 1e-12);

        let w = WStateParams::balanced();
        let e = success_probability(&w, Method::Enumerate(Convention::PaperLiteral), None).unwrap();
        assert_relative_eq!(e, 4.0 / 9.0, epsilon = 1e-12);

        let w = WStateParams::from_squares(0.0, 1.0, 0.0).unwrap();
        assert_eq!(analytic(&w), 0.0);
    }

    #[test]
    fn physical_is_smaller_at_balanced_w() {
        let w = WStateParams::balanced();
        let lit =
            success_probability(&w, Method::Enumerate(Convention::PaperLiteral), None).unwrap();
        let phys =
            success_probability(&w, Method::Enumerate(Convention::PhysicalIsometry), None).unwrap();
        assert!(phys < lit - 1e-3);
        assert_relative_eq!(phys, 4.0 / 15.0, epsilon = 1e-12);
        assert_relative_eq!(physical_closed_form(&w), 4.0 / 15.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_zero_shots() {
        let w = WStateParams::balanced();
        assert!(monte_carlo(&SecretState::balanced(), &w, Convention::PaperLiteral, 0, 1).is_err());
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let w = WStateParams::balanced();
        let s = SecretState::balanced();
        let a = monte_carlo(&s, &w, Convention::PaperLiteral, 2000, 9).unwrap();
        let b = monte_carlo(&s, &w, Convention::PaperLiteral, 2000, 9).unwrap();
        assert_eq!(a, b);
    }

    fn arb_w() -> impl Strategy<Value = WStateParams> {
        (
            0.0f64..1.0,
            0.0f64..1.0,
            0.0f64..1.0,
            prop::array::uniform3(0.0..std::f64::consts::TAU),
        )
            .prop_filter("non-degenerate", |(x, y, z, _)| x + y + z > 1e-3)
            .prop_map(|(x, y, z, ph)| {
                let n = x + y + z;
                WStateParams::new(
                    num_complex::Complex64::from_polar((x / n).sqrt(), ph[0]),
                    num_complex::Complex64::from_polar((y / n).sqrt(), ph[1]),
                    num_complex::Complex64::from_polar((z / n).sqrt(), ph[2]),
                )
                .unwrap()
            })
    }

    fn arb_secret() -> impl Strategy<Value = SecretState> {
        (
            0.0f64..=1.0,
            0.0..std::f64::consts::TAU,
            0.0..std::f64::consts::TAU,
        )
            .prop_map(|(m, a, b)| {
                SecretState::new(
                    num_complex::Complex64::from_polar(m.sqrt(), a),
                    num_complex::Complex64::from_polar((1.0 - m).sqrt(), b),
                )
                .unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn paper_literal_enumeration_is_closed_form(w in arb_w(), secrets in prop::collection::vec(arb_secret(), 10)) {
            let expected = analytic(&w);
            for s in &secrets {
                let e = success_probability(&w, Method::Enumerate(Convention::PaperLiteral), Some(s)).unwrap();
                prop_assert!((e - expected).abs() < 1e-12);
            }
        }

        #[test]
        fn physical_enumeration_is_closed_form(w in arb_w(), s in arb_secret()) {
            let e = success_probability(&w, Method::Enumerate(Convention::PhysicalIsometry), Some(&s)).unwrap();
            prop_assert!((e - physical_closed_form(&w)).abs() < 1e-12);
        }

        #[test]
        fn physical_branches_sum_to_one(w in arb_w(), s in arb_secret()) {
            let total: f64 = enumerate_branches(&s, &w, Convention::PhysicalIsometry)
                .unwrap()
                .iter()
                .map(|b| b.probability)
                .sum();
            prop_assert!((total - 1.0).abs() < 1e-10);
        }

        #[test]
        fn paper_literal_success_recovers_secret(w in arb_w(), s in arb_secret()) {
            for b in enumerate_branches(&s, &w, Convention::PaperLiteral).unwrap() {
                if b.charlie == Some(BellState::PsiPlus) && b.probability > 0.0 {
                    prop_assert!((b.fidelity.unwrap() - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}
