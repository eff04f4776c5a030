use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::state::StateVector;
use crate::error::{Error, Result};

/// Branches whose squared norm falls below this have no collapsed state.
const NULL_BRANCH: f64 = 1e-30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    Computational,
    Bell,
}

/// The four Bell states, in outcome-index order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    /// Amplitudes over `|00⟩, |01⟩, |10⟩, |11⟩`.
    ///
    /// φ± = (|00⟩ ± |11⟩)/√2 and ψ± = (|01⟩ ± |10⟩)/√2.
    pub fn vector(self) -> [Complex64; 4] {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        match self {
            BellState::PhiPlus => [h, z, z, h],
            BellState::PhiMinus => [h, z, z, -h],
            BellState::PsiPlus => [z, h, h, z],
            BellState::PsiMinus => [z, h, -h, z],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BellState::PhiPlus => "phi+",
            BellState::PhiMinus => "phi-",
            BellState::PsiPlus => "psi+",
            BellState::PsiMinus => "psi-",
        }
    }
}

/// Orthonormal projective basis on `2^k` dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementBasis {
    kind: BasisKind,
    vectors: Vec<Vec<Complex64>>,
}

impl MeasurementBasis {
    pub fn computational(qubits: usize) -> Self {
        let dim = 1usize << qubits;
        let vectors = (0..dim)
            .map(|i| {
                let mut v = vec![Complex64::new(0.0, 0.0); dim];
                v[i] = Complex64::new(1.0, 0.0);
                v
            })
            .collect();
        Self {
            kind: BasisKind::Computational,
            vectors,
        }
    }

    pub fn bell() -> Self {
        Self {
            kind: BasisKind::Bell,
            vectors: BellState::ALL.iter().map(|b| b.vector().to_vec()).collect(),
        }
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    pub fn num_qubits(&self) -> usize {
        self.vectors.len().trailing_zeros() as usize
    }

    /// Largest `|⟨v_i|v_j⟩ − δ_ij|`.
    pub fn orthonormality_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, u) in self.vectors.iter().enumerate() {
            for (j, v) in self.vectors.iter().enumerate() {
                let mut ip: Complex64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
                if i == j {
                    ip -= 1.0;
                }
                worst = worst.max(ip.norm());
            }
        }
        worst
    }
}

/// One measurement outcome.
///
/// `branch` is the unnormalized residual state over the unmeasured qubits,
/// `⟨v|ψ⟩`; its squared norm is the outcome probability. `collapsed` is the
/// normalized residual, absent for null branches.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    pub basis: BasisKind,
    pub targets: Vec<String>,
    pub outcome: usize,
    pub probability: f64,
    pub branch: StateVector,
    pub collapsed: Option<StateVector>,
}

fn validate(state: &StateVector, basis: &MeasurementBasis, targets: &[&str]) -> Result<()> {
    if basis.vectors.len() != 1usize << targets.len() {
        return Err(Error::InvalidBasis(format!(
            "basis of dimension {} cannot measure {} qubit(s)",
            basis.vectors.len(),
            targets.len()
        )));
    }
    if state.is_normalized() {
        let norm_sqr = state.norm_sqr();
        if (norm_sqr - 1.0).abs() > super::state::NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr });
        }
    }
    Ok(())
}

/// Every outcome with its probability and collapsed residual state.
///
/// For states flagged unnormalized the probabilities are the raw squared
/// branch norms and need not sum to one.
pub fn enumerate_outcomes(
    state: &StateVector,
    basis: &MeasurementBasis,
    targets: &[&str],
) -> Result<Vec<MeasurementRecord>> {
    validate(state, basis, targets)?;
    // Put targets first so each block of the amplitude vector is one target index.
    let rest: Vec<&str> = state
        .labels()
        .iter()
        .map(String::as_str)
        .filter(|l| !targets.contains(l))
        .collect();
    let mut order: Vec<&str> = targets.to_vec();
    order.extend(&rest);
    let arranged = state.permuted(&order)?;
    let amps = arranged.amplitudes();
    let rest_dim = 1usize << rest.len();
    let rest_labels: Vec<String> = rest.iter().map(|s| s.to_string()).collect();

    let mut records = Vec::with_capacity(basis.vectors.len());
    for (outcome, v) in basis.vectors.iter().enumerate() {
        let residual: Vec<Complex64> = (0..rest_dim)
            .map(|r| {
                v.iter()
                    .enumerate()
                    .map(|(t, c)| c.conj() * amps[t * rest_dim + r])
                    .sum()
            })
            .collect();
        let branch = StateVector::from_parts(rest_labels.clone(), residual, false);
        let probability = branch.norm_sqr();
        let collapsed = if probability > NULL_BRANCH {
            Some(branch.normalize()?)
        } else {
            None
        };
        records.push(MeasurementRecord {
            basis: basis.kind,
            targets: targets.iter().map(|s| s.to_string()).collect(),
            outcome,
            probability,
            branch,
            collapsed,
        });
    }
    Ok(records)
}

/// Samples one outcome using the caller's generator.
pub fn measure<R: Rng + ?Sized>(
    state: &StateVector,
    basis: &MeasurementBasis,
    targets: &[&str],
    rng: &mut R,
) -> Result<MeasurementRecord> {
    if !state.is_normalized() {
        return Err(Error::NotNormalized {
            norm_sqr: state.norm_sqr(),
        });
    }
    let records = enumerate_outcomes(state, basis, targets)?;
    Ok(sample_record(records, rng))
}

/// Draws from a list of records by their probabilities.
pub(crate) fn sample_record<R: Rng + ?Sized>(
    mut records: Vec<MeasurementRecord>,
    rng: &mut R,
) -> MeasurementRecord {
    let total: f64 = records.iter().map(|r| r.probability).sum();
    let u: f64 = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut chosen = None;
    for (i, r) in records.iter().enumerate() {
        if r.probability <= NULL_BRANCH {
            continue;
        }
        chosen = Some(i);
        acc += r.probability;
        if u < acc {
            break;
        }
    }
    records.swap_remove(chosen.expect("at least one outcome has non-zero probability"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn bell_basis_is_orthonormal() {
        assert!(MeasurementBasis::bell().orthonormality_deviation() < 1e-15);
        assert!(MeasurementBasis::computational(3).orthonormality_deviation() == 0.0);
    }

    #[test]
    fn bell_measurement_of_zero_zero() {
        let s = StateVector::basis(["a", "b"], 0).unwrap();
        let rec = enumerate_outcomes(&s, &MeasurementBasis::bell(), &["a", "b"]).unwrap();
        let p: Vec<f64> = rec.iter().map(|r| r.probability).collect();
        assert!((p[0] - 0.5).abs() < 1e-15);
        assert!((p[1] - 0.5).abs() < 1e-15);
        assert_eq!(p[2], 0.0);
        assert_eq!(p[3], 0.0);
        assert!(rec[2].collapsed.is_none());
    }

    #[test]
    fn computational_measurement_of_plus() {
        let h = FRAC_1_SQRT_2;
        let s = StateVector::qubit("q", c(h), c(h)).unwrap();
        let rec = enumerate_outcomes(&s, &MeasurementBasis::computational(1), &["q"]).unwrap();
        assert!((rec[0].probability - 0.5).abs() < 1e-15);
        assert!((rec[1].probability - 0.5).abs() < 1e-15);
        assert_eq!(rec[0].collapsed.as_ref().unwrap().num_qubits(), 0);
    }

    #[test]
    fn collapsed_residual_tracks_remaining_qubits() {
        // (|0⟩_a|1⟩_b + |1⟩_a|0⟩_b)/√2, measure a: outcome 0 leaves b in |1⟩.
        let h = FRAC_1_SQRT_2;
        let s = StateVector::new(["a", "b"], vec![c(0.0), c(h), c(h), c(0.0)]).unwrap();
        let rec = enumerate_outcomes(&s, &MeasurementBasis::computational(1), &["a"]).unwrap();
        let b = rec[0].collapsed.as_ref().unwrap();
        assert_eq!(b.labels(), &["b"]);
        assert!((b.amplitude(1) - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn measuring_a_non_leading_qubit() {
        // |01⟩ over (a, b): measuring b gives 1 with certainty, leaving a = |0⟩.
        let s = StateVector::basis(["a", "b"], 1).unwrap();
        let rec = enumerate_outcomes(&s, &MeasurementBasis::computational(1), &["b"]).unwrap();
        assert_eq!(rec[1].probability, 1.0);
        assert_eq!(rec[1].collapsed.as_ref().unwrap().amplitude(0), c(1.0));
    }

    #[test]
    fn unnormalized_mode_reads_raw_weights() {
        let s = StateVector::unnormalized(["q"], vec![c(1.0), c(1.0)]).unwrap();
        let rec = enumerate_outcomes(&s, &MeasurementBasis::computational(1), &["q"]).unwrap();
        assert_eq!(rec[0].probability, 1.0);
        assert_eq!(rec[1].probability, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(measure(&s, &MeasurementBasis::computational(1), &["q"], &mut rng).is_err());
    }

    #[test]
    fn basis_size_must_match_targets() {
        let s = StateVector::basis(["a", "b"], 0).unwrap();
        assert!(matches!(
            enumerate_outcomes(&s, &MeasurementBasis::bell(), &["a"]),
            Err(Error::InvalidBasis(_))
        ));
    }

    #[test]
    fn sampling_is_reproducible() {
        let s = StateVector::new(["a", "b"], vec![c(0.5), c(0.5), c(0.5), c(0.5)]).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..32)
                .map(|_| {
                    measure(&s, &MeasurementBasis::bell(), &["a", "b"], &mut rng)
                        .unwrap()
                        .outcome
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(7), draw(7));
    }
}
