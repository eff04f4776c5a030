use std::collections::HashSet;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// States whose squared norm is within this distance of 1 are renormalized
/// silently; anything further away is rejected.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

/// Dense state over labelled qubits.
///
/// Amplitudes are indexed big-endian in label order: the first label is the
/// most significant bit of the basis index. A state is either *normalized*
/// (squared norm 1) or explicitly flagged as unnormalized, which is how the
/// image of a non-isometric linear map is carried around.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateVector {
    labels: Vec<String>,
    amps: Vec<Complex64>,
    normalized: bool,
}

fn collect_labels<I, S>(labels: I) -> Result<Vec<String>>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
    let mut seen = HashSet::new();
    for l in &labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    Ok(labels)
}

fn check_finite(amps: &[Complex64]) -> Result<()> {
    match amps.iter().find(|a| !a.re.is_finite() || !a.im.is_finite()) {
        Some(_) => Err(Error::OutOfRange {
            what: "amplitude",
            value: f64::NAN,
        }),
        None => Ok(()),
    }
}

impl StateVector {
    /// Builds a normalized state, renormalizing inputs within
    /// [`NORMALIZATION_TOLERANCE`].
    pub fn new<I, S>(labels: I, amps: Vec<Complex64>) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::unnormalized(labels, amps)?.checked_normalized()
    }

    /// Builds a state flagged as unnormalized; amplitudes are kept verbatim.
    pub fn unnormalized<I, S>(labels: I, amps: Vec<Complex64>) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels = collect_labels(labels)?;
        if amps.len() != 1usize << labels.len() {
            return Err(Error::AmplitudeCount {
                qubits: labels.len(),
                found: amps.len(),
            });
        }
        check_finite(&amps)?;
        Ok(Self {
            labels,
            amps,
            normalized: false,
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis<I, S>(labels: I, index: usize) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels = collect_labels(labels)?;
        let dim = 1usize << labels.len();
        if index >= dim {
            return Err(Error::OutOfRange {
                what: "basis index",
                value: index as f64,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            labels,
            amps,
            normalized: true,
        })
    }

    /// Single qubit `zero|0⟩ + one|1⟩`.
    pub fn qubit(label: impl Into<String>, zero: Complex64, one: Complex64) -> Result<Self> {
        Self::new([label.into()], vec![zero, one])
    }

    /// Renormalizes. Flagged-normalized inputs must already be within
    /// tolerance; unnormalized inputs only need a non-zero norm.
    pub fn normalize(&self) -> Result<Self> {
        let norm_sqr = self.norm_sqr();
        if norm_sqr <= f64::MIN_POSITIVE {
            return Err(Error::NotNormalized { norm_sqr });
        }
        if self.normalized && (norm_sqr - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr });
        }
        let scale = 1.0 / norm_sqr.sqrt();
        Ok(Self {
            labels: self.labels.clone(),
            amps: self.amps.iter().map(|a| a * scale).collect(),
            normalized: true,
        })
    }

    /// Normalizes only if the squared norm is already within tolerance of 1.
    fn checked_normalized(&self) -> Result<Self> {
        let norm_sqr = self.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr });
        }
        self.normalize()
    }

    pub(crate) fn from_parts(labels: Vec<String>, amps: Vec<Complex64>, normalized: bool) -> Self {
        debug_assert_eq!(amps.len(), 1usize << labels.len());
        Self {
            labels,
            amps,
            normalized,
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Position of `label` in the label list.
    pub fn position(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Bit shift of the qubit at `position` inside a basis index.
    pub(crate) fn shift_of(&self, position: usize) -> usize {
        self.labels.len() - 1 - position
    }

    /// `⟨self|other⟩`; label lists must agree.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.labels != other.labels {
            if self.dim() != other.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.dim(),
                    found: other.dim(),
                });
            }
            return Err(Error::UnknownLabel(other.labels.join(",")));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Same amplitudes under new label names.
    pub fn relabel<I, S>(&self, labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels = collect_labels(labels)?;
        if labels.len() != self.labels.len() {
            return Err(Error::WrongQubitCount {
                expected: self.labels.len(),
                found: labels.len(),
            });
        }
        Ok(Self {
            labels,
            amps: self.amps.clone(),
            normalized: self.normalized,
        })
    }

    /// Reorders the qubits so that `order` becomes the label list.
    pub fn permuted(&self, order: &[&str]) -> Result<Self> {
        if order.len() != self.labels.len() {
            return Err(Error::WrongQubitCount {
                expected: self.labels.len(),
                found: order.len(),
            });
        }
        let positions = order
            .iter()
            .map(|l| self.position(l))
            .collect::<Result<Vec<_>>>()?;
        let labels = collect_labels(order.iter().copied())?;
        let n = self.labels.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (new_index, slot) in amps.iter_mut().enumerate() {
            let mut old_index = 0usize;
            for (new_pos, &old_pos) in positions.iter().enumerate() {
                let bit = (new_index >> (n - 1 - new_pos)) & 1;
                old_index |= bit << (n - 1 - old_pos);
            }
            *slot = self.amps[old_index];
        }
        Ok(Self {
            labels,
            amps,
            normalized: self.normalized,
        })
    }

    /// Debug dump: one amplitude per line, `index<TAB>re<TAB>im`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.amps.iter().enumerate() {
            let _ = writeln!(out, "{i}\t{}\t{}", a.re, a.im);
        }
        out
    }

    /// Largest amplitude difference after removing the global phase that
    /// best aligns `other` with `self`.
    pub fn distance_up_to_phase(&self, other: &StateVector) -> Result<f64> {
        let overlap = self.inner(other)?;
        let phase = if overlap.norm() > 0.0 {
            overlap.conj() / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b * phase).norm())
            .fold(0.0, f64::max))
    }
}

/// Kronecker product in the given order.
pub fn tensor(states: &[&StateVector]) -> Result<StateVector> {
    let mut labels = Vec::new();
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    let mut normalized = true;
    for s in states {
        labels.extend(s.labels.iter().cloned());
        normalized &= s.normalized;
        let mut next = Vec::with_capacity(amps.len() * s.amps.len());
        for a in &amps {
            for b in &s.amps {
                next.push(a * b);
            }
        }
        amps = next;
    }
    let labels = collect_labels(labels)?;
    Ok(StateVector {
        labels,
        amps,
        normalized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn tensor_of_basis_states() {
        let zero = StateVector::basis(["a"], 0).unwrap();
        let one = StateVector::basis(["b"], 1).unwrap();
        let s = tensor(&[&zero, &one]).unwrap();
        assert_eq!(s.labels(), &["a", "b"]);
        assert_eq!(s.amplitude(1), c(1.0, 0.0));
        assert_eq!(s.norm_sqr(), 1.0);
    }

    #[test]
    fn tensor_is_linear_in_first_factor() {
        let (a, b) = (c(0.6, 0.0), c(0.0, 0.8));
        let q = StateVector::qubit("x", a, b).unwrap();
        let zero = StateVector::basis(["y"], 0).unwrap();
        let s = tensor(&[&q, &zero]).unwrap();
        assert_eq!(s.amplitudes(), &[a, c(0.0, 0.0), b, c(0.0, 0.0)]);
    }

    #[test]
    fn duplicate_labels_rejected() {
        let a = StateVector::basis(["q"], 0).unwrap();
        assert!(matches!(tensor(&[&a, &a]), Err(Error::DuplicateLabel(_))));
        assert!(matches!(
            StateVector::basis(["q", "q"], 0),
            Err(Error::DuplicateLabel(_))
        ));
    }

    #[test]
    fn near_normalized_input_is_renormalized() {
        let s = StateVector::new(["q"], vec![c(0.6000001, 0.0), c(0.8, 0.0)]).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        assert!(StateVector::new(["q"], vec![c(0.7, 0.0), c(0.8, 0.0)]).is_err());
    }

    #[test]
    fn unnormalized_states_keep_their_norm() {
        let s = StateVector::unnormalized(["q"], vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(!s.is_normalized());
        assert_eq!(s.norm_sqr(), 2.0);
        let n = s.normalize().unwrap();
        assert!(n.is_normalized());
        assert!((n.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn permutation_moves_bits() {
        // |01⟩ over (a, b) is |10⟩ over (b, a).
        let s = StateVector::basis(["a", "b"], 1).unwrap();
        let p = s.permuted(&["b", "a"]).unwrap();
        assert_eq!(p.amplitude(2), c(1.0, 0.0));
    }

    #[test]
    fn dump_format() {
        let s = StateVector::basis(["a"], 1).unwrap();
        assert_eq!(s.dump(), "0\t0\t0\n1\t1\t0\n");
    }
}
