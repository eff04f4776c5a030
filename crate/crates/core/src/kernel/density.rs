use num_complex::Complex64;
use serde::Serialize;

use super::state::StateVector;
use crate::error::{Error, Result};

/// Dense density operator over labelled qubits, row-major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityMatrix {
    labels: Vec<String>,
    dim: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn from_entries(labels: Vec<String>, entries: Vec<Complex64>) -> Result<Self> {
        let dim = 1usize << labels.len();
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self {
            labels,
            dim,
            entries,
        })
    }

    /// Diagonal operator with the given real entries.
    pub fn diagonal(labels: Vec<String>, diag: &[f64]) -> Result<Self> {
        let dim = diag.len();
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (i, d) in diag.iter().enumerate() {
            entries[i * dim + i] = Complex64::new(*d, 0.0);
        }
        Self::from_entries(labels, entries)
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(state: &StateVector) -> Self {
        let amps = state.amplitudes();
        let dim = amps.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for a in amps {
            for b in amps {
                entries.push(a * b.conj());
            }
        }
        Self {
            labels: state.labels().to_vec(),
            dim,
            entries,
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest `|ρ_ij − conj(ρ_ji)|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Result<f64> {
        same_dim(self, other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Determinant of a single-qubit operator.
    pub fn det2(&self) -> Result<Complex64> {
        if self.dim != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.dim,
            });
        }
        Ok(self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0))
    }

    /// Traces out every qubit not listed in `keep`; the result is ordered
    /// as `keep`.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityMatrix> {
        let layout = TraceLayout::new(&self.labels, keep)?;
        let kd = 1usize << keep.len();
        let rd = 1usize << (self.labels.len() - keep.len());
        let mut entries = vec![Complex64::new(0.0, 0.0); kd * kd];
        for i in 0..kd {
            for j in 0..kd {
                let mut acc = Complex64::new(0.0, 0.0);
                for r in 0..rd {
                    acc += self.get(layout.index(i, r), layout.index(j, r));
                }
                entries[i * kd + j] = acc;
            }
        }
        Ok(DensityMatrix {
            labels: keep.iter().map(|s| s.to_string()).collect(),
            dim: kd,
            entries,
        })
    }
}

fn same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    Ok(())
}

/// Maps (kept index, rest index) pairs to a full basis index.
struct TraceLayout {
    keep_shifts: Vec<usize>,
    rest_shifts: Vec<usize>,
}

impl TraceLayout {
    fn new(labels: &[String], keep: &[&str]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::EmptyKeep);
        }
        let n = labels.len();
        let mut keep_shifts = Vec::with_capacity(keep.len());
        for k in keep {
            let pos = labels
                .iter()
                .position(|l| l == k)
                .ok_or_else(|| Error::UnknownLabel(k.to_string()))?;
            let shift = n - 1 - pos;
            if keep_shifts.contains(&shift) {
                return Err(Error::DuplicateLabel(k.to_string()));
            }
            keep_shifts.push(shift);
        }
        let rest_shifts = (0..n)
            .map(|pos| n - 1 - pos)
            .filter(|s| !keep_shifts.contains(s))
            .collect();
        Ok(Self {
            keep_shifts,
            rest_shifts,
        })
    }

    fn index(&self, kept: usize, rest: usize) -> usize {
        let scatter = |sub: usize, shifts: &[usize]| -> usize {
            let k = shifts.len();
            shifts
                .iter()
                .enumerate()
                .map(|(i, s)| ((sub >> (k - 1 - i)) & 1) << s)
                .sum()
        };
        scatter(kept, &self.keep_shifts) | scatter(rest, &self.rest_shifts)
    }
}

/// Reduced density operator of a pure (possibly unnormalized) state.
pub fn partial_trace(state: &StateVector, keep: &[&str]) -> Result<DensityMatrix> {
    let labels = state.labels();
    let layout = TraceLayout::new(labels, keep)?;
    let amps = state.amplitudes();
    let kd = 1usize << keep.len();
    let rd = 1usize << (labels.len() - keep.len());
    let mut entries = vec![Complex64::new(0.0, 0.0); kd * kd];
    for r in 0..rd {
        for i in 0..kd {
            let a = amps[layout.index(i, r)];
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..kd {
                entries[i * kd + j] += a * amps[layout.index(j, r)].conj();
            }
        }
    }
    Ok(DensityMatrix {
        labels: keep.iter().map(|s| s.to_string()).collect(),
        dim: kd,
        entries,
    })
}

/// Hilbert–Schmidt distance `Tr[(ρ−σ)(ρ−σ)†]`.
pub fn hs_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    Ok(rho
        .entries
        .iter()
        .zip(&sigma.entries)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum())
}

/// `|⟨pure|other⟩|²`.
pub fn fidelity(pure: &StateVector, other: &StateVector) -> Result<f64> {
    if pure.dim() != other.dim() {
        return Err(Error::DimensionMismatch {
            expected: pure.dim(),
            found: other.dim(),
        });
    }
    let overlap: Complex64 = pure
        .amplitudes()
        .iter()
        .zip(other.amplitudes())
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(overlap.norm_sqr())
}

/// `⟨pure|ρ|pure⟩`.
pub fn fidelity_mixed(pure: &StateVector, rho: &DensityMatrix) -> Result<f64> {
    if pure.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: pure.dim(),
            found: rho.dim(),
        });
    }
    let amps = pure.amplitudes();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..rho.dim() {
        for j in 0..rho.dim() {
            acc += amps[i].conj() * rho.get(i, j) * amps[j];
        }
    }
    Ok(acc.re)
}
