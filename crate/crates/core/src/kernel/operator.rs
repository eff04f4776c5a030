use num_complex::Complex64;

use super::state::StateVector;
use crate::error::{Error, Result};

/// Tolerance on `U†U = I` accepted by [`apply_on`].
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// Dense square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl Operator {
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(Self { dim, entries })
    }

    pub fn from_real(dim: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), dim * dim);
        Self {
            dim,
            entries: values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &Operator) -> Result<Operator> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rhs.dim,
            });
        }
        let n = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                for j in 0..n {
                    entries[i * n + j] += a * rhs.get(k, j);
                }
            }
        }
        Ok(Operator { dim: n, entries })
    }

    /// Largest entry of `|U†U − I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.get(k, i).conj() * self.get(k, j);
                }
                if i == j {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    /// `M|v⟩` for a raw amplitude vector.
    pub fn apply_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

/// Single-qubit gates used by the protocol.
pub mod gates {
    use super::Operator;

    pub fn identity() -> Operator {
        Operator::identity(2)
    }

    pub fn pauli_x() -> Operator {
        Operator::from_real(2, &[0.0, 1.0, 1.0, 0.0])
    }

    pub fn pauli_z() -> Operator {
        Operator::from_real(2, &[1.0, 0.0, 0.0, -1.0])
    }

    /// `σ_z σ_x`: σ_x acts first.
    pub fn pauli_zx() -> Operator {
        Operator::from_real(2, &[0.0, 1.0, -1.0, 0.0])
    }

    pub fn hadamard() -> Operator {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Operator::from_real(2, &[h, h, h, -h])
    }
}

/// Applies a unitary to the listed target qubits. Target order matches the
/// operator's own big-endian index order.
pub fn apply_on(state: &StateVector, op: &Operator, targets: &[&str]) -> Result<StateVector> {
    let k = targets.len();
    if op.dim() != 1usize << k {
        return Err(Error::DimensionMismatch {
            expected: 1usize << k,
            found: op.dim(),
        });
    }
    let deviation = op.unitarity_deviation();
    if deviation > UNITARITY_TOLERANCE {
        return Err(Error::NonUnitary { deviation });
    }
    let shifts = targets
        .iter()
        .map(|t| state.position(t).map(|p| state.shift_of(p)))
        .collect::<Result<Vec<_>>>()?;
    {
        let mut seen = std::collections::HashSet::new();
        for t in targets {
            if !seen.insert(*t) {
                return Err(Error::DuplicateLabel(t.to_string()));
            }
        }
    }
    let mask: usize = shifts.iter().map(|s| 1usize << s).sum();
    let scatter = |sub: usize| -> usize {
        shifts
            .iter()
            .enumerate()
            .map(|(i, s)| ((sub >> (k - 1 - i)) & 1) << s)
            .sum()
    };
    let gather = |index: usize| -> usize {
        shifts
            .iter()
            .enumerate()
            .map(|(i, s)| ((index >> s) & 1) << (k - 1 - i))
            .sum()
    };

    let amps = state.amplitudes();
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for (index, slot) in out.iter_mut().enumerate() {
        let row = gather(index);
        let rest = index & !mask;
        *slot = (0..op.dim())
            .map(|col| op.get(row, col) * amps[rest | scatter(col)])
            .sum();
    }
    Ok(StateVector::from_parts(
        state.labels().to_vec(),
        out,
        state.is_normalized(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn pauli_x_flips() {
        let s = StateVector::basis(["q"], 0).unwrap();
        let t = apply_on(&s, &gates::pauli_x(), &["q"]).unwrap();
        assert_eq!(t.amplitudes(), &[c(0.0), c(1.0)]);
    }

    #[test]
    fn pauli_z_flips_sign_of_one() {
        let s = StateVector::qubit("q", c(0.6), c(-0.8)).unwrap();
        let t = apply_on(&s, &gates::pauli_z(), &["q"]).unwrap();
        assert_eq!(t.amplitudes(), &[c(0.6), c(0.8)]);
    }

    #[test]
    fn identity_is_bit_exact() {
        let s = StateVector::unnormalized(
            ["a", "b"],
            vec![
                Complex64::new(0.1, 0.2),
                Complex64::new(-0.3, 0.4),
                Complex64::new(0.5, -0.1),
                Complex64::new(0.2, 0.3),
            ],
        )
        .unwrap()
        .normalize()
        .unwrap();
        let t = apply_on(&s, &Operator::identity(4), &["b", "a"]).unwrap();
        assert_eq!(s, t);
    }

    #[test]
    fn acts_on_the_named_qubit_only() {
        // X on b of |00⟩ over (a, b, c) gives |010⟩.
        let s = StateVector::basis(["a", "b", "c"], 0).unwrap();
        let t = apply_on(&s, &gates::pauli_x(), &["b"]).unwrap();
        assert_eq!(t.amplitude(0b010), c(1.0));
    }

    #[test]
    fn target_order_follows_operator_index() {
        // CNOT with control listed first.
        let cnot = Operator::from_real(
            4,
            &[
                1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0,
            ],
        );
        let s = StateVector::basis(["a", "b"], 0b01).unwrap(); // a=0, b=1
        let t = apply_on(&s, &cnot, &["b", "a"]).unwrap();
        assert_eq!(t.amplitude(0b11), c(1.0));
    }

    #[test]
    fn rejects_non_unitary_and_unknown_labels() {
        let s = StateVector::basis(["q"], 0).unwrap();
        let bad = Operator::from_real(2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(
            apply_on(&s, &bad, &["q"]),
            Err(Error::NonUnitary { .. })
        ));
        assert!(matches!(
            apply_on(&s, &gates::pauli_x(), &["z"]),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn zx_is_x_then_z() {
        let zx = gates::pauli_z().mul(&gates::pauli_x()).unwrap();
        assert_eq!(zx, gates::pauli_zx());
    }
}
