use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use crate::cloning::Convention;
use crate::error::{Error, Result};
use crate::kernel::{gates, BellState, Operator, StateVector};

const PARAM_TOLERANCE: f64 = 1e-9;

fn check_unit(norm_sqr: f64) -> Result<()> {
    if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > PARAM_TOLERANCE {
        return Err(Error::NotNormalized { norm_sqr });
    }
    Ok(())
}

/// Alice's secret `a|0⟩ + b|1⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecretState {
    pub a: Complex64,
    pub b: Complex64,
}

impl SecretState {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        check_unit(a.norm_sqr() + b.norm_sqr())?;
        Ok(Self { a, b })
    }

    pub fn real(a: f64, b: f64) -> Result<Self> {
        Self::new(Complex64::new(a, 0.0), Complex64::new(b, 0.0))
    }

    /// `(|0⟩ + |1⟩)/√2`.
    pub fn balanced() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            a: Complex64::new(h, 0.0),
            b: Complex64::new(h, 0.0),
        }
    }

    pub fn state(&self, label: &str) -> StateVector {
        StateVector::qubit(label, self.a, self.b).expect("secret is normalized")
    }
}

/// Shared state `α|001⟩ + β|010⟩ + γ|100⟩` over `(A, B, C)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WStateParams {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
}

impl WStateParams {
    pub fn new(alpha: Complex64, beta: Complex64, gamma: Complex64) -> Result<Self> {
        check_unit(alpha.norm_sqr() + beta.norm_sqr() + gamma.norm_sqr())?;
        Ok(Self { alpha, beta, gamma })
    }

    /// Real non-negative amplitudes from squared magnitudes.
    pub fn from_squares(alpha_sq: f64, beta_sq: f64, gamma_sq: f64) -> Result<Self> {
        for (what, v) in [
            ("alpha^2", alpha_sq),
            ("beta^2", beta_sq),
            ("gamma^2", gamma_sq),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange { what, value: v });
            }
        }
        let r = |v: f64| Complex64::new(v.sqrt(), 0.0);
        Self::new(r(alpha_sq), r(beta_sq), r(gamma_sq))
    }

    pub fn balanced() -> Self {
        let t = (1.0f64 / 3.0).sqrt();
        let r = Complex64::new(t, 0.0);
        Self {
            alpha: r,
            beta: r,
            gamma: r,
        }
    }

    pub fn squares(&self) -> (f64, f64, f64) {
        (
            self.alpha.norm_sqr(),
            self.beta.norm_sqr(),
            self.gamma.norm_sqr(),
        )
    }

    /// The three-qubit state over the given labels, first label carrying γ.
    pub fn state(&self, labels: [&str; 3]) -> StateVector {
        let z = Complex64::new(0.0, 0.0);
        let mut amps = vec![z; 8];
        amps[0b001] = self.alpha;
        amps[0b010] = self.beta;
        amps[0b100] = self.gamma;
        StateVector::new(labels, amps).expect("W parameters are normalized")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    Alice,
    Bob,
    Charlie,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::Alice => "alice",
            Party::Bob => "bob",
            Party::Charlie => "charlie",
        })
    }
}

/// Two classical bits, first bit most significant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bits(u8);

impl Bits {
    pub fn new(value: u8) -> Result<Self> {
        if value > 0b11 {
            return Err(Error::UnknownBits(value));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// Codebook: φ+ ↔ 00, φ− ↔ 11, ψ+ ↔ 01, ψ− ↔ 10.
    pub fn from_bell(outcome: BellState) -> Self {
        Self(match outcome {
            BellState::PhiPlus => 0b00,
            BellState::PhiMinus => 0b11,
            BellState::PsiPlus => 0b01,
            BellState::PsiMinus => 0b10,
        })
    }

    pub fn to_bell(self) -> BellState {
        match self.0 {
            0b00 => BellState::PhiPlus,
            0b11 => BellState::PhiMinus,
            0b01 => BellState::PsiPlus,
            _ => BellState::PsiMinus,
        }
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02b}", self.0)
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "00" => Ok(Self(0b00)),
            "01" => Ok(Self(0b01)),
            "10" => Ok(Self(0b10)),
            "11" => Ok(Self(0b11)),
            _ => Err(Error::InvalidConfig(format!(
                "`{s}` is not a two-bit string"
            ))),
        }
    }
}

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClassicalMessage {
    pub from: Party,
    pub to: Party,
    pub bits: Bits,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliCorrection {
    I,
    X,
    Z,
    /// σ_x first, then σ_z.
    ZX,
}

impl PauliCorrection {
    pub const ALL: [PauliCorrection; 4] = [
        PauliCorrection::I,
        PauliCorrection::X,
        PauliCorrection::Z,
        PauliCorrection::ZX,
    ];

    /// Decoding table: 00 → σ_x, 11 → σ_zσ_x, 01 → I, 10 → σ_z.
    pub fn for_bits(bits: Bits) -> Self {
        match bits.value() {
            0b00 => PauliCorrection::X,
            0b11 => PauliCorrection::ZX,
            0b01 => PauliCorrection::I,
            _ => PauliCorrection::Z,
        }
    }

    /// The alternative printed assignment with the 00 and 10 rows exchanged.
    pub fn alternative_for_bits(bits: Bits) -> Self {
        match bits.value() {
            0b00 => PauliCorrection::Z,
            0b10 => PauliCorrection::X,
            _ => Self::for_bits(bits),
        }
    }

    pub fn operator(self) -> Operator {
        match self {
            PauliCorrection::I => gates::identity(),
            PauliCorrection::X => gates::pauli_x(),
            PauliCorrection::Z => gates::pauli_z(),
            PauliCorrection::ZX => gates::pauli_zx(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PauliCorrection::I => "I",
            PauliCorrection::X => "X",
            PauliCorrection::Z => "Z",
            PauliCorrection::ZX => "ZX",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub secret: SecretState,
    pub wparams: WStateParams,
    pub convention: Convention,
    pub seed: u64,
    pub max_retries: u32,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codebook_round_trip() {
        for b in BellState::ALL {
            assert_eq!(Bits::from_bell(b).to_bell(), b);
        }
        assert_eq!(Bits::from_bell(BellState::PhiMinus).to_string(), "11");
        assert_eq!("10".parse::<Bits>().unwrap().to_bell(), BellState::PsiMinus);
        assert!(matches!(Bits::new(4), Err(Error::UnknownBits(4))));
        assert!("2".parse::<Bits>().is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(SecretState::real(0.6, 0.8).is_ok());
        assert!(SecretState::real(0.6, 0.9).is_err());
        assert!(WStateParams::from_squares(0.25, 0.5, 0.25).is_ok());
        assert!(WStateParams::from_squares(0.6, 0.6, 0.2).is_err());
        assert!(WStateParams::from_squares(-0.1, 0.6, 0.5).is_err());
    }

    #[test]
    fn w_state_layout() {
        let w = WStateParams::from_squares(0.5, 0.3, 0.2).unwrap();
        let s = w.state(["A", "B", "C"]);
        assert_eq!(s.amplitude(0b001), w.alpha);
        assert_eq!(s.amplitude(0b010), w.beta);
        assert_eq!(s.amplitude(0b100), w.gamma);
    }

    #[test]
    fn corrections_match_gates() {
        let zx = PauliCorrection::Z
            .operator()
            .mul(&PauliCorrection::X.operator())
            .unwrap();
        assert_eq!(PauliCorrection::ZX.operator(), zx);
        for v in 0..4 {
            let bits = Bits::new(v).unwrap();
            let alt = PauliCorrection::alternative_for_bits(bits);
            if v == 0b00 || v == 0b10 {
                assert_ne!(alt, PauliCorrection::for_bits(bits));
            } else {
                assert_eq!(alt, PauliCorrection::for_bits(bits));
            }
        }
    }
}
