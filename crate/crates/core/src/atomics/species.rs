use std::fmt;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::kvfile::KvFile;

/// Angular momentum quantum number stored as twice its value so that
/// half-integers are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const fn from_twice(twice: i32) -> Self {
        Self(twice)
    }

    pub fn from_f64(value: f64) -> Result<Self> {
        let twice = 2.0 * value;
        if !twice.is_finite() || twice.fract() != 0.0 || twice.abs() > 1e6 {
            return Err(Error::InvalidAngularMomentum(value));
        }
        Ok(Self(twice as i32))
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub const fn is_half_odd(self) -> bool {
        self.0 % 2 != 0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// A `|F, M_F⟩` label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AngularMomentumKet {
    pub f: HalfInt,
    pub m_f: HalfInt,
}

impl AngularMomentumKet {
    pub fn new(f: f64, m_f: f64) -> Result<Self> {
        let f = HalfInt::from_f64(f)?;
        let m_f = HalfInt::from_f64(m_f)?;
        if f.twice() < 0 {
            return Err(Error::InvalidAngularMomentum(f.value()));
        }
        if (f.twice() - m_f.twice()) % 2 != 0 {
            return Err(invalid(format!(
                "F = {f} and M_F = {m_f} are not both integer or both half-odd"
            )));
        }
        if m_f.twice().abs() > f.twice() {
            return Err(invalid(format!("|M_F| = |{m_f}| exceeds F = {f}")));
        }
        Ok(Self { f, m_f })
    }
}

/// Alkali atom with the constants needed by the lattice and gate models.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomSpecies {
    pub name: String,
    /// kg
    pub mass: f64,
    /// Resonance (D2) wavelength, m.
    pub lambda_res: f64,
    /// Excited-state decay rate Γ, rad/s.
    pub gamma_natural: f64,
    /// Saturation intensity, W/m².
    pub i_sat: f64,
    pub nuclear_spin: f64,
    pub f_up: f64,
    pub f_down: f64,
    pub f_max_excited: f64,
}

impl AtomSpecies {
    pub fn new(
        name: impl Into<String>,
        mass: f64,
        lambda_res: f64,
        gamma_natural: f64,
        i_sat: f64,
        nuclear_spin: f64,
    ) -> Result<Self> {
        for (label, v) in [
            ("mass", mass),
            ("lambda_res", lambda_res),
            ("gamma_natural", gamma_natural),
            ("i_sat", i_sat),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{label} must be positive, got {v}")));
            }
        }
        let spin = HalfInt::from_f64(nuclear_spin)?;
        if !(spin.is_half_odd() && spin.twice() > 0) {
            return Err(invalid(format!(
                "nuclear spin must be a positive half-odd integer, got {nuclear_spin}"
            )));
        }
        Ok(Self {
            name: name.into(),
            mass,
            lambda_res,
            gamma_natural,
            i_sat,
            nuclear_spin,
            f_up: nuclear_spin + 0.5,
            f_down: nuclear_spin - 0.5,
            f_max_excited: nuclear_spin + 1.5,
        })
    }

    /// Reads a species record from `key = value` text.
    pub fn from_kv(text: &str) -> Result<Self> {
        let kv = KvFile::parse(text)?;
        Self::new(
            kv.text("name")?,
            kv.quantity("mass")?,
            kv.quantity("lambda_res")?,
            kv.quantity("gamma_natural")?,
            kv.quantity("i_sat")?,
            kv.quantity("nuclear_spin")?,
        )
    }

    /// Resonant wave number, rad/m.
    pub fn k_res(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.lambda_res
    }

    /// `⟨F_↑, M=1; 1, 0 | F'_max, M'=1⟩`, the coefficient of the π-polarized
    /// catalysis transition from the logical-one states.
    pub fn catalysis_cg(&self) -> f64 {
        super::clebsch_gordan(self.f_up, 1.0, 0, self.f_max_excited)
            .expect("species hyperfine labels are valid half-integers")
    }
}

const CS_D2: &str = include_str!("../../data/cs_d2.species");

/// Cesium-133 on the D2 line.
pub fn cesium_d2() -> AtomSpecies {
    AtomSpecies::from_kv(CS_D2).expect("bundled Cs record parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cesium_record() {
        let cs = cesium_d2();
        assert!((cs.lambda_res - 852e-9).abs() < 1e-21);
        assert_eq!(cs.nuclear_spin, 3.5);
        assert_eq!(cs.f_up, 4.0);
        assert_eq!(cs.f_down, 3.0);
        assert_eq!(cs.f_max_excited, 5.0);
        assert_eq!(cs.f_up - cs.f_down, 1.0);
        assert_eq!(cs.f_max_excited, cs.f_up + 1.0);
        let gamma_over_2pi = cs.gamma_natural / (2.0 * std::f64::consts::PI);
        assert!((gamma_over_2pi - 5.22e6).abs() < 1.0);
        assert!((cs.i_sat - 11.023).abs() < 1e-9);
    }

    #[test]
    fn species_validation() {
        assert!(AtomSpecies::new("X", 1e-25, 800e-9, 1e7, 10.0, 3.0).is_err());
        assert!(AtomSpecies::new("X", -1.0, 800e-9, 1e7, 10.0, 1.5).is_err());
        assert!(AtomSpecies::new("X", 1e-25, 800e-9, 1e7, 10.0, 0.3).is_err());
        let rb = AtomSpecies::new("Rb87", 1.443e-25, 780.24e-9, 3.8e7, 16.7, 1.5).unwrap();
        assert_eq!((rb.f_up, rb.f_down, rb.f_max_excited), (2.0, 1.0, 3.0));
    }

    #[test]
    fn kv_record_without_code_changes() {
        let text = "name = Rb87\nmass = 86.909 amu\nlambda_res = 780.24 nm\ngamma_natural = 6.07 MHz\ni_sat = 1.67 mW/cm2\nnuclear_spin = 1.5\n";
        let rb = AtomSpecies::from_kv(text).unwrap();
        assert_eq!(rb.name, "Rb87");
        assert_eq!(rb.f_up, 2.0);
        assert!(AtomSpecies::from_kv("name = X\n").is_err());
    }

    #[test]
    fn ket_invariants() {
        assert!(AngularMomentumKet::new(4.0, 1.0).is_ok());
        assert!(AngularMomentumKet::new(4.0, 5.0).is_err());
        assert!(AngularMomentumKet::new(4.0, 0.5).is_err());
        assert!(AngularMomentumKet::new(-1.0, 0.0).is_err());
        assert!(AngularMomentumKet::new(1.25, 0.0).is_err());
        assert_eq!(HalfInt::from_f64(3.5).unwrap().to_string(), "7/2");
    }
}
