//! Clebsch-Gordan coefficients for dipole (rank-1) couplings, evaluated with
//! the Racah sum in exact rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::species::HalfInt;
use crate::error::{Error, Result};

/// `s·√|r|` stored as the signed rational `s·|r|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedSqrt(pub BigRational);

impl SignedSqrt {
    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Square of the represented value.
    pub fn square(&self) -> BigRational {
        self.0.abs()
    }

    pub fn to_f64(&self) -> f64 {
        let magnitude = self.0.abs().to_f64().unwrap_or(f64::NAN).sqrt();
        if self.0.is_negative() {
            -magnitude
        } else {
            magnitude
        }
    }
}

fn factorial(n: i64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Converts a doubled half-integer combination to an integer, `None` if it
/// is odd (inconsistent parities) or negative.
fn whole(twice: i32) -> Option<i64> {
    (twice % 2 == 0 && twice >= 0).then_some(i64::from(twice / 2))
}

/// General `⟨j1 m1; j2 m2 | j m⟩` in doubled units. Returns zero whenever a
/// selection rule fails.
fn racah(j1: i32, m1: i32, j2: i32, m2: i32, j: i32, m: i32) -> SignedSqrt {
    if m1 + m2 != m || m1.abs() > j1 || m2.abs() > j2 || m.abs() > j {
        return SignedSqrt::zero();
    }
    if j < (j1 - j2).abs() || j > j1 + j2 {
        return SignedSqrt::zero();
    }
    let args = [
        j1 + j2 - j,
        j1 - j2 + j,
        -j1 + j2 + j,
        j1 + j2 + j + 2,
        j + m,
        j - m,
        j1 - m1,
        j1 + m1,
        j2 - m2,
        j2 + m2,
    ];
    let Some(ints) = args.iter().map(|&a| whole(a)).collect::<Option<Vec<_>>>() else {
        return SignedSqrt::zero();
    };
    let [a, b, c, d, jpm, jmm, j1mm, j1pm, j2mm, j2pm] = ints[..] else {
        unreachable!()
    };

    let prefactor = BigRational::new(
        BigInt::from(j + 1) * factorial(a) * factorial(b) * factorial(c),
        factorial(d),
    ) * BigRational::from_integer(
        factorial(jpm)
            * factorial(jmm)
            * factorial(j1mm)
            * factorial(j1pm)
            * factorial(j2mm)
            * factorial(j2pm),
    );

    // k ranges over values keeping every factorial argument non-negative.
    let t4 = i64::from(j - j2 + m1) / 2;
    let t5 = i64::from(j - j1 - m2) / 2;
    let k_min = 0.max(-t4).max(-t5);
    let k_max = a.min(j1mm).min(j2pm);
    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let denom = factorial(k)
            * factorial(a - k)
            * factorial(j1mm - k)
            * factorial(j2pm - k)
            * factorial(t4 + k)
            * factorial(t5 + k);
        let term = BigRational::new(BigInt::one(), denom);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return SignedSqrt::zero();
    }
    let sign_negative = sum.is_negative();
    let magnitude = prefactor * &sum * &sum;
    SignedSqrt(if sign_negative { -magnitude } else { magnitude })
}

/// Exact `⟨f, m_f; 1, q | f', m_f + q⟩`.
pub fn clebsch_gordan_exact(f: f64, m_f: f64, q: i32, f_prime: f64) -> Result<SignedSqrt> {
    if !(-1..=1).contains(&q) {
        return Err(Error::InvalidArgument(format!(
            "polarization index q = {q} must be -1, 0 or +1"
        )));
    }
    let f2 = HalfInt::from_f64(f)?;
    let m2 = HalfInt::from_f64(m_f)?;
    let fp2 = HalfInt::from_f64(f_prime)?;
    if f2.twice() < 0 {
        return Err(Error::InvalidAngularMomentum(f));
    }
    if fp2.twice() < 0 {
        return Err(Error::InvalidAngularMomentum(f_prime));
    }
    if (f2.twice() - m2.twice()) % 2 != 0 || (f2.twice() - fp2.twice()) % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "inconsistent half-integers: f = {f}, m_f = {m_f}, f' = {f_prime}"
        )));
    }
    Ok(racah(
        f2.twice(),
        m2.twice(),
        2,
        2 * q,
        fp2.twice(),
        m2.twice() + 2 * q,
    ))
}

/// `⟨f, m_f; 1, q | f', m_f + q⟩` with the Condon-Shortley phase.
pub fn clebsch_gordan(f: f64, m_f: f64, q: i32, f_prime: f64) -> Result<f64> {
    clebsch_gordan_exact(f, m_f, q, f_prime).map(|c| c.to_f64())
}

/// Alias used by the gate bookkeeping: the coefficient `c_g` of a dipole
/// transition between two hyperfine kets.
pub fn dipole_coefficient(
    lower: super::AngularMomentumKet,
    q: i32,
    upper_f: HalfInt,
) -> Result<f64> {
    clebsch_gordan(lower.f.value(), lower.m_f.value(), q, upper_f.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Floating-point Racah sum, written independently of the exact path.
    fn cg_float(j1: f64, m1: f64, j2: f64, m2: f64, j: f64, m: f64) -> f64 {
        fn fact(x: f64) -> f64 {
            let n = x.round() as i64;
            assert!(n >= 0 && (x - n as f64).abs() < 1e-9);
            (1..=n).map(|k| k as f64).product()
        }
        if (m1 + m2 - m).abs() > 1e-9 || j < (j1 - j2).abs() || j > j1 + j2 || m.abs() > j {
            return 0.0;
        }
        let pre = ((2.0 * j + 1.0) * fact(j + j1 - j2) * fact(j - j1 + j2) * fact(j1 + j2 - j)
            / fact(j1 + j2 + j + 1.0))
        .sqrt()
            * (fact(j + m)
                * fact(j - m)
                * fact(j1 - m1)
                * fact(j1 + m1)
                * fact(j2 - m2)
                * fact(j2 + m2))
            .sqrt();
        let mut s = 0.0;
        for k in 0..50 {
            let k = k as f64;
            let args = [
                k,
                j1 + j2 - j - k,
                j1 - m1 - k,
                j2 + m2 - k,
                j - j2 + m1 + k,
                j - j1 - m2 + k,
            ];
            if args.iter().any(|&a| a < -1e-9) {
                continue;
            }
            let d: f64 = args.iter().map(|&a| fact(a)).product();
            s += if (k as i64) % 2 == 0 { 1.0 } else { -1.0 } / d;
        }
        pre * s
    }

    #[test]
    fn stretched_state_is_one() {
        assert_eq!(clebsch_gordan(4.0, 4.0, 1, 5.0).unwrap(), 1.0);
        let exact = clebsch_gordan_exact(4.0, 4.0, 1, 5.0).unwrap();
        assert_eq!(exact.square(), BigRational::one());
    }

    #[test]
    fn catalysis_transition_coefficient() {
        // ⟨4,1;1,0|5,1⟩ = √(24/45)
        let exact = clebsch_gordan_exact(4.0, 1.0, 0, 5.0).unwrap();
        assert_eq!(
            exact.square(),
            BigRational::new(BigInt::from(24), BigInt::from(45))
        );
        let value = clebsch_gordan(4.0, 1.0, 0, 5.0).unwrap();
        assert!((value - (24.0f64 / 45.0).sqrt()).abs() < 1e-15);
        assert!((value - 0.7303).abs() < 1e-4);
        assert!((value - cg_float(4.0, 1.0, 1.0, 0.0, 5.0, 1.0)).abs() < 1e-13);
    }

    #[test]
    fn selection_rules_give_zero() {
        assert_eq!(clebsch_gordan(4.0, 4.0, 1, 4.0).unwrap(), 0.0);
        assert_eq!(clebsch_gordan(4.0, 4.0, 0, 3.0).unwrap(), 0.0);
        assert_eq!(clebsch_gordan(2.0, 0.0, 0, 2.0).unwrap(), 0.0); // ⟨j0;10|j0⟩
        assert_eq!(clebsch_gordan(4.0, 1.0, 0, 6.0).unwrap(), 0.0);
        assert_eq!(clebsch_gordan(0.0, 0.0, 0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(clebsch_gordan(-1.0, 0.0, 0, 0.0).is_err());
        assert!(clebsch_gordan(1.3, 0.0, 0, 1.0).is_err());
        assert!(clebsch_gordan(1.0, 0.5, 0, 1.0).is_err());
        assert!(clebsch_gordan(1.0, 0.0, 2, 1.0).is_err());
        assert!(clebsch_gordan(1.0, 0.0, 0, 1.5).is_err());
    }

    #[test]
    fn condon_shortley_phase() {
        // ⟨j m; 1 0 | j m⟩ = m/√(j(j+1)); the reversed coupling order picks
        // up (-1)^(j1+j2-j)
        let v = clebsch_gordan(0.5, 0.5, 0, 0.5).unwrap();
        assert!((v - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        let r = racah(2, 0, 1, 1, 1, 1).to_f64();
        assert!((r + 1.0 / 3f64.sqrt()).abs() < 1e-15);
        let v = clebsch_gordan(1.0, 1.0, -1, 1.0).unwrap();
        assert!((v - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        let v = clebsch_gordan(1.0, -1.0, 1, 1.0).unwrap();
        assert!((v + 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn matches_float_racah_for_all_cs_couplings() {
        for f in [3.0, 4.0] {
            for fp in [f - 1.0, f, f + 1.0] {
                let mut m = -f;
                while m <= f {
                    for q in -1..=1 {
                        let exact = clebsch_gordan(f, m, q, fp).unwrap();
                        let float = cg_float(f, m, 1.0, f64::from(q), fp, m + f64::from(q));
                        assert!((exact - float).abs() < 1e-12, "f={f} m={m} q={q} f'={fp}");
                    }
                    m += 1.0;
                }
            }
        }
    }

    #[test]
    fn completeness_and_orthonormality_for_cs_ground_levels() {
        for f in [3.0f64, 4.0] {
            // Σ_{f'} ⟨f m;1 q|f' m+q⟩² = 1 for fixed (m, q)
            let mut m = -f;
            while m <= f {
                for q in -1..=1 {
                    let total: f64 = [f - 1.0, f, f + 1.0]
                        .iter()
                        .filter(|&&fp| fp >= 0.0 && (m + f64::from(q)).abs() <= fp)
                        .map(|&fp| clebsch_gordan(f, m, q, fp).unwrap().powi(2))
                        .sum();
                    assert!((total - 1.0).abs() < 1e-13, "f={f} m={m} q={q}: {total}");
                }
                m += 1.0;
            }
            // Σ_{q} ⟨f m'-q;1 q|f' m'⟩² = 1 for a fixed final state |f' m'⟩
            for fp in [f - 1.0, f, f + 1.0] {
                let mut mp = -fp;
                while mp <= fp {
                    let total: f64 = (-1..=1)
                        .filter(|&q| (mp - f64::from(q)).abs() <= f)
                        .map(|q| clebsch_gordan(f, mp - f64::from(q), q, fp).unwrap().powi(2))
                        .sum();
                    assert!(
                        (total - 1.0).abs() < 1e-13,
                        "f={f} f'={fp} m'={mp}: {total}"
                    );
                    mp += 1.0;
                }
            }
        }
    }
}
