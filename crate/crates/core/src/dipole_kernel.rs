//! Pointwise dipole-dipole functions `f(r, θ_r)` and `g(r, θ_r)` for two
//! π-polarized induced dipoles.
//!
//! The pair is the real and imaginary part of
//! `f + i g = i h₀(kr) + P₂(cos θ_r) i h₂(kr)` with `h_n = j_n + i y_n`, so
//!
//! ```text
//! f = -[y₀(kr) + P₂ y₂(kr)]      (level shift, ~ +3 P₂ / (kr)³ as kr → 0)
//! g =   j₀(kr) + P₂ j₂(kr)       (cooperative decay, → 1 as kr → 0)
//! ```
//!
//! With this branch the figure of merit `κ = -⟨f⟩ / (1 + ⟨g⟩)` is negative
//! for traps elongated along the dipole axis (head-to-tail dipoles attract).

use num_complex::Complex64;

use crate::atomics::{self, p2_unchecked};
use crate::error::{invalid, Result};

/// Separation of the two atoms in units of the catalysis wave number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativePosition {
    kr: f64,
    cos_theta: f64,
}

impl RelativePosition {
    pub fn new(kr: f64, cos_theta: f64) -> Result<Self> {
        if !(kr > 0.0 && kr.is_finite()) {
            return Err(invalid(format!("kr must be positive, got {kr}")));
        }
        if !(-1.0..=1.0).contains(&cos_theta) {
            return Err(invalid(format!("cos θ = {cos_theta} outside [-1, 1]")));
        }
        Ok(Self { kr, cos_theta })
    }

    pub fn kr(&self) -> f64 {
        self.kr
    }

    pub fn cos_theta(&self) -> f64 {
        self.cos_theta
    }
}

/// Upper end of the window where the near-field asymptote is offered.
pub const NEAR_FIELD_LIMIT: f64 = 0.05;

/// `(f, g)` at one relative position.
#[inline]
pub fn fg(pos: RelativePosition) -> (f64, f64) {
    let b = atomics::bessel::orders_unchecked(pos.kr);
    let p2 = p2_unchecked(pos.cos_theta);
    (-(b.y[0] + p2 * b.y[2]), b.j[0] + p2 * b.j[2])
}

/// Leading near-field behaviour `(3 P₂ / (kr)³, 1)`. Only defined for
/// `kr < 0.05`; used as a test oracle.
pub fn fg_smallkr_asymptote(pos: RelativePosition) -> Result<(f64, f64)> {
    if pos.kr >= NEAR_FIELD_LIMIT {
        return Err(invalid(format!(
            "near-field asymptote requires kr < {NEAR_FIELD_LIMIT}, got {}",
            pos.kr
        )));
    }
    let p2 = p2_unchecked(pos.cos_theta);
    Ok((3.0 * p2 / pos.kr.powi(3), 1.0))
}

/// `i h₀(kr) + P₂ i h₂(kr)` as a complex number.
pub fn hankel_expression(pos: RelativePosition) -> Complex64 {
    let b = atomics::bessel::orders_unchecked(pos.kr);
    let p2 = p2_unchecked(pos.cos_theta);
    let i = Complex64::i();
    let h0 = Complex64::new(b.j[0], b.y[0]);
    let h2 = Complex64::new(b.j[2], b.y[2]);
    i * h0 + p2 * i * h2
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    #[test]
    fn near_field_scaling_on_axis() {
        let pos = RelativePosition::new(1e-3, 1.0).unwrap();
        let (f, g) = fg(pos);
        let lead = 3.0 / 1e-9;
        assert!(f > 0.0);
        assert!(((f - lead) / lead).abs() < 1e-5);
        assert!((g - 1.0).abs() < 1e-4);
    }

    #[test]
    fn cooperativity_tends_to_one_at_any_angle() {
        for c in [-1.0, -0.3, 0.0, 0.5, 1.0] {
            let (_, g) = fg(RelativePosition::new(1e-3, c).unwrap());
            assert!((g - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn magic_angle_leaves_only_the_scalar_term() {
        let pos = RelativePosition::new(PI, 1.0 / 3f64.sqrt()).unwrap();
        let (f, g) = fg(pos);
        // f = -y₀(π) = cos(π)/π
        assert!((f - (-1.0 / PI)).abs() < 1e-12);
        assert!(g.abs() < 1e-12);
        let h = hankel_expression(pos);
        assert!((h.re - f).abs() < 1e-12 && (h.im - g).abs() < 1e-12);
    }

    #[test]
    fn asymptote_values_and_window() {
        let a = fg_smallkr_asymptote(RelativePosition::new(1e-2, 1.0).unwrap()).unwrap();
        assert!((a.0 - 3e6).abs() < 1e-6);
        assert_eq!(a.1, 1.0);
        let a =
            fg_smallkr_asymptote(RelativePosition::new(1e-2, 1.0 / 3f64.sqrt()).unwrap()).unwrap();
        assert!(a.0.abs() < 1e-9);
        assert!(fg_smallkr_asymptote(RelativePosition::new(0.05, 1.0).unwrap()).is_err());
    }

    #[test]
    fn rejects_invalid_positions() {
        assert!(RelativePosition::new(0.0, 0.0).is_err());
        assert!(RelativePosition::new(-1.0, 0.0).is_err());
        assert!(RelativePosition::new(1.0, 1.5).is_err());
    }

    #[test]
    fn agrees_with_hankel_expression_on_random_sample() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10_000 {
            let kr = 10f64.powf(rng.gen_range(-3.0..2.0));
            let c = rng.gen_range(-1.0..=1.0);
            let pos = RelativePosition::new(kr, c).unwrap();
            let (f, g) = fg(pos);
            let h = hankel_expression(pos);
            let scale = f.abs().max(1.0);
            assert!((h.re - f).abs() <= 1e-10 * scale, "kr={kr} c={c}");
            assert!((h.im - g).abs() <= 1e-10);
        }
    }

    #[test]
    fn near_field_window_bounds() {
        for i in 0..=40 {
            let kr = 1e-3 * (50.0f64).powf(i as f64 / 40.0);
            if kr > NEAR_FIELD_LIMIT {
                continue;
            }
            for j in 0..=20 {
                let c = -1.0 + j as f64 / 10.0;
                let (f, g) = fg(RelativePosition::new(kr, c).unwrap());
                let p2 = p2_unchecked(c);
                // f (kr)³ - 3 P₂ is the O((kr)²) remainder
                assert!((f * kr.powi(3) - 3.0 * p2).abs() <= 0.05);
                assert!((g - 1.0).abs() <= 1e-3);
            }
        }
    }

    #[test]
    fn cooperative_term_never_exceeds_one() {
        for i in 1..=2000 {
            let kr = i as f64 * 0.05;
            for j in 0..=40 {
                let c = -1.0 + j as f64 / 20.0;
                let (_, g) = fg(RelativePosition::new(kr, c).unwrap());
                assert!(g.abs() <= 1.0 + 1e-12, "kr={kr} c={c} g={g}");
            }
        }
    }

    proptest! {
        #[test]
        fn even_in_cos_theta(kr in 1e-3f64..50.0, c in -1.0f64..=1.0) {
            let a = fg(RelativePosition::new(kr, c).unwrap());
            let b = fg(RelativePosition::new(kr, -c).unwrap());
            prop_assert_eq!(a, b);
        }
    }
}
