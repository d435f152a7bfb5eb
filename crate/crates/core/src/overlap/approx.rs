//! Retardation-free closed form for κ.
//!
//! Keeping only the static `3P₂/(kr)³` part of `f` and setting `g = 1`, the
//! Gaussian average can be done analytically. With `r = η_∥/η_⊥` and
//! `q = 1/r² - 1`,
//!
//! ```text
//! κ ≈ B(q) / (8√π η_⊥² η_∥)
//! B(q) = -2 - 3/q + 3 (q^{-3/2} + q^{-1/2}) atan √q          (q > 0)
//!      = -2 + 3/a² + 3 (1/a - 1/a³) atanh a,  a = √(-q)        (q < 0)
//! ```
//!
//! Written this way the expression is positive for prolate traps, opposite
//! in sign to `-⟨f⟩/(1+⟨g⟩)`; [`kappa_approx_aligned`] flips it.

use super::TrapGeometry;

/// Below this `|q|` the bracket is summed as a power series.
const SERIES_RADIUS: f64 = 1e-2;

fn bracket(q: f64) -> f64 {
    if q.abs() < SERIES_RADIUS {
        // B = Σ 6 (-q)^n / ((2n+1)(2n+3)), n ≥ 1
        let mut sum = 0.0;
        let mut pow = 1.0;
        for n in 1..=16 {
            pow *= -q;
            let n = n as f64;
            sum += 6.0 * pow / ((2.0 * n + 1.0) * (2.0 * n + 3.0));
        }
        sum
    } else if q > 0.0 {
        let s = q.sqrt();
        -2.0 - 3.0 / q + 3.0 * (1.0 / (q * s) + 1.0 / s) * s.atan()
    } else {
        let a = (-q).sqrt();
        -2.0 + 3.0 / (a * a) + 3.0 * (1.0 / a - 1.0 / (a * a * a)) * a.atanh()
    }
}

/// Closed form on raw widths. Both must be positive; no upper bound is
/// imposed, so the ratio optimizer can range past `η = 1`.
pub fn kappa_closed_form(eta_perp: f64, eta_par: f64) -> f64 {
    let r = eta_par / eta_perp;
    let q = 1.0 / (r * r) - 1.0;
    bracket(q) / (8.0 * std::f64::consts::PI.sqrt() * eta_perp * eta_perp * eta_par)
}

/// The closed form with its native sign (positive for `η_∥ > η_⊥`).
pub fn kappa_approx(geom: TrapGeometry) -> f64 {
    kappa_closed_form(geom.eta_perp(), geom.eta_par())
}

/// The closed form in the `-⟨f⟩/(1+⟨g⟩)` convention.
pub fn kappa_approx_aligned(geom: TrapGeometry) -> f64 {
    -kappa_approx(geom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_value() {
        let g = TrapGeometry::new(0.1, 0.2).unwrap();
        assert!((kappa_approx(g) - 16.901286567815205).abs() < 1e-10);
        assert_eq!(kappa_approx_aligned(g), -kappa_approx(g));
    }

    #[test]
    fn isotropic_limit_is_zero() {
        let g = TrapGeometry::isotropic(0.1).unwrap();
        assert_eq!(kappa_approx(g), 0.0);
    }

    #[test]
    fn continuous_across_series_boundary() {
        for &q0 in &[SERIES_RADIUS, -SERIES_RADIUS] {
            let inside = bracket(q0 * (1.0 - 1e-13));
            let outside = bracket(q0 * (1.0 + 1e-13));
            assert!(
                (inside - outside).abs() < 1e-9 * inside.abs(),
                "{inside} vs {outside}"
            );
        }
    }

    #[test]
    fn closed_forms_agree_with_series_slightly_outside() {
        // the analytic branches are still accurate just past the switch
        for q in [0.02, -0.02, 0.05, -0.05] {
            let mut s = 0.0;
            let mut pow = 1.0;
            for n in 1..=40 {
                pow *= -q;
                let n = n as f64;
                s += 6.0 * pow / ((2.0 * n + 1.0) * (2.0 * n + 3.0));
            }
            assert!((bracket(q) - s).abs() < 1e-10 * s.abs(), "q = {q}");
        }
    }

    #[test]
    fn oblate_traps_change_sign() {
        let g = TrapGeometry::new(0.2, 0.1).unwrap();
        assert!(kappa_approx(g) < 0.0);
        assert!((kappa_approx_aligned(g) - 10.2541606265).abs() < 1e-8);
    }
}
