//! Best aspect ratio `η_∥/η_⊥` at fixed `η_⊥`.

use serde::Serialize;

use super::{kappa, kappa_closed_form, QuadratureSpec, TrapGeometry};
use crate::error::{invalid, Result};

const RATIO_MIN: f64 = 1.01;
const RATIO_MAX: f64 = 10.0;
const RATIO_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RatioObjective {
    /// The retardation-free closed form, sign-aligned.
    ClosedForm,
    /// Full quadrature; the ratio range is capped so `η_∥ ≤ 1`.
    Quadrature(QuadratureSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioOptimum {
    pub eta_perp: f64,
    pub ratio: f64,
    /// κ at the optimum in the `-⟨f⟩/(1+⟨g⟩)` convention.
    pub kappa: f64,
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`,
/// stopping once the bracket is narrower than `rel_tol` times its midpoint.
/// Returns the abscissa and the value there.
pub fn golden_section_max<F>(mut f: F, mut a: f64, mut b: f64, rel_tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a) > rel_tol * 0.5 * (a + b).abs() {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc > fd { (c, fc) } else { (d, fd) })
}

/// Maximize `|κ|` over `η_∥/η_⊥ ∈ [1.01, 10]`.
pub fn optimize_ratio(eta_perp: f64, objective: &RatioObjective) -> Result<RatioOptimum> {
    if !(eta_perp > 0.0 && eta_perp <= 0.5) {
        return Err(invalid(format!(
            "eta_perp must lie in (0, 0.5], got {eta_perp}"
        )));
    }
    let (ratio, kappa_star) = match objective {
        RatioObjective::ClosedForm => {
            let (r, _) = golden_section_max(
                |r| Ok(kappa_closed_form(eta_perp, r * eta_perp).abs()),
                RATIO_MIN,
                RATIO_MAX,
                RATIO_TOL,
            )?;
            (r, -kappa_closed_form(eta_perp, r * eta_perp))
        }
        RatioObjective::Quadrature(quad) => {
            let hi = RATIO_MAX.min(1.0 / eta_perp);
            let (r, _) = golden_section_max(
                |r| {
                    let geom = TrapGeometry::new(eta_perp, (r * eta_perp).min(1.0))?;
                    Ok(kappa(geom, quad)?.abs())
                },
                RATIO_MIN,
                hi,
                RATIO_TOL,
            )?;
            let k = kappa(TrapGeometry::new(eta_perp, (r * eta_perp).min(1.0))?, quad)?;
            (r, k)
        }
    };
    Ok(RatioOptimum {
        eta_perp,
        ratio,
        kappa: kappa_star,
    })
}
