//! Averages of `f` and `g` over the relative coordinate of two atoms, each in
//! the vibrational ground state of an anisotropic harmonic well, and the
//! figure of merit `κ = -⟨f⟩ / (1 + ⟨g⟩)` built from them.
//!
//! Lengths are measured in units of `1/k` throughout, so a trap is described
//! entirely by its two Lamb-Dicke parameters.

mod approx;
mod map;
mod mc;
mod optimize;
pub(crate) mod quadrature;

use std::cell::Cell;
use std::f64::consts::PI;

use serde::Serialize;

use crate::atomics::{bessel, p2_unchecked};
use crate::error::{invalid, Result};
use quadrature::{AdaptiveLimits, GaussLegendre, KronrodRule, K21, K31};

pub use approx::{kappa_approx, kappa_approx_aligned, kappa_closed_form};
pub use map::{kappa_map, KappaMap};
pub use mc::mc_oracle;
pub use optimize::{golden_section_max, optimize_ratio, RatioObjective, RatioOptimum};

/// Ground-state packet widths `η_⊥ = k x₀`, `η_∥ = k z₀`, with the dipoles
/// along the `∥` axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrapGeometry {
    eta_perp: f64,
    eta_par: f64,
}

impl TrapGeometry {
    pub fn new(eta_perp: f64, eta_par: f64) -> Result<Self> {
        for (name, v) in [("eta_perp", eta_perp), ("eta_par", eta_par)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(invalid(format!("{name} must lie in (0, 1], got {v}")));
            }
        }
        Ok(Self { eta_perp, eta_par })
    }

    pub fn isotropic(eta: f64) -> Result<Self> {
        Self::new(eta, eta)
    }

    pub fn eta_perp(&self) -> f64 {
        self.eta_perp
    }

    pub fn eta_par(&self) -> f64 {
        self.eta_par
    }

    /// `η_∥ / η_⊥`.
    pub fn ratio(&self) -> f64 {
        self.eta_par / self.eta_perp
    }

    /// Physical rms widths `(x₀, z₀)` for wave number `k`.
    pub fn rms_widths(&self, k: f64) -> (f64, f64) {
        (self.eta_perp / k, self.eta_par / k)
    }

    /// Same aspect ratio, both widths multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.eta_perp * s, self.eta_par * s)
    }
}

/// Relative-coordinate Gaussian `ρ(r) = N exp(-x²/2σ⊥² - y²/2σ⊥² - z²/2σ∥²)`
/// in units of `1/k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelativeGaussian {
    pub sigma_perp: f64,
    pub sigma_par: f64,
    pub norm: f64,
}

impl RelativeGaussian {
    /// Per-axis rms `(σ⊥, σ⊥, σ∥)`.
    pub fn rms_axes(&self) -> [f64; 3] {
        [self.sigma_perp, self.sigma_perp, self.sigma_par]
    }

    /// Root of the summed second moments.
    pub fn rms_3d(&self) -> f64 {
        (2.0 * self.sigma_perp.powi(2) + self.sigma_par.powi(2)).sqrt()
    }

    /// Density at distance `kr` and `μ = cos θ` from the dipole axis.
    pub fn density(&self, kr: f64, mu: f64) -> f64 {
        let x2 = kr * kr;
        let mu2 = mu * mu;
        self.norm
            * (-x2
                * ((1.0 - mu2) / (2.0 * self.sigma_perp.powi(2))
                    + mu2 / (2.0 * self.sigma_par.powi(2))))
            .exp()
    }
}

/// The difference of two independent packets is Gaussian with √2 times the
/// single-atom width on each axis.
pub fn relative_distribution(geom: TrapGeometry) -> RelativeGaussian {
    let sigma_perp = std::f64::consts::SQRT_2 * geom.eta_perp;
    let sigma_par = std::f64::consts::SQRT_2 * geom.eta_par;
    let norm = 1.0 / ((2.0 * PI).powf(1.5) * sigma_perp * sigma_perp * sigma_par);
    RelativeGaussian {
        sigma_perp,
        sigma_par,
        norm,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DipoleExpectation {
    pub mean_f: f64,
    pub mean_g: f64,
    pub err_f: f64,
    pub err_g: f64,
    pub evaluations: u64,
}

impl DipoleExpectation {
    pub fn kappa(&self) -> f64 {
        -self.mean_f / (1.0 + self.mean_g)
    }
}

/// What to do with the innermost radial sliver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NearOrigin {
    /// Below `1e-4·min(η)` replace the angular-averaged integrand by its
    /// linear behaviour.
    Taylor,
    /// Integrate from zero; Kronrod nodes never touch the endpoint.
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    /// Gauss order of the Gauss-Kronrod pair (10 or 15).
    pub radial_order: usize,
    pub max_subdivisions: usize,
    /// Gauss-Legendre order on each angular panel.
    pub angular_order: usize,
    pub rel_tol: f64,
    /// Budget in kernel calls (radial nodes times angular nodes).
    pub max_evaluations: u64,
    pub near_origin: NearOrigin,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            radial_order: 10,
            max_subdivisions: 4000,
            angular_order: 32,
            rel_tol: 1e-6,
            max_evaluations: 10_000_000,
            near_origin: NearOrigin::Taylor,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerance(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) {
            return Err(invalid(format!(
                "relative tolerance must lie in (0, 1e-2], got {}",
                self.rel_tol
            )));
        }
        if self.radial_order != 10 && self.radial_order != 15 {
            return Err(invalid(format!(
                "radial Gauss order must be 10 or 15, got {}",
                self.radial_order
            )));
        }
        if self.angular_order < 8 {
            return Err(invalid(format!(
                "angular order must be at least 8, got {}",
                self.angular_order
            )));
        }
        if self.max_subdivisions == 0 || self.max_evaluations == 0 {
            return Err(invalid("quadrature limits must be positive"));
        }
        Ok(())
    }

    fn rule(&self) -> &'static KronrodRule {
        if self.radial_order == 15 {
            &K31
        } else {
            &K21
        }
    }
}

/// Which radial kernel to average. The non-default variants exist for
/// cross-checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KernelVariant {
    Full,
    /// `P₂` terms dropped: `f = -y₀`, `g = j₀`.
    NoTensor,
    /// Static dipole-dipole limit: `f = 3P₂/(kr)³`, `g = 1`.
    NearFieldTensor,
}

impl KernelVariant {
    /// `(Y₀, Y₂, J₀, J₂)` with `f = -(Y₀ + P₂Y₂)`, `g = J₀ + P₂J₂`.
    #[inline]
    fn radial(self, x: f64) -> [f64; 4] {
        match self {
            KernelVariant::Full => {
                let b = bessel::orders_unchecked(x);
                [b.y[0], b.y[2], b.j[0], b.j[2]]
            }
            KernelVariant::NoTensor => {
                let b = bessel::orders_unchecked(x);
                [b.y[0], 0.0, b.j[0], 0.0]
            }
            KernelVariant::NearFieldTensor => [0.0, -3.0 / (x * x * x), 1.0, 0.0],
        }
    }
}

/// Angular exponent beyond which the Gaussian factor is dropped.
const ANGULAR_CUTOFF: f64 = 40.0;

/// Angular moments `∫ρ dμ` and `∫P₂ρ dμ` over `μ ∈ [-1, 1]` at fixed radius.
///
/// The exponent is split so the remaining factor never exceeds one, and the
/// `P₂` moment is taken against `expm1` so it stays accurate when the
/// anisotropy is small compared with the radius.
struct AngularMoments<'a> {
    rho: RelativeGaussian,
    gl: &'a GaussLegendre,
    inv_perp: f64,
    inv_par: f64,
}

impl<'a> AngularMoments<'a> {
    fn new(rho: RelativeGaussian, gl: &'a GaussLegendre) -> Self {
        Self {
            rho,
            gl,
            inv_perp: 0.5 / rho.sigma_perp.powi(2),
            inv_par: 0.5 / rho.sigma_par.powi(2),
        }
    }

    /// Returns the moments and the number of angular nodes used.
    fn at(&self, x: f64) -> ([f64; 2], u64) {
        let x2 = x * x;
        let c = self.inv_par - self.inv_perp;
        // oblate: peak at μ = 0 in u = μ, weight exp(-b u²)
        // prolate: peak at μ = 1 in u = 1 - μ, weight exp(-b u (2 - u))
        let oblate = c >= 0.0;
        let b = x2 * c.abs();
        let base = if oblate {
            (-x2 * self.inv_perp).exp()
        } else {
            (-x2 * self.inv_par).exp()
        };
        let exponent = |u: f64| if oblate { b * u * u } else { b * u * (2.0 - u) };
        let scale = if oblate { 1.0 / b.sqrt() } else { 0.5 / b };

        let mut a0 = 0.0;
        let mut a2 = 0.0;
        let mut nodes = 0u64;
        let mut lo = 0.0;
        let mut hi = if scale >= 0.5 { 1.0 } else { scale };
        loop {
            let w = hi - lo;
            for (t, wt) in self.gl.nodes.iter().zip(&self.gl.weights) {
                let u = lo + w * t;
                let mu = if oblate { u } else { 1.0 - u };
                let e = -exponent(u);
                a0 += wt * w * e.exp();
                a2 += wt * w * p2_unchecked(mu) * e.exp_m1();
            }
            nodes += self.gl.len() as u64;
            if hi >= 1.0 {
                break;
            }
            if exponent(hi) > ANGULAR_CUTOFF {
                // exp is negligible on [hi, 1]; expm1 is -1 there
                let (m0, m1) = if oblate { (hi, 1.0) } else { (0.0, 1.0 - hi) };
                let p2_int = |m: f64| 0.5 * (m * m * m - m);
                a2 -= p2_int(m1) - p2_int(m0);
                break;
            }
            lo = hi;
            hi = (2.0 * hi).min(1.0);
        }
        let k = 2.0 * self.rho.norm * base;
        ([k * a0, k * a2], nodes)
    }
}

/// `⟨f⟩` and `⟨g⟩` for the full kernel.
pub fn mean_fg(geom: TrapGeometry, quad: &QuadratureSpec) -> Result<DipoleExpectation> {
    mean_fg_variant(geom, quad, KernelVariant::Full)
}

/// `⟨f⟩` and `⟨g⟩` for a chosen kernel.
pub fn mean_fg_variant(
    geom: TrapGeometry,
    quad: &QuadratureSpec,
    variant: KernelVariant,
) -> Result<DipoleExpectation> {
    quad.validate()?;
    let rho = relative_distribution(geom);
    let gl = GaussLegendre::new(quad.angular_order);
    let moments = AngularMoments::new(rho, &gl);

    let s_min = rho.sigma_perp.min(rho.sigma_par);
    let s_max = rho.sigma_perp.max(rho.sigma_par);
    let x_hi = 14.0 * s_max;
    let x_lo = match quad.near_origin {
        NearOrigin::Taylor => 1e-4 * geom.eta_perp.min(geom.eta_par),
        NearOrigin::Direct => 0.0,
    };
    let mut breaks = vec![x_lo, 0.1 * s_min, s_min, s_max, 3.0 * s_max, 10.0, x_hi];
    breaks.retain(|&b| b >= x_lo && b <= x_hi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1e-300));

    let kernel_calls = Cell::new(0u64);
    let mut integrand = |x: f64| -> [f64; 2] {
        let (m, n) = moments.at(x);
        kernel_calls.set(kernel_calls.get() + n);
        let [y0, y2, j0, j2] = variant.radial(x);
        let w = 2.0 * PI * x * x;
        [-w * (y0 * m[0] + y2 * m[1]), w * (j0 * m[0] + j2 * m[1])]
    };

    let limits = AdaptiveLimits {
        rel_tol: quad.rel_tol,
        max_subdivisions: quad.max_subdivisions,
        max_calls: quad.max_evaluations,
    };
    let res = quadrature::integrate(quad.rule(), &mut integrand, &breaks, &limits, || {
        kernel_calls.get()
    })?;

    let mut value = res.value;
    let mut error = res.error;
    if x_lo > 0.0 {
        // integrand ~ x near the origin
        let edge = integrand(x_lo);
        for c in 0..2 {
            let piece = 0.5 * edge[c] * x_lo;
            value[c] += piece;
            error[c] += piece.abs();
        }
    }
    Ok(DipoleExpectation {
        mean_f: value[0],
        mean_g: value[1],
        err_f: error[0],
        err_g: error[1],
        evaluations: kernel_calls.get(),
    })
}

/// `κ = -⟨f⟩ / (1 + ⟨g⟩)`.
pub fn kappa(geom: TrapGeometry, quad: &QuadratureSpec) -> Result<f64> {
    Ok(mean_fg(geom, quad)?.kappa())
}
