//! Lattice geometry and the laser-parameter budget.
//!
//! The trap model is the two-level far-detuned light shift. Each standing
//! wave axis is treated as a harmonic well around a node of a blue-detuned
//! lattice; the photon scattering that survives at the node comes from the
//! zero-point spread of the atom into the intensity gradient.

mod budget;

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::atomics::AtomSpecies;
use crate::constants::HBAR;
use crate::error::{invalid, Result};

pub use budget::{lattice_budget, BudgetEntry, LatticeBudget, LatticeConfig};

/// Saturation above which the far-detuned light-shift formula is refused.
pub const MAX_LATTICE_SATURATION: f64 = 0.1;

/// Adiabaticity figure at and above which a merge is flagged.
pub const ADIABATIC_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeBeamConfig {
    /// W/m²
    pub intensity_perp: f64,
    /// W/m²
    pub intensity_par: f64,
    /// Blue detuning, rad/s.
    pub detuning_perp: f64,
    /// Blue detuning, rad/s.
    pub detuning_par: f64,
    /// rad/m
    pub k_l: f64,
    /// Angle between the polarizations of the two longitudinal beams, rad.
    pub polarization_angle: f64,
}

impl LatticeBeamConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("intensity_perp", self.intensity_perp),
            ("intensity_par", self.intensity_par),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(format!("{name} must be non-negative, got {v}")));
            }
        }
        for (name, v) in [
            ("detuning_perp", self.detuning_perp),
            ("detuning_par", self.detuning_par),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!(
                    "{name} must be a positive (blue) detuning, got {v}"
                )));
            }
        }
        if !(self.k_l.is_finite() && self.k_l > 0.0) {
            return Err(invalid(format!("k_L must be positive, got {}", self.k_l)));
        }
        if !(0.0..=PI).contains(&self.polarization_angle) {
            return Err(invalid(format!(
                "polarization angle {} outside [0, π]",
                self.polarization_angle
            )));
        }
        Ok(())
    }
}

/// Harmonic trap along one axis. An axis with no light has zero depth and
/// frequency and no ground-state width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrapParams {
    /// J
    pub well_depth: f64,
    /// Hz
    pub osc_freq: f64,
    /// m
    pub ground_rms: Option<f64>,
    pub lamb_dicke: Option<f64>,
    /// Node-sited photon scattering, 1/s.
    pub scatter_rate: f64,
}

impl TrapParams {
    pub fn angular_freq(&self) -> f64 {
        2.0 * PI * self.osc_freq
    }

    pub fn is_trapped(&self) -> bool {
        self.ground_rms.is_some()
    }
}

/// Separation of the σ₊ and σ₋ well minima, `k_L δZ = atan(tan θ / 2)` on the
/// branch that increases continuously from 0 at `θ = 0` to `π` at `θ = π`.
pub fn well_separation(theta: f64, k_l: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&theta) {
        return Err(invalid(format!(
            "polarization angle {theta} outside [0, π]"
        )));
    }
    if !(k_l > 0.0 && k_l.is_finite()) {
        return Err(invalid(format!("k_L must be positive, got {k_l}")));
    }
    if theta == FRAC_PI_2 {
        return Ok(FRAC_PI_2 / k_l);
    }
    Ok(theta.sin().atan2(2.0 * theta.cos()) / k_l)
}

/// `d(k_L δZ)/dθ`.
fn separation_slope(theta: f64) -> f64 {
    let c = theta.cos();
    2.0 / (1.0 + 3.0 * c * c)
}

/// Trap along one axis from a single beam's intensity and blue detuning.
///
/// `U₁ = ħΓ²(I/I_sat)/(8Δ)`, depth `U₀ = 4 U₁ · geometry_factor`,
/// `ω = k_L √(2U₀/m)`, `x₀ = √(ħ/2mω)`, `Γ' = (Γ/Δ)(ω/4)`.
pub fn trap_params(
    species: &AtomSpecies,
    intensity: f64,
    detuning: f64,
    k_l: f64,
    geometry_factor: f64,
) -> Result<TrapParams> {
    if !(detuning.is_finite() && detuning > 0.0) {
        return Err(invalid(format!(
            "lattice detuning must be blue (positive), got {detuning} rad/s"
        )));
    }
    if !(intensity.is_finite() && intensity >= 0.0) {
        return Err(invalid(format!(
            "intensity must be non-negative, got {intensity}"
        )));
    }
    if !(k_l.is_finite() && k_l > 0.0) {
        return Err(invalid(format!("k_L must be positive, got {k_l}")));
    }
    if !(geometry_factor.is_finite() && geometry_factor > 0.0) {
        return Err(invalid(format!(
            "geometry factor must be positive, got {geometry_factor}"
        )));
    }
    let gamma = species.gamma_natural;
    let s = (intensity / species.i_sat) * gamma * gamma / (4.0 * detuning * detuning);
    if s > MAX_LATTICE_SATURATION {
        return Err(invalid(format!(
            "lattice saturation {s:.3e} exceeds {MAX_LATTICE_SATURATION}; detuning too small"
        )));
    }
    if intensity == 0.0 {
        return Ok(TrapParams {
            well_depth: 0.0,
            osc_freq: 0.0,
            ground_rms: None,
            lamb_dicke: None,
            scatter_rate: 0.0,
        });
    }
    let u1 = HBAR * gamma * gamma * (intensity / species.i_sat) / (8.0 * detuning);
    let u0 = 4.0 * u1 * geometry_factor;
    let omega = k_l * (2.0 * u0 / species.mass).sqrt();
    let rms = (HBAR / (2.0 * species.mass * omega)).sqrt();
    Ok(TrapParams {
        well_depth: u0,
        osc_freq: omega / (2.0 * PI),
        ground_rms: Some(rms),
        lamb_dicke: Some(k_l * rms),
        scatter_rate: (gamma / detuning) * (omega / 4.0),
    })
}

/// Sum of the per-axis node-sited scattering rates.
pub fn total_lattice_scatter(axes: &[TrapParams]) -> f64 {
    axes.iter().map(|a| a.scatter_rate).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergeSchedule {
    pub theta_start: f64,
    pub theta_end: f64,
    /// s
    pub duration: f64,
    /// `(t, θ(t), δZ(t))` on an even grid including both ends.
    pub samples: Vec<(f64, f64, f64)>,
    /// Peak well speed over `ν_osc · x₀`.
    pub adiabaticity: f64,
    pub non_adiabatic: bool,
}

const MERGE_SAMPLES: usize = 101;
const MERGE_SEARCH: usize = 20_001;

/// Raised-cosine polarization ramp `θ(t) = θ₀ + (θ₁ - θ₀)(1 - cos πt/T)/2`
/// and its adiabaticity figure `max |dδZ/dt| / (ν_osc x₀)`.
pub fn merge_schedule(
    theta_start: f64,
    theta_end: f64,
    duration: f64,
    nu_osc: f64,
    ground_rms: f64,
    k_l: f64,
) -> Result<MergeSchedule> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(invalid(format!(
            "duration must be positive, got {duration}"
        )));
    }
    if !(nu_osc > 0.0 && ground_rms > 0.0) {
        return Err(invalid(
            "oscillation frequency and ground rms must be positive",
        ));
    }
    let theta_at =
        |t: f64| theta_start + (theta_end - theta_start) * 0.5 * (1.0 - (PI * t / duration).cos());
    let mut samples = Vec::with_capacity(MERGE_SAMPLES);
    for i in 0..MERGE_SAMPLES {
        let t = duration * i as f64 / (MERGE_SAMPLES - 1) as f64;
        let th = theta_at(t);
        samples.push((t, th, well_separation(th, k_l)?));
    }

    let mut peak: f64 = 0.0;
    for i in 0..MERGE_SEARCH {
        let t = duration * i as f64 / (MERGE_SEARCH - 1) as f64;
        let dtheta = (theta_end - theta_start) * 0.5 * PI / duration * (PI * t / duration).sin();
        let v = separation_slope(theta_at(t)) * dtheta / k_l;
        peak = peak.max(v.abs());
    }
    let adiabaticity = peak / (nu_osc * ground_rms);
    Ok(MergeSchedule {
        theta_start,
        theta_end,
        duration,
        samples,
        adiabaticity,
        non_adiabatic: adiabaticity >= ADIABATIC_LIMIT,
    })
}

/// On-resonance catalysis beam.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CatalysisField {
    /// W/m²
    pub intensity: f64,
    /// rad/s
    pub detuning_from_resonance: f64,
    pub saturation: f64,
    /// Single-atom scattering rate `Γ' = sΓ/2`, 1/s.
    pub scatter_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CatalysisSolution {
    pub field: CatalysisField,
    pub c_g4: f64,
    pub mean_f: f64,
    pub mean_g: f64,
    /// Signed level shift of the pair state with both atoms in |1⟩, J.
    pub v_dd: f64,
    /// Pair scattering linewidth `Γ' c_g⁴ (1 + ⟨g⟩)`, 1/s.
    pub gamma_sup: f64,
    /// `V_dd / (ħ Γ_sup)`.
    pub kappa: f64,
}

/// Catalysis intensity producing a level shift of magnitude `target_vdd`
/// (J), from `|V_dd| = ħ Γ' c_g⁴ |⟨f⟩|`.
pub fn catalysis_intensity(
    species: &AtomSpecies,
    c_g4: f64,
    mean_f: f64,
    mean_g: f64,
    target_vdd: f64,
) -> Result<CatalysisSolution> {
    if mean_f == 0.0 || !mean_f.is_finite() {
        return Err(invalid(
            "⟨f⟩ = 0: no catalysis intensity produces a level shift",
        ));
    }
    if !(c_g4 > 0.0 && c_g4 <= 1.0) {
        return Err(invalid(format!("c_g⁴ must lie in (0, 1], got {c_g4}")));
    }
    if !(target_vdd.is_finite() && target_vdd >= 0.0) {
        return Err(invalid(format!(
            "target |V_dd| must be non-negative, got {target_vdd}"
        )));
    }
    let gamma_prime = target_vdd / (HBAR * c_g4 * mean_f.abs());
    let saturation = 2.0 * gamma_prime / species.gamma_natural;
    let gamma_sup = gamma_prime * c_g4 * (1.0 + mean_g);
    let v_dd = -mean_f.signum() * target_vdd;
    let kappa = if gamma_sup > 0.0 {
        v_dd / (HBAR * gamma_sup)
    } else {
        -mean_f / (1.0 + mean_g)
    };
    Ok(CatalysisSolution {
        field: CatalysisField {
            intensity: saturation * species.i_sat,
            detuning_from_resonance: 0.0,
            saturation,
            scatter_rate: gamma_prime,
        },
        c_g4,
        mean_f,
        mean_g,
        v_dd,
        gamma_sup,
        kappa,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomics::cesium_d2;

    const GHZ: f64 = 2.0 * PI * 1e9;

    fn cs_k() -> f64 {
        cesium_d2().k_res()
    }

    #[test]
    fn separation_reference_points() {
        let k = cs_k();
        assert_eq!(well_separation(0.0, k).unwrap(), 0.0);
        assert_eq!(well_separation(FRAC_PI_2, k).unwrap(), FRAC_PI_2 / k);
        let quarter = well_separation(PI / 4.0, k).unwrap() * k;
        assert!((quarter - 0.5f64.atan()).abs() < 1e-15);
        assert!((well_separation(PI, k).unwrap() * k - PI).abs() < 1e-15);
        assert!(well_separation(-0.1, k).is_err());
        assert!(well_separation(3.2, k).is_err());
    }

    #[test]
    fn separation_is_continuous_and_increasing() {
        let n = 10_000;
        let mut prev = well_separation(0.0, 1.0).unwrap();
        for i in 1..n {
            let th = PI * i as f64 / n as f64;
            let z = well_separation(th, 1.0).unwrap();
            assert!(z > prev, "θ = {th}");
            assert!(z - prev < 2.0 * 2.0 * PI / n as f64);
            prev = z;
        }
    }

    #[test]
    fn cs_transverse_trap() {
        let cs = cesium_d2();
        let t = trap_params(&cs, 1e6, 120.0 * GHZ, cs.k_res(), 1.0).unwrap();
        assert!((t.osc_freq - 293e3).abs() < 2e3, "{}", t.osc_freq);
        assert!((t.lamb_dicke.unwrap() - 0.0841).abs() < 1e-3);
        let eta = t.lamb_dicke.unwrap();
        let omega = t.angular_freq();
        let expected = HBAR * cs.k_res().powi(2) / (2.0 * cs.mass * omega);
        assert!((eta * eta - expected).abs() < 1e-14 * expected);
    }

    #[test]
    fn intensity_scaling() {
        let cs = cesium_d2();
        let a = trap_params(&cs, 1e5, 120.0 * GHZ, cs.k_res(), 1.0).unwrap();
        let b = trap_params(&cs, 4e5, 120.0 * GHZ, cs.k_res(), 1.0).unwrap();
        let r = b.lamb_dicke.unwrap() / a.lamb_dicke.unwrap();
        assert!((r - 0.5f64.sqrt()).abs() < 1e-6);
        assert!((b.osc_freq / a.osc_freq - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejections_and_empty_axis() {
        let cs = cesium_d2();
        let k = cs.k_res();
        assert!(trap_params(&cs, 1e6, -120.0 * GHZ, k, 1.0).is_err());
        // 1 GHz detuning at 100 W/cm² saturates
        assert!(trap_params(&cs, 1e6, 1.0 * GHZ, k, 1.0).is_err());
        let off = trap_params(&cs, 0.0, 120.0 * GHZ, k, 1.0).unwrap();
        assert!(!off.is_trapped());
        assert_eq!(total_lattice_scatter(&[off, off, off]), 0.0);
    }

    #[test]
    fn scatter_halves_with_detuning_at_fixed_frequency() {
        let cs = cesium_d2();
        let k = cs.k_res();
        let a = trap_params(&cs, 1e6, 120.0 * GHZ, k, 1.0).unwrap();
        // doubling both Δ and I keeps ω fixed
        let b = trap_params(&cs, 2e6, 240.0 * GHZ, k, 1.0).unwrap();
        assert!((b.osc_freq / a.osc_freq - 1.0).abs() < 1e-12);
        assert!((b.scatter_rate / a.scatter_rate - 0.5).abs() < 1e-12);
    }

    #[test]
    fn merge_adiabaticity() {
        let k = cs_k();
        let nu = 50e3;
        let rms = 0.2 / k;
        let fast = merge_schedule(FRAC_PI_2, 0.0, 1.0 / nu, nu, rms, k).unwrap();
        assert!(fast.non_adiabatic);
        // peak of |dθ/dt · dδZ/dθ| lies at θ = π/2 side of the ramp
        assert!(
            fast.adiabaticity > 10.0 && fast.adiabaticity < 30.0,
            "{}",
            fast.adiabaticity
        );
        let slow = merge_schedule(FRAC_PI_2, 0.0, 100.0 / nu, nu, rms, k).unwrap();
        let slower = merge_schedule(FRAC_PI_2, 0.0, 1000.0 / nu, nu, rms, k).unwrap();
        assert!(slower.adiabaticity < slow.adiabaticity);
        let none = merge_schedule(0.3, 0.3, 1e-3, nu, rms, k).unwrap();
        assert_eq!(none.adiabaticity, 0.0);
        assert!(merge_schedule(0.0, 1.0, 0.0, nu, rms, k).is_err());
        assert_eq!(fast.samples.len(), MERGE_SAMPLES);
        assert_eq!(fast.samples[0].2, FRAC_PI_2 / k);
    }

    #[test]
    fn catalysis_inversion() {
        let cs = cesium_d2();
        let cg = cs.catalysis_cg();
        let c4 = cg.powi(4);
        let f = 38.350_126_202_646_46;
        let g = 0.984_147_511_237_942_2;
        let v = HBAR * 2.0 * PI * 5e3;
        let sol = catalysis_intensity(&cs, c4, f, g, v).unwrap();
        let uw_cm2 = sol.field.intensity / 1e-2;
        assert!((uw_cm2 - 0.1936).abs() < 1e-3, "{uw_cm2}");
        assert!((sol.kappa - (-f / (1.0 + g))).abs() < 1e-12 * sol.kappa.abs());
        assert!(
            (sol.field.scatter_rate - sol.field.saturation * cs.gamma_natural / 2.0).abs() < 1e-9
        );
        // κ does not depend on c_g
        let other = catalysis_intensity(&cs, 0.5, f, g, v).unwrap();
        assert!((other.kappa - sol.kappa).abs() < 1e-12 * sol.kappa.abs());

        let zero = catalysis_intensity(&cs, c4, f, g, 0.0).unwrap();
        assert_eq!(zero.field.intensity, 0.0);
        assert!(catalysis_intensity(&cs, c4, 0.0, g, v).is_err());
    }
}
