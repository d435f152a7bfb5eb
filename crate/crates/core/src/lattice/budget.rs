//! Lattice configuration files and the derived parameter budget.

use std::f64::consts::PI;

use serde::Serialize;

use super::{
    catalysis_intensity, merge_schedule, total_lattice_scatter, trap_params, well_separation,
    CatalysisSolution, LatticeBeamConfig, TrapParams,
};
use crate::atomics::{cesium_d2, AtomSpecies};
use crate::constants::HBAR;
use crate::error::{invalid, Error, Result};
use crate::kvfile::KvFile;
use crate::overlap::{kappa_approx, mean_fg, QuadratureSpec, TrapGeometry};

const KNOWN_KEYS: &[&str] = &[
    "species",
    "species.name",
    "species.mass",
    "species.lambda_res",
    "species.gamma_natural",
    "species.i_sat",
    "species.nuclear_spin",
    "lattice.intensity_perp",
    "lattice.intensity_par",
    "lattice.detuning_perp",
    "lattice.detuning_par",
    "lattice.wavelength",
    "lattice.polarization_angle",
    "lattice.geometry_factor_perp",
    "lattice.geometry_factor_par",
    "catalysis.vdd_over_h",
    "catalysis.eta_perp",
    "catalysis.eta_par",
    "merge.duration",
    "merge.theta_start",
    "merge.theta_end",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeConfig {
    pub species: AtomSpecies,
    pub beams: LatticeBeamConfig,
    pub geometry_factor_perp: f64,
    pub geometry_factor_par: f64,
    /// Target `|V_dd|`, J.
    pub target_vdd: f64,
    /// Packet widths used for the catalysis averages; the lattice's own
    /// Lamb-Dicke parameters when absent.
    pub catalysis_eta: Option<(f64, f64)>,
    /// s
    pub merge_duration: Option<f64>,
    pub merge_theta_start: f64,
    pub merge_theta_end: f64,
}

impl LatticeConfig {
    /// Parses a `key = value` configuration. Unknown keys are rejected.
    pub fn from_kv(kv: &KvFile) -> Result<Self> {
        if let Some(k) = kv.keys().find(|k| !KNOWN_KEYS.contains(k)) {
            return Err(invalid(format!("unknown configuration key `{k}`")));
        }
        let species = match kv.raw("species") {
            Some(name) if name.eq_ignore_ascii_case("cs") || name == "cs_d2" => cesium_d2(),
            Some(other) => {
                return Err(invalid(format!(
                    "unknown built-in species `{other}`; give species.* keys instead"
                )))
            }
            None => AtomSpecies::new(
                kv.text("species.name")?,
                kv.quantity("species.mass")?,
                kv.quantity("species.lambda_res")?,
                kv.quantity("species.gamma_natural")?,
                kv.quantity("species.i_sat")?,
                kv.quantity("species.nuclear_spin")?,
            )?,
        };
        let wavelength = kv.quantity_or("lattice.wavelength", species.lambda_res)?;
        if !(wavelength > 0.0) {
            return Err(invalid("lattice.wavelength must be positive"));
        }
        let beams = LatticeBeamConfig {
            intensity_perp: kv.quantity("lattice.intensity_perp")?,
            intensity_par: kv.quantity("lattice.intensity_par")?,
            detuning_perp: kv.quantity("lattice.detuning_perp")?,
            detuning_par: kv.quantity("lattice.detuning_par")?,
            k_l: 2.0 * PI / wavelength,
            polarization_angle: kv.quantity_or("lattice.polarization_angle", 0.0)?,
        };
        beams.validate()?;

        let catalysis_eta = match (
            kv.contains("catalysis.eta_perp"),
            kv.contains("catalysis.eta_par"),
        ) {
            (true, true) => Some((
                kv.quantity("catalysis.eta_perp")?,
                kv.quantity("catalysis.eta_par")?,
            )),
            (false, false) => None,
            _ => {
                return Err(invalid(
                    "catalysis.eta_perp and catalysis.eta_par must be given together",
                ))
            }
        };
        // frequencies arrive in rad/s; V = ħ·ω
        let target_vdd = HBAR * kv.quantity("catalysis.vdd_over_h")?;

        let merge_duration = if kv.contains("merge.duration") {
            Some(kv.quantity("merge.duration")?)
        } else {
            None
        };
        Ok(Self {
            species,
            beams,
            geometry_factor_perp: kv.quantity_or("lattice.geometry_factor_perp", 1.0)?,
            geometry_factor_par: kv.quantity_or("lattice.geometry_factor_par", 1.0)?,
            target_vdd,
            catalysis_eta,
            merge_duration,
            merge_theta_start: kv.quantity_or("merge.theta_start", PI / 2.0)?,
            merge_theta_end: kv.quantity_or("merge.theta_end", 0.0)?,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_kv(&KvFile::parse(text)?)
    }
}

/// One derived number with its unit and the relation that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetEntry {
    pub name: String,
    pub value: f64,
    pub unit: String,
    pub formula: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeBudget {
    pub species: String,
    pub trap_perp: TrapParams,
    pub trap_par: TrapParams,
    /// 1/s
    pub gamma_lat: f64,
    /// Absent when neither the configuration nor the lattice fixes the
    /// packet widths (an untrapped axis).
    pub catalysis_geometry: Option<TrapGeometry>,
    pub catalysis: Option<CatalysisSolution>,
    pub adiabaticity: Option<f64>,
    pub entries: Vec<BudgetEntry>,
}

impl LatticeBudget {
    pub fn entry(&self, name: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .map(|e| e.value)
    }
}

struct Entries(Vec<BudgetEntry>);

impl Entries {
    fn push(&mut self, name: &str, value: f64, unit: &str, formula: &str) {
        self.0.push(BudgetEntry {
            name: name.into(),
            value,
            unit: unit.into(),
            formula: formula.into(),
        });
    }
}

/// Trap parameters on both axes, the lattice scattering rate and the
/// catalysis intensity for the configured level shift.
pub fn lattice_budget(cfg: &LatticeConfig, quad: &QuadratureSpec) -> Result<LatticeBudget> {
    let sp = &cfg.species;
    let b = &cfg.beams;
    let perp = trap_params(
        sp,
        b.intensity_perp,
        b.detuning_perp,
        b.k_l,
        cfg.geometry_factor_perp,
    )?;
    let par = trap_params(
        sp,
        b.intensity_par,
        b.detuning_par,
        b.k_l,
        cfg.geometry_factor_par,
    )?;
    let gamma_lat = total_lattice_scatter(&[perp, perp, par]);

    let widths = match cfg.catalysis_eta {
        Some(pair) => Some(pair),
        None => perp.lamb_dicke.zip(par.lamb_dicke),
    };
    let c_g = sp.catalysis_cg();
    let c_g4 = c_g.powi(4);
    let catalysis = match widths {
        Some((ep, ea)) => {
            let geom = TrapGeometry::new(ep, ea)?;
            let means = mean_fg(geom, quad)?;
            let sol = catalysis_intensity(sp, c_g4, means.mean_f, means.mean_g, cfg.target_vdd)?;
            Some((geom, sol))
        }
        None => None,
    };

    let adiabaticity = match cfg.merge_duration {
        Some(t) => {
            let rms = par.ground_rms.ok_or_else(|| {
                Error::InvalidArgument("merge needs a trapped longitudinal axis".into())
            })?;
            Some(
                merge_schedule(
                    cfg.merge_theta_start,
                    cfg.merge_theta_end,
                    t,
                    par.osc_freq,
                    rms,
                    b.k_l,
                )?
                .adiabaticity,
            )
        }
        None => None,
    };

    let mut e = Entries(Vec::new());
    e.push("k_l", b.k_l, "rad/m", "2π/λ_L");
    for (tag, t) in [("perp", &perp), ("par", &par)] {
        e.push(
            &format!("well_depth_{tag}"),
            t.well_depth,
            "J",
            "U0 = 4·f_geo·ħΓ²(I/I_sat)/(8Δ)",
        );
        e.push(&format!("nu_osc_{tag}"), t.osc_freq, "Hz", "k_L√(2U0/m)/2π");
        e.push(
            &format!("ground_rms_{tag}"),
            t.ground_rms.unwrap_or(f64::NAN),
            "m",
            "√(ħ/(2mω))",
        );
        e.push(
            &format!("eta_{tag}"),
            t.lamb_dicke.unwrap_or(f64::NAN),
            "1",
            "k_L·x0",
        );
        e.push(
            &format!("scatter_{tag}"),
            t.scatter_rate,
            "1/s",
            "(Γ/Δ)(ω/4)",
        );
    }
    e.push("gamma_lat", gamma_lat, "1/s", "2Γ'_perp + Γ'_par");
    e.push(
        "gamma_lat_over_2pi",
        gamma_lat / (2.0 * PI),
        "Hz",
        "Γ'_lat/2π",
    );
    e.push(
        "well_separation",
        well_separation(b.polarization_angle, b.k_l)?,
        "m",
        "atan2(sin θ, 2cos θ)/k_L",
    );
    if let Some((geom, sol)) = &catalysis {
        e.push(
            "catalysis_eta_perp",
            geom.eta_perp(),
            "1",
            "k·x0 of the catalysis average",
        );
        e.push(
            "catalysis_eta_par",
            geom.eta_par(),
            "1",
            "k·z0 of the catalysis average",
        );
        e.push("mean_f", sol.mean_f, "1", "⟨-(y0 + P2·y2)⟩");
        e.push("mean_g", sol.mean_g, "1", "⟨j0 + P2·j2⟩");
        e.push("c_g", c_g, "1", "⟨F_up,1; 1,0 | F'_max,1⟩");
        e.push("c_g4", c_g4, "1", "c_g^4");
        e.push(
            "target_vdd_over_h",
            cfg.target_vdd / (2.0 * PI * HBAR),
            "Hz",
            "|V_dd|/h",
        );
        e.push(
            "gamma_prime_cat",
            sol.field.scatter_rate,
            "1/s",
            "|V_dd|/(ħ·c_g^4·|⟨f⟩|)",
        );
        e.push("saturation_cat", sol.field.saturation, "1", "2Γ'/Γ");
        e.push("i_cat", sol.field.intensity, "W/m2", "s·I_sat");
        e.push(
            "i_cat_uw_per_cm2",
            sol.field.intensity * 1e2,
            "uW/cm2",
            "s·I_sat",
        );
        e.push("gamma_sup", sol.gamma_sup, "1/s", "Γ'·c_g^4·(1 + ⟨g⟩)");
        e.push(
            "gamma_sup_over_2pi",
            sol.gamma_sup / (2.0 * PI),
            "Hz",
            "Γ_sup/2π",
        );
        e.push("kappa", sol.kappa, "1", "V_dd/(ħΓ_sup) = -⟨f⟩/(1 + ⟨g⟩)");
        e.push(
            "kappa_approx",
            kappa_approx(*geom),
            "1",
            "closed form, native sign",
        );
        e.push(
            "kappa_approx_aligned",
            -kappa_approx(*geom),
            "1",
            "closed form, -⟨f⟩/(1+⟨g⟩) sign",
        );
    }
    if let Some(a) = adiabaticity {
        e.push(
            "merge_adiabaticity",
            a,
            "1",
            "max|dδZ/dt|/(ν_par·z0), raised-cosine ramp",
        );
    }

    Ok(LatticeBudget {
        species: sp.name.clone(),
        trap_perp: perp,
        trap_par: par,
        gamma_lat,
        catalysis_geometry: catalysis.map(|c| c.0),
        catalysis: catalysis.map(|c| c.1),
        adiabaticity,
        entries: e.0,
    })
}
