//! Two-qubit C-NOT driven by a Raman π-pulse on the dipole-shifted line.
//!
//! The control qubit is carried by the σ₋ atom and the target by the σ₊
//! atom. Only `|1,1⟩` feels the induced dipole-dipole interaction, so the
//! dynamics splits into two independent control sectors, each a driven
//! two-level problem on the target with state-dependent loss.
//!
//! Loss is modelled by the non-Hermitian Hamiltonian
//! `H = [[0, Ω/2], [Ω/2, -Δ]] - (i/2) diag(γ₀, γ₁)` where the γ are
//! population decay rates. Norm that leaves the computational space is
//! accumulated in [`TwoQubitState::leaked`].

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::atomics::{AngularMomentumKet, AtomSpecies};
use crate::constants::HBAR;
use crate::error::{invalid, Result};

/// Basis labels in state order; the first digit is the control.
pub const LABELS: [&str; 4] = ["00", "01", "10", "11"];

/// Output index of the ideal gate for each input index.
pub const IDEAL_CNOT: [usize; 4] = [0, 1, 3, 2];

const NORM_TOL: f64 = 1e-9;

/// Hyperfine assignments of the logical states:
/// `|1⟩± = |F_↑, ±1⟩`, `|0⟩± = |F_↓, ∓1⟩`, all in the vibrational ground state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogicalBasis {
    pub one_plus: AngularMomentumKet,
    pub one_minus: AngularMomentumKet,
    pub zero_plus: AngularMomentumKet,
    pub zero_minus: AngularMomentumKet,
}

impl LogicalBasis {
    pub fn for_species(species: &AtomSpecies) -> Result<Self> {
        Ok(Self {
            one_plus: AngularMomentumKet::new(species.f_up, 1.0)?,
            one_minus: AngularMomentumKet::new(species.f_up, -1.0)?,
            zero_plus: AngularMomentumKet::new(species.f_down, -1.0)?,
            zero_minus: AngularMomentumKet::new(species.f_down, 1.0)?,
        })
    }

    /// Index of `|control⟩₋ ⊗ |target⟩₊`.
    pub fn index(control: bool, target: bool) -> usize {
        2 * control as usize + target as usize
    }

    pub fn label(index: usize) -> &'static str {
        LABELS[index]
    }

    /// Parses `"10"` style labels.
    pub fn parse(label: &str) -> Result<usize> {
        LABELS
            .iter()
            .position(|l| *l == label)
            .ok_or_else(|| invalid(format!("unknown basis state `{label}`")))
    }
}

/// Rates seen by the pair during catalysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateEnvironment {
    /// `V_dd/ħ` on `|1,1⟩`, rad/s.
    pub shift: f64,
    /// Cooperative population decay added on `|1,1⟩`, 1/s.
    pub gamma_dd: f64,
    /// Single-atom population decay per atom in `|1⟩`, 1/s.
    pub gamma_single: f64,
}

impl GateEnvironment {
    pub fn new(shift: f64, gamma_dd: f64, gamma_single: f64) -> Result<Self> {
        if !shift.is_finite() {
            return Err(invalid("shift must be finite"));
        }
        if !(gamma_single.is_finite() && gamma_single >= 0.0) {
            return Err(invalid(format!(
                "gamma_single must be non-negative, got {gamma_single}"
            )));
        }
        if !(gamma_dd.is_finite() && gamma_dd >= 0.0) {
            return Err(invalid(format!(
                "gamma_dd must be non-negative, got {gamma_dd}"
            )));
        }
        if gamma_dd > gamma_single * (1.0 + 1e-12) {
            return Err(invalid(format!(
                "gamma_dd = {gamma_dd} exceeds gamma_single = {gamma_single}; \
                 cooperative decay can at most double the pair rate"
            )));
        }
        Ok(Self {
            shift,
            gamma_dd,
            gamma_single,
        })
    }

    pub fn decay_free(shift: f64) -> Result<Self> {
        Self::new(shift, 0.0, 0.0)
    }

    /// `V_dd` in joules.
    pub fn v_dd(&self) -> f64 {
        HBAR * self.shift
    }

    /// Population decay rate of each basis state.
    pub fn decay_rates(&self) -> [f64; 4] {
        let g = self.gamma_single;
        [0.0, g, g, 2.0 * g + self.gamma_dd]
    }

    /// `|V_dd| / (ħ Γ_sup)` with `Γ_sup = gamma_single + gamma_dd`.
    pub fn kappa(&self) -> f64 {
        self.shift / (self.gamma_single + self.gamma_dd)
    }
}

/// `⟨1,1|H_dd|1,1⟩ = -ħΓ' c_g⁴ ⟨f + ig⟩`.
pub fn dd_matrix_element(
    gamma_prime: f64,
    c_g: f64,
    mean_f: f64,
    mean_g: f64,
) -> Result<GateEnvironment> {
    if !(gamma_prime.is_finite() && gamma_prime >= 0.0) {
        return Err(invalid(format!(
            "single-atom scattering rate must be non-negative, got {gamma_prime}"
        )));
    }
    if !(c_g.is_finite() && mean_f.is_finite() && mean_g.is_finite()) {
        return Err(invalid("dipole coefficient and averages must be finite"));
    }
    let c4 = c_g.powi(4);
    GateEnvironment::new(
        -gamma_prime * c4 * mean_f,
        gamma_prime * c4 * mean_g,
        gamma_prime * c4,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PulseSpec {
    /// Two-photon Rabi frequency Ω, rad/s.
    pub rabi: f64,
    /// Detuning from the shifted `|1,0⟩ ↔ |1,1⟩` line, rad/s.
    pub detuning_from_shifted: f64,
    /// s
    pub duration: f64,
}

impl PulseSpec {
    pub fn new(rabi: f64, detuning_from_shifted: f64, duration: f64) -> Result<Self> {
        if !(rabi.is_finite() && rabi > 0.0) {
            return Err(invalid(format!(
                "Rabi frequency must be positive, got {rabi}"
            )));
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(invalid(format!(
                "duration must be positive, got {duration}"
            )));
        }
        if !detuning_from_shifted.is_finite() {
            return Err(invalid("detuning must be finite"));
        }
        Ok(Self {
            rabi,
            detuning_from_shifted,
            duration,
        })
    }

    /// Resonant π-pulse.
    pub fn pi_pulse(rabi: f64) -> Result<Self> {
        Self::new(rabi, 0.0, PI / rabi)
    }

    /// Resonant π-pulse with `Ω = |shift| / ratio`.
    pub fn operating_point(env: &GateEnvironment, ratio: f64) -> Result<Self> {
        if env.shift == 0.0 {
            return Err(invalid("no level shift: the gate has no operating point"));
        }
        if !(ratio.is_finite() && ratio > 0.0) {
            return Err(invalid(format!(
                "shift/Rabi ratio must be positive, got {ratio}"
            )));
        }
        Self::pi_pulse(env.shift.abs() / ratio)
    }
}

/// Ratio `|shift|/Ω` of the default operating point.
pub const DEFAULT_SHIFT_TO_RABI: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    pub amplitudes: [Complex64; 4],
    /// Population lost to scattering.
    pub leaked: f64,
}

impl TwoQubitState {
    pub fn new(amplitudes: [Complex64; 4], leaked: f64) -> Result<Self> {
        let s = Self { amplitudes, leaked };
        if !(leaked >= 0.0) || (s.total() - 1.0).abs() > NORM_TOL {
            return Err(invalid(format!(
                "state norm plus leakage is {}, expected 1",
                s.total()
            )));
        }
        Ok(s)
    }

    pub fn basis(index: usize) -> Self {
        let mut amplitudes = [Complex64::new(0.0, 0.0); 4];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self {
            amplitudes,
            leaked: 0.0,
        }
    }

    pub fn populations(&self) -> [f64; 4] {
        self.amplitudes.map(|a| a.norm_sqr())
    }

    /// Remaining population plus leakage.
    pub fn total(&self) -> f64 {
        self.populations().iter().sum::<f64>() + self.leaked
    }
}

/// `exp(-i H t)` for a complex 2×2 `H`.
fn propagator(h: [[Complex64; 2]; 2], t: f64) -> [[Complex64; 2]; 2] {
    let i = Complex64::i();
    let m = (h[0][0] + h[1][1]) * 0.5;
    let n = [[h[0][0] - m, h[0][1]], [h[1][0], h[1][1] - m]];
    let lambda = (n[0][0] * n[0][0] + n[0][1] * n[1][0]).sqrt();
    let z = lambda * t;
    let cos = z.cos();
    // sin(λt)/λ, with its series near λt = 0
    let sinc_t = if z.norm() < 1e-3 {
        let z2 = z * z;
        (1.0 - z2 / 6.0 + z2 * z2 / 120.0) * t
    } else {
        z.sin() / lambda
    };
    let phase = (-i * m * t).exp();
    let mut u = [[Complex64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            let id = if r == c {
                cos
            } else {
                Complex64::new(0.0, 0.0)
            };
            u[r][c] = phase * (id - i * sinc_t * n[r][c]);
        }
    }
    u
}

/// Applies the pulse. Each control sector is evolved on its own; the
/// control-0 sector sees the drive detuned by the dipole shift.
pub fn evolve_pulse(
    state: &TwoQubitState,
    pulse: &PulseSpec,
    env: &GateEnvironment,
) -> Result<TwoQubitState> {
    if (state.total() - 1.0).abs() > NORM_TOL {
        return Err(invalid(format!(
            "input state is not normalized (norm plus leakage {})",
            state.total()
        )));
    }
    let gamma = env.decay_rates();
    let half = Complex64::new(0.5 * pulse.rabi, 0.0);
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for control in [false, true] {
        let a = LogicalBasis::index(control, false);
        let b = LogicalBasis::index(control, true);
        let delta = if control {
            pulse.detuning_from_shifted
        } else {
            pulse.detuning_from_shifted + env.shift
        };
        let h = [
            [Complex64::new(0.0, -0.5 * gamma[a]), half],
            [half, Complex64::new(-delta, -0.5 * gamma[b])],
        ];
        let u = propagator(h, pulse.duration);
        let (ca, cb) = (state.amplitudes[a], state.amplitudes[b]);
        out[a] = u[0][0] * ca + u[0][1] * cb;
        out[b] = u[1][0] * ca + u[1][1] * cb;
    }
    let lost = if gamma.iter().all(|g| *g == 0.0) {
        0.0
    } else {
        let before: f64 = state.populations().iter().sum();
        let after: f64 = out.iter().map(|a| a.norm_sqr()).sum();
        (before - after).max(0.0)
    };
    Ok(TwoQubitState {
        amplitudes: out,
        leaked: state.leaked + lost,
    })
}

fn populations_by_label<S: Serializer>(p: &[f64; 4], s: S) -> std::result::Result<S::Ok, S::Error> {
    let map: BTreeMap<&str, f64> = LABELS.iter().copied().zip(p.iter().copied()).collect();
    map.serialize(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruthRow {
    pub input: String,
    #[serde(serialize_with = "populations_by_label")]
    pub populations: [f64; 4],
    pub leaked: f64,
    /// Population in the ideal C-NOT output.
    pub fidelity: f64,
    /// The same, renormalized to the atoms that did not scatter.
    pub fidelity_no_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatingPoint {
    pub rabi: f64,
    pub detuning_from_shifted: f64,
    pub duration: f64,
    pub shift: f64,
    pub gamma_single: f64,
    pub gamma_dd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruthTable {
    pub rows: Vec<TruthRow>,
    pub mean_fidelity: f64,
    pub mean_fidelity_no_loss: f64,
    pub operating_point: OperatingPoint,
}

impl TruthTable {
    /// Output distribution for one input, with loss as a fifth category.
    pub fn row_with_loss(&self, input: usize) -> [f64; 5] {
        let r = &self.rows[input];
        let p = r.populations;
        [p[0], p[1], p[2], p[3], r.leaked]
    }
}

/// Output populations for every basis input.
pub fn truth_table(env: &GateEnvironment, pulse: &PulseSpec) -> Result<TruthTable> {
    let mut rows = Vec::with_capacity(4);
    for input in 0..4 {
        let out = evolve_pulse(&TwoQubitState::basis(input), pulse, env)?;
        let populations = out.populations();
        let ideal = populations[IDEAL_CNOT[input]];
        let kept = 1.0 - out.leaked;
        rows.push(TruthRow {
            input: LABELS[input].to_string(),
            populations,
            leaked: out.leaked,
            fidelity: ideal,
            fidelity_no_loss: if kept > 0.0 { ideal / kept } else { 0.0 },
        });
    }
    let mean_fidelity = rows.iter().map(|r| r.fidelity).sum::<f64>() / 4.0;
    let mean_fidelity_no_loss = rows.iter().map(|r| r.fidelity_no_loss).sum::<f64>() / 4.0;
    Ok(TruthTable {
        rows,
        mean_fidelity,
        mean_fidelity_no_loss,
        operating_point: OperatingPoint {
            rabi: pulse.rabi,
            detuning_from_shifted: pulse.detuning_from_shifted,
            duration: pulse.duration,
            shift: env.shift,
            gamma_single: env.gamma_single,
            gamma_dd: env.gamma_dd,
        },
    })
}

/// Logical-one population of each atom, the quantity read out as cycling
/// fluorescence after the other level is shelved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AtomPopulations {
    pub control: f64,
    pub target: f64,
}

pub fn readout_projection(state: &TwoQubitState) -> AtomPopulations {
    let p = state.populations();
    AtomPopulations {
        control: p[2] + p[3],
        target: p[1] + p[3],
    }
}
