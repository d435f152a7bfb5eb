//! Ensemble readout of the gate on a randomly filled lattice.
//!
//! Every occupied σ₊/σ₋ well pair is one readout unit. Doubly occupied
//! pairs run the gate; singly occupied ones pass through unchanged and
//! bias the measured populations toward the prepared input. The bias is
//! removed with two extra measurements on input `|10⟩`:
//!
//! * `unpaired_only`: the response `u` of units without a partner;
//! * `double_gate_with_flush`: gate, remove target-0 population, gate
//!   again. Only pairs survive with `|10⟩`, with probability `π a²` where
//!   `a = P(10 → 11)`; the reverse transition has the same probability
//!   because the pulse propagator is a symmetric matrix.
//!
//! With `c = m₁₁ - u₁₁` from the mixed stage, `a = c/π + u₁₁` and the
//! double-gate fraction `D = π a²` give `u₁₁² π² + (2cu₁₁ - D) π + c² = 0`
//! for the paired fraction `π`, after which every entry is corrected as
//! `(m - (1 - π) u) / π`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::format::sig9;
use crate::gate::{TruthTable, LABELS};

/// The only input the background protocol is defined for.
pub const PROTOCOL_INPUT: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeFill {
    pub n_sites: usize,
    pub fill_probability: f64,
    pub seed: u64,
    /// `(σ₊ occupied, σ₋ occupied)` per site.
    pub occupancy: Vec<(bool, bool)>,
}

impl LatticeFill {
    pub fn paired(&self) -> u64 {
        self.occupancy.iter().filter(|(a, b)| *a && *b).count() as u64
    }

    pub fn unpaired(&self) -> u64 {
        self.occupancy.iter().filter(|(a, b)| a ^ b).count() as u64
    }

    pub fn units(&self) -> u64 {
        self.paired() + self.unpaired()
    }

    /// The singly occupied sites alone, as loaded for the unpaired-only
    /// measurement.
    pub fn unpaired_subsample(&self) -> LatticeFill {
        let occupancy: Vec<_> = self
            .occupancy
            .iter()
            .copied()
            .filter(|(a, b)| a ^ b)
            .collect();
        LatticeFill {
            n_sites: occupancy.len(),
            fill_probability: self.fill_probability,
            seed: self.seed,
            occupancy,
        }
    }
}

/// Independent Bernoulli occupation of every well.
pub fn simulate_fill(n_sites: usize, p: f64, seed: u64) -> Result<LatticeFill> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("fill probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let occupancy = (0..n_sites)
        .map(|_| (rng.gen_bool(p), rng.gen_bool(p)))
        .collect();
    Ok(LatticeFill {
        n_sites,
        fill_probability: p,
        seed,
        occupancy,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StageKind {
    PairedAndUnpaired,
    UnpairedOnly,
    DoubleGateWithFlush,
}

impl StageKind {
    pub fn name(self) -> &'static str {
        match self {
            StageKind::PairedAndUnpaired => "paired_and_unpaired",
            StageKind::UnpairedOnly => "unpaired_only",
            StageKind::DoubleGateWithFlush => "double_gate_with_flush",
        }
    }

    fn stream(self) -> u64 {
        match self {
            StageKind::PairedAndUnpaired => 0,
            StageKind::UnpairedOnly => 1,
            StageKind::DoubleGateWithFlush => 2,
        }
    }
}

fn label<S: Serializer>(i: &usize, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(LABELS[*i])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeasurementStage {
    pub stage: StageKind,
    #[serde(serialize_with = "label")]
    pub input: usize,
    /// Units read out in each logical state.
    pub counts: [u64; 4],
    /// Units that scattered or were flushed.
    pub lost: u64,
    /// Units loaded.
    pub n: u64,
}

impl MeasurementStage {
    /// `(p00, p01, p10, p11, leaked)`.
    pub fn fractions(&self) -> [f64; 5] {
        if self.n == 0 {
            return [0.0; 5];
        }
        let n = self.n as f64;
        let c = self.counts;
        [
            c[0] as f64 / n,
            c[1] as f64 / n,
            c[2] as f64 / n,
            c[3] as f64 / n,
            self.lost as f64 / n,
        ]
    }

    pub fn csv_row(&self) -> String {
        let f = self.fractions();
        format!(
            "{},{},{},{},{},{},{},{}",
            self.stage.name(),
            LABELS[self.input],
            sig9(f[0]),
            sig9(f[1]),
            sig9(f[2]),
            sig9(f[3]),
            sig9(f[4]),
            self.n
        )
    }
}

pub const STAGE_CSV_HEADER: &str = "stage,input,p00,p01,p10,p11,leaked,n";

pub fn stages_to_csv(stages: &[MeasurementStage]) -> String {
    let mut out = format!("{STAGE_CSV_HEADER}\n");
    for s in stages {
        out.push_str(&s.csv_row());
        out.push('\n');
    }
    out
}

/// Draws a multinomial sample as a chain of binomials.
fn multinomial<R: Rng>(rng: &mut R, n: u64, probs: &[f64; 5]) -> [u64; 5] {
    let mut out = [0u64; 5];
    let mut left = n;
    let mut mass = 1.0;
    for k in 0..4 {
        if left == 0 {
            break;
        }
        let p = if mass > 0.0 {
            (probs[k].max(0.0) / mass).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let draw = Binomial::new(left, p).map(|b| b.sample(rng)).unwrap_or(0);
        out[k] = draw;
        left -= draw;
        mass -= probs[k].max(0.0);
    }
    out[4] = left;
    out
}

fn normalized(mut p: [f64; 5]) -> [f64; 5] {
    for v in p.iter_mut() {
        *v = v.max(0.0);
    }
    let s: f64 = p.iter().sum();
    if s > 0.0 {
        p.map(|v| v / s)
    } else {
        p
    }
}

/// Outcome distribution of a pair after gate, flush of target-0, gate.
fn double_gate_distribution(table: &TruthTable, input: usize) -> [f64; 5] {
    let first = table.row_with_loss(input);
    let mut out = [0.0; 5];
    out[4] = first[4] + first[0] + first[2];
    for survivor in [1, 3] {
        let second = table.row_with_loss(survivor);
        for k in 0..5 {
            out[k] += first[survivor] * second[k];
        }
    }
    out
}

/// Outcome of an unpaired unit: the prepared state, lost to the flush if
/// its target bit is 0.
fn unpaired_distribution(input: usize, flush: bool) -> [f64; 5] {
    let mut out = [0.0; 5];
    if flush && input & 1 == 0 {
        out[4] = 1.0;
    } else {
        out[input] = 1.0;
    }
    out
}

/// Reads out one stage of the protocol on `fill`.
pub fn run_stage(
    fill: &LatticeFill,
    table: &TruthTable,
    input: usize,
    stage: StageKind,
    seed: u64,
) -> Result<MeasurementStage> {
    if input >= 4 {
        return Err(invalid(format!("input index {input} out of range")));
    }
    let paired = fill.paired();
    let unpaired = fill.unpaired();
    let (pair_dist, single_dist) = match stage {
        StageKind::PairedAndUnpaired => (
            table.row_with_loss(input),
            unpaired_distribution(input, false),
        ),
        StageKind::UnpairedOnly => {
            if paired > 0 {
                return Err(invalid(format!(
                    "unpaired_only stage needs a fill without pairs, found {paired}"
                )));
            }
            (
                table.row_with_loss(input),
                unpaired_distribution(input, false),
            )
        }
        StageKind::DoubleGateWithFlush => {
            if input != PROTOCOL_INPUT {
                return Err(invalid(format!(
                    "double_gate_with_flush is defined for input 10, got {}",
                    LABELS[input]
                )));
            }
            (
                double_gate_distribution(table, input),
                unpaired_distribution(input, true),
            )
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stage.stream());
    let a = multinomial(&mut rng, paired, &normalized(pair_dist));
    let b = multinomial(&mut rng, unpaired, &single_dist);
    Ok(MeasurementStage {
        stage,
        input,
        counts: [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]],
        lost: a[4] + b[4],
        n: paired + unpaired,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectedRow {
    #[serde(serialize_with = "label")]
    pub input: usize,
    /// `(p00, p01, p10, p11, leaked)` of paired units.
    pub populations: [f64; 5],
    /// Bootstrap standard errors; NaN without bootstrap replicates.
    pub std_err: [f64; 5],
    pub paired_fraction: f64,
    pub paired_fraction_err: f64,
}

fn check_stages(
    mixed: &MeasurementStage,
    unpaired: &MeasurementStage,
    double: &MeasurementStage,
) -> Result<()> {
    let expect = [
        (mixed, StageKind::PairedAndUnpaired),
        (unpaired, StageKind::UnpairedOnly),
        (double, StageKind::DoubleGateWithFlush),
    ];
    for (s, kind) in expect {
        if s.stage != kind {
            return Err(invalid(format!(
                "expected a {} stage, got {}",
                kind.name(),
                s.stage.name()
            )));
        }
        if s.input != PROTOCOL_INPUT {
            return Err(invalid(format!(
                "background subtraction is defined for input 10, got {}",
                LABELS[s.input]
            )));
        }
        if s.counts.iter().sum::<u64>() + s.lost != s.n {
            return Err(invalid(format!(
                "{} stage counts do not add up",
                kind.name()
            )));
        }
    }
    Ok(())
}

/// Point estimate from stage fractions: corrected row and paired fraction.
fn estimate(m: &[f64; 5], u: Option<&[f64; 5]>, d: f64) -> Result<([f64; 5], f64)> {
    let Some(u) = u else {
        return Ok((*m, 1.0));
    };
    if d <= 0.0 {
        return Err(Error::NonIdentifiable(
            "no pair survived the double-gate stage; the paired fraction is undetermined".into(),
        ));
    }
    let u11 = u[3];
    let c = m[3] - u11;
    // smaller root of u²π² + (2cu - D)π + c² = 0, written without cancellation
    let disc = (d * (d - 4.0 * c * u11)).max(0.0);
    let denom = d - 2.0 * c * u11 + disc.sqrt();
    if !(denom > 0.0) || c == 0.0 {
        return Err(Error::NonIdentifiable(
            "mixed stage carries no paired signal on |11⟩".into(),
        ));
    }
    let pi = (2.0 * c * c / denom).min(1.0);
    let mut g = [0.0; 5];
    for k in 0..5 {
        g[k] = (m[k] - (1.0 - pi) * u[k]) / pi;
    }
    Ok((g, pi))
}

/// Removes the unpaired-unit contribution from the mixed stage.
///
/// `bootstrap` parametric replicates (resampling each stage's counts from
/// its own fractions) give the standard errors.
pub fn background_subtract(
    mixed: &MeasurementStage,
    unpaired: &MeasurementStage,
    double: &MeasurementStage,
    bootstrap: usize,
    seed: u64,
) -> Result<CorrectedRow> {
    check_stages(mixed, unpaired, double)?;
    let fm = mixed.fractions();
    let fu = unpaired.fractions();
    let fd = double.fractions();
    let u = (unpaired.n > 0).then_some(&fu);
    let (populations, paired_fraction) = estimate(&fm, u, fd[2])?;

    let mut std_err = [f64::NAN; 5];
    let mut paired_fraction_err = f64::NAN;
    if bootstrap > 0 && u.is_some() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sum = [0.0; 6];
        let mut sum_sq = [0.0; 6];
        let mut used = 0usize;
        for _ in 0..bootstrap {
            let resample = |rng: &mut ChaCha8Rng, s: &MeasurementStage, f: &[f64; 5]| {
                let c = multinomial(rng, s.n, f);
                let n = s.n.max(1) as f64;
                c.map(|k| k as f64 / n)
            };
            let bm = resample(&mut rng, mixed, &fm);
            let bu = resample(&mut rng, unpaired, &fu);
            let bd = resample(&mut rng, double, &fd);
            if let Ok((g, pi)) = estimate(&bm, Some(&bu), bd[2]) {
                for k in 0..5 {
                    sum[k] += g[k];
                    sum_sq[k] += g[k] * g[k];
                }
                sum[5] += pi;
                sum_sq[5] += pi * pi;
                used += 1;
            }
        }
        if used > 1 {
            let n = used as f64;
            let sd = |k: usize| ((sum_sq[k] - sum[k] * sum[k] / n).max(0.0) / (n - 1.0)).sqrt();
            for k in 0..5 {
                std_err[k] = sd(k);
            }
            paired_fraction_err = sd(5);
        }
    } else if bootstrap > 0 {
        std_err = [0.0; 5];
        paired_fraction_err = 0.0;
    }

    Ok(CorrectedRow {
        input: mixed.input,
        populations,
        std_err,
        paired_fraction,
        paired_fraction_err,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolRun {
    pub stages: [MeasurementStage; 3],
    pub corrected: CorrectedRow,
    /// True paired fraction of the simulated fill.
    pub true_paired_fraction: f64,
}

/// All three stages on input `|10⟩` and the corrected row. Seeds for the
/// stages and the bootstrap are split from `seed`.
pub fn run_protocol(
    fill: &LatticeFill,
    table: &TruthTable,
    bootstrap: usize,
    seed: u64,
) -> Result<ProtocolRun> {
    let input = PROTOCOL_INPUT;
    let mixed = run_stage(fill, table, input, StageKind::PairedAndUnpaired, seed)?;
    let single = run_stage(
        &fill.unpaired_subsample(),
        table,
        input,
        StageKind::UnpairedOnly,
        seed,
    )?;
    let double = run_stage(fill, table, input, StageKind::DoubleGateWithFlush, seed)?;
    let corrected = background_subtract(&mixed, &single, &double, bootstrap, seed ^ 0x5eed)?;
    let units = fill.units();
    Ok(ProtocolRun {
        stages: [mixed, single, double],
        corrected,
        true_paired_fraction: if units > 0 {
            fill.paired() as f64 / units as f64
        } else {
            0.0
        },
    })
}
