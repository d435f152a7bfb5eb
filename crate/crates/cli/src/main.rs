//! `latticegate` command-line front end.

mod error;
mod output;

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use latticegate::ensemble::{run_protocol, simulate_fill, stages_to_csv, PROTOCOL_INPUT};
use latticegate::format::sig9;
use latticegate::gate::{dd_matrix_element, truth_table, GateEnvironment, PulseSpec, LABELS};
use latticegate::lattice::{lattice_budget, LatticeConfig};
use latticegate::overlap::{
    kappa_approx, kappa_map, mc_oracle, mean_fg, NearOrigin, QuadratureSpec, TrapGeometry,
};

use error::CliError;
use output::{emit, json_document, read_file, Provenance, DEFAULT_SEED};

#[derive(Parser)]
#[command(
    name = "latticegate",
    version,
    about = "Dipole-dipole gate budget for optical lattices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// κ, ⟨f⟩ and ⟨g⟩ for one trap geometry.
    Kappa(KappaArgs),
    /// κ over a grid of trap widths, as CSV.
    Map(MapArgs),
    /// Trap, scattering and catalysis budget from a lattice configuration.
    Budget(BudgetArgs),
    /// C-NOT truth table at an operating point.
    Gate(GateArgs),
    /// Simulated ensemble readout with background subtraction.
    Ensemble(EnsembleArgs),
}

#[derive(Args, Serialize, Clone)]
struct QuadArgs {
    /// Relative tolerance of the radial quadrature.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Kernel-evaluation budget.
    #[arg(long, default_value_t = 10_000_000)]
    max_evals: u64,
    /// Gauss-Legendre order per angular panel.
    #[arg(long, default_value_t = 32)]
    angular_order: usize,
    /// Gauss order of the Gauss-Kronrod pair (10 or 15).
    #[arg(long, default_value_t = 10)]
    radial_order: usize,
    /// Integrate all the way to the origin instead of extrapolating.
    #[arg(long)]
    direct_origin: bool,
}

impl QuadArgs {
    fn spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            radial_order: self.radial_order,
            angular_order: self.angular_order,
            rel_tol: self.tol,
            max_evaluations: self.max_evals,
            near_origin: if self.direct_origin {
                NearOrigin::Direct
            } else {
                NearOrigin::Taylor
            },
            ..QuadratureSpec::default()
        }
    }
}

#[derive(Args, Serialize)]
struct KappaArgs {
    #[arg(long)]
    eta_perp: f64,
    #[arg(long)]
    eta_par: f64,
    #[command(flatten)]
    quad: QuadArgs,
    /// Also run the Monte Carlo cross-check with this many samples.
    #[arg(long)]
    mc_samples: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct MapArgs {
    /// `START:STOP:COUNT` or a comma-separated list.
    #[arg(long)]
    eta_perp: String,
    /// `START:STOP:COUNT` or a comma-separated list.
    #[arg(long)]
    eta_par: String,
    #[command(flatten)]
    quad: QuadArgs,
    /// Worker threads; 0 picks the machine default.
    #[arg(long, default_value_t = 0)]
    #[serde(skip)]
    jobs: usize,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct BudgetArgs {
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    quad: QuadArgs,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

/// Where the gate environment comes from: a lattice configuration, or
/// explicit rates.
#[derive(Args, Serialize, Clone)]
struct EnvArgs {
    #[arg(long, conflicts_with_all = ["vdd_over_h", "gamma_single", "gamma_dd"])]
    config: Option<PathBuf>,
    /// Level shift V_dd/h of |1,1⟩ in Hz (signed).
    #[arg(long, requires = "gamma_single")]
    vdd_over_h: Option<f64>,
    /// Single-atom scattering rate, 1/s.
    #[arg(long, requires = "vdd_over_h")]
    gamma_single: Option<f64>,
    /// Cooperative decay rate on |1,1⟩, 1/s.
    #[arg(long, default_value_t = 0.0)]
    gamma_dd: f64,
    /// |shift|/Ω at the default operating point.
    #[arg(long, default_value_t = 10.0)]
    shift_to_rabi: f64,
    /// Override Ω, rad/s.
    #[arg(long)]
    rabi: Option<f64>,
    /// Drive detuning from the shifted line, rad/s.
    #[arg(long, default_value_t = 0.0)]
    detuning: f64,
    /// Override the pulse length, s (default: π/Ω).
    #[arg(long)]
    duration: Option<f64>,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Args, Serialize)]
struct GateArgs {
    #[command(flatten)]
    env: EnvArgs,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct EnsembleArgs {
    #[command(flatten)]
    env: EnvArgs,
    /// Number of σ₊/σ₋ well pairs.
    #[arg(long, default_value_t = 100_000)]
    sites: usize,
    /// Occupation probability of each well.
    #[arg(long, default_value_t = 0.5)]
    fill: f64,
    /// Bootstrap replicates for the standard errors.
    #[arg(long, default_value_t = 200)]
    bootstrap: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("cannot parse grid `{spec}`"));
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [a, b, n] => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            let n: usize = n.trim().parse().map_err(|_| bad())?;
            match n {
                0 => Err(bad()),
                1 => Ok(vec![a]),
                _ => Ok((0..n)
                    .map(|i| match i {
                        i if i + 1 == n => b,
                        i => a + (b - a) * i as f64 / (n - 1) as f64,
                    })
                    .collect()),
            }
        }
        [_] => spec
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
            .collect(),
        _ => Err(bad()),
    }
}

#[derive(Serialize)]
struct KappaReport {
    eta_perp: f64,
    eta_par: f64,
    kappa: f64,
    mean_f: f64,
    mean_g: f64,
    err_f: f64,
    err_g: f64,
    evaluations: u64,
    kappa_approx: f64,
    kappa_approx_aligned: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    monte_carlo: Option<latticegate::overlap::DipoleExpectation>,
}

fn cmd_kappa(args: &KappaArgs) -> Result<(), CliError> {
    let geom = TrapGeometry::new(args.eta_perp, args.eta_par)?;
    let e = mean_fg(geom, &args.quad.spec())?;
    let monte_carlo = match args.mc_samples {
        Some(n) => Some(mc_oracle(geom, n, args.seed)?),
        None => None,
    };
    let report = KappaReport {
        eta_perp: args.eta_perp,
        eta_par: args.eta_par,
        kappa: e.kappa(),
        mean_f: e.mean_f,
        mean_g: e.mean_g,
        err_f: e.err_f,
        err_g: e.err_g,
        evaluations: e.evaluations,
        kappa_approx: kappa_approx(geom),
        kappa_approx_aligned: -kappa_approx(geom),
        monte_carlo,
    };
    let prov = Provenance::new("kappa", args, &[], args.seed);
    emit(
        &json_document("kappa", &prov, &report)?,
        args.out.as_deref(),
    )
}

fn cmd_map(args: &MapArgs) -> Result<(), CliError> {
    let perp = parse_grid(&args.eta_perp)?;
    let par = parse_grid(&args.eta_par)?;
    let quad = args.quad.spec();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()?;
    let map = pool.install(|| kappa_map(&perp, &par, &quad))?;
    let prov = Provenance::new("map", args, &[], DEFAULT_SEED);
    let mut text = prov.csv_header();
    text.push_str(&format!("# failed_cells={}\n", map.failures()));
    text.push_str(&map.to_csv());
    emit(&text, args.out.as_deref())
}

fn load_config(path: &Path) -> Result<(String, LatticeConfig), CliError> {
    let text = read_file(path)?;
    let cfg = LatticeConfig::parse(&text)?;
    Ok((text, cfg))
}

fn cmd_budget(args: &BudgetArgs) -> Result<(), CliError> {
    let (text, cfg) = load_config(&args.config)?;
    let budget = lattice_budget(&cfg, &args.quad.spec())?;
    let prov = Provenance::new("budget", args, &[&text], DEFAULT_SEED);
    emit(
        &json_document("budget", &prov, &budget)?,
        args.out.as_deref(),
    )
}

/// Environment, pulse, and the configuration text that produced them.
fn resolve_env(args: &EnvArgs) -> Result<(GateEnvironment, PulseSpec, String), CliError> {
    let (env, text) = match (&args.config, args.vdd_over_h, args.gamma_single) {
        (Some(path), _, _) => {
            let (text, cfg) = load_config(path)?;
            let budget = lattice_budget(&cfg, &args.quad.spec())?;
            let sol = budget.catalysis.ok_or_else(|| {
                CliError::Usage("configuration leaves the catalysis geometry undefined".into())
            })?;
            let cg = cfg.species.catalysis_cg();
            let env = dd_matrix_element(sol.field.scatter_rate, cg, sol.mean_f, sol.mean_g)?;
            (env, text)
        }
        (None, Some(vdd), Some(gs)) => (
            GateEnvironment::new(2.0 * PI * vdd, args.gamma_dd, gs)?,
            String::new(),
        ),
        _ => {
            return Err(CliError::Usage(
                "give --config, or --vdd-over-h with --gamma-single".into(),
            ))
        }
    };
    let mut pulse = match args.rabi {
        Some(r) => PulseSpec::pi_pulse(r)?,
        None => PulseSpec::operating_point(&env, args.shift_to_rabi)?,
    };
    pulse = PulseSpec::new(
        pulse.rabi,
        args.detuning,
        args.duration.unwrap_or(pulse.duration),
    )?;
    Ok((env, pulse, text))
}

#[derive(Serialize)]
struct GateReport<'a> {
    environment: &'a GateEnvironment,
    kappa: f64,
    #[serde(flatten)]
    table: &'a latticegate::gate::TruthTable,
}

fn cmd_gate(args: &GateArgs) -> Result<(), CliError> {
    let (env, pulse, text) = resolve_env(&args.env)?;
    let table = truth_table(&env, &pulse)?;
    let report = GateReport {
        environment: &env,
        kappa: env.kappa(),
        table: &table,
    };
    let prov = Provenance::new("gate", args, &[&text], DEFAULT_SEED);
    emit(&json_document("gate", &prov, &report)?, args.out.as_deref())
}

fn cmd_ensemble(args: &EnsembleArgs) -> Result<(), CliError> {
    let (env, pulse, text) = resolve_env(&args.env)?;
    let table = truth_table(&env, &pulse)?;
    let fill = simulate_fill(args.sites, args.fill, args.seed)?;
    let run = run_protocol(&fill, &table, args.bootstrap, args.seed)?;

    let prov = Provenance::new("ensemble", args, &[&text], args.seed);
    let mut out = prov.csv_header();
    out.push_str(&format!(
        "# paired_fraction_true={}\n# paired_fraction_estimate={}\n# paired_fraction_err={}\n",
        sig9(run.true_paired_fraction),
        sig9(run.corrected.paired_fraction),
        sig9(run.corrected.paired_fraction_err),
    ));
    out.push_str(&stages_to_csv(&run.stages));
    let units = fill.units();
    let row = |name: &str, p: &[f64; 5]| {
        format!(
            "{name},{},{},{},{},{},{},{units}\n",
            LABELS[PROTOCOL_INPUT],
            sig9(p[0]),
            sig9(p[1]),
            sig9(p[2]),
            sig9(p[3]),
            sig9(p[4])
        )
    };
    out.push_str(&row("corrected", &run.corrected.populations));
    out.push_str(&row("corrected_stderr", &run.corrected.std_err));
    out.push_str(&row("gate", &table.row_with_loss(PROTOCOL_INPUT)));
    emit(&out, args.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Kappa(a) => cmd_kappa(a),
        Command::Map(a) => cmd_map(a),
        Command::Budget(a) => cmd_budget(a),
        Command::Gate(a) => cmd_gate(a),
        Command::Ensemble(a) => cmd_ensemble(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
