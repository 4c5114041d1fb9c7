//! Command-line front end: state ingestion, measure computation, theorem
//! verification sweeps, and end-to-end reproduction runs.
//!
//! Every command prints a JSON run report to stdout. Exit codes: 0 success,
//! 1 assertion failure, 2 input error, 3 dimension cap exceeded.

mod report;
mod sweep;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use nonbilocal_core::measures::OptimizerConfig;
use nonbilocal_core::nonbilocal::{
    bound_thm3, bound_thm4, nonbilocal, nonbilocal_pure, thm5_closed, BilocalInput,
};
use nonbilocal_core::statespec::{StateSpec, BUILTIN_NAMES};
use nonbilocal_core::{
    affinity_min, geometric_discord, hs_min, DensityOperator, Error, MeasureResult,
};

use report::RunReport;

#[derive(Parser)]
#[command(
    name = "nonbilocal",
    about = "Affinity-based nonlocality and nonbilocality measures",
    long_about = None
)]
struct Cli {
    /// Optimizer seed; every run echoes it for replay
    #[arg(long, global = true, env = "NONBILOCAL_SEED", default_value_t = 0)]
    seed: u64,

    /// Haar restarts per optimization
    #[arg(long, global = true, default_value_t = 64)]
    restarts: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureKind {
    /// Hilbert-Schmidt MIN (maximal disturbance)
    Hs,
    /// geometric discord (minimal disturbance)
    Gd,
    /// affinity-based MIN
    Affinity,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a bipartite correlation measure of one state
    Min {
        /// State file (JSON) or builtin name
        state: String,
        #[arg(long, value_enum)]
        measure: MeasureKind,
    },
    /// Compute the nonbilocal measure and its bounds for a pair of states
    Nonbilocal {
        /// First input (shared between a and b): file or builtin name
        state_ab: String,
        /// Second input (shared between c and d): file or builtin name
        state_cd: String,
    },
    /// Run the four built-in reproduction cases end to end
    ReproduceExamples,
    /// Evaluate a theorem or property on seeded random inputs, with CSV rows
    /// `trial,input_hash,lhs,rhs,margin,pass`
    Sweep {
        /// Number of random trials
        #[arg(long)]
        count: usize,
        /// Bipartite factor dimensions of each input, e.g. 2x2
        #[arg(long, default_value = "2x2")]
        dims: String,
        #[arg(long, value_enum)]
        check: sweep::CheckKind,
        /// CSV output path (rows also echoed in the report when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(cli));
}

fn exit_code_for(err: &anyhow::Error) -> i32 {
    if let Some(Error::DimensionCap { .. }) = err.downcast_ref::<Error>() {
        return 3;
    }
    2
}

fn run(cli: Cli) -> i32 {
    let config = OptimizerConfig {
        restarts: cli.restarts,
        seed: cli.seed,
        ..OptimizerConfig::default()
    };
    if let Err(e) = config.validate() {
        eprintln!("error: {e}");
        return 2;
    }
    let started = Instant::now();
    let outcome = match &cli.command {
        Command::Min { state, measure } => cmd_min(state, *measure, &config),
        Command::Nonbilocal { state_ab, state_cd } => cmd_nonbilocal(state_ab, state_cd, &config),
        Command::ReproduceExamples => cmd_reproduce_examples(&config),
        Command::Sweep {
            count,
            dims,
            check,
            out,
        } => sweep::cmd_sweep(*count, dims, *check, out.as_deref(), &config),
    };
    match outcome {
        Ok(mut report) => {
            report.wall_time_ms = started.elapsed().as_millis() as u64;
            report.emit();
            if report.all_pass() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code_for(&e)
        }
    }
}

/// Loads a state argument: a readable file wins, otherwise a builtin name.
fn load_spec(arg: &str) -> anyhow::Result<StateSpec> {
    let path = PathBuf::from(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| anyhow::anyhow!("reading {}: {e}", path.display()))?;
        let spec: StateSpec = serde_json::from_str(&text)
            .map_err(|e| anyhow::anyhow!("parsing {} (line {}): {e}", path.display(), e.line()))?;
        return Ok(spec);
    }
    if BUILTIN_NAMES.contains(&arg) {
        return Ok(StateSpec::builtin(arg));
    }
    anyhow::bail!(
        "`{arg}` is neither a readable file nor a builtin ({})",
        BUILTIN_NAMES.join(", ")
    )
}

fn load_state(arg: &str) -> anyhow::Result<(StateSpec, DensityOperator)> {
    let spec = load_spec(arg)?;
    let rho = spec.to_density()?;
    Ok((spec, rho))
}

fn cmd_min(state: &str, kind: MeasureKind, config: &OptimizerConfig) -> anyhow::Result<RunReport> {
    let (spec, rho) = load_state(state)?;
    let result: MeasureResult = match kind {
        MeasureKind::Hs => hs_min(&rho, config)?,
        MeasureKind::Gd => geometric_discord(&rho, config)?,
        MeasureKind::Affinity => affinity_min(&rho, config)?,
    };
    let name = match kind {
        MeasureKind::Hs => "hs_min",
        MeasureKind::Gd => "geometric_discord",
        MeasureKind::Affinity => "affinity_min",
    };
    let mut report = RunReport::new(&format!("min --measure {name}"), config);
    report.inputs.push(spec);
    report.record("value", result.value);
    report.record_starts(&result);
    report.optimal_measurement = Some(result.optimal_measurement.to_string());
    Ok(report)
}

fn cmd_nonbilocal(
    state_ab: &str,
    state_cd: &str,
    config: &OptimizerConfig,
) -> anyhow::Result<RunReport> {
    let spec_ab = load_spec(state_ab)?;
    let spec_cd = load_spec(state_cd)?;
    let rho_ab = spec_ab.to_density()?;
    let rho_cd = spec_cd.to_density()?;
    let input = BilocalInput::new(rho_ab, rho_cd)?;

    let mut report = RunReport::new("nonbilocal", config);
    report.inputs.push(spec_ab.clone());
    report.inputs.push(spec_cd.clone());

    let result = nonbilocal(&input, config)?;
    report.record("value", result.value);
    report.record_starts(&result);
    report.optimal_measurement = Some(result.optimal_measurement.to_string());

    if let (Some(psi), Some(phi)) = (spec_ab.to_ket()?, spec_cd.to_ket()?) {
        let closed = nonbilocal_pure(&psi, &phi)?;
        report.record("pure_closed_value", closed);
        report.assert_close("pure_closed_matches_numeric", result.value, closed, 1e-5);
    }

    let b3 = bound_thm3(&input)?;
    report.record("eigenvalue_upper_bound", b3);
    report.assert_at_least("eigenvalue_bound_minus_value", b3 - result.value, -1e-7);
    if let Ok(b4) = bound_thm4(&input) {
        report.record("marginal_upper_bound", b4);
        report.assert_at_least("marginal_bound_minus_value", b4 - result.value, -1e-7);
    }
    if let Ok(t5) = thm5_closed(&input) {
        report.record("qubit_closed_printed", t5.closed_value);
        report.record("qubit_closed_direct", t5.direct_min_value);
    }
    Ok(report)
}

fn cmd_reproduce_examples(config: &OptimizerConfig) -> anyhow::Result<RunReport> {
    use nonbilocal_core::hilbert::swap_bipartite;
    use nonbilocal_core::statespec::{bell_phi_plus, builtin_ket, example3_mix, example4_classical};

    let mut report = RunReport::new("reproduce-examples", config);
    for name in [
        "ket00",
        "bell_phi_plus",
        "example3_mix",
        "example4_classical",
    ] {
        report.inputs.push(StateSpec::builtin(name));
    }

    // product ket with a maximally entangled ket
    let ket00 = builtin_ket("ket00")?.expect("pure builtin");
    let bell = bell_phi_plus();
    let input = BilocalInput::new(ket00.density(), bell.density())?;
    let numeric = nonbilocal(&input, config)?.value;
    let closed = nonbilocal_pure(&ket00, &bell)?;
    report.record("example1_numeric", numeric);
    report.record("example1_closed", closed);
    report.assert_close("example1_numeric", numeric, 0.5, 1e-6);
    report.assert_close("example1_closed", closed, 0.5, 1e-6);

    // two maximally entangled kets
    let input = BilocalInput::new(bell.density(), bell.density())?;
    let numeric = nonbilocal(&input, config)?.value;
    let closed = nonbilocal_pure(&bell, &bell)?;
    report.record("example2_numeric", numeric);
    report.record("example2_closed", closed);
    report.assert_close("example2_numeric", numeric, 0.75, 1e-6);
    report.assert_close("example2_closed", closed, 0.75, 1e-6);

    // rank-3 Bell mixture: the MIN value and the self-pair lower bound
    let rho = example3_mix();
    let min_value = affinity_min(&rho, config)?.value;
    report.record("example3_min", min_value);
    report.assert_close("example3_min", min_value, 1.0 / 6.0, 1e-6);
    let input = BilocalInput::new(swap_bipartite(&rho)?, rho)?;
    let result = nonbilocal(&input, config)?;
    report.record("example3_nonbilocal", result.value);
    report.assert_at_least(
        "example3_nonbilocal",
        result.value,
        5.0 / 12.0 - 1e-6,
    );
    if let Some(bell_start) = result.starts.iter().find(|s| s.label == "bell") {
        report.record("example3_bell_seed", 1.0 - bell_start.initial);
    }
    report.record_starts(&result);

    // classical-classical pair
    let rho = example4_classical();
    let input = BilocalInput::new(swap_bipartite(&rho)?, rho)?;
    let result = nonbilocal(&input, config)?;
    report.record("example4_nonbilocal", result.value);
    report.assert_close("example4_nonbilocal", result.value, 0.75, 1e-6);
    if let Some(had_start) = result.starts.iter().find(|s| s.label == "hadamard") {
        report.record("example4_hadamard_seed", 1.0 - had_start.initial);
    }
    report.record_starts(&result);

    Ok(report)
}
