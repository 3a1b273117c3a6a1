//! `fable`: generate matrices, build and verify block-encoding circuits, run sweeps.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use fable_core::circuit::{count_gates, emit_text, parse_text, Circuit};
use fable_core::generators::{Family, GenSpec};
use fable_core::linalg::io::{read_dense_csv, read_matrix_market, write_matrix_market};
use fable_core::linalg::{spectral_norm, DenseMatrix, SparseMatrix};
use fable_core::metrics::presets::{preset, PRESET_NAMES};
use fable_core::metrics::{
    rotations_for_accuracy_with, run_sweep_to_file, ErrorEvaluator, SweepConfig, WORKERS_ENV,
};
use fable_core::simulator::{extract_block_with_limit, MAX_SIMULATED_QUBITS};
use fable_core::{
    encoding_error, BlockEncoding, Method, PreparedEncoding, Retention, SFableScaling,
};

const SCHEMA: u32 = 1;

/// Simulation ceiling with `--allow-large`.
const MAX_FORCED_SIMULATION_QUBITS: usize = 8;

#[derive(Parser, Debug)]
#[command(name = "fable", version, about = "FABLE / S-FABLE / LS-FABLE block-encoding circuits")]
struct Cli {
    /// Worker threads for parallel work (defaults to one per core).
    #[arg(long, global = true, env = WORKERS_ENV)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a seeded matrix and write it as MatrixMarket.
    Generate(GenerateArgs),
    /// Build a block-encoding circuit for a matrix.
    Encode(EncodeArgs),
    /// Simulate a circuit and compare its block with the matrix.
    Verify(VerifyArgs),
    /// Run a named or file-based parameter sweep to CSV.
    Sweep(SweepArgs),
    /// Gate counts of a circuit file or of an encoding.
    Counts(CountsArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// TOML file with a generator spec (flags below override its fields).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_family)]
    family: Option<Family>,
    #[arg(long)]
    n: Option<usize>,
    /// Relative sparsity |A|/N.
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    jx: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    jy: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    jz: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    hz: Option<f64>,
    #[arg(long)]
    random_couplings: bool,
    /// Laplacian x-axis qubits.
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    periodic: bool,
    /// Lower value bound of the thresholded-positive family.
    #[arg(long)]
    threshold: Option<f64>,
    /// Divide structured families by their max entry, as the sweeps do.
    #[arg(long)]
    normalize: bool,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct EncodeArgs {
    /// Matrix file: MatrixMarket, or dense CSV when the extension is .csv.
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, short, value_parser = parse_method)]
    method: Method,
    /// Drop rotations with |theta_hat| below this threshold.
    #[arg(long, conflicts_with = "epsilon")]
    delta: Option<f64>,
    /// Smallest circuit with spectral error below this target.
    #[arg(long)]
    epsilon: Option<f64>,
    /// FABLE only: divide by the max entry first and fold it into alpha.
    #[arg(long)]
    rescale: bool,
    #[arg(long, default_value = "when-needed", value_parser = parse_scaling)]
    sfable_scaling: SFableScaling,
    /// Circuit output (OpenQASM-style text).
    #[arg(long, short)]
    circuit: PathBuf,
    /// JSON report output; standard output when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    circuit: PathBuf,
    /// Defaults to the method recorded in the circuit file.
    #[arg(long, value_parser = parse_method)]
    method: Option<Method>,
    /// Defaults to the alpha recorded in the circuit file.
    #[arg(long)]
    alpha: Option<f64>,
    /// Largest accepted deviation between simulated and closed-form blocks.
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// Simulate above the n <= 6 guard (up to n = 8).
    #[arg(long)]
    allow_large: bool,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, conflicts_with = "config", required_unless_present_any = ["config", "list_presets"])]
    preset: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    list_presets: bool,
    /// Print the resolved config as TOML and exit.
    #[arg(long)]
    print_config: bool,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Include n = 12, 13 points (about 0.5-2 GiB per dense matrix).
    #[arg(long)]
    allow_large: bool,
    /// Record wall time per point (rows are then no longer reproducible).
    #[arg(long)]
    timing: bool,
    #[arg(long, short, required_unless_present_any = ["list_presets", "print_config"])]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CountsArgs {
    /// Count the gates of an existing circuit file.
    #[arg(long, conflicts_with_all = ["input", "method"], required_unless_present = "input")]
    circuit: Option<PathBuf>,
    /// Count the gates an encoding of this matrix would have.
    #[arg(long, short, requires = "method")]
    input: Option<PathBuf>,
    #[arg(long, short, value_parser = parse_method)]
    method: Option<Method>,
    #[arg(long, conflicts_with = "budget")]
    delta: Option<f64>,
    /// Keep this many of the largest rotations.
    #[arg(long)]
    budget: Option<usize>,
    /// Report SWAPs as gates instead of three CNOTs each.
    #[arg(long)]
    raw_swaps: bool,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: fable_core::FableError| e.to_string())
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.replace('-', "_").parse().map_err(|e: fable_core::FableError| e.to_string())
}

fn parse_scaling(s: &str) -> Result<SFableScaling, String> {
    s.parse().map_err(|e: fable_core::FableError| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// `Ok(false)` means the command ran but its check failed.
fn run(cli: Cli) -> Result<bool> {
    if let Some(workers) = cli.workers {
        if workers == 0 {
            bail!("--workers must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .context("configuring worker threads")?;
    }
    match cli.command {
        Command::Generate(args) => generate(args),
        Command::Encode(args) => encode(args),
        Command::Verify(args) => verify(args),
        Command::Sweep(args) => sweep(args, cli.workers),
        Command::Counts(args) => counts(args),
    }
}

/// Writes to stdout; a closed pipe (`fable ... | head`) is not an error.
fn emit(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn print_json(v: &Value) -> Result<()> {
    emit(&(serde_json::to_string_pretty(v)? + "\n"))
}

fn read_matrix(path: &Path) -> Result<SparseMatrix> {
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let m = if is_csv {
        SparseMatrix::from_dense(&read_dense_csv(path)?)
    } else {
        read_matrix_market(path)?
    };
    Ok(m)
}

fn generate(args: GenerateArgs) -> Result<bool> {
    let mut spec = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            toml::from_str::<GenSpec>(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => {
            let family = args.family.ok_or_else(|| anyhow!("--family is required without --config"))?;
            GenSpec::new(family, 0)
        }
    };
    if let Some(f) = args.family {
        spec.family = f;
    }
    if let Some(n) = args.n {
        spec.n = n;
    }
    if args.config.is_none() && args.n.is_none() {
        bail!("--n is required without --config");
    }
    macro_rules! apply {
        ($($field:ident),*) => { $( if let Some(v) = args.$field { spec.$field = v; } )* };
    }
    apply!(s, seed, jx, jy, jz, hz, threshold);
    if args.nx.is_some() {
        spec.nx = args.nx;
    }
    spec.random_couplings |= args.random_couplings;
    spec.periodic |= args.periodic;

    let a = if args.normalize { spec.generate_for_encoding()? } else { spec.generate()? };
    let comment = format!("generated: {}", serde_json::to_string(&spec)?);
    write_matrix_market(&args.output, &a, &[comment])?;
    print_json(&json!({
        "schema": SCHEMA,
        "output": args.output,
        "n": a.qubits(),
        "nnz": a.nnz(),
        "s": a.relative_sparsity(),
        "max_abs_entry": a.max_abs_entry(),
        "spec": spec,
        "normalized": args.normalize,
    }))?;
    Ok(true)
}

fn prepare(method: Method, a: &SparseMatrix, rescale: bool, scaling: SFableScaling) -> Result<PreparedEncoding> {
    let prepared = match method {
        Method::Fable if rescale => PreparedEncoding::fable_rescaled(&a.to_dense())?,
        Method::Fable => PreparedEncoding::fable(&a.to_dense()).map_err(|e| match e {
            fable_core::FableError::Domain { .. } => {
                anyhow!("{e}; FABLE needs entries in [-1, 1], pass --rescale to divide by the max entry")
            }
            other => other.into(),
        })?,
        _ => PreparedEncoding::prepare_with(method, a, scaling)?,
    };
    Ok(prepared)
}

fn encode(args: EncodeArgs) -> Result<bool> {
    if args.rescale && args.method != Method::Fable {
        bail!("--rescale only applies to --method fable");
    }
    let a = read_matrix(&args.input)?;
    let dense = a.to_dense();
    let prepared = prepare(args.method, &a, args.rescale, args.sfable_scaling)?;

    let mut target = Value::Null;
    let mut reached = true;
    let retention = match (args.delta, args.epsilon) {
        (_, Some(eps)) if args.method == Method::LsFable => {
            target = json!(eps);
            Retention::Threshold(0.0)
        }
        (_, Some(eps)) => {
            target = json!(eps);
            let eval = ErrorEvaluator::from_prepared(prepared.clone(), &dense)?;
            let r = rotations_for_accuracy_with(&eval, eps)?;
            reached = r.reached;
            if r.reached {
                Retention::Budget(r.rotations)
            } else {
                Retention::Threshold(0.0)
            }
        }
        (Some(d), None) if d < 0.0 => bail!("--delta must be non-negative"),
        (d, None) => Retention::Threshold(d.unwrap_or(0.0)),
    };
    let enc = BlockEncoding::from_prepared(&prepared, retention)?;
    let epsilon = encoding_error(&dense, &enc)?;
    if let Some(t) = target.as_f64() {
        reached = epsilon < t;
    }
    std::fs::write(&args.circuit, emit_text(&enc.circuit))
        .with_context(|| format!("writing {}", args.circuit.display()))?;

    let report = json!({
        "schema": SCHEMA,
        "method": enc.method,
        "n": enc.qubits(),
        "nnz": a.nnz(),
        "alpha": enc.alpha,
        "ancillas": enc.ancillas,
        "norm": prepared.norm,
        "delta": enc.delta,
        "epsilon": epsilon,
        "target_epsilon": target,
        "reached": reached,
        "gates": count_gates(&enc.circuit, true),
        // LS-FABLE also rotates by pi/2 at position 0; this count leaves it out.
        "data_rotations": (enc.method == Method::LsFable).then_some(a.nnz()),
        "circuit": args.circuit,
        "config": {
            "input": args.input,
            "method": args.method,
            "delta": args.delta,
            "epsilon": args.epsilon,
            "rescale": args.rescale,
            "sfable_scaling": args.sfable_scaling,
            "circuit": args.circuit,
            "report": args.report,
        },
    });
    match &args.report {
        Some(path) => std::fs::write(path, serde_json::to_string_pretty(&report)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?,
        None => print_json(&report)?,
    }
    if !reached {
        eprintln!("target error not reached; the report describes the complete circuit");
    }
    Ok(reached)
}

fn read_circuit(path: &Path) -> Result<Circuit> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_text(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Closed-form approximation matching the circuit's `alpha` and `delta`.
fn closed_form(method: Method, a: &SparseMatrix, alpha: f64, delta: f64) -> Result<DenseMatrix> {
    let candidates: Vec<PreparedEncoding> = match method {
        Method::Fable => vec![prepare(method, a, false, SFableScaling::default()), prepare(method, a, true, SFableScaling::default())]
            .into_iter()
            .filter_map(Result::ok)
            .collect(),
        Method::SFable => vec![
            PreparedEncoding::prepare_with(method, a, SFableScaling::WhenNeeded)?,
            PreparedEncoding::prepare_with(method, a, SFableScaling::MaxEntry)?,
        ],
        Method::LsFable => vec![PreparedEncoding::lsfable(a)?],
    };
    let p = candidates
        .into_iter()
        .find(|p| (p.alpha() - alpha).abs() <= 1e-12 * alpha)
        .ok_or_else(|| anyhow!("no {method} encoding of this matrix has alpha = {alpha}"))?;
    let retention = Retention::Threshold(delta);
    Ok(p.approximation(&p.retained(retention)))
}

fn verify(args: VerifyArgs) -> Result<bool> {
    let circuit = read_circuit(&args.circuit)?;
    if circuit.width() % 2 == 0 {
        bail!("circuit width {} is not 2n + 1", circuit.width());
    }
    let n = (circuit.width() - 1) / 2;
    let limit = if args.allow_large { MAX_FORCED_SIMULATION_QUBITS } else { MAX_SIMULATED_QUBITS };
    if n > limit {
        bail!(
            "n = {n} exceeds the simulation guard (n <= {limit}); use `fable encode`, whose report gives the closed-form error"
        );
    }
    let method = args
        .method
        .or(circuit.meta.method)
        .ok_or_else(|| anyhow!("circuit has no method comment; pass --method"))?;
    let alpha = args.alpha.unwrap_or(circuit.meta.alpha);
    if !(alpha > 0.0) {
        bail!("alpha must be positive");
    }
    let a = read_matrix(&args.matrix)?;
    if a.qubits() != n {
        bail!("matrix has n = {}, circuit has n = {n}", a.qubits());
    }
    let block = extract_block_with_limit(&circuit, n, limit)?;
    let simulated = block.scale(1.0 / alpha);
    let epsilon = spectral_norm(&a.to_dense().sub(&simulated)?, 1e-8)?;
    let predicted = closed_form(method, &a, alpha, circuit.meta.delta)?;
    let deviation = simulated.max_abs_diff(&predicted)?;
    let pass = deviation <= args.tolerance;
    print_json(&json!({
        "schema": SCHEMA,
        "pass": pass,
        "n": n,
        "method": method,
        "alpha": alpha,
        "delta": circuit.meta.delta,
        "epsilon": epsilon,
        "max_deviation": deviation,
        "config": {
            "matrix": args.matrix,
            "circuit": args.circuit,
            "method": args.method,
            "alpha": args.alpha,
            "tolerance": args.tolerance,
            "allow_large": args.allow_large,
        },
    }))?;
    if !pass {
        eprintln!("simulated block deviates from the closed form by {deviation:e}");
    }
    Ok(pass)
}

fn sweep(args: SweepArgs, workers: Option<usize>) -> Result<bool> {
    if args.list_presets {
        emit(&PRESET_NAMES.iter().map(|n| format!("{n}\n")).collect::<String>())?;
        return Ok(true);
    }
    let mut cfg = match (&args.preset, &args.config) {
        (Some(name), _) => preset(name)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            SweepConfig::from_toml(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        (None, None) => bail!("pass --preset or --config"),
    };
    if let Some(k) = args.samples {
        cfg.samples = k;
        cfg.samples_per_n.values_mut().for_each(|v| *v = (*v).min(k));
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.allow_large |= args.allow_large;
    cfg.timing |= args.timing;
    if args.print_config {
        emit(&cfg.to_toml()?)?;
        return Ok(true);
    }
    let output = args.output.ok_or_else(|| anyhow!("--output is required"))?;
    let outcome = run_sweep_to_file(&cfg, &output)?;
    if !outcome.skipped_n.is_empty() {
        eprintln!(
            "skipped n = {:?}: above 11 qubits needs --allow-large (one dense matrix is 8*4^n bytes)",
            outcome.skipped_n
        );
    }
    for v in &outcome.violations {
        eprintln!(
            "threshold bound violated: {} n={} seed={} delta={} epsilon={} > {}",
            v.record.method, v.record.n, v.record.seed, v.record.delta, v.record.epsilon, v.bound
        );
    }
    if !outcome.non_monotone.is_empty() {
        eprintln!(
            "{} threshold points have a larger error than a larger threshold on the same instance",
            outcome.non_monotone.len()
        );
    }
    print_json(&json!({
        "schema": SCHEMA,
        "output": output,
        "rows": outcome.records.len(),
        "bound_violations": outcome.violations.len(),
        "non_monotone_points": outcome.non_monotone.len(),
        "max_error_to_bound_ratio": outcome.max_bound_ratio,
        "skipped_n": outcome.skipped_n,
        "workers": workers,
        "config": cfg,
    }))?;
    Ok(outcome.violations.is_empty())
}

fn counts(args: CountsArgs) -> Result<bool> {
    let expand = !args.raw_swaps;
    let (gates, source) = match (&args.circuit, &args.input) {
        (Some(path), _) => (count_gates(&read_circuit(path)?, expand), json!({ "circuit": path })),
        (None, Some(path)) => {
            let method = args.method.ok_or_else(|| anyhow!("--method is required with --input"))?;
            let a = read_matrix(path)?;
            let p = prepare(method, &a, method == Method::Fable && a.max_abs_entry() > 1.0, SFableScaling::default())?;
            let retention = match args.budget {
                Some(k) => Retention::Budget(k),
                None => Retention::Threshold(args.delta.unwrap_or(0.0)),
            };
            let mut gates = p.gate_counts(retention);
            if !expand {
                // The assembled circuits hold n SWAPs, counted above as 3n CNOTs.
                let n = p.qubits();
                gates = fable_core::GateCounts::new(gates.rotations, gates.cnots - 3 * n, gates.hadamards, n);
            }
            (
                gates,
                json!({ "input": path, "method": method, "delta": args.delta, "budget": args.budget }),
            )
        }
        (None, None) => bail!("pass --circuit or --input"),
    };
    print_json(&json!({
        "schema": SCHEMA,
        "gates": gates,
        "swaps_expanded": expand,
        "config": source,
    }))?;
    Ok(true)
}
