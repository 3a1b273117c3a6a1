//! Declarative parameter sweeps producing one CSV row per data point.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{rotations_for_accuracy_with, ErrorEvaluator, ScalingPoint};
use crate::circuit::Method;
use crate::encoders::{Retention, SFableScaling};
use crate::error::{FableError, Result};
use crate::generators::GenSpec;
use crate::linalg::io::format_real;
use crate::rng::derive_seed;

pub const CSV_HEADER: &str = "method,n,s,seed,delta,rotations,cnots,hadamards,epsilon,wall_time_ms";

/// Sweeps refuse larger points unless `allow_large` is set: one dense
/// `2^n x 2^n` matrix takes `8 * 4^n` bytes (32 MiB at n = 11, 512 MiB at
/// n = 13) and an evaluation holds about four of them.
pub const DEFAULT_MAX_SWEEP_QUBITS: usize = 11;

/// Hard ceiling even with `allow_large`.
pub const MAX_SWEEP_QUBITS: usize = 13;

/// Environment variable holding the worker-thread count.
pub const WORKERS_ENV: &str = "FABLE_WORKERS";

/// One benchmark data point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub method: Method,
    pub n: usize,
    /// Measured relative sparsity `|A| / N` of the instance.
    pub s: f64,
    /// Seed of the instance (replayable with the generator).
    pub seed: u64,
    pub delta: f64,
    pub rotations: usize,
    /// CNOTs with every SWAP counted as three.
    pub cnots: usize,
    pub hadamards: usize,
    pub epsilon: f64,
    /// Zero unless the sweep was run with timing enabled.
    pub wall_time_ms: f64,
}

impl SweepRecord {
    pub fn scaling_point(&self) -> ScalingPoint {
        ScalingPoint {
            s: self.s,
            n: self.n,
            epsilon: self.epsilon,
        }
    }

    pub fn total_gates(&self) -> usize {
        self.rotations + self.cnots + self.hadamards
    }

    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.method,
            self.n,
            format_real(self.s),
            self.seed,
            format_real(self.delta),
            self.rotations,
            self.cnots,
            self.hadamards,
            format_real(self.epsilon),
            format_real(self.wall_time_ms)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepMode {
    /// Keep `|A|` rotations (the LS-FABLE circuit size).
    Budget,
    /// Fewest rotations reaching each target error.
    Accuracy { epsilons: Vec<f64> },
    /// Drop rotations below each threshold.
    Threshold { deltas: Vec<f64> },
}

fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

fn default_s() -> Vec<f64> {
    vec![0.0]
}

fn default_samples() -> usize {
    1
}

/// A sweep: matrices from `generator` at every `(n, s, sample)`, evaluated
/// by every method at every point of `mode`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub name: String,
    /// Family and family parameters; `n`, `s` and `seed` are set per instance.
    pub generator: GenSpec,
    pub mode: SweepMode,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    pub n: Vec<usize>,
    #[serde(default = "default_s")]
    pub s: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Per-`n` sample overrides, keyed by `n` as a string.
    #[serde(default)]
    pub samples_per_n: BTreeMap<String, usize>,
    /// Base seed; instance seeds are derived from it, `n`, `s` and the sample index.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub sfable_scaling: SFableScaling,
    #[serde(default)]
    pub allow_large: bool,
    #[serde(default)]
    pub timing: bool,
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SweepConfig =
            toml::from_str(text).map_err(|e| FableError::Config(format!("sweep config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| FableError::Config(format!("sweep config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() || self.n.is_empty() || self.s.is_empty() {
            return Err(FableError::Config(format!(
                "sweep {:?} needs at least one method, n and s",
                self.name
            )));
        }
        for key in self.samples_per_n.keys() {
            key.parse::<usize>().map_err(|_| {
                FableError::Config(format!("samples_per_n key {key:?} is not a qubit count"))
            })?;
        }
        let positive = |name: &str, vals: &[f64]| {
            if vals.is_empty() || vals.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
                Err(FableError::Config(format!("{name} must be a non-empty list of positive values")))
            } else {
                Ok(())
            }
        };
        match &self.mode {
            SweepMode::Budget => Ok(()),
            SweepMode::Accuracy { epsilons } => positive("epsilons", epsilons),
            SweepMode::Threshold { deltas } => {
                if deltas.iter().any(|d| !(*d >= 0.0)) || deltas.is_empty() {
                    Err(FableError::Config("deltas must be a non-empty list of values >= 0".into()))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn samples_for(&self, n: usize) -> usize {
        self.samples_per_n.get(&n.to_string()).copied().unwrap_or(self.samples)
    }

    pub fn instance_seed(&self, n: usize, s: f64, sample: usize) -> u64 {
        derive_seed(self.seed, &[n as u64, s.to_bits(), sample as u64])
    }
}

/// A point whose error exceeded the `norm * N^3 * delta` threshold bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundViolation {
    pub record: SweepRecord,
    pub bound: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    pub violations: Vec<BoundViolation>,
    /// Largest `epsilon / bound` over points with a positive bound.
    pub max_bound_ratio: Option<f64>,
    /// Values of `n` skipped by the size guard.
    pub skipped_n: Vec<usize>,
    /// Threshold points whose error exceeds that of a larger threshold on
    /// the same instance. Logged only: monotonicity is not guaranteed.
    pub non_monotone: Vec<SweepRecord>,
}

struct Instance {
    n: usize,
    s: f64,
    seed: u64,
}

struct Point {
    record: SweepRecord,
    bound: Option<f64>,
    order: usize,
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    cfg.validate()?;
    let mut outcome = SweepOutcome::default();
    let mut instances = Vec::new();
    for &n in &cfg.n {
        if n > MAX_SWEEP_QUBITS {
            return Err(FableError::Resource(format!(
                "n = {n} exceeds the sweep ceiling of {MAX_SWEEP_QUBITS} qubits"
            )));
        }
        if n > DEFAULT_MAX_SWEEP_QUBITS && !cfg.allow_large {
            outcome.skipped_n.push(n);
            continue;
        }
        for &s in &cfg.s {
            for sample in 0..cfg.samples_for(n) {
                instances.push(Instance {
                    n,
                    s,
                    seed: cfg.instance_seed(n, s, sample),
                });
            }
        }
    }

    let work = || {
        instances
            .par_iter()
            .map(|inst| evaluate_instance(cfg, inst))
            .collect::<Result<Vec<Vec<Point>>>>()
    };
    let points = match worker_count()? {
        Some(workers) => rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| FableError::Config(format!("worker pool: {e}")))?
            .install(work)?,
        None => work()?,
    };

    let mut points: Vec<Point> = points.into_iter().flatten().collect();
    points.sort_by(|a, b| {
        let (x, y) = (&a.record, &b.record);
        x.n.cmp(&y.n)
            .then(x.s.total_cmp(&y.s))
            .then(x.seed.cmp(&y.seed))
            .then((x.method as u8).cmp(&(y.method as u8)))
            .then(a.order.cmp(&b.order))
    });
    for p in points {
        if let Some(bound) = p.bound {
            if bound > 0.0 {
                let ratio = p.record.epsilon / bound;
                outcome.max_bound_ratio = Some(outcome.max_bound_ratio.map_or(ratio, |m: f64| m.max(ratio)));
            }
            if p.record.epsilon > bound + BOUND_SLACK {
                outcome.violations.push(BoundViolation {
                    record: p.record.clone(),
                    bound,
                });
            }
        }
        outcome.records.push(p.record);
    }
    if matches!(cfg.mode, SweepMode::Threshold { .. }) {
        outcome.non_monotone = non_monotone(&outcome.records);
    }
    Ok(outcome)
}

fn non_monotone(records: &[SweepRecord]) -> Vec<SweepRecord> {
    let key = |r: &SweepRecord| (r.n, r.s.to_bits(), r.seed, r.method as u8);
    let mut out = Vec::new();
    for group in records.chunk_by(|a, b| key(a) == key(b)) {
        let mut by_delta: Vec<&SweepRecord> = group.iter().collect();
        by_delta.sort_by(|a, b| b.delta.total_cmp(&a.delta));
        let mut lowest = f64::INFINITY;
        for r in by_delta {
            if r.epsilon > lowest + BOUND_SLACK {
                out.push(r.clone());
            }
            lowest = lowest.min(r.epsilon);
        }
    }
    out
}

/// Absolute slack for the bound check, covering round-off at `delta = 0`.
const BOUND_SLACK: f64 = 1e-9;

fn worker_count() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(Some(k)),
            _ => Err(FableError::Config(format!("{WORKERS_ENV} must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(None),
    }
}

fn evaluate_instance(cfg: &SweepConfig, inst: &Instance) -> Result<Vec<Point>> {
    let spec = GenSpec {
        n: inst.n,
        s: inst.s,
        seed: inst.seed,
        ..cfg.generator.clone()
    };
    let a = spec.generate_for_encoding()?;
    let s = a.relative_sparsity();
    let cube = (a.dim() as f64).powi(3);
    let mut out = Vec::new();
    for &method in &cfg.methods {
        let start = Instant::now();
        let eval = ErrorEvaluator::with_scaling(method, &a, cfg.sfable_scaling)?;
        let setup = start.elapsed();
        let prepared = &eval.prepared;
        let record = |counts: crate::circuit::GateCounts, delta: f64, epsilon: f64, t0: Instant| {
            let mut r = SweepRecord {
                method,
                n: inst.n,
                s,
                seed: inst.seed,
                delta,
                rotations: counts.rotations,
                cnots: counts.cnots,
                hadamards: counts.hadamards,
                epsilon,
                wall_time_ms: 0.0,
            };
            if cfg.timing {
                r.wall_time_ms = ((setup + t0.elapsed()).as_secs_f64() * 1e6).round() / 1e3;
            }
            let bound = (method != Method::LsFable).then_some(prepared.norm * cube * delta);
            (r, bound)
        };
        let at = |r: Retention| -> Result<_> {
            let t0 = Instant::now();
            let epsilon = eval.error_at(r)?;
            Ok(record(prepared.gate_counts(r), prepared.realized_delta(r), epsilon, t0))
        };
        let mut results = Vec::new();
        match &cfg.mode {
            SweepMode::Budget => results.push(at(Retention::Budget(a.nnz()))?),
            SweepMode::Threshold { deltas } => {
                for &d in deltas {
                    results.push(at(Retention::Threshold(d))?);
                }
            }
            SweepMode::Accuracy { epsilons } => {
                for &target in epsilons {
                    if method == Method::LsFable {
                        results.push(at(Retention::Threshold(0.0))?);
                        continue;
                    }
                    let t0 = Instant::now();
                    let r = rotations_for_accuracy_with(&eval, target)?;
                    results.push(record(r.counts, r.delta, r.epsilon, t0));
                }
            }
        }
        out.extend(
            results
                .into_iter()
                .enumerate()
                .map(|(order, (record, bound))| Point { record, bound, order }),
        );
    }
    Ok(out)
}

pub fn sweep_csv_string(records: &[SweepRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

pub fn run_sweep_to_file(cfg: &SweepConfig, path: &Path) -> Result<SweepOutcome> {
    let outcome = run_sweep(cfg)?;
    std::fs::write(path, sweep_csv_string(&outcome.records)).map_err(|e| FableError::io(path, e))?;
    Ok(outcome)
}

pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRecord>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| FableError::Csv {
        path: path.to_path_buf(),
        source: e,
    })?;
    let header = reader
        .headers()
        .map_err(|e| FableError::Csv {
            path: path.to_path_buf(),
            source: e,
        })?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != CSV_HEADER {
        return Err(FableError::Parse {
            line: 1,
            message: format!("unexpected sweep header {header:?}"),
        });
    }
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| FableError::Csv {
            path: path.to_path_buf(),
            source: e,
        })?;
        let line = i + 2;
        let field = |k: usize| row.get(k).unwrap_or("");
        let bad = |what: &str| FableError::Parse {
            line,
            message: format!("invalid {what}"),
        };
        out.push(SweepRecord {
            method: field(0).parse().map_err(|_| bad("method"))?,
            n: field(1).parse().map_err(|_| bad("n"))?,
            s: field(2).parse().map_err(|_| bad("s"))?,
            seed: field(3).parse().map_err(|_| bad("seed"))?,
            delta: field(4).parse().map_err(|_| bad("delta"))?,
            rotations: field(5).parse().map_err(|_| bad("rotations"))?,
            cnots: field(6).parse().map_err(|_| bad("cnots"))?,
            hadamards: field(7).parse().map_err(|_| bad("hadamards"))?,
            epsilon: field(8).parse().map_err(|_| bad("epsilon"))?,
            wall_time_ms: field(9).parse().map_err(|_| bad("wall_time_ms"))?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::Family;

    fn small(mode: SweepMode) -> SweepConfig {
        SweepConfig {
            name: "t".into(),
            generator: GenSpec::new(Family::UniformSparse, 0),
            mode,
            methods: Method::ALL.to_vec(),
            n: vec![3, 4],
            s: vec![2.0],
            samples: 2,
            samples_per_n: BTreeMap::new(),
            seed: 1,
            sfable_scaling: SFableScaling::default(),
            allow_large: false,
            timing: false,
        }
    }

    #[test]
    fn rows_cover_every_point_and_are_reproducible() {
        let cfg = small(SweepMode::Threshold { deltas: vec![0.0, 1e-3, 1e-1] });
        let a = run_sweep(&cfg).unwrap();
        assert_eq!(a.records.len(), 2 * 2 * 3 * 3);
        assert!(a.violations.is_empty());
        let b = run_sweep(&cfg).unwrap();
        assert_eq!(sweep_csv_string(&a.records), sweep_csv_string(&b.records));
        assert!(sweep_csv_string(&a.records).starts_with(CSV_HEADER));
    }

    #[test]
    fn non_monotone_points_are_logged() {
        let rec = |delta: f64, epsilon: f64| SweepRecord {
            method: Method::Fable,
            n: 3,
            s: 2.0,
            seed: 1,
            delta,
            rotations: 0,
            cnots: 0,
            hadamards: 0,
            epsilon,
            wall_time_ms: 0.0,
        };
        let records = vec![rec(0.0, 0.0), rec(1e-2, 0.3), rec(1e-3, 0.4), rec(1e-1, 0.5)];
        let flagged = non_monotone(&records);
        assert_eq!(flagged, vec![rec(1e-3, 0.4)]);
        assert!(non_monotone(&[rec(0.1, 0.5), rec(0.01, 0.2)]).is_empty());
    }

    #[test]
    fn budget_mode_keeps_nnz_rotations() {
        let out = run_sweep(&small(SweepMode::Budget)).unwrap();
        for r in &out.records {
            let nnz = (r.s * (1u64 << r.n) as f64).round() as usize;
            match r.method {
                Method::LsFable => assert!(r.rotations <= nnz + 1),
                _ => assert_eq!(r.rotations, nnz),
            }
        }
    }

    #[test]
    fn accuracy_mode_reaches_targets() {
        let out = run_sweep(&small(SweepMode::Accuracy { epsilons: vec![0.5, 0.01] })).unwrap();
        for r in out.records.iter().filter(|r| r.method != Method::LsFable) {
            assert!(r.epsilon < 0.5);
        }
    }

    #[test]
    fn size_guard_and_overrides() {
        let mut cfg = small(SweepMode::Budget);
        cfg.n = vec![3, 12];
        cfg.samples_per_n.insert("3".into(), 1);
        let out = run_sweep(&cfg).unwrap();
        assert_eq!(out.skipped_n, vec![12]);
        assert_eq!(out.records.len(), 3);
        cfg.n = vec![14];
        cfg.allow_large = true;
        assert!(matches!(run_sweep(&cfg), Err(FableError::Resource(_))));
    }

    #[test]
    fn toml_and_csv_roundtrip() {
        let cfg = small(SweepMode::Accuracy { epsilons: vec![0.25] });
        let text = cfg.to_toml().unwrap();
        assert_eq!(SweepConfig::from_toml(&text).unwrap(), cfg);
        let out = run_sweep(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        std::fs::write(&path, sweep_csv_string(&out.records)).unwrap();
        assert_eq!(read_sweep_csv(&path).unwrap(), out.records);
        assert!(SweepConfig::from_toml("name = 'x'\nn = [3]\n[generator]\nfamily='uniform_sparse'\n[mode]\nkind='accuracy'\nepsilons=[]\n").is_err());
    }
}
