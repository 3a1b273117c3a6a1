//! Named sweep configurations, one per reproduced figure or table.
//!
//! Sample counts and ranges follow the experiments (100 samples for small
//! `n`, one for the largest). Points above 11 qubits are skipped unless the
//! config's `allow_large` flag is set.

use std::collections::BTreeMap;

use super::sweep::{SweepConfig, SweepMode};
use crate::circuit::Method;
use crate::encoders::SFableScaling;
use crate::error::{FableError, Result};
use crate::generators::{Family, GenSpec};

pub const PRESET_NAMES: [&str; 18] = [
    "fig6_left",
    "fig6_right",
    "fig7",
    "fig8",
    "fig9_left",
    "fig9_right",
    "fig10_left",
    "fig10_right",
    "fig11_left",
    "fig11_right",
    "fig12_left",
    "fig12_right",
    "fig13_left",
    "fig13_right",
    "table1",
    "table2",
    "table3",
    "prop1",
];

fn pow2_range(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| 2f64.powi(k)).collect()
}

fn base(name: &str, generator: GenSpec, mode: SweepMode, methods: &[Method], n: Vec<usize>) -> SweepConfig {
    SweepConfig {
        name: name.to_string(),
        generator,
        mode,
        methods: methods.to_vec(),
        n,
        s: vec![0.0],
        samples: 1,
        samples_per_n: BTreeMap::new(),
        seed: 0,
        sfable_scaling: SFableScaling::default(),
        allow_large: false,
        timing: false,
    }
}

/// `samples` for every `n`, one sample from `single_from` upwards.
fn sampled(mut cfg: SweepConfig, samples: usize, single_from: usize) -> SweepConfig {
    cfg.samples = samples;
    for &n in cfg.n.iter().filter(|&&n| n >= single_from) {
        cfg.samples_per_n.insert(n.to_string(), 1);
    }
    cfg
}

fn with_s(mut cfg: SweepConfig, s: Vec<f64>) -> SweepConfig {
    cfg.s = s;
    cfg
}

pub fn preset(name: &str) -> Result<SweepConfig> {
    use Method::*;
    let fs = [Fable, SFable];
    let all = [Fable, SFable, LsFable];
    let target = || SweepMode::Accuracy { epsilons: vec![2f64.powi(-10)] };
    let uniform = GenSpec::new(Family::UniformSparse, 0);
    let xxx = GenSpec {
        jx: 1.0,
        jy: 1.0,
        jz: 1.0,
        ..GenSpec::new(Family::Heisenberg, 0)
    };
    let xyz = GenSpec {
        random_couplings: true,
        ..GenSpec::new(Family::Heisenberg, 0)
    };
    let laplacian = |periodic| GenSpec {
        nx: Some(6),
        periodic,
        ..GenSpec::new(Family::Laplacian2d, 0)
    };
    let cfg = match name {
        "fig6_left" | "fig6_right" => {
            let s = if name == "fig6_left" { 4.0 } else { 16.0 };
            with_s(sampled(base(name, uniform, target(), &fs, (7..=13).collect()), 100, 11), vec![s])
        }
        "fig7" => with_s(
            base(name, uniform, SweepMode::Accuracy { epsilons: pow2_range(-20, -1).into_iter().rev().collect() }, &[SFable], vec![9, 10, 11]),
            vec![4.0],
        ),
        "fig8" => with_s(base(name, uniform, target(), &[SFable], vec![10, 11, 12]), pow2_range(0, 5)),
        "fig9_left" | "fig9_right" => {
            let s = if name == "fig9_left" { 4.0 } else { 16.0 };
            with_s(sampled(base(name, uniform, SweepMode::Budget, &all, (7..=13).collect()), 100, 12), vec![s])
        }
        "fig10_left" => with_s(base(name, uniform, SweepMode::Budget, &all, vec![11]), pow2_range(0, 6)),
        "fig10_right" => with_s(base(name, uniform, SweepMode::Budget, &all, vec![12]), pow2_range(0, 6)),
        // The XXX chain is deterministic, so one sample per n suffices.
        "fig11_left" => base(name, xxx, SweepMode::Budget, &all, (6..=13).collect()),
        "fig11_right" => sampled(base(name, xyz, SweepMode::Budget, &all, (6..=13).collect()), 100, 12),
        "fig12_left" => base(name, laplacian(false), SweepMode::Budget, &all, (7..=13).collect()),
        "fig12_right" => base(name, laplacian(true), SweepMode::Budget, &all, (7..=13).collect()),
        "fig13_left" | "fig13_right" => {
            let family = if name == "fig13_left" { Family::BinarySparse } else { Family::NonnegSparse };
            with_s(sampled(base(name, GenSpec::new(family, 0), SweepMode::Budget, &all, (7..=13).collect()), 100, 12), vec![4.0])
        }
        "table1" => with_s(base(name, uniform, target(), &fs, vec![13]), vec![12.0]),
        "table2" => base(name, xxx, target(), &fs, vec![13]),
        "table3" => with_s(base(name, GenSpec::new(Family::BinarySparse, 0), target(), &fs, vec![13]), vec![12.0]),
        "prop1" => with_s(
            sampled(
                base(name, uniform, SweepMode::Threshold { deltas: vec![0.0, 1e-4, 1e-3, 1e-2, 1e-1] }, &fs, (2..=8).collect()),
                10,
                usize::MAX,
            ),
            vec![2.0, 4.0],
        ),
        _ => {
            return Err(FableError::Config(format!(
                "unknown preset {name:?}; available: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(cfg)
}
