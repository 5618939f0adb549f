//! `metrics`: expressibility, entangling capability and gradient-variance sweeps.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use seca_core::ansatz::ncz_sweep_scheme;
use seca_core::metrics::{
    estimate_entangling_capability, estimate_expressibility, estimate_gradient_variance, DEFAULT_BINS,
    DEFAULT_ENT_SAMPLES, DEFAULT_EXP_PAIRS, DEFAULT_GRAD_SAMPLES,
};
use seca_core::{AnsatzSpec, ConnectionScheme, IntraEntangler};
use serde::Deserialize;

use crate::config::{non_empty, Architecture, ObservableConfig, Span};
use crate::error::{CliError, CliResult};
use crate::output;

pub const METRICS_HEADER: [&str; 9] = ["arch", "n", "L", "n_cz", "l_cz", "seed", "metric", "value", "samples"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sweep {
    /// Every architecture at every layer count.
    #[default]
    Arch,
    /// Evenly spread connections, `n_cz` of them.
    NCz,
    /// A single connection on layer `l_cz`.
    LCz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    ExpKl,
    Ent,
    GradVar,
}

impl MetricKind {
    fn label(self) -> &'static str {
        match self {
            MetricKind::ExpKl => "exp_kl",
            MetricKind::Ent => "ent",
            MetricKind::GradVar => "grad_var",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Samples {
    pub exp_pairs: usize,
    pub ent: usize,
    pub grad: usize,
}

impl Default for Samples {
    fn default() -> Self {
        Self { exp_pairs: DEFAULT_EXP_PAIRS, ent: DEFAULT_ENT_SAMPLES, grad: DEFAULT_GRAD_SAMPLES }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsConfig {
    pub version: u32,
    pub seed: u64,
    pub n_qubits: usize,
    pub layers: Span,
    #[serde(default = "all_architectures")]
    pub architectures: Vec<Architecture>,
    #[serde(default)]
    pub sweep: Sweep,
    /// Connection counts for the `n_cz` sweep; defaults to `1..=L`.
    #[serde(default)]
    pub n_cz: Option<Span>,
    /// Connected layers for the `l_cz` sweep; defaults to `1..=L`.
    #[serde(default)]
    pub l_cz: Option<Span>,
    #[serde(default = "all_metrics")]
    pub metrics: Vec<MetricKind>,
    #[serde(default)]
    pub samples: Samples,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default = "one")]
    pub repeats: usize,
    #[serde(default)]
    pub grad_param: usize,
    #[serde(default = "default_probe")]
    pub grad_observable: ObservableConfig,
    #[serde(default)]
    pub intra: IntraEntangler,
    #[serde(default = "default_output")]
    pub output: String,
}

fn all_architectures() -> Vec<Architecture> {
    vec![Architecture::Seca, Architecture::Feca, Architecture::Nocz]
}

fn all_metrics() -> Vec<MetricKind> {
    vec![MetricKind::ExpKl, MetricKind::Ent, MetricKind::GradVar]
}

fn default_bins() -> usize {
    DEFAULT_BINS
}

fn one() -> usize {
    1
}

fn default_probe() -> ObservableConfig {
    ObservableConfig::BoundaryZz
}

fn default_output() -> String {
    "metrics.csv".into()
}

/// One ansatz of the sweep with its CSV labels.
#[derive(Debug, Clone)]
struct Point {
    arch: String,
    spec: AnsatzSpec,
}

fn points(cfg: &MetricsConfig) -> CliResult<Vec<Point>> {
    let layers = cfg.layers.values("layers")?;
    let mut out = Vec::new();
    let mk = |arch: &str, l: usize, scheme: ConnectionScheme| Point {
        arch: arch.to_string(),
        spec: AnsatzSpec::new(cfg.n_qubits, l, scheme).with_intra(cfg.intra),
    };
    match cfg.sweep {
        Sweep::Arch => {
            non_empty(&cfg.architectures, "architecture")?;
            for &a in &cfg.architectures {
                for &l in &layers {
                    out.push(mk(a.label(), l, a.scheme()));
                }
            }
        }
        Sweep::NCz | Sweep::LCz => {
            let (span, name) = match cfg.sweep {
                Sweep::NCz => (&cfg.n_cz, "n_cz"),
                _ => (&cfg.l_cz, "l_cz"),
            };
            for &l in &layers {
                let values = match span {
                    Some(s) => s.values(name)?,
                    None => (1..=l).collect(),
                };
                for k in values {
                    if k == 0 || k > l {
                        return Err(CliError::config(format!("{name} = {k} outside 1..={l}")));
                    }
                    let scheme = match cfg.sweep {
                        Sweep::NCz => ncz_sweep_scheme(l, k)?,
                        _ => ConnectionScheme::single(k),
                    };
                    out.push(mk(name, l, scheme));
                }
            }
        }
    }
    for p in &out {
        p.spec.validate()?;
    }
    Ok(out)
}

fn check(cfg: &MetricsConfig) -> CliResult<()> {
    non_empty(&cfg.metrics, "metric")?;
    if cfg.repeats == 0 {
        return Err(CliError::config("repeats must be at least 1"));
    }
    let s = cfg.samples;
    if s.exp_pairs == 0 || s.ent == 0 || s.grad == 0 || cfg.bins == 0 {
        return Err(CliError::config("sample counts and bin count must be positive"));
    }
    Ok(())
}

/// Runs the sweep and returns the CSV rows in sweep order.
pub fn rows(cfg: &MetricsConfig) -> CliResult<Vec<Vec<String>>> {
    check(cfg)?;
    let points = points(cfg)?;
    let mut jobs = Vec::new();
    for p in &points {
        for r in 0..cfg.repeats as u64 {
            for &m in &cfg.metrics {
                jobs.push((p, cfg.seed + r, m));
            }
        }
    }
    jobs.par_iter()
        .map(|&(p, seed, m)| {
            let spec = &p.spec;
            let (value, samples) = match m {
                MetricKind::ExpKl => {
                    let r = estimate_expressibility::<f64>(spec, cfg.samples.exp_pairs, cfg.bins, seed)?;
                    (r.kl_divergence, r.n_pairs)
                }
                MetricKind::Ent => {
                    let r = estimate_entangling_capability::<f64>(spec, cfg.samples.ent, seed)?;
                    (r.ent, r.n_samples)
                }
                MetricKind::GradVar => {
                    let obs = cfg.grad_observable.build(spec)?;
                    let r = estimate_gradient_variance(spec, &obs, cfg.grad_param, cfg.samples.grad, seed)?;
                    (r.variance, r.n_samples)
                }
            };
            if !value.is_finite() {
                return Err(CliError::Numerical(format!("{} is not finite for {}", m.label(), p.arch)));
            }
            let connected = spec.connected_layers();
            let l_cz = match connected.len() {
                1 => connected.iter().next().map(usize::to_string).unwrap_or_default(),
                _ => String::new(),
            };
            Ok(vec![
                p.arch.clone(),
                spec.n_qubits.to_string(),
                spec.layers.to_string(),
                connected.len().to_string(),
                l_cz,
                seed.to_string(),
                m.label().to_string(),
                output::num(value),
                samples.to_string(),
            ])
        })
        .collect()
}

pub fn run(cfg: &MetricsConfig, out_dir: &Path) -> CliResult<Vec<PathBuf>> {
    let rows = rows(cfg)?;
    let path = out_dir.join(&cfg.output);
    output::write_csv(&path, &METRICS_HEADER, &rows)?;
    Ok(vec![path])
}
