//! `vqe`: Heisenberg and QUBO training sweeps with repeat statistics.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use seca_core::problems::{brute_force_min, exact_ground, heisenberg, random_qubo, to_ising, Boundary, HeisenbergSpec};
use seca_core::vqe::{most_probable_basis_state, train, InitPolicy, OptimizerKind, RepeatRun, TrainConfig};
use seca_core::{rng, AnsatzSpec, IntraEntangler, PauliObservable, QuboInstance, RepeatStats, TrainTrace};
use serde::Deserialize;

use crate::config::{non_empty, Architecture, Span};
use crate::error::{CliError, CliResult};
use crate::output::{self, opt};

pub const REPEATS_HEADER: [&str; 12] = [
    "problem",
    "arch",
    "n",
    "L",
    "param",
    "steps",
    "rep",
    "seed",
    "final_energy",
    "final_v_score",
    "exact_energy",
    "mode_cost",
];
pub const TRACE_HEADER: [&str; 11] =
    ["problem", "arch", "n", "L", "param", "rep", "seed", "step", "energy", "e_var", "v_score"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    Heisenberg,
    Qubo,
}

impl Problem {
    fn label(self) -> &'static str {
        match self {
            Problem::Heisenberg => "heisenberg",
            Problem::Qubo => "qubo",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VqeConfig {
    pub version: u32,
    pub seed: u64,
    pub problem: Problem,
    pub n_qubits: usize,
    pub layers: Span,
    #[serde(default = "seca_and_feca")]
    pub architectures: Vec<Architecture>,
    /// Heisenberg couplings `J`.
    #[serde(default = "unit_coupling")]
    pub couplings: Vec<f64>,
    #[serde(default)]
    pub boundary: Boundary,
    /// QUBO edge densities `D`; one random instance per density.
    #[serde(default = "half_density")]
    pub densities: Vec<f64>,
    #[serde(default = "weight_range")]
    pub weight_range: (f64, f64),
    /// Step budgets reported in the repeat table; training runs to the largest.
    #[serde(default = "default_steps")]
    pub steps: Vec<usize>,
    #[serde(default = "default_lr")]
    pub learning_rate: f64,
    #[serde(default = "adam")]
    pub optimizer: OptimizerKind,
    #[serde(default = "uniform_init")]
    pub init: InitPolicy,
    #[serde(default = "five")]
    pub repeats: usize,
    #[serde(default)]
    pub intra: IntraEntangler,
    #[serde(default = "yes")]
    pub write_traces: bool,
    #[serde(default = "repeats_name")]
    pub repeats_output: String,
    #[serde(default = "trace_name")]
    pub trace_output: String,
}

fn seca_and_feca() -> Vec<Architecture> {
    vec![Architecture::Seca, Architecture::Feca]
}
fn unit_coupling() -> Vec<f64> {
    vec![1.0]
}
fn half_density() -> Vec<f64> {
    vec![0.5]
}
fn weight_range() -> (f64, f64) {
    (-1.0, 1.0)
}
fn default_steps() -> Vec<usize> {
    vec![TrainConfig::default().max_steps]
}
fn default_lr() -> f64 {
    TrainConfig::default().learning_rate
}
fn adam() -> OptimizerKind {
    OptimizerKind::Adam
}
fn uniform_init() -> InitPolicy {
    InitPolicy::Uniform
}
fn five() -> usize {
    5
}
fn yes() -> bool {
    true
}
fn repeats_name() -> String {
    "vqe_repeats.csv".into()
}
fn trace_name() -> String {
    "vqe_trace.csv".into()
}

/// One Hamiltonian of the sweep.
struct Target {
    param: f64,
    observable: PauliObservable,
    exact: f64,
    instance: Option<QuboInstance>,
}

/// Seed of the QUBO instance generated for density index `index`.
pub fn instance_seed(seed: u64, index: usize) -> u64 {
    rng::derive_seed(seed, &format!("qubo-instance/{index}"))
}

fn targets(cfg: &VqeConfig) -> CliResult<Vec<Target>> {
    match cfg.problem {
        Problem::Heisenberg => {
            non_empty(&cfg.couplings, "coupling")?;
            cfg.couplings
                .iter()
                .map(|&j| {
                    let observable =
                        heisenberg(&HeisenbergSpec { n_sites: cfg.n_qubits, coupling: j, boundary: cfg.boundary })?;
                    let exact = exact_ground(&observable)?;
                    Ok(Target { param: j, observable, exact, instance: None })
                })
                .collect()
        }
        Problem::Qubo => {
            non_empty(&cfg.densities, "density")?;
            cfg.densities
                .iter()
                .enumerate()
                .map(|(k, &d)| {
                    let s = instance_seed(cfg.seed, k);
                    let mut q: QuboInstance =
                        random_qubo(cfg.n_qubits, d, cfg.weight_range, &mut rng::stream(s, "qubo-instance", 0))?;
                    q.seed = Some(s);
                    let ising = to_ising(&q)?;
                    let (_, min) = brute_force_min(&q)?;
                    Ok(Target { param: d, exact: min - ising.offset, observable: ising.observable, instance: Some(q) })
                })
                .collect()
        }
    }
}

struct Outputs {
    repeats: Vec<Vec<String>>,
    traces: Vec<Vec<String>>,
    instances: Vec<QuboInstance>,
}

fn check(cfg: &VqeConfig) -> CliResult<()> {
    non_empty(&cfg.architectures, "architecture")?;
    non_empty(&cfg.steps, "steps")?;
    if cfg.steps.contains(&0) {
        return Err(CliError::config("step budgets must be at least 1"));
    }
    if cfg.repeats == 0 {
        return Err(CliError::config("repeats must be at least 1"));
    }
    Ok(())
}

fn compute(cfg: &VqeConfig) -> CliResult<Outputs> {
    check(cfg)?;
    let layers = cfg.layers.values("layers")?;
    let targets = targets(cfg)?;
    let max_steps = *cfg.steps.iter().max().expect("non-empty");
    let base = TrainConfig {
        max_steps,
        learning_rate: cfg.learning_rate,
        optimizer: cfg.optimizer,
        seed: cfg.seed,
        init: cfg.init,
    };
    base.validate()?;

    let mut groups = Vec::new();
    for &arch in &cfg.architectures {
        for &l in &layers {
            let spec = AnsatzSpec::new(cfg.n_qubits, l, arch.scheme()).with_intra(cfg.intra);
            spec.validate()?;
            for t in &targets {
                groups.push((arch, spec.clone(), t));
            }
        }
    }
    let jobs: Vec<(usize, usize)> = (0..groups.len()).flat_map(|g| (0..cfg.repeats).map(move |r| (g, r))).collect();
    let traces: Vec<TrainTrace> = jobs
        .par_iter()
        .map(|&(g, rep)| {
            let (_, spec, t) = &groups[g];
            let tc = TrainConfig { seed: cfg.seed + rep as u64, ..base };
            Ok(train(spec, &t.observable, &tc)?)
        })
        .collect::<CliResult<_>>()?;

    let problem = cfg.problem.label();
    let mut repeats = Vec::new();
    let mut trace_rows = Vec::new();
    for (g, (arch, spec, t)) in groups.iter().enumerate() {
        let runs = &traces[g * cfg.repeats..(g + 1) * cfg.repeats];
        let prefix = |rest: &[String]| -> Vec<String> {
            let mut v = vec![
                problem.to_string(),
                arch.label().to_string(),
                spec.n_qubits.to_string(),
                spec.layers.to_string(),
                output::num(t.param),
            ];
            v.extend_from_slice(rest);
            v
        };
        for &s in &cfg.steps {
            let mut rr = Vec::with_capacity(runs.len());
            for (rep, trace) in runs.iter().enumerate() {
                let rec = &trace.records[s - 1];
                let seed = cfg.seed + rep as u64;
                let mode_cost = match &t.instance {
                    Some(q) if s == max_steps => {
                        let state = spec.prepare(&trace.final_params)?;
                        output::num(q.cost_of_index(most_probable_basis_state(&state.probabilities())))
                    }
                    _ => String::new(),
                };
                repeats.push(prefix(&[
                    s.to_string(),
                    rep.to_string(),
                    seed.to_string(),
                    output::num(rec.energy),
                    opt(rec.v_score),
                    output::num(t.exact),
                    mode_cost,
                ]));
                rr.push(RepeatRun { rep, seed, final_energy: rec.energy, final_v_score: rec.v_score });
            }
            let stats = RepeatStats::from_runs(rr);
            let exact = output::num(t.exact);
            repeats.push(prefix(&[
                s.to_string(),
                "mean".into(),
                String::new(),
                output::num(stats.mean_energy),
                opt(stats.mean_v_score),
                exact.clone(),
                String::new(),
            ]));
            repeats.push(prefix(&[
                s.to_string(),
                "var".into(),
                String::new(),
                output::num(stats.var_energy),
                opt(stats.var_v_score),
                exact,
                String::new(),
            ]));
        }
        if cfg.write_traces {
            for (rep, trace) in runs.iter().enumerate() {
                for rec in std::iter::once(&trace.initial).chain(&trace.records) {
                    trace_rows.push(prefix(&[
                        rep.to_string(),
                        (cfg.seed + rep as u64).to_string(),
                        rec.step.to_string(),
                        output::num(rec.energy),
                        output::num(rec.e_var),
                        opt(rec.v_score),
                    ]));
                }
            }
        }
    }
    let instances = targets.into_iter().filter_map(|t| t.instance).collect();
    Ok(Outputs { repeats, traces: trace_rows, instances })
}

pub fn run(cfg: &VqeConfig, out_dir: &Path) -> CliResult<Vec<PathBuf>> {
    let out = compute(cfg)?;
    let mut written = Vec::new();
    let path = out_dir.join(&cfg.repeats_output);
    output::write_csv(&path, &REPEATS_HEADER, &out.repeats)?;
    written.push(path);
    if cfg.write_traces {
        let path = out_dir.join(&cfg.trace_output);
        output::write_csv(&path, &TRACE_HEADER, &out.traces)?;
        written.push(path);
    }
    for (k, q) in out.instances.iter().enumerate() {
        let path = out_dir.join(format!("qubo_instance_{k}.json"));
        output::write_text(&path, &format!("{}\n", q.to_json()))?;
        written.push(path);
    }
    Ok(written)
}
