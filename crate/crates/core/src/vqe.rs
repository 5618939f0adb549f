//! Exact-gradient variational optimisation.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzSpec, Circuit};
use crate::error::{arg, Error, Result};
use crate::num::Real;
use crate::problems::{v_score, VScoreInputs};
use crate::rng;
use crate::statevec::PauliObservable;

/// `<ψ(θ)|H|ψ(θ)>`.
pub fn energy<T: Real>(circuit: &Circuit, obs: &PauliObservable<T>, params: &[T]) -> Result<T> {
    circuit.prepare(params)?.expectation(obs)
}

/// `[C(θ + π/2 e_k) - C(θ - π/2 e_k)] / 2`.
pub fn parameter_shift_component<T: Real>(
    circuit: &Circuit,
    obs: &PauliObservable<T>,
    params: &[T],
    k: usize,
) -> Result<T> {
    if k >= params.len() {
        return Err(Error::Index { what: "parameter", index: k, size: params.len() });
    }
    let shift = T::FRAC_PI_2();
    let mut shifted = params.to_vec();
    shifted[k] = params[k] + shift;
    let plus = energy(circuit, obs, &shifted)?;
    shifted[k] = params[k] - shift;
    let minus = energy(circuit, obs, &shifted)?;
    Ok((plus - minus) / T::of(2.0))
}

/// Full gradient by the parameter-shift rule; components are evaluated in parallel.
pub fn parameter_shift_grad<T: Real>(spec: &AnsatzSpec, obs: &PauliObservable<T>, params: &[T]) -> Result<Vec<T>> {
    if params.len() != spec.param_count() {
        return arg(format!("expected {} parameters, got {}", spec.param_count(), params.len()));
    }
    let circuit = spec.build()?;
    circuit_gradient(&circuit, obs, params)
}

pub fn circuit_gradient<T: Real>(circuit: &Circuit, obs: &PauliObservable<T>, params: &[T]) -> Result<Vec<T>> {
    (0..params.len()).into_par_iter().map(|k| parameter_shift_component(circuit, obs, params, k)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Adam,
    VanillaGd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitPolicy {
    /// Uniform on `[0, 2π)`.
    #[serde(rename = "uniform_0_2pi")]
    Uniform,
    /// Normal with standard deviation 0.1.
    SmallNormal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub max_steps: usize,
    pub learning_rate: f64,
    pub optimizer: OptimizerKind,
    pub seed: u64,
    pub init: InitPolicy,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { max_steps: 500, learning_rate: 0.05, optimizer: OptimizerKind::Adam, seed: 0, init: InitPolicy::Uniform }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_steps == 0 {
            return arg("max_steps must be at least 1");
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return arg(format!("learning rate must be positive, got {}", self.learning_rate));
        }
        Ok(())
    }
}

/// Adam with the usual bias correction.
#[derive(Debug, Clone)]
pub struct Adam<T> {
    lr: T,
    beta1: T,
    beta2: T,
    eps: T,
    m: Vec<T>,
    v: Vec<T>,
    t: i32,
}

impl<T: Real> Adam<T> {
    pub fn new(dim: usize, lr: T) -> Self {
        Self {
            lr,
            beta1: T::of(0.9),
            beta2: T::of(0.999),
            eps: T::of(1e-8),
            m: vec![T::zero(); dim],
            v: vec![T::zero(); dim],
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut [T], grad: &[T]) {
        self.t += 1;
        let one = T::one();
        let c1 = one - self.beta1.powi(self.t);
        let c2 = one - self.beta2.powi(self.t);
        for (((p, g), m), v) in params.iter_mut().zip(grad).zip(&mut self.m).zip(&mut self.v) {
            *m = self.beta1 * *m + (one - self.beta1) * *g;
            *v = self.beta2 * *v + (one - self.beta2) * *g * *g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *p -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

enum Optimizer<T> {
    Adam(Adam<T>),
    Gd(T),
}

impl<T: Real> Optimizer<T> {
    fn step(&mut self, params: &mut [T], grad: &[T]) {
        match self {
            Optimizer::Adam(a) => a.step(params, grad),
            Optimizer::Gd(lr) => params.iter_mut().zip(grad).for_each(|(p, g)| *p -= *lr * *g),
        }
    }
}

/// Energy statistics of one parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainRecord<T> {
    pub step: usize,
    pub energy: T,
    pub e_var: T,
    /// `None` when the energy sits exactly on the zero point.
    pub v_score: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainTrace<T> {
    /// Statistics of the initial parameters (step 0).
    pub initial: TrainRecord<T>,
    /// One record per optimiser step, taken after the update.
    pub records: Vec<TrainRecord<T>>,
    pub final_params: Vec<T>,
}

impl<T: Real> TrainTrace<T> {
    pub fn last(&self) -> &TrainRecord<T> {
        self.records.last().unwrap_or(&self.initial)
    }

    /// `step,energy,e_var,v_score` with a header line; includes the step-0 row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,energy,e_var,v_score\n");
        for r in std::iter::once(&self.initial).chain(&self.records) {
            let v = r.v_score.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{},{}\n", r.step, r.energy, r.e_var, v));
        }
        out
    }
}

/// Zero point and degrees of freedom used for the V-score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VScoreConvention<T> {
    pub e_inf: T,
    pub n_dof: usize,
}

impl<T: Real> VScoreConvention<T> {
    /// `E_∞ = 0`, `N` = qubit count.
    pub fn for_register(n_qubits: usize) -> Self {
        Self { e_inf: T::zero(), n_dof: n_qubits }
    }
}

pub fn initial_params<T: Real>(count: usize, policy: InitPolicy, seed: u64) -> Vec<T> {
    let mut r = rng::stream(seed, "vqe-init", 0);
    match policy {
        InitPolicy::Uniform => rng::uniform_angles(&mut r, count).into_iter().map(T::of).collect(),
        InitPolicy::SmallNormal => {
            let normal = Normal::new(0.0, 0.1).expect("valid normal");
            (0..count).map(|_| T::of(normal.sample(&mut r))).collect()
        }
    }
}

fn record<T: Real>(
    circuit: &Circuit,
    obs: &PauliObservable<T>,
    params: &[T],
    step: usize,
    conv: &VScoreConvention<T>,
) -> Result<TrainRecord<T>> {
    let state = circuit.prepare(params)?;
    let energy = state.expectation(obs)?;
    let e_var = state.observable_variance(obs)?;
    if !energy.is_finite() || !e_var.is_finite() {
        return Err(Error::Numerical(format!("non-finite energy {energy} at step {step}")));
    }
    let v = v_score(&VScoreInputs { e_vqe: energy, e_var, n_dof: conv.n_dof, e_inf: conv.e_inf }).ok();
    Ok(TrainRecord { step, energy, e_var, v_score: v })
}

/// Runs `max_steps` optimiser updates on the exact energy.
pub fn train<T: Real>(spec: &AnsatzSpec, obs: &PauliObservable<T>, config: &TrainConfig) -> Result<TrainTrace<T>> {
    let conv = VScoreConvention::for_register(spec.n_qubits);
    train_with(spec, obs, config, &conv)
}

pub fn train_with<T: Real>(
    spec: &AnsatzSpec,
    obs: &PauliObservable<T>,
    config: &TrainConfig,
    conv: &VScoreConvention<T>,
) -> Result<TrainTrace<T>> {
    config.validate()?;
    if obs.n_qubits() != spec.n_qubits {
        return arg(format!("observable on {} qubits for a {}-qubit ansatz", obs.n_qubits(), spec.n_qubits));
    }
    let circuit = spec.build()?;
    let mut params = initial_params::<T>(spec.param_count(), config.init, config.seed);
    let lr = T::of(config.learning_rate);
    let mut opt = match config.optimizer {
        OptimizerKind::Adam => Optimizer::Adam(Adam::new(params.len(), lr)),
        OptimizerKind::VanillaGd => Optimizer::Gd(lr),
    };
    let initial = record(&circuit, obs, &params, 0, conv)?;
    let mut records = Vec::with_capacity(config.max_steps);
    for step in 1..=config.max_steps {
        let grad = circuit_gradient(&circuit, obs, &params)?;
        opt.step(&mut params, &grad);
        records.push(record(&circuit, obs, &params, step, conv)?);
    }
    Ok(TrainTrace { initial, records, final_params: params })
}

/// One training problem: ansatz, observable and optimiser settings.
#[derive(Debug, Clone)]
pub struct Experiment<T> {
    pub spec: AnsatzSpec,
    pub observable: PauliObservable<T>,
    pub config: TrainConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepeatRun<T> {
    pub rep: usize,
    pub seed: u64,
    pub final_energy: T,
    pub final_v_score: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatStats<T> {
    pub runs: Vec<RepeatRun<T>>,
    pub mean_energy: T,
    pub var_energy: T,
    pub mean_v_score: Option<T>,
    pub var_v_score: Option<T>,
}

fn mean_var<T: Real>(xs: &[T]) -> (T, T) {
    let n = T::of_usize(xs.len());
    let mean = xs.iter().copied().sum::<T>() / n;
    let var = xs.iter().map(|&x| (x - mean) * (x - mean)).sum::<T>() / n;
    (mean, var)
}

impl<T: Real> RepeatStats<T> {
    /// Mean and population variance over `runs`.
    pub fn from_runs(runs: Vec<RepeatRun<T>>) -> Self {
        let energies: Vec<T> = runs.iter().map(|r| r.final_energy).collect();
        let (mean_energy, var_energy) = mean_var(&energies);
        let scores: Option<Vec<T>> = runs.iter().map(|r| r.final_v_score).collect();
        let (mean_v_score, var_v_score) = match scores {
            Some(s) => {
                let (m, v) = mean_var(&s);
                (Some(m), Some(v))
            }
            None => (None, None),
        };
        Self { runs, mean_energy, var_energy, mean_v_score, var_v_score }
    }

    /// `rep,seed,final_energy,final_v_score` rows followed by `mean` and `var` summary rows.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<T>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut out = String::from("rep,seed,final_energy,final_v_score\n");
        for r in &self.runs {
            out.push_str(&format!("{},{},{},{}\n", r.rep, r.seed, r.final_energy, opt(r.final_v_score)));
        }
        out.push_str(&format!("mean,,{},{}\n", self.mean_energy, opt(self.mean_v_score)));
        out.push_str(&format!("var,,{},{}\n", self.var_energy, opt(self.var_v_score)));
        out
    }

    pub fn best_energy(&self) -> T {
        self.runs.iter().map(|r| r.final_energy).fold(T::infinity(), T::min)
    }
}

/// Trains with seeds `base_seed..base_seed + reps`; repetitions run in parallel.
pub fn repeat_experiment<T: Real>(exp: &Experiment<T>, reps: usize, base_seed: u64) -> Result<RepeatStats<T>> {
    if reps == 0 {
        return arg("repetition count must be at least 1");
    }
    let runs = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let seed = base_seed + rep as u64;
            let config = TrainConfig { seed, ..exp.config };
            let trace = train(&exp.spec, &exp.observable, &config)?;
            let last = trace.last();
            Ok(RepeatRun { rep, seed, final_energy: last.energy, final_v_score: last.v_score })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RepeatStats::from_runs(runs))
}

/// Index of the most probable basis state, lowest index on ties.
pub fn most_probable_basis_state<T: Real>(probabilities: &[T]) -> usize {
    let mut best = 0;
    for (i, &p) in probabilities.iter().enumerate() {
        if p > probabilities[best] {
            best = i;
        }
    }
    best
}

/// Uniform parameter vector for sampling studies.
pub fn random_params<T: Real, R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<T> {
    rng::uniform_angles(rng, count).into_iter().map(T::of).collect()
}
