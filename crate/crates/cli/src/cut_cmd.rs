//! `cut-verify`: cut reconstruction against the uncut statevector.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use seca_core::gatecut::{cz_cut_ensemble, verify_cut, CutEnsemble, CutReport, DEFAULT_TERM_BUDGET};
use seca_core::vqe::random_params;
use seca_core::{rng, AnsatzSpec, IntraEntangler};
use serde::{Deserialize, Serialize};

use crate::config::{non_empty, Architecture, ObservableConfig};
use crate::error::{CliError, CliResult};
use crate::output;

/// Largest register accepted by `cut-verify`.
pub const MAX_CUT_QUBITS: usize = 12;
pub const CUT_TOLERANCE: f64 = 1e-9;

/// Scales one ensemble coefficient. Negative control for the verifier.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorruptTerm {
    pub index: usize,
    pub scale: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutConfig {
    pub version: u32,
    pub seed: u64,
    pub n_qubits: usize,
    pub layers: usize,
    #[serde(default = "seca")]
    pub architecture: Architecture,
    #[serde(default = "ten")]
    pub theta_seeds: usize,
    #[serde(default = "default_observables")]
    pub observables: Vec<ObservableConfig>,
    #[serde(default = "budget")]
    pub budget: u64,
    #[serde(default)]
    pub intra: IntraEntangler,
    #[serde(default)]
    pub corrupt_term: Option<CorruptTerm>,
    #[serde(default = "report_name")]
    pub report_output: String,
    #[serde(default = "checks_name")]
    pub checks_output: String,
}

fn seca() -> Architecture {
    Architecture::Seca
}
fn ten() -> usize {
    10
}
fn default_observables() -> Vec<ObservableConfig> {
    vec![ObservableConfig::Heisenberg { coupling: 1.0, boundary: Default::default() }]
}
fn budget() -> u64 {
    DEFAULT_TERM_BUDGET
}
fn report_name() -> String {
    "cut_report.json".into()
}
fn checks_name() -> String {
    "cut_checks.json".into()
}

/// One `(θ seed, observable)` check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutCheck {
    pub theta_index: usize,
    pub observable: String,
    #[serde(flatten)]
    pub report: CutReport,
}

fn ensemble(cfg: &CutConfig) -> CliResult<CutEnsemble> {
    let base = cz_cut_ensemble();
    match cfg.corrupt_term {
        None => Ok(base),
        Some(c) => {
            let mut terms = base.terms().to_vec();
            let t = terms
                .get_mut(c.index)
                .ok_or_else(|| CliError::config(format!("corrupt_term index {} out of range", c.index)))?;
            t.coefficient *= c.scale;
            Ok(CutEnsemble::from_terms(terms)?)
        }
    }
}

fn error_of(c: &CutCheck) -> f64 {
    c.report.abs_error.filter(|e| e.is_finite()).unwrap_or(f64::INFINITY)
}

/// All checks, in `(θ seed, observable)` order.
pub fn checks(cfg: &CutConfig) -> CliResult<Vec<CutCheck>> {
    if cfg.n_qubits > MAX_CUT_QUBITS {
        return Err(CliError::config(format!(
            "cut-verify supports at most {MAX_CUT_QUBITS} qubits, got {}",
            cfg.n_qubits
        )));
    }
    if cfg.theta_seeds == 0 {
        return Err(CliError::config("theta_seeds must be at least 1"));
    }
    non_empty(&cfg.observables, "observable")?;
    let spec = AnsatzSpec::new(cfg.n_qubits, cfg.layers, cfg.architecture.scheme()).with_intra(cfg.intra);
    spec.validate()?;
    let ens = ensemble(cfg)?;
    let observables =
        cfg.observables.iter().map(|o| Ok((o.label(), o.build(&spec)?))).collect::<CliResult<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> =
        (0..cfg.theta_seeds).flat_map(|s| (0..observables.len()).map(move |o| (s, o))).collect();
    jobs.par_iter()
        .map(|&(s, o)| {
            let th: Vec<f64> = random_params(spec.param_count(), &mut rng::stream(cfg.seed, "cut-theta", s as u64));
            let (label, obs) = &observables[o];
            let report = verify_cut(&spec, &ens, &th, obs, cfg.budget)?;
            Ok(CutCheck { theta_index: s, observable: label.clone(), report })
        })
        .collect()
}

/// Writes the worst-case report and all checks; fails with a verification error past tolerance.
pub fn run(cfg: &CutConfig, out_dir: &Path) -> CliResult<Vec<PathBuf>> {
    let all = checks(cfg)?;
    let worst = all
        .iter()
        .fold(None::<&CutCheck>, |acc, c| match acc {
            Some(w) if error_of(w) >= error_of(c) => Some(w),
            _ => Some(c),
        })
        .expect("at least one check");
    let report_path = out_dir.join(&cfg.report_output);
    let checks_path = out_dir.join(&cfg.checks_output);
    output::write_text(&report_path, &output::pretty_json(&worst.report))?;
    output::write_text(&checks_path, &output::pretty_json(&all))?;
    let err = error_of(worst);
    if !err.is_finite() || err >= CUT_TOLERANCE {
        return Err(CliError::Verification(format!(
            "max |error| = {err:.3e} (tolerance {CUT_TOLERANCE:e}) at theta seed {} for {}: cut = {}, uncut = {}",
            worst.theta_index,
            worst.observable,
            worst.report.value,
            output::opt(worst.report.uncut_value),
        )));
    }
    Ok(vec![report_path, checks_path])
}
