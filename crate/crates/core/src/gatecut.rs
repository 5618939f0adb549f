//! Gate cutting of boundary CZs.
//!
//! A CZ between qubits `a` and `b` equals, up to a global phase,
//! `e^{iπZ_b/4} e^{iπZ_a/4} e^{-iπ Z_a Z_b/4}`. The two local phases are kept
//! as fixed single-qubit gates in each half. The non-local factor
//! `e^{iθ Z⊗Z}` with `θ = -π/4` is expanded as a signed sum of ten local
//! channels:
//!
//! ```text
//! S(e^{iθ Z⊗Z}) = cos²θ S(I⊗I) + sin²θ S(Z⊗Z)
//!   + (1/8) cosθ sinθ Σ_{α1,α2=±1} α1 α2 [ S((I+α1 Z)⊗(I+iα2 Z)) + S((I+iα1 Z)⊗(I+α2 Z)) ]
//! ```
//!
//! With `I + αZ = 2 P_α` and `I + iαZ = √2 e^{iαπZ/4}`, each cross term is
//! `8 · S(P_α ⊗ e^{iαπZ/4})`, which cancels the `1/8`. Projectors are applied
//! without renormalisation so every scalar lives in the term coefficient.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzSpec, Circuit, ConnectionScheme, Gate};
use crate::error::{arg, Error, Result};
use crate::num::Real;
use crate::rng;
use crate::statevec::{Axis, PauliObservable, PauliString, StateVector};

/// Number of sub-circuit terms replacing one CZ.
pub const TERMS_PER_CUT: usize = 10;
/// Largest cut count whose `10^k` combinations fit the overhead counter.
pub const MAX_CUTS: usize = 18;
/// Default cap on term combinations executed exactly.
pub const DEFAULT_TERM_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Single-qubit operation spliced into a half circuit at a cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LocalCutOp {
    Identity,
    PauliZ,
    /// Unnormalised projector `(I + αZ)/2`.
    ProjZ(Sign),
    /// `e^{iαπZ/4}`.
    RotZQuarter(Sign),
}

impl LocalCutOp {
    pub fn apply<T: Real>(self, state: &mut StateVector<T>, q: usize) -> Result<()> {
        match self {
            LocalCutOp::Identity => Ok(()),
            LocalCutOp::PauliZ => state.apply_z(q),
            LocalCutOp::ProjZ(s) => state.apply_projector(q, s == Sign::Minus),
            // e^{iαπZ/4} = Rz(-απ/2)
            LocalCutOp::RotZQuarter(s) => state.apply_rotation(Axis::Z, q, T::of(-s.value() * FRAC_PI_2)),
        }
    }
}

/// `e^{iπZ/4}` applied to each boundary qubit at every cut.
pub fn apply_fixed_phase<T: Real>(state: &mut StateVector<T>, q: usize) -> Result<()> {
    state.apply_rotation(Axis::Z, q, T::of(-FRAC_PI_2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutTerm {
    pub coefficient: f64,
    pub op_a: LocalCutOp,
    pub op_b: LocalCutOp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutEnsemble {
    terms: Vec<CutTerm>,
}

impl CutEnsemble {
    pub fn from_terms(terms: Vec<CutTerm>) -> Result<Self> {
        if terms.len() != TERMS_PER_CUT {
            return arg(format!("a CZ cut needs {TERMS_PER_CUT} terms, got {}", terms.len()));
        }
        if let Some(t) = terms.iter().find(|t| !t.coefficient.is_finite() || t.coefficient == 0.0) {
            return arg(format!("term coefficient {} must be finite and nonzero", t.coefficient));
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[CutTerm] {
        &self.terms
    }

    /// `Σ |c_t|`, the sampling-overhead factor of one cut.
    pub fn kappa(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs()).sum()
    }

    /// Applies the fixed phases and term `t` to qubits `a`, `b` of a full register.
    pub fn apply_term<T: Real>(&self, t: usize, state: &mut StateVector<T>, a: usize, b: usize) -> Result<()> {
        let term = self.terms.get(t).ok_or(Error::Index { what: "cut term", index: t, size: self.terms.len() })?;
        apply_fixed_phase(state, a)?;
        apply_fixed_phase(state, b)?;
        term.op_a.apply(state, a)?;
        term.op_b.apply(state, b)
    }

    /// `Σ_t c_t <ψ|K_t† O K_t|ψ>`: the expectation of `obs` after the cut CZ on `(a, b)`.
    pub fn channel_expectation<T: Real>(
        &self,
        state: &StateVector<T>,
        a: usize,
        b: usize,
        obs: &PauliObservable<T>,
    ) -> Result<T> {
        let mut total = T::zero();
        for (t, term) in self.terms.iter().enumerate() {
            let mut s = state.clone();
            self.apply_term(t, &mut s, a, b)?;
            total += T::of(term.coefficient) * s.expectation(obs)?;
        }
        Ok(total)
    }
}

/// Ten-term quasi-probability expansion of CZ.
pub fn cz_cut_ensemble() -> CutEnsemble {
    let theta = -FRAC_PI_4;
    let (s, c) = theta.sin_cos();
    // (I+αZ) = 2P_α and (I+iαZ) = √2 R_α, so each cross superoperator carries (2·√2)².
    let norm = (2.0 * SQRT_2).powi(2);
    let cross = c * s / 8.0 * norm;
    let mut terms = vec![
        CutTerm { coefficient: c * c, op_a: LocalCutOp::Identity, op_b: LocalCutOp::Identity },
        CutTerm { coefficient: s * s, op_a: LocalCutOp::PauliZ, op_b: LocalCutOp::PauliZ },
    ];
    for a1 in [Sign::Plus, Sign::Minus] {
        for a2 in [Sign::Plus, Sign::Minus] {
            let w = cross * a1.value() * a2.value();
            terms.push(CutTerm { coefficient: w, op_a: LocalCutOp::ProjZ(a1), op_b: LocalCutOp::RotZQuarter(a2) });
            terms.push(CutTerm { coefficient: w, op_a: LocalCutOp::RotZQuarter(a1), op_b: LocalCutOp::ProjZ(a2) });
        }
    }
    CutEnsemble::from_terms(terms).expect("ten finite nonzero terms")
}

/// `10^k` sub-circuit combinations for `k` cuts.
pub fn overhead(k_cuts: usize) -> Result<u64> {
    if k_cuts > MAX_CUTS {
        return Err(Error::Capacity { what: "cuts", requested: k_cuts as u64, limit: MAX_CUTS as u64 });
    }
    Ok((TERMS_PER_CUT as u64).pow(k_cuts as u32))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HalfGate {
    Rotation {
        axis: Axis,
        q: usize,
        p: usize,
    },
    Cz {
        q1: usize,
        q2: usize,
    },
    /// `e^{iπZ/4}` left behind by a cut CZ.
    FixedPhase {
        q: usize,
    },
    /// Where the `LocalCutOp` of cut number `cut` is applied.
    CutSlot {
        cut: usize,
        q: usize,
    },
}

/// One block of a bipartitioned circuit, on local qubit indices `0..n_qubits`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfCircuit {
    pub n_qubits: usize,
    /// Global index of local qubit 0.
    pub offset: usize,
    pub gates: Vec<HalfGate>,
}

impl HalfCircuit {
    /// Runs the half with `choose(cut)` supplying the local op at each cut slot.
    pub fn run<T: Real>(&self, params: &[T], choose: impl Fn(usize) -> LocalCutOp) -> Result<StateVector<T>> {
        let mut s = StateVector::zero(self.n_qubits)?;
        for g in &self.gates {
            match *g {
                HalfGate::Rotation { axis, q, p } => {
                    let angle =
                        *params.get(p).ok_or(Error::Index { what: "parameter", index: p, size: params.len() })?;
                    s.apply_rotation(axis, q, angle)?
                }
                HalfGate::Cz { q1, q2 } => s.apply_cz(q1, q2)?,
                HalfGate::FixedPhase { q } => apply_fixed_phase(&mut s, q)?,
                HalfGate::CutSlot { cut, q } => choose(cut).apply(&mut s, q)?,
            }
        }
        Ok(s)
    }

    pub fn cut_slots(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, HalfGate::CutSlot { .. })).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitCircuit {
    pub a: HalfCircuit,
    pub b: HalfCircuit,
    /// Layer (1-based) of each cut, when known.
    pub cut_points: Vec<usize>,
    pub param_count: usize,
}

impl SplitCircuit {
    pub fn cuts(&self) -> usize {
        self.cut_points.len()
    }
}

/// Splits a circuit at `n/2`; every CZ straddling the halves becomes a cut.
pub fn split_circuit(circuit: &Circuit) -> Result<SplitCircuit> {
    let n = circuit.n_qubits;
    if n < 2 || !n.is_multiple_of(2) {
        return arg(format!("cannot bipartition {n} qubits"));
    }
    let half = n / 2;
    let mut a = HalfCircuit { n_qubits: half, offset: 0, gates: Vec::new() };
    let mut b = HalfCircuit { n_qubits: half, offset: half, gates: Vec::new() };
    let mut cuts = 0;
    for g in &circuit.gates {
        match *g {
            Gate::Rotation { axis, q, p } => {
                if q < half {
                    a.gates.push(HalfGate::Rotation { axis, q, p });
                } else {
                    b.gates.push(HalfGate::Rotation { axis, q: q - half, p });
                }
            }
            Gate::Cz { q1, q2 } => match (q1 < half, q2 < half) {
                (true, true) => a.gates.push(HalfGate::Cz { q1, q2 }),
                (false, false) => b.gates.push(HalfGate::Cz { q1: q1 - half, q2: q2 - half }),
                (in_a, _) => {
                    let (qa, qb) = if in_a { (q1, q2 - half) } else { (q2, q1 - half) };
                    a.gates.push(HalfGate::FixedPhase { q: qa });
                    a.gates.push(HalfGate::CutSlot { cut: cuts, q: qa });
                    b.gates.push(HalfGate::FixedPhase { q: qb });
                    b.gates.push(HalfGate::CutSlot { cut: cuts, q: qb });
                    cuts += 1;
                }
            },
        }
    }
    Ok(SplitCircuit { a, b, cut_points: (1..=cuts).collect(), param_count: circuit.param_count() })
}

/// Splits the ansatz of `spec`; cut points are the connected layers.
pub fn split(spec: &AnsatzSpec) -> Result<SplitCircuit> {
    let mut s = split_circuit(&spec.build()?)?;
    s.cut_points = spec.connected_layers().into_iter().collect();
    debug_assert_eq!(s.cut_points.len(), s.a.cut_slots());
    Ok(s)
}

/// A Pauli string factored into its block-A and block-B parts.
struct FactoredTerm<T> {
    coeff: T,
    a: PauliString<T>,
    b: PauliString<T>,
}

fn factor_observable<T: Real>(obs: &PauliObservable<T>, half: usize) -> Vec<FactoredTerm<T>> {
    obs.terms()
        .iter()
        .map(|t| FactoredTerm {
            coeff: t.coeff,
            a: PauliString::new(T::one(), t.letters[..half].to_vec()),
            b: PauliString::new(T::one(), t.letters[half..].to_vec()),
        })
        .collect()
}

fn combo_value<T: Real>(split: &SplitCircuit, terms: &[FactoredTerm<T>], params: &[T], pick: &[&CutTerm]) -> Result<T> {
    let sa = split.a.run(params, |cut| pick[cut].op_a)?;
    let sb = split.b.run(params, |cut| pick[cut].op_b)?;
    let mut v = T::zero();
    for t in terms {
        v += t.coeff * sa.pauli_expectation(&t.a)? * sb.pauli_expectation(&t.b)?;
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutOutcome<T> {
    pub cuts: usize,
    pub terms_executed: u64,
    pub kappa: f64,
    pub value: T,
}

fn check_inputs<T: Real>(split: &SplitCircuit, params: &[T], obs: &PauliObservable<T>) -> Result<()> {
    if params.len() != split.param_count {
        return arg(format!("expected {} parameters, got {}", split.param_count, params.len()));
    }
    let n = split.a.n_qubits + split.b.n_qubits;
    if obs.n_qubits() != n {
        return arg(format!("observable on {} qubits for a {n}-qubit circuit", obs.n_qubits()));
    }
    Ok(())
}

/// Exact reconstruction: sums all `10^k` term combinations, each simulated as two independent halves.
pub fn execute_cut<T: Real>(
    split: &SplitCircuit,
    ensemble: &CutEnsemble,
    params: &[T],
    obs: &PauliObservable<T>,
    budget: u64,
) -> Result<CutOutcome<T>> {
    check_inputs(split, params, obs)?;
    let k = split.cuts();
    let combos = overhead(k)?;
    if combos > budget {
        return Err(Error::Capacity { what: "cut term combinations (10^k)", requested: combos, limit: budget });
    }
    let terms = factor_observable(obs, split.a.n_qubits);
    let per_cut = ensemble.terms();
    let parts: Vec<T> = (0..combos)
        .into_par_iter()
        .map(|mut idx| {
            let mut pick = Vec::with_capacity(k);
            let mut coeff = 1.0;
            for _ in 0..k {
                let t = &per_cut[(idx % TERMS_PER_CUT as u64) as usize];
                idx /= TERMS_PER_CUT as u64;
                coeff *= t.coefficient;
                pick.push(t);
            }
            Ok(T::of(coeff) * combo_value(split, &terms, params, &pick)?)
        })
        .collect::<Result<_>>()?;
    Ok(CutOutcome { cuts: k, terms_executed: combos, kappa: ensemble.kappa(), value: parts.into_iter().sum() })
}

/// Monte-Carlo estimate: each shot draws one term per cut with probability `|c_t|/κ`
/// and contributes `κ^k · Π sign(c_t) · value`.
pub fn sample_cut<T: Real>(
    split: &SplitCircuit,
    ensemble: &CutEnsemble,
    params: &[T],
    obs: &PauliObservable<T>,
    shots: usize,
    seed: u64,
) -> Result<T> {
    check_inputs(split, params, obs)?;
    if shots == 0 {
        return arg("need at least one shot");
    }
    let k = split.cuts();
    let kappa = ensemble.kappa();
    let terms = factor_observable(obs, split.a.n_qubits);
    let per_cut = ensemble.terms();
    let values: Vec<T> = (0..shots as u64)
        .into_par_iter()
        .map(|shot| {
            let mut r = rng::stream(seed, "cut-sample", shot);
            let mut pick = Vec::with_capacity(k);
            let mut sign = 1.0;
            for _ in 0..k {
                let mut u = r.random::<f64>() * kappa;
                let mut chosen = &per_cut[per_cut.len() - 1];
                for t in per_cut {
                    if u < t.coefficient.abs() {
                        chosen = t;
                        break;
                    }
                    u -= t.coefficient.abs();
                }
                sign *= chosen.coefficient.signum();
                pick.push(chosen);
            }
            Ok(T::of(sign * kappa.powi(k as i32)) * combo_value(split, &terms, params, &pick)?)
        })
        .collect::<Result<_>>()?;
    Ok(values.into_iter().sum::<T>() / T::of_usize(shots))
}

/// Cut-execution report, serialised as the JSON record of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutReport {
    pub cuts: usize,
    pub terms_executed: u64,
    pub kappa: f64,
    pub value: f64,
    pub uncut_value: Option<f64>,
    pub abs_error: Option<f64>,
}

/// Runs the cut reconstruction and compares it to the uncut statevector value.
pub fn verify_cut<T: Real>(
    spec: &AnsatzSpec,
    ensemble: &CutEnsemble,
    params: &[T],
    obs: &PauliObservable<T>,
    budget: u64,
) -> Result<CutReport> {
    let split = split(spec)?;
    let out = execute_cut(&split, ensemble, params, obs, budget)?;
    let uncut = spec.prepare(params)?.expectation(obs)?.to_f64_lossy();
    let value = out.value.to_f64_lossy();
    Ok(CutReport {
        cuts: out.cuts,
        terms_executed: out.terms_executed,
        kappa: out.kappa,
        value,
        uncut_value: Some(uncut),
        abs_error: Some((value - uncut).abs()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CzRatio {
    pub s_cz: usize,
    pub s_feca: usize,
    pub ratio: f64,
}

/// CZ count of `spec` relative to the fully connected scheme at the same `(n, L)`.
pub fn r_cz(spec: &AnsatzSpec) -> Result<CzRatio> {
    spec.validate()?;
    let s_cz = spec.cz_count();
    let feca = AnsatzSpec { scheme: ConnectionScheme::Feca, ..spec.clone() };
    let s_feca = feca.cz_count();
    Ok(CzRatio { s_cz, s_feca, ratio: s_cz as f64 / s_feca as f64 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ensemble_shape() {
        let e = cz_cut_ensemble();
        assert_eq!(e.terms().len(), 10);
        assert!((e.terms()[0].coefficient.abs() - 0.5).abs() < 1e-15);
        assert!((e.terms()[1].coefficient.abs() - 0.5).abs() < 1e-15);
        assert!(e.terms()[2..].iter().all(|t| (t.coefficient.abs() - 0.5).abs() < 1e-12));
        assert!((e.kappa() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn from_terms_validates() {
        let e = cz_cut_ensemble();
        assert!(CutEnsemble::from_terms(e.terms()[..9].to_vec()).is_err());
        let mut t = e.terms().to_vec();
        t[3].coefficient = 0.0;
        assert!(CutEnsemble::from_terms(t).is_err());
    }

    #[test]
    fn overhead_values() {
        assert_eq!(overhead(0).unwrap(), 1);
        assert_eq!(overhead(1).unwrap(), 10);
        assert_eq!(overhead(3).unwrap(), 1000);
        assert_eq!(overhead(18).unwrap(), 10u64.pow(18));
        assert!(overhead(19).is_err());
    }

    #[test]
    fn split_cut_points() {
        let s = split(&AnsatzSpec::new(8, 3, ConnectionScheme::Seca)).unwrap();
        assert_eq!(s.cut_points, vec![2]);
        let f = split(&AnsatzSpec::new(8, 3, ConnectionScheme::Feca)).unwrap();
        assert_eq!(f.cut_points, vec![1, 2, 3]);
        let z = split(&AnsatzSpec::new(8, 3, ConnectionScheme::NoCz)).unwrap();
        assert!(z.cut_points.is_empty());
        for h in [&f.a, &f.b] {
            assert_eq!(h.n_qubits, 4);
            for g in &h.gates {
                match *g {
                    HalfGate::Rotation { q, .. } | HalfGate::FixedPhase { q } | HalfGate::CutSlot { q, .. } => {
                        assert!(q < 4)
                    }
                    HalfGate::Cz { q1, q2 } => assert!(q1 < 4 && q2 < 4),
                }
            }
        }
    }

    #[test]
    fn budget_exceeded_names_combinations() {
        let spec = AnsatzSpec::new(4, 3, ConnectionScheme::Feca);
        let s = split(&spec).unwrap();
        let obs = crate::metrics::boundary_zz::<f64>(&spec).unwrap();
        let th = vec![0.1; spec.param_count()];
        match execute_cut(&s, &cz_cut_ensemble(), &th, &obs, 999) {
            Err(Error::Capacity { requested, .. }) => assert_eq!(requested, 1000),
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn r_cz_examples() {
        for (n, l) in [(4, 1), (8, 20), (12, 30)] {
            assert_eq!(r_cz(&AnsatzSpec::new(n, l, ConnectionScheme::Feca)).unwrap().ratio, 1.0);
        }
        let r = r_cz(&AnsatzSpec::new(8, 20, ConnectionScheme::Seca)).unwrap();
        assert_eq!((r.s_cz, r.s_feca), (121, 140));
        assert!((r.ratio - 121.0 / 140.0).abs() < 1e-15);
    }
}
