//! Sampling estimators for expressibility, entangling capability and gradient variance.
//!
//! Parameters are drawn uniformly from `[0, 2π)`. Each sample `i` owns the
//! stream `rng::stream(seed, purpose, i)`, so reports are bit-identical for a
//! given seed regardless of how many threads run the loop.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzSpec, Circuit};
use crate::error::{arg, Error, Result};
use crate::num::Real;
use crate::rng;
use crate::statevec::{fidelity, Pauli, PauliObservable, PauliString, StateVector};
use crate::vqe::{parameter_shift_component, random_params};

pub const DEFAULT_BINS: usize = 50;
pub const DEFAULT_EXP_PAIRS: usize = 5000;
pub const DEFAULT_ENT_SAMPLES: usize = 1000;
pub const DEFAULT_GRAD_SAMPLES: usize = 500;

/// Fidelity density of Haar-random pairs, `(N-1)(1-F)^(N-2)`.
pub fn haar_fidelity_pdf(f: f64, dim: usize) -> Result<f64> {
    if dim < 2 {
        return arg(format!("Hilbert dimension must be >= 2, got {dim}"));
    }
    if !(0.0..=1.0).contains(&f) {
        return arg(format!("fidelity {f} outside [0, 1]"));
    }
    Ok((dim as f64 - 1.0) * (1.0 - f).powi(dim as i32 - 2))
}

/// Haar mass of the fidelity interval `[lo, hi]`: `(1-lo)^(N-1) - (1-hi)^(N-1)`.
pub fn haar_bin_probability(lo: f64, hi: f64, dim: usize) -> Result<f64> {
    if dim < 2 {
        return arg(format!("Hilbert dimension must be >= 2, got {dim}"));
    }
    if !(0.0 <= lo && lo < hi && hi <= 1.0) {
        return arg(format!("bin bounds [{lo}, {hi}] are not an interval inside [0, 1]"));
    }
    let k = dim as i32 - 1;
    Ok((1.0 - lo).powi(k) - (1.0 - hi).powi(k))
}

/// Bin index of a fidelity among `bins` equal-width bins on `[0, 1]`.
pub fn fidelity_bin(f: f64, bins: usize) -> usize {
    let f = f.clamp(0.0, 1.0);
    ((f * bins as f64) as usize).min(bins - 1)
}

/// `D_KL(P_samples ‖ P_Haar)` on `bins` equal-width bins, with `0·log 0 = 0`.
pub fn kl_to_haar(fidelities: &[f64], bins: usize, dim: usize) -> Result<f64> {
    if bins < 2 {
        return arg(format!("need at least 2 bins, got {bins}"));
    }
    if fidelities.is_empty() {
        return arg("no fidelity samples");
    }
    let mut counts = vec![0usize; bins];
    for &f in fidelities {
        counts[fidelity_bin(f, bins)] += 1;
    }
    let total = fidelities.len() as f64;
    let width = 1.0 / bins as f64;
    let mut kl = 0.0;
    for (b, &count) in counts.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let p = count as f64 / total;
        let hi = if b + 1 == bins { 1.0 } else { (b + 1) as f64 * width };
        let q = haar_bin_probability(b as f64 * width, hi, dim)?;
        kl += p * (p / q).ln();
    }
    Ok(kl)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpressibilityReport {
    pub kl_divergence: f64,
    pub bins: usize,
    pub n_pairs: usize,
    pub n_qubits: usize,
    pub spec: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntReport {
    pub ent: f64,
    pub n_samples: usize,
    pub spec: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradVarReport {
    pub variance: f64,
    pub mean: f64,
    pub param_index: usize,
    pub observable: String,
    pub n_samples: usize,
    pub spec: String,
}

/// Short label recorded in reports, e.g. `seca n=8 L=10 rxyz linear_chain`.
pub fn describe(spec: &AnsatzSpec) -> String {
    let intra = match spec.intra {
        crate::ansatz::IntraEntangler::LinearChain => "linear_chain",
        crate::ansatz::IntraEntangler::None => "none",
    };
    format!("{} n={} L={} rxyz {}", spec.scheme, spec.n_qubits, spec.layers, intra)
}

fn sample_state<T: Real>(circuit: &Circuit, seed: u64, purpose: &str, index: u64) -> Result<StateVector<T>> {
    let mut r = rng::stream(seed, purpose, index);
    let th = random_params::<T, _>(circuit.param_count(), &mut r);
    circuit.prepare(&th)
}

/// Pairwise fidelities of states prepared from independent uniform parameter pairs.
pub fn sample_fidelities<T: Real>(spec: &AnsatzSpec, n_pairs: usize, seed: u64) -> Result<Vec<f64>> {
    let circuit = spec.build()?;
    (0..n_pairs as u64)
        .into_par_iter()
        .map(|i| {
            let a = sample_state::<T>(&circuit, seed, "exp-a", i)?;
            let b = sample_state::<T>(&circuit, seed, "exp-b", i)?;
            Ok(fidelity(&a, &b)?.to_f64_lossy())
        })
        .collect()
}

pub fn estimate_expressibility<T: Real>(
    spec: &AnsatzSpec,
    n_pairs: usize,
    bins: usize,
    seed: u64,
) -> Result<ExpressibilityReport> {
    if bins < 2 {
        return arg(format!("need at least 2 bins, got {bins}"));
    }
    if n_pairs == 0 {
        return arg("need at least one fidelity pair");
    }
    let fids = sample_fidelities::<T>(spec, n_pairs, seed)?;
    Ok(ExpressibilityReport {
        kl_divergence: kl_to_haar(&fids, bins, 1usize << spec.n_qubits)?,
        bins,
        n_pairs,
        n_qubits: spec.n_qubits,
        spec: describe(spec),
    })
}

/// Meyer–Wallach entanglement `(4/n) Σ_k D(Γ_k(0)ψ, Γ_k(1)ψ)`, with the
/// generalised distance `D(u, v) = ½ Σ_{i,j} |u_i v_j - u_j v_i|²` summed explicitly.
pub fn meyer_wallach<T: Real>(state: &StateVector<T>) -> Result<T> {
    let n = state.n_qubits();
    if n < 2 {
        return arg(format!("Meyer-Wallach needs at least 2 qubits, got {n}"));
    }
    let amps = state.amplitudes();
    let mut total = T::zero();
    for k in 0..n {
        let (u, v) = split_on_qubit(amps, k);
        // Summand vanishes on the diagonal and is symmetric, so ½ Σ_{i,j} = Σ_{i<j}.
        let mut d = T::zero();
        for i in 0..u.len() {
            for j in i + 1..u.len() {
                d += (u[i] * v[j] - u[j] * v[i]).norm_sqr();
            }
        }
        total += d;
    }
    Ok(T::of(4.0) / T::of_usize(n) * total)
}

/// `(Γ_k(0)ψ, Γ_k(1)ψ)`: amplitudes with qubit `k` fixed to 0 or 1, qubit removed.
fn split_on_qubit<T: Real>(
    amps: &[crate::num::Amplitude<T>],
    k: usize,
) -> (Vec<crate::num::Amplitude<T>>, Vec<crate::num::Amplitude<T>>) {
    let stride = 1usize << k;
    let mut u = Vec::with_capacity(amps.len() / 2);
    let mut v = Vec::with_capacity(amps.len() / 2);
    for chunk in amps.chunks(stride << 1) {
        let (lo, hi) = chunk.split_at(stride);
        u.extend_from_slice(lo);
        v.extend_from_slice(hi);
    }
    (u, v)
}

/// `2 (1 - mean_k Tr ρ_k²)`, the marginal-purity form of the Meyer–Wallach measure.
pub fn meyer_wallach_from_purities<T: Real>(state: &StateVector<T>) -> Result<T> {
    let n = state.n_qubits();
    if n < 2 {
        return arg(format!("Meyer-Wallach needs at least 2 qubits, got {n}"));
    }
    let mut sum = T::zero();
    for k in 0..n {
        sum += state.reduced_purity(k)?;
    }
    Ok(T::of(2.0) * (T::one() - sum / T::of_usize(n)))
}

pub fn estimate_entangling_capability<T: Real>(spec: &AnsatzSpec, n_samples: usize, seed: u64) -> Result<EntReport> {
    if n_samples == 0 {
        return arg("need at least one sample");
    }
    let circuit = spec.build()?;
    let values: Vec<f64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let s = sample_state::<T>(&circuit, seed, "ent", i)?;
            Ok(meyer_wallach(&s)?.to_f64_lossy())
        })
        .collect::<Result<_>>()?;
    Ok(EntReport { ent: values.iter().sum::<f64>() / n_samples as f64, n_samples, spec: describe(spec) })
}

/// `Z_{n/2-1} Z_{n/2}` on the two boundary qubits.
pub fn boundary_zz<T: Real>(spec: &AnsatzSpec) -> Result<PauliObservable<T>> {
    let (a, b) = spec.boundary_pair();
    let n = spec.n_qubits;
    PauliObservable::from_terms(n, vec![PauliString::from_sites(n, T::one(), &[(a, Pauli::Z), (b, Pauli::Z)])?])
}

/// Sample mean and (population) variance of `∂C/∂θ_k` over uniform parameters.
pub fn estimate_gradient_variance<T: Real>(
    spec: &AnsatzSpec,
    obs: &PauliObservable<T>,
    param_index: usize,
    n_samples: usize,
    seed: u64,
) -> Result<GradVarReport> {
    if param_index >= spec.param_count() {
        return Err(Error::Index { what: "parameter", index: param_index, size: spec.param_count() });
    }
    if n_samples == 0 {
        return arg("need at least one sample");
    }
    let circuit = spec.build()?;
    let grads: Vec<f64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, "grad", i);
            let th = random_params::<T, _>(circuit.param_count(), &mut r);
            Ok(parameter_shift_component(&circuit, obs, &th, param_index)?.to_f64_lossy())
        })
        .collect::<Result<_>>()?;
    let n = n_samples as f64;
    let mean = grads.iter().sum::<f64>() / n;
    let variance = grads.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / n;
    let label = obs.terms().iter().map(|t| format!("{}*{}", t.coeff, t.label())).collect::<Vec<_>>().join("+");
    Ok(GradVarReport { variance, mean, param_index, observable: label, n_samples, spec: describe(spec) })
}

/// Relative change in percent, `(candidate - baseline) / baseline · 100`.
pub fn growth_rate(candidate: f64, baseline: f64) -> Result<f64> {
    if baseline == 0.0 {
        return Err(Error::Domain("growth rate against a zero baseline".into()));
    }
    Ok((candidate - baseline) / baseline * 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{ConnectionScheme, IntraEntangler};
    use crate::num::c;

    #[test]
    fn pdf_examples() {
        assert_eq!(haar_fidelity_pdf(0.0, 4).unwrap(), 3.0);
        assert_eq!(haar_fidelity_pdf(0.0, 256).unwrap(), 255.0);
        assert_eq!(haar_fidelity_pdf(1.0, 4).unwrap(), 0.0);
        assert!(haar_fidelity_pdf(1.5, 4).is_err());
        assert!(haar_fidelity_pdf(0.5, 1).is_err());
    }

    #[test]
    fn bin_probability_examples() {
        for n in [2, 4, 256] {
            assert_eq!(haar_bin_probability(0.0, 1.0, n).unwrap(), 1.0);
        }
        assert!((haar_bin_probability(0.0, 0.5, 2).unwrap() - 0.5).abs() < 1e-15);
        let total: f64 = (0..50)
            .map(|b| {
                haar_bin_probability(b as f64 / 50.0, if b == 49 { 1.0 } else { (b + 1) as f64 / 50.0 }, 256).unwrap()
            })
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(haar_bin_probability(0.6, 0.5, 4).is_err());
    }

    #[test]
    fn degenerate_histogram_closed_form() {
        // All fidelities equal to one land in the last bin.
        let fids = vec![1.0; 100];
        let kl = kl_to_haar(&fids, 50, 16).unwrap();
        let q_last = haar_bin_probability(49.0 / 50.0, 1.0, 16).unwrap();
        assert!((kl - (1.0 / q_last).ln()).abs() < 1e-9);
        assert!(kl_to_haar(&fids, 1, 16).is_err());
    }

    #[test]
    fn meyer_wallach_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let prod = StateVector::<f64>::zero(2).unwrap();
        assert!(meyer_wallach(&prod).unwrap().abs() < 1e-12);
        let bell = StateVector::from_amplitudes(vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]).unwrap();
        assert!((meyer_wallach(&bell).unwrap() - 1.0).abs() < 1e-12);
        let t = 1.0 / 3f64.sqrt();
        let mut w = vec![c(0.0, 0.0); 8];
        for i in [1, 2, 4] {
            w[i] = c(t, 0.0);
        }
        let w = StateVector::from_amplitudes(w).unwrap();
        assert!((meyer_wallach(&w).unwrap() - 8.0 / 9.0).abs() < 1e-12);
        assert!(meyer_wallach(&StateVector::<f64>::zero(1).unwrap()).is_err());
    }

    #[test]
    fn product_circuit_has_zero_entangling_capability() {
        let spec = AnsatzSpec::new(4, 1, ConnectionScheme::NoCz).with_intra(IntraEntangler::None);
        let r = estimate_entangling_capability::<f64>(&spec, 50, 3).unwrap();
        assert!(r.ent.abs() < 1e-9);
    }

    #[test]
    fn identity_probe_has_zero_gradient_variance() {
        let spec = AnsatzSpec::new(4, 2, ConnectionScheme::Seca);
        let id = PauliObservable::from_terms(4, vec![PauliString::identity(4, 1.0)]).unwrap();
        let r = estimate_gradient_variance(&spec, &id, 0, 40, 1).unwrap();
        assert!(r.variance < 1e-20);
        assert!(estimate_gradient_variance(&spec, &id, spec.param_count(), 40, 1).is_err());
    }

    #[test]
    fn growth_rate_examples() {
        assert_eq!(growth_rate(2.0, 2.0).unwrap(), 0.0);
        assert!((growth_rate(4.0667, 1.0).unwrap() - 306.67).abs() < 1e-9);
        assert!((growth_rate(0.834, 1.0).unwrap() + 16.6).abs() < 1e-9);
        assert!(growth_rate(1.0, 0.0).is_err());
    }

    #[test]
    fn reports_are_seed_deterministic() {
        let spec = AnsatzSpec::new(4, 2, ConnectionScheme::Seca);
        let a = estimate_expressibility::<f64>(&spec, 200, 50, 11).unwrap();
        let b = estimate_expressibility::<f64>(&spec, 200, 50, 11).unwrap();
        assert_eq!(a, b);
        let c = estimate_expressibility::<f64>(&spec, 200, 50, 12).unwrap();
        assert_ne!(a.kl_divergence, c.kl_divergence);
    }
}
