//! Benchmark Hamiltonians, their exact references, and the V-score.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::num::Real;
use crate::statevec::{Pauli, PauliObservable, PauliString};

/// Largest register handed to the dense eigensolver.
pub const MAX_DENSE_QUBITS: usize = 12;
/// Largest QUBO (or diagonal observable) enumerated exhaustively.
pub const MAX_ENUM_VARIABLES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Periodic,
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergSpec<T> {
    pub n_sites: usize,
    pub coupling: T,
    #[serde(default)]
    pub boundary: Boundary,
}

/// `J Σ S_i·S_{i+1}` with `S = σ/2`, i.e. `(J/4)(XX + YY + ZZ)` per bond.
///
/// A periodic chain of two sites has a single bond.
pub fn heisenberg<T: Real>(spec: &HeisenbergSpec<T>) -> Result<PauliObservable<T>> {
    let n = spec.n_sites;
    if n < 2 {
        return arg(format!("Heisenberg chain needs at least 2 sites, got {n}"));
    }
    let mut bonds: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    if spec.boundary == Boundary::Periodic && n > 2 {
        bonds.push((n - 1, 0));
    }
    let w = spec.coupling / T::of(4.0);
    let mut obs = PauliObservable::new(n);
    for (i, j) in bonds {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            obs.push(PauliString::from_sites(n, w, &[(i, p), (j, p)])?)?;
        }
    }
    Ok(obs)
}

/// Symmetric QUBO weight matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboInstance<T> {
    n: usize,
    weights: Vec<T>,
    pub seed: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct EdgeJson<T> {
    i: usize,
    j: usize,
    w: T,
}

#[derive(Serialize, Deserialize)]
struct QuboJson<T> {
    n: usize,
    edges: Vec<EdgeJson<T>>,
    #[serde(default)]
    seed: Option<u64>,
}

impl<T: Real> QuboInstance<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, weights: vec![T::zero(); n * n], seed: None }
    }

    /// Builds an instance from `(i, j, w)` edges; both `M_ij` and `M_ji` are set to `w`.
    pub fn from_edges(n: usize, edges: &[(usize, usize, T)]) -> Result<Self> {
        let mut q = Self::zeros(n);
        for &(i, j, w) in edges {
            q.set(i, j, w)?;
        }
        Ok(q)
    }

    pub fn set(&mut self, i: usize, j: usize, w: T) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(Error::Index { what: "vertex", index: i.max(j), size: self.n });
        }
        if i == j {
            return arg(format!("diagonal entry M[{i}][{i}] must stay zero"));
        }
        self.weights[i * self.n + j] = w;
        self.weights[j * self.n + i] = w;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> T {
        self.weights[i * self.n + j]
    }

    /// Nonzero `(i, j, M_ij)` with `i < j`, row-major.
    pub fn edges(&self) -> Vec<(usize, usize, T)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                let w = self.weight(i, j);
                if w != T::zero() {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    /// `2E / (n(n-1))`.
    pub fn density(&self) -> f64 {
        let pairs = self.n * self.n.saturating_sub(1) / 2;
        if pairs == 0 {
            return 0.0;
        }
        self.edges().len() as f64 / pairs as f64
    }

    /// `Σ_{i,j} M_ij`.
    pub fn total_weight(&self) -> T {
        self.weights.iter().copied().sum()
    }

    /// Cost of the assignment whose bit `i` is `x_i`.
    pub fn cost_of_index(&self, index: usize) -> T {
        self.edges_cost(&self.edges(), index)
    }

    fn edges_cost(&self, edges: &[(usize, usize, T)], index: usize) -> T {
        let two = T::of(2.0);
        edges
            .iter()
            .filter(|&&(i, j, _)| (index >> i) & 1 == 1 && (index >> j) & 1 == 1)
            .map(|&(_, _, w)| two * w)
            .sum()
    }

    pub fn to_json(&self) -> String {
        let doc = QuboJson {
            n: self.n,
            edges: self.edges().into_iter().map(|(i, j, w)| EdgeJson { i, j, w }).collect(),
            seed: self.seed,
        };
        serde_json::to_string(&doc).expect("QUBO serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: QuboJson<T> = serde_json::from_str(text).map_err(|e| Error::Argument(format!("QUBO JSON: {e}")))?;
        let mut q = Self::zeros(doc.n);
        for e in doc.edges {
            q.set(e.i, e.j, e.w)?;
        }
        q.seed = doc.seed;
        Ok(q)
    }
}

/// Random QUBO with `round(D·n(n-1)/2)` distinct edges and weights uniform in `weight_range`.
pub fn random_qubo<T: Real, R: Rng + ?Sized>(
    n: usize,
    density: f64,
    weight_range: (f64, f64),
    rng: &mut R,
) -> Result<QuboInstance<T>> {
    if !(density > 0.0 && density <= 1.0) {
        return arg(format!("density must lie in (0, 1], got {density}"));
    }
    if weight_range.0 >= weight_range.1 {
        return arg("weight range is empty");
    }
    let pairs = n * n.saturating_sub(1) / 2;
    let edges = (density * pairs as f64).round() as usize;
    if edges < 1 {
        return arg(format!("density {density} on {n} vertices yields no edges"));
    }
    let mut chosen = sample(rng, pairs, edges).into_vec();
    chosen.sort_unstable();
    let all_pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let (lo, hi) = weight_range;
    let mut q = QuboInstance::zeros(n);
    for k in chosen {
        let (i, j) = all_pairs[k];
        let w = lo + (hi - lo) * rng.random::<f64>();
        q.set(i, j, T::of(w))?;
    }
    Ok(q)
}

/// `Σ_{i,j} x_i M_ij x_j` over all ordered pairs.
pub fn qubo_cost<T: Real>(x: &[u8], m: &QuboInstance<T>) -> Result<T> {
    if x.len() != m.n() {
        return arg(format!("assignment length {} for {} variables", x.len(), m.n()));
    }
    if let Some(bad) = x.iter().find(|&&b| b > 1) {
        return arg(format!("assignment entry {bad} is not binary"));
    }
    let mut total = T::zero();
    for i in 0..m.n() {
        for j in 0..m.n() {
            if x[i] == 1 && x[j] == 1 {
                total += m.weight(i, j);
            }
        }
    }
    Ok(total)
}

/// Unpacks bit `i` of `index` into `x_i`.
pub fn bits_of(index: usize, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((index >> i) & 1) as u8).collect()
}

/// Ising form whose basis-state energies reproduce the QUBO cost.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingForm<T> {
    /// `J_ij = -M_ij` for `i < j`.
    pub couplings: Vec<(usize, usize, T)>,
    /// `h_i = -Σ_j M_ij`.
    pub fields: Vec<T>,
    /// Weighted `Z_iZ_j` and `Z_i` terms; add [`Self::offset`] to obtain the cost.
    pub observable: PauliObservable<T>,
    pub offset: T,
}

impl<T: Real> IsingForm<T> {
    /// `<index|observable|index> + offset`.
    pub fn energy_of_index(&self, index: usize) -> T {
        self.observable.diagonal_value(index) + self.offset
    }
}

/// Maps `C(x) = Σ x_i M_ij x_j` onto Pauli-Z operators.
///
/// Bit `x_i` of a basis state is the QUBO variable, so `x_i = (1 - z_i)/2` with
/// `z_i` the eigenvalue of `Z_i`. Then
/// `C = -½ Σ_{i<j} J_ij z_i z_j + ½ Σ_i h_i z_i + ¼ Σ_{i,j} M_ij`.
pub fn to_ising<T: Real>(m: &QuboInstance<T>) -> Result<IsingForm<T>> {
    let n = m.n();
    let half = T::of(0.5);
    let couplings: Vec<(usize, usize, T)> = m.edges().into_iter().map(|(i, j, w)| (i, j, -w)).collect();
    let fields: Vec<T> = (0..n).map(|i| -(0..n).map(|j| m.weight(i, j)).sum::<T>()).collect();
    let mut observable = PauliObservable::new(n);
    for &(i, j, jij) in &couplings {
        observable.push(PauliString::from_sites(n, -half * jij, &[(i, Pauli::Z), (j, Pauli::Z)])?)?;
    }
    for (i, &h) in fields.iter().enumerate() {
        if h != T::zero() {
            observable.push(PauliString::from_sites(n, half * h, &[(i, Pauli::Z)])?)?;
        }
    }
    let offset = m.total_weight() / T::of(4.0);
    Ok(IsingForm { couplings, fields, observable, offset })
}

/// Exhaustive minimum; ties go to the assignment with the smallest integer value.
pub fn brute_force_min<T: Real>(m: &QuboInstance<T>) -> Result<(Vec<u8>, T)> {
    let n = m.n();
    if n > MAX_ENUM_VARIABLES {
        return Err(Error::Capacity { what: "QUBO variables", requested: n as u64, limit: MAX_ENUM_VARIABLES as u64 });
    }
    let edges = m.edges();
    let (index, cost) = argmin_over_indices(1usize << n, |idx| m.edges_cost(&edges, idx));
    Ok((bits_of(index, n), cost))
}

fn argmin_over_indices<T: Real>(count: usize, f: impl Fn(usize) -> T + Sync) -> (usize, T) {
    const CHUNK: usize = 1 << 12;
    let chunk_best = |start: usize| {
        let end = (start + CHUNK).min(count);
        let mut best = (start, f(start));
        for idx in start + 1..end {
            let v = f(idx);
            if v < best.1 {
                best = (idx, v);
            }
        }
        best
    };
    let starts: Vec<usize> = (0..count).step_by(CHUNK).collect();
    let bests: Vec<(usize, T)> = starts.par_iter().map(|&s| chunk_best(s)).collect();
    bests.into_iter().reduce(|a, b| if b.1 < a.1 { b } else { a }).expect("at least one index")
}

/// Dense `2^n × 2^n` matrix of the observable, built column by column.
pub fn dense_matrix<T: Real>(obs: &PauliObservable<T>) -> Result<DMatrix<Complex64>> {
    let n = obs.n_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::Capacity {
            what: "qubits for dense matrix",
            requested: n as u64,
            limit: MAX_DENSE_QUBITS as u64,
        });
    }
    let dim = 1usize << n;
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for t in obs.terms() {
        let m = t.masks();
        let w = t.coeff.to_f64_lossy();
        for col in 0..dim {
            h[(col ^ m.x_mask, col)] += m.phase::<f64>(col) * w;
        }
    }
    Ok(h)
}

/// Smallest eigenvalue of the observable.
///
/// Diagonal observables are minimised over basis states (up to 20 qubits); the
/// rest go through a dense Hermitian eigensolve (up to 12 qubits), real
/// symmetric when every string has an even number of `Y`s.
pub fn exact_ground<T: Real>(obs: &PauliObservable<T>) -> Result<T> {
    let n = obs.n_qubits();
    if obs.is_diagonal() {
        if n > MAX_ENUM_VARIABLES {
            return Err(Error::Capacity {
                what: "qubits for diagonal minimum",
                requested: n as u64,
                limit: MAX_ENUM_VARIABLES as u64,
            });
        }
        return Ok(argmin_over_indices(1usize << n, |i| obs.diagonal_value(i)).1);
    }
    let h = dense_matrix(obs)?;
    let real = obs.terms().iter().all(|t| t.masks().y_count % 2 == 0);
    let min = if real {
        let hr = h.map(|z| z.re);
        SymmetricEigen::new(hr).eigenvalues.min()
    } else {
        SymmetricEigen::new(h).eigenvalues.min()
    };
    if !min.is_finite() {
        return Err(Error::Numerical("eigensolver returned a non-finite value".into()));
    }
    Ok(T::of(min))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VScoreInputs<T> {
    pub e_vqe: T,
    pub e_var: T,
    pub n_dof: usize,
    pub e_inf: T,
}

/// `N · E_var / (E_VQE - E_∞)²`.
pub fn v_score<T: Real>(inputs: &VScoreInputs<T>) -> Result<T> {
    let gap = inputs.e_vqe - inputs.e_inf;
    if gap == T::zero() {
        return Err(Error::Domain(format!("V-score undefined when E_VQE equals the zero point {}", inputs.e_inf)));
    }
    Ok(T::of_usize(inputs.n_dof) * inputs.e_var / (gap * gap))
}
