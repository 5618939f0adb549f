//! Dense-matrix reference implementations used as test oracles.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use seca_core::{Axis, Circuit, Gate, Pauli};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli(p: Pauli) -> CMat {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match p {
        Pauli::I => CMat::from_row_slice(2, 2, &[o, z, z, o]),
        Pauli::X => CMat::from_row_slice(2, 2, &[z, o, o, z]),
        Pauli::Y => CMat::from_row_slice(2, 2, &[z, -i, i, z]),
        Pauli::Z => CMat::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

pub fn rotation(axis: Axis, theta: f64) -> CMat {
    let (s, co) = (theta / 2.0).sin_cos();
    match axis {
        Axis::X => CMat::from_row_slice(2, 2, &[c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)]),
        Axis::Y => CMat::from_row_slice(2, 2, &[c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)]),
        Axis::Z => CMat::from_row_slice(2, 2, &[c(co, -s), c(0.0, 0.0), c(0.0, 0.0), c(co, s)]),
    }
}

/// `ops[n-1] ⊗ … ⊗ ops[0]`: qubit 0 is the least significant bit.
pub fn kron_all(ops: &[CMat]) -> CMat {
    let mut out = CMat::identity(1, 1);
    for op in ops {
        out = op.kronecker(&out);
    }
    out
}

pub fn embed(n: usize, q: usize, m: &CMat) -> CMat {
    let ops: Vec<CMat> = (0..n).map(|k| if k == q { m.clone() } else { pauli(Pauli::I) }).collect();
    kron_all(&ops)
}

pub fn cz(n: usize, a: usize, b: usize) -> CMat {
    let dim = 1 << n;
    let mut m = CMat::identity(dim, dim);
    for i in 0..dim {
        if (i >> a) & 1 == 1 && (i >> b) & 1 == 1 {
            m[(i, i)] = -m[(i, i)];
        }
    }
    m
}

pub fn pauli_string(letters: &[Pauli]) -> CMat {
    let ops: Vec<CMat> = letters.iter().map(|&p| pauli(p)).collect();
    kron_all(&ops)
}

pub fn observable(obs: &seca_core::PauliObservable) -> CMat {
    let dim = 1 << obs.n_qubits();
    let mut h = CMat::zeros(dim, dim);
    for t in obs.terms() {
        h += pauli_string(&t.letters) * c(t.coeff, 0.0);
    }
    h
}

pub fn zero_state(n: usize) -> CVec {
    let mut v = CVec::zeros(1 << n);
    v[0] = c(1.0, 0.0);
    v
}

/// Applies every gate as a full `2^n × 2^n` matrix.
pub fn run_circuit(circuit: &Circuit, params: &[f64]) -> CVec {
    let n = circuit.n_qubits;
    let mut v = zero_state(n);
    for g in &circuit.gates {
        let m = match *g {
            Gate::Rotation { axis, q, p } => embed(n, q, &rotation(axis, params[p])),
            Gate::Cz { q1, q2 } => cz(n, q1, q2),
        };
        v = m * v;
    }
    v
}

pub fn to_vec(state: &seca_core::StateVector) -> CVec {
    CVec::from_iterator(state.dim(), state.amplitudes().iter().copied())
}

pub fn expectation(h: &CMat, v: &CVec) -> f64 {
    (v.adjoint() * h * v)[(0, 0)].re
}

/// `Tr ρ_q²` from an explicit partial trace over all other qubits.
pub fn purity(v: &CVec, n: usize, q: usize) -> f64 {
    let mut rho = [[c(0.0, 0.0); 2]; 2];
    for i in 0..(1usize << n) {
        for j in 0..(1usize << n) {
            if (i & !(1 << q)) == (j & !(1 << q)) {
                rho[(i >> q) & 1][(j >> q) & 1] += v[i] * v[j].conj();
            }
        }
    }
    let mut p = 0.0;
    for (a, row) in rho.iter().enumerate() {
        for (b, x) in row.iter().enumerate() {
            p += (x * rho[b][a]).re;
        }
    }
    p
}

/// Meyer-Wallach measure in its purity form.
pub fn meyer_wallach(v: &CVec, n: usize) -> f64 {
    let mean = (0..n).map(|q| purity(v, n, q)).sum::<f64>() / n as f64;
    2.0 * (1.0 - mean)
}
