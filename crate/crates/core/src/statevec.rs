//! Dense statevector simulation.
//!
//! Qubit 0 is the least-significant bit of the basis index. Gates act in place
//! by walking amplitude pairs with a stride of `1 << qubit`; no gate matrices
//! are materialised for the fixed gate set.

use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::num::{c, czero, Amplitude, Real};

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 24;
/// Largest register for which Haar sampling is offered.
pub const MAX_HAAR_QUBITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(ch: char) -> Option<Self> {
        match ch.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Weighted tensor product of Pauli letters; `letters[q]` acts on qubit `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliString<T> {
    pub coeff: T,
    pub letters: Vec<Pauli>,
}

/// Bit masks describing the action of a Pauli string on basis states:
/// `P|i> = i^y_count * (-1)^popcount(i & z_mask) |i ^ x_mask>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliMasks {
    pub x_mask: usize,
    pub z_mask: usize,
    pub y_count: u32,
}

impl PauliMasks {
    /// Phase `i^y_count` as (re, im) integers.
    pub fn y_phase(&self) -> (i8, i8) {
        match self.y_count % 4 {
            0 => (1, 0),
            1 => (0, 1),
            2 => (-1, 0),
            _ => (0, -1),
        }
    }

    /// Phase picked up by basis state `i` (before flipping to `i ^ x_mask`).
    #[inline]
    pub fn phase<T: Real>(&self, i: usize) -> Amplitude<T> {
        let (re, im) = self.y_phase();
        let sign = if (i & self.z_mask).count_ones().is_multiple_of(2) { T::one() } else { -T::one() };
        c(T::of(f64::from(re)) * sign, T::of(f64::from(im)) * sign)
    }
}

impl<T: Real> PauliString<T> {
    pub fn new(coeff: T, letters: Vec<Pauli>) -> Self {
        Self { coeff, letters }
    }

    /// Parses letters such as `"XIZ"`; the first character acts on qubit 0.
    pub fn parse(coeff: T, letters: &str) -> Result<Self> {
        let letters = letters
            .chars()
            .map(|ch| Pauli::from_char(ch).ok_or_else(|| Error::Argument(format!("bad Pauli letter {ch:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { coeff, letters })
    }

    pub fn identity(n: usize, coeff: T) -> Self {
        Self { coeff, letters: vec![Pauli::I; n] }
    }

    /// Product of the given single-qubit letters on an `n`-qubit register.
    pub fn from_sites(n: usize, coeff: T, sites: &[(usize, Pauli)]) -> Result<Self> {
        let mut letters = vec![Pauli::I; n];
        for &(q, p) in sites {
            if q >= n {
                return Err(Error::Index { what: "qubit", index: q, size: n });
            }
            letters[q] = p;
        }
        Ok(Self { coeff, letters })
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn masks(&self) -> PauliMasks {
        let mut m = PauliMasks { x_mask: 0, z_mask: 0, y_count: 0 };
        for (q, p) in self.letters.iter().enumerate() {
            match p {
                Pauli::I => {}
                Pauli::X => m.x_mask |= 1 << q,
                Pauli::Z => m.z_mask |= 1 << q,
                Pauli::Y => {
                    m.x_mask |= 1 << q;
                    m.z_mask |= 1 << q;
                    m.y_count += 1;
                }
            }
        }
        m
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    /// True when the string contains only `I` and `Z`.
    pub fn is_diagonal(&self) -> bool {
        self.letters.iter().all(|&p| matches!(p, Pauli::I | Pauli::Z))
    }

    pub fn label(&self) -> String {
        self.letters.iter().map(|p| p.as_char()).collect()
    }
}

/// Real-weighted sum of Pauli strings over a fixed register.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliObservable<T> {
    n_qubits: usize,
    terms: Vec<PauliString<T>>,
}

impl<T: Real> PauliObservable<T> {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, terms: Vec::new() }
    }

    pub fn from_terms(n_qubits: usize, terms: Vec<PauliString<T>>) -> Result<Self> {
        let mut obs = Self::new(n_qubits);
        for t in terms {
            obs.push(t)?;
        }
        Ok(obs)
    }

    pub fn push(&mut self, term: PauliString<T>) -> Result<()> {
        if term.n_qubits() != self.n_qubits {
            return arg(format!(
                "Pauli string on {} qubits added to {}-qubit observable",
                term.n_qubits(),
                self.n_qubits
            ));
        }
        self.terms.push(term);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliString<T>] {
        &self.terms
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(PauliString::is_diagonal)
    }

    /// Value of a diagonal observable on basis state `index`.
    ///
    /// Off-diagonal terms are ignored; callers check [`Self::is_diagonal`].
    pub fn diagonal_value(&self, index: usize) -> T {
        self.terms
            .iter()
            .map(|t| {
                let m = t.masks();
                if (index & m.z_mask).count_ones().is_multiple_of(2) {
                    t.coeff
                } else {
                    -t.coeff
                }
            })
            .sum()
    }
}

/// Dense complex amplitude vector over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    n_qubits: usize,
    amps: Vec<Amplitude<T>>,
}

fn check_capacity(n: usize, limit: usize) -> Result<()> {
    if n == 0 || n > limit {
        return Err(Error::Capacity { what: "qubits", requested: n as u64, limit: limit as u64 });
    }
    Ok(())
}

impl<T: Real> StateVector<T> {
    /// `|0…0>` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        check_capacity(n, MAX_QUBITS)?;
        let mut amps = vec![czero(); 1 << n];
        amps[0] = c(T::one(), T::zero());
        Ok(Self { n_qubits: n, amps })
    }

    /// Computational basis state `|index>`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero(n)?;
        if index >= s.amps.len() {
            return Err(Error::Index { what: "basis state", index, size: s.amps.len() });
        }
        s.amps[0] = czero();
        s.amps[index] = c(T::one(), T::zero());
        Ok(s)
    }

    /// Wraps raw amplitudes; the length must be a power of two. No normalisation is applied.
    pub fn from_amplitudes(amps: Vec<Amplitude<T>>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return arg(format!("amplitude count {len} is not a power of two >= 2"));
        }
        let n = len.trailing_zeros() as usize;
        check_capacity(n, MAX_QUBITS)?;
        Ok(Self { n_qubits: n, amps })
    }

    /// Tensor product `self ⊗ high`, with `self` on the low-order qubits.
    pub fn tensor(&self, high: &Self) -> Result<Self> {
        check_capacity(self.n_qubits + high.n_qubits, MAX_QUBITS)?;
        let mut amps = Vec::with_capacity(self.amps.len() * high.amps.len());
        for h in &high.amps {
            amps.extend(self.amps.iter().map(|l| l * h));
        }
        Ok(Self { n_qubits: self.n_qubits + high.n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Amplitude<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sqr().sqrt();
        if !n.is_finite() || n <= T::zero() {
            return Err(Error::Numerical("cannot normalise a zero or non-finite state".into()));
        }
        let inv = T::one() / n;
        self.amps.iter_mut().for_each(|a| *a = a.scale(inv));
        Ok(())
    }

    /// Basis-state probabilities `|a_i|^2`.
    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::Index { what: "qubit", index: q, size: self.n_qubits });
        }
        Ok(())
    }

    fn check_same_register(&self, n: usize) -> Result<()> {
        if n != self.n_qubits {
            return arg(format!("register size mismatch: {} vs {}", self.n_qubits, n));
        }
        Ok(())
    }

    /// Applies `exp(-i angle σ/2)` for `σ` the Pauli matrix of `axis`.
    pub fn apply_rotation(&mut self, axis: Axis, q: usize, angle: T) -> Result<()> {
        self.check_qubit(q)?;
        let half = angle / T::of(2.0);
        let (s, co) = half.sin_cos();
        let stride = 1usize << q;
        match axis {
            Axis::X => {
                let mis = c(T::zero(), -s);
                for chunk in self.amps.chunks_mut(stride << 1) {
                    let (lo, hi) = chunk.split_at_mut(stride);
                    for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                        let (x, y) = (*a, *b);
                        *a = x.scale(co) + y * mis;
                        *b = x * mis + y.scale(co);
                    }
                }
            }
            Axis::Y => {
                for chunk in self.amps.chunks_mut(stride << 1) {
                    let (lo, hi) = chunk.split_at_mut(stride);
                    for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                        let (x, y) = (*a, *b);
                        *a = x.scale(co) - y.scale(s);
                        *b = x.scale(s) + y.scale(co);
                    }
                }
            }
            Axis::Z => {
                let p0 = c(co, -s);
                let p1 = c(co, s);
                for chunk in self.amps.chunks_mut(stride << 1) {
                    let (lo, hi) = chunk.split_at_mut(stride);
                    lo.iter_mut().for_each(|a| *a *= p0);
                    hi.iter_mut().for_each(|b| *b *= p1);
                }
            }
        }
        Ok(())
    }

    /// Controlled-Z: negates every amplitude with both qubits set.
    pub fn apply_cz(&mut self, q1: usize, q2: usize) -> Result<()> {
        self.check_qubit(q1)?;
        self.check_qubit(q2)?;
        if q1 == q2 {
            return arg(format!("CZ needs two distinct qubits, got {q1} twice"));
        }
        let mask = (1usize << q1) | (1usize << q2);
        self.amps.iter_mut().enumerate().filter(|(i, _)| i & mask == mask).for_each(|(_, a)| *a = -*a);
        Ok(())
    }

    /// Applies an arbitrary (not necessarily unitary) 2×2 operator `[[m00, m01], [m10, m11]]`.
    pub fn apply_single(&mut self, q: usize, m: [[Amplitude<T>; 2]; 2]) -> Result<()> {
        self.check_qubit(q)?;
        let stride = 1usize << q;
        for chunk in self.amps.chunks_mut(stride << 1) {
            let (lo, hi) = chunk.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = m[0][0] * x + m[0][1] * y;
                *b = m[1][0] * x + m[1][1] * y;
            }
        }
        Ok(())
    }

    /// Pauli-Z on one qubit.
    pub fn apply_z(&mut self, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        let bit = 1usize << q;
        self.amps.iter_mut().enumerate().filter(|(i, _)| i & bit != 0).for_each(|(_, a)| *a = -*a);
        Ok(())
    }

    /// Projects qubit `q` onto `|bit>` without renormalising.
    pub fn apply_projector(&mut self, q: usize, bit: bool) -> Result<()> {
        self.check_qubit(q)?;
        let mask = 1usize << q;
        self.amps.iter_mut().enumerate().filter(|(i, _)| (i & mask != 0) != bit).for_each(|(_, a)| *a = czero());
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Amplitude<T>> {
        self.check_same_register(other.n_qubits)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).fold(czero(), |acc, x| acc + x))
    }

    /// `<ψ|P|ψ>` for the bare Pauli product (coefficient not applied).
    pub fn pauli_expectation(&self, ps: &PauliString<T>) -> Result<T> {
        self.check_same_register(ps.n_qubits())?;
        let m = ps.masks();
        if m.x_mask == 0 && m.y_count == 0 {
            return Ok(self
                .amps
                .iter()
                .enumerate()
                .map(|(i, a)| if (i & m.z_mask).count_ones().is_multiple_of(2) { a.norm_sqr() } else { -a.norm_sqr() })
                .sum());
        }
        let acc = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| self.amps[i ^ m.x_mask].conj() * m.phase::<T>(i) * a)
            .fold(czero(), |acc, x| acc + x);
        Ok(acc.re)
    }

    /// `Σ_k c_k <ψ|P_k|ψ>`; terms are evaluated in parallel and summed in order.
    pub fn expectation(&self, obs: &PauliObservable<T>) -> Result<T> {
        self.check_same_register(obs.n_qubits())?;
        let parts: Vec<T> =
            obs.terms().par_iter().map(|t| self.pauli_expectation(t).map(|v| t.coeff * v)).collect::<Result<_>>()?;
        Ok(parts.into_iter().sum())
    }

    /// Raw amplitudes of `H|ψ>`.
    pub fn apply_observable(&self, obs: &PauliObservable<T>) -> Result<Vec<Amplitude<T>>> {
        self.check_same_register(obs.n_qubits())?;
        let mut out = vec![czero(); self.amps.len()];
        for t in obs.terms() {
            let m = t.masks();
            for (i, a) in self.amps.iter().enumerate() {
                out[i ^ m.x_mask] += m.phase::<T>(i) * a.scale(t.coeff);
            }
        }
        Ok(out)
    }

    /// `<H^2> - <H>^2`, computed as `‖H|ψ>‖² - <ψ|H|ψ>²`.
    pub fn observable_variance(&self, obs: &PauliObservable<T>) -> Result<T> {
        let h_psi = self.apply_observable(obs)?;
        let second: T = h_psi.iter().map(|a| a.norm_sqr()).sum();
        let first = self.amps.iter().zip(&h_psi).map(|(a, b)| a.conj() * b).fold(czero::<T>(), |acc, x| acc + x).re;
        Ok(second - first * first)
    }

    /// `Tr ρ_q²` for the single-qubit marginal of qubit `q`.
    pub fn reduced_purity(&self, q: usize) -> Result<T> {
        self.check_qubit(q)?;
        let stride = 1usize << q;
        let mut p0 = T::zero();
        let mut p1 = T::zero();
        let mut off = czero::<T>();
        for chunk in self.amps.chunks(stride << 1) {
            let (lo, hi) = chunk.split_at(stride);
            for (a, b) in lo.iter().zip(hi) {
                p0 += a.norm_sqr();
                p1 += b.norm_sqr();
                off += a * b.conj();
            }
        }
        Ok(p0 * p0 + p1 * p1 + T::of(2.0) * off.norm_sqr())
    }

    /// Haar-random pure state: normalised vector of i.i.d. complex Gaussians.
    pub fn haar_random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        check_capacity(n, MAX_HAAR_QUBITS)?;
        let dim = 1usize << n;
        let raw: Vec<f64> = (0..2 * dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        let amps = raw.chunks(2).map(|p| c(T::of(p[0] / norm), T::of(p[1] / norm))).collect();
        Ok(Self { n_qubits: n, amps })
    }
}

/// `|0…0>` on `n` qubits.
pub fn init_zero<T: Real>(n: usize) -> Result<StateVector<T>> {
    StateVector::zero(n)
}

/// `|<a|b>|²`.
pub fn fidelity<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> Result<T> {
    Ok(a.inner(b)?.norm_sqr())
}

pub fn sample_haar_state<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<StateVector<T>> {
    StateVector::haar_random(n, rng)
}
