//! Bipartite multi-layer hardware-efficient ansatz.
//!
//! The register is split into two blocks, `A = 0..n/2` and `B = n/2..n`. Each
//! unit layer applies `Rx, Ry, Rz` to every qubit, a nearest-neighbour CZ chain
//! inside each block, and optionally one boundary CZ between qubits `n/2 - 1`
//! and `n/2`. The connection scheme decides which layers carry the boundary CZ.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::num::Real;
use crate::statevec::{Axis, StateVector};

/// Layers (1-based) that carry the boundary CZ.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConnectionScheme {
    /// Every layer is connected.
    Feca,
    /// Only the middle layer, `⌈L/2⌉`.
    Seca,
    NoCz,
    Custom(BTreeSet<usize>),
}

impl ConnectionScheme {
    /// Middle layer used by the single-connection scheme.
    pub fn middle_layer(layers: usize) -> usize {
        layers.div_ceil(2)
    }

    pub fn layer_set(&self, layers: usize) -> BTreeSet<usize> {
        match self {
            ConnectionScheme::Feca => (1..=layers).collect(),
            ConnectionScheme::Seca => std::iter::once(Self::middle_layer(layers)).collect(),
            ConnectionScheme::NoCz => BTreeSet::new(),
            ConnectionScheme::Custom(set) => set.clone(),
        }
    }

    /// Single boundary CZ on layer `l`.
    pub fn single(layer: usize) -> Self {
        ConnectionScheme::Custom(std::iter::once(layer).collect())
    }

    pub fn name(&self) -> String {
        match self {
            ConnectionScheme::Feca => "feca".into(),
            ConnectionScheme::Seca => "seca".into(),
            ConnectionScheme::NoCz => "nocz".into(),
            ConnectionScheme::Custom(set) => {
                let parts: Vec<String> = set.iter().map(usize::to_string).collect();
                format!("custom[{}]", parts.join(","))
            }
        }
    }
}

impl fmt::Display for ConnectionScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Spreads `n_cz` connected layers evenly over `1..=layers`.
///
/// The k-th connection sits at the centre of the k-th of `n_cz` equal segments,
/// `c_k = (k + 1/2)·L/n_cz`, rounded half-up. Segment centres are at least one
/// layer apart, so the rounded layers are distinct; `n_cz == L` gives every
/// layer and `n_cz == 1` gives `⌈L/2⌉`.
pub fn ncz_sweep_scheme(layers: usize, n_cz: usize) -> Result<ConnectionScheme> {
    if layers == 0 {
        return arg("layer count must be at least 1");
    }
    if n_cz > layers {
        return arg(format!("cannot place {n_cz} connections on {layers} layers"));
    }
    let set: BTreeSet<usize> = (0..n_cz).map(|k| ((2 * k + 1) * layers + n_cz) / (2 * n_cz)).collect();
    debug_assert_eq!(set.len(), n_cz);
    Ok(ConnectionScheme::Custom(set))
}

/// Entangler applied inside each block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntraEntangler {
    #[default]
    LinearChain,
    /// No intra-block gates; leaves the boundary CZs as the only entanglers.
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    pub layers: usize,
    pub scheme: ConnectionScheme,
    #[serde(default)]
    pub intra: IntraEntangler,
}

impl AnsatzSpec {
    pub fn new(n_qubits: usize, layers: usize, scheme: ConnectionScheme) -> Self {
        Self { n_qubits, layers, scheme, intra: IntraEntangler::LinearChain }
    }

    pub fn with_intra(mut self, intra: IntraEntangler) -> Self {
        self.intra = intra;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits < 2 || !self.n_qubits.is_multiple_of(2) {
            return arg(format!("qubit count must be even and >= 2, got {}", self.n_qubits));
        }
        if self.n_qubits > crate::statevec::MAX_QUBITS {
            return Err(Error::Capacity {
                what: "qubits",
                requested: self.n_qubits as u64,
                limit: crate::statevec::MAX_QUBITS as u64,
            });
        }
        if self.layers == 0 {
            return arg("layer count must be at least 1");
        }
        if let ConnectionScheme::Custom(set) = &self.scheme {
            if let Some(&bad) = set.iter().find(|&&l| l == 0 || l > self.layers) {
                return arg(format!("connected layer {bad} outside 1..={}", self.layers));
            }
        }
        Ok(())
    }

    pub fn half(&self) -> usize {
        self.n_qubits / 2
    }

    /// The two qubits joined by a boundary CZ.
    pub fn boundary_pair(&self) -> (usize, usize) {
        (self.half() - 1, self.half())
    }

    pub fn connected_layers(&self) -> BTreeSet<usize> {
        self.scheme.layer_set(self.layers)
    }

    /// `3 · n · L`.
    pub fn param_count(&self) -> usize {
        3 * self.n_qubits * self.layers
    }

    fn intra_per_layer(&self) -> usize {
        match self.intra {
            IntraEntangler::LinearChain => 2 * (self.half() - 1),
            IntraEntangler::None => 0,
        }
    }

    /// Intra-block CZs plus boundary CZs.
    pub fn cz_count(&self) -> usize {
        self.layers * self.intra_per_layer() + self.connected_layers().len()
    }

    pub fn build(&self) -> Result<Circuit> {
        build(self)
    }

    pub fn prepare<T: Real>(&self, params: &[T]) -> Result<StateVector<T>> {
        prepare(self, params)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Gate {
    #[serde(rename = "rot")]
    Rotation { axis: Axis, q: usize, p: usize },
    #[serde(rename = "cz")]
    Cz { q1: usize, q2: usize },
}

/// Executable gate list. Every parameter index `0..param_count` appears exactly once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    #[serde(rename = "n")]
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn param_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Rotation { .. })).count()
    }

    pub fn cz_count(&self) -> usize {
        self.gates.len() - self.param_count()
    }

    /// Checks qubit ranges and that parameter indices form a permutation of `0..P`.
    pub fn validate(&self) -> Result<()> {
        let p = self.param_count();
        let mut seen = vec![false; p];
        for g in &self.gates {
            match *g {
                Gate::Rotation { q, p: idx, .. } => {
                    if q >= self.n_qubits {
                        return Err(Error::Index { what: "qubit", index: q, size: self.n_qubits });
                    }
                    if idx >= p || seen[idx] {
                        return arg(format!("parameter index {idx} repeated or out of range"));
                    }
                    seen[idx] = true;
                }
                Gate::Cz { q1, q2 } => {
                    if q1 >= self.n_qubits || q2 >= self.n_qubits || q1 == q2 {
                        return arg(format!("bad CZ({q1},{q2}) on {} qubits", self.n_qubits));
                    }
                }
            }
        }
        Ok(())
    }

    /// Runs the circuit on `state` in place.
    pub fn apply<T: Real>(&self, state: &mut StateVector<T>, params: &[T]) -> Result<()> {
        if params.len() != self.param_count() {
            return arg(format!("expected {} parameters, got {}", self.param_count(), params.len()));
        }
        for g in &self.gates {
            match *g {
                Gate::Rotation { axis, q, p } => state.apply_rotation(axis, q, params[p])?,
                Gate::Cz { q1, q2 } => state.apply_cz(q1, q2)?,
            }
        }
        Ok(())
    }

    /// `U(θ)|0…0>`.
    pub fn prepare<T: Real>(&self, params: &[T]) -> Result<StateVector<T>> {
        let mut s = StateVector::zero(self.n_qubits)?;
        self.apply(&mut s, params)?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("circuit serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Circuit = serde_json::from_str(text).map_err(|e| Error::Argument(format!("circuit JSON: {e}")))?;
        c.validate()?;
        Ok(c)
    }
}

/// Emits the gate list layer by layer: rotations, intra-block chains, then the boundary CZ.
pub fn build(spec: &AnsatzSpec) -> Result<Circuit> {
    spec.validate()?;
    let n = spec.n_qubits;
    let half = spec.half();
    let connected = spec.connected_layers();
    let mut gates = Vec::with_capacity(spec.param_count() + spec.cz_count());
    let mut p = 0;
    for layer in 1..=spec.layers {
        for q in 0..n {
            for axis in Axis::ALL {
                gates.push(Gate::Rotation { axis, q, p });
                p += 1;
            }
        }
        if spec.intra == IntraEntangler::LinearChain {
            for block in [0, half] {
                for q in block..block + half - 1 {
                    gates.push(Gate::Cz { q1: q, q2: q + 1 });
                }
            }
        }
        if connected.contains(&layer) {
            gates.push(Gate::Cz { q1: half - 1, q2: half });
        }
    }
    Ok(Circuit { n_qubits: n, gates })
}

pub fn param_count(spec: &AnsatzSpec) -> usize {
    spec.param_count()
}

pub fn cz_count(spec: &AnsatzSpec) -> usize {
    spec.cz_count()
}

/// `U(θ)|0…0>` for the circuit of `spec`.
pub fn prepare<T: Real>(spec: &AnsatzSpec, params: &[T]) -> Result<StateVector<T>> {
    if params.len() != spec.param_count() {
        return arg(format!("expected {} parameters, got {}", spec.param_count(), params.len()));
    }
    build(spec)?.prepare(params)
}
