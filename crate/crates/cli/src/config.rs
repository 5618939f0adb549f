//! JSON experiment configs shared by all commands.

use std::fs;
use std::path::Path;

use seca_core::metrics::boundary_zz;
use seca_core::problems::{heisenberg, Boundary, HeisenbergSpec};
use seca_core::statevec::PauliString;
use seca_core::{AnsatzSpec, ConnectionScheme, PauliObservable};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

pub const CONFIG_VERSION: u32 = 1;

/// Reads a config file and checks its schema version.
pub fn load<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let raw: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    match raw.get("version").and_then(serde_json::Value::as_u64) {
        Some(v) if v == u64::from(CONFIG_VERSION) => {}
        Some(v) => return Err(CliError::config(format!("unsupported config version {v} (expected {CONFIG_VERSION})"))),
        None => return Err(CliError::config("config is missing an integer \"version\" field")),
    }
    serde_json::from_value(raw).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

/// Inclusive integer range, written either as `[a, b, ...]` or `{"from": a, "to": b}`.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum Span {
    List(Vec<usize>),
    Range { from: usize, to: usize },
}

impl Span {
    pub fn values(&self, what: &str) -> CliResult<Vec<usize>> {
        let v: Vec<usize> = match self {
            Span::List(v) => v.clone(),
            Span::Range { from, to } => (*from..=*to).collect(),
        };
        if v.is_empty() {
            return Err(CliError::config(format!("{what} range is empty")));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Architecture {
    Seca,
    Feca,
    Nocz,
}

impl Architecture {
    pub fn scheme(self) -> ConnectionScheme {
        match self {
            Architecture::Seca => ConnectionScheme::Seca,
            Architecture::Feca => ConnectionScheme::Feca,
            Architecture::Nocz => ConnectionScheme::NoCz,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Architecture::Seca => "seca",
            Architecture::Feca => "feca",
            Architecture::Nocz => "nocz",
        }
    }
}

pub fn non_empty<T>(v: &[T], what: &str) -> CliResult<()> {
    if v.is_empty() {
        return Err(CliError::config(format!("{what} list is empty")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub coeff: f64,
    /// Letters such as `"ZZII"`; the first letter acts on qubit 0.
    pub pauli: String,
}

/// Observable named in a config.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObservableConfig {
    Heisenberg {
        #[serde(default = "unit")]
        coupling: f64,
        #[serde(default)]
        boundary: Boundary,
    },
    BoundaryZz,
    Pauli {
        terms: Vec<TermConfig>,
    },
}

fn unit() -> f64 {
    1.0
}

impl ObservableConfig {
    pub fn label(&self) -> String {
        match self {
            ObservableConfig::Heisenberg { coupling, boundary } => {
                let b = match boundary {
                    Boundary::Periodic => "periodic",
                    Boundary::Open => "open",
                };
                format!("heisenberg(J={coupling},{b})")
            }
            ObservableConfig::BoundaryZz => "boundary_zz".into(),
            ObservableConfig::Pauli { terms } => {
                terms.iter().map(|t| format!("{}*{}", t.coeff, t.pauli)).collect::<Vec<_>>().join("+")
            }
        }
    }

    pub fn build(&self, spec: &AnsatzSpec) -> CliResult<PauliObservable> {
        let n = spec.n_qubits;
        Ok(match self {
            ObservableConfig::Heisenberg { coupling, boundary } => {
                heisenberg(&HeisenbergSpec { n_sites: n, coupling: *coupling, boundary: *boundary })?
            }
            ObservableConfig::BoundaryZz => boundary_zz(spec)?,
            ObservableConfig::Pauli { terms } => {
                non_empty(terms, "observable term")?;
                let parsed = terms
                    .iter()
                    .map(|t| PauliString::parse(t.coeff, &t.pauli))
                    .collect::<seca_core::Result<Vec<_>>>()?;
                PauliObservable::from_terms(n, parsed)?
            }
        })
    }
}
