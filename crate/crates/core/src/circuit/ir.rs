use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{FableError, Result};

/// Which block-encoding construction produced a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fable,
    #[serde(rename = "sfable")]
    SFable,
    #[serde(rename = "lsfable")]
    LsFable,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Fable, Method::SFable, Method::LsFable];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Fable => "fable",
            Method::SFable => "sfable",
            Method::LsFable => "lsfable",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = FableError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "fable" => Ok(Method::Fable),
            "sfable" => Ok(Method::SFable),
            "lsfable" => Ok(Method::LsFable),
            _ => Err(FableError::Config(format!(
                "unknown method {s:?} (expected fable, sfable or lsfable)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    /// `exp(-i angle Y / 2)`.
    Ry { target: usize, angle: f64 },
    Cnot { control: usize, target: usize },
    H { target: usize },
    Swap { a: usize, b: usize },
}

impl Gate {
    fn check(&self, width: usize) -> Result<()> {
        let qubits: &[usize] = match self {
            Gate::Ry { target, .. } | Gate::H { target } => &[*target],
            Gate::Cnot { control, target } => &[*control, *target],
            Gate::Swap { a, b } => &[*a, *b],
        };
        if let Some(q) = qubits.iter().find(|&&q| q >= width) {
            return Err(FableError::InvalidGate(format!(
                "{self:?} touches qubit {q} of a {width}-qubit circuit"
            )));
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(FableError::InvalidGate(format!("{self:?} repeats a qubit")));
        }
        if let Gate::Ry { angle, .. } = self {
            if !angle.is_finite() {
                return Err(FableError::InvalidGate(format!("{self:?} has a non-finite angle")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitMeta {
    pub method: Option<Method>,
    pub delta: f64,
    /// Subnormalisation: the encoded block is `alpha * A`.
    pub alpha: f64,
}

impl Default for CircuitMeta {
    fn default() -> Self {
        CircuitMeta {
            method: None,
            delta: 0.0,
            alpha: 1.0,
        }
    }
}

/// Ordered gate list over `width` qubits. Qubit 0 is the rotation ancilla,
/// qubits `1..=n` the row register and `n+1..=2n` the column (data) register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
    pub meta: CircuitMeta,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Circuit {
            width,
            gates: Vec::new(),
            meta: CircuitMeta::default(),
        }
    }

    pub fn from_gates(width: usize, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            g.check(width)?;
        }
        Ok(Circuit {
            width,
            gates,
            meta: CircuitMeta::default(),
        })
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.check(self.width)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub(crate) fn push_unchecked(&mut self, gate: Gate) {
        debug_assert!(gate.check(self.width).is_ok());
        self.gates.push(gate);
    }

    pub(crate) fn extend_unchecked(&mut self, gates: impl IntoIterator<Item = Gate>) {
        for g in gates {
            self.push_unchecked(g);
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub rotations: usize,
    pub cnots: usize,
    pub hadamards: usize,
    pub swaps: usize,
    pub total: usize,
}

impl GateCounts {
    pub fn new(rotations: usize, cnots: usize, hadamards: usize, swaps: usize) -> Self {
        GateCounts {
            rotations,
            cnots,
            hadamards,
            swaps,
            total: rotations + cnots + hadamards + swaps,
        }
    }

    /// Rewrites every SWAP as three CNOTs.
    pub fn expand_swaps(self) -> Self {
        GateCounts::new(self.rotations, self.cnots + 3 * self.swaps, self.hadamards, 0)
    }
}

pub fn count_gates(c: &Circuit, expand_swaps: bool) -> GateCounts {
    let (mut r, mut cx, mut h, mut sw) = (0, 0, 0, 0);
    for g in c.gates() {
        match g {
            Gate::Ry { .. } => r += 1,
            Gate::Cnot { .. } => cx += 1,
            Gate::H { .. } => h += 1,
            Gate::Swap { .. } => sw += 1,
        }
    }
    let counts = GateCounts::new(r, cx, h, sw);
    if expand_swaps {
        counts.expand_swaps()
    } else {
        counts
    }
}
