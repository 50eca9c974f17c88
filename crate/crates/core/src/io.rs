//! JSON formats: graph files and emitted reports. Agents are 1-indexed in
//! every external format.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::net::DirectedNetwork;
use crate::verify::{VerificationReport, Violation};

/// `{"n": 3, "edges": [[1, 2], [2, 3]], "undirected": false}`; `[i, j]`
/// means agent `i` is influenced by agent `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub undirected: bool,
}

impl GraphJson {
    pub fn to_network(&self) -> Result<DirectedNetwork> {
        let mut pairs = Vec::with_capacity(self.edges.len());
        for &[i, j] in &self.edges {
            if i == 0 || j == 0 || i > self.n || j > self.n {
                return Err(Error::InvalidNetwork(format!(
                    "edge [{i}, {j}] out of range 1..={}",
                    self.n
                )));
            }
            pairs.push((i - 1, j - 1));
        }
        if self.undirected {
            DirectedNetwork::from_undirected_edges(self.n, &pairs)
        } else {
            DirectedNetwork::from_edges(self.n, &pairs)
        }
    }

    pub fn from_network(net: &DirectedNetwork) -> Self {
        Self {
            n: net.n(),
            edges: net
                .edges()
                .into_iter()
                .map(|(i, j)| [i + 1, j + 1])
                .collect(),
            undirected: false,
        }
    }
}

pub fn parse_graph(text: &str) -> Result<DirectedNetwork> {
    let g: GraphJson = serde_json::from_str(text)
        .map_err(|e| Error::InvalidNetwork(format!("malformed graph JSON: {e}")))?;
    g.to_network()
}

pub fn emit_graph(net: &DirectedNetwork) -> String {
    serde_json::to_string(&GraphJson::from_network(net)).expect("graph serializes")
}

/// Rounds to 12 significant digits so emitted numbers are stable above
/// solver tolerance.
pub fn sig12(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.11e}").parse().expect("formatted float parses")
}

pub fn sig12_vec(v: &[f64]) -> Vec<f64> {
    v.iter().copied().map(sig12).collect()
}

pub fn one_indexed(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

pub fn violation_json(v: &Violation) -> Value {
    json!({
        "coalition": one_indexed(&v.coalition),
        "permutation": one_indexed(&v.permutation),
        "gains": sig12_vec(&v.gains),
        "total": sig12(v.total),
    })
}

/// `{verdict, mode, adjacency, max_size, alpha, violations, examined}`.
pub fn report_json(r: &VerificationReport) -> Value {
    json!({
        "verdict": r.verdict,
        "mode": r.mode,
        "adjacency": r.adjacency,
        "max_size": r.max_size,
        "alpha": sig12(r.alpha),
        "violations": r.violations.iter().map(violation_json).collect::<Vec<_>>(),
        "examined": r.examined,
    })
}
