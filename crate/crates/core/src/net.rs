//! Influence graphs and model parameters.
//!
//! Agents are 0-indexed internally. `g[i][j] = 1` means agent `i` is
//! influenced by agent `j`: `i` receives the externality `alpha * x_i * x_j`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A directed influence graph without self-loops.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DirectedNetwork {
    n: usize,
    adj: Vec<bool>,
}

impl DirectedNetwork {
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidNetwork("agent count must be positive".into()));
        }
        Ok(Self {
            n,
            adj: vec![false; n * n],
        })
    }

    /// Builds a network from 0-indexed `(i, j)` pairs meaning `g_ij = 1`.
    /// Self-loops, out-of-range agents and duplicate pairs are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut net = Self::empty(n)?;
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidNetwork(format!(
                    "edge ({}, {}) out of range for n = {n}",
                    i + 1,
                    j + 1
                )));
            }
            if i == j {
                return Err(Error::InvalidNetwork(format!(
                    "self-loop at agent {}",
                    i + 1
                )));
            }
            if net.adj[i * n + j] {
                return Err(Error::InvalidNetwork(format!(
                    "duplicate edge ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
            net.adj[i * n + j] = true;
        }
        Ok(net)
    }

    /// Builds a network from undirected pairs; each pair sets both directions.
    pub fn from_undirected_edges(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let directed: Vec<_> = pairs.iter().flat_map(|&(i, j)| [(i, j), (j, i)]).collect();
        Self::from_edges(n, &directed)
    }

    /// Builds a network from a row-major boolean matrix.
    pub fn from_matrix(n: usize, adj: Vec<bool>) -> Result<Self> {
        if n == 0 || adj.len() != n * n {
            return Err(Error::InvalidNetwork(format!(
                "adjacency of length {} does not match n = {n}",
                adj.len()
            )));
        }
        if (0..n).any(|i| adj[i * n + i]) {
            return Err(Error::InvalidNetwork("self-loop in adjacency".into()));
        }
        Ok(Self { n, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.n + j]
    }

    #[inline]
    pub fn g(&self, i: usize, j: usize) -> f64 {
        if self.has_edge(i, j) {
            1.0
        } else {
            0.0
        }
    }

    /// Symmetrized weight `g_ij + g_ji`.
    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> u8 {
        self.has_edge(i, j) as u8 + self.has_edge(j, i) as u8
    }

    #[inline]
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.has_edge(i, j) || self.has_edge(j, i)
    }

    /// Agents that influence `i` (`g_ij = 1`).
    pub fn influencers(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.has_edge(i, j))
    }

    /// Agents influenced by `j` (`g_ij = 1`).
    pub fn influenced_by(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| self.has_edge(i, j))
    }

    /// All `(i, j)` with `g_ij = 1`, row-major.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| (0..self.n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.has_edge(i, j))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&b| b).count()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.has_edge(i, j) == self.has_edge(j, i)))
    }

    pub fn adjacency(&self) -> &[bool] {
        &self.adj
    }

    /// `G` as a dense real matrix.
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.g(i, j))
    }

    /// Relabeled network `g'_{ij} = g_{perm(i) perm(j)}`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let n = self.n;
        let mut adj = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                adj[i * n + j] = self.has_edge(perm[i], perm[j]);
            }
        }
        Self { n, adj }
    }
}

/// Parameters of the homogeneous linear-quadratic game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub a: f64,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

impl ModelParams {
    pub fn new(a: f64, alpha: f64) -> Result<Self> {
        Self::with_cost(a, alpha, None)
    }

    pub fn with_cost(a: f64, alpha: f64, c: Option<f64>) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidParams(format!("a must be positive, got {a}")));
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "alpha must be nonnegative, got {alpha}"
            )));
        }
        if let Some(c) = c {
            if !(c.is_finite() && c >= 0.0 && c < a) {
                return Err(Error::InvalidParams(format!(
                    "c must lie in [0, a), got {c}"
                )));
            }
        }
        Ok(Self { a, alpha, c })
    }
}

/// `G + G^T`, entries in {0, 1, 2}.
pub fn symmetrized(net: &DirectedNetwork) -> DMatrix<u8> {
    DMatrix::from_fn(net.n(), net.n(), |i, j| net.weight(i, j))
}

const SPECTRAL_TOL: f64 = 1e-12;
const MAX_POWER_ITERS: usize = 2_000_000;

/// Largest eigenvalue of a symmetric matrix with nonnegative entries.
///
/// Power iteration runs on `A + sI` with `s` half the largest row sum, so the
/// dominant eigenvalue is strictly separated in modulus even for bipartite
/// graphs. Iteration stops once the Rayleigh quotient (a lower bound) and the
/// Collatz-Wielandt ratio bound (an upper bound) agree.
pub fn spectral_radius(sym: &DMatrix<f64>) -> Result<f64> {
    let n = sym.nrows();
    if sym.ncols() != n {
        return Err(Error::NotSymmetric);
    }
    for i in 0..n {
        for j in 0..n {
            let v = sym[(i, j)];
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParams(format!(
                    "entry ({i}, {j}) = {v} is not a finite nonnegative value"
                )));
            }
            if j < i && v != sym[(j, i)] {
                return Err(Error::NotSymmetric);
            }
        }
    }
    let max_row = sym.row_iter().map(|r| r.sum()).fold(0.0, f64::max);
    if max_row == 0.0 {
        return Ok(0.0);
    }
    let shift = max_row / 2.0;
    let mut v = nalgebra::DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut rayleigh = 0.0;
    for _ in 0..MAX_POWER_ITERS {
        let w = sym * &v;
        rayleigh = v.dot(&w);
        let upper = v
            .iter()
            .zip(w.iter())
            .filter(|(vi, _)| **vi > 1e-250)
            .map(|(vi, wi)| wi / vi)
            .fold(f64::NEG_INFINITY, f64::max);
        if upper - rayleigh <= SPECTRAL_TOL * upper.max(1.0) {
            return Ok(0.5 * (upper + rayleigh));
        }
        let mut next = w + &v * shift;
        let norm = next.norm();
        next /= norm;
        v = next;
    }
    Ok(rayleigh)
}

/// Spectral radius of `G + G^T`.
pub fn network_lambda(net: &DirectedNetwork) -> f64 {
    // G + G^T is symmetric and nonnegative by construction.
    spectral_radius(&symmetrized(net).map(f64::from)).expect("symmetrized matrix is valid")
}

/// `factor / lambda`, or `None` for an edgeless network.
pub fn auto_alpha(net: &DirectedNetwork, factor: f64) -> Option<f64> {
    let lambda = network_lambda(net);
    (lambda > 0.0).then(|| factor / lambda)
}

/// Default validity margin for automatically chosen externality strength.
pub const AUTO_ALPHA_FACTOR: f64 = 0.8;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetrized_examples() {
        let empty = DirectedNetwork::empty(3).unwrap();
        assert!(symmetrized(&empty).iter().all(|&e| e == 0));

        let pair = DirectedNetwork::from_undirected_edges(2, &[(0, 1)]).unwrap();
        let s = symmetrized(&pair);
        assert_eq!((s[(0, 1)], s[(1, 0)]), (2, 2));

        let one = DirectedNetwork::from_edges(2, &[(0, 1)]).unwrap();
        let s = symmetrized(&one);
        assert_eq!((s[(0, 1)], s[(1, 0)]), (1, 1));
    }

    #[test]
    fn spectral_radius_examples() {
        assert_eq!(spectral_radius(&DMatrix::zeros(3, 3)).unwrap(), 0.0);

        let pair = DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 2.0, 0.0]);
        assert!((spectral_radius(&pair).unwrap() - 2.0).abs() < 1e-10);

        let star = DirectedNetwork::from_undirected_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let lambda = network_lambda(&star);
        assert!((lambda - 2.0 * 3f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn spectral_radius_rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(spectral_radius(&m), Err(Error::NotSymmetric));
    }

    #[test]
    fn edge_validation() {
        assert!(DirectedNetwork::from_edges(3, &[(0, 0)]).is_err());
        assert!(DirectedNetwork::from_edges(3, &[(0, 1), (0, 1)]).is_err());
        assert!(DirectedNetwork::from_edges(3, &[(0, 3)]).is_err());
        assert!(DirectedNetwork::from_undirected_edges(3, &[(0, 1), (1, 0)]).is_err());
        assert!(DirectedNetwork::empty(0).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0.0, 0.1).is_err());
        assert!(ModelParams::new(1.0, -0.1).is_err());
        assert!(ModelParams::with_cost(1.0, 0.1, Some(1.0)).is_err());
        assert!(ModelParams::with_cost(1.0, 0.1, Some(0.5)).is_ok());
    }
}
