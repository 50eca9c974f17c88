//! Utilities, welfare and the welfare-maximizing contracts.
//!
//! Agent `i`'s utility at action profile `x` is
//! `a x_i - x_i^2 / 2 + alpha * sum_j g_ij x_i x_j`, and welfare is the sum
//! over agents. The first-order conditions of welfare maximization are
//! `a - x_i + alpha * sum_j (g_ij + g_ji) x_j = 0`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::net::{network_lambda, spectral_radius, DirectedNetwork, ModelParams};

/// Residual bound (infinity norm) asserted after every dense solve.
pub const SOLVE_TOL: f64 = 1e-9;

/// Per-location actions. Entries are finite and nonnegative.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Contract(Vec<f64>);

impl Contract {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = x
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::InvalidParams(format!(
                "action of agent {} must be finite and nonnegative, got {v}",
                i + 1
            )));
        }
        Ok(Self(x))
    }

    pub fn uniform(n: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for Contract {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// A partition of the agents into classes sharing one action value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EqualityClasses(Vec<Vec<usize>>);

impl EqualityClasses {
    pub fn new(n: usize, classes: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for class in &classes {
            if class.is_empty() {
                return Err(Error::InvalidClasses("empty class".into()));
            }
            for &a in class {
                if a >= n {
                    return Err(Error::InvalidClasses(format!(
                        "agent {} out of range",
                        a + 1
                    )));
                }
                if std::mem::replace(&mut seen[a], true) {
                    return Err(Error::InvalidClasses(format!(
                        "agent {} in two classes",
                        a + 1
                    )));
                }
            }
        }
        if let Some(a) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidClasses(format!(
                "agent {} not covered",
                a + 1
            )));
        }
        Ok(Self(classes))
    }

    pub fn singletons(n: usize) -> Self {
        Self((0..n).map(|i| vec![i]).collect())
    }

    /// `merged` forms one class; every other agent is a singleton.
    pub fn one_merged(n: usize, merged: &[usize]) -> Result<Self> {
        let mut classes = vec![merged.to_vec()];
        classes.extend((0..n).filter(|a| !merged.contains(a)).map(|a| vec![a]));
        Self::new(n, classes)
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.0
    }
}

fn check_len(x: &[f64], net: &DirectedNetwork) -> Result<()> {
    if x.len() != net.n() {
        return Err(Error::DimensionMismatch {
            expected: net.n(),
            got: x.len(),
        });
    }
    Ok(())
}

/// `sum_j g_ij x_j`.
pub(crate) fn influence_sum(net: &DirectedNetwork, i: usize, x: &[f64]) -> f64 {
    net.influencers(i).map(|j| x[j]).sum()
}

pub(crate) fn utility_unchecked(
    i: usize,
    x: &[f64],
    net: &DirectedNetwork,
    a: f64,
    alpha: f64,
) -> f64 {
    let xi = x[i];
    a * xi - 0.5 * xi * xi + alpha * xi * influence_sum(net, i, x)
}

pub fn utility(i: usize, x: &[f64], net: &DirectedNetwork, params: &ModelParams) -> Result<f64> {
    check_len(x, net)?;
    if i >= net.n() {
        return Err(Error::DimensionMismatch {
            expected: net.n(),
            got: i + 1,
        });
    }
    Ok(utility_unchecked(i, x, net, params.a, params.alpha))
}

pub fn utilities(x: &[f64], net: &DirectedNetwork, params: &ModelParams) -> Result<Vec<f64>> {
    check_len(x, net)?;
    Ok((0..net.n())
        .map(|i| utility_unchecked(i, x, net, params.a, params.alpha))
        .collect())
}

pub fn welfare(x: &[f64], net: &DirectedNetwork, params: &ModelParams) -> Result<f64> {
    Ok(utilities(x, net, params)?.into_iter().sum())
}

/// `I - scale * m`.
fn identity_minus(m: &DMatrix<f64>, scale: f64) -> DMatrix<f64> {
    DMatrix::identity(m.nrows(), m.ncols()) - m * scale
}

/// Dense LU solve followed by a residual check.
fn solve_checked(lhs: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    let sol = lhs.clone().lu().solve(rhs).ok_or(Error::SingularSystem {
        residual: f64::INFINITY,
    })?;
    let residual = (lhs * &sol - rhs).amax();
    let scale = sol.amax().max(1.0);
    if !residual.is_finite() || residual >= SOLVE_TOL * scale {
        return Err(Error::SingularSystem { residual });
    }
    Ok(sol)
}

/// Products `alpha * lambda` this close to 1 are treated as on the boundary.
pub const SPECTRAL_MARGIN: f64 = 1e-12;

/// The welfare-maximizing profile `(I - alpha (G + G^T))^{-1} a 1`.
///
/// Requires `alpha * lambda < 1` where `lambda` is the largest eigenvalue of
/// `G + G^T`.
pub fn first_best(net: &DirectedNetwork, params: &ModelParams) -> Result<Contract> {
    let lambda = network_lambda(net);
    if params.alpha * lambda >= 1.0 - SPECTRAL_MARGIN {
        return Err(Error::SpectralConditionViolated {
            lambda,
            alpha: params.alpha,
        });
    }
    let sym = net.matrix() + net.matrix().transpose();
    let lhs = identity_minus(&sym, params.alpha);
    let rhs = DVector::from_element(net.n(), params.a);
    Contract::new(solve_checked(&lhs, &rhs)?.iter().copied().collect())
}

/// Largest eigenvalue modulus of a square matrix.
fn radius_of(m: &DMatrix<f64>) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    if m == &m.transpose() {
        return spectral_radius(m);
    }
    Ok(m.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

/// Katz-Bonacich centrality `(I - delta M)^{-1} 1`: the discounted count of
/// walks leaving each node.
pub fn katz_bonacich(m: &DMatrix<f64>, delta: f64) -> Result<Vec<f64>> {
    if m.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidParams(
            "matrix entries must be finite and nonnegative".into(),
        ));
    }
    let radius = radius_of(m)?;
    if delta * radius >= 1.0 {
        return Err(Error::SpectralConditionViolated {
            lambda: radius,
            alpha: delta,
        });
    }
    let rhs = DVector::from_element(m.nrows(), 1.0);
    Ok(solve_checked(&identity_minus(m, delta), &rhs)?
        .iter()
        .copied()
        .collect())
}

/// Welfare maximum subject to equal actions within each class.
///
/// Aggregating the first-order conditions over each class gives the reduced
/// system `P^T (I - alpha S) P y = a P^T 1` with `P` the class indicator
/// matrix and `S = G + G^T`. `P^T (I - alpha S) P` must be positive definite.
pub fn constrained_first_best(
    net: &DirectedNetwork,
    params: &ModelParams,
    classes: &EqualityClasses,
) -> Result<Contract> {
    let n = net.n();
    let cls = classes.classes();
    let covered: usize = cls.iter().map(Vec::len).sum();
    if covered != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: covered,
        });
    }
    let k = cls.len();
    let reduced = DMatrix::from_fn(k, k, |c, d| {
        let mut acc = 0.0;
        for &i in &cls[c] {
            for &j in &cls[d] {
                let id = if i == j { 1.0 } else { 0.0 };
                acc += id - params.alpha * f64::from(net.weight(i, j));
            }
        }
        acc
    });
    let rhs = DVector::from_fn(k, |c, _| params.a * cls[c].len() as f64);
    let chol = reduced
        .clone()
        .cholesky()
        .ok_or(Error::ReducedSystemNotConcave)?;
    let y = chol.solve(&rhs);
    let residual = (&reduced * &y - &rhs).amax();
    if !residual.is_finite() || residual >= SOLVE_TOL * y.amax().max(1.0) {
        return Err(Error::SingularSystem { residual });
    }
    let mut x = vec![0.0; n];
    for (c, class) in cls.iter().enumerate() {
        for &i in class {
            x[i] = y[c];
        }
    }
    Contract::new(x)
}

/// Closed-form optimum when every agent must receive the same action.
pub fn uniform_optimum(net: &DirectedNetwork, params: &ModelParams) -> Result<f64> {
    let n = net.n() as f64;
    let denom = n - 2.0 * params.alpha * net.edge_count() as f64;
    if denom <= 0.0 {
        return Err(Error::ReducedSystemNotConcave);
    }
    Ok(n * params.a / denom)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriceSchedule {
    pub prices: Vec<f64>,
    pub profit: f64,
}

/// Surplus-extracting prices for a monopolist selling quantities `x`.
///
/// Setting `U_i - p_i x_i = 0` gives `p_i = a - x_i / 2 + alpha sum_j g_ij x_j`,
/// so profit `sum_i (p_i - c) x_i` equals welfare with `a - c` in place of `a`.
pub fn price_schedule(
    x: &[f64],
    net: &DirectedNetwork,
    params: &ModelParams,
) -> Result<PriceSchedule> {
    let c = params.c.ok_or(Error::MissingCost)?;
    check_len(x, net)?;
    let prices: Vec<f64> = (0..net.n())
        .map(|i| params.a - 0.5 * x[i] + params.alpha * influence_sum(net, i, x))
        .collect();
    let profit = prices.iter().zip(x).map(|(p, xi)| (p - c) * xi).sum();
    Ok(PriceSchedule { prices, profit })
}

/// Per-agent shifts `t_i` of the stand-alone coefficient that make `x` the
/// equilibrium of `x_i = a + t_i + alpha sum_j g_ij x_j`.
pub fn taxes_for_target(
    x: &[f64],
    net: &DirectedNetwork,
    params: &ModelParams,
) -> Result<Vec<f64>> {
    check_len(x, net)?;
    Ok((0..net.n())
        .map(|i| x[i] - params.a - params.alpha * influence_sum(net, i, x))
        .collect())
}

/// Equilibrium of individual best responses `x = a_hat + alpha G x`.
pub fn best_response_equilibrium(
    net: &DirectedNetwork,
    alpha: f64,
    a_hat: &[f64],
) -> Result<Vec<f64>> {
    check_len(a_hat, net)?;
    let lhs = identity_minus(&net.matrix(), alpha);
    let rhs = DVector::from_column_slice(a_hat);
    Ok(solve_checked(&lhs, &rhs)?.iter().copied().collect())
}

/// `|| a 1 - x + alpha (G + G^T) x ||_inf`.
pub fn foc_residual(x: &[f64], net: &DirectedNetwork, params: &ModelParams) -> f64 {
    (0..net.n())
        .map(|i| {
            let ext: f64 = (0..net.n())
                .map(|j| f64::from(net.weight(i, j)) * x[j])
                .sum();
            (params.a - x[i] + params.alpha * ext).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::catalog;

    fn pair() -> DirectedNetwork {
        DirectedNetwork::from_undirected_edges(2, &[(0, 1)]).unwrap()
    }

    #[test]
    fn utility_examples() {
        let p = ModelParams::new(1.0, 0.1).unwrap();
        let iso = DirectedNetwork::empty(3).unwrap();
        assert_eq!(utility(0, &[0.0; 3], &iso, &p).unwrap(), 0.0);
        assert_eq!(utility(0, &[1.0, 0.0, 0.0], &iso, &p).unwrap(), 0.5);
        let u = utility(0, &[1.25, 1.25], &pair(), &p).unwrap();
        assert!((u - 0.625).abs() < 1e-15);
        assert!(utility(0, &[1.0], &pair(), &p).is_err());
    }

    #[test]
    fn welfare_examples() {
        let p = ModelParams::new(1.0, 0.1).unwrap();
        let iso = DirectedNetwork::empty(4).unwrap();
        assert_eq!(welfare(&[0.0; 4], &iso, &p).unwrap(), 0.0);
        assert_eq!(welfare(&[1.0; 4], &iso, &p).unwrap(), 2.0);
        assert!((welfare(&[1.25, 1.25], &pair(), &p).unwrap() - 1.25).abs() < 1e-15);
    }

    #[test]
    fn first_best_edgeless_and_pair() {
        let p = ModelParams::new(1.0, 0.3).unwrap();
        let x = first_best(&DirectedNetwork::empty(3).unwrap(), &p).unwrap();
        assert_eq!(x.as_slice(), &[1.0, 1.0, 1.0]);

        let p = ModelParams::new(1.0, 0.1).unwrap();
        let x = first_best(&pair(), &p).unwrap();
        assert!(x.as_slice().iter().all(|v| (v - 1.25).abs() < 1e-12));
    }

    #[test]
    fn first_best_rejects_invalid_alpha() {
        for alpha in [0.5, 0.6] {
            let p = ModelParams::new(1.0, alpha).unwrap();
            match first_best(&pair(), &p) {
                Err(Error::SpectralConditionViolated { lambda, .. }) => {
                    assert!((lambda - 2.0).abs() < 1e-10)
                }
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn example_two_closed_form() {
        let (a, alpha) = (1.0, 0.2);
        let p = ModelParams::new(a, alpha).unwrap();
        let x = first_best(&catalog::three_roots_one_follower(), &p).unwrap();
        let den = 1.0 - 3.0 * alpha * alpha;
        for i in 0..3 {
            assert!((x[i] - a * (1.0 + alpha) / den).abs() < 1e-9);
        }
        assert!((x[3] - a * (1.0 + 3.0 * alpha) / den).abs() < 1e-9);
    }

    #[test]
    fn same_tier_closed_form() {
        let (a, alpha) = (1.0, 0.15);
        let p = ModelParams::new(a, alpha).unwrap();
        let x = first_best(&catalog::same_tier5(), &p).unwrap();
        let den = 1.0 - 5.0 * alpha - 2.0 * alpha * alpha;
        assert!((x[0] - a * (1.0 - alpha) / den).abs() < 1e-9);
        assert!((x[1] - a * (1.0 - alpha) / den).abs() < 1e-9);
        for i in 2..5 {
            assert!((x[i] - a * (1.0 + alpha) / den).abs() < 1e-9);
        }
    }

    #[test]
    fn katz_examples() {
        let z = katz_bonacich(&DMatrix::zeros(3, 3), 5.0).unwrap();
        assert_eq!(z, vec![1.0; 3]);

        let b = katz_bonacich(&pair().matrix(), 0.2).unwrap();
        assert!(b.iter().all(|v| (v - 1.25).abs() < 1e-12));

        let alpha = 0.3;
        let star = DirectedNetwork::from_undirected_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let b = katz_bonacich(&star.matrix(), alpha).unwrap();
        let den = 1.0 - 3.0 * alpha * alpha;
        assert!((b[0] - (1.0 + 3.0 * alpha) / den).abs() < 1e-12);
        assert!((b[1] - (1.0 + alpha) / den).abs() < 1e-12);

        assert!(katz_bonacich(&pair().matrix(), 1.0).is_err());
    }

    #[test]
    fn katz_on_directed_matrix() {
        // Directed 3-cycle has spectral radius 1.
        let cyc = DirectedNetwork::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let b = katz_bonacich(&cyc.matrix(), 0.5).unwrap();
        assert!(b.iter().all(|v| (v - 2.0).abs() < 1e-12));
        assert!(katz_bonacich(&cyc.matrix(), 1.0).is_err());
    }

    #[test]
    fn constrained_singletons_and_uniform() {
        let net = catalog::partial7();
        let p = ModelParams::new(1.0, 0.1).unwrap();
        let fb = first_best(&net, &p).unwrap();
        let cs = constrained_first_best(&net, &p, &EqualityClasses::singletons(7)).unwrap();
        for i in 0..7 {
            assert!((fb[i] - cs[i]).abs() < 1e-9);
        }
        let all = EqualityClasses::new(7, vec![(0..7).collect()]).unwrap();
        let u = constrained_first_best(&net, &p, &all).unwrap();
        let m = net.edge_count() as f64;
        let expect = 7.0 / (7.0 - 2.0 * 0.1 * m);
        assert!(u.as_slice().iter().all(|v| (v - expect).abs() < 1e-9));
        assert!((uniform_optimum(&net, &p).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn constrained_rejects_non_concave() {
        // Complete digraph on 4 nodes: m = 12, uniform denominator 4 - 24 alpha.
        let edges: Vec<_> = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .collect();
        let net = DirectedNetwork::from_edges(4, &edges).unwrap();
        let p = ModelParams::new(1.0, 0.2).unwrap();
        let all = EqualityClasses::new(4, vec![(0..4).collect()]).unwrap();
        assert_eq!(
            constrained_first_best(&net, &p, &all),
            Err(Error::ReducedSystemNotConcave)
        );
    }

    #[test]
    fn classes_validation() {
        assert!(EqualityClasses::new(3, vec![vec![0, 1]]).is_err());
        assert!(EqualityClasses::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(EqualityClasses::new(3, vec![vec![0, 1], vec![], vec![2]]).is_err());
        assert!(EqualityClasses::new(3, vec![vec![0, 3], vec![1, 2]]).is_err());
    }

    #[test]
    fn price_examples() {
        let iso = DirectedNetwork::empty(3).unwrap();
        let p = ModelParams::with_cost(1.0, 0.1, Some(0.0)).unwrap();
        let s = price_schedule(&[1.0; 3], &iso, &p).unwrap();
        assert_eq!(s.prices, vec![0.5; 3]);
        assert_eq!(s.profit, 1.5);
        assert_eq!(price_schedule(&[0.0; 3], &iso, &p).unwrap().profit, 0.0);

        let s = price_schedule(&[1.25, 1.25], &pair(), &p).unwrap();
        assert!(s.prices.iter().all(|v| (v - 0.5).abs() < 1e-15));
        assert!((s.profit - 1.25).abs() < 1e-15);

        let no_cost = ModelParams::new(1.0, 0.1).unwrap();
        assert_eq!(
            price_schedule(&[1.0; 3], &iso, &no_cost),
            Err(Error::MissingCost)
        );
    }

    #[test]
    fn tax_examples() {
        let iso = DirectedNetwork::empty(2).unwrap();
        let p = ModelParams::new(1.0, 0.1).unwrap();
        assert_eq!(
            taxes_for_target(&[1.0, 1.0], &iso, &p).unwrap(),
            vec![0.0, 0.0]
        );
        assert_eq!(
            taxes_for_target(&[2.0, 2.0], &iso, &p).unwrap(),
            vec![1.0, 1.0]
        );
        let t = taxes_for_target(&[1.25, 1.25], &pair(), &p).unwrap();
        assert!(t.iter().all(|v| (v - 0.125).abs() < 1e-15));
    }
}
