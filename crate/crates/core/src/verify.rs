//! Deviation gains and exhaustive incentive checks.
//!
//! A deviation is a coalition `S` together with a permutation of its members'
//! locations: member `i` announces the location of `rho(i)` and receives
//! `x[rho(i)]`, while everybody outside `S` keeps their own allocation.
//! Payoffs are always evaluated on the true network.

use rayon::prelude::*;
use serde::Serialize;

use crate::coalitions::{coalitions, CoalitionMode};
use crate::error::{Error, Result};
use crate::net::{DirectedNetwork, ModelParams};
use crate::solver::{influence_sum, utility_unchecked};

/// Gains at or below this value are not profitable.
pub const GAIN_EPS: f64 = 1e-9;

/// Default coalition size cap: `min(n, 6)`.
pub fn default_max_size(n: usize) -> usize {
    n.min(6)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Deviation {
    coalition: Vec<usize>,
    announce: Vec<usize>,
}

impl Deviation {
    /// `coalition[k]` announces the location of `announce[k]`. The coalition
    /// must be sorted without repeats, and `announce` a non-identity
    /// rearrangement of it.
    pub fn new(coalition: Vec<usize>, announce: Vec<usize>) -> Result<Self> {
        if coalition.len() < 2 {
            return Err(Error::InvalidDeviation(
                "coalition needs at least two members".into(),
            ));
        }
        if coalition.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidDeviation(
                "coalition must be sorted and distinct".into(),
            ));
        }
        if announce.len() != coalition.len() {
            return Err(Error::InvalidDeviation(
                "announcement length differs from coalition".into(),
            ));
        }
        let mut sorted = announce.clone();
        sorted.sort_unstable();
        if sorted != coalition {
            return Err(Error::InvalidDeviation(
                "announcements must permute the coalition".into(),
            ));
        }
        if announce == coalition {
            return Err(Error::InvalidDeviation("identity permutation".into()));
        }
        Ok(Self {
            coalition,
            announce,
        })
    }

    /// Two-member swap.
    pub fn swap(i: usize, j: usize) -> Result<Self> {
        let (lo, hi) = (i.min(j), i.max(j));
        Self::new(vec![lo, hi], vec![hi, lo])
    }

    pub fn coalition(&self) -> &[usize] {
        &self.coalition
    }

    pub fn announce(&self) -> &[usize] {
        &self.announce
    }

    /// Allocation after the deviation.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        for (&i, &k) in self.coalition.iter().zip(&self.announce) {
            y[i] = x[k];
        }
        y
    }
}

fn check_dims(x: &[f64], net: &DirectedNetwork) -> Result<()> {
    if x.len() != net.n() {
        return Err(Error::DimensionMismatch {
            expected: net.n(),
            got: x.len(),
        });
    }
    Ok(())
}

/// Per-member utility change `U_i(y) - U_i(x)`, in coalition order.
pub fn deviation_gains(
    x: &[f64],
    net: &DirectedNetwork,
    params: &ModelParams,
    dev: &Deviation,
) -> Result<Vec<f64>> {
    check_dims(x, net)?;
    if dev.coalition.last().is_some_and(|&m| m >= net.n()) {
        return Err(Error::InvalidDeviation("member out of range".into()));
    }
    let y = dev.apply(x);
    Ok(gains_unchecked(x, &y, net, params, &dev.coalition))
}

fn gains_unchecked(
    x: &[f64],
    y: &[f64],
    net: &DirectedNetwork,
    params: &ModelParams,
    members: &[usize],
) -> Vec<f64> {
    members
        .iter()
        .map(|&i| {
            utility_unchecked(i, y, net, params.a, params.alpha)
                - utility_unchecked(i, x, net, params.a, params.alpha)
        })
        .collect()
}

/// True when every internal pair of the coalition has the same symmetrized
/// weight, so the internal externality total is invariant under permutation.
pub fn uniform_internal_weights(net: &DirectedNetwork, coalition: &[usize]) -> bool {
    let mut weight = None;
    for (k, &i) in coalition.iter().enumerate() {
        for &j in &coalition[k + 1..] {
            let w = net.weight(i, j);
            if *weight.get_or_insert(w) != w {
                return false;
            }
        }
    }
    true
}

/// Total coalition gain from external links only:
/// `alpha * sum_{i in S} sum_{j not in S} g_ij (x_rho(i) - x_i) x_j`.
///
/// Equals the exact total gain only when `uniform_internal_weights` holds.
pub fn external_total_gain(x: &[f64], net: &DirectedNetwork, alpha: f64, dev: &Deviation) -> f64 {
    let inside = |j: usize| dev.coalition.binary_search(&j).is_ok();
    dev.coalition
        .iter()
        .zip(&dev.announce)
        .map(|(&i, &k)| {
            let outside: f64 = net
                .influencers(i)
                .filter(|&j| !inside(j))
                .map(|j| x[j])
                .sum();
            (x[k] - x[i]) * outside
        })
        .sum::<f64>()
        * alpha
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Single-agent misreports under the collision rule.
    Ic,
    /// Every coalition member strictly gains.
    Group,
    /// The coalition's total utility strictly increases.
    GroupTransfers,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "ic" => Self::Ic,
            "group" => Self::Group,
            "group-transfers" => Self::GroupTransfers,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Ic => "ic",
            Self::Group => "group",
            Self::GroupTransfers => "group-transfers",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub coalition: Vec<usize>,
    /// Location announced by each member (same order as `coalition`).
    pub permutation: Vec<usize>,
    pub gains: Vec<f64>,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Examined {
    pub coalitions: u64,
    pub permutations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub verdict: Verdict,
    pub mode: Mode,
    pub adjacency: bool,
    pub max_size: usize,
    pub alpha: f64,
    pub violations: Vec<Violation>,
    pub examined: Examined,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Whether some violation involves exactly this (sorted) coalition.
    pub fn has_coalition(&self, coalition: &[usize]) -> bool {
        self.violations.iter().any(|v| v.coalition == coalition)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyOptions {
    pub max_size: usize,
    pub adjacency_required: bool,
    /// Agents that may not join a coalition.
    pub excluded: Vec<usize>,
}

impl VerifyOptions {
    pub fn new(max_size: usize, adjacency_required: bool) -> Self {
        Self {
            max_size,
            adjacency_required,
            excluded: Vec::new(),
        }
    }
}

/// Next lexicographic permutation in place; false when `v` was the last one.
pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v
        .iter()
        .rposition(|&e| e > v[i])
        .expect("a larger element exists");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

fn scan_coalition(
    x: &[f64],
    net: &DirectedNetwork,
    params: &ModelParams,
    mode: Mode,
    coalition: &[usize],
) -> (Vec<Violation>, u64) {
    let mut found = Vec::new();
    let mut examined = 0;
    let fast = mode == Mode::GroupTransfers && uniform_internal_weights(net, coalition);
    let mut announce = coalition.to_vec();
    let mut y = x.to_vec();
    while next_permutation(&mut announce) {
        examined += 1;
        let dev = Deviation {
            coalition: coalition.to_vec(),
            announce: announce.clone(),
        };
        if fast && external_total_gain(x, net, params.alpha, &dev) <= GAIN_EPS {
            continue;
        }
        for (&i, &k) in coalition.iter().zip(&announce) {
            y[i] = x[k];
        }
        let gains = gains_unchecked(x, &y, net, params, coalition);
        for &i in coalition {
            y[i] = x[i];
        }
        let total: f64 = gains.iter().sum();
        let violates = match mode {
            Mode::Group => gains.iter().all(|&g| g > GAIN_EPS),
            _ => total > GAIN_EPS,
        };
        if violates {
            found.push(Violation {
                coalition: coalition.to_vec(),
                permutation: announce.clone(),
                gains,
                total,
            });
        }
    }
    (found, examined)
}

fn sort_violations(v: &mut [Violation]) {
    v.sort_by(|a, b| {
        a.coalition
            .len()
            .cmp(&b.coalition.len())
            .then_with(|| a.coalition.cmp(&b.coalition))
            .then_with(|| a.permutation.cmp(&b.permutation))
    });
}

/// Single-agent misreports. Announcing an occupied location triggers the
/// collision rule and every allocation drops to zero, so the gain is `-U_i(x)`.
fn verify_individual(
    x: &[f64],
    net: &DirectedNetwork,
    params: &ModelParams,
    opts: &VerifyOptions,
) -> VerificationReport {
    let n = net.n();
    let mut violations = Vec::new();
    let mut examined = Examined::default();
    for i in (0..n).filter(|i| !opts.excluded.contains(i)) {
        examined.coalitions += 1;
        let gain = -utility_unchecked(i, x, net, params.a, params.alpha);
        for k in (0..n).filter(|&k| k != i) {
            examined.permutations += 1;
            if gain > GAIN_EPS {
                violations.push(Violation {
                    coalition: vec![i],
                    permutation: vec![k],
                    gains: vec![gain],
                    total: gain,
                });
            }
        }
    }
    finish(Mode::Ic, params, opts, violations, examined)
}

fn finish(
    mode: Mode,
    params: &ModelParams,
    opts: &VerifyOptions,
    mut violations: Vec<Violation>,
    examined: Examined,
) -> VerificationReport {
    sort_violations(&mut violations);
    VerificationReport {
        verdict: if violations.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        mode,
        adjacency: opts.adjacency_required,
        max_size: opts.max_size,
        alpha: params.alpha,
        violations,
        examined,
    }
}

/// Exhaustive check over coalitions of size `2..=max_size` and all their
/// non-identity permutations. Coalitions are scanned in parallel; the report
/// is identical for any worker count.
pub fn verify(
    x: &[f64],
    net: &DirectedNetwork,
    params: &ModelParams,
    mode: Mode,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    check_dims(x, net)?;
    if opts.max_size > net.n() {
        return Err(Error::InvalidParams(format!(
            "max_size {} exceeds n = {}",
            opts.max_size,
            net.n()
        )));
    }
    if mode == Mode::Ic {
        return Ok(verify_individual(x, net, params, opts));
    }
    let kind = if opts.adjacency_required {
        CoalitionMode::Adjacent
    } else {
        CoalitionMode::Any
    };
    let candidates: Vec<Vec<usize>> = coalitions(net, kind, 2, opts.max_size)
        .filter(|c| c.iter().all(|m| !opts.excluded.contains(m)))
        .collect();
    let scanned: Vec<(Vec<Violation>, u64)> = candidates
        .par_iter()
        .map(|c| scan_coalition(x, net, params, mode, c))
        .collect();
    let mut violations = Vec::new();
    let mut examined = Examined {
        coalitions: candidates.len() as u64,
        permutations: 0,
    };
    for (v, count) in scanned {
        violations.extend(v);
        examined.permutations += count;
    }
    Ok(finish(mode, params, opts, violations, examined))
}

/// No deviation makes every member strictly better off.
pub fn verify_group_ic(
    x: &[f64],
    net: &DirectedNetwork,
    params: &ModelParams,
    max_size: usize,
    adjacency_required: bool,
) -> Result<VerificationReport> {
    verify(
        x,
        net,
        params,
        Mode::Group,
        &VerifyOptions::new(max_size, adjacency_required),
    )
}

/// No deviation raises the coalition's total utility.
pub fn verify_group_ic_transfers(
    x: &[f64],
    net: &DirectedNetwork,
    params: &ModelParams,
    max_size: usize,
    adjacency_required: bool,
) -> Result<VerificationReport> {
    verify(
        x,
        net,
        params,
        Mode::GroupTransfers,
        &VerifyOptions::new(max_size, adjacency_required),
    )
}

/// `(x_j - x_i) (sum_k g_ik x_k - sum_k g_jk x_k)` on an undirected network.
///
/// For a non-adjacent pair the swap's total gain is `alpha * margin`; for an
/// adjacent pair it is `alpha * (margin - (x_i - x_j)^2)`. A nonpositive
/// margin therefore rules out a profitable swap either way.
pub fn pairwise_swap_margin(x: &[f64], net: &DirectedNetwork, i: usize, j: usize) -> Result<f64> {
    check_dims(x, net)?;
    if !net.is_symmetric() {
        return Err(Error::NotUndirected);
    }
    if i == j || i >= net.n() || j >= net.n() {
        return Err(Error::InvalidDeviation(format!(
            "invalid pair ({}, {})",
            i + 1,
            j + 1
        )));
    }
    Ok((x[j] - x[i]) * (influence_sum(net, i, x) - influence_sum(net, j, x)))
}

/// Directional derivative of welfare when moving action from agent `i` to
/// agent `j`:
/// `(x_i - x_j) - alpha sum_k (g_ik + g_ki) x_k + alpha sum_k (g_jk + g_kj) x_k`.
pub fn marginal_transfer_welfare(
    x: &[f64],
    net: &DirectedNetwork,
    params: &ModelParams,
    i: usize,
    j: usize,
) -> Result<f64> {
    check_dims(x, net)?;
    if i == j || i >= net.n() || j >= net.n() {
        return Err(Error::InvalidDeviation(format!(
            "invalid pair ({}, {})",
            i + 1,
            j + 1
        )));
    }
    let weighted = |a: usize| -> f64 {
        (0..net.n())
            .map(|k| f64::from(net.weight(a, k)) * x[k])
            .sum()
    };
    Ok((x[i] - x[j]) - params.alpha * weighted(i) + params.alpha * weighted(j))
}
