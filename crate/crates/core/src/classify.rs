//! Structural classifiers for the network families studied by the toolkit.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::net::DirectedNetwork;
use crate::solver::EqualityClasses;

/// Ordered tiers `A_1, ..., A_M`; influence only flows from lower-index
/// tiers to higher-index tiers (`g_ij = 1` implies `tier(i) > tier(j)`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TierPartition {
    tiers: Vec<Vec<usize>>,
    #[serde(skip)]
    tier_of: Vec<usize>,
}

impl TierPartition {
    pub fn tiers(&self) -> &[Vec<usize>] {
        &self.tiers
    }

    pub fn tier_count(&self) -> usize {
        self.tiers.len()
    }

    /// 0-based tier index of an agent.
    pub fn tier_of(&self, agent: usize) -> usize {
        self.tier_of[agent]
    }

    pub fn roots(&self) -> &[usize] {
        &self.tiers[0]
    }

    /// Re-checks both hierarchy invariants against `net`.
    pub fn is_valid_for(&self, net: &DirectedNetwork) -> bool {
        let n = net.n();
        let mut seen = vec![false; n];
        for (t, tier) in self.tiers.iter().enumerate() {
            for &a in tier {
                if a >= n || seen[a] || self.tier_of[a] != t {
                    return false;
                }
                seen[a] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return false;
        }
        let edges_flow_down = net
            .edges()
            .into_iter()
            .all(|(i, j)| self.tier_of[i] > self.tier_of[j]);
        let anchored = (0..n).all(|i| {
            self.tier_of[i] == 0
                || net
                    .influencers(i)
                    .any(|j| self.tier_of[j] < self.tier_of[i])
        });
        edges_flow_down && anchored
    }
}

/// Longest-path layering of the influence digraph, or `None` if it has a
/// cycle. Roots (agents influenced by nobody) form tier 0.
pub fn layering(net: &DirectedNetwork) -> Option<TierPartition> {
    let n = net.n();
    let mut tier_of = vec![usize::MAX; n];
    let mut pending: Vec<usize> = (0..n).map(|i| net.influencers(i).count()).collect();
    let mut ready: Vec<usize> = (0..n).filter(|&i| pending[i] == 0).collect();
    for &r in &ready {
        tier_of[r] = 0;
    }
    let mut done = 0;
    while let Some(j) = ready.pop() {
        done += 1;
        for i in net.influenced_by(j) {
            pending[i] -= 1;
            if pending[i] == 0 {
                tier_of[i] = net.influencers(i).map(|k| tier_of[k]).max().unwrap_or(0) + 1;
                ready.push(i);
            }
        }
    }
    if done < n {
        return None;
    }
    let m = tier_of.iter().max().copied().unwrap_or(0) + 1;
    let mut tiers = vec![Vec::new(); m];
    for (a, &t) in tier_of.iter().enumerate() {
        tiers[t].push(a);
    }
    Some(TierPartition { tiers, tier_of })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Undirected,
    Hierarchical,
    SingleRootUniversal,
    NestedNeighborhoods,
    RegularOrientedTree,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub labels: Vec<Family>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tiers: Option<TierPartition>,
    /// Predecessor count per tier when the network is a regular oriented tree.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branching: Option<Vec<usize>>,
}

impl Classification {
    pub fn has(&self, family: Family) -> bool {
        self.labels.contains(&family)
    }
}

pub fn classify(net: &DirectedNetwork) -> Classification {
    let mut labels = Vec::new();
    if net.is_symmetric() {
        labels.push(Family::Undirected);
    }
    let tiers = layering(net).filter(|t| t.tier_count() >= 2);
    let mut branching = None;
    if let Some(tp) = &tiers {
        labels.push(Family::Hierarchical);
        if is_single_root_universal(net, tp) {
            labels.push(Family::SingleRootUniversal);
        }
        if has_nested_neighborhoods(net, tp) {
            labels.push(Family::NestedNeighborhoods);
        }
        branching = tree_branching(net, tp);
        if branching.is_some() {
            labels.push(Family::RegularOrientedTree);
        }
    }
    Classification {
        labels,
        tiers,
        branching,
    }
}

/// Equal-action classes suited to the network's family: with a single
/// universal root and at least three tiers, the root is pooled with every
/// agent of the third tier and below; with nested neighborhoods, everyone
/// is pooled.
pub fn pooling_pattern(net: &DirectedNetwork) -> Result<EqualityClasses> {
    let c = classify(net);
    if let (true, Some(tp)) = (c.has(Family::SingleRootUniversal), &c.tiers) {
        if tp.tier_count() >= 3 {
            let mut merged = tp.roots().to_vec();
            merged.extend(tp.tiers()[2..].iter().flatten().copied());
            merged.sort_unstable();
            return EqualityClasses::one_merged(net.n(), &merged);
        }
    }
    if c.has(Family::NestedNeighborhoods) {
        return EqualityClasses::new(net.n(), vec![(0..net.n()).collect()]);
    }
    Err(Error::InvalidClasses(
        "no pooling pattern: network is neither single-root universal with 3+ tiers nor nested"
            .into(),
    ))
}

fn is_single_root_universal(net: &DirectedNetwork, tp: &TierPartition) -> bool {
    match tp.roots() {
        &[root] => (0..net.n()).all(|i| i == root || net.has_edge(i, root)),
        _ => false,
    }
}

/// Influence equals its transitive closure: if `i` is influenced by a
/// non-root `j`, every influencer of `j` also influences `i`.
fn has_nested_neighborhoods(net: &DirectedNetwork, tp: &TierPartition) -> bool {
    net.edges()
        .into_iter()
        .all(|(i, j)| tp.tier_of(j) == 0 || net.influencers(j).all(|k| net.has_edge(i, k)))
}

fn tree_branching(net: &DirectedNetwork, tp: &TierPartition) -> Option<Vec<usize>> {
    let single_parent = (0..net.n()).all(|i| tp.tier_of(i) == 0 || net.influencers(i).count() == 1);
    if !single_parent {
        return None;
    }
    tp.tiers()
        .iter()
        .map(|tier| {
            let counts: Vec<usize> = tier.iter().map(|&a| net.influenced_by(a).count()).collect();
            counts.iter().all(|&c| c == counts[0]).then_some(counts[0])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::catalog;

    #[test]
    fn pooling_patterns() {
        let p = pooling_pattern(&catalog::partial7()).unwrap();
        assert_eq!(p.classes()[0], vec![0, 3, 4, 5, 6]);
        assert_eq!(p.classes().len(), 3);
        let p = pooling_pattern(&catalog::nested_figure()).unwrap();
        assert_eq!(p.classes(), &[(0..9).collect::<Vec<_>>()]);
        assert!(pooling_pattern(&catalog::line5()).is_err());
    }

    #[test]
    fn triangle_is_only_undirected() {
        let tri = DirectedNetwork::from_undirected_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        assert_eq!(classify(&tri).labels, vec![Family::Undirected]);
    }

    #[test]
    fn nested_figure() {
        let c = classify(&catalog::nested_figure());
        assert_eq!(
            c.labels,
            vec![Family::Hierarchical, Family::NestedNeighborhoods]
        );
        let tiers = c.tiers.unwrap();
        assert_eq!(
            tiers.tiers(),
            &[vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]]
        );
    }

    #[test]
    fn oriented_tree_figure() {
        let c = classify(&catalog::tree7());
        assert_eq!(
            c.labels,
            vec![Family::Hierarchical, Family::RegularOrientedTree]
        );
        assert_eq!(c.branching, Some(vec![3, 1, 0]));
    }

    #[test]
    fn single_root_figure() {
        let c = classify(&catalog::partial7());
        assert!(c.has(Family::SingleRootUniversal));
        assert_eq!(c.tiers.unwrap().tier_count(), 3);
    }

    #[test]
    fn cycles_are_not_hierarchical() {
        let cyc = DirectedNetwork::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(classify(&cyc).labels.is_empty());
        assert!(layering(&cyc).is_none());
    }

    #[test]
    fn edgeless_is_undirected_only() {
        let e = DirectedNetwork::empty(4).unwrap();
        assert_eq!(classify(&e).labels, vec![Family::Undirected]);
    }

    #[test]
    fn same_tier_links_break_hierarchy() {
        assert!(!classify(&catalog::same_tier5()).has(Family::Hierarchical));
    }
}
