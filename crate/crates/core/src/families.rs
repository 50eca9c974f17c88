//! Named example graphs and seeded random generators for each network family.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::net::DirectedNetwork;

fn build(n: usize, edges: &[(usize, usize)]) -> DirectedNetwork {
    // 1-indexed literal edge lists.
    let zero: Vec<_> = edges.iter().map(|&(i, j)| (i - 1, j - 1)).collect();
    DirectedNetwork::from_edges(n, &zero).expect("catalog graph is valid")
}

/// Fixed graphs used throughout the docs, tests and the `examples` command.
/// Agent numbers in the comments are 1-indexed.
pub mod catalog {
    use super::*;

    /// Locations of the 3-agent path: left, center, right, with the center
    /// influenced by the left and the right influenced by the center.
    pub const PATH_LOCATIONS: [&str; 3] = ["left", "center", "right"];

    /// Agent placed at (left, center, right) in each of the six labelings
    /// `g1..g6` of the 3-agent path.
    pub const PATH_PLACEMENTS: [[usize; 3]; 6] = [
        [2, 1, 3],
        [1, 2, 3],
        [1, 3, 2],
        [2, 3, 1],
        [3, 1, 2],
        [3, 2, 1],
    ];

    /// Labeled 3-agent path with the given (left, center, right) placement.
    pub fn path_labeling(placement: [usize; 3]) -> DirectedNetwork {
        let [l, c, r] = placement;
        build(3, &[(c, l), (r, c)])
    }

    /// The true network `g1` of the 3-agent path: agent 1 at the center.
    pub fn path3() -> DirectedNetwork {
        path_labeling(PATH_PLACEMENTS[0])
    }

    /// Three roots and one follower influenced by all of them.
    pub fn three_roots_one_follower() -> DirectedNetwork {
        build(4, &[(4, 1), (4, 2), (4, 3)])
    }

    /// Three-tier hierarchy with nested neighborhoods on 9 agents.
    pub fn nested_figure() -> DirectedNetwork {
        build(
            9,
            &[
                (4, 1),
                (4, 2),
                (5, 2),
                (5, 3),
                (6, 2),
                (6, 3),
                (7, 4),
                (7, 5),
                (7, 1),
                (7, 2),
                (7, 3),
                (8, 5),
                (8, 2),
                (8, 3),
                (9, 6),
                (9, 2),
                (9, 3),
            ],
        )
    }

    /// Regular tree oriented toward root 1, branching 3 then 1.
    pub fn tree7() -> DirectedNetwork {
        build(7, &[(2, 1), (3, 1), (4, 1), (5, 2), (6, 3), (7, 4)])
    }

    /// Directed line `g12 = g23 = g34 = g45 = 1`; agent 5 is the root.
    pub fn line5() -> DirectedNetwork {
        build(5, &[(1, 2), (2, 3), (3, 4), (4, 5)])
    }

    /// Tiers {1}, {2}, {3,4,5} where the bottom tier agents influence each other.
    pub fn same_tier5() -> DirectedNetwork {
        build(
            5,
            &[
                (2, 1),
                (3, 1),
                (3, 2),
                (3, 4),
                (3, 5),
                (4, 1),
                (4, 2),
                (4, 3),
                (4, 5),
                (5, 1),
                (5, 2),
                (5, 3),
                (5, 4),
            ],
        )
    }

    /// Two disjoint undirected 3-stars: hub 1 with leaves 2, 4, 5 and hub 3
    /// with leaves 6, 7, 8.
    pub fn two_stars() -> DirectedNetwork {
        let pairs = [(1, 2), (1, 4), (1, 5), (3, 6), (3, 7), (3, 8)];
        let zero: Vec<_> = pairs.iter().map(|&(i, j)| (i - 1, j - 1)).collect();
        DirectedNetwork::from_undirected_edges(8, &zero).expect("catalog graph is valid")
    }

    /// Single root 1, tier {2, 3}, tier {4, 5, 6, 7}; every agent is
    /// influenced by the root.
    pub fn partial7() -> DirectedNetwork {
        build(
            7,
            &[
                (2, 1),
                (3, 1),
                (4, 2),
                (4, 1),
                (5, 2),
                (5, 1),
                (6, 3),
                (6, 1),
                (7, 3),
                (7, 1),
            ],
        )
    }

    pub const NAMES: [&str; 8] = [
        "path3",
        "three-roots",
        "nested9",
        "tree7",
        "line5",
        "same-tier5",
        "two-stars",
        "partial7",
    ];

    pub fn by_name(name: &str) -> Option<DirectedNetwork> {
        Some(match name {
            "path3" => path3(),
            "three-roots" => three_roots_one_follower(),
            "nested9" => nested_figure(),
            "tree7" => tree7(),
            "line5" => line5(),
            "same-tier5" => same_tier5(),
            "two-stars" => two_stars(),
            "partial7" => partial7(),
            _ => return None,
        })
    }
}

pub fn random_digraph<R: Rng>(rng: &mut R, n: usize, p: f64) -> DirectedNetwork {
    let edges: Vec<_> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .filter(|_| rng.gen_bool(p))
        .collect();
    DirectedNetwork::from_edges(n, &edges).expect("generated graph is valid")
}

pub fn random_undirected<R: Rng>(rng: &mut R, n: usize, p: f64) -> DirectedNetwork {
    let pairs: Vec<_> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|_| rng.gen_bool(p))
        .collect();
    DirectedNetwork::from_undirected_edges(n, &pairs).expect("generated graph is valid")
}

/// Consecutive agent ids for each tier.
fn tier_members(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut next = 0;
    sizes
        .iter()
        .map(|&s| {
            let t: Vec<usize> = (next..next + s).collect();
            next += s;
            t
        })
        .collect()
}

/// Random split of `n` agents into `tiers` nonempty tiers.
pub fn random_tier_sizes<R: Rng>(rng: &mut R, n: usize, tiers: usize) -> Vec<usize> {
    assert!(tiers >= 1 && n >= tiers);
    let mut sizes = vec![1; tiers];
    for _ in tiers..n {
        sizes[rng.gen_range(0..tiers)] += 1;
    }
    sizes
}

/// Hierarchy with the given tier sizes: each agent below the top tier has a
/// mandatory influencer in the tier directly above and links to any other
/// higher-tier agent with probability `p`.
pub fn random_hierarchy<R: Rng>(rng: &mut R, sizes: &[usize], p: f64) -> DirectedNetwork {
    let tiers = tier_members(sizes);
    let n = sizes.iter().sum();
    let mut edges = Vec::new();
    for m in 1..tiers.len() {
        for &i in &tiers[m] {
            let anchor = *tiers[m - 1].choose(rng).expect("tiers are nonempty");
            for higher in &tiers[..m] {
                for &j in higher {
                    if j == anchor || rng.gen_bool(p) {
                        edges.push((i, j));
                    }
                }
            }
        }
    }
    DirectedNetwork::from_edges(n, &edges).expect("generated graph is valid")
}

/// Single root influencing every other agent; `sizes[0]` must be 1.
pub fn random_single_root<R: Rng>(rng: &mut R, sizes: &[usize], p: f64) -> DirectedNetwork {
    assert_eq!(sizes[0], 1);
    let tiers = tier_members(sizes);
    let n = sizes.iter().sum();
    let mut edges = Vec::new();
    for m in 1..tiers.len() {
        for &i in &tiers[m] {
            let anchor = *tiers[m - 1].choose(rng).expect("tiers are nonempty");
            for higher in &tiers[..m] {
                for &j in higher {
                    if j == 0 || j == anchor || rng.gen_bool(p) {
                        edges.push((i, j));
                    }
                }
            }
        }
    }
    DirectedNetwork::from_edges(n, &edges).expect("generated graph is valid")
}

/// Hierarchy whose influence relation is transitively closed, with every
/// non-root influenced by at least two roots. Requires `sizes[0] >= 2`.
pub fn random_nested<R: Rng>(rng: &mut R, sizes: &[usize], p: f64) -> DirectedNetwork {
    assert!(sizes[0] >= 2);
    let tiers = tier_members(sizes);
    let n: usize = sizes.iter().sum();
    let mut influencers: Vec<Vec<bool>> = vec![vec![false; n]; n];
    for m in 1..tiers.len() {
        for &i in &tiers[m] {
            let mut seed = vec![*tiers[m - 1].choose(rng).expect("tiers are nonempty")];
            seed.extend(tiers[0].choose_multiple(rng, 2).copied());
            for higher in &tiers[..m] {
                seed.extend(higher.iter().copied().filter(|_| rng.gen_bool(p)));
            }
            for c in seed {
                influencers[i][c] = true;
                let inherited = influencers[c].clone();
                for (own, from) in influencers[i].iter_mut().zip(inherited) {
                    *own |= from;
                }
            }
        }
    }
    let edges: Vec<_> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| influencers[i][j])
        .collect();
    DirectedNetwork::from_edges(n, &edges).expect("generated graph is valid")
}

/// Regular tree oriented toward a single root; every agent in tier `m` has
/// `branching[m]` children.
pub fn regular_tree(branching: &[usize]) -> DirectedNetwork {
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];
    let mut next = 1;
    for &b in branching {
        let mut below = Vec::new();
        for &parent in &frontier {
            for _ in 0..b {
                edges.push((next, parent));
                below.push(next);
                next += 1;
            }
        }
        frontier = below;
    }
    DirectedNetwork::from_edges(next, &edges).expect("generated graph is valid")
}

/// Random strictly decreasing branching profile whose tree has at most
/// `n_max` agents.
pub fn random_decreasing_branching<R: Rng>(rng: &mut R, n_max: usize) -> Vec<usize> {
    loop {
        let depth = rng.gen_range(1..=3);
        let mut b: Vec<usize> = (0..depth).map(|_| rng.gen_range(1..=5)).collect();
        b.sort_unstable_by(|x, y| y.cmp(x));
        b.dedup();
        let mut total = 1;
        let mut width = 1;
        for &k in &b {
            width *= k;
            total += width;
        }
        if total <= n_max && total >= 3 {
            return b;
        }
    }
}

/// Family generators for the counterexample search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Digraph,
    Undirected,
    Hierarchy,
    SingleRoot,
    Nested,
    Tree,
}

impl FamilyKind {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "digraph" => Self::Digraph,
            "undirected" => Self::Undirected,
            "hierarchy" => Self::Hierarchy,
            "single-root" => Self::SingleRoot,
            "nested" => Self::Nested,
            "tree" => Self::Tree,
            _ => return None,
        })
    }

    /// One random instance with at most `n_max` agents (`n_max >= 4`).
    pub fn generate<R: Rng>(self, rng: &mut R, n_max: usize) -> DirectedNetwork {
        let n_max = n_max.max(4);
        match self {
            Self::Digraph => {
                let n = rng.gen_range(2..=n_max);
                random_digraph(rng, n, 0.3)
            }
            Self::Undirected => {
                let n = rng.gen_range(2..=n_max);
                random_undirected(rng, n, 0.4)
            }
            Self::Hierarchy => {
                let tiers = rng.gen_range(2..=4.min(n_max));
                let n = rng.gen_range(tiers.max(3)..=n_max);
                let sizes = random_tier_sizes(rng, n, tiers);
                random_hierarchy(rng, &sizes, 0.3)
            }
            Self::SingleRoot => {
                let tiers = rng.gen_range(3..=4.min(n_max - 1));
                let n = rng.gen_range(tiers + 1..=n_max);
                let mut sizes = vec![1];
                sizes.extend(random_tier_sizes(rng, n - 1, tiers - 1));
                random_single_root(rng, &sizes, 0.3)
            }
            Self::Nested => {
                let sizes = random_nondecreasing_sizes(rng, n_max);
                random_nested(rng, &sizes, 0.3)
            }
            Self::Tree => regular_tree(&random_decreasing_branching(rng, n_max)),
        }
    }
}

/// Nondecreasing tier sizes (top tier at least 2) summing to at most `n_max`.
pub fn random_nondecreasing_sizes<R: Rng>(rng: &mut R, n_max: usize) -> Vec<usize> {
    loop {
        let tiers = rng.gen_range(2..=3);
        let mut sizes: Vec<usize> = (0..tiers).map(|_| rng.gen_range(2..=4)).collect();
        sizes.sort_unstable();
        if sizes.iter().sum::<usize>() <= n_max.max(4) {
            return sizes;
        }
    }
}
