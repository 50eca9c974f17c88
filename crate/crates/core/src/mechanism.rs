//! Anonymized architectures, information cells and the contract mechanisms.
//!
//! A labeled network is one member of its architecture: the class of all
//! relabelings `g'_{ij} = g_{pi(i) pi(j)}`. The planner indexes contracts by
//! the locations of a fixed representative, the relabeling with the
//! lexicographically smallest adjacency encoding.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::net::{DirectedNetwork, ModelParams};
use crate::solver::{first_best, utilities, utility_unchecked, SOLVE_TOL};
use crate::verify::{next_permutation, verify, Mode, VerificationReport, VerifyOptions, GAIN_EPS};

/// Largest agent count accepted by the factorial enumerations.
pub const MAX_ENUM_N: usize = 9;

/// Row-major adjacency bits, first entry most significant, so numeric order
/// is lexicographic order of the adjacency string.
pub fn encode(net: &DirectedNetwork) -> u128 {
    net.adjacency()
        .iter()
        .fold(0u128, |acc, &b| (acc << 1) | u128::from(b))
}

fn check_enum_size(net: &DirectedNetwork) -> Result<()> {
    if net.n() > MAX_ENUM_N {
        return Err(Error::TooLarge {
            n: net.n(),
            max: MAX_ENUM_N,
        });
    }
    Ok(())
}

/// Calls `f` with every permutation of `0..n`, in lexicographic order.
fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        f(&perm);
        if !next_permutation(&mut perm) {
            break;
        }
    }
}

/// Assignment of agents to locations: `location(i)` is agent `i`'s location.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Labeling(Vec<usize>);

impl Labeling {
    pub fn new(locations: Vec<usize>) -> Result<Self> {
        let n = locations.len();
        let mut seen = vec![false; n];
        for &l in &locations {
            if l >= n || std::mem::replace(&mut seen[l], true) {
                return Err(Error::InvalidAnnouncement(
                    "labeling is not a bijection".into(),
                ));
            }
        }
        Ok(Self(locations))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn location(&self, agent: usize) -> usize {
        self.0[agent]
    }

    pub fn locations(&self) -> &[usize] {
        &self.0
    }

    /// Agent at each location.
    pub fn occupants(&self) -> Vec<usize> {
        let mut occ = vec![0; self.0.len()];
        for (agent, &loc) in self.0.iter().enumerate() {
            occ[loc] = agent;
        }
        occ
    }
}

/// The architecture representative and the true location of every agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Architecture {
    pub representative: DirectedNetwork,
    pub labeling: Labeling,
}

/// Lexicographically minimal relabeling of `net`, with the labeling that
/// maps `net` onto it (`net_{ij} = rep_{loc(i) loc(j)}`).
pub fn architecture(net: &DirectedNetwork) -> Result<Architecture> {
    check_enum_size(net)?;
    let mut best: Option<(u128, Vec<usize>)> = None;
    for_each_permutation(net.n(), |perm| {
        let code = encode(&net.relabel(perm));
        if best.as_ref().is_none_or(|(c, _)| code < *c) {
            best = Some((code, perm.to_vec()));
        }
    });
    let (_, perm) = best.expect("at least one permutation");
    // Location u of the representative is occupied by agent perm[u].
    let mut loc = vec![0; net.n()];
    for (u, &agent) in perm.iter().enumerate() {
        loc[agent] = u;
    }
    Ok(Architecture {
        representative: net.relabel(&perm),
        labeling: Labeling(loc),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceClass {
    /// Distinct labeled networks, ordered by encoding.
    pub members: Vec<DirectedNetwork>,
}

impl EquivalenceClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, net: &DirectedNetwork) -> bool {
        self.members.iter().any(|m| m == net)
    }
}

fn collect_relabelings(
    net: &DirectedNetwork,
    mut keep: impl FnMut(&[usize], &DirectedNetwork) -> bool,
) -> Vec<DirectedNetwork> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for_each_permutation(net.n(), |perm| {
        let g = net.relabel(perm);
        if keep(perm, &g) && seen.insert(encode(&g)) {
            out.push(g);
        }
    });
    out.sort_by_key(encode);
    out
}

/// Every distinct relabeling of `net`; its size is `n! / |Aut(net)|`.
pub fn equivalence_class(net: &DirectedNetwork) -> Result<EquivalenceClass> {
    check_enum_size(net)?;
    Ok(EquivalenceClass {
        members: collect_relabelings(net, |_, _| true),
    })
}

/// Number of permutations leaving `net` unchanged.
pub fn automorphism_count(net: &DirectedNetwork) -> Result<usize> {
    check_enum_size(net)?;
    let mut count = 0;
    for_each_permutation(net.n(), |perm| {
        if &net.relabel(perm) == net {
            count += 1;
        }
    });
    Ok(count)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KnowledgeLevel {
    LocationOnly,
    LocationPlusInNeighbors,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InformationCell {
    pub agent: usize,
    pub level: KnowledgeLevel,
    pub members: Vec<DirectedNetwork>,
}

impl InformationCell {
    pub fn contains(&self, net: &DirectedNetwork) -> bool {
        self.members.iter().any(|m| m == net)
    }
}

/// Labeled networks `agent` cannot tell apart from `net`.
///
/// With location-only knowledge these are the relabelings that keep the agent
/// in place; knowing the identities of one's influencers additionally fixes
/// the agent's own adjacency row.
pub fn information_cell(
    net: &DirectedNetwork,
    agent: usize,
    level: KnowledgeLevel,
) -> Result<InformationCell> {
    check_enum_size(net)?;
    if agent >= net.n() {
        return Err(Error::DimensionMismatch {
            expected: net.n(),
            got: agent + 1,
        });
    }
    let members = collect_relabelings(net, |perm, g| {
        perm[agent] == agent
            && match level {
                KnowledgeLevel::LocationOnly => true,
                KnowledgeLevel::LocationPlusInNeighbors => {
                    (0..net.n()).all(|j| g.has_edge(agent, j) == net.has_edge(agent, j))
                }
            }
    });
    Ok(InformationCell {
        agent,
        level,
        members,
    })
}

/// Payoffs of the menu-of-contracts game. Agent `i` claims location
/// `announcements[i]`; distinct claims receive `menu[claim]`, any repeated
/// claim sends every allocation (and payoff) to zero.
pub fn menu_game(
    menu: &[f64],
    announcements: &[usize],
    net: &DirectedNetwork,
    params: &ModelParams,
) -> Result<Vec<f64>> {
    let n = net.n();
    if menu.len() != n || announcements.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: menu.len().min(announcements.len()),
        });
    }
    if let Some(&bad) = announcements.iter().find(|&&l| l >= n) {
        return Err(Error::InvalidAnnouncement(format!(
            "location {} out of range",
            bad + 1
        )));
    }
    let mut taken = vec![false; n];
    let collision = announcements
        .iter()
        .any(|&l| std::mem::replace(&mut taken[l], true));
    if collision {
        return Ok(vec![0.0; n]);
    }
    let y: Vec<f64> = announcements.iter().map(|&l| menu[l]).collect();
    utilities(&y, net, params)
}

/// One agent's report in the neighbor-announcement mechanism: a location and
/// the identities of the agents that influence it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NeighborReport {
    pub location: usize,
    pub influencers: Vec<usize>,
}

pub fn truthful_profile(net: &DirectedNetwork, labeling: &Labeling) -> Vec<NeighborReport> {
    (0..net.n())
        .map(|i| NeighborReport {
            location: labeling.location(i),
            influencers: net.influencers(i).collect(),
        })
        .collect()
}

/// Locations form a bijection and every reported influencer set, mapped
/// through the announced locations, is exactly the influencer set of the
/// announced location in the representative.
pub fn neighbor_announcements_consistent(
    profile: &[NeighborReport],
    representative: &DirectedNetwork,
) -> bool {
    let n = representative.n();
    if profile.len() != n {
        return false;
    }
    let mut taken = vec![false; n];
    for r in profile {
        if r.location >= n || std::mem::replace(&mut taken[r.location], true) {
            return false;
        }
    }
    profile.iter().all(|r| {
        let mut claimed = vec![false; n];
        for &j in &r.influencers {
            if j >= n || std::mem::replace(&mut claimed[profile[j].location], true) {
                return false;
            }
        }
        (0..n).all(|l| claimed[l] == representative.has_edge(r.location, l))
    })
}

/// How deviating members fill in their influencer reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NeighborStrategy {
    /// Deviators keep reporting their true influencers.
    Truthful,
    /// Deviators report the agents whose announced locations influence their
    /// own announced location (outsiders stay truthful).
    RoleConsistent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MechanismAudit {
    pub strategy: NeighborStrategy,
    pub deviations: u64,
    pub consistent: u64,
    /// Largest coalition gain among consistent profiles.
    pub max_consistent_gain: f64,
    /// Consistent profiles with coalition gain above tolerance.
    pub profitable_consistent: u64,
    /// Profiles that change some agent's allocation yet pass the check.
    pub allocation_changing_consistent: u64,
}

impl MechanismAudit {
    pub fn passed(&self) -> bool {
        self.profitable_consistent == 0
    }
}

/// Every coalition (adjacent or not) of size `2..=max_size` and every
/// non-identity location permutation among its members, under the
/// neighbor-announcement mechanism with the first-best menu.
pub fn audit_neighbor_mechanism(
    net: &DirectedNetwork,
    params: &ModelParams,
    max_size: usize,
    strategy: NeighborStrategy,
) -> Result<MechanismAudit> {
    let arch = architecture(net)?;
    let rep = &arch.representative;
    let menu = first_best(rep, params)?;
    let n = net.n();
    let truth = truthful_profile(net, &arch.labeling);
    let x_true: Vec<f64> = (0..n).map(|i| menu[arch.labeling.location(i)]).collect();
    let u_true = utilities(&x_true, net, params)?;

    let mut audit = MechanismAudit {
        strategy,
        deviations: 0,
        consistent: 0,
        max_consistent_gain: f64::NEG_INFINITY,
        profitable_consistent: 0,
        allocation_changing_consistent: 0,
    };
    let any = crate::coalitions::coalitions(
        net,
        crate::coalitions::CoalitionMode::Any,
        2,
        max_size.min(n),
    );
    for coalition in any {
        let mut announce = coalition.clone();
        while next_permutation(&mut announce) {
            audit.deviations += 1;
            let mut profile = truth.clone();
            for (&i, &k) in coalition.iter().zip(&announce) {
                profile[i].location = truth[k].location;
            }
            if strategy == NeighborStrategy::RoleConsistent {
                let occupants: Vec<usize> = {
                    let mut occ = vec![0; n];
                    for (agent, r) in profile.iter().enumerate() {
                        occ[r.location] = agent;
                    }
                    occ
                };
                for &i in &coalition {
                    let loc = profile[i].location;
                    let mut infl: Vec<usize> = rep.influencers(loc).map(|l| occupants[l]).collect();
                    infl.sort_unstable();
                    profile[i].influencers = infl;
                }
            }
            if !neighbor_announcements_consistent(&profile, rep) {
                continue;
            }
            audit.consistent += 1;
            let y: Vec<f64> = profile.iter().map(|r| menu[r.location]).collect();
            if y.iter()
                .zip(&x_true)
                .any(|(a, b)| (a - b).abs() > SOLVE_TOL * b.abs().max(1.0))
            {
                audit.allocation_changing_consistent += 1;
            }
            let gain: f64 = coalition
                .iter()
                .map(|&i| utility_unchecked(i, &y, net, params.a, params.alpha) - u_true[i])
                .sum();
            audit.max_consistent_gain = audit.max_consistent_gain.max(gain);
            if gain > GAIN_EPS {
                audit.profitable_consistent += 1;
            }
        }
    }
    Ok(audit)
}

/// The selected verifier over adjacent coalitions that avoid every agent whose
/// identity the planner knows.
pub fn verify_with_known_identities(
    x: &[f64],
    net: &DirectedNetwork,
    params: &ModelParams,
    known: &[usize],
    mode: Mode,
    max_size: usize,
) -> Result<VerificationReport> {
    let opts = VerifyOptions {
        max_size,
        adjacency_required: true,
        excluded: known.to_vec(),
    };
    verify(x, net, params, mode, &opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::catalog;

    fn complete(n: usize) -> DirectedNetwork {
        let e: Vec<_> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .collect();
        DirectedNetwork::from_edges(n, &e).unwrap()
    }

    #[test]
    fn class_sizes() {
        assert_eq!(equivalence_class(&catalog::path3()).unwrap().size(), 6);
        assert_eq!(equivalence_class(&complete(4)).unwrap().size(), 1);
        assert_eq!(
            equivalence_class(&DirectedNetwork::empty(4).unwrap())
                .unwrap()
                .size(),
            1
        );
        // 0 <- 1 <- 2 <- 3 plus 0 <- 2 has trivial automorphisms
        let asym = DirectedNetwork::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 2)]).unwrap();
        assert_eq!(automorphism_count(&asym).unwrap(), 1);
        assert_eq!(equivalence_class(&asym).unwrap().size(), 24);
    }

    #[test]
    fn too_large_rejected() {
        let big = DirectedNetwork::empty(10).unwrap();
        assert_eq!(
            equivalence_class(&big).unwrap_err(),
            Error::TooLarge {
                n: 10,
                max: MAX_ENUM_N
            }
        );
    }

    #[test]
    fn architecture_maps_onto_representative() {
        let net = catalog::partial7();
        let arch = architecture(&net).unwrap();
        for i in 0..7 {
            for j in 0..7 {
                assert_eq!(
                    net.has_edge(i, j),
                    arch.representative
                        .has_edge(arch.labeling.location(i), arch.labeling.location(j))
                );
            }
        }
        // relabelings share the representative
        let other = net.relabel(&[3, 1, 0, 2, 6, 5, 4]);
        assert_eq!(
            architecture(&other).unwrap().representative,
            arch.representative
        );
    }

    #[test]
    fn cells_on_complete_graph() {
        let k = complete(3);
        for level in [
            KnowledgeLevel::LocationOnly,
            KnowledgeLevel::LocationPlusInNeighbors,
        ] {
            let cell = information_cell(&k, 1, level).unwrap();
            assert_eq!(cell.members, vec![k.clone()]);
        }
    }

    #[test]
    fn menu_game_rules() {
        let net = catalog::tree7();
        let p = ModelParams::new(1.0, 0.2).unwrap();
        let x = first_best(&net, &p).unwrap();
        let truthful: Vec<usize> = (0..7).collect();
        let pay = menu_game(x.as_slice(), &truthful, &net, &p).unwrap();
        assert_eq!(pay, utilities(x.as_slice(), &net, &p).unwrap());

        let mut clash = truthful.clone();
        clash[4] = 1;
        assert_eq!(
            menu_game(x.as_slice(), &clash, &net, &p).unwrap(),
            vec![0.0; 7]
        );

        let mut bad = truthful;
        bad[0] = 7;
        assert!(matches!(
            menu_game(x.as_slice(), &bad, &net, &p),
            Err(Error::InvalidAnnouncement(_))
        ));
    }

    #[test]
    fn path_swap_is_inconsistent() {
        let net = catalog::path3();
        let arch = architecture(&net).unwrap();
        let truth = truthful_profile(&net, &arch.labeling);
        assert!(neighbor_announcements_consistent(
            &truth,
            &arch.representative
        ));
        let mut swapped = truth.clone();
        swapped[0].location = truth[1].location;
        swapped[1].location = truth[0].location;
        assert!(!neighbor_announcements_consistent(
            &swapped,
            &arch.representative
        ));
    }

    #[test]
    fn automorphic_swap_is_consistent() {
        // leaves 2 and 3 both influenced by hub 1: swapping them is an automorphism
        let net = DirectedNetwork::from_edges(3, &[(1, 0), (2, 0)]).unwrap();
        let arch = architecture(&net).unwrap();
        let truth = truthful_profile(&net, &arch.labeling);
        let mut swapped = truth.clone();
        swapped[1].location = truth[2].location;
        swapped[2].location = truth[1].location;
        assert!(neighbor_announcements_consistent(
            &swapped,
            &arch.representative
        ));
        let p = ModelParams::new(1.0, 0.2).unwrap();
        let menu = first_best(&arch.representative, &p).unwrap();
        let before: Vec<f64> = truth.iter().map(|r| menu[r.location]).collect();
        let after: Vec<f64> = swapped.iter().map(|r| menu[r.location]).collect();
        assert_eq!(before, after);
    }

    #[test]
    fn known_identities_edge_cases() {
        let net = catalog::partial7();
        let p = ModelParams::new(1.0, 0.1).unwrap();
        let x = first_best(&net, &p).unwrap();
        let all: Vec<usize> = (0..7).collect();
        let r = verify_with_known_identities(x.as_slice(), &net, &p, &all, Mode::GroupTransfers, 4)
            .unwrap();
        assert!(r.passed());
        assert_eq!(r.examined.coalitions, 0);

        let none =
            verify_with_known_identities(x.as_slice(), &net, &p, &[], Mode::GroupTransfers, 4)
                .unwrap();
        let plain =
            crate::verify::verify_group_ic_transfers(x.as_slice(), &net, &p, 4, true).unwrap();
        assert_eq!(none, plain);
    }
}
