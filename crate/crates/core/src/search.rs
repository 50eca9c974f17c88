//! Sweeps over generated network families looking for profitable deviations
//! against the first-best contract.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::families::FamilyKind;
use crate::net::{network_lambda, DirectedNetwork, ModelParams};
use crate::solver::first_best;
use crate::verify::{verify, Mode, VerifyOptions, Violation};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub instance: usize,
    pub alpha: f64,
    pub mode: Mode,
    pub adjacency: bool,
    /// Violations of the smallest violating coalition size.
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchInstance {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchCatalog {
    pub instances: Vec<SearchInstance>,
    /// Instances without edges; no externality strength can be derived for them.
    pub skipped: Vec<usize>,
    pub findings: Vec<Finding>,
}

impl SearchCatalog {
    pub fn findings_for(&self, mode: Mode, adjacency: bool) -> impl Iterator<Item = &Finding> {
        self.findings
            .iter()
            .filter(move |f| f.mode == mode && f.adjacency == adjacency)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub count: usize,
    /// Externality strengths as fractions of `1 / lambda`, each in (0, 1).
    pub alpha_factors: Vec<f64>,
    pub modes: Vec<Mode>,
    pub adjacency: Vec<bool>,
    pub max_size: usize,
    pub a: f64,
    pub seed: u64,
}

/// Runs every generated instance at every grid point, in every mode and
/// adjacency setting. Deterministic for a fixed seed.
pub fn search_counterexample<G>(mut generator: G, config: &SearchConfig) -> Result<SearchCatalog>
where
    G: FnMut(&mut ChaCha8Rng) -> Result<DirectedNetwork>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut catalog = SearchCatalog {
        instances: Vec::new(),
        skipped: Vec::new(),
        findings: Vec::new(),
    };
    for idx in 0..config.count {
        let net = generator(&mut rng)?;
        let lambda = network_lambda(&net);
        catalog.instances.push(SearchInstance {
            n: net.n(),
            edges: net.edges(),
            lambda,
        });
        if lambda == 0.0 {
            catalog.skipped.push(idx);
            continue;
        }
        for &factor in &config.alpha_factors {
            let params = ModelParams::new(config.a, factor / lambda)?;
            let x = first_best(&net, &params)?;
            for &mode in &config.modes {
                for &adjacency in &config.adjacency {
                    let opts = VerifyOptions::new(config.max_size.min(net.n()), adjacency);
                    let report = verify(x.as_slice(), &net, &params, mode, &opts)?;
                    let Some(smallest) = report.violations.first().map(|v| v.coalition.len())
                    else {
                        continue;
                    };
                    catalog.findings.push(Finding {
                        instance: idx,
                        alpha: params.alpha,
                        mode,
                        adjacency,
                        violations: report
                            .violations
                            .into_iter()
                            .take_while(|v| v.coalition.len() == smallest)
                            .collect(),
                    });
                }
            }
        }
    }
    Ok(catalog)
}

/// Search over one of the built-in families.
pub fn search_family(
    family: FamilyKind,
    n_max: usize,
    config: &SearchConfig,
) -> Result<SearchCatalog> {
    search_counterexample(|rng| Ok(family.generate(rng, n_max)), config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify;

    fn config(count: usize) -> SearchConfig {
        SearchConfig {
            count,
            alpha_factors: vec![0.5, 0.8],
            modes: vec![Mode::Group, Mode::GroupTransfers],
            adjacency: vec![true, false],
            max_size: 4,
            a: 1.0,
            seed: 11,
        }
    }

    #[test]
    fn undirected_adjacent_has_no_findings() {
        let cat = search_family(FamilyKind::Undirected, 8, &config(15)).unwrap();
        assert_eq!(cat.findings_for(Mode::GroupTransfers, true).count(), 0);
        assert_eq!(cat.findings_for(Mode::Group, true).count(), 0);
    }

    #[test]
    fn hierarchy_strict_has_no_findings() {
        let cat = search_family(FamilyKind::Hierarchy, 8, &config(15)).unwrap();
        assert_eq!(cat.findings_for(Mode::Group, true).count(), 0);
    }

    #[test]
    fn nested_transfer_findings_hit_roots() {
        let cat = search_family(FamilyKind::Nested, 10, &config(10)).unwrap();
        for (idx, inst) in cat.instances.iter().enumerate() {
            let net = DirectedNetwork::from_edges(inst.n, &inst.edges).unwrap();
            let tiers = classify(&net).tiers.unwrap();
            let x = first_best(&net, &ModelParams::new(1.0, 0.5 / inst.lambda).unwrap()).unwrap();
            let spread = x.as_slice().iter().cloned().fold(f64::MIN, f64::max)
                - x.as_slice().iter().cloned().fold(f64::MAX, f64::min);
            if spread < 1e-9 {
                continue;
            }
            let hit = cat.findings_for(Mode::GroupTransfers, true).any(|f| {
                f.instance == idx
                    && f.violations.iter().any(|v| {
                        v.coalition.len() == 2
                            && v.coalition
                                .iter()
                                .filter(|&&a| tiers.tier_of(a) == 0)
                                .count()
                                == 1
                    })
            });
            assert!(hit, "instance {idx} has no root pair violation");
        }
    }

    #[test]
    fn deterministic_for_seed() {
        let a = search_family(FamilyKind::Digraph, 6, &config(5)).unwrap();
        let b = search_family(FamilyKind::Digraph, 6, &config(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn generator_errors_propagate() {
        let err = search_counterexample(|_| DirectedNetwork::empty(0), &config(1));
        assert!(err.is_err());
    }
}
