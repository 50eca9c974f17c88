//! Reproducible checks over the fixed example graphs. Each check states a
//! concrete claim about one graph and reports whether it holds.

use serde::Serialize;

use crate::classify::{classify, Family};
use crate::error::Result;
use crate::families::catalog;
use crate::mechanism::{
    equivalence_class, information_cell, verify_with_known_identities, KnowledgeLevel,
};
use crate::net::{auto_alpha, DirectedNetwork, ModelParams, AUTO_ALPHA_FACTOR};
use crate::solver::{first_best, katz_bonacich};
use crate::verify::{
    deviation_gains, verify_group_ic, verify_group_ic_transfers, Deviation, Mode, GAIN_EPS,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub claim: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, claim: &'static str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name,
        claim,
        passed,
        detail,
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() < tol
}

fn auto_params(net: &DirectedNetwork) -> ModelParams {
    let alpha = auto_alpha(net, AUTO_ALPHA_FACTOR).expect("catalog graphs have edges");
    ModelParams::new(1.0, alpha).expect("valid parameters")
}

/// Total gain of the three-agent deviation on the two 3-stars where the
/// leaf 2 and the second hub 3 exchange quantities and hub 1 keeps its own.
pub fn two_star_triple_gain(x: &[f64], params: &ModelParams) -> Result<f64> {
    let dev = Deviation::new(vec![0, 1, 2], vec![0, 2, 1])?;
    Ok(deviation_gains(x, &catalog::two_stars(), params, &dev)?
        .iter()
        .sum())
}

/// First grid point with a profitable triple deviation, when the contract is
/// the Katz-Bonacich vector of the unweighted graph.
pub fn two_star_flip_centrality(grid: &[f64]) -> Result<Vec<(f64, bool)>> {
    let net = catalog::two_stars();
    grid.iter()
        .map(|&alpha| {
            let params = ModelParams::new(1.0, alpha)?;
            let x = katz_bonacich(&net.matrix(), alpha)?;
            Ok((alpha, two_star_triple_gain(&x, &params)? > GAIN_EPS))
        })
        .collect()
}

/// Same sweep with the first-best contract.
pub fn two_star_flip_first_best(grid: &[f64]) -> Result<Vec<(f64, bool)>> {
    let net = catalog::two_stars();
    grid.iter()
        .map(|&alpha| {
            let params = ModelParams::new(1.0, alpha)?;
            let x = first_best(&net, &params)?;
            Ok((
                alpha,
                two_star_triple_gain(x.as_slice(), &params)? > GAIN_EPS,
            ))
        })
        .collect()
}

/// Grid points `start, start + step, ...` up to `end` inclusive.
pub fn grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    let count = ((end - start) / step).round() as usize;
    (0..=count).map(|k| start + step * k as f64).collect()
}

/// True when the sweep is unprofitable below `threshold` and profitable above.
pub fn flips_at(sweep: &[(f64, bool)], threshold: f64) -> bool {
    sweep
        .iter()
        .all(|&(a, profitable)| profitable == (a > threshold))
}

fn path_checks() -> Result<Vec<CheckResult>> {
    let g: Vec<DirectedNetwork> = catalog::PATH_PLACEMENTS
        .iter()
        .map(|&p| catalog::path_labeling(p))
        .collect();
    let truth = &g[0];
    let class = equivalence_class(truth)?;
    let mut out = vec![check(
        "path3-class",
        "the 3-agent path has 6 labeled relabelings, g1..g6",
        class.size() == 6 && g.iter().all(|m| class.contains(m)),
        format!("class size {}", class.size()),
    )];
    // agent -> expected cell {g1, g_k}
    let expected = [(0, 4), (1, 3), (2, 1)];
    let cells: Vec<_> = expected
        .iter()
        .map(|&(agent, _)| information_cell(truth, agent, KnowledgeLevel::LocationOnly))
        .collect::<Result<_>>()?;
    let cells_ok = expected.iter().zip(&cells).all(|(&(_, k), cell)| {
        cell.members.len() == 2 && cell.contains(truth) && cell.contains(&g[k])
    });
    out.push(check(
        "path3-cells",
        "location-only cells are {g1,g5}, {g1,g4}, {g1,g2} for agents 1, 2, 3",
        cells_ok,
        format!(
            "cell sizes {:?}",
            cells.iter().map(|c| c.members.len()).collect::<Vec<_>>()
        ),
    ));
    let pooled = (0..3).all(|a| {
        (a + 1..3).all(|b| {
            let common: Vec<_> = cells[a]
                .members
                .iter()
                .filter(|m| cells[b].contains(m))
                .collect();
            common.len() == 1 && common[0] == truth
        })
    });
    out.push(check(
        "path3-pooling",
        "any two agents' cells intersect exactly in the true network",
        pooled,
        String::new(),
    ));
    let with_neighbors = information_cell(truth, 0, KnowledgeLevel::LocationPlusInNeighbors)?;
    out.push(check(
        "path3-neighbor-cell",
        "agent 1 knowing its influencers has the singleton cell {g1}",
        with_neighbors.members == vec![truth.clone()],
        format!("{} members", with_neighbors.members.len()),
    ));
    Ok(out)
}

fn closed_form_checks() -> Result<Vec<CheckResult>> {
    let (a, alpha) = (1.0, 0.2);
    let x = first_best(
        &catalog::three_roots_one_follower(),
        &ModelParams::new(a, alpha)?,
    )?;
    let den = 1.0 - 3.0 * alpha * alpha;
    let (root, follower) = (a * (1.0 + alpha) / den, a * (1.0 + 3.0 * alpha) / den);
    let ok = (0..3).all(|i| close(x[i], root, 1e-9)) && close(x[3], follower, 1e-9);
    let mut out = vec![check(
        "three-roots-first-best",
        "a=1, alpha=0.2: roots get a(1+alpha)/(1-3alpha^2), the follower a(1+3alpha)/(1-3alpha^2)",
        ok,
        format!("x = {:?}", x.as_slice()),
    )];

    let (a, alpha) = (1.0, 0.15);
    let net = catalog::same_tier5();
    let params = ModelParams::new(a, alpha)?;
    let x = first_best(&net, &params)?;
    let den = 1.0 - 5.0 * alpha - 2.0 * alpha * alpha;
    let (upper, lower) = (a * (1.0 - alpha) / den, a * (1.0 + alpha) / den);
    let ok = (0..2).all(|i| close(x[i], upper, 1e-9)) && (2..5).all(|i| close(x[i], lower, 1e-9));
    out.push(check(
        "same-tier5-first-best",
        "a=1, alpha=0.15: agents 1,2 get a(1-alpha)/(1-5alpha-2alpha^2), agents 3-5 a(1+alpha)/(...)",
        ok,
        format!("x = {:?}", x.as_slice()),
    ));
    let root_pairs_ok = (2..5).all(|i| {
        deviation_gains(
            x.as_slice(),
            &net,
            &params,
            &Deviation::swap(0, i).expect("valid swap"),
        )
        .map(|g| g.iter().sum::<f64>() <= GAIN_EPS)
        .unwrap_or(false)
    });
    out.push(check(
        "same-tier5-root-pairs",
        "no swap between agent 1 and a bottom-tier agent raises the pair's total utility",
        root_pairs_ok,
        String::new(),
    ));
    Ok(out)
}

fn robustness_checks() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();

    let net = catalog::tree7();
    let params = auto_params(&net);
    let x = first_best(&net, &params)?;
    let gain: f64 = deviation_gains(x.as_slice(), &net, &params, &Deviation::swap(0, 4)?)?
        .iter()
        .sum();
    let adjacent = verify_group_ic_transfers(x.as_slice(), &net, &params, 6, true)?;
    out.push(check(
        "tree7-nonadjacent-pair",
        "the non-adjacent pair (1,5) gains alpha (x1 - x5) x2 > 0, adjacent coalitions gain nothing",
        gain > GAIN_EPS
            && close(gain, params.alpha * (x[0] - x[4]) * x[1], 1e-12)
            && adjacent.passed(),
        format!("gain {gain:.6e}, adjacent verdict {:?}", adjacent.verdict),
    ));

    let net = catalog::line5();
    let params = auto_params(&net);
    let x = first_best(&net, &params)?;
    let r = verify_group_ic_transfers(x.as_slice(), &net, &params, 5, true)?;
    out.push(check(
        "line5-pair",
        "on the 5-agent line the pair (3,4) profits from swapping with transfers",
        !r.passed() && r.has_coalition(&[2, 3]),
        format!("{} violations", r.violations.len()),
    ));

    let alphas = grid(0.30, 0.56, 0.02);
    let sweep = two_star_flip_centrality(&alphas)?;
    out.push(check(
        "two-stars-centrality-threshold",
        "with the unweighted centrality contract, hubs 1, 3 and leaf 2 profit iff alpha > 1/3",
        flips_at(&sweep, 1.0 / 3.0),
        format!("{sweep:?}"),
    ));
    let alphas = grid(0.10, 0.28, 0.02);
    let sweep = two_star_flip_first_best(&alphas)?;
    out.push(check(
        "two-stars-first-best-threshold",
        "with the first-best contract, the same triple profits iff alpha > 1/6",
        flips_at(&sweep, 1.0 / 6.0),
        format!("{sweep:?}"),
    ));
    let net = catalog::two_stars();
    let params = auto_params(&net);
    let x = first_best(&net, &params)?;
    let r = verify_group_ic_transfers(x.as_slice(), &net, &params, 6, true)?;
    out.push(check(
        "two-stars-adjacent",
        "adjacent coalitions cannot profit on the two stars",
        r.passed(),
        format!("{} coalitions examined", r.examined.coalitions),
    ));

    let net = catalog::partial7();
    let params = auto_params(&net);
    let x = first_best(&net, &params)?;
    let open = verify_group_ic_transfers(x.as_slice(), &net, &params, 6, true)?;
    let root_pair = open
        .violations
        .iter()
        .any(|v| v.coalition.len() == 2 && v.coalition[0] == 0 && v.coalition[1] >= 3);
    let known =
        verify_with_known_identities(x.as_slice(), &net, &params, &[0], Mode::GroupTransfers, 6)?;
    out.push(check(
        "partial7-known-root",
        "first best fails via a (root, tier-3) pair, but passes once the root's identity is known",
        root_pair && known.passed(),
        format!(
            "unknown: {} violations, known: {:?}",
            open.violations.len(),
            known.verdict
        ),
    ));
    let strict = verify_group_ic(x.as_slice(), &net, &params, 6, true)?;
    out.push(check(
        "partial7-strict",
        "no adjacent coalition makes every member strictly better off",
        strict.passed(),
        String::new(),
    ));

    let c = classify(&catalog::nested_figure());
    out.push(check(
        "nested9-classify",
        "the 9-agent three-tier figure is hierarchical with nested neighborhoods",
        c.labels == vec![Family::Hierarchical, Family::NestedNeighborhoods],
        format!("{:?}", c.labels),
    ));
    let c = classify(&catalog::tree7());
    out.push(check(
        "tree7-classify",
        "the 7-agent tree is a regular oriented tree with branching 3, 1",
        c.has(Family::RegularOrientedTree) && c.branching.as_deref() == Some(&[3, 1, 0][..]),
        format!("{:?}", c.labels),
    ));
    Ok(out)
}

/// Runs every catalog check.
pub fn run_catalog() -> Result<Vec<CheckResult>> {
    let mut out = path_checks()?;
    out.extend(closed_form_checks()?);
    out.extend(robustness_checks()?);
    Ok(out)
}
