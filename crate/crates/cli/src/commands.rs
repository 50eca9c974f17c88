use std::error::Error as StdError;
use std::fs;

use netcontract::checks::run_catalog;
use netcontract::classify::{classify, pooling_pattern};
use netcontract::families::{catalog, FamilyKind};
use netcontract::io::{one_indexed, parse_graph, report_json, sig12, sig12_vec, violation_json};
use netcontract::mechanism::{
    architecture, audit_neighbor_mechanism, automorphism_count, menu_game, NeighborStrategy,
};
use netcontract::net::{network_lambda, AUTO_ALPHA_FACTOR};
use netcontract::search::{search_family, SearchConfig};
use netcontract::solver::{
    constrained_first_best, first_best, price_schedule, utilities, welfare, EqualityClasses,
};
use netcontract::verify::{default_max_size, verify, Mode, VerifyOptions};
use netcontract::{DirectedNetwork, ModelParams};
use serde_json::{json, Value};

use crate::args::{
    Command, ConstrainedArgs, MechanismArgs, ModeArg, ParamArgs, SearchArgs, SolveArgs, Source,
    StrategyArg, VerifyArgs,
};
use crate::table::{agents, kv, num, Table};

type CmdResult<T> = Result<T, Box<dyn StdError>>;

pub struct Output {
    pub json: Value,
    pub table: String,
    pub exit: u8,
}

pub fn run(cmd: &Command) -> CmdResult<Output> {
    match cmd {
        Command::Solve(a) => solve(a),
        Command::Classify(a) => classify_cmd(&a.source),
        Command::Verify(a) => verify_cmd(a),
        Command::Constrained(a) => constrained(a),
        Command::Search(a) => search(a),
        Command::Mechanism(a) => mechanism(a),
        Command::Examples => examples(),
    }
}

fn load(source: &Source) -> CmdResult<DirectedNetwork> {
    if let Some(path) = &source.graph {
        let text =
            fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        return Ok(parse_graph(&text)?);
    }
    let name = source.catalog.as_deref().expect("clap enforces one source");
    catalog::by_name(name).ok_or_else(|| {
        format!(
            "unknown catalog graph {name:?}; known: {}",
            catalog::NAMES.join(", ")
        )
        .into()
    })
}

struct Resolved {
    params: ModelParams,
    json: Value,
}

fn resolve_params(net: &DirectedNetwork, p: &ParamArgs) -> CmdResult<Resolved> {
    let lambda = network_lambda(net);
    let (alpha, factor) = match p.alpha {
        Some(alpha) => (alpha, None),
        None => {
            let factor = p.alpha_factor.unwrap_or(AUTO_ALPHA_FACTOR);
            if !(factor > 0.0 && factor < 1.0) {
                return Err(format!("--alpha-factor must lie in (0, 1), got {factor}").into());
            }
            let alpha = if lambda > 0.0 { factor / lambda } else { 0.0 };
            (alpha, Some(factor))
        }
    };
    let params = ModelParams::with_cost(p.a, alpha, p.c)?;
    let json = json!({
        "a": sig12(params.a),
        "alpha": sig12(params.alpha),
        "alpha_factor": factor,
        "lambda": sig12(lambda),
        "c": params.c.map(sig12),
    });
    Ok(Resolved { params, json })
}

fn params_rows(r: &Resolved) -> Vec<(&'static str, String)> {
    let mut rows = vec![
        ("a", num(r.params.a)),
        ("alpha", num(r.params.alpha)),
        ("lambda", num(r.json["lambda"].as_f64().unwrap_or(0.0))),
    ];
    if let Some(c) = r.params.c {
        rows.push(("c", num(c)));
    }
    rows
}

fn solve(a: &SolveArgs) -> CmdResult<Output> {
    let net = load(&a.source)?;
    let r = resolve_params(&net, &a.params)?;
    let x = first_best(&net, &r.params)?;
    let u = utilities(x.as_slice(), &net, &r.params)?;
    let w = welfare(x.as_slice(), &net, &r.params)?;
    let mut out = json!({
        "n": net.n(),
        "params": r.json,
        "x": sig12_vec(x.as_slice()),
        "utilities": sig12_vec(&u),
        "welfare": sig12(w),
    });
    let prices = match r.params.c {
        Some(_) => Some(price_schedule(x.as_slice(), &net, &r.params)?),
        None => None,
    };
    if let Some(ps) = &prices {
        out["prices"] = json!(sig12_vec(&ps.prices));
        out["profit"] = json!(sig12(ps.profit));
    }

    let mut t = Table::new(&["agent", "x", "utility", "price"]);
    for i in 0..net.n() {
        let price = prices
            .as_ref()
            .map_or(String::new(), |ps| num(ps.prices[i]));
        t.row(&[(i + 1).to_string(), num(x[i]), num(u[i]), price]);
    }
    let mut rows = params_rows(&r);
    rows.push(("welfare", num(w)));
    if let Some(ps) = &prices {
        rows.push(("profit", num(ps.profit)));
    }
    Ok(Output {
        json: out,
        table: format!("{}\n{}", kv(&rows), t.render()),
        exit: 0,
    })
}

fn classify_cmd(source: &Source) -> CmdResult<Output> {
    let net = load(source)?;
    let c = classify(&net);
    let tiers: Option<Vec<Vec<usize>>> = c
        .tiers
        .as_ref()
        .map(|tp| tp.tiers().iter().map(|t| one_indexed(t)).collect());
    let json = json!({
        "n": net.n(),
        "labels": c.labels,
        "tiers": tiers,
        "branching": c.branching,
    });
    let labels: Vec<String> = c
        .labels
        .iter()
        .map(|l| {
            serde_json::to_value(l)
                .unwrap()
                .as_str()
                .unwrap_or_default()
                .to_string()
        })
        .collect();
    let mut rows = vec![
        ("n", net.n().to_string()),
        (
            "labels",
            if labels.is_empty() {
                "none".into()
            } else {
                labels.join(", ")
            },
        ),
    ];
    if let Some(tp) = &c.tiers {
        let parts: Vec<String> = tp.tiers().iter().map(|t| agents(t)).collect();
        rows.push(("tiers", parts.join(" ")));
    }
    if let Some(b) = &c.branching {
        rows.push(("branching", format!("{b:?}")));
    }
    Ok(Output {
        json,
        table: kv(&rows),
        exit: 0,
    })
}

fn mode_of(m: ModeArg) -> Mode {
    match m {
        ModeArg::Ic => Mode::Ic,
        ModeArg::Group => Mode::Group,
        ModeArg::GroupTransfers => Mode::GroupTransfers,
    }
}

fn zero_indexed(v: &[usize], n: usize, what: &str) -> CmdResult<Vec<usize>> {
    v.iter()
        .map(|&a| {
            if a == 0 || a > n {
                Err(format!("{what} {a} out of range 1..={n}").into())
            } else {
                Ok(a - 1)
            }
        })
        .collect()
}

fn verify_cmd(a: &VerifyArgs) -> CmdResult<Output> {
    let net = load(&a.source)?;
    let r = resolve_params(&net, &a.params)?;
    let x = match &a.x {
        Some(v) => v.clone(),
        None => first_best(&net, &r.params)?.into_inner(),
    };
    let opts = VerifyOptions {
        max_size: a.max_size.unwrap_or_else(|| default_max_size(net.n())),
        adjacency_required: !a.any_coalition,
        excluded: zero_indexed(&a.known, net.n(), "known agent")?,
    };
    let report = verify(&x, &net, &r.params, mode_of(a.mode), &opts)?;
    let mut json = report_json(&report);
    json["params"] = r.json.clone();
    json["x"] = json!(sig12_vec(&x));
    json["known"] = json!(a.known);

    let mut rows = params_rows(&r);
    rows.extend([
        ("mode", report.mode.name().to_string()),
        ("adjacency", report.adjacency.to_string()),
        ("max size", report.max_size.to_string()),
        ("coalitions", report.examined.coalitions.to_string()),
        ("permutations", report.examined.permutations.to_string()),
        (
            "verdict",
            if report.passed() {
                "pass".into()
            } else {
                "fail".into()
            },
        ),
    ]);
    let mut table = kv(&rows);
    if !report.passed() {
        let mut t = Table::new(&["coalition", "announces", "gains", "total"]);
        for v in &report.violations {
            let gains: Vec<String> = v.gains.iter().map(|&g| num(g)).collect();
            t.row(&[
                agents(&v.coalition),
                agents(&v.permutation),
                gains.join(" "),
                num(v.total),
            ]);
        }
        table = format!("{table}\n{}", t.render());
    }
    Ok(Output {
        json,
        table,
        exit: if report.passed() { 0 } else { 1 },
    })
}

/// `1,4,5;2;3` with 1-indexed agents; agents left out become singletons.
fn parse_classes(pattern: &str, n: usize) -> CmdResult<EqualityClasses> {
    let mut classes = Vec::new();
    for group in pattern.split(';').map(str::trim).filter(|g| !g.is_empty()) {
        let members: Vec<usize> = group
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|e| format!("bad agent {s:?} in --classes: {e}"))
            })
            .collect::<Result<_, _>>()?;
        classes.push(zero_indexed(&members, n, "class member")?);
    }
    let listed: Vec<usize> = classes.iter().flatten().copied().collect();
    classes.extend((0..n).filter(|a| !listed.contains(a)).map(|a| vec![a]));
    Ok(EqualityClasses::new(n, classes)?)
}

fn constrained(a: &ConstrainedArgs) -> CmdResult<Output> {
    let net = load(&a.source)?;
    let r = resolve_params(&net, &a.params)?;
    let classes = match &a.classes {
        Some(pattern) => parse_classes(pattern, net.n())?,
        None => pooling_pattern(&net)?,
    };
    let x = constrained_first_best(&net, &r.params, &classes)?;
    let w = welfare(x.as_slice(), &net, &r.params)?;
    let best = first_best(&net, &r.params)
        .ok()
        .map(|fb| welfare(fb.as_slice(), &net, &r.params))
        .transpose()?;
    let classes_json: Vec<Vec<usize>> = classes.classes().iter().map(|c| one_indexed(c)).collect();
    let json = json!({
        "n": net.n(),
        "params": r.json,
        "classes": classes_json,
        "x": sig12_vec(x.as_slice()),
        "welfare": sig12(w),
        "first_best_welfare": best.map(sig12),
    });
    let mut rows = params_rows(&r);
    rows.push(("welfare", num(w)));
    if let Some(b) = best {
        rows.push(("first-best welfare", num(b)));
    }
    let mut t = Table::new(&["class", "x"]);
    for c in classes.classes() {
        t.row(&[agents(c), num(x[c[0]])]);
    }
    Ok(Output {
        json,
        table: format!("{}\n{}", kv(&rows), t.render()),
        exit: 0,
    })
}

fn search(a: &SearchArgs) -> CmdResult<Output> {
    let family = FamilyKind::parse(&a.family).ok_or_else(|| {
        format!(
            "unknown family {:?}; known: digraph, undirected, hierarchy, single-root, nested, tree",
            a.family
        )
    })?;
    if let Some(bad) = a.alpha_factors.iter().find(|f| !(**f > 0.0 && **f < 1.0)) {
        return Err(format!("alpha factors must lie in (0, 1), got {bad}").into());
    }
    let config = SearchConfig {
        count: a.count,
        alpha_factors: a.alpha_factors.clone(),
        modes: a.modes.iter().map(|&m| mode_of(m)).collect(),
        adjacency: if a.any_coalition {
            vec![true, false]
        } else {
            vec![true]
        },
        max_size: a.max_size,
        a: a.a,
        seed: a.seed,
    };
    let cat = search_family(family, a.n_max, &config)?;
    let instances: Vec<Value> = cat
        .instances
        .iter()
        .map(|inst| {
            json!({
                "n": inst.n,
                "edges": inst.edges.iter().map(|&(i, j)| [i + 1, j + 1]).collect::<Vec<_>>(),
                "lambda": sig12(inst.lambda),
            })
        })
        .collect();
    let findings: Vec<Value> = cat
        .findings
        .iter()
        .map(|f| {
            json!({
                "instance": f.instance,
                "alpha": sig12(f.alpha),
                "mode": f.mode,
                "adjacency": f.adjacency,
                "violations": f.violations.iter().map(violation_json).collect::<Vec<_>>(),
            })
        })
        .collect();
    let json = json!({
        "family": family,
        "seed": a.seed,
        "instances": instances,
        "skipped": cat.skipped,
        "findings": findings,
    });
    let mut t = Table::new(&[
        "instance",
        "n",
        "alpha",
        "mode",
        "adjacent",
        "smallest coalition",
    ]);
    for f in &cat.findings {
        t.row(&[
            f.instance.to_string(),
            cat.instances[f.instance].n.to_string(),
            num(f.alpha),
            f.mode.name().to_string(),
            f.adjacency.to_string(),
            agents(&f.violations[0].coalition),
        ]);
    }
    let rows = [
        ("instances", cat.instances.len().to_string()),
        ("skipped", cat.skipped.len().to_string()),
        ("findings", cat.findings.len().to_string()),
    ];
    Ok(Output {
        json,
        table: format!("{}\n{}", kv(&rows), t.render()),
        exit: if cat.findings.is_empty() { 0 } else { 1 },
    })
}

fn mechanism(a: &MechanismArgs) -> CmdResult<Output> {
    let net = load(&a.source)?;
    let r = resolve_params(&net, &a.params)?;
    let arch = architecture(&net)?;
    let automorphisms = automorphism_count(&net)?;
    let menu = first_best(&arch.representative, &r.params)?;
    let strategy = match a.strategy {
        StrategyArg::Truthful => NeighborStrategy::Truthful,
        StrategyArg::RoleConsistent => NeighborStrategy::RoleConsistent,
    };
    let max_size = a.max_size.unwrap_or_else(|| default_max_size(net.n()));
    let audit = audit_neighbor_mechanism(&net, &r.params, max_size, strategy)?;
    let rep_edges: Vec<[usize; 2]> = arch
        .representative
        .edges()
        .into_iter()
        .map(|(i, j)| [i + 1, j + 1])
        .collect();
    let max_gain = if audit.consistent > 0 {
        Some(sig12(audit.max_consistent_gain))
    } else {
        None
    };
    let mut json = json!({
        "n": net.n(),
        "params": r.json,
        "representative": {"n": net.n(), "edges": rep_edges},
        "locations": one_indexed(arch.labeling.locations()),
        "automorphisms": automorphisms,
        "menu": sig12_vec(menu.as_slice()),
        "audit": {
            "strategy": audit.strategy,
            "max_size": max_size,
            "deviations": audit.deviations,
            "consistent": audit.consistent,
            "max_consistent_gain": max_gain,
            "profitable_consistent": audit.profitable_consistent,
            "allocation_changing_consistent": audit.allocation_changing_consistent,
            "verdict": if audit.passed() { "pass" } else { "fail" },
        },
    });
    let mut rows = params_rows(&r);
    rows.extend([
        (
            "locations",
            format!("{:?}", one_indexed(arch.labeling.locations())),
        ),
        ("automorphisms", automorphisms.to_string()),
        ("deviations", audit.deviations.to_string()),
        ("consistent", audit.consistent.to_string()),
        ("profitable", audit.profitable_consistent.to_string()),
        (
            "verdict",
            if audit.passed() {
                "pass".into()
            } else {
                "fail".into()
            },
        ),
    ]);
    if let Some(ann) = &a.announce {
        if ann.len() != net.n() {
            return Err(
                format!("--announce needs {} locations, got {}", net.n(), ann.len()).into(),
            );
        }
        let ann = zero_indexed(ann, net.n(), "location")?;
        let payoffs = menu_game(menu.as_slice(), &ann, &net, &r.params)?;
        json["menu_game"] = json!({
            "announcements": one_indexed(&ann),
            "payoffs": sig12_vec(&payoffs),
        });
        let shown: Vec<String> = payoffs.iter().map(|&p| num(p)).collect();
        rows.push(("menu payoffs", shown.join(" ")));
    }
    Ok(Output {
        json,
        table: kv(&rows),
        exit: if audit.passed() { 0 } else { 1 },
    })
}

fn examples() -> CmdResult<Output> {
    let results = run_catalog()?;
    let all = results.iter().all(|c| c.passed);
    let mut t = Table::new(&["check", "result", "claim"]);
    for c in &results {
        t.row(&[c.name, if c.passed { "pass" } else { "FAIL" }, c.claim]);
    }
    Ok(Output {
        json: json!({
            "passed": all,
            "checks": results,
        }),
        table: t.render(),
        exit: if all { 0 } else { 1 },
    })
}
