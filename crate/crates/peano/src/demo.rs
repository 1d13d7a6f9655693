//! End-to-end scenarios that emit every intermediate object.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use num_rational::BigRational;
use serde_json::{json, Value};

use peano_core::amalgamation::{exhaustive_search, SearchBounds};
use peano_core::calculus::covering_from_cycle_partition;
use peano_core::{
    are_equivalent, circle_reduce, conjugating_homeo, is_generic, structure_of, BrickPartition,
    CircleChain, PLChain, SpaceModel,
};

use crate::config::RunConfig;
use crate::io::{chain_json, circle_chain_json, covering_json, graph_dot, homeo_json, partition_json};
use crate::pipeline::{search_json, Pipeline};

pub const SCENARIOS: [&str; 3] = ["torus-robust", "cycle-robust", "interval-classify"];

#[derive(Debug, Clone)]
pub struct DemoOutput {
    pub json: Value,
    /// DOT rendering of the nerves at each stage, when the scenario has any.
    pub dot: Option<String>,
    /// False when a stage of the scenario could not be built.
    pub complete: bool,
}

pub fn demo(scenario: &str, cfg: &RunConfig) -> Result<DemoOutput> {
    match scenario {
        "torus-robust" => torus_robust(cfg),
        "cycle-robust" => cycle_robust(cfg),
        "interval-classify" => Ok(interval_classify()),
        _ => bail!(
            "unknown scenario '{scenario}'; known scenarios: {}",
            SCENARIOS.join(", ")
        ),
    }
}

fn bounds_for(cfg: &RunConfig, p: &Pipeline) -> SearchBounds {
    cfg.search_bounds
        .map(|b| SearchBounds {
            z_vertex_bound: b.z_vertex_bound,
            z_length_bound: b.z_length_bound,
        })
        .unwrap_or_else(|| p.default_bounds())
}

fn torus_robust(cfg: &RunConfig) -> Result<DemoOutput> {
    let s = BrickPartition::bands(SpaceModel::torus_grid(12, 4)?, 4)?;
    let p = Pipeline::build(&s, cfg.subdivision_budget)?;
    let report = exhaustive_search(&p.witness, &p.pair, bounds_for(cfg, &p))?;
    let mut dot = String::new();
    for (name, part) in [
        ("S", &p.witness.s_partition),
        ("U", &p.witness.u_pair.partition),
        ("V", &p.lasso.partition),
        ("W", &p.pair.w_partition),
    ] {
        writeln!(dot, "// nerve of {name}, level {}", part.space().level()).expect("string write");
        dot.push_str(&graph_dot(name, part.nerve()));
    }
    let mut out = p.json()?;
    out["scenario"] = json!("torus-robust");
    out["search"] = search_json(&report);
    Ok(DemoOutput {
        json: out,
        dot: Some(dot),
        complete: true,
    })
}

fn cycle_robust(cfg: &RunConfig) -> Result<DemoOutput> {
    let s = BrickPartition::bands(SpaceModel::cycle(12)?, 4)?;
    let mut out = json!({ "scenario": "cycle-robust", "s_input": partition_json(&s) });
    let mut dot = graph_dot("S", s.nerve());
    match covering_from_cycle_partition(&s, cfg.subdivision_budget) {
        Ok(c) => out["covering"] = covering_json(&c),
        Err(e) => {
            out["error"] = json!(format!("covering: {e}"));
            return Ok(DemoOutput {
                json: out,
                dot: Some(dot),
                complete: false,
            });
        }
    }
    let complete = match Pipeline::build(&s, cfg.subdivision_budget) {
        Ok(p) => {
            let report = exhaustive_search(&p.witness, &p.pair, bounds_for(cfg, &p))?;
            for (name, part) in [
                ("U", &p.witness.u_pair.partition),
                ("V", &p.lasso.partition),
                ("W", &p.pair.w_partition),
            ] {
                dot.push_str(&graph_dot(name, part.nerve()));
            }
            let mut full = p.json()?;
            full["search"] = search_json(&report);
            out["pipeline"] = full;
            true
        }
        Err(e) => {
            out["error"] = json!(format!("{e:#}"));
            false
        }
    };
    Ok(DemoOutput {
        json: out,
        dot: Some(dot),
        complete,
    })
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// The bundled sample chains: name and chain.
pub fn sample_chains() -> Vec<(&'static str, PLChain)> {
    let chain = |pts: &[(i64, i64, i64, i64)]| {
        PLChain::new(pts.iter().map(|&(a, b, c, d)| (q(a, b), q(c, d))).collect())
            .expect("sample chains are valid")
    };
    let circle = |root: (i64, i64), growth: &[(i64, i64, i64, i64)]| {
        let g = growth.iter().map(|&(a, b, c, d)| (q(a, b), q(c, d))).collect();
        circle_reduce(&CircleChain::new(q(root.0, root.1), g).expect("sample circle chains are valid"))
    };
    vec![
        ("symmetric", PLChain::symmetric()),
        ("off-center", chain(&[(1, 5, 1, 5), (0, 1, 1, 1)])),
        ("bent", chain(&[(1, 2, 1, 2), (1, 3, 3, 4), (0, 1, 1, 1)])),
        ("staircase", chain(&[(1, 2, 1, 2), (1, 2, 3, 4), (1, 4, 3, 4), (0, 1, 1, 1)])),
        ("mirrored-staircase", chain(&[(1, 3, 1, 3), (1, 3, 1, 2), (1, 5, 1, 2), (0, 1, 1, 1)])),
        ("left-first", chain(&[(1, 2, 1, 2), (1, 4, 1, 2), (1, 4, 3, 4), (0, 1, 1, 1)])),
        ("from-zero", chain(&[(0, 1, 0, 1), (0, 1, 1, 1)])),
        ("circle-even", circle((1, 3), &[(0, 1, 0, 1), (1, 2, 1, 2)])),
        ("circle-stall", circle((0, 1), &[(0, 1, 0, 1), (0, 1, 1, 4), (1, 2, 1, 2)])),
    ]
}

fn interval_classify() -> DemoOutput {
    let samples = sample_chains();
    let chains: Vec<Value> = samples
        .iter()
        .map(|(name, c)| {
            json!({
                "name": name,
                "chain": chain_json(c),
                "structure": structure_of(c).to_string(),
                "generic": is_generic(c),
            })
        })
        .collect();
    let matrix: Vec<Vec<bool>> = samples
        .iter()
        .map(|(_, a)| samples.iter().map(|(_, b)| are_equivalent(a, b)).collect())
        .collect();
    let mut conjugations = Vec::new();
    for (i, (na, a)) in samples.iter().enumerate() {
        for (nb, b) in &samples[i + 1..] {
            if let Ok(h) = conjugating_homeo(a, b) {
                conjugations.push(json!({ "from": na, "to": nb, "homeomorphism": homeo_json(&h) }));
            }
        }
    }
    let even = CircleChain::new(q(1, 3), vec![(q(0, 1), q(0, 1)), (q(1, 2), q(1, 2))])
        .expect("valid circle chain");
    DemoOutput {
        json: json!({
            "scenario": "interval-classify",
            "chains": chains,
            "names": samples.iter().map(|(n, _)| *n).collect::<Vec<_>>(),
            "equivalence": matrix,
            "conjugations": conjugations,
            "circle_example": circle_chain_json(&even),
        }),
        dot: None,
        complete: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_matrix_groups_by_structure() {
        let out = demo("interval-classify", &RunConfig::default()).unwrap();
        let names: Vec<String> = serde_json::from_value(out.json["names"].clone()).unwrap();
        let m: Vec<Vec<bool>> = serde_json::from_value(out.json["equivalence"].clone()).unwrap();
        let at = |n: &str| names.iter().position(|x| x == n).unwrap();
        assert!(m[at("symmetric")][at("bent")]);
        assert!(m[at("symmetric")][at("circle-even")]);
        assert!(m[at("staircase")][at("mirrored-staircase")]);
        assert!(!m[at("staircase")][at("left-first")]);
        assert!(!m[at("symmetric")][at("circle-stall")]);
        assert!(out.complete);
    }

    #[test]
    fn unknown_scenario_is_an_error() {
        assert!(demo("sphere", &RunConfig::default()).is_err());
    }
}
