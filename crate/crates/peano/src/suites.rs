//! Named property suites with per-property counts.

use std::sync::Arc;

use anyhow::{bail, Result};
use serde::Serialize;
use serde_json::{json, Value};

use peano_core::amalgamation::{decoy_instance, exhaustive_search, SearchBounds, Violation};
use peano_core::{
    are_equivalent, check_monotone_invariance, circle_reduce, close_walks_bound,
    conjugating_homeo, initial_segment_winding_via, is_generic, structure_of, BrickPartition,
    CircularReference, Graph, PLChain, SpaceModel, Walk,
};

use crate::config::RunConfig;
use crate::pipeline::{search_json, Pipeline};
use crate::sample;

pub const SUITES: [&str; 3] = ["winding-lemmas", "amalgamation-c4", "interval-chains"];

/// Instances per winding lemma.
pub const WINDING_INSTANCES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyCount {
    pub name: String,
    pub checks: usize,
    pub violations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<String>,
}

impl PropertyCount {
    fn new(name: &str) -> Self {
        PropertyCount {
            name: name.into(),
            checks: 0,
            violations: 0,
            first_violation: None,
        }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(detail());
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub config: RunConfig,
    pub properties: Vec<PropertyCount>,
    pub details: Value,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(|p| p.violations == 0)
    }

    pub fn total_checks(&self) -> usize {
        self.properties.iter().map(|p| p.checks).sum()
    }
}

pub fn run_suite(name: &str, cfg: &RunConfig) -> Result<SuiteReport> {
    let (properties, details) = match name {
        "winding-lemmas" => winding_lemmas(cfg.seed, WINDING_INSTANCES),
        "amalgamation-c4" => amalgamation_c4(cfg)?,
        "interval-chains" => interval_chains(cfg.seed),
        _ => bail!("unknown suite '{name}'; known suites: {}", SUITES.join(", ")),
    };
    Ok(SuiteReport {
        suite: name.into(),
        config: cfg.clone(),
        properties,
        details,
    })
}

/// The three winding lemmas on `instances` seeded instances each.
pub fn winding_lemmas(seed: u64, instances: usize) -> (Vec<PropertyCount>, Value) {
    let mut rng = sample::rng(seed);
    let mut inv = PropertyCount::new("monotone-invariance");
    let mut seg = PropertyCount::new("initial-segment");
    let mut close = PropertyCount::new("close-walks");
    for _ in 0..instances {
        let (c, w, v) = sample::invariance_instance(&mut rng);
        match check_monotone_invariance(&c, &w, &v) {
            Ok(verdict) => inv.record(verdict.holds(), || format!("{verdict:?} on {v:?}")),
            Err(e) => inv.record(false, || e.to_string()),
        }
        let (c, alpha, w, z) = sample::segment_instance(&mut rng);
        match initial_segment_winding_via(&c, &alpha, &w, &z) {
            Ok(verdict) => seg.record(verdict.holds(), || format!("{verdict:?} on {z:?}")),
            Err(e) => seg.record(false, || e.to_string()),
        }
        let (c, z, z2) = sample::close_instance(&mut rng);
        match close_walks_bound(&c, &z, &z2) {
            Ok(verdict) => close.record(verdict.holds(), || format!("{verdict:?}")),
            Err(e) => close.record(false, || e.to_string()),
        }
    }
    let mut sharp = PropertyCount::new("close-walks-sharpness");
    let probe = sharpness_probe(4, 4);
    sharp.record(probe.is_some(), || "no pair reaches a difference of 2".into());
    let details = json!({
        "instances_per_lemma": instances,
        "sharpness_probe": probe.map(|(z, z2, d)| json!({ "cycle": 4, "z": z, "z_prime": z2, "difference": d })),
    });
    (vec![inv, seg, close, sharp], details)
}

/// Searches all close pairs of walks with up to `max_len` entries on the
/// cycle `C_l` for one whose windings differ by 2.
pub fn sharpness_probe(l: usize, max_len: usize) -> Option<(Vec<usize>, Vec<usize>, i64)> {
    let host = Arc::new(Graph::cycle(l).ok()?);
    let lap: Vec<usize> = (0..l).collect();
    let c = CircularReference::from_lap(host.clone(), &lap).ok()?;
    fn extend(
        g: &Graph,
        c: &CircularReference,
        z: &mut Vec<usize>,
        z2: &mut Vec<usize>,
        left: usize,
    ) -> Option<(Vec<usize>, Vec<usize>, i64)> {
        if !z.is_empty() {
            let zw = Walk::plain(c.host().clone(), z.clone()).ok()?;
            let z2w = Walk::plain(c.host().clone(), z2.clone()).ok()?;
            if let Ok(v) = close_walks_bound(c, &zw, &z2w) {
                if v.difference().abs() == 2 {
                    return Some((z.clone(), z2.clone(), v.difference()));
                }
            }
        }
        if left == 0 {
            return None;
        }
        for a in 0..g.n() {
            if z.last().is_some_and(|&p| !g.adjacent(p, a)) {
                continue;
            }
            if z2.last().is_some_and(|&p| !g.adjacent(p, a)) {
                continue;
            }
            for b in 0..g.n() {
                if !g.adjacent(a, b) || z2.last().is_some_and(|&p| !g.adjacent(p, b)) {
                    continue;
                }
                z.push(a);
                z2.push(b);
                let found = extend(g, c, z, z2, left - 1);
                z.pop();
                z2.pop();
                if found.is_some() {
                    return found;
                }
            }
        }
        None
    }
    extend(&host, &c, &mut Vec::new(), &mut Vec::new(), max_len)
}

/// The robust pipeline and the bounded search on the `C4` band partition
/// of `torus_grid(12,4)`, plus the decoy pair that must admit a survivor.
pub fn amalgamation_c4(cfg: &RunConfig) -> Result<(Vec<PropertyCount>, Value)> {
    let s = BrickPartition::bands(SpaceModel::torus_grid(12, 4)?, 4)?;
    let p = Pipeline::build(&s, cfg.subdivision_budget)?;
    let bounds = cfg
        .search_bounds
        .map(|b| SearchBounds {
            z_vertex_bound: b.z_vertex_bound,
            z_length_bound: b.z_length_bound,
        })
        .unwrap_or_else(|| p.default_bounds());
    let report = exhaustive_search(&p.witness, &p.pair, bounds)?;

    let mut robust = PropertyCount::new("robust-winding-2l");
    let wind = p.witness.winding()?;
    let ell = p.witness.ell() as i64;
    robust.record(wind == 2 * ell, || format!("wind(u) = {wind}, expected {}", 2 * ell));
    let mut claims = PropertyCount::new("claim-bounds");
    claims.record(p.claims.holds(), || format!("{:?}", p.claims));
    let mut survivors = PropertyCount::new("zero-survivors");
    survivors.record(report.survivors.is_empty(), || {
        format!("{} survivors", report.survivors.len())
    });
    let mut named = PropertyCount::new("near-misses-refuted");
    for m in &report.near_misses {
        let r = &m.refutation;
        let step = match &r.violation {
            Violation::Chain(step) => Some(*step),
            Violation::Condition(_) => r.chain.as_ref().and_then(|t| t.first_violation()),
        };
        named.record(step.is_some(), || format!("{:?}: {}", m.kind, r.violation));
    }
    let mut closed = PropertyCount::new("automaton-closed");
    closed.record(report.automaton.closed, || "length bound cut the search".into());

    let dp = Arc::new(BrickPartition::bands(SpaceModel::cycle(12)?, 4)?);
    let dw = Walk::plain(dp.nerve().clone(), vec![0, 1, 2])?;
    let (ctx, decoy) = decoy_instance(dp, dw)?;
    let decoy_report = exhaustive_search(
        &ctx,
        &decoy,
        SearchBounds {
            z_vertex_bound: 6,
            z_length_bound: 6,
        },
    )?;
    let mut sanity = PropertyCount::new("decoy-has-survivor");
    sanity.record(!decoy_report.survivors.is_empty(), || {
        "decoy pair has no survivor".into()
    });
    let details = json!({
        "space": "torus_grid:12,4",
        "partition": "bands:4",
        "constants": {
            "N": p.pair.constants.n, "M_c": p.pair.constants.m_c,
            "M_v": p.pair.constants.m_v, "k": p.pair.constants.k,
        },
        "search": search_json(&report),
        "decoy_survivors": decoy_report.survivors.len(),
    });
    Ok((
        vec![robust, claims, survivors, named, closed, sanity],
        details,
    ))
}

/// Classification properties on seeded random chains.
pub fn interval_chains(seed: u64) -> (Vec<PropertyCount>, Value) {
    let mut rng = sample::rng(seed);
    let mut invariance = PropertyCount::new("structure-invariance");
    let mut conjugate = PropertyCount::new("conjugating-homeo-exact");
    let mut rotation = PropertyCount::new("circle-rotation-invariance");
    let mut generic = PropertyCount::new("symmetric-chain-generic");
    for _ in 0..1000 {
        let c = sample::random_chain(&mut rng);
        let h = sample::random_homeo(&mut rng);
        let moved = c.act(&h);
        invariance.record(
            structure_of(&moved) == structure_of(&c) && is_generic(&moved) == is_generic(&c),
            || format!("{c:?} under {h:?}"),
        );
    }
    for _ in 0..200 {
        let kinds = sample::random_kinds(&mut rng);
        let c1 = sample::chain_with_kinds(&mut rng, &kinds);
        let c2 = sample::chain_with_kinds(&mut rng, &kinds);
        let ok = are_equivalent(&c1, &c2)
            && conjugating_homeo(&c1, &c2).is_ok_and(|h| c1.act(&h) == c2);
        conjugate.record(ok, || format!("{c1:?} vs {c2:?}"));
        let cc = sample::random_circle_chain(&mut rng);
        let theta = sample::random_rotation(&mut rng);
        rotation.record(circle_reduce(&cc.rotate(&theta)) == circle_reduce(&cc), || {
            format!("{cc:?} rotated by {theta}")
        });
    }
    generic.record(is_generic(&PLChain::symmetric()), || "symmetric chain".into());
    (
        vec![invariance, conjugate, rotation, generic],
        json!({ "seed": seed }),
    )
}
