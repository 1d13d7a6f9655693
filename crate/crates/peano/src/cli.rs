//! Command line verbs and their dispatch.

use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use peano_core::amalgamation::{
    exhaustive_search, identity_candidate, refute_candidate, AmalgamationCandidate,
    AmalgamationError, SearchBounds,
};
use peano_core::calculus::{
    check_core_clauses, core_refinement, covering_from_cycle_partition,
    cycle_partition_from_covering, path_doubling, space_out, upgrade_to_path,
};
use peano_core::{
    are_equivalent, conjugating_homeo, decompose, is_generic, structure_of, BrickPartition, Graph,
    GraphMap, Walk,
};

use crate::config::{OutputFormat, RunConfig};
use crate::io::{
    chain_json, covering_json, graph_dot, homeo_json, make_walk, parse_chain, parse_covering,
    parse_list, parse_partition, parse_space, partition_json, rational_json, read_json, walk_json,
    ChainFile,
};
use crate::pipeline::{refutation_json, robust_stage, search_json, witness_json, Pipeline};
use crate::{demo, suites};

#[derive(Debug, Parser)]
#[command(name = "peano", version, about = "Walks, winding numbers, brick partitions and chain classification")]
pub struct Cli {
    /// JSON file with a run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for the randomized suites (overrides the config file).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Extra subdivision levels allowed (overrides the config file).
    #[arg(long, global = true)]
    pub budget: Option<u32>,
    /// Output format (overrides the config file).
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a named property suite.
    Suite { name: String },
    /// Emit every object of a scenario.
    Demo { scenario: String },
    /// Refinement procedures on brick partitions.
    #[command(subcommand)]
    Calculus(CalculusVerb),
    /// Robust cycles, irreconcilable pairs and the amalgamation search.
    #[command(subcommand)]
    Amalgamation(AmalgamationVerb),
    /// Piecewise-linear chains on the interval and the circle.
    #[command(subcommand)]
    Chain(ChainVerb),
}

#[derive(Debug, Args)]
pub struct WalkArgs {
    /// Space as family:params[@level], e.g. torus_grid:12,4.
    #[arg(long)]
    pub space: String,
    /// Partition as bands:k, boxes:side[,shift], trivial or discrete.
    #[arg(long)]
    pub partition: String,
    /// Comma separated block indices.
    #[arg(long)]
    pub walk: String,
    #[arg(long)]
    pub circular: bool,
    /// Split index of a lasso walk.
    #[arg(long)]
    pub lasso: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum CalculusVerb {
    DoublePath(WalkArgs),
    SpaceOut(WalkArgs),
    Upgrade(WalkArgs),
    CoreRefine {
        #[arg(long)]
        space: String,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
    },
    #[command(name = "cycle2cover")]
    CycleToCover {
        #[arg(long)]
        space: String,
        #[arg(long)]
        partition: String,
    },
    #[command(name = "cover2cycle")]
    CoverToCycle {
        /// Covering file as written by cycle2cover.
        #[arg(long)]
        covering: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct CyclePartitionArgs {
    #[arg(long, default_value = "torus_grid:12,4")]
    pub space: String,
    /// A partition whose nerve is a cycle of length at least 4.
    #[arg(long, default_value = "bands:4")]
    pub partition: String,
}

#[derive(Debug, Subcommand)]
pub enum AmalgamationVerb {
    Robust(CyclePartitionArgs),
    Irreconcilable(CyclePartitionArgs),
    Refute {
        #[command(flatten)]
        input: CyclePartitionArgs,
        /// Candidate file, or identity:0 / identity:1.
        #[arg(long)]
        candidate: String,
    },
    Search {
        #[command(flatten)]
        input: CyclePartitionArgs,
        /// Vertex bound for Z (default |W| + 2).
        #[arg(long)]
        zmax: Option<usize>,
        /// Length bound for z (default 2·len(w₀)).
        #[arg(long)]
        len: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ChainVerb {
    Classify { file: PathBuf },
    Equiv { a: PathBuf, b: PathBuf },
    Conjugate { a: PathBuf, b: PathBuf },
    Generic { file: PathBuf },
}

/// What a verb produced and whether it found a violation.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub json: Value,
    pub dot: Option<String>,
    pub ok: bool,
}

impl Outcome {
    fn pass(json: Value) -> Self {
        Outcome {
            json,
            dot: None,
            ok: true,
        }
    }

    fn with_dot(mut self, dot: String) -> Self {
        self.dot = Some(dot);
        self
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match (format, &self.dot) {
            (OutputFormat::Dot, Some(d)) => d.clone(),
            _ => serde_json::to_string_pretty(&self.json).expect("JSON values serialize"),
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.ok {
            0
        } else {
            1
        }
    }
}

/// Bad input (exit 2) versus a failed computation (exit 1).
#[derive(Debug)]
pub enum CliError {
    Usage(anyhow::Error),
    Failure(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(e) => write!(f, "usage error: {e:#}"),
            CliError::Failure(e) => write!(f, "error: {e:#}"),
        }
    }
}

fn usage<E: Into<anyhow::Error>>(e: E) -> CliError {
    CliError::Usage(e.into())
}

fn failure<E: Into<anyhow::Error>>(e: E) -> CliError {
    CliError::Failure(e.into())
}

pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(usage)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(b) = cli.budget {
        cfg.subdivision_budget = b;
    }
    if let Some(f) = cli.format {
        cfg.output_format = f;
    }
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

pub fn run(cli: &Cli) -> Result<(Outcome, RunConfig), CliError> {
    let cfg = resolve_config(cli)?;
    let outcome = match &cli.command {
        Command::Suite { name } => {
            if !suites::SUITES.contains(&name.as_str()) {
                return Err(usage(anyhow!(
                    "unknown suite '{name}'; known suites: {}",
                    suites::SUITES.join(", ")
                )));
            }
            let report = suites::run_suite(name, &cfg).map_err(failure)?;
            let ok = report.passed();
            Outcome {
                json: serde_json::to_value(&report).map_err(failure)?,
                dot: None,
                ok,
            }
        }
        Command::Demo { scenario } => {
            if !demo::SCENARIOS.contains(&scenario.as_str()) {
                return Err(usage(anyhow!(
                    "unknown scenario '{scenario}'; known scenarios: {}",
                    demo::SCENARIOS.join(", ")
                )));
            }
            let out = demo::demo(scenario, &cfg).map_err(failure)?;
            let mut json = out.json;
            json["config"] = serde_json::to_value(&cfg).map_err(failure)?;
            Outcome {
                json,
                dot: out.dot,
                ok: out.complete,
            }
        }
        Command::Calculus(verb) => calculus(verb, &cfg)?,
        Command::Amalgamation(verb) => amalgamation(verb, &cfg)?,
        Command::Chain(verb) => chain(verb)?,
    };
    Ok((outcome, cfg))
}

fn walk_input(a: &WalkArgs) -> Result<(Arc<BrickPartition>, Walk), CliError> {
    let space = parse_space(&a.space).map_err(usage)?;
    let p = Arc::new(parse_partition(space, &a.partition).map_err(usage)?);
    let vertices = parse_list(&a.walk).map_err(usage)?;
    let w = make_walk(p.nerve().clone(), vertices, a.circular, a.lasso).map_err(usage)?;
    Ok((p, w))
}

fn calculus(verb: &CalculusVerb, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let budget = cfg.subdivision_budget;
    let out = match verb {
        CalculusVerb::DoublePath(a) => {
            let (p, w) = walk_input(a)?;
            let d = path_doubling(&p, &w, budget).map_err(failure)?;
            Outcome::pass(json!({
                "partition": partition_json(&d.partition),
                "v0": walk_json(&d.v0),
                "v1": walk_json(&d.v1),
            }))
            .with_dot(graph_dot("doubled", d.partition.nerve()))
        }
        CalculusVerb::SpaceOut(a) | CalculusVerb::Upgrade(a) => {
            let (p, w) = walk_input(a)?;
            let r = if matches!(verb, CalculusVerb::SpaceOut(_)) {
                space_out(&p, &w, budget)
            } else {
                upgrade_to_path(&p, &w, budget)
            }
            .map_err(failure)?;
            Outcome::pass(json!({
                "partition": partition_json(&r.partition),
                "walk": walk_json(&r.walk),
            }))
            .with_dot(graph_dot("refined", r.partition.nerve()))
        }
        CalculusVerb::CoreRefine { space, u, v } => {
            let s = parse_space(space).map_err(usage)?;
            let pu = parse_partition(s.clone(), u).map_err(usage)?;
            let pv = parse_partition(s, v).map_err(usage)?;
            let w = core_refinement(&pu, &pv, budget).map_err(failure)?;
            let clauses = check_core_clauses(&pv, &w);
            Outcome {
                json: json!({
                    "partition": partition_json(&w),
                    "clauses_hold": clauses.is_ok(),
                    "clause_failure": clauses.err().map(|c| c.to_string()),
                }),
                dot: Some(graph_dot("core_refinement", w.nerve())),
                ok: check_core_clauses(&pv, &w).is_ok(),
            }
        }
        CalculusVerb::CycleToCover { space, partition } => {
            let s = parse_space(space).map_err(usage)?;
            let p = parse_partition(s, partition).map_err(usage)?;
            let c = covering_from_cycle_partition(&p, budget).map_err(failure)?;
            Outcome::pass(covering_json(&c))
        }
        CalculusVerb::CoverToCycle { covering } => {
            let v = read_json(covering).map_err(usage)?;
            let c = parse_covering(&v).map_err(usage)?;
            let p = cycle_partition_from_covering(&c, budget).map_err(failure)?;
            Outcome::pass(partition_json(&p)).with_dot(graph_dot("cycle_partition", p.nerve()))
        }
    };
    Ok(out)
}

fn cycle_partition(a: &CyclePartitionArgs) -> Result<BrickPartition, CliError> {
    let s = parse_space(&a.space).map_err(usage)?;
    parse_partition(s, &a.partition).map_err(usage)
}

fn parse_candidate(v: &Value, w_nerve: &Arc<Graph>) -> anyhow::Result<AmalgamationCandidate> {
    let n = v["z_graph"]["vertices"]
        .as_u64()
        .ok_or_else(|| anyhow!("candidate needs z_graph.vertices"))? as usize;
    let edges: Vec<(usize, usize)> =
        serde_json::from_value(v["z_graph"]["edges"].clone()).context("z_graph.edges")?;
    let z_graph = Arc::new(Graph::new(n, &edges)?);
    let map = |key: &str| -> anyhow::Result<GraphMap> {
        let a: Vec<usize> = serde_json::from_value(v[key].clone()).with_context(|| key.to_string())?;
        Ok(GraphMap::new(z_graph.clone(), w_nerve.clone(), a)?)
    };
    let alpha0 = map("alpha0")?;
    let alpha1 = map("alpha1")?;
    let z: Vec<usize> = serde_json::from_value(v["z"].clone()).context("z")?;
    let z = Walk::plain(z_graph.clone(), z)?;
    Ok(AmalgamationCandidate {
        z_graph,
        alpha0,
        alpha1,
        z,
    })
}

fn amalgamation(verb: &AmalgamationVerb, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let budget = cfg.subdivision_budget;
    let out = match verb {
        AmalgamationVerb::Robust(a) => {
            let s = cycle_partition(a)?;
            let (cover, witness) = robust_stage(&s, budget).map_err(failure)?;
            Outcome::pass(json!({
                "covering": covering_json(&cover),
                "robust": witness_json(&witness).map_err(failure)?,
            }))
            .with_dot(graph_dot("U", witness.u_pair.partition.nerve()))
        }
        AmalgamationVerb::Irreconcilable(a) => {
            let s = cycle_partition(a)?;
            let p = Pipeline::build(&s, budget).map_err(failure)?;
            let ok = p.claims.holds();
            Outcome {
                json: p.json().map_err(failure)?,
                dot: Some(graph_dot("W", p.pair.w_partition.nerve())),
                ok,
            }
        }
        AmalgamationVerb::Refute { input, candidate } => {
            let s = cycle_partition(input)?;
            let p = Pipeline::build(&s, budget).map_err(failure)?;
            let cand = match candidate.as_str() {
                "identity:0" => identity_candidate(&p.pair, 0),
                "identity:1" => identity_candidate(&p.pair, 1),
                path => {
                    let v = read_json(std::path::Path::new(path)).map_err(usage)?;
                    parse_candidate(&v, p.pair.w_partition.nerve()).map_err(usage)?
                }
            };
            match refute_candidate(&p.witness, &p.pair, &cand) {
                Ok(r) => Outcome::pass(refutation_json(&r)),
                Err(AmalgamationError::Consistent(msg)) => Outcome {
                    json: json!({ "consistent": msg }),
                    dot: None,
                    ok: false,
                },
                Err(e) => return Err(failure(e)),
            }
        }
        AmalgamationVerb::Search { input, zmax, len } => {
            let s = cycle_partition(input)?;
            let p = Pipeline::build(&s, budget).map_err(failure)?;
            let default = cfg
                .search_bounds
                .map(|b| SearchBounds {
                    z_vertex_bound: b.z_vertex_bound,
                    z_length_bound: b.z_length_bound,
                })
                .unwrap_or_else(|| p.default_bounds());
            let bounds = SearchBounds {
                z_vertex_bound: zmax.unwrap_or(default.z_vertex_bound),
                z_length_bound: len.unwrap_or(default.z_length_bound),
            };
            let r = exhaustive_search(&p.witness, &p.pair, bounds).map_err(failure)?;
            Outcome {
                json: search_json(&r),
                dot: None,
                ok: r.survivors.is_empty(),
            }
        }
    };
    Ok(out)
}

fn load_chain(path: &std::path::Path) -> Result<ChainFile, CliError> {
    let v = read_json(path).map_err(usage)?;
    parse_chain(&v).map_err(usage)
}

fn chain(verb: &ChainVerb) -> Result<Outcome, CliError> {
    let out = match verb {
        ChainVerb::Classify { file } => {
            let c = load_chain(file)?.interval();
            let segments: Vec<Value> = decompose(&c)
                .segments
                .iter()
                .map(|s| {
                    json!({
                        "kind": s.kind.to_string(),
                        "domain": [rational_json(&s.domain.0), rational_json(&s.domain.1)],
                        "codomain": [rational_json(&s.codomain.0), rational_json(&s.codomain.1)],
                    })
                })
                .collect();
            Outcome::pass(json!({
                "chain": chain_json(&c),
                "structure": structure_of(&c).labels.iter().map(|k| k.to_string()).collect::<Vec<_>>(),
                "segments": segments,
                "generic": is_generic(&c),
            }))
        }
        ChainVerb::Equiv { a, b } => {
            let (ca, cb) = (load_chain(a)?.interval(), load_chain(b)?.interval());
            Outcome::pass(json!({
                "equivalent": are_equivalent(&ca, &cb),
                "structures": [structure_of(&ca).to_string(), structure_of(&cb).to_string()],
            }))
        }
        ChainVerb::Conjugate { a, b } => {
            let (ca, cb) = (load_chain(a)?.interval(), load_chain(b)?.interval());
            let h = conjugating_homeo(&ca, &cb).map_err(failure)?;
            Outcome::pass(json!({ "homeomorphism": homeo_json(&h), "verified": ca.act(&h) == cb }))
        }
        ChainVerb::Generic { file } => {
            let c = load_chain(file)?.interval();
            Outcome::pass(json!({ "generic": is_generic(&c), "structure": structure_of(&c).to_string() }))
        }
    };
    Ok(out)
}
