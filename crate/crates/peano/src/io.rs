//! Text formats: space and partition specs, walk lists, chain files, and
//! JSON/DOT renderings of the core objects.

use std::fmt::Write as _;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use peano_core::calculus::CircularCovering;
use peano_core::{
    BrickPartition, CircleChain, Family, Graph, PLChain, PLHomeomorphism, SpaceModel, Walk,
    WalkKind,
};

/// Parses `family:p1,p2,...[@level]`, e.g. `torus_grid:12,4` or `cycle:12@1`.
pub fn parse_space(text: &str) -> Result<Arc<SpaceModel>> {
    let (body, level) = match text.split_once('@') {
        Some((b, l)) => (b, l.parse::<u32>().context("level after '@'")?),
        None => (text, 0),
    };
    let (name, params) = body
        .split_once(':')
        .ok_or_else(|| anyhow!("space '{text}' must look like family:params"))?;
    let name = if name == "torus" { "torus_grid" } else { name };
    let params = parse_list(params).with_context(|| format!("parameters of '{text}'"))?;
    let family = Family::from_name(name, &params)?;
    Ok(SpaceModel::new(family, level)?)
}

pub fn space_name(space: &SpaceModel) -> String {
    let f = space.family();
    let params: Vec<String> = f.params().iter().map(|p| p.to_string()).collect();
    let mut s = format!("{}:{}", f.name(), params.join(","));
    if space.level() > 0 {
        write!(s, "@{}", space.level()).expect("string write");
    }
    s
}

/// Parses `bands:k`, `boxes:side[,shift]`, `trivial` or `discrete`.
pub fn parse_partition(space: Arc<SpaceModel>, text: &str) -> Result<BrickPartition> {
    let (name, args) = text.split_once(':').unwrap_or((text, ""));
    let args = if args.is_empty() {
        Vec::new()
    } else {
        parse_list(args)?
    };
    let p = match (name, args.as_slice()) {
        ("bands", &[k]) => BrickPartition::bands(space, k)?,
        ("boxes", &[side]) => BrickPartition::boxes(space, side, 0)?,
        ("boxes", &[side, shift]) => BrickPartition::boxes(space, side, shift)?,
        ("trivial", []) => BrickPartition::trivial(space),
        ("discrete", []) => BrickPartition::discrete(space),
        _ => bail!("unknown partition '{text}'"),
    };
    Ok(p)
}

pub fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .with_context(|| format!("'{t}' is not a nonnegative integer"))
        })
        .collect()
}

/// A walk on `host` from a vertex list; `lasso` gives the split index.
pub fn make_walk(
    host: Arc<Graph>,
    vertices: Vec<usize>,
    circular: bool,
    lasso: Option<usize>,
) -> Result<Walk> {
    let kind = match (circular, lasso) {
        (true, Some(_)) => bail!("a walk cannot be both circular and a lasso"),
        (true, None) => WalkKind::Circular,
        (false, Some(split)) => WalkKind::Lasso { split },
        (false, None) => WalkKind::Plain,
    };
    Ok(Walk::new(host, vertices, kind)?)
}

pub fn walk_json(w: &Walk) -> Value {
    let kind = match w.kind() {
        WalkKind::Plain => json!("plain"),
        WalkKind::Circular => json!("circular"),
        WalkKind::Lasso { split } => json!({ "lasso": split }),
    };
    json!({ "kind": kind, "length": w.len(), "vertices": w.vertices() })
}

pub fn graph_json(g: &Graph) -> Value {
    json!({ "vertices": g.n(), "edges": g.edges() })
}

pub fn partition_json(p: &BrickPartition) -> Value {
    json!({
        "space": space_name(p.space()),
        "blocks": p.num_blocks(),
        "block_of": p.block_of(),
        "nerve": graph_json(p.nerve()),
    })
}

pub fn covering_json(c: &CircularCovering) -> Value {
    json!({ "space": space_name(&c.space), "sets": c.sets })
}

pub fn parse_covering(v: &Value) -> Result<CircularCovering> {
    let space = parse_space(
        v["space"]
            .as_str()
            .ok_or_else(|| anyhow!("covering needs a \"space\" string"))?,
    )?;
    let sets: Vec<Vec<usize>> =
        serde_json::from_value(v["sets"].clone()).context("covering \"sets\"")?;
    if sets.iter().flatten().any(|&x| x >= space.n()) {
        bail!("covering mentions a vertex outside the space");
    }
    Ok(CircularCovering::new(space, sets))
}

/// A graph in DOT syntax.
pub fn graph_dot(name: &str, g: &Graph) -> String {
    let mut s = format!("graph {name} {{\n");
    for v in 0..g.n() {
        writeln!(s, "  {v};").expect("string write");
    }
    for (a, b) in g.edges() {
        writeln!(s, "  {a} -- {b};").expect("string write");
    }
    s.push_str("}\n");
    s
}

pub fn rational_json(q: &BigRational) -> Value {
    let part = |b: &BigInt| -> Value {
        i64::try_from(b).map_or_else(|_| json!(b.to_string()), |i| json!(i))
    };
    json!([part(q.numer()), part(q.denom())])
}

pub fn parse_rational(v: &Value) -> Result<BigRational> {
    let part = |x: &Value| -> Result<BigInt> {
        match x {
            Value::Number(n) => n
                .as_i64()
                .map(BigInt::from)
                .ok_or_else(|| anyhow!("{n} is not an integer")),
            Value::String(s) => s.parse::<BigInt>().map_err(|e| anyhow!("{s}: {e}")),
            _ => bail!("rational parts must be integers or decimal strings"),
        }
    };
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| anyhow!("a rational is written [num, den]"))?;
    let den = part(&arr[1])?;
    if den == BigInt::from(0) {
        bail!("zero denominator");
    }
    Ok(BigRational::new(part(&arr[0])?, den))
}

fn parse_point(v: &Value) -> Result<(BigRational, BigRational)> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| anyhow!("a vertex is written [[num,den],[num,den]]"))?;
    Ok((parse_rational(&arr[0])?, parse_rational(&arr[1])?))
}

fn points_json(pts: &[(BigRational, BigRational)]) -> Value {
    Value::Array(
        pts.iter()
            .map(|(x, y)| json!([rational_json(x), rational_json(y)]))
            .collect(),
    )
}

/// Contents of a chain file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainFile {
    Interval(PLChain),
    Circle(CircleChain),
}

impl ChainFile {
    /// The interval chain itself, or the reduction of a circle chain.
    pub fn interval(&self) -> PLChain {
        match self {
            ChainFile::Interval(c) => c.clone(),
            ChainFile::Circle(c) => peano_core::circle_reduce(c),
        }
    }
}

pub fn parse_chain(v: &Value) -> Result<ChainFile> {
    let vertices = v["vertices"]
        .as_array()
        .ok_or_else(|| anyhow!("chain needs a \"vertices\" array"))?
        .iter()
        .map(parse_point)
        .collect::<Result<Vec<_>>>()?;
    match v["space"].as_str() {
        Some("interval") => Ok(ChainFile::Interval(PLChain::new(vertices)?)),
        Some("circle") => {
            let root = parse_rational(&v["root"]).context("circle chain \"root\"")?;
            Ok(ChainFile::Circle(CircleChain::new(root, vertices)?))
        }
        _ => bail!("chain \"space\" must be \"interval\" or \"circle\""),
    }
}

pub fn chain_json(c: &PLChain) -> Value {
    json!({ "space": "interval", "vertices": points_json(c.vertices()) })
}

pub fn circle_chain_json(c: &CircleChain) -> Value {
    json!({
        "space": "circle",
        "root": rational_json(c.root()),
        "vertices": points_json(c.growth()),
    })
}

pub fn homeo_json(h: &PLHomeomorphism) -> Value {
    json!({
        "orientation_preserving": h.orientation_preserving(),
        "breakpoints": points_json(h.breakpoints()),
    })
}

pub fn read_json(path: &std::path::Path) -> Result<Value> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_names_round_trip() {
        let s = parse_space("torus:12,4").unwrap();
        assert_eq!(space_name(&s), "torus_grid:12,4");
        let c = parse_space("cycle:12@1").unwrap();
        assert_eq!(c.n(), 36);
        assert_eq!(space_name(&c), "cycle:12@1");
        assert!(parse_space("cycle").is_err());
        assert!(parse_space("sphere:3").is_err());
    }

    #[test]
    fn partition_specs() {
        let s = parse_space("cycle:12").unwrap();
        assert_eq!(parse_partition(s.clone(), "bands:4").unwrap().num_blocks(), 4);
        assert_eq!(parse_partition(s.clone(), "trivial").unwrap().num_blocks(), 1);
        assert!(parse_partition(s, "bands").is_err());
    }

    #[test]
    fn chains_round_trip() {
        let text = r#"{"space":"interval","vertices":[[[1,2],[1,2]],[[1,2],[3,4]],[[1,4],[3,4]],[[0,1],[1,1]]]}"#;
        let ChainFile::Interval(c) = parse_chain(&serde_json::from_str(text).unwrap()).unwrap()
        else {
            panic!("interval chain expected")
        };
        assert_eq!(c.vertices().len(), 4);
        let back = parse_chain(&chain_json(&c)).unwrap();
        assert_eq!(back, ChainFile::Interval(c));
        let circle = r#"{"space":"circle","root":[1,3],"vertices":[[[0,1],[0,1]],[[1,2],[1,2]]]}"#;
        let parsed = parse_chain(&serde_json::from_str(circle).unwrap()).unwrap();
        assert_eq!(parsed.interval(), PLChain::symmetric());
        let ChainFile::Circle(cc) = &parsed else {
            panic!("circle chain expected")
        };
        assert_eq!(parse_chain(&circle_chain_json(cc)).unwrap(), parsed);
    }

    #[test]
    fn big_rationals_use_strings() {
        let q = BigRational::new(BigInt::from(1), BigInt::from(10).pow(30));
        let v = rational_json(&q);
        assert!(v[1].is_string());
        assert_eq!(parse_rational(&v).unwrap(), q);
        assert!(parse_rational(&json!([1, 0])).is_err());
    }
}
