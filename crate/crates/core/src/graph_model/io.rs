//! Line-oriented instance files.
//!
//! ```text
//! spanlab-instance 1
//! n 64
//! region_size 8
//! id_space 64
//! t 2
//! k 3
//! red_prob 3/1024
//! seed 1
//! node 0 17 U 0
//! ...
//! edge 3 40 B
//! edge 5 12 R
//! ```
//!
//! `t`, `k`, `red_prob` and `seed` are `-` for hand-built instances. Node
//! records are in internal-index order; edge records are sorted by
//! `(min id, max id)` and list the smaller ID first. `red_prob` is the exact
//! reduced value of the stored binary floating-point probability.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::{Color, ColoredGraph, LowerBoundParams, ModelError, Side};
use crate::graph::NodeId;

const MAGIC: &str = "spanlab-instance 1";

/// A colored graph plus the parameters and seed it was sampled with, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub params: Option<LowerBoundParams>,
    pub seed: Option<u64>,
    pub graph: ColoredGraph,
}

pub fn write_instance(inst: &Instance) -> String {
    let g = &inst.graph;
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "n {}", g.node_count());
    let _ = writeln!(out, "region_size {}", g.region_size());
    let _ = writeln!(out, "id_space {}", g.id_space());
    match &inst.params {
        Some(p) => {
            let _ = writeln!(out, "t {}", p.t);
            let _ = writeln!(out, "k {}", p.k);
            let r = BigRational::from_float(p.red_prob).expect("finite probability");
            let _ = writeln!(out, "red_prob {}/{}", r.numer(), r.denom());
        }
        None => {
            out.push_str("t -\nk -\nred_prob -\n");
        }
    }
    match inst.seed {
        Some(s) => {
            let _ = writeln!(out, "seed {s}");
        }
        None => out.push_str("seed -\n"),
    }
    for v in 0..g.node_count() {
        let side = match g.side(v) {
            Side::U => 'U',
            Side::V => 'V',
        };
        let _ = writeln!(out, "node {v} {} {side} {}", g.id(v), g.region(v));
    }
    let mut edges: Vec<(NodeId, NodeId, Color)> = Vec::new();
    for a in 0..g.node_count() {
        for color in [Color::Blue, Color::Red] {
            for &b in g.neighbors(a, color).iter().filter(|&&b| b > a) {
                let (x, y) = (g.id(a), g.id(b));
                edges.push((x.min(y), x.max(y), color));
            }
        }
    }
    edges.sort();
    for (x, y, c) in edges {
        let _ = writeln!(out, "edge {x} {y} {}", c.symbol());
    }
    out
}

pub fn read_instance(text: &str) -> Result<Instance, ModelError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let err = |line: usize, message: String| ModelError::Parse { line, message };

    match lines.next() {
        Some((_, l)) if l == MAGIC => {}
        Some((line, l)) => return Err(err(line, format!("bad magic {l:?}"))),
        None => return Err(err(0, "empty file".into())),
    }

    let mut header: HashMap<&str, (usize, &str)> = HashMap::new();
    let mut body: Vec<(usize, &str)> = Vec::new();
    for (line, l) in lines {
        if l.starts_with("node ") || l.starts_with("edge ") {
            body.push((line, l));
        } else if !body.is_empty() {
            return Err(err(line, "header field after records".into()));
        } else {
            let (key, value) = l
                .split_once(' ')
                .ok_or_else(|| err(line, format!("malformed header {l:?}")))?;
            header.insert(key, (line, value.trim()));
        }
    }

    let field = |key: &str| -> Result<(usize, &str), ModelError> {
        header
            .get(key)
            .copied()
            .ok_or_else(|| err(0, format!("missing header field {key}")))
    };
    fn num<T: std::str::FromStr>(line: usize, v: &str) -> Result<T, ModelError> {
        v.parse().map_err(|_| ModelError::Parse {
            line,
            message: format!("not a number: {v:?}"),
        })
    }

    let (ln, v) = field("n")?;
    let n: usize = num(ln, v)?;
    let (ln, v) = field("region_size")?;
    let region_size: usize = num(ln, v)?;
    let (ln, v) = field("id_space")?;
    let id_space: u64 = num(ln, v)?;
    let (tl, tv) = field("t")?;
    let (kl, kv) = field("k")?;
    let (pl, pv) = field("red_prob")?;
    let (sl, sv) = field("seed")?;
    let seed = if sv == "-" { None } else { Some(num(sl, sv)?) };

    let params = if tv == "-" {
        None
    } else {
        let t: u32 = num(tl, tv)?;
        let p = LowerBoundParams::derive(n, t)
            .and_then(|p| p.with_id_space(id_space))
            .map_err(|e| err(tl, e.to_string()))?;
        let k: u32 = num(kl, kv)?;
        if k != p.k {
            return Err(err(kl, format!("k {k} does not match t {t}")));
        }
        if region_size != p.region_size {
            return Err(err(ln, "region_size disagrees with derived value".into()));
        }
        let prob = parse_ratio(pv).ok_or_else(|| err(pl, format!("bad ratio {pv:?}")))?;
        if prob != p.red_prob {
            return Err(err(pl, "red_prob disagrees with derived value".into()));
        }
        Some(p)
    };

    if n % 2 == 1 {
        return Err(err(0, format!("odd node count {n}")));
    }
    let half = n / 2;
    let mut ids: Vec<Option<NodeId>> = vec![None; n];
    let mut records = body.into_iter().peekable();
    let mut expected_side_region: Vec<(char, usize)> = Vec::with_capacity(n);
    while let Some(&(line, l)) = records.peek() {
        if !l.starts_with("node ") {
            break;
        }
        records.next();
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != 5 {
            return Err(err(line, "node record needs 4 fields".into()));
        }
        let idx: usize = num(line, parts[1])?;
        if idx >= n || ids[idx].is_some() {
            return Err(err(line, format!("bad or repeated node index {idx}")));
        }
        ids[idx] = Some(NodeId(num(line, parts[2])?));
        let side = parts[3].chars().next().unwrap_or('?');
        expected_side_region.push((side, num(line, parts[4])?));
        if expected_side_region.len() != idx + 1 {
            return Err(err(line, "node records out of order".into()));
        }
    }
    let ids: Vec<NodeId> = ids
        .into_iter()
        .collect::<Option<_>>()
        .ok_or_else(|| err(0, "missing node records".into()))?;
    let mut g = ColoredGraph::from_layout(half, region_size, ids, id_space)
        .map_err(|e| err(0, e.to_string()))?;
    for (v, &(side, region)) in expected_side_region.iter().enumerate() {
        let actual = match g.side(v) {
            Side::U => 'U',
            Side::V => 'V',
        };
        if side != actual || region != g.region(v) {
            return Err(err(0, format!("node {v} side/region disagree with layout")));
        }
    }

    let index = g.ids().iter().enumerate().map(|(i, &id)| (id, i)).collect::<HashMap<_, _>>();
    let mut blue_seen = 0usize;
    for (line, l) in records {
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != 4 || parts[0] != "edge" {
            return Err(err(line, format!("unexpected record {l:?}")));
        }
        let x = NodeId(num(line, parts[1])?);
        let y = NodeId(num(line, parts[2])?);
        let (&a, &b) = index
            .get(&x)
            .zip(index.get(&y))
            .ok_or_else(|| err(line, "edge endpoint not a node id".into()))?;
        match parts[3] {
            "B" => {
                if g.edge_color(a, b) != Some(Color::Blue) {
                    return Err(err(line, "blue edge outside a region".into()));
                }
                blue_seen += 1;
            }
            "R" => g.add_red_edge(a, b).map_err(|e| err(line, e.to_string()))?,
            c => return Err(err(line, format!("unknown color {c:?}"))),
        }
    }
    if blue_seen != g.blue_edge_count() {
        return Err(err(0, "blue edge records incomplete".into()));
    }

    Ok(Instance {
        params,
        seed,
        graph: g,
    })
}

fn parse_ratio(s: &str) -> Option<f64> {
    let (n, d) = s.split_once('/')?;
    let r = BigRational::new(n.parse::<BigInt>().ok()?, d.parse::<BigInt>().ok()?);
    r.to_f64()
}
