//! The `.graph.json` document format.
//!
//! ```text
//! {"vertices": [{"id": "a", "m": 1}, ...],
//!  "edges":    [{"u": "a", "v": "b", "w": 0.5}, ...]}
//! ```
//!
//! Numbers are read from their decimal text, so `0.1` is stored both as the
//! nearest `f64` and as the exact rational `1/10`. Values whose exact form
//! is not a terminating decimal (`1/24`) are written with an extra
//! `m_exact`/`w_exact` string so a save/load cycle is lossless.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use super::{GraphBuilder, GraphError, WeightedGraph};
use crate::scalar::Number;

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Reject disconnected graphs (which includes any isolated vertex).
    pub require_connected: bool,
}

#[derive(Deserialize)]
struct GraphDoc {
    vertices: Vec<VertexDoc>,
    edges: Vec<EdgeDoc>,
}

#[derive(Deserialize)]
struct VertexDoc {
    id: String,
    m: Box<RawValue>,
    #[serde(default)]
    m_exact: Option<String>,
}

#[derive(Deserialize)]
struct EdgeDoc {
    u: String,
    v: String,
    w: Box<RawValue>,
    #[serde(default)]
    w_exact: Option<String>,
}

#[derive(Serialize)]
struct GraphOut<'a> {
    vertices: Vec<VertexOut<'a>>,
    edges: Vec<EdgeOut<'a>>,
}

#[derive(Serialize)]
struct VertexOut<'a> {
    id: &'a str,
    m: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    m_exact: Option<String>,
}

#[derive(Serialize)]
struct EdgeOut<'a> {
    u: &'a str,
    v: &'a str,
    w: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    w_exact: Option<String>,
}

fn read_number(raw: &RawValue, exact: Option<&str>, what: &str) -> Result<Number, GraphError> {
    let text = raw.get();
    let parsed = Number::parse_decimal(text)
        .map_err(|_| GraphError::Malformed(format!("{what} must be a number, got {text}")))?;
    match exact {
        None => Ok(parsed),
        Some(e) => {
            let n = Number::parse_exact(e)
                .map_err(|_| GraphError::Malformed(format!("bad exact value {e:?} for {what}")))?;
            if n.value() != parsed.value() {
                return Err(GraphError::Malformed(format!(
                    "exact value {e} disagrees with {what} = {text}"
                )));
            }
            Ok(n)
        }
    }
}

pub fn load_graph<R: Read>(reader: R, options: LoadOptions) -> Result<WeightedGraph, GraphError> {
    let doc: GraphDoc =
        serde_json::from_reader(reader).map_err(|e| GraphError::Malformed(e.to_string()))?;
    let mut b = GraphBuilder::new();
    for v in &doc.vertices {
        let m = read_number(&v.m, v.m_exact.as_deref(), &format!("m({})", v.id))?;
        if !(m.value() > 0.0) {
            return Err(GraphError::NonpositiveMeasure(v.id.clone()));
        }
        b.vertex(v.id.clone(), m);
    }
    for e in &doc.edges {
        let w = read_number(&e.w, e.w_exact.as_deref(), &format!("w({},{})", e.u, e.v))?;
        if w.value() < 0.0 {
            return Err(GraphError::NegativeWeight(e.u.clone(), e.v.clone()));
        }
        b.edge_by_id(&e.u, &e.v, w);
    }
    let g = b.build()?;
    if options.require_connected && !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    Ok(g)
}

pub fn load_graph_file(path: &Path, options: LoadOptions) -> Result<WeightedGraph, GraphError> {
    load_graph(BufReader::new(File::open(path)?), options)
}

fn exact_annotation(n: &Number) -> Option<String> {
    if n.needs_exact_annotation() {
        n.exact().map(|r| r.to_string())
    } else {
        None
    }
}

pub fn to_json_string(g: &WeightedGraph) -> String {
    let doc = GraphOut {
        vertices: g
            .vertices()
            .map(|v| VertexOut {
                id: g.id(v),
                m: g.measure(v),
                m_exact: exact_annotation(&g.measure_number(v)),
            })
            .collect(),
        edges: g
            .edges()
            .map(|(u, v, w)| EdgeOut {
                u: g.id(u),
                v: g.id(v),
                w: w.value(),
                w_exact: exact_annotation(&w),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("graph serializes");
    s.push('\n');
    s
}

pub fn save_graph<W: Write>(g: &WeightedGraph, mut writer: W) -> Result<(), GraphError> {
    writer.write_all(to_json_string(g).as_bytes())?;
    writer.flush()?;
    Ok(())
}

pub fn save_graph_file(g: &WeightedGraph, path: &Path) -> Result<(), GraphError> {
    save_graph(g, BufWriter::new(File::create(path)?))
}
