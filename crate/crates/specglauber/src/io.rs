//! Text and JSON input formats: graphs, boundary conditions, and matrix
//! export. These parsers accept untrusted input and must fail cleanly.

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use crate::gibbs::Boundary;
use crate::graph::{Graph, GraphError};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("header expects {expected} edges, found {found}")]
    EdgeCountMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("bad json: {0}")]
    Json(String),
    #[error("boundary pin for vertex {vertex} must be +1 or -1, got {value}")]
    BadSpin { vertex: usize, value: i64 },
    #[error("boundary key is not a vertex id: {0}")]
    BadVertexKey(String),
}

/// Parses the plain text graph format: first non-comment line "n m", then
/// m lines "u v". Anything after '#' on a line is a comment; blank lines
/// are skipped.
pub fn parse_graph_text(text: &str) -> Result<Graph, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(ParseError::Syntax {
                line: lineno + 1,
                message: format!("expected two integers, got {line:?}"),
            });
        }
        let a: usize = fields[0].parse().map_err(|_| ParseError::Syntax {
            line: lineno + 1,
            message: format!("bad integer {:?}", fields[0]),
        })?;
        let b: usize = fields[1].parse().map_err(|_| ParseError::Syntax {
            line: lineno + 1,
            message: format!("bad integer {:?}", fields[1]),
        })?;
        if header.is_none() {
            if b > 1_000_000 || a > 1_000_000 {
                return Err(ParseError::Syntax {
                    line: lineno + 1,
                    message: "header out of supported range".into(),
                });
            }
            header = Some((a, b));
        } else {
            edges.push((a, b));
        }
    }
    let Some((n, m)) = header else {
        return Err(ParseError::Syntax {
            line: 0,
            message: "missing header line".into(),
        });
    };
    if edges.len() != m {
        return Err(ParseError::EdgeCountMismatch {
            expected: m,
            found: edges.len(),
        });
    }
    Ok(Graph::build(n, &edges)?)
}

/// Formats a graph in the text format, one edge per line.
pub fn format_graph_text(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.vertex_count(), g.edge_count());
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

#[derive(Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<(usize, usize)>,
}

/// Parses the JSON alternative `{"n": int, "edges": [[u,v],...]}`.
pub fn parse_graph_json(text: &str) -> Result<Graph, ParseError> {
    let raw: GraphJson = serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    if raw.n > 1_000_000 {
        return Err(ParseError::Json(
            "vertex count out of supported range".into(),
        ));
    }
    Ok(Graph::build(raw.n, &raw.edges)?)
}

pub fn format_graph_json(g: &Graph) -> String {
    let edges: Vec<[usize; 2]> = g.edges().iter().map(|&(u, v)| [u, v]).collect();
    serde_json::json!({ "n": g.vertex_count(), "edges": edges }).to_string()
}

#[derive(Deserialize)]
struct BoundaryJson {
    pins: BTreeMap<String, i64>,
}

/// Parses boundary conditions: {"pins": {"3": 1, "7": -1}}.
pub fn parse_boundary_json(text: &str) -> Result<Boundary, ParseError> {
    let raw: BoundaryJson =
        serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    let mut b = Boundary::free();
    for (key, value) in raw.pins {
        let vertex: usize = key
            .trim()
            .parse()
            .map_err(|_| ParseError::BadVertexKey(key.clone()))?;
        match value {
            1 => b.insert(vertex, 1),
            -1 => b.insert(vertex, -1),
            other => {
                return Err(ParseError::BadSpin {
                    vertex,
                    value: other,
                })
            }
        }
    }
    Ok(b)
}

pub fn format_boundary_json(b: &Boundary) -> String {
    let pins: BTreeMap<String, i64> = b
        .pins()
        .iter()
        .map(|(v, s)| (v.to_string(), *s as i64))
        .collect();
    serde_json::json!({ "pins": pins }).to_string()
}
