//! Built-in graph families and the text selector used by the CLI and the
//! experiment runner. All families are simple and connected.

use thiserror::Error;

use crate::graph::Graph;
use crate::rng::Stream;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("unknown corpus selector: {0}")]
    UnknownSelector(String),
    #[error("bad arguments for {family}: {reason}")]
    BadArguments { family: String, reason: String },
}

pub fn path(n: usize) -> Graph {
    assert!(n >= 1);
    let edges: Vec<(usize, usize)> = (1..n).map(|v| (v - 1, v)).collect();
    Graph::build(n, &edges).unwrap()
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3);
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (v - 1, v)).collect();
    edges.push((n - 1, 0));
    Graph::build(n, &edges).unwrap()
}

pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            edges.push((u, v));
        }
    }
    Graph::build(n, &edges).unwrap()
}

pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..a {
        for v in 0..b {
            edges.push((u, a + v));
        }
    }
    Graph::build(a + b, &edges).unwrap()
}

/// r x c grid, row-major vertex ids.
pub fn grid(r: usize, c: usize) -> Graph {
    let mut edges = Vec::new();
    for i in 0..r {
        for j in 0..c {
            let v = i * c + j;
            if j + 1 < c {
                edges.push((v, v + 1));
            }
            if i + 1 < r {
                edges.push((v, v + c));
            }
        }
    }
    Graph::build(r * c, &edges).unwrap()
}

/// Star on n vertices: center 0 adjacent to everything else.
pub fn star(n: usize) -> Graph {
    assert!(n >= 2);
    let edges: Vec<(usize, usize)> = (1..n).map(|v| (0, v)).collect();
    Graph::build(n, &edges).unwrap()
}

pub fn petersen() -> Graph {
    let mut edges = Vec::new();
    for v in 0..5 {
        edges.push((v, (v + 1) % 5)); // outer cycle
        edges.push((v, v + 5)); // spokes
        edges.push((5 + v, 5 + (v + 2) % 5)); // inner pentagram
    }
    Graph::build(10, &edges).unwrap()
}

/// Cycle on n vertices plus the chord {0, n/2}.
pub fn cycle_with_chord(n: usize) -> Graph {
    assert!(n >= 4);
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (v - 1, v)).collect();
    edges.push((n - 1, 0));
    edges.push((0, n / 2));
    Graph::build(n, &edges).unwrap()
}

/// Seeded random connected graph with n vertices and m edges (m is clamped
/// to the feasible range). A random spanning tree guarantees connectivity;
/// the remaining edges are drawn uniformly from the non-edges.
pub fn random_connected(n: usize, m: usize, seed: u64) -> Graph {
    assert!(n >= 2);
    let max_m = n * (n - 1) / 2;
    let m = m.clamp(n - 1, max_m);
    let mut stream = Stream::new(seed ^ 0xC0FF_EE00_D15E_A5E5);
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(m);
    // random spanning tree: attach each vertex to a uniformly random earlier one
    for v in 1..n {
        let u = stream.below(v);
        edges.push((u.min(v), u.max(v)));
    }
    let mut have: std::collections::BTreeSet<(usize, usize)> = edges.iter().copied().collect();
    while have.len() < m {
        let u = stream.below(n);
        let v = stream.below(n);
        if u == v {
            continue;
        }
        let e = (u.min(v), u.max(v));
        if have.insert(e) {
            edges.push(e);
        }
    }
    Graph::build(n, &edges).unwrap()
}

/// Parses selectors like "path(5)", "grid(3,3)", "petersen",
/// "random_connected(8,12,42)".
pub fn corpus(selector: &str) -> Result<Graph, CorpusError> {
    let s = selector.trim();
    let (name, args) = match s.find('(') {
        Some(open) => {
            let close = s
                .rfind(')')
                .ok_or_else(|| CorpusError::UnknownSelector(s.to_string()))?;
            let name = &s[..open];
            let args: Vec<usize> = s[open + 1..close]
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| CorpusError::BadArguments {
                            family: name.to_string(),
                            reason: format!("bad integer: {t}"),
                        })
                })
                .collect::<Result<_, _>>()?;
            (name, args)
        }
        None => (s, Vec::new()),
    };
    let need = |k: usize, args: &Vec<usize>| -> Result<(), CorpusError> {
        if args.len() != k {
            Err(CorpusError::BadArguments {
                family: name.to_string(),
                reason: format!("expected {k} arguments, got {}", args.len()),
            })
        } else {
            Ok(())
        }
    };
    match name {
        "path" => {
            need(1, &args)?;
            Ok(path(args[0].max(1)))
        }
        "cycle" => {
            need(1, &args)?;
            if args[0] < 3 {
                return Err(CorpusError::BadArguments {
                    family: name.into(),
                    reason: "cycle needs n >= 3".into(),
                });
            }
            Ok(cycle(args[0]))
        }
        "complete" => {
            need(1, &args)?;
            Ok(complete(args[0].max(1)))
        }
        "complete_bipartite" => {
            need(2, &args)?;
            Ok(complete_bipartite(args[0].max(1), args[1].max(1)))
        }
        "grid" => {
            need(2, &args)?;
            Ok(grid(args[0].max(1), args[1].max(1)))
        }
        "star" => {
            need(1, &args)?;
            if args[0] < 2 {
                return Err(CorpusError::BadArguments {
                    family: name.into(),
                    reason: "star needs n >= 2".into(),
                });
            }
            Ok(star(args[0]))
        }
        "petersen" => {
            need(0, &args)?;
            Ok(petersen())
        }
        "cycle_with_chord" => {
            need(1, &args)?;
            if args[0] < 4 {
                return Err(CorpusError::BadArguments {
                    family: name.into(),
                    reason: "cycle_with_chord needs n >= 4".into(),
                });
            }
            Ok(cycle_with_chord(args[0]))
        }
        "random_connected" => {
            need(3, &args)?;
            Ok(random_connected(args[0].max(2), args[1], args[2] as u64))
        }
        other => Err(CorpusError::UnknownSelector(other.to_string())),
    }
}
