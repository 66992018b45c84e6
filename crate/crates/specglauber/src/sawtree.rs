//! Trees of self-avoiding walks with order-determined fixed spins at
//! cycle-closing leaves and pinned spins at copies of boundary vertices.

use thiserror::Error;

use crate::gibbs::Boundary;
use crate::graph::Graph;

#[derive(Debug, Error, PartialEq)]
pub enum SawTreeError {
    #[error("root vertex {0} is pinned by the boundary")]
    RootPinned(usize),
    #[error("vertex {0} is not a child label of the root")]
    NotARootChild(usize),
}

/// Which spin a cycle-closing leaf receives.
///
/// `EdgeOrder` compares the edge through which the walk returns to the
/// repeated vertex against the edge through which it originally left it
/// (by the ids of the far endpoints): the leaf is fixed to +1 when the
/// returning edge is the larger one. `LastStep` compares the repeated
/// vertex with its predecessor on the walk and fixes -1 when the repeated
/// vertex is larger. The two disagree on general graphs; `EdgeOrder` is
/// the default because it is the convention under which the walk-tree
/// influence sum reproduces the enumeration influence matrix (see the
/// oracle-equivalence tests in `influence`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpinConvention {
    #[default]
    EdgeOrder,
    LastStep,
}

/// Node of a SAW tree. Walks are stored explicitly; trees are only built at
/// desk scale.
#[derive(Debug, Clone)]
pub struct SawNode {
    pub walk: Vec<usize>,
    pub graph_vertex: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub fixed_spin: Option<i8>,
    pub depth: usize,
}

#[derive(Debug, Clone)]
pub struct SawTree {
    pub nodes: Vec<SawNode>,
    pub root: usize,
    pub origin: usize,
}

impl SawTree {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: usize) -> &SawNode {
        &self.nodes[id]
    }

    /// Ids of all copies of graph vertex `v` (the set A(v)).
    pub fn copies_of(&self, v: usize) -> Vec<usize> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.graph_vertex == v)
            .map(|(i, _)| i)
            .collect()
    }
}

fn closing_spin(walk: &[usize], j: usize, convention: SpinConvention) -> i8 {
    let len = walk.len();
    match convention {
        SpinConvention::LastStep => {
            if walk[len - 1] > walk[len - 2] {
                -1
            } else {
                1
            }
        }
        SpinConvention::EdgeOrder => {
            // returning edge {walk[len-2], walk[j]} vs exit edge {walk[j], walk[j+1]}
            if walk[len - 2] > walk[j + 1] {
                1
            } else {
                -1
            }
        }
    }
}

/// Builds the tree of self-avoiding walks from `w`.
///
/// A walk either stays self-avoiding or closes a cycle of length >= 3 and
/// becomes a leaf with an order-determined fixed spin. Copies of pinned
/// vertices receive the pinned spin and are not expanded further (their
/// subtrees never carry influence).
pub fn saw_tree(
    g: &Graph,
    w: usize,
    boundary: &Boundary,
    convention: SpinConvention,
) -> Result<SawTree, SawTreeError> {
    if boundary.pin(w).is_some() {
        return Err(SawTreeError::RootPinned(w));
    }
    let mut nodes = vec![SawNode {
        walk: vec![w],
        graph_vertex: w,
        parent: None,
        children: Vec::new(),
        fixed_spin: None,
        depth: 0,
    }];
    let mut queue = vec![0usize];
    while let Some(id) = queue.pop() {
        if nodes[id].fixed_spin.is_some() {
            continue;
        }
        let walk = nodes[id].walk.clone();
        let last = *walk.last().unwrap();
        let depth = nodes[id].depth;
        for &x in g.neighbors(last) {
            let repeat_at = walk.iter().position(|&v| v == x);
            let (ok, fixed) = match repeat_at {
                None => {
                    let fixed = boundary.pin(x);
                    (true, fixed)
                }
                Some(j) => {
                    // extended walk closes a cycle of length walk.len()-j;
                    // only cycles of length >= 3 become leaves
                    if j + 2 < walk.len() {
                        let mut ext = walk.clone();
                        ext.push(x);
                        (true, Some(closing_spin(&ext, j, convention)))
                    } else {
                        (false, None)
                    }
                }
            };
            if !ok {
                continue;
            }
            let mut ext = walk.clone();
            ext.push(x);
            let child_id = nodes.len();
            nodes.push(SawNode {
                walk: ext,
                graph_vertex: x,
                parent: Some(id),
                children: Vec::new(),
                fixed_spin: fixed,
                depth: depth + 1,
            });
            nodes[id].children.push(child_id);
            if fixed.is_none() {
                queue.push(child_id);
            }
        }
    }
    Ok(SawTree {
        nodes,
        root: 0,
        origin: w,
    })
}

/// The subtree T_SAW(ws): root plus the child that is a copy of `s` plus
/// that child's descendants, with node ids remapped to the new tree.
pub fn saw_subtree(tree: &SawTree, s: usize) -> Result<SawTree, SawTreeError> {
    let root = &tree.nodes[tree.root];
    let child = root
        .children
        .iter()
        .copied()
        .find(|&c| tree.nodes[c].graph_vertex == s)
        .ok_or(SawTreeError::NotARootChild(s))?;

    let mut keep = vec![tree.root, child];
    let mut stack = vec![child];
    while let Some(id) = stack.pop() {
        for &c in &tree.nodes[id].children {
            keep.push(c);
            stack.push(c);
        }
    }
    let mut remap = std::collections::HashMap::new();
    for (new_id, &old_id) in keep.iter().enumerate() {
        remap.insert(old_id, new_id);
    }
    let nodes: Vec<SawNode> = keep
        .iter()
        .map(|&old| {
            let n = &tree.nodes[old];
            SawNode {
                walk: n.walk.clone(),
                graph_vertex: n.graph_vertex,
                parent: n.parent.and_then(|p| remap.get(&p).copied()),
                children: n
                    .children
                    .iter()
                    .filter_map(|c| remap.get(c).copied())
                    .collect(),
                fixed_spin: n.fixed_spin,
                depth: n.depth,
            }
        })
        .collect();
    Ok(SawTree {
        nodes,
        root: 0,
        origin: tree.origin,
    })
}

/// Brute-force enumerator of the walks that make up a SAW tree, independent
/// of the tree builder. Counts every walk from `w` that is self-avoiding or
/// cycle-closing, truncating below pinned copies exactly like the builder.
pub fn brute_force_walk_count(g: &Graph, w: usize, boundary: &Boundary) -> usize {
    fn recurse(g: &Graph, boundary: &Boundary, walk: &mut Vec<usize>) -> usize {
        let mut count = 1;
        let last = *walk.last().unwrap();
        if boundary.pin(last).is_some() && walk.len() > 1 {
            return count;
        }
        if walk.len() >= 2 {
            // cycle-closing walks are leaves
            let tail = &walk[..walk.len() - 1];
            if tail.iter().any(|&v| v == *walk.last().unwrap()) {
                return count;
            }
        }
        for x in g.neighbors(last).to_vec() {
            let repeat = walk.iter().position(|&v| v == x);
            match repeat {
                None => {
                    walk.push(x);
                    count += recurse(g, boundary, walk);
                    walk.pop();
                }
                Some(j) => {
                    if j + 2 < walk.len() {
                        walk.push(x);
                        count += 1;
                        walk.pop();
                    }
                }
            }
        }
        count
    }
    let mut walk = vec![w];
    recurse(g, boundary, &mut walk)
}
