//! Quartet compatibility: find an unrooted tree with internal degree three
//! in which, for each quartet `xy|uv`, the `x`-`y` path avoids the
//! `u`-`v` path entirely.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use crate::caps::Caps;
use crate::error::Error;

use super::betweenness::validate_names;

/// A quartet instance: named leaves and quartets `[x, y, u, v]` read as
/// `xy|uv`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuartetSet {
    leaves: Vec<String>,
    quartets: Vec<[usize; 4]>,
}

impl QuartetSet {
    /// Validates leaf names (non-empty, distinct, at least one) and
    /// quartets (in range, four distinct leaves each).
    pub fn new<S: Into<String>>(
        leaves: impl IntoIterator<Item = S>,
        quartets: Vec<[usize; 4]>,
    ) -> Result<Self, Error> {
        let leaves: Vec<String> = leaves.into_iter().map(Into::into).collect();
        if leaves.is_empty() {
            return Err(Error::invalid("a quartet set needs at least one leaf"));
        }
        validate_names(&leaves)?;
        for quartet in &quartets {
            for &entry in quartet {
                if entry >= leaves.len() {
                    return Err(Error::invalid(format!(
                        "quartet entry {entry} is out of range for {} leaves",
                        leaves.len()
                    )));
                }
            }
            let distinct: BTreeSet<usize> = quartet.iter().copied().collect();
            if distinct.len() != 4 {
                return Err(Error::invalid(format!(
                    "quartet {quartet:?} repeats a leaf"
                )));
            }
        }
        Ok(QuartetSet { leaves, quartets })
    }

    pub fn leaves(&self) -> &[String] {
        &self.leaves
    }

    pub fn quartets(&self) -> &[[usize; 4]] {
        &self.quartets
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }
}

/// An unrooted leaf-labeled tree. Labeled nodes have degree at most one,
/// unlabeled internal nodes degree exactly three.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnrootedTree {
    neighbors: Vec<Vec<usize>>,
    leaf_of: Vec<Option<usize>>,
}

impl UnrootedTree {
    /// Validates tree shape and the degree discipline.
    pub fn new(
        node_count: usize,
        edges: &[(usize, usize)],
        leaf_of: Vec<Option<usize>>,
    ) -> Result<Self, Error> {
        if node_count == 0 || leaf_of.len() != node_count {
            return Err(Error::invalid(
                "node count must be positive and match the labeling",
            ));
        }
        if edges.len() + 1 != node_count {
            return Err(Error::invalid("a tree has exactly n - 1 edges"));
        }
        let mut neighbors = vec![Vec::new(); node_count];
        let mut seen = BTreeSet::new();
        for &(u, v) in edges {
            if u >= node_count || v >= node_count || u == v {
                return Err(Error::invalid(format!("bad edge ({u}, {v})")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::invalid(format!("repeated edge ({u}, {v})")));
            }
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        let mut reached = vec![false; node_count];
        let mut stack = vec![0];
        reached[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &neighbors[u] {
                if !reached[v] {
                    reached[v] = true;
                    stack.push(v);
                }
            }
        }
        if reached.iter().any(|&r| !r) {
            return Err(Error::invalid("tree is not connected"));
        }
        let mut labels = BTreeSet::new();
        for node in 0..node_count {
            match leaf_of[node] {
                Some(label) => {
                    if neighbors[node].len() > 1 {
                        return Err(Error::invalid("labeled nodes must have degree at most one"));
                    }
                    if !labels.insert(label) {
                        return Err(Error::invalid(format!("leaf label {label} repeats")));
                    }
                }
                None => {
                    if neighbors[node].len() != 3 {
                        return Err(Error::invalid(
                            "unlabeled nodes must have degree exactly three",
                        ));
                    }
                }
            }
        }
        Ok(UnrootedTree { neighbors, leaf_of })
    }

    pub fn node_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.neighbors[node]
    }

    pub fn leaf_label(&self, node: usize) -> Option<usize> {
        self.leaf_of[node]
    }

    pub fn node_of_leaf(&self, leaf: usize) -> Option<usize> {
        self.leaf_of.iter().position(|&l| l == Some(leaf))
    }

    /// Normalized edge list in ascending order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, list) in self.neighbors.iter().enumerate() {
            for &v in list {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// The unique path between two nodes, endpoints included.
    pub fn path(&self, from: usize, to: usize) -> Vec<usize> {
        let mut previous = vec![usize::MAX; self.node_count()];
        previous[from] = from;
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            if u == to {
                break;
            }
            for &v in &self.neighbors[u] {
                if previous[v] == usize::MAX {
                    previous[v] = u;
                    queue.push_back(v);
                }
            }
        }
        let mut path = vec![to];
        let mut node = to;
        while node != from {
            node = previous[node];
            path.push(node);
        }
        path.reverse();
        path
    }
}

/// Whether `tree` satisfies every quartet of `qs`: the two paths of each
/// quartet must be vertex-disjoint. Errors when the tree does not carry
/// exactly the instance leaves.
pub fn quartets_satisfied(qs: &QuartetSet, tree: &UnrootedTree) -> Result<bool, Error> {
    let mut nodes = Vec::with_capacity(qs.leaf_count());
    for leaf in 0..qs.leaf_count() {
        match tree.node_of_leaf(leaf) {
            Some(node) => nodes.push(node),
            None => {
                return Err(Error::invalid(format!(
                    "tree does not carry instance leaf {leaf}"
                )))
            }
        }
    }
    for node in 0..tree.node_count() {
        if let Some(label) = tree.leaf_label(node) {
            if label >= qs.leaf_count() {
                return Err(Error::invalid(format!(
                    "tree carries unknown leaf label {label}"
                )));
            }
        }
    }
    Ok(qs.quartets().iter().all(|&[x, y, u, v]| {
        let side: BTreeSet<usize> = tree.path(nodes[x], nodes[y]).into_iter().collect();
        tree.path(nodes[u], nodes[v])
            .iter()
            .all(|node| !side.contains(node))
    }))
}

/// Runs `visit` on the edge list of every unrooted topology over
/// `leaf_count` leaves. Leaves take node ids `0..leaf_count`, internal
/// nodes follow; trees are generated by inserting each next leaf into
/// every edge of every smaller tree, edges in ascending order.
fn for_each_topology(
    leaf_count: usize,
    visit: &mut impl FnMut(&BTreeSet<(usize, usize)>) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let mut edges = BTreeSet::new();
    if leaf_count == 1 {
        return visit(&edges);
    }
    if leaf_count == 2 {
        edges.insert((0, 1));
        return visit(&edges);
    }
    let center = leaf_count;
    edges.insert((0, center));
    edges.insert((1, center));
    edges.insert((2, center));
    grow(leaf_count, 3, &edges, visit)
}

fn grow(
    leaf_count: usize,
    next_leaf: usize,
    edges: &BTreeSet<(usize, usize)>,
    visit: &mut impl FnMut(&BTreeSet<(usize, usize)>) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if next_leaf == leaf_count {
        return visit(edges);
    }
    let joint = leaf_count + next_leaf - 2;
    for &(u, v) in edges.iter() {
        let mut grown = edges.clone();
        grown.remove(&(u, v));
        grown.insert((u.min(joint), u.max(joint)));
        grown.insert((v.min(joint), v.max(joint)));
        grown.insert((next_leaf, joint));
        grow(leaf_count, next_leaf + 1, &grown, visit)?;
    }
    ControlFlow::Continue(())
}

/// Exhaustively searches the unrooted topologies over the instance leaves
/// for one satisfying every quartet. The leaf count is bounded by
/// `caps.quartet_leaves`.
pub fn solve_quartets(qs: &QuartetSet, caps: &Caps) -> Result<Option<UnrootedTree>, Error> {
    let n = qs.leaf_count();
    Caps::check("quartet leaves", n as u128, caps.quartet_leaves)?;
    let leaf_of = |count: usize| {
        (0..count)
            .map(|node| if node < n { Some(node) } else { None })
            .collect::<Vec<_>>()
    };
    let mut found = None;
    let mut error = None;
    let _ = for_each_topology(n, &mut |edges| {
        let count = edges.len() + 1;
        let edge_list: Vec<(usize, usize)> = edges.iter().copied().collect();
        let tree = match UnrootedTree::new(count.max(1), &edge_list, leaf_of(count.max(1))) {
            Ok(tree) => tree,
            Err(e) => {
                error = Some(e);
                return ControlFlow::Break(());
            }
        };
        match quartets_satisfied(qs, &tree) {
            Ok(true) => {
                found = Some(tree);
                ControlFlow::Break(())
            }
            Ok(false) => ControlFlow::Continue(()),
            Err(e) => {
                error = Some(e);
                ControlFlow::Break(())
            }
        }
    });
    match error {
        Some(e) => Err(e),
        None => Ok(found),
    }
}
