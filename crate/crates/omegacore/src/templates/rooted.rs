//! Rooted triple consistency: find a rooted tree in which each constraint
//! `x:yz` places the least common ancestor of `y` and `z` strictly below
//! the least common ancestor of all three.
//!
//! Decided in polynomial time by the classic recursion on connected
//! components of an auxiliary leaf graph.

use crate::error::Error;

use super::betweenness::validate_names;

/// A rooted triple instance: named leaves and triples `[x, y, z]` read as
/// `x:yz`, i.e. `y` and `z` branch off below the meeting point with `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleSet {
    leaves: Vec<String>,
    triples: Vec<[usize; 3]>,
}

impl TripleSet {
    /// Validates leaf names (non-empty, distinct, at least one) and triples
    /// (in range, pairwise distinct entries).
    pub fn new<S: Into<String>>(
        leaves: impl IntoIterator<Item = S>,
        triples: Vec<[usize; 3]>,
    ) -> Result<Self, Error> {
        let leaves: Vec<String> = leaves.into_iter().map(Into::into).collect();
        if leaves.is_empty() {
            return Err(Error::invalid("a triple set needs at least one leaf"));
        }
        validate_names(&leaves)?;
        for triple in &triples {
            for &entry in triple {
                if entry >= leaves.len() {
                    return Err(Error::invalid(format!(
                        "triple entry {entry} is out of range for {} leaves",
                        leaves.len()
                    )));
                }
            }
            if triple[0] == triple[1] || triple[0] == triple[2] || triple[1] == triple[2] {
                return Err(Error::invalid(format!(
                    "rooted triple {triple:?} repeats a leaf"
                )));
            }
        }
        Ok(TripleSet { leaves, triples })
    }

    pub fn leaves(&self) -> &[String] {
        &self.leaves
    }

    pub fn triples(&self) -> &[[usize; 3]] {
        &self.triples
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }
}

/// A rooted tree over the leaves of a [`TripleSet`]. Instance leaves sit at
/// labeled tree leaves; internal nodes are unlabeled and have at least two
/// children (no binarization is performed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    parent: Vec<Option<usize>>,
    leaf_of: Vec<Option<usize>>,
}

impl RootedTree {
    /// Validates the shape: exactly one root, acyclic parent links, labeled
    /// nodes childless, unlabeled nodes with at least two children, labels
    /// distinct.
    pub fn new(parent: Vec<Option<usize>>, leaf_of: Vec<Option<usize>>) -> Result<Self, Error> {
        let n = parent.len();
        if n == 0 || leaf_of.len() != n {
            return Err(Error::invalid(
                "tree arrays must be non-empty and of equal length",
            ));
        }
        let mut children = vec![0usize; n];
        let mut roots = 0;
        for &p in &parent {
            match p {
                None => roots += 1,
                Some(p) if p < n => children[p] += 1,
                Some(p) => {
                    return Err(Error::invalid(format!("parent index {p} out of range")))
                }
            }
        }
        if roots != 1 {
            return Err(Error::invalid(format!("expected one root, found {roots}")));
        }
        for start in 0..n {
            let mut node = start;
            let mut steps = 0;
            while let Some(p) = parent[node] {
                node = p;
                steps += 1;
                if steps > n {
                    return Err(Error::invalid("parent links contain a cycle"));
                }
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for node in 0..n {
            match leaf_of[node] {
                Some(label) => {
                    if children[node] > 0 {
                        return Err(Error::invalid("labeled nodes must be leaves"));
                    }
                    if !seen.insert(label) {
                        return Err(Error::invalid(format!("leaf label {label} repeats")));
                    }
                }
                None => {
                    if children[node] < 2 {
                        return Err(Error::invalid(
                            "unlabeled nodes must have at least two children",
                        ));
                    }
                }
            }
        }
        Ok(RootedTree { parent, leaf_of })
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn parent_of(&self, node: usize) -> Option<usize> {
        self.parent[node]
    }

    pub fn leaf_label(&self, node: usize) -> Option<usize> {
        self.leaf_of[node]
    }

    pub fn root(&self) -> usize {
        self.parent
            .iter()
            .position(|p| p.is_none())
            .expect("validated single root")
    }

    /// The tree node carrying instance leaf `leaf`.
    pub fn node_of_leaf(&self, leaf: usize) -> Option<usize> {
        self.leaf_of.iter().position(|&l| l == Some(leaf))
    }

    /// Least common ancestor by ancestor-chain intersection.
    pub fn lca(&self, a: usize, b: usize) -> usize {
        let mut chain = Vec::new();
        let mut node = a;
        loop {
            chain.push(node);
            match self.parent[node] {
                Some(p) => node = p,
                None => break,
            }
        }
        let mut node = b;
        loop {
            if chain.contains(&node) {
                return node;
            }
            node = self.parent[node].expect("chains meet at the root");
        }
    }
}

/// Whether `tree` satisfies every triple of `ts`: for `x:yz` the meeting
/// point of `y` and `z` must lie strictly below the meeting point of all
/// three. Errors when the tree does not carry exactly the instance leaves.
pub fn triples_satisfied(ts: &TripleSet, tree: &RootedTree) -> Result<bool, Error> {
    let mut nodes = Vec::with_capacity(ts.leaf_count());
    for leaf in 0..ts.leaf_count() {
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
            if label >= ts.leaf_count() {
                return Err(Error::invalid(format!(
                    "tree carries unknown leaf label {label}"
                )));
            }
        }
    }
    Ok(ts.triples().iter().all(|&[x, y, z]| {
        let below = tree.lca(nodes[y], nodes[z]);
        tree.lca(below, nodes[x]) != below
    }))
}

/// Decides rooted triple consistency and returns a satisfying tree.
///
/// Implements the component recursion: the auxiliary graph on the current
/// leaves joins `y` and `z` for each triple `x:yz` whose three leaves are
/// all present. A connected auxiliary graph on two or more leaves is
/// inconsistent; otherwise each component becomes a child, components
/// ordered by their least leaf name, single leaves directly. With no
/// triples the result is a star, the weakest consistent tree.
pub fn solve_rooted_triples(ts: &TripleSet) -> Result<Option<RootedTree>, Error> {
    let mut parent = Vec::new();
    let mut leaf_of = Vec::new();
    let scope: Vec<usize> = (0..ts.leaf_count()).collect();
    if !build(ts, &scope, None, &mut parent, &mut leaf_of) {
        return Ok(None);
    }
    let tree = RootedTree::new(parent, leaf_of)?;
    if !triples_satisfied(ts, &tree)? {
        return Err(Error::invalid(
            "construction produced a tree violating its triples",
        ));
    }
    Ok(Some(tree))
}

fn build(
    ts: &TripleSet,
    scope: &[usize],
    above: Option<usize>,
    parent: &mut Vec<Option<usize>>,
    leaf_of: &mut Vec<Option<usize>>,
) -> bool {
    if let [leaf] = scope {
        parent.push(above);
        leaf_of.push(Some(*leaf));
        return true;
    }

    // Union the pair below each triple fully inside the scope.
    let mut component = vec![usize::MAX; ts.leaf_count()];
    for (rank, &leaf) in scope.iter().enumerate() {
        component[leaf] = rank;
    }
    let find = |component: &Vec<usize>, mut leaf: usize| {
        while component[leaf] != component[scope[component[leaf]]] {
            leaf = scope[component[leaf]];
        }
        component[leaf]
    };
    for &[x, y, z] in ts.triples() {
        if component[x] == usize::MAX || component[y] == usize::MAX || component[z] == usize::MAX {
            continue;
        }
        let ry = find(&component, y);
        let rz = find(&component, z);
        if ry != rz {
            component[scope[ry.max(rz)]] = ry.min(rz);
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of = vec![usize::MAX; scope.len()];
    for &leaf in scope {
        let root = find(&component, leaf);
        if group_of[root] == usize::MAX {
            group_of[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[group_of[root]].push(leaf);
    }
    if groups.len() == 1 {
        return false;
    }
    groups.sort_by(|a, b| min_name(ts, a).cmp(min_name(ts, b)));

    let node = parent.len();
    parent.push(above);
    leaf_of.push(None);
    for group in &groups {
        if !build(ts, group, Some(node), parent, leaf_of) {
            return false;
        }
    }
    true
}

fn min_name<'a>(ts: &'a TripleSet, group: &[usize]) -> &'a str {
    group
        .iter()
        .map(|&leaf| ts.leaves()[leaf].as_str())
        .min()
        .expect("groups are non-empty")
}
