//! Independent reference deciders for differential testing.
//!
//! Each function re-decides a template problem by a second, deliberately
//! plain method with its own enumeration order and its own satisfaction
//! checks, sharing no code with the production deciders in
//! [`crate::templates`]. Only satisfiability is reported, never a witness.

use std::iter::repeat_n;

use itertools::Itertools;

use crate::caps::Caps;
use crate::error::Error;
use crate::structures::FinStructure;
use crate::templates::{BetweennessInstance, QuartetSet, TreeDescription, TripleSet};

/// Symmetric adjacency matrix of `E`, loops on the diagonal.
fn matrix(g: &FinStructure) -> Result<Vec<Vec<bool>>, Error> {
    if g.signature().arity_of("E") != Some(2) {
        return Err(Error::invalid("expected a binary relation symbol `E`"));
    }
    let idx = g.signature().index_of("E").expect("symbol exists");
    let n = g.domain_size();
    let mut adj = vec![vec![false; n]; n];
    for tuple in g.tuples(idx) {
        adj[tuple[0]][tuple[1]] = true;
        adj[tuple[1]][tuple[0]] = true;
    }
    Ok(adj)
}

/// Triangle-freeness via the boolean square of the adjacency matrix: a
/// triangle exists exactly when some edge also has a two-step connection.
pub fn triangle_free(g: &FinStructure) -> Result<bool, Error> {
    let adj = matrix(g)?;
    let n = adj.len();
    if (0..n).any(|v| adj[v][v]) {
        return Ok(false);
    }
    let mut two_step = vec![vec![false; n]; n];
    for via in 0..n {
        for i in 0..n {
            if adj[i][via] {
                for j in 0..n {
                    if adj[via][j] {
                        two_step[i][j] = true;
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if adj[i][j] && two_step[i][j] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Two-part splits without a monochromatic triangle, tried in descending
/// mask order.
pub fn no_mono_tri(g: &FinStructure, caps: &Caps) -> Result<bool, Error> {
    let adj = matrix(g)?;
    let n = adj.len();
    if (0..n).any(|v| adj[v][v]) {
        return Ok(false);
    }
    Caps::check("partition universe bits", n as u128, caps.class_universe_bits)?;
    'mask: for mask in (0..1u64 << n).rev() {
        for side in [false, true] {
            let part: Vec<usize> = (0..n).filter(|&v| (mask >> v & 1 == 1) == side).collect();
            for (i, &a) in part.iter().enumerate() {
                for (j, &b) in part.iter().enumerate().skip(i + 1) {
                    if !adj[a][b] {
                        continue;
                    }
                    for &c in part.iter().skip(j + 1) {
                        if adj[a][c] && adj[b][c] {
                            continue 'mask;
                        }
                    }
                }
            }
        }
        return Ok(true);
    }
    Ok(false)
}

/// Betweenness satisfiability over element sequences in descending
/// lexicographic order.
pub fn betweenness(instance: &BetweennessInstance, caps: &Caps) -> Result<bool, Error> {
    let n = instance.elements().len();
    Caps::check("betweenness elements", n as u128, caps.brute_force_vars)?;
    let sequences: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    for sequence in sequences.into_iter().rev() {
        let mut position = vec![0usize; n];
        for (i, &element) in sequence.iter().enumerate() {
            position[element] = i;
        }
        let ok = instance.triples().iter().all(|&[a, b, c]| {
            (position[a] < position[b] && position[b] < position[c])
                || (position[c] < position[b] && position[b] < position[a])
        });
        if ok {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Switching-acyclicity via vertex orders: a switch set exists exactly when
/// some linear order makes the induced same-side/other-side constraints
/// two-colorable.
pub fn switching_acyclic(d: &FinStructure, caps: &Caps) -> Result<bool, Error> {
    if d.signature().arity_of("E") != Some(2) {
        return Err(Error::invalid("expected a binary relation symbol `E`"));
    }
    let idx = d.signature().index_of("E").expect("symbol exists");
    let n = d.domain_size();
    Caps::check("switching orders", n as u128, caps.brute_force_vars)?;
    let arcs: Vec<(usize, usize)> = d.tuples(idx).iter().map(|t| (t[0], t[1])).collect();
    if arcs.iter().any(|&(u, v)| u == v) {
        return Ok(false);
    }
    for order in (0..n).permutations(n) {
        let mut position = vec![0usize; n];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        // An arc going forward in the order wants both ends on the same
        // side, a backward arc wants them on different sides.
        let mut constraints: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
        for &(u, v) in &arcs {
            let differ = position[u] > position[v];
            constraints[u].push((v, differ));
            constraints[v].push((u, differ));
        }
        let mut colour: Vec<Option<bool>> = vec![None; n];
        let mut feasible = true;
        'nodes: for start in 0..n {
            if colour[start].is_some() {
                continue;
            }
            colour[start] = Some(false);
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                let cu = colour[u].expect("stacked nodes are coloured");
                for &(v, differ) in &constraints[u] {
                    let want = cu != differ;
                    match colour[v] {
                        None => {
                            colour[v] = Some(want);
                            stack.push(v);
                        }
                        Some(c) if c != want => {
                            feasible = false;
                            break 'nodes;
                        }
                        _ => {}
                    }
                }
            }
        }
        if feasible {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Rooted triple satisfiability by exhausting the binary rooted trees over
/// the leaf set, built by inserting each leaf on every edge.
pub fn rooted_triples(ts: &TripleSet, caps: &Caps) -> Result<bool, Error> {
    let n = ts.leaf_count();
    Caps::check("rooted tree leaves", n as u128, caps.quartet_leaves)?;
    let parent = vec![None];
    let label = vec![Some(0)];
    Ok(insert_tree_leaf(ts, 1, &parent, &label))
}

fn insert_tree_leaf(
    ts: &TripleSet,
    next: usize,
    parent: &[Option<usize>],
    label: &[Option<usize>],
) -> bool {
    if next == ts.leaf_count() {
        return binary_tree_satisfies(ts, parent, label);
    }
    for node in 0..parent.len() {
        // Subdivide the edge above `node` (or add a new root above it) and
        // hang the next leaf off the new joint.
        let joint = parent.len();
        let mut p = parent.to_vec();
        let mut l = label.to_vec();
        p.push(parent[node]);
        l.push(None);
        p[node] = Some(joint);
        p.push(Some(joint));
        l.push(Some(next));
        if insert_tree_leaf(ts, next + 1, &p, &l) {
            return true;
        }
    }
    false
}

fn binary_tree_satisfies(ts: &TripleSet, parent: &[Option<usize>], label: &[Option<usize>]) -> bool {
    fn chain(parent: &[Option<usize>], mut node: usize) -> Vec<usize> {
        let mut out = vec![node];
        while let Some(p) = parent[node] {
            out.push(p);
            node = p;
        }
        out
    }
    fn meet(parent: &[Option<usize>], a: usize, b: usize) -> usize {
        let upward = chain(parent, a);
        let mut node = b;
        loop {
            if upward.contains(&node) {
                return node;
            }
            node = parent[node].expect("chains meet at the root");
        }
    }
    let node_of = |leaf: usize| {
        label
            .iter()
            .position(|&l| l == Some(leaf))
            .expect("every leaf is placed")
    };
    ts.triples().iter().all(|&[x, y, z]| {
        let below = meet(parent, node_of(y), node_of(z));
        meet(parent, below, node_of(x)) != below
    })
}

/// Quartet satisfiability by exhausting unrooted topologies (leaves
/// inserted in reverse order) and checking the four-point condition on
/// path lengths instead of path disjointness.
pub fn quartets(qs: &QuartetSet, caps: &Caps) -> Result<bool, Error> {
    let n = qs.leaf_count();
    Caps::check("quartet leaves", n as u128, caps.quartet_leaves)?;
    if qs.quartets().is_empty() {
        return Ok(true);
    }
    // A quartet needs four distinct leaves, so n >= 4 here.
    let center = n;
    let edges = vec![(n - 1, center), (n - 2, center), (n - 3, center)];
    let order: Vec<usize> = (0..n - 3).rev().collect();
    Ok(insert_unrooted_leaf(qs, &order, 0, &edges))
}

fn insert_unrooted_leaf(
    qs: &QuartetSet,
    to_insert: &[usize],
    used_joints: usize,
    edges: &[(usize, usize)],
) -> bool {
    let n = qs.leaf_count();
    let [leaf, rest @ ..] = to_insert else {
        return four_point_holds(qs, edges);
    };
    let joint = n + 1 + used_joints;
    for i in 0..edges.len() {
        let (u, v) = edges[i];
        let mut grown = edges.to_vec();
        grown.remove(i);
        grown.push((u, joint));
        grown.push((v, joint));
        grown.push((*leaf, joint));
        if insert_unrooted_leaf(qs, rest, used_joints + 1, &grown) {
            return true;
        }
    }
    false
}

fn four_point_holds(qs: &QuartetSet, edges: &[(usize, usize)]) -> bool {
    let n = qs.leaf_count();
    let nodes = 2 * n - 2;
    let mut neighbours = vec![Vec::new(); nodes];
    for &(u, v) in edges {
        neighbours[u].push(v);
        neighbours[v].push(u);
    }
    let distances_from = |start: usize| {
        let mut dist = vec![usize::MAX; nodes];
        dist[start] = 0;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &neighbours[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    };
    let dist: Vec<Vec<usize>> = (0..n).map(distances_from).collect();
    qs.quartets().iter().all(|&[x, y, u, v]| {
        let near = dist[x][y] + dist[u][v];
        near < dist[x][u] + dist[y][v] && near < dist[x][v] + dist[y][u]
    })
}

/// Tree description satisfiability over parent vectors in descending
/// lexicographic order.
pub fn tree_description(td: &TreeDescription, caps: &Caps) -> Result<bool, Error> {
    let n = td.vertex_count();
    Caps::check(
        "tree description vertices",
        n as u128,
        caps.tree_description_vertices,
    )?;
    if n == 0 {
        return Ok(true);
    }
    'candidates: for digits in repeat_n((0..=n).rev(), n).multi_cartesian_product() {
        let parent: Vec<Option<usize>> = digits
            .iter()
            .map(|&d| if d == 0 { None } else { Some(d - 1) })
            .collect();
        for start in 0..n {
            let mut node = start;
            let mut steps = 0;
            while let Some(p) = parent[node] {
                if p == start || steps > n {
                    continue 'candidates;
                }
                node = p;
                steps += 1;
            }
        }
        let above = |u: usize, v: usize| {
            let mut node = v;
            while let Some(p) = parent[node] {
                if p == u {
                    return true;
                }
                node = p;
            }
            false
        };
        if td.anc().iter().all(|&(u, v)| above(u, v))
            && td.nonanc().iter().all(|&(u, v)| !above(u, v))
        {
            return Ok(true);
        }
    }
    Ok(false)
}
