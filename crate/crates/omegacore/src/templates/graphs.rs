//! Graph deciders: triangle-freeness and partitions into two
//! triangle-free parts.

use crate::caps::Caps;
use crate::error::Error;
use crate::structures::FinStructure;

/// Outcome of [`solve_triangle_free`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TriangleFreeOutcome {
    /// No loop and no triangle.
    TriangleFree,
    /// The least vertex carrying a loop.
    HasLoop(usize),
    /// The lexicographically least triangle, as an increasing vertex triple.
    HasTriangle([usize; 3]),
}

/// Outcome of [`solve_no_mono_tri`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NoMonoTriOutcome {
    /// `partition[v]` tells which of the two parts vertex `v` belongs to;
    /// neither part induces a triangle.
    Partition(Vec<bool>),
    /// Loops make the instance vacuously unsolvable; the least one is
    /// reported.
    HasLoop(usize),
    /// Every 2-partition leaves a monochromatic triangle.
    Unsatisfiable,
}

/// Builds the symmetric adjacency matrix of the `E` relation. Directed
/// input is read as its symmetric closure; loops are kept on the diagonal.
fn adjacency(g: &FinStructure) -> Result<Vec<Vec<bool>>, Error> {
    if g.signature().arity_of("E") != Some(2) {
        return Err(Error::invalid("expected a binary relation symbol `E`"));
    }
    let n = g.domain_size();
    let idx = g.signature().index_of("E").expect("symbol exists");
    let mut adj = vec![vec![false; n]; n];
    for tuple in g.tuples(idx) {
        adj[tuple[0]][tuple[1]] = true;
        adj[tuple[1]][tuple[0]] = true;
    }
    Ok(adj)
}

fn least_loop(adj: &[Vec<bool>]) -> Option<usize> {
    (0..adj.len()).find(|&v| adj[v][v])
}

/// Decides whether a graph is loopless and triangle-free; equivalently,
/// whether it maps homomorphically into the generic triangle-free graph.
/// Violations are reported as the least loop vertex, or failing that the
/// lexicographically least triangle.
pub fn solve_triangle_free(g: &FinStructure) -> Result<TriangleFreeOutcome, Error> {
    let adj = adjacency(g)?;
    if let Some(v) = least_loop(&adj) {
        return Ok(TriangleFreeOutcome::HasLoop(v));
    }
    let n = g.domain_size();
    for i in 0..n {
        for j in i + 1..n {
            if !adj[i][j] {
                continue;
            }
            for k in j + 1..n {
                if adj[i][k] && adj[j][k] {
                    return Ok(TriangleFreeOutcome::HasTriangle([i, j, k]));
                }
            }
        }
    }
    Ok(TriangleFreeOutcome::TriangleFree)
}

/// Searches for a partition of the vertices into two parts neither of which
/// induces a triangle.
///
/// Partitions are tried as an ascending binary counter with vertex 0 as the
/// least significant bit, so the first hit is deterministic. Absence is
/// exhaustive over all `2^n` partitions; `n` is bounded by
/// `caps.class_universe_bits`.
pub fn solve_no_mono_tri(g: &FinStructure, caps: &Caps) -> Result<NoMonoTriOutcome, Error> {
    let adj = adjacency(g)?;
    if let Some(v) = least_loop(&adj) {
        return Ok(NoMonoTriOutcome::HasLoop(v));
    }
    let n = g.domain_size();
    Caps::check("partition universe bits", n as u128, caps.class_universe_bits)?;
    for mask in 0u64..1u64 << n {
        let side = |v: usize| mask >> v & 1 == 1;
        if !has_monochromatic_triangle(&adj, &side) {
            return Ok(NoMonoTriOutcome::Partition((0..n).map(side).collect()));
        }
    }
    Ok(NoMonoTriOutcome::Unsatisfiable)
}

fn has_monochromatic_triangle(adj: &[Vec<bool>], side: &dyn Fn(usize) -> bool) -> bool {
    let n = adj.len();
    for i in 0..n {
        for j in i + 1..n {
            if !adj[i][j] || side(i) != side(j) {
                continue;
            }
            for k in j + 1..n {
                if side(k) == side(i) && adj[i][k] && adj[j][k] {
                    return true;
                }
            }
        }
    }
    false
}
