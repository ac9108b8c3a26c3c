//! Switching-acyclicity: partition the vertices of a digraph so that
//! reversing exactly the arcs crossing the partition leaves no directed
//! cycle.

use crate::caps::Caps;
use crate::error::Error;
use crate::structures::FinStructure;

/// Outcome of [`solve_switching_acyclic`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SwitchingOutcome {
    /// `partition[v]` tells which side vertex `v` is on; switching the
    /// crossing arcs yields an acyclic digraph.
    Partition(Vec<bool>),
    /// A loop survives every switch; the least one is reported.
    HasLoop(usize),
    /// Every 2-partition leaves a directed cycle after switching.
    Unsatisfiable,
}

/// The arcs of `d` after switching along `side`: crossing arcs reverse,
/// internal arcs stay.
pub fn switched_arcs(
    d: &FinStructure,
    side: &[bool],
) -> Result<Vec<(usize, usize)>, Error> {
    if d.signature().arity_of("E") != Some(2) {
        return Err(Error::invalid("expected a binary relation symbol `E`"));
    }
    let idx = d.signature().index_of("E").expect("symbol exists");
    Ok(d.tuples(idx)
        .iter()
        .map(|t| {
            if side[t[0]] != side[t[1]] {
                (t[1], t[0])
            } else {
                (t[0], t[1])
            }
        })
        .collect())
}

/// Kahn peeling: whether the arc set admits no topological order.
pub fn has_directed_cycle(n: usize, arcs: &[(usize, usize)]) -> bool {
    let mut indegree = vec![0usize; n];
    for &(_, v) in arcs {
        indegree[v] += 1;
    }
    let mut queue: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut peeled = 0;
    while let Some(u) = queue.pop() {
        peeled += 1;
        for &(x, y) in arcs {
            if x == u {
                indegree[y] -= 1;
                if indegree[y] == 0 {
                    queue.push(y);
                }
            }
        }
    }
    peeled < n
}

/// Searches for a 2-partition whose switch makes the digraph acyclic.
///
/// Partitions are tried as an ascending binary counter with vertex 0 as
/// the least significant bit; the first acyclic switch wins. Loops are
/// unswitchable and reported up front. `n` is bounded by
/// `caps.class_universe_bits`.
pub fn solve_switching_acyclic(
    d: &FinStructure,
    caps: &Caps,
) -> Result<SwitchingOutcome, Error> {
    if d.signature().arity_of("E") != Some(2) {
        return Err(Error::invalid("expected a binary relation symbol `E`"));
    }
    let idx = d.signature().index_of("E").expect("symbol exists");
    if let Some(t) = d.tuples(idx).iter().find(|t| t[0] == t[1]) {
        return Ok(SwitchingOutcome::HasLoop(t[0]));
    }
    let n = d.domain_size();
    Caps::check("partition universe bits", n as u128, caps.class_universe_bits)?;
    for mask in 0u64..1u64 << n {
        let side: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
        let arcs = switched_arcs(d, &side)?;
        if !has_directed_cycle(n, &arcs) {
            return Ok(SwitchingOutcome::Partition(side));
        }
    }
    Ok(SwitchingOutcome::Unsatisfiable)
}
