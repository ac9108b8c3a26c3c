//! Partial tree descriptions: find a rooted forest realizing required
//! strict-ancestor arcs while avoiding forbidden ones.

use std::iter::repeat_n;

use itertools::Itertools;

use crate::caps::Caps;
use crate::error::Error;

use super::betweenness::validate_names;

/// A partial tree description over named vertices: `anc` arcs `(u, v)`
/// require `u` to be a strict ancestor of `v`, `nonanc` arcs forbid it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDescription {
    vertices: Vec<String>,
    anc: Vec<(usize, usize)>,
    nonanc: Vec<(usize, usize)>,
}

impl TreeDescription {
    /// Validates vertex names (non-empty, distinct) and arc ranges.
    pub fn new<S: Into<String>>(
        vertices: impl IntoIterator<Item = S>,
        anc: Vec<(usize, usize)>,
        nonanc: Vec<(usize, usize)>,
    ) -> Result<Self, Error> {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        validate_names(&vertices)?;
        for &(u, v) in anc.iter().chain(&nonanc) {
            if u >= vertices.len() || v >= vertices.len() {
                return Err(Error::invalid(format!(
                    "arc ({u}, {v}) is out of range for {} vertices",
                    vertices.len()
                )));
            }
        }
        Ok(TreeDescription {
            vertices,
            anc,
            nonanc,
        })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn anc(&self) -> &[(usize, usize)] {
        &self.anc
    }

    pub fn nonanc(&self) -> &[(usize, usize)] {
        &self.nonanc
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }
}

/// A rooted forest as a parent vector; roots have no parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedForest {
    parent: Vec<Option<usize>>,
}

impl RootedForest {
    /// Validates ranges and acyclicity.
    pub fn new(parent: Vec<Option<usize>>) -> Result<Self, Error> {
        let n = parent.len();
        for (node, &p) in parent.iter().enumerate() {
            match p {
                Some(p) if p >= n => {
                    return Err(Error::invalid(format!("parent index {p} out of range")))
                }
                Some(p) if p == node => {
                    return Err(Error::invalid(format!("vertex {node} is its own parent")))
                }
                _ => {}
            }
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
        Ok(RootedForest { parent })
    }

    pub fn parent(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    /// Whether `u` lies strictly above `v` on its path to a root.
    pub fn is_strict_ancestor(&self, u: usize, v: usize) -> bool {
        let mut node = v;
        while let Some(p) = self.parent[node] {
            if p == u {
                return true;
            }
            node = p;
        }
        false
    }
}

/// Whether `forest` realizes every required arc and avoids every forbidden
/// one. Errors on a vertex count mismatch.
pub fn description_satisfied(td: &TreeDescription, forest: &RootedForest) -> Result<bool, Error> {
    if forest.node_count() != td.vertex_count() {
        return Err(Error::invalid(
            "forest and description disagree on the vertex count",
        ));
    }
    Ok(td
        .anc()
        .iter()
        .all(|&(u, v)| forest.is_strict_ancestor(u, v))
        && td
            .nonanc()
            .iter()
            .all(|&(u, v)| !forest.is_strict_ancestor(u, v)))
}

/// Exhaustively searches rooted forests on the vertex set for one
/// realizing the description.
///
/// Parent vectors are tried in lexicographic order (root first, then lower
/// parents), so the first hit is deterministic. The vertex count is
/// bounded by `caps.tree_description_vertices`.
pub fn solve_tree_description(
    td: &TreeDescription,
    caps: &Caps,
) -> Result<Option<RootedForest>, Error> {
    let n = td.vertex_count();
    Caps::check(
        "tree description vertices",
        n as u128,
        caps.tree_description_vertices,
    )?;
    for digits in repeat_n(0..=n, n).multi_cartesian_product() {
        // Digit 0 means root; digit j + 1 means parent j.
        let parent: Vec<Option<usize>> = digits
            .iter()
            .map(|&d| if d == 0 { None } else { Some(d - 1) })
            .collect();
        if parent
            .iter()
            .enumerate()
            .any(|(node, &p)| p == Some(node))
        {
            continue;
        }
        let Ok(forest) = RootedForest::new(parent) else {
            continue;
        };
        if description_satisfied(td, &forest)? {
            return Ok(Some(forest));
        }
    }
    if n == 0 {
        // The empty forest realizes the empty description.
        return Ok(Some(RootedForest::new(Vec::new())?));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn single_required_arc_becomes_an_edge() {
        let td = TreeDescription::new(["a", "b"], vec![(0, 1)], Vec::new()).unwrap();
        let forest = solve_tree_description(&td, &caps()).unwrap().unwrap();
        assert_eq!(forest.parent(), &[None, Some(0)]);
    }

    #[test]
    fn mutual_ancestorship_is_impossible() {
        let td = TreeDescription::new(["a", "b"], vec![(0, 1), (1, 0)], Vec::new()).unwrap();
        assert_eq!(solve_tree_description(&td, &caps()).unwrap(), None);
    }

    #[test]
    fn contradictory_requirements_are_impossible() {
        let td = TreeDescription::new(["a", "b"], vec![(0, 1)], vec![(0, 1)]).unwrap();
        assert_eq!(solve_tree_description(&td, &caps()).unwrap(), None);
    }

    #[test]
    fn self_ancestorship_is_never_strict() {
        let td = TreeDescription::new(["a"], vec![(0, 0)], Vec::new()).unwrap();
        assert_eq!(solve_tree_description(&td, &caps()).unwrap(), None);
        let td = TreeDescription::new(["a"], Vec::new(), vec![(0, 0)]).unwrap();
        assert!(solve_tree_description(&td, &caps()).unwrap().is_some());
    }

    #[test]
    fn transitive_chain_over_four_vertices() {
        let td = TreeDescription::new(
            ["a", "b", "c", "d"],
            vec![(0, 1), (1, 2), (2, 3), (0, 3)],
            vec![(3, 0)],
        )
        .unwrap();
        let forest = solve_tree_description(&td, &caps()).unwrap().unwrap();
        assert!(description_satisfied(&td, &forest).unwrap());
        assert!(forest.is_strict_ancestor(0, 3));
    }

    #[test]
    fn ancestorship_may_skip_generations() {
        // anc is path reachability, not the parent relation itself.
        let td = TreeDescription::new(["a", "b", "c"], vec![(0, 2), (1, 2)], Vec::new()).unwrap();
        let forest = solve_tree_description(&td, &caps()).unwrap().unwrap();
        assert!(description_satisfied(&td, &forest).unwrap());
        // One of a, b must sit above the other, both above c.
        assert!(forest.is_strict_ancestor(0, 1) || forest.is_strict_ancestor(1, 0));
    }

    #[test]
    fn vertex_cap_is_enforced() {
        let names: Vec<String> = (0..8).map(|i| i.to_string()).collect();
        let td = TreeDescription::new(names, Vec::new(), Vec::new()).unwrap();
        assert!(matches!(
            solve_tree_description(&td, &caps()),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn forest_validation_catches_cycles_and_self_loops() {
        assert!(RootedForest::new(vec![Some(1), Some(0)]).is_err());
        assert!(RootedForest::new(vec![Some(0)]).is_err());
        assert!(RootedForest::new(vec![None, Some(0), Some(1)]).is_ok());
    }
}
