//! The betweenness problem: number elements so that each constraint
//! `(a, b, c)` puts `b` strictly between `a` and `c`.

use itertools::Itertools;

use crate::caps::Caps;
use crate::error::Error;

/// A betweenness instance: named elements and ordered triples `(a, b, c)`
/// requiring `f(a) < f(b) < f(c)` or `f(c) < f(b) < f(a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetweennessInstance {
    elements: Vec<String>,
    triples: Vec<[usize; 3]>,
}

impl BetweennessInstance {
    /// Validates element names (distinct, non-empty) and triples (in range,
    /// pairwise distinct entries).
    pub fn new<S: Into<String>>(
        elements: impl IntoIterator<Item = S>,
        triples: Vec<[usize; 3]>,
    ) -> Result<Self, Error> {
        let elements: Vec<String> = elements.into_iter().map(Into::into).collect();
        validate_names(&elements)?;
        for triple in &triples {
            for &entry in triple {
                if entry >= elements.len() {
                    return Err(Error::invalid(format!(
                        "triple entry {entry} is out of range for {} elements",
                        elements.len()
                    )));
                }
            }
            if triple[0] == triple[1] || triple[0] == triple[2] || triple[1] == triple[2] {
                return Err(Error::invalid(format!(
                    "betweenness triple {triple:?} repeats an element"
                )));
            }
        }
        Ok(BetweennessInstance { elements, triples })
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn triples(&self) -> &[[usize; 3]] {
        &self.triples
    }
}

pub(crate) fn validate_names(names: &[String]) -> Result<(), Error> {
    let mut seen = std::collections::BTreeSet::new();
    for name in names {
        if name.is_empty() {
            return Err(Error::invalid("names must be non-empty"));
        }
        if !seen.insert(name) {
            return Err(Error::invalid(format!("duplicate name `{name}`")));
        }
    }
    Ok(())
}

/// Whether `numbering` (a rank per element) meets every triple.
pub fn numbering_satisfies(instance: &BetweennessInstance, numbering: &[usize]) -> bool {
    instance.triples.iter().all(|&[a, b, c]| {
        (numbering[a] < numbering[b] && numbering[b] < numbering[c])
            || (numbering[c] < numbering[b] && numbering[b] < numbering[a])
    })
}

/// Searches for an injective numbering `1..=n` of the elements meeting
/// every triple.
///
/// Tries all permutations in lexicographic order and returns the first hit,
/// so absence is exhaustive. The element count is bounded by
/// `caps.brute_force_vars`.
pub fn solve_betweenness(
    instance: &BetweennessInstance,
    caps: &Caps,
) -> Result<Option<Vec<usize>>, Error> {
    let n = instance.elements.len();
    Caps::check("betweenness elements", n as u128, caps.brute_force_vars)?;
    Ok((1..=n)
        .permutations(n)
        .find(|numbering| numbering_satisfies(instance, numbering)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn caps() -> Caps {
        Caps::default()
    }

    fn instance(triples: Vec<[usize; 3]>) -> BetweennessInstance {
        BetweennessInstance::new(["1", "2", "3"], triples).unwrap()
    }

    #[test]
    fn single_triple_takes_natural_order() {
        let found = solve_betweenness(&instance(vec![[0, 1, 2]]), &caps()).unwrap();
        assert_eq!(found, Some(vec![1, 2, 3]));
    }

    #[test]
    fn conflicting_middles_are_unsatisfiable() {
        // The two triples demand different middle elements.
        let found = solve_betweenness(&instance(vec![[0, 1, 2], [1, 0, 2]]), &caps()).unwrap();
        assert_eq!(found, None);
    }

    #[test]
    fn reversed_triple_is_redundant() {
        let found = solve_betweenness(&instance(vec![[0, 1, 2], [2, 1, 0]]), &caps()).unwrap();
        assert_eq!(found, Some(vec![1, 2, 3]));
    }

    #[test]
    fn returned_numbering_reverifies() {
        let inst = BetweennessInstance::new(
            ["a", "b", "c", "d"],
            vec![[0, 1, 2], [1, 2, 3], [0, 2, 3]],
        )
        .unwrap();
        let found = solve_betweenness(&inst, &caps()).unwrap().unwrap();
        assert!(numbering_satisfies(&inst, &found));
    }

    #[test]
    fn repeated_entry_is_rejected() {
        assert!(BetweennessInstance::new(["1", "2", "3"], vec![[0, 0, 2]]).is_err());
    }

    #[test]
    fn element_cap_is_enforced() {
        let names: Vec<String> = (0..9).map(|i| i.to_string()).collect();
        let inst = BetweennessInstance::new(names, Vec::new()).unwrap();
        assert!(matches!(
            solve_betweenness(&inst, &caps()),
            Err(Error::Capacity { .. })
        ));
    }
}
