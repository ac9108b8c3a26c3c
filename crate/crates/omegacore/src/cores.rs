//! Core recognition and computation for finite structures.
//!
//! A finite structure is a core when every endomorphism is an embedding
//! (equivalently, an automorphism). Over a finite domain an endomorphism is
//! an embedding exactly when it is injective, so a witness against being a
//! core is an endomorphism that identifies two elements. The core of a
//! structure is the induced substructure on the image of a suitable
//! endomorphism; it is homomorphically equivalent to the original and unique
//! up to isomorphism.

use std::collections::BTreeSet;

use crate::caps::Caps;
use crate::error::Error;
use crate::morphisms::{
    self, automorphisms, classify, enumerate_homomorphisms, find_isomorphism, Mapping, SearchSpec,
};
use crate::structures::FinStructure;

/// Result of a core check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreCheck {
    pub is_core: bool,
    /// When not a core: the lexicographically least non-injective
    /// endomorphism.
    pub witness: Option<Mapping>,
}

/// A computed core together with the maps tying it to the original.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreResult {
    /// The core, renumbered over `0..inclusion.len()`.
    pub core: FinStructure,
    /// Original elements the core lives on, ascending; position `i` is core
    /// element `i`.
    pub inclusion: Vec<usize>,
    /// Retraction from the original onto the core (values are core
    /// elements). Composing with `inclusion` is the identity on the core.
    pub retraction: Mapping,
}

/// How to pick the endomorphism used in each reduction round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionStrategy {
    /// Lexicographically least witness.
    LeastWitness,
    /// Lexicographically greatest witness.
    GreatestWitness,
}

/// Report from computing a structure's core along several strategies.
#[derive(Debug, Clone)]
pub struct UniquenessReport {
    /// Whether all computed cores are pairwise isomorphic.
    pub all_isomorphic: bool,
    /// One result per requested strategy, in order.
    pub results: Vec<CoreResult>,
}

fn check_domain_cap(s: &FinStructure, caps: &Caps) -> Result<(), Error> {
    Caps::check(
        "core search domain",
        s.domain_size() as u128,
        caps.automorphism_domain,
    )
}

/// The extreme non-injective endomorphism of `s`, if any.
///
/// Every non-injective endomorphism identifies some pair of elements, so the
/// extreme one is the extreme over per-pair searches that force the pair
/// equal.
fn non_injective_endomorphism(
    s: &FinStructure,
    strategy: ReductionStrategy,
    caps: &Caps,
) -> Result<Option<Mapping>, Error> {
    check_domain_cap(s, caps)?;
    let n = s.domain_size();
    let descending = matches!(strategy, ReductionStrategy::GreatestWitness);
    let mut best: Option<Mapping> = None;
    for a in 0..n {
        for b in a + 1..n {
            let mut merged = vec![None; n];
            merged[b] = Some(a);
            let spec = SearchSpec {
                descending,
                merged,
                ..SearchSpec::homs()
            };
            if let Some(found) = morphisms::first_solution(s, s, &spec)? {
                let better = match &best {
                    None => true,
                    Some(current) => match strategy {
                        ReductionStrategy::LeastWitness => found < *current,
                        ReductionStrategy::GreatestWitness => found > *current,
                    },
                };
                if better {
                    best = Some(found);
                }
            }
        }
    }
    Ok(best)
}

/// Whether `s` is a core; when it is not, the lexicographically least
/// non-injective endomorphism is returned as witness.
pub fn is_core(s: &FinStructure, caps: &Caps) -> Result<CoreCheck, Error> {
    let witness = non_injective_endomorphism(s, ReductionStrategy::LeastWitness, caps)?;
    Ok(CoreCheck {
        is_core: witness.is_none(),
        witness,
    })
}

/// Computes the core of `s` by repeatedly retracting along the
/// lexicographically least non-injective endomorphism.
pub fn compute_core(s: &FinStructure, caps: &Caps) -> Result<CoreResult, Error> {
    compute_core_with(s, ReductionStrategy::LeastWitness, caps)
}

/// Computes the core of `s`, picking each round's endomorphism by
/// `strategy`. All strategies yield isomorphic cores.
pub fn compute_core_with(
    s: &FinStructure,
    strategy: ReductionStrategy,
    caps: &Caps,
) -> Result<CoreResult, Error> {
    check_domain_cap(s, caps)?;
    let n = s.domain_size();
    let mut current = s.clone();
    // Original elements the current structure lives on, ascending.
    let mut inclusion: Vec<usize> = (0..n).collect();
    // For each original element, the current-local index of its image.
    let mut retract_local: Vec<usize> = (0..n).collect();

    while let Some(h) = non_injective_endomorphism(&current, strategy, caps)? {
        let image: Vec<usize> = h
            .values()
            .iter()
            .copied()
            .collect::<BTreeSet<usize>>()
            .into_iter()
            .collect();
        let mut position = vec![usize::MAX; current.domain_size()];
        for (new, &local) in image.iter().enumerate() {
            position[local] = new;
        }
        current = current.induced(&image)?;
        inclusion = image.iter().map(|&local| inclusion[local]).collect();
        for r in retract_local.iter_mut() {
            *r = position[h.apply(*r)];
        }
    }

    Ok(CoreResult {
        core: current,
        inclusion,
        retraction: Mapping::new(retract_local),
    })
}

/// Whether homomorphisms exist in both directions between `a` and `b`.
pub fn homomorphically_equivalent(a: &FinStructure, b: &FinStructure) -> Result<bool, Error> {
    Ok(morphisms::exists_homomorphism(a, b)? && morphisms::exists_homomorphism(b, a)?)
}

/// Computes the core along each strategy and checks the results are pairwise
/// isomorphic. At least two strategies are required for the check to carry
/// weight.
pub fn verify_core_uniqueness(
    s: &FinStructure,
    strategies: &[ReductionStrategy],
    caps: &Caps,
) -> Result<UniquenessReport, Error> {
    if strategies.len() < 2 {
        return Err(Error::invalid(
            "core uniqueness needs at least two strategies to compare",
        ));
    }
    let results: Vec<CoreResult> = strategies
        .iter()
        .map(|&strategy| compute_core_with(s, strategy, caps))
        .collect::<Result<_, _>>()?;
    let mut all_isomorphic = true;
    for i in 0..results.len() {
        for j in i + 1..results.len() {
            if find_isomorphism(&results[i].core, &results[j].core)?.is_none() {
                all_isomorphic = false;
            }
        }
    }
    Ok(UniquenessReport {
        all_isomorphic,
        results,
    })
}

/// Checks that the endomorphisms of a core are exactly its automorphisms, by
/// enumerating both sides independently.
///
/// Fails with [`Error::NotACore`] when `s` is not a core.
pub fn end_equals_aut(s: &FinStructure, caps: &Caps) -> Result<bool, Error> {
    let check = is_core(s, caps)?;
    if !check.is_core {
        return Err(Error::NotACore(
            "endomorphism monoid comparison expects a core".into(),
        ));
    }
    let endos = enumerate_homomorphisms(s, s, None)?;
    let auts = automorphisms(s, caps)?;
    if endos != auts {
        return Ok(false);
    }
    // Belt and braces: confirm each listed endomorphism really is an
    // automorphism under the independent classifier.
    for m in &endos {
        if !classify(m, s, s)?.is_isomorphism {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> FinStructure {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        FinStructure::graph(n, &edges).unwrap()
    }

    fn path(n: usize) -> FinStructure {
        let edges: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        FinStructure::graph(n, &edges).unwrap()
    }

    fn complete(n: usize) -> FinStructure {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        FinStructure::graph(n, &edges).unwrap()
    }

    /// Disjoint union for tests; `b`'s elements are shifted past `a`'s.
    fn disjoint_union(a: &FinStructure, b: &FinStructure) -> FinStructure {
        assert_eq!(a.signature(), b.signature());
        let shift = a.domain_size();
        let relations: Vec<(String, Vec<Vec<usize>>)> = a
            .signature()
            .symbols()
            .iter()
            .enumerate()
            .map(|(idx, sym)| {
                let mut tuples: Vec<Vec<usize>> = a.tuples(idx).iter().cloned().collect();
                tuples.extend(
                    b.tuples(idx)
                        .iter()
                        .map(|t| t.iter().map(|&e| e + shift).collect::<Vec<usize>>()),
                );
                (sym.name.clone(), tuples)
            })
            .collect();
        FinStructure::new(
            a.signature().clone(),
            shift + b.domain_size(),
            relations,
        )
        .unwrap()
    }

    #[test]
    fn complete_graphs_and_odd_cycles_are_cores() {
        let caps = Caps::default();
        for s in [complete(1), complete(2), complete(3), cycle(5)] {
            let check = is_core(&s, &caps).unwrap();
            assert!(check.is_core, "{}", s.canonical_key());
            assert!(check.witness.is_none());
        }
    }

    #[test]
    fn path_witness_is_the_least_fold() {
        let caps = Caps::default();
        let check = is_core(&path(3), &caps).unwrap();
        assert!(!check.is_core);
        assert_eq!(check.witness.unwrap().values(), &[0, 1, 0]);
    }

    #[test]
    fn even_cycle_witness_is_the_least_fold() {
        let caps = Caps::default();
        let check = is_core(&cycle(4), &caps).unwrap();
        assert_eq!(check.witness.unwrap().values(), &[0, 1, 0, 1]);
    }

    #[test]
    fn core_of_even_cycle_is_an_edge() {
        let caps = Caps::default();
        let result = compute_core(&cycle(4), &caps).unwrap();
        assert_eq!(result.core, complete(2));
        assert_eq!(result.inclusion, vec![0, 1]);
        assert_eq!(result.retraction.values(), &[0, 1, 0, 1]);
    }

    #[test]
    fn core_of_union_with_dominating_component() {
        // An edge next to a triangle retracts onto the triangle.
        let caps = Caps::default();
        let s = disjoint_union(&complete(2), &complete(3));
        let result = compute_core(&s, &caps).unwrap();
        assert_eq!(result.inclusion, vec![2, 3, 4]);
        assert!(find_isomorphism(&result.core, &complete(3))
            .unwrap()
            .is_some());
        assert_eq!(result.retraction.values(), &[0, 1, 0, 1, 2]);
    }

    #[test]
    fn core_result_maps_verify() {
        let caps = Caps::default();
        for s in [cycle(4), cycle(6), path(5), disjoint_union(&path(3), &complete(3))] {
            let result = compute_core(&s, &caps).unwrap();
            // Retraction is a homomorphism onto the core.
            let flags = classify(&result.retraction, &s, &result.core).unwrap();
            assert!(flags.is_homomorphism);
            // Inclusion is ascending and induces the core.
            let mut sorted = result.inclusion.clone();
            sorted.sort();
            assert_eq!(sorted, result.inclusion);
            assert_eq!(s.induced(&result.inclusion).unwrap(), result.core);
            // Retraction restricted to the core is the identity.
            for (i, &global) in result.inclusion.iter().enumerate() {
                assert_eq!(result.retraction.apply(global), i);
            }
            // The core is a core and equivalent to the original.
            assert!(is_core(&result.core, &caps).unwrap().is_core);
            assert!(homomorphically_equivalent(&s, &result.core).unwrap());
        }
    }

    #[test]
    fn compute_core_is_idempotent() {
        let caps = Caps::default();
        let first = compute_core(&cycle(6), &caps).unwrap();
        let again = compute_core(&first.core, &caps).unwrap();
        assert_eq!(again.core, first.core);
        assert_eq!(again.inclusion, (0..first.core.domain_size()).collect::<Vec<_>>());
        assert_eq!(again.retraction, Mapping::identity(first.core.domain_size()));
    }

    #[test]
    fn strategies_agree_up_to_isomorphism() {
        let caps = Caps::default();
        let s = cycle(4);
        let report = verify_core_uniqueness(
            &s,
            &[
                ReductionStrategy::LeastWitness,
                ReductionStrategy::GreatestWitness,
            ],
            &caps,
        )
        .unwrap();
        assert!(report.all_isomorphic);
        // The greatest strategy lands on the top edge, the least on the
        // bottom edge; both are single edges.
        assert_eq!(report.results[0].inclusion, vec![0, 1]);
        assert_eq!(report.results[1].inclusion, vec![2, 3]);
    }

    #[test]
    fn uniqueness_requires_two_strategies() {
        let caps = Caps::default();
        assert!(verify_core_uniqueness(&cycle(4), &[ReductionStrategy::LeastWitness], &caps).is_err());
    }

    #[test]
    fn equivalence_examples() {
        assert!(homomorphically_equivalent(&cycle(4), &complete(2)).unwrap());
        assert!(homomorphically_equivalent(&cycle(6), &complete(2)).unwrap());
        assert!(!homomorphically_equivalent(&cycle(5), &complete(2)).unwrap());
        assert!(!homomorphically_equivalent(&complete(3), &cycle(5)).unwrap());
    }

    #[test]
    fn endomorphisms_of_cores_are_automorphisms() {
        let caps = Caps::default();
        for s in [complete(3), cycle(5), complete(1)] {
            assert!(end_equals_aut(&s, &caps).unwrap(), "{}", s.canonical_key());
        }
    }

    #[test]
    fn end_equals_aut_rejects_non_cores() {
        let caps = Caps::default();
        assert!(matches!(
            end_equals_aut(&path(3), &caps),
            Err(Error::NotACore(_))
        ));
    }

    #[test]
    fn expansion_of_core_by_singleton_is_core() {
        let caps = Caps::default();
        let k3 = complete(3);
        let expanded = k3.expand("C1", 1, &[vec![0]]).unwrap();
        assert!(is_core(&expanded, &caps).unwrap().is_core);
        assert!(end_equals_aut(&expanded, &caps).unwrap());
    }

    #[test]
    fn core_cap_is_enforced() {
        let caps = Caps {
            automorphism_domain: 3,
            ..Caps::default()
        };
        assert!(matches!(
            compute_core(&cycle(4), &caps),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn loop_collapses_everything() {
        // A loop absorbs the whole graph: the core is the single looped
        // vertex.
        let caps = Caps::default();
        let s = FinStructure::digraph(3, &[(0, 1), (1, 2), (2, 2)]).unwrap();
        let result = compute_core(&s, &caps).unwrap();
        assert_eq!(result.core.domain_size(), 1);
        assert_eq!(result.inclusion, vec![2]);
        assert_eq!(result.retraction.values(), &[0, 0, 0]);
    }
}
