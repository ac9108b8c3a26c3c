//! Seeded random input generators for tests and benchmarks.
//!
//! Every generator draws from a caller-supplied random stream, so a corpus
//! is reproducible from a single seed. Densities are themselves sampled
//! uniformly per relation, spreading the corpus from near-empty to
//! near-complete inputs.

use std::iter::repeat_n;

use itertools::Itertools;
use rand::Rng;

use crate::structures::{FinStructure, Signature};
use crate::templates::{QuartetSet, TripleSet};

/// A random structure with `1..=max_domain` elements and one or two binary
/// relations (`E`, optionally `F`), each filled at a uniformly sampled
/// density. Loops are allowed.
pub fn random_structure(rng: &mut impl Rng, max_domain: usize) -> FinStructure {
    let n = rng.random_range(1..=max_domain);
    let symbols: &[&str] = if rng.random::<bool>() {
        &["E"]
    } else {
        &["E", "F"]
    };
    let relations: Vec<(String, Vec<Vec<usize>>)> = symbols
        .iter()
        .map(|&name| {
            let density = rng.random::<f64>();
            let tuples = (0..n)
                .cartesian_product(0..n)
                .filter(|_| rng.random::<f64>() < density)
                .map(|(u, v)| vec![u, v])
                .collect();
            (name.to_string(), tuples)
        })
        .collect();
    let signature = Signature::new(symbols.iter().map(|&s| (s, 2))).expect("fixed symbols");
    FinStructure::new(signature, n, relations).expect("generated tuples are in range")
}

/// A random instance over `signature` with `1..=max_vars` variables, each
/// relation filled at a uniformly sampled density.
pub fn random_instance(
    rng: &mut impl Rng,
    signature: &Signature,
    max_vars: usize,
) -> FinStructure {
    let vars = rng.random_range(1..=max_vars);
    let relations: Vec<(String, Vec<Vec<usize>>)> = signature
        .symbols()
        .iter()
        .map(|sym| {
            let density = rng.random::<f64>();
            let tuples = repeat_n(0..vars, sym.arity)
                .multi_cartesian_product()
                .filter(|_| rng.random::<f64>() < density)
                .collect();
            (sym.name.clone(), tuples)
        })
        .collect();
    FinStructure::new(signature.clone(), vars, relations).expect("generated tuples are in range")
}

/// Leaf names `l0, l1, ...` used by the random phylogeny generators.
pub fn leaf_names(count: usize) -> Vec<String> {
    (0..count).map(|i| format!("l{i}")).collect()
}

/// A random set of `0..=max_triples` rooted triples over `leaf_count`
/// leaves. Requires at least three leaves.
pub fn random_triple_set(rng: &mut impl Rng, leaf_count: usize, max_triples: usize) -> TripleSet {
    assert!(leaf_count >= 3, "rooted triples need three leaves");
    let count = rng.random_range(0..=max_triples);
    let triples = (0..count)
        .map(|_| pick_distinct::<3>(rng, leaf_count))
        .collect();
    TripleSet::new(leaf_names(leaf_count), triples).expect("generated triples are valid")
}

/// A random set of `0..=max_quartets` quartets over `leaf_count` leaves.
/// Requires at least four leaves.
pub fn random_quartet_set(
    rng: &mut impl Rng,
    leaf_count: usize,
    max_quartets: usize,
) -> QuartetSet {
    assert!(leaf_count >= 4, "quartets need four leaves");
    let count = rng.random_range(0..=max_quartets);
    let quartets = (0..count)
        .map(|_| pick_distinct::<4>(rng, leaf_count))
        .collect();
    QuartetSet::new(leaf_names(leaf_count), quartets).expect("generated quartets are valid")
}

/// `K` distinct values from `0..universe`, in random order.
fn pick_distinct<const K: usize>(rng: &mut impl Rng, universe: usize) -> [usize; K] {
    let mut pool: Vec<usize> = (0..universe).collect();
    let mut out = [0usize; K];
    for slot in &mut out {
        let i = rng.random_range(0..pool.len());
        *slot = pool.swap_remove(i);
    }
    out
}
