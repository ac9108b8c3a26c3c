//! Deciders for small constraint problems whose natural templates are
//! infinite: triangle-freeness, triangle-free 2-colourings, betweenness,
//! switching-acyclicity, rooted triple consistency, quartet compatibility,
//! and partial tree descriptions.
//!
//! Each decider returns a witness that re-verifies against the problem's
//! defining condition through an independent checker in the same submodule.
//! The hard problems are decided by exact exponential search under the
//! relevant [`crate::Caps`] bound; only rooted triple consistency has a
//! polynomial algorithm.

pub mod betweenness;
pub mod descriptions;
pub mod graphs;
pub mod quartets;
pub mod rooted;
pub mod switching;

pub use betweenness::{numbering_satisfies, solve_betweenness, BetweennessInstance};
pub use descriptions::{
    description_satisfied, solve_tree_description, RootedForest, TreeDescription,
};
pub use graphs::{solve_no_mono_tri, solve_triangle_free, NoMonoTriOutcome, TriangleFreeOutcome};
pub use quartets::{quartets_satisfied, solve_quartets, QuartetSet, UnrootedTree};
pub use rooted::{solve_rooted_triples, triples_satisfied, RootedTree, TripleSet};
pub use switching::{solve_switching_acyclic, SwitchingOutcome};
