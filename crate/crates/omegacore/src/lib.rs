//! Finite relational structures and the machinery around their cores.
//!
//! The crate provides:
//!
//! - [`structures`]: signatures, finite structures, induced substructures,
//!   expansions, and direct powers;
//! - [`morphisms`]: homomorphism and isomorphism search, automorphism
//!   enumeration, and orbits of tuples;
//! - [`cores`]: core recognition and computation, homomorphic equivalence,
//!   and cross-checks tying endomorphisms to automorphisms;
//! - [`definability`]: primitive positive formulas, their evaluation, a
//!   canonical definability check, and orbit-defining formulas;
//! - [`amalgamation`]: bounded amalgamation checking for finitely bounded
//!   classes, ages, and an extension-property probe;
//! - [`templates`]: exact solvers for concrete constraint templates
//!   (triangle-freeness, monochromatic-triangle avoidance, betweenness,
//!   switching-acyclicity, rooted triples, quartets, tree descriptions);
//! - [`reduction`]: elimination of constants from templates via orbit
//!   relations, with solution recovery;
//! - [`oracle`]: independent brute-force deciders used for differential
//!   testing;
//! - [`io`]: JSON serialization with canonical, byte-stable output;
//! - [`corpus`]: seeded random input generators.
//!
//! All operations are pure functions over immutable values, deterministic
//! given their inputs, and guarded by explicit capacity bounds ([`Caps`]).

pub mod amalgamation;
pub mod caps;
pub mod cores;
pub mod corpus;
pub mod definability;
pub mod error;
pub mod io;
pub mod morphisms;
pub mod oracle;
pub mod reduction;
pub mod structures;
pub mod templates;

pub use caps::Caps;
pub use error::{Error, Violation};
pub use morphisms::Mapping;
pub use structures::{FinStructure, RawStructure, RelationSymbol, Signature};
