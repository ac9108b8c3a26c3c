//! Capacity bounds for exhaustive operations.
//!
//! Every operation whose cost is exponential in its input consults a bound
//! from [`Caps`] and fails with [`crate::Error::Capacity`] instead of running
//! away. The defaults target interactive desk-scale inputs; callers can relax
//! or tighten them, and the CLI reads overrides from the `OMEGACORE_CAPS`
//! environment variable.

use serde::{Deserialize, Serialize};

/// Capacity bounds consulted by exhaustive operations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Caps {
    /// Largest domain allowed for a direct power (`n^m` elements).
    pub power_domain: usize,
    /// Largest domain for which automorphisms and endomorphisms are
    /// enumerated exhaustively.
    pub automorphism_domain: usize,
    /// Largest tuple space `n^k` enumerated when partitioning into orbits.
    pub tuple_space: usize,
    /// Most variables the brute-force solver will enumerate assignments for.
    pub brute_force_vars: usize,
    /// Most leaves for the exhaustive quartet solver.
    pub quartet_leaves: usize,
    /// Most vertices for the exhaustive tree-description solver.
    pub tree_description_vertices: usize,
    /// Largest per-symbol tuple-space bit count when enumerating all class
    /// members of a given size.
    pub class_universe_bits: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            power_domain: 4096,
            automorphism_domain: 10,
            tuple_space: 4096,
            brute_force_vars: 8,
            quartet_leaves: 8,
            tree_description_vertices: 7,
            class_universe_bits: 20,
        }
    }
}

impl Caps {
    /// Checks `needed <= cap`, reporting a capacity error otherwise.
    pub(crate) fn check(what: &'static str, needed: u128, cap: usize) -> Result<(), crate::Error> {
        if needed > cap as u128 {
            Err(crate::Error::Capacity {
                what,
                needed,
                cap: cap as u128,
            })
        } else {
            Ok(())
        }
    }
}
