//! Reduction of constraint problems over a core pinned by singleton
//! relations to problems over the same core carrying orbit relations
//! instead.
//!
//! Pinning elements of a core template by fresh unary singletons does not
//! change which instances are solvable in a way that search can't recover:
//! each singleton may be widened to the orbit of its element under the
//! right automorphism group, a single homomorphism search run against the
//! widened template, and the solution carried back onto the constants by
//! post-composing one automorphism per pin.

use std::collections::BTreeSet;

use itertools::Itertools;

use crate::caps::Caps;
use crate::cores::is_core;
use crate::error::Error;
use crate::morphisms::{automorphisms, find_homomorphism, Mapping};
use crate::structures::FinStructure;

/// A core template together with an ordered list of elements to pin by
/// fresh unary singleton relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstantSpec {
    base: FinStructure,
    constants: Vec<(String, usize)>,
}

impl ConstantSpec {
    /// Validates that `base` is a core, the pin symbols are fresh and
    /// mutually distinct, and the pinned elements lie in the domain.
    pub fn new<S: Into<String>>(
        base: FinStructure,
        constants: impl IntoIterator<Item = (S, usize)>,
        caps: &Caps,
    ) -> Result<Self, Error> {
        let constants: Vec<(String, usize)> = constants
            .into_iter()
            .map(|(name, c)| (name.into(), c))
            .collect();
        if !is_core(&base, caps)?.is_core {
            return Err(Error::NotACore(
                "constants may only pin elements of a core".into(),
            ));
        }
        let mut seen = BTreeSet::new();
        for (name, c) in &constants {
            if base.signature().arity_of(name).is_some() || !seen.insert(name.clone()) {
                return Err(Error::DuplicateSymbol(name.clone()));
            }
            if *c >= base.domain_size() {
                return Err(Error::invalid(format!(
                    "constant {name} pins element {c}, outside the domain of size {}",
                    base.domain_size()
                )));
            }
        }
        Ok(Self { base, constants })
    }

    pub fn base(&self) -> &FinStructure {
        &self.base
    }

    pub fn constants(&self) -> &[(String, usize)] {
        &self.constants
    }

    /// The base expanded by every pin's singleton relation, in order.
    pub fn expanded_template(&self) -> FinStructure {
        let mut template = self.base.clone();
        for (name, c) in &self.constants {
            template = template
                .expand(name, 1, &[vec![*c]])
                .expect("pin symbols were validated as fresh");
        }
        template
    }
}

/// The orbit `{α(c) : α ∈ Aut(s)}` of an element under the automorphism
/// group of `s`. Always contains `c`.
pub fn orbit_of_element(s: &FinStructure, c: usize, caps: &Caps) -> Result<BTreeSet<usize>, Error> {
    if c >= s.domain_size() {
        return Err(Error::invalid(format!(
            "element {c} out of domain (size {})",
            s.domain_size()
        )));
    }
    Ok(automorphisms(s, caps)?
        .iter()
        .map(|alpha| alpha.apply(c))
        .collect())
}

/// Outcome of widening one singleton symbol to its orbit relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingletonReduction {
    /// The instance with every variable constrained by the symbol merged
    /// into one, so the symbol holds at most a single tuple.
    pub instance: FinStructure,
    /// Original variable to merged variable.
    pub merge_map: Vec<usize>,
    /// The merged variable, absent when the symbol constrained nothing.
    pub merged_variable: Option<usize>,
    /// The orbit of the pinned element under `Aut(current)`.
    pub orbit: BTreeSet<usize>,
    /// `current` expanded to interpret the symbol as the orbit.
    pub template: FinStructure,
}

/// Merges all variables of `instance` constrained by the unary `symbol`
/// into one and widens the symbol's template interpretation from the
/// singleton `{c}` to the orbit of `c` under `Aut(current)`.
///
/// Merging has to happen before widening: one automorphism can carry one
/// common image back onto `c`, but distinct variables could be sent to
/// distinct orbit elements that no single automorphism returns jointly.
pub fn reduce_singleton(
    instance: &FinStructure,
    current: &FinStructure,
    symbol: &str,
    c: usize,
    caps: &Caps,
) -> Result<SingletonReduction, Error> {
    match instance.signature().arity_of(symbol) {
        None => return Err(Error::UnknownSymbol(symbol.to_string())),
        Some(1) => {}
        Some(arity) => {
            return Err(Error::invalid(format!(
                "pin symbol {symbol} has arity {arity}, expected 1"
            )))
        }
    }
    if current.signature().arity_of(symbol).is_some() {
        return Err(Error::DuplicateSymbol(symbol.to_string()));
    }
    let orbit = orbit_of_element(current, c, caps)?;
    let orbit_tuples: Vec<Vec<usize>> = orbit.iter().map(|&v| vec![v]).collect();
    let template = current.expand(symbol, 1, &orbit_tuples)?;

    let idx = instance.signature().index_of(symbol).expect("checked above");
    let class: BTreeSet<usize> = instance.tuples(idx).iter().map(|t| t[0]).collect();
    let n = instance.domain_size();
    let mut merge_map = vec![0usize; n];
    let merged_variable;
    let merged_domain;
    if let Some(&representative) = class.iter().next() {
        let mut next = 0;
        for v in 0..n {
            if class.contains(&v) && v != representative {
                // The representative is the least class member, so its slot
                // is already assigned.
                merge_map[v] = merge_map[representative];
            } else {
                merge_map[v] = next;
                next += 1;
            }
        }
        merged_variable = Some(merge_map[representative]);
        merged_domain = next;
    } else {
        merge_map = (0..n).collect();
        merged_variable = None;
        merged_domain = n;
    }
    let relations: Vec<(String, Vec<Vec<usize>>)> = instance
        .signature()
        .symbols()
        .iter()
        .enumerate()
        .map(|(i, sym)| {
            // Identification can collapse tuples onto each other; dedupe.
            let tuples: BTreeSet<Vec<usize>> = instance
                .tuples(i)
                .iter()
                .map(|t| t.iter().map(|&v| merge_map[v]).collect())
                .collect();
            (sym.name.clone(), tuples.into_iter().collect())
        })
        .collect();
    let merged = FinStructure::new(instance.signature().clone(), merged_domain, relations)?;
    Ok(SingletonReduction {
        instance: merged,
        merge_map,
        merged_variable,
        orbit,
        template,
    })
}

/// Direct check that `assignment` maps every tuple of `instance` into the
/// corresponding relation of `template`.
pub fn assignment_satisfies(
    instance: &FinStructure,
    template: &FinStructure,
    assignment: &Mapping,
) -> bool {
    if instance.signature() != template.signature()
        || assignment.len() != instance.domain_size()
        || assignment
            .values()
            .iter()
            .any(|&x| x >= template.domain_size())
    {
        return false;
    }
    (0..instance.signature().len()).all(|idx| {
        instance.tuples(idx).iter().all(|t| {
            let image: Vec<usize> = t.iter().map(|&v| assignment.apply(v)).collect();
            template.contains(idx, &image)
        })
    })
}

/// Solves `instance` against the base expanded by every pin, by widening
/// each singleton to an orbit relation, searching once, and post-composing
/// automorphisms to land the merged variables back on their constants.
///
/// Pins are widened in reverse order. The orbit of each is taken under the
/// automorphism group of the base expanded by the earlier pins' singletons
/// *and the later pins' orbit relations*. Dropping the latter would
/// overshoot: over the two-vertex complete graph with two pins on the same
/// vertex, the instance asking for an edge between the two pinned
/// variables is unsatisfiable, yet both orbits taken over the bare base
/// cover the whole domain and would declare it solvable. Keeping the later
/// orbit relations in place shrinks each group exactly enough that every
/// solution of the widened instance can be carried back.
pub fn solve_with_constants(
    spec: &ConstantSpec,
    instance: &FinStructure,
    caps: &Caps,
) -> Result<Option<Mapping>, Error> {
    let expanded = spec.expanded_template();
    if instance.signature() != expanded.signature() {
        return Err(Error::SignatureMismatch(format!(
            "instance signature {:?} does not match the pinned template signature {:?}",
            instance.signature(),
            expanded.signature()
        )));
    }
    let k = spec.constants.len();
    if k == 0 {
        return find_homomorphism(instance, &spec.base);
    }

    // Reverse pass: merge and widen, one pin at a time, remembering the
    // group structure each orbit was taken in for the forward pass.
    let mut reduced = instance.clone();
    let mut overall: Vec<usize> = (0..instance.domain_size()).collect();
    let mut orbits: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
    let mut groups: Vec<Option<FinStructure>> = vec![None; k];
    for i in (0..k).rev() {
        let mut theta = spec.base.clone();
        for (j, (name, c)) in spec.constants.iter().enumerate() {
            if j < i {
                theta = theta.expand(name, 1, &[vec![*c]])?;
            } else if j > i {
                let tuples: Vec<Vec<usize>> = orbits[j].iter().map(|&v| vec![v]).collect();
                theta = theta.expand(name, 1, &tuples)?;
            }
        }
        let (name, c) = &spec.constants[i];
        let step = reduce_singleton(&reduced, &theta, name, *c, caps)?;
        reduced = step.instance;
        for slot in overall.iter_mut() {
            *slot = step.merge_map[*slot];
        }
        orbits[i] = step.orbit;
        groups[i] = Some(theta);
    }

    // One search against the fully widened template.
    let mut target = spec.base.clone();
    for (j, (name, _)) in spec.constants.iter().enumerate() {
        let tuples: Vec<Vec<usize>> = orbits[j].iter().map(|&v| vec![v]).collect();
        target = target.expand(name, 1, &tuples)?;
    }
    let Some(mut h) = find_homomorphism(&reduced, &target)? else {
        return Ok(None);
    };

    // Forward pass: land each pinned variable on its constant. The
    // automorphism exists because the variable's value lies in the orbit,
    // and it preserves the earlier singletons and the later orbits.
    for (i, (name, c)) in spec.constants.iter().enumerate() {
        let idx = reduced.signature().index_of(name).expect("validated");
        let Some(tuple) = reduced.tuples(idx).iter().next() else {
            continue;
        };
        let value = h.apply(tuple[0]);
        if value == *c {
            continue;
        }
        let theta = groups[i].as_ref().expect("filled in the reverse pass");
        let alpha = automorphisms(theta, caps)?
            .into_iter()
            .find(|alpha| alpha.apply(value) == *c)
            .ok_or_else(|| Error::invalid("solution landed outside the reachable orbit"))?;
        h = alpha.after(&h);
    }

    let assignment = Mapping::new(overall.iter().map(|&v| h.apply(v)).collect());
    if !assignment_satisfies(instance, &expanded, &assignment) {
        return Err(Error::invalid(
            "recovered assignment violates the original instance",
        ));
    }
    Ok(Some(assignment))
}

/// Exhaustive homomorphism search by lexicographic enumeration of all
/// assignments, independent of the backtracking kernel. Returns the least
/// solution.
pub fn brute_force_solve(
    template: &FinStructure,
    instance: &FinStructure,
    caps: &Caps,
) -> Result<Option<Mapping>, Error> {
    if instance.signature() != template.signature() {
        return Err(Error::SignatureMismatch(format!(
            "instance signature {:?} does not match template signature {:?}",
            instance.signature(),
            template.signature()
        )));
    }
    let vars = instance.domain_size();
    Caps::check("brute force variables", vars as u128, caps.brute_force_vars)?;
    if vars == 0 {
        return Ok(Some(Mapping::new(Vec::new())));
    }
    if template.domain_size() == 0 {
        return Ok(None);
    }
    for values in std::iter::repeat_n(0..template.domain_size(), vars).multi_cartesian_product() {
        let assignment = Mapping::new(values);
        if assignment_satisfies(instance, template, &assignment) {
            return Ok(Some(assignment));
        }
    }
    Ok(None)
}
