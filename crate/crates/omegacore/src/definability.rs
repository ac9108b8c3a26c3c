//! Primitive positive and existential positive formulas over a relational
//! signature, their evaluation, and definability checks.
//!
//! A primitive positive (pp) formula is an existentially quantified
//! conjunction of relational and equality atoms. Evaluating one over a
//! structure amounts to a pinned homomorphism search: the formula's
//! variables form an instance, and a free tuple is in the defined relation
//! exactly when a homomorphism maps the free variables onto it.
//!
//! The canonical definability check goes through direct powers: a non-empty
//! `k`-ary relation `R` with `m` tuples is pp-definable in `s` exactly when
//! no homomorphism from the `m`-th power of `s` maps the `m`-column tuples
//! of `R` to a `k`-tuple outside `R`. When the check succeeds, the atomic
//! diagram of the power is itself a defining formula and is returned as a
//! verifiable witness.

use std::collections::BTreeSet;

use crate::caps::Caps;
use crate::error::Error;
use crate::morphisms::{self, enumerate_homomorphisms};
use crate::structures::{FinStructure, Signature};

/// One conjunct of a pp formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    /// `symbol(args...)`.
    Rel { symbol: String, args: Vec<String> },
    /// `left = right`.
    Eq { left: String, right: String },
}

/// An existentially quantified conjunction of atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PpFormula {
    free: Vec<String>,
    bound: Vec<String>,
    atoms: Vec<Atom>,
}

impl PpFormula {
    /// Builds a formula, checking that variable names are distinct and that
    /// every atom only mentions declared variables.
    pub fn new(
        free: Vec<String>,
        bound: Vec<String>,
        atoms: Vec<Atom>,
    ) -> Result<Self, Error> {
        let mut seen = BTreeSet::new();
        for name in free.iter().chain(&bound) {
            if name.is_empty() {
                return Err(Error::invalid("empty variable name"));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::invalid(format!("variable `{name}` declared twice")));
            }
        }
        for atom in &atoms {
            let args: Vec<&String> = match atom {
                Atom::Rel { args, .. } => args.iter().collect(),
                Atom::Eq { left, right } => vec![left, right],
            };
            for arg in args {
                if !seen.contains(arg.as_str()) {
                    return Err(Error::invalid(format!("undeclared variable `{arg}`")));
                }
            }
        }
        Ok(PpFormula { free, bound, atoms })
    }

    pub fn free(&self) -> &[String] {
        &self.free
    }

    pub fn bound(&self) -> &[String] {
        &self.bound
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }
}

/// A disjunction of pp formulas over one shared free-variable list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpFormula {
    disjuncts: Vec<PpFormula>,
}

impl EpFormula {
    pub fn new(disjuncts: Vec<PpFormula>) -> Result<Self, Error> {
        let first = disjuncts
            .first()
            .ok_or_else(|| Error::invalid("existential positive formula needs a disjunct"))?;
        let free = first.free().to_vec();
        if disjuncts.iter().any(|d| d.free() != free) {
            return Err(Error::invalid(
                "all disjuncts must share one free-variable list",
            ));
        }
        Ok(EpFormula { disjuncts })
    }

    pub fn disjuncts(&self) -> &[PpFormula] {
        &self.disjuncts
    }
}

/// The formula's variables as a structure over `sig`, with equalities
/// contracted. Returns the instance and, for each free variable, the element
/// standing for its equality class.
fn query_instance(
    formula: &PpFormula,
    sig: &Signature,
) -> Result<(FinStructure, Vec<usize>), Error> {
    let names: Vec<&String> = formula.free.iter().chain(&formula.bound).collect();
    let index_of = |name: &String| -> usize {
        names.iter().position(|n| *n == name).expect("validated")
    };

    // Union-find over variable indices, driven by equality atoms.
    let mut parent: Vec<usize> = (0..names.len()).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    for atom in &formula.atoms {
        if let Atom::Eq { left, right } = atom {
            let (a, b) = (find(&mut parent, index_of(left)), find(&mut parent, index_of(right)));
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi] = lo;
            }
        }
    }

    // Number classes by first occurrence.
    let mut class_of = vec![usize::MAX; names.len()];
    let mut classes = 0;
    for x in 0..names.len() {
        let root = find(&mut parent, x);
        if class_of[root] == usize::MAX {
            class_of[root] = classes;
            classes += 1;
        }
        class_of[x] = class_of[root];
    }

    let mut relations: Vec<(String, Vec<Vec<usize>>)> = sig
        .symbols()
        .iter()
        .map(|s| (s.name.clone(), Vec::new()))
        .collect();
    for atom in &formula.atoms {
        if let Atom::Rel { symbol, args } = atom {
            let idx = sig
                .index_of(symbol)
                .ok_or_else(|| Error::UnknownSymbol(symbol.clone()))?;
            let arity = sig.symbols()[idx].arity;
            if args.len() != arity {
                return Err(Error::invalid(format!(
                    "atom `{symbol}` has {} arguments, symbol has arity {arity}",
                    args.len()
                )));
            }
            let tuple: Vec<usize> = args.iter().map(|a| class_of[index_of(a)]).collect();
            if !relations[idx].1.contains(&tuple) {
                relations[idx].1.push(tuple);
            }
        }
    }

    let instance = FinStructure::new(sig.clone(), classes, relations)?;
    let free_classes = (0..formula.free.len()).map(|i| class_of[i]).collect();
    Ok((instance, free_classes))
}

/// Evaluates a pp formula over `s`: the set of free-variable tuples it
/// defines, in lexicographic order.
///
/// The free tuple space `n^k` is capped by `caps.tuple_space`.
pub fn evaluate_pp(
    formula: &PpFormula,
    s: &FinStructure,
    caps: &Caps,
) -> Result<BTreeSet<Vec<usize>>, Error> {
    let (instance, free_classes) = query_instance(formula, s.signature())?;
    let n = s.domain_size();
    let k = formula.free.len();
    let space = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    Caps::check("pp evaluation tuple space", space, caps.tuple_space)?;

    let mut result = BTreeSet::new();
    let mut tuple = vec![0usize; k];
    let mut done = n == 0 && k > 0;
    if k == 0 {
        if morphisms::exists_homomorphism(&instance, s)? {
            result.insert(Vec::new());
        }
        return Ok(result);
    }
    while !done {
        // Pins must agree on shared equality classes.
        let mut pins: Vec<(usize, usize)> = Vec::with_capacity(k);
        let mut consistent = true;
        for (i, &class) in free_classes.iter().enumerate() {
            match pins.iter().find(|(c, _)| *c == class) {
                Some(&(_, v)) if v != tuple[i] => {
                    consistent = false;
                    break;
                }
                Some(_) => {}
                None => pins.push((class, tuple[i])),
            }
        }
        if consistent && morphisms::exists_hom_pinned(&instance, s, &pins)? {
            result.insert(tuple.clone());
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                done = true;
                break;
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < n {
                break;
            }
            tuple[pos] = 0;
        }
    }
    Ok(result)
}

/// Evaluates an ep formula: the union of its disjuncts' relations.
pub fn evaluate_ep(
    formula: &EpFormula,
    s: &FinStructure,
    caps: &Caps,
) -> Result<BTreeSet<Vec<usize>>, Error> {
    let mut result = BTreeSet::new();
    for disjunct in &formula.disjuncts {
        result.extend(evaluate_pp(disjunct, s, caps)?);
    }
    Ok(result)
}

/// Outcome of the canonical pp-definability check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PpVerdict {
    /// Definable; the witness formula evaluates back to the relation.
    Definable { witness: PpFormula },
    /// Not definable: some endomorphism of the power structure drives a
    /// relation tuple onto `counterexample`, which is outside the relation.
    NotDefinable { counterexample: Vec<usize> },
    /// The power structure would exceed the capacity bound.
    Unknown,
}

/// Canonical pp-definability check for a non-empty relation over the domain
/// of `s`.
///
/// Builds the `|R|`-th direct power of `s` (capped by `caps.power_domain`,
/// reporting [`PpVerdict::Unknown`] beyond it) and asks whether some
/// homomorphism back to `s` maps the column tuples of `R` outside `R`. A
/// fast pre-test checks that `R` is preserved by all endomorphisms of `s`
/// whenever the domain is small enough to enumerate them.
pub fn canonical_pp_check(
    s: &FinStructure,
    relation: &BTreeSet<Vec<usize>>,
    caps: &Caps,
) -> Result<PpVerdict, Error> {
    let n = s.domain_size();
    let first = relation
        .iter()
        .next()
        .ok_or_else(|| Error::invalid("definability check requires a non-empty relation"))?;
    let k = first.len();
    if k == 0 {
        return Err(Error::invalid("relation tuples must have positive arity"));
    }
    for t in relation {
        if t.len() != k {
            return Err(Error::invalid(format!(
                "relation mixes arities: {t:?} next to {first:?}"
            )));
        }
        if let Some(&e) = t.iter().find(|&&e| e >= n) {
            return Err(Error::invalid(format!(
                "tuple {t:?}: entry {e} out of domain (size {n})"
            )));
        }
    }

    // Pp-definable relations are preserved by every endomorphism; check that
    // first when enumeration is within the cap.
    if n as u128 <= caps.automorphism_domain as u128 {
        let endos = enumerate_homomorphisms(s, s, None)?;
        for endo in &endos {
            for t in relation {
                let image = endo.apply_tuple(t);
                if !relation.contains(&image) {
                    return Ok(PpVerdict::NotDefinable {
                        counterexample: image,
                    });
                }
            }
        }
    }

    let m = relation.len();
    let space = (n as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if space > caps.power_domain as u128 {
        return Ok(PpVerdict::Unknown);
    }
    let power = s.direct_power(m, caps.power_domain)?;

    // Distinguished elements: the i-th column of R read down its rows.
    let rows: Vec<&Vec<usize>> = relation.iter().collect();
    let columns: Vec<usize> = (0..k)
        .map(|i| rows.iter().fold(0, |acc, row| acc * n + row[i]))
        .collect();

    let mut tuple = vec![0usize; k];
    let mut done = n == 0;
    while !done {
        if !relation.contains(&tuple) {
            let mut pins: Vec<(usize, usize)> = Vec::with_capacity(k);
            let mut consistent = true;
            for (i, &col) in columns.iter().enumerate() {
                match pins.iter().find(|(c, _)| *c == col) {
                    Some(&(_, v)) if v != tuple[i] => {
                        consistent = false;
                        break;
                    }
                    Some(_) => {}
                    None => pins.push((col, tuple[i])),
                }
            }
            if consistent && morphisms::exists_hom_pinned(&power, s, &pins)? {
                return Ok(PpVerdict::NotDefinable {
                    counterexample: tuple,
                });
            }
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                done = true;
                break;
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < n {
                break;
            }
            tuple[pos] = 0;
        }
    }

    Ok(PpVerdict::Definable {
        witness: atomic_diagram(&power, &columns),
    })
}

/// A pp formula defining the orbit of `tuple` under the automorphism group
/// of a core: the atomic diagram of the core with free variables standing at
/// the tuple's positions.
///
/// Fails with [`Error::NotACore`] when `core` is not a core, since the
/// construction leans on endomorphisms being automorphisms.
pub fn orbit_pp_formula(
    core: &FinStructure,
    tuple: &[usize],
    caps: &Caps,
) -> Result<PpFormula, Error> {
    if tuple.is_empty() {
        return Err(Error::invalid("orbit formula requires a non-empty tuple"));
    }
    if let Some(&e) = tuple.iter().find(|&&e| e >= core.domain_size()) {
        return Err(Error::invalid(format!(
            "tuple entry {e} out of domain (size {})",
            core.domain_size()
        )));
    }
    if !crate::cores::is_core(core, caps)?.is_core {
        return Err(Error::NotACore(
            "orbit formulas are only sound over cores".into(),
        ));
    }
    Ok(atomic_diagram(core, tuple))
}

/// The atomic diagram of `s` as a pp formula: one bound variable per
/// element, one atom per tuple, with free variables `x0, x1, ..` replacing
/// the elements listed in `distinguished` (repeats become equality atoms).
fn atomic_diagram(s: &FinStructure, distinguished: &[usize]) -> PpFormula {
    let n = s.domain_size();
    let mut element_var: Vec<Option<String>> = vec![None; n];
    let mut free = Vec::with_capacity(distinguished.len());
    let mut equalities = Vec::new();
    for (i, &element) in distinguished.iter().enumerate() {
        let name = format!("x{i}");
        match &element_var[element] {
            Some(existing) => equalities.push(Atom::Eq {
                left: name.clone(),
                right: existing.clone(),
            }),
            None => element_var[element] = Some(name.clone()),
        }
        free.push(name);
    }
    let mut bound = Vec::new();
    for (element, slot) in element_var.iter_mut().enumerate() {
        if slot.is_none() {
            let name = format!("y{element}");
            bound.push(name.clone());
            *slot = Some(name);
        }
    }
    let mut atoms = Vec::new();
    for (idx, sym) in s.signature().symbols().iter().enumerate() {
        for t in s.tuples(idx) {
            atoms.push(Atom::Rel {
                symbol: sym.name.clone(),
                args: t
                    .iter()
                    .map(|&e| element_var[e].clone().expect("every element named"))
                    .collect(),
            });
        }
    }
    atoms.extend(equalities);
    PpFormula::new(free, bound, atoms).expect("diagram variables are distinct by construction")
}
