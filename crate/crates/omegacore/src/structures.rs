//! Relational signatures and finite relational structures.
//!
//! A [`FinStructure`] is a finite set `{0, .., n-1}` together with one tuple
//! set per relation symbol of its [`Signature`]. The same type doubles as a
//! constraint-satisfaction instance: elements are variables and tuples are
//! constraints over the matching template relation.

use std::collections::BTreeSet;

use itertools::Itertools;

use crate::error::{Error, Violation};

/// A relation symbol: a name together with a positive arity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationSymbol {
    pub name: String,
    pub arity: usize,
}

/// An ordered list of distinct relation symbols.
///
/// The order is significant: relations of a structure are stored in signature
/// order and serialized in signature order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    symbols: Vec<RelationSymbol>,
}

impl Signature {
    /// Builds a signature from `(name, arity)` pairs.
    ///
    /// Names must be distinct and non-empty; arities must be positive.
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = (S, usize)>) -> Result<Self, Error> {
        let symbols: Vec<RelationSymbol> = symbols
            .into_iter()
            .map(|(name, arity)| RelationSymbol {
                name: name.into(),
                arity,
            })
            .collect();
        let mut violations = Vec::new();
        let mut seen = BTreeSet::new();
        for sym in &symbols {
            if sym.name.is_empty() {
                violations.push(Violation::EmptySymbolName);
            }
            if sym.arity == 0 {
                violations.push(Violation::ZeroArity(sym.name.clone()));
            }
            if !seen.insert(sym.name.clone()) {
                violations.push(Violation::DuplicateSymbol(sym.name.clone()));
            }
        }
        if violations.is_empty() {
            Ok(Signature { symbols })
        } else {
            Err(Error::InvalidStructure(violations))
        }
    }

    /// The symbols in declaration order.
    pub fn symbols(&self) -> &[RelationSymbol] {
        &self.symbols
    }

    /// Number of symbols.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    /// Whether the signature declares no symbols.
    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Position of `name` in the declaration order.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    /// Arity of `name`, if declared.
    pub fn arity_of(&self, name: &str) -> Option<usize> {
        self.symbols
            .iter()
            .find(|s| s.name == name)
            .map(|s| s.arity)
    }

    fn with_symbol(&self, name: &str, arity: usize) -> Result<Signature, Error> {
        if self.index_of(name).is_some() {
            return Err(Error::DuplicateSymbol(name.to_string()));
        }
        let mut symbols = self.symbols.clone();
        symbols.push(RelationSymbol {
            name: name.to_string(),
            arity,
        });
        Signature::new(symbols.into_iter().map(|s| (s.name, s.arity)))
    }

    fn without_symbol(&self, name: &str) -> Result<Signature, Error> {
        if self.index_of(name).is_none() {
            return Err(Error::UnknownSymbol(name.to_string()));
        }
        Ok(Signature {
            symbols: self
                .symbols
                .iter()
                .filter(|s| s.name != name)
                .cloned()
                .collect(),
        })
    }
}

/// Raw parts of a structure before validation.
///
/// [`validate_structure`] inspects these parts and reports every defect; a
/// clean report is exactly the precondition of [`FinStructure::from_parts`].
#[derive(Debug, Clone)]
pub struct RawStructure {
    /// `(name, arity)` pairs in declaration order.
    pub signature: Vec<(String, usize)>,
    /// Number of elements; the domain is `0..domain_size`.
    pub domain_size: usize,
    /// `(symbol, tuples)` pairs; symbols may appear in any order.
    pub relations: Vec<(String, Vec<Vec<usize>>)>,
}

/// Reports every defect in the raw parts of a structure.
///
/// An empty result means the parts assemble into a valid [`FinStructure`]:
/// distinct non-empty symbols of positive arity, exactly one tuple set per
/// symbol, and every tuple of the declared arity with entries inside the
/// domain and listed only once.
pub fn validate_structure(raw: &RawStructure) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut declared: Vec<(&str, usize)> = Vec::new();
    for (name, arity) in &raw.signature {
        if name.is_empty() {
            violations.push(Violation::EmptySymbolName);
        }
        if *arity == 0 {
            violations.push(Violation::ZeroArity(name.clone()));
        }
        if declared.iter().any(|(n, _)| *n == name.as_str()) {
            violations.push(Violation::DuplicateSymbol(name.clone()));
        } else {
            declared.push((name.as_str(), *arity));
        }
    }
    let mut provided: Vec<&str> = Vec::new();
    for (name, tuples) in &raw.relations {
        if provided.contains(&name.as_str()) {
            violations.push(Violation::DuplicateSymbol(name.clone()));
            continue;
        }
        provided.push(name.as_str());
        let arity = match declared.iter().find(|(n, _)| n == &name.as_str()) {
            Some((_, arity)) => *arity,
            None => {
                violations.push(Violation::UnknownRelation(name.clone()));
                continue;
            }
        };
        let mut seen = BTreeSet::new();
        for tuple in tuples {
            if tuple.len() != arity {
                violations.push(Violation::ArityMismatch {
                    symbol: name.clone(),
                    tuple: tuple.clone(),
                    expected: arity,
                });
                continue;
            }
            if let Some(&entry) = tuple.iter().find(|&&e| e >= raw.domain_size) {
                violations.push(Violation::OutOfDomain {
                    symbol: name.clone(),
                    tuple: tuple.clone(),
                    entry,
                });
                continue;
            }
            if !seen.insert(tuple.clone()) {
                violations.push(Violation::DuplicateTuple {
                    symbol: name.clone(),
                    tuple: tuple.clone(),
                });
            }
        }
    }
    for (name, _) in &declared {
        if !provided.contains(name) {
            violations.push(Violation::MissingRelation(name.to_string()));
        }
    }
    violations
}

/// A finite relational structure over domain `0..domain_size`.
///
/// Tuple sets are kept sorted, so iteration over a relation is always in
/// lexicographic order and equal structures compare equal componentwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinStructure {
    signature: Signature,
    domain_size: usize,
    relations: Vec<BTreeSet<Vec<usize>>>,
}

impl FinStructure {
    /// Assembles a structure from raw parts, validating them first.
    pub fn from_parts(raw: RawStructure) -> Result<Self, Error> {
        let violations = validate_structure(&raw);
        if !violations.is_empty() {
            return Err(Error::InvalidStructure(violations));
        }
        let signature = Signature::new(raw.signature.clone())?;
        let mut relations = vec![BTreeSet::new(); signature.len()];
        for (name, tuples) in raw.relations {
            let idx = signature.index_of(&name).expect("validated symbol");
            relations[idx] = tuples.into_iter().collect();
        }
        Ok(FinStructure {
            signature,
            domain_size: raw.domain_size,
            relations,
        })
    }

    /// Builds a structure over an existing signature.
    ///
    /// `relations` must name each signature symbol exactly once.
    pub fn new<S: Into<String>>(
        signature: Signature,
        domain_size: usize,
        relations: impl IntoIterator<Item = (S, Vec<Vec<usize>>)>,
    ) -> Result<Self, Error> {
        let raw = RawStructure {
            signature: signature
                .symbols()
                .iter()
                .map(|s| (s.name.clone(), s.arity))
                .collect(),
            domain_size,
            relations: relations
                .into_iter()
                .map(|(name, tuples)| (name.into(), tuples))
                .collect(),
        };
        FinStructure::from_parts(raw)
    }

    /// A structure with every relation empty.
    pub fn empty(signature: Signature, domain_size: usize) -> Self {
        let relations = vec![BTreeSet::new(); signature.len()];
        FinStructure {
            signature,
            domain_size,
            relations,
        }
    }

    /// An undirected loopless graph: one binary symbol `E`, closed under
    /// symmetry. Loops are rejected.
    pub fn graph(n: usize, edges: &[(usize, usize)]) -> Result<Self, Error> {
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u == v && u < n) {
            let _ = v;
            return Err(Error::invalid(format!("graph edge ({u}, {u}) is a loop")));
        }
        let mut tuples = Vec::new();
        for &(u, v) in edges {
            tuples.push(vec![u, v]);
            tuples.push(vec![v, u]);
        }
        tuples.sort();
        tuples.dedup();
        FinStructure::new(Signature::new([("E", 2)])?, n, [("E", tuples)])
    }

    /// A directed graph: one binary symbol `E` with the arcs as given.
    pub fn digraph(n: usize, arcs: &[(usize, usize)]) -> Result<Self, Error> {
        let tuples = arcs.iter().map(|&(u, v)| vec![u, v]).unique().collect();
        FinStructure::new(Signature::new([("E", 2)])?, n, [("E", tuples)])
    }

    /// The signature.
    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    /// Number of elements.
    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    /// Tuple set of the symbol at `index` (signature order).
    pub fn tuples(&self, index: usize) -> &BTreeSet<Vec<usize>> {
        &self.relations[index]
    }

    /// Tuple set of the named symbol.
    pub fn tuples_of(&self, name: &str) -> Result<&BTreeSet<Vec<usize>>, Error> {
        let idx = self
            .signature
            .index_of(name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
        Ok(&self.relations[idx])
    }

    /// Whether the symbol at `index` contains `tuple`.
    pub fn contains(&self, index: usize, tuple: &[usize]) -> bool {
        self.relations[index].contains(tuple)
    }

    /// Total number of tuples across all relations.
    pub fn tuple_count(&self) -> usize {
        self.relations.iter().map(|r| r.len()).sum()
    }

    /// The substructure induced on `subset`, whose elements are renumbered
    /// `0..subset.len()` in the given order.
    ///
    /// A tuple is in the result exactly when its preimage tuple is in `self`.
    /// Entries of `subset` must be distinct elements of the domain.
    pub fn induced(&self, subset: &[usize]) -> Result<FinStructure, Error> {
        let mut position = vec![None; self.domain_size];
        for (new, &old) in subset.iter().enumerate() {
            if old >= self.domain_size {
                return Err(Error::invalid(format!(
                    "element {old} out of domain (size {})",
                    self.domain_size
                )));
            }
            if position[old].is_some() {
                return Err(Error::invalid(format!("element {old} listed twice")));
            }
            position[old] = Some(new);
        }
        let relations = self
            .relations
            .iter()
            .map(|tuples| {
                tuples
                    .iter()
                    .filter_map(|t| {
                        t.iter()
                            .map(|&e| position[e])
                            .collect::<Option<Vec<usize>>>()
                    })
                    .collect()
            })
            .collect();
        Ok(FinStructure {
            signature: self.signature.clone(),
            domain_size: subset.len(),
            relations,
        })
    }

    /// Adds a fresh relation symbol with the given tuples, leaving existing
    /// relations untouched. The new symbol goes to the end of the signature.
    pub fn expand(&self, name: &str, arity: usize, tuples: &[Vec<usize>]) -> Result<FinStructure, Error> {
        let signature = self.signature.with_symbol(name, arity)?;
        let mut violations = Vec::new();
        let mut set = BTreeSet::new();
        for tuple in tuples {
            if tuple.len() != arity {
                violations.push(Violation::ArityMismatch {
                    symbol: name.to_string(),
                    tuple: tuple.clone(),
                    expected: arity,
                });
                continue;
            }
            if let Some(&entry) = tuple.iter().find(|&&e| e >= self.domain_size) {
                violations.push(Violation::OutOfDomain {
                    symbol: name.to_string(),
                    tuple: tuple.clone(),
                    entry,
                });
                continue;
            }
            set.insert(tuple.clone());
        }
        if !violations.is_empty() {
            return Err(Error::InvalidStructure(violations));
        }
        let mut relations = self.relations.clone();
        relations.push(set);
        Ok(FinStructure {
            signature,
            domain_size: self.domain_size,
            relations,
        })
    }

    /// Removes a relation symbol together with its tuples.
    pub fn without_relation(&self, name: &str) -> Result<FinStructure, Error> {
        let idx = self
            .signature
            .index_of(name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
        let signature = self.signature.without_symbol(name)?;
        let mut relations = self.relations.clone();
        relations.remove(idx);
        Ok(FinStructure {
            signature,
            domain_size: self.domain_size,
            relations,
        })
    }

    /// The `m`-th direct power.
    ///
    /// Elements are the `m`-tuples over the domain in lexicographic order;
    /// `R(e_1, .., e_k)` holds exactly when it holds coordinatewise in
    /// `self`. Fails when `m` is zero or the power domain would exceed
    /// `max_domain`.
    pub fn direct_power(&self, m: usize, max_domain: usize) -> Result<FinStructure, Error> {
        if m == 0 {
            return Err(Error::invalid("direct power requires a positive exponent"));
        }
        let size = (self.domain_size as u128)
            .checked_pow(m as u32)
            .ok_or(Error::Capacity {
                what: "direct power domain",
                needed: u128::MAX,
                cap: max_domain as u128,
            })?;
        crate::caps::Caps::check("direct power domain", size, max_domain)?;
        let size = size as usize;
        // Element rank: lexicographic order of coordinate tuples.
        let rank = |tuple: &[usize]| -> usize {
            tuple.iter().fold(0, |acc, &e| acc * self.domain_size + e)
        };
        let relations = self
            .relations
            .iter()
            .enumerate()
            .map(|(idx, tuples)| {
                let arity = self.signature.symbols()[idx].arity;
                let mut power_tuples = BTreeSet::new();
                for rows in std::iter::repeat_n(tuples.iter(), m).multi_cartesian_product() {
                    // rows[j] is the j-th coordinate's tuple; the power tuple
                    // is its columnwise combination.
                    let tuple: Vec<usize> = (0..arity)
                        .map(|pos| rank(&rows.iter().map(|row| row[pos]).collect::<Vec<_>>()))
                        .collect();
                    power_tuples.insert(tuple);
                }
                power_tuples
            })
            .collect();
        Ok(FinStructure {
            signature: self.signature.clone(),
            domain_size: size,
            relations,
        })
    }

    /// A short deterministic text form: domain size, then each relation in
    /// signature order with its tuples in lexicographic order. Structures are
    /// equal iff their keys are equal, so the key doubles as a canonical
    /// serialization for ordering purposes.
    pub fn canonical_key(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        write!(out, "n={};", self.domain_size).unwrap();
        for (sym, tuples) in self.signature.symbols().iter().zip(&self.relations) {
            write!(out, "{}/{}=", sym.name, sym.arity).unwrap();
            out.push('[');
            for (i, t) in tuples.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{t:?}").unwrap();
            }
            out.push_str("];");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(symbols: &[(&str, usize)]) -> Signature {
        Signature::new(symbols.iter().map(|&(n, a)| (n, a))).unwrap()
    }

    #[test]
    fn valid_structure_round_trip() {
        let s = FinStructure::new(
            sig(&[("E", 2), ("C", 1)]),
            3,
            [("E", vec![vec![0, 1], vec![1, 2]]), ("C", vec![vec![0]])],
        )
        .unwrap();
        assert_eq!(s.domain_size(), 3);
        assert_eq!(s.tuples_of("E").unwrap().len(), 2);
        assert_eq!(s.tuples_of("C").unwrap().len(), 1);
    }

    #[test]
    fn validation_reports_each_defect() {
        let raw = RawStructure {
            signature: vec![("E".into(), 2), ("E".into(), 2), ("Z".into(), 0)],
            domain_size: 2,
            relations: vec![
                ("E".into(), vec![vec![0, 5], vec![0], vec![1, 0], vec![1, 0]]),
                ("Q".into(), vec![]),
            ],
        };
        let violations = validate_structure(&raw);
        assert!(violations.contains(&Violation::DuplicateSymbol("E".into())));
        assert!(violations.contains(&Violation::ZeroArity("Z".into())));
        assert!(violations.contains(&Violation::UnknownRelation("Q".into())));
        assert!(violations.contains(&Violation::MissingRelation("Z".into())));
        assert!(violations.contains(&Violation::OutOfDomain {
            symbol: "E".into(),
            tuple: vec![0, 5],
            entry: 5,
        }));
        assert!(violations.contains(&Violation::ArityMismatch {
            symbol: "E".into(),
            tuple: vec![0],
            expected: 2,
        }));
        assert!(violations.contains(&Violation::DuplicateTuple {
            symbol: "E".into(),
            tuple: vec![1, 0],
        }));
    }

    #[test]
    fn missing_relation_entry_is_flagged() {
        let raw = RawStructure {
            signature: vec![("E".into(), 2)],
            domain_size: 1,
            relations: vec![],
        };
        assert_eq!(
            validate_structure(&raw),
            vec![Violation::MissingRelation("E".into())]
        );
    }

    #[test]
    fn empty_domain_with_empty_relations_is_valid() {
        let raw = RawStructure {
            signature: vec![("E".into(), 2)],
            domain_size: 0,
            relations: vec![("E".into(), vec![])],
        };
        assert!(validate_structure(&raw).is_empty());
    }

    #[test]
    fn induced_keeps_exactly_inner_tuples() {
        // Path 0 - 1 - 2 as an undirected graph.
        let p3 = FinStructure::graph(3, &[(0, 1), (1, 2)]).unwrap();
        let sub = p3.induced(&[0, 2]).unwrap();
        assert_eq!(sub.domain_size(), 2);
        assert!(sub.tuples_of("E").unwrap().is_empty());
        let sub = p3.induced(&[1, 2]).unwrap();
        let expected: BTreeSet<Vec<usize>> = [vec![0, 1], vec![1, 0]].into_iter().collect();
        assert_eq!(sub.tuples_of("E").unwrap(), &expected);
    }

    #[test]
    fn induced_respects_listed_order() {
        let arc = FinStructure::digraph(3, &[(0, 2)]).unwrap();
        let sub = arc.induced(&[2, 0]).unwrap();
        let expected: BTreeSet<Vec<usize>> = [vec![1, 0]].into_iter().collect();
        assert_eq!(sub.tuples_of("E").unwrap(), &expected);
    }

    #[test]
    fn induced_rejects_repeats_and_strays() {
        let g = FinStructure::graph(2, &[(0, 1)]).unwrap();
        assert!(g.induced(&[0, 0]).is_err());
        assert!(g.induced(&[0, 7]).is_err());
    }

    #[test]
    fn expand_appends_symbol_and_preserves_tuples() {
        let g = FinStructure::graph(2, &[(0, 1)]).unwrap();
        let expanded = g.expand("C", 1, &[vec![0]]).unwrap();
        assert_eq!(expanded.signature().len(), 2);
        assert_eq!(expanded.signature().symbols()[1].name, "C");
        assert_eq!(expanded.tuples_of("E").unwrap(), g.tuples_of("E").unwrap());
        assert_eq!(expanded.tuples_of("C").unwrap().len(), 1);
        assert!(g.expand("E", 2, &[]).is_err());
        assert!(g.expand("C", 1, &[vec![9]]).is_err());
    }

    #[test]
    fn without_relation_inverts_expand() {
        let g = FinStructure::graph(2, &[(0, 1)]).unwrap();
        let expanded = g.expand("C", 1, &[vec![0]]).unwrap();
        assert_eq!(expanded.without_relation("C").unwrap(), g);
        assert!(g.without_relation("X").is_err());
    }

    #[test]
    fn direct_power_square_of_an_arc() {
        // Single arc 0 -> 1; the square has 4 elements and a single arc
        // (0,0) -> (1,1), i.e. 0 -> 3 in rank order.
        let arc = FinStructure::digraph(2, &[(0, 1)]).unwrap();
        let square = arc.direct_power(2, 4096).unwrap();
        assert_eq!(square.domain_size(), 4);
        let expected: BTreeSet<Vec<usize>> = [vec![0, 3]].into_iter().collect();
        assert_eq!(square.tuples_of("E").unwrap(), &expected);
    }

    #[test]
    fn direct_power_tuple_counts_are_powers() {
        let k2 = FinStructure::graph(2, &[(0, 1)]).unwrap();
        let cube = k2.direct_power(3, 4096).unwrap();
        assert_eq!(cube.domain_size(), 8);
        assert_eq!(cube.tuples_of("E").unwrap().len(), 8);
    }

    #[test]
    fn direct_power_respects_cap_and_rejects_zero() {
        let k2 = FinStructure::graph(2, &[(0, 1)]).unwrap();
        assert!(matches!(
            k2.direct_power(13, 4096),
            Err(Error::Capacity { .. })
        ));
        assert!(k2.direct_power(0, 4096).is_err());
    }

    #[test]
    fn first_power_is_isomorphic_copy() {
        let g = FinStructure::graph(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.direct_power(1, 4096).unwrap(), g);
    }

    #[test]
    fn canonical_key_orders_structures() {
        let a = FinStructure::graph(2, &[]).unwrap();
        let b = FinStructure::graph(2, &[(0, 1)]).unwrap();
        assert_ne!(a.canonical_key(), b.canonical_key());
    }
}
