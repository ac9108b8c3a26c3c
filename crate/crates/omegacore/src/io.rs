//! JSON formats for structures, mappings, formulas, and problem inputs.
//!
//! Parsing is permissive about element notation: a structure's domain may
//! be a count (elements are `0..n-1` and tuples use numbers) or a list of
//! unique names (tuples may use names or indices), and the instance
//! formats accept names or indices likewise. Serialization always emits
//! the numeric form, with symbols in signature order and tuples sorted, so
//! equal values render to identical bytes.

use std::collections::{BTreeMap, BTreeSet};

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::amalgamation::{ClassSpec, ForbiddenPattern};
use crate::caps::Caps;
use crate::cores::CoreResult;
use crate::definability::{Atom, PpFormula};
use crate::error::Error;
use crate::morphisms::Mapping;
use crate::reduction::ConstantSpec;
use crate::structures::{FinStructure, Signature};
use crate::templates::{
    BetweennessInstance, QuartetSet, RootedForest, RootedTree, TreeDescription, TripleSet,
    UnrootedTree,
};

fn malformed(err: serde_json::Error) -> Error {
    Error::invalid(format!("malformed JSON: {err}"))
}

/// A domain is either a size or a list of unique element names.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum DomainRepr {
    Count(usize),
    Names(Vec<String>),
}

/// A tuple entry: an index, or a name into a named universe.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ElementRepr {
    Index(usize),
    Name(String),
}

fn name_index(names: &[String]) -> Result<BTreeMap<String, usize>, Error> {
    let mut index = BTreeMap::new();
    for (i, name) in names.iter().enumerate() {
        if index.insert(name.clone(), i).is_some() {
            return Err(Error::invalid(format!("element name `{name}` repeats")));
        }
    }
    Ok(index)
}

fn resolve_element(
    entry: &ElementRepr,
    names: Option<&BTreeMap<String, usize>>,
) -> Result<usize, Error> {
    match entry {
        ElementRepr::Index(i) => Ok(*i),
        ElementRepr::Name(name) => names
            .and_then(|index| index.get(name))
            .copied()
            .ok_or_else(|| Error::invalid(format!("unknown element name `{name}`"))),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StructureFile {
    signature: Map<String, Value>,
    domain: DomainRepr,
    #[serde(default)]
    relations: BTreeMap<String, Vec<Vec<ElementRepr>>>,
}

fn structure_from_value(value: &Value) -> Result<(FinStructure, Option<BTreeMap<String, usize>>), Error> {
    let file: StructureFile = serde_json::from_value(value.clone()).map_err(malformed)?;
    let mut symbols = Vec::new();
    for (name, arity) in &file.signature {
        let arity = arity.as_u64().ok_or_else(|| {
            Error::invalid(format!("arity of `{name}` must be a non-negative integer"))
        })?;
        symbols.push((name.clone(), arity as usize));
    }
    let signature = Signature::new(symbols)?;
    let (domain_size, names) = match &file.domain {
        DomainRepr::Count(n) => (*n, None),
        DomainRepr::Names(names) => (names.len(), Some(name_index(names)?)),
    };
    for name in file.relations.keys() {
        if signature.arity_of(name).is_none() {
            return Err(Error::invalid(format!(
                "relation `{name}` is not in the signature"
            )));
        }
    }
    // Omitted symbols hold the empty relation.
    let mut relations = Vec::new();
    for sym in signature.symbols() {
        let resolved: Vec<Vec<usize>> = match file.relations.get(&sym.name) {
            None => Vec::new(),
            Some(tuples) => tuples
                .iter()
                .map(|t| {
                    t.iter()
                        .map(|e| resolve_element(e, names.as_ref()))
                        .collect()
                })
                .collect::<Result<_, _>>()?,
        };
        relations.push((sym.name.clone(), resolved));
    }
    Ok((FinStructure::new(signature, domain_size, relations)?, names))
}

/// Parses a structure file.
pub fn parse_structure(text: &str) -> Result<FinStructure, Error> {
    let value: Value = serde_json::from_str(text).map_err(malformed)?;
    Ok(structure_from_value(&value)?.0)
}

/// The canonical JSON form of a structure: numeric domain, symbols in
/// signature order, tuples sorted.
pub fn structure_json(s: &FinStructure) -> Value {
    let mut signature = Map::new();
    let mut relations = Map::new();
    for (i, sym) in s.signature().symbols().iter().enumerate() {
        signature.insert(sym.name.clone(), json!(sym.arity));
        relations.insert(sym.name.clone(), json!(s.tuples(i)));
    }
    json!({
        "signature": signature,
        "domain": s.domain_size(),
        "relations": relations,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MappingFile {
    values: Vec<usize>,
}

/// Parses a mapping file of the form `{"values": [0, 1, 0]}`.
pub fn parse_mapping(text: &str) -> Result<Mapping, Error> {
    let file: MappingFile = serde_json::from_str(text).map_err(malformed)?;
    Ok(Mapping::new(file.values))
}

pub fn mapping_json(m: &Mapping) -> Value {
    json!({ "values": m.values() })
}

pub fn core_result_json(result: &CoreResult) -> Value {
    json!({
        "core": structure_json(&result.core),
        "inclusion": result.inclusion,
        "retraction": mapping_json(&result.retraction),
    })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AtomRepr {
    Rel { rel: String, args: Vec<String> },
    Eq { eq: [String; 2] },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FormulaFile {
    #[serde(default)]
    free: Vec<String>,
    #[serde(default)]
    bound: Vec<String>,
    #[serde(default)]
    atoms: Vec<AtomRepr>,
}

/// Parses a pp formula file.
pub fn parse_formula(text: &str) -> Result<PpFormula, Error> {
    let file: FormulaFile = serde_json::from_str(text).map_err(malformed)?;
    let atoms = file
        .atoms
        .into_iter()
        .map(|a| match a {
            AtomRepr::Rel { rel, args } => Atom::Rel { symbol: rel, args },
            AtomRepr::Eq { eq: [left, right] } => Atom::Eq { left, right },
        })
        .collect();
    PpFormula::new(file.free, file.bound, atoms)
}

pub fn formula_json(formula: &PpFormula) -> Value {
    let atoms: Vec<Value> = formula
        .atoms()
        .iter()
        .map(|atom| match atom {
            Atom::Rel { symbol, args } => json!({ "rel": symbol, "args": args }),
            Atom::Eq { left, right } => json!({ "eq": [left, right] }),
        })
        .collect();
    json!({
        "free": formula.free(),
        "bound": formula.bound(),
        "atoms": atoms,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ForbiddenFile {
    structure: Value,
    mode: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassSpecFile {
    signature: Map<String, Value>,
    #[serde(default)]
    forbidden: Vec<ForbiddenFile>,
    #[serde(default)]
    graph_mode: bool,
}

/// Parses a class specification. With `"graph_mode": true` every binary
/// symbol is treated as symmetric and irreflexive.
pub fn parse_class_spec(text: &str) -> Result<ClassSpec, Error> {
    let file: ClassSpecFile = serde_json::from_str(text).map_err(malformed)?;
    let mut symbols = Vec::new();
    for (name, arity) in &file.signature {
        let arity = arity.as_u64().ok_or_else(|| {
            Error::invalid(format!("arity of `{name}` must be a non-negative integer"))
        })?;
        symbols.push((name.clone(), arity as usize));
    }
    let signature = Signature::new(symbols)?;
    let symmetric: BTreeSet<String> = if file.graph_mode {
        signature
            .symbols()
            .iter()
            .filter(|sym| sym.arity == 2)
            .map(|sym| sym.name.clone())
            .collect()
    } else {
        BTreeSet::new()
    };
    let mut forbidden = Vec::new();
    for entry in &file.forbidden {
        let (structure, _) = structure_from_value(&entry.structure)?;
        let pattern = match entry.mode.as_str() {
            "induced" => ForbiddenPattern::induced(structure),
            "subgraph" => ForbiddenPattern::subgraph(structure),
            other => {
                return Err(Error::invalid(format!(
                    "forbidden mode must be `induced` or `subgraph`, got `{other}`"
                )))
            }
        };
        forbidden.push(pattern);
    }
    ClassSpec::new(signature, forbidden, symmetric)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantFile {
    symbol: String,
    element: ElementRepr,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantSpecFile {
    base: Value,
    #[serde(default)]
    constants: Vec<ConstantFile>,
}

/// Parses a constant specification; elements may be names when the base
/// structure has a named domain.
pub fn parse_constant_spec(text: &str, caps: &Caps) -> Result<ConstantSpec, Error> {
    let file: ConstantSpecFile = serde_json::from_str(text).map_err(malformed)?;
    let (base, names) = structure_from_value(&file.base)?;
    let constants = file
        .constants
        .iter()
        .map(|c| Ok((c.symbol.clone(), resolve_element(&c.element, names.as_ref())?)))
        .collect::<Result<Vec<(String, usize)>, Error>>()?;
    ConstantSpec::new(base, constants, caps)
}

/// Declared names, or names collected from the entries when the list is
/// omitted. Purely numeric entries require an explicit list.
fn universe<'a>(
    declared: Option<Vec<String>>,
    entries: impl Iterator<Item = &'a ElementRepr>,
) -> Result<(Vec<String>, BTreeMap<String, usize>), Error> {
    let names = match declared {
        Some(names) => names,
        None => {
            let mut collected = BTreeSet::new();
            for entry in entries {
                match entry {
                    ElementRepr::Name(name) => {
                        collected.insert(name.clone());
                    }
                    ElementRepr::Index(i) => {
                        return Err(Error::invalid(format!(
                            "entry {i} is numeric; an explicit name list is required"
                        )))
                    }
                }
            }
            collected.into_iter().collect()
        }
    };
    let index = name_index(&names)?;
    Ok((names, index))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TriplesFile {
    #[serde(default)]
    leaves: Option<Vec<String>>,
    #[serde(default)]
    triples: Vec<[ElementRepr; 3]>,
}

/// Parses a rooted-triple instance; `["c","a","b"]` reads as `c : ab`.
pub fn parse_triples(text: &str) -> Result<TripleSet, Error> {
    let file: TriplesFile = serde_json::from_str(text).map_err(malformed)?;
    let (leaves, index) = universe(file.leaves, file.triples.iter().flatten())?;
    let triples = file
        .triples
        .iter()
        .map(|t| {
            Ok([
                resolve_element(&t[0], Some(&index))?,
                resolve_element(&t[1], Some(&index))?,
                resolve_element(&t[2], Some(&index))?,
            ])
        })
        .collect::<Result<Vec<_>, Error>>()?;
    TripleSet::new(leaves, triples)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QuartetsFile {
    #[serde(default)]
    leaves: Option<Vec<String>>,
    #[serde(default)]
    quartets: Vec<[ElementRepr; 4]>,
}

/// Parses a quartet instance; `["a","b","c","d"]` reads as `ab | cd`.
pub fn parse_quartets(text: &str) -> Result<QuartetSet, Error> {
    let file: QuartetsFile = serde_json::from_str(text).map_err(malformed)?;
    let (leaves, index) = universe(file.leaves, file.quartets.iter().flatten())?;
    let quartets = file
        .quartets
        .iter()
        .map(|q| {
            Ok([
                resolve_element(&q[0], Some(&index))?,
                resolve_element(&q[1], Some(&index))?,
                resolve_element(&q[2], Some(&index))?,
                resolve_element(&q[3], Some(&index))?,
            ])
        })
        .collect::<Result<Vec<_>, Error>>()?;
    QuartetSet::new(leaves, quartets)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BetweennessFile {
    #[serde(default)]
    elements: Option<Vec<String>>,
    #[serde(default)]
    triples: Vec<[ElementRepr; 3]>,
}

/// Parses a betweenness instance; `["a","b","c"]` asks for `b` between `a`
/// and `c`.
pub fn parse_betweenness(text: &str) -> Result<BetweennessInstance, Error> {
    let file: BetweennessFile = serde_json::from_str(text).map_err(malformed)?;
    let (elements, index) = universe(file.elements, file.triples.iter().flatten())?;
    let triples = file
        .triples
        .iter()
        .map(|t| {
            Ok([
                resolve_element(&t[0], Some(&index))?,
                resolve_element(&t[1], Some(&index))?,
                resolve_element(&t[2], Some(&index))?,
            ])
        })
        .collect::<Result<Vec<_>, Error>>()?;
    BetweennessInstance::new(elements, triples)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeDescriptionFile {
    #[serde(default)]
    vertices: Option<Vec<String>>,
    #[serde(default)]
    anc: Vec<[ElementRepr; 2]>,
    #[serde(default)]
    nonanc: Vec<[ElementRepr; 2]>,
}

/// Parses a tree-description instance: required and forbidden strict
/// ancestorships.
pub fn parse_tree_description(text: &str) -> Result<TreeDescription, Error> {
    let file: TreeDescriptionFile = serde_json::from_str(text).map_err(malformed)?;
    let entries = file.anc.iter().chain(&file.nonanc).flatten();
    let (vertices, index) = universe(file.vertices, entries)?;
    let resolve_arcs = |arcs: &[[ElementRepr; 2]]| -> Result<Vec<(usize, usize)>, Error> {
        arcs.iter()
            .map(|a| {
                Ok((
                    resolve_element(&a[0], Some(&index))?,
                    resolve_element(&a[1], Some(&index))?,
                ))
            })
            .collect()
    };
    let anc = resolve_arcs(&file.anc)?;
    let nonanc = resolve_arcs(&file.nonanc)?;
    TreeDescription::new(vertices, anc, nonanc)
}

/// JSON form of a rooted tree: per-node parent (`null` at the root) and
/// per-node leaf name (`null` on internal nodes).
pub fn rooted_tree_json(tree: &RootedTree, leaves: &[String]) -> Value {
    let parent: Vec<Option<usize>> = (0..tree.node_count()).map(|v| tree.parent_of(v)).collect();
    let leaf: Vec<Option<&String>> = (0..tree.node_count())
        .map(|v| tree.leaf_label(v).map(|l| &leaves[l]))
        .collect();
    json!({ "parent": parent, "leaf": leaf })
}

/// JSON form of an unrooted tree: sorted edge list and per-node leaf name.
pub fn unrooted_tree_json(tree: &UnrootedTree, leaves: &[String]) -> Value {
    let edges: Vec<[usize; 2]> = tree.edges().iter().map(|&(u, v)| [u, v]).collect();
    let leaf: Vec<Option<&String>> = (0..tree.node_count())
        .map(|v| tree.leaf_label(v).map(|l| &leaves[l]))
        .collect();
    json!({ "nodes": tree.node_count(), "edges": edges, "leaf": leaf })
}

/// JSON form of a rooted forest: per-vertex parent, `null` at roots.
pub fn forest_json(forest: &RootedForest) -> Value {
    json!({ "parent": forest.parent() })
}

/// Canonical rendering: compact separators, insertion-ordered keys.
pub fn to_canonical_string(value: &Value) -> String {
    serde_json::to_string(value).expect("JSON values always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::templates::solve_rooted_triples;

    fn k2() -> FinStructure {
        FinStructure::graph(2, &[(0, 1)]).unwrap()
    }

    #[test]
    fn structure_parses_numeric_domain() {
        let text = r#"{"signature": {"E": 2}, "domain": 2, "relations": {"E": [[0,1],[1,0]]}}"#;
        assert_eq!(parse_structure(text).unwrap(), k2());
    }

    #[test]
    fn structure_parses_named_domain() {
        let text =
            r#"{"signature": {"E": 2}, "domain": ["a","b"], "relations": {"E": [["a","b"],["b","a"]]}}"#;
        assert_eq!(parse_structure(text).unwrap(), k2());
        let mixed =
            r#"{"signature": {"E": 2}, "domain": ["a","b"], "relations": {"E": [["a",1],[1,"a"]]}}"#;
        assert_eq!(parse_structure(mixed).unwrap(), k2());
    }

    #[test]
    fn structure_rendering_is_canonical() {
        let rendered = to_canonical_string(&structure_json(&k2()));
        assert_eq!(
            rendered,
            r#"{"signature":{"E":2},"domain":2,"relations":{"E":[[0,1],[1,0]]}}"#
        );
        assert_eq!(parse_structure(&rendered).unwrap(), k2());
    }

    #[test]
    fn structure_signature_order_is_preserved() {
        let text = r#"{"signature": {"R": 1, "E": 2}, "domain": 1, "relations": {}}"#;
        let s = parse_structure(text).unwrap();
        assert_eq!(s.signature().index_of("R"), Some(0));
        assert_eq!(s.signature().index_of("E"), Some(1));
    }

    #[test]
    fn structure_parse_errors_are_specific() {
        let cases = [
            r#"{"signature": {"E": 2}, "domain": ["a","a"], "relations": {}}"#,
            r#"{"signature": {"E": 2}, "domain": ["a"], "relations": {"E": [["a","b"]]}}"#,
            r#"{"signature": {"E": 2}, "domain": 2, "relations": {"E": [["a","b"]]}}"#,
            r#"{"signature": {"E": 2}, "domain": 2, "relations": {"F": [[0,1]]}}"#,
            r#"{"signature": {"E": "two"}, "domain": 2, "relations": {}}"#,
            r#"{"signature": {"E": 2}, "domain": 2, "unexpected": 1}"#,
        ];
        for text in cases {
            assert!(parse_structure(text).is_err(), "{text}");
        }
    }

    #[test]
    fn relations_key_may_be_omitted() {
        let s = parse_structure(r#"{"signature": {"E": 2}, "domain": 3}"#).unwrap();
        assert_eq!(s.domain_size(), 3);
        assert_eq!(s.tuples(0).len(), 0);
    }

    #[test]
    fn mapping_roundtrip() {
        let m = Mapping::new(vec![0, 1, 0]);
        let rendered = to_canonical_string(&mapping_json(&m));
        assert_eq!(rendered, r#"{"values":[0,1,0]}"#);
        assert_eq!(parse_mapping(&rendered).unwrap(), m);
        assert!(parse_mapping(r#"{"values": [0], "extra": 1}"#).is_err());
    }

    #[test]
    fn formula_roundtrip_matches_declared_shape() {
        let text = r#"{"free": ["x0","x1"], "bound": ["y0"],
                       "atoms": [{"rel": "E", "args": ["x0","y0"]}, {"eq": ["y0","x1"]}]}"#;
        let formula = parse_formula(text).unwrap();
        assert_eq!(formula.free(), ["x0", "x1"]);
        assert_eq!(formula.bound(), ["y0"]);
        assert_eq!(formula.atoms().len(), 2);
        let rendered = to_canonical_string(&formula_json(&formula));
        assert_eq!(parse_formula(&rendered).unwrap(), formula);
    }

    #[test]
    fn class_spec_graph_mode_marks_binary_symbols() {
        let text = r#"{
            "signature": {"E": 2},
            "forbidden": [{"structure": {"signature": {"E": 2}, "domain": 3,
                "relations": {"E": [[0,1],[0,2],[1,0],[1,2],[2,0],[2,1]]}}, "mode": "induced"}],
            "graph_mode": true
        }"#;
        let spec = parse_class_spec(text).unwrap();
        assert!(spec.symmetric_binary().contains("E"));
        assert_eq!(spec.forbidden().len(), 1);
        let bad = text.replace("induced", "weird");
        assert!(parse_class_spec(&bad).is_err());
    }

    #[test]
    fn constant_spec_resolves_named_elements() {
        let caps = Caps::default();
        let text = r#"{
            "base": {"signature": {"E": 2}, "domain": ["a","b"],
                     "relations": {"E": [["a","b"],["b","a"]]}},
            "constants": [{"symbol": "C1", "element": "a"}]
        }"#;
        let spec = parse_constant_spec(text, &caps).unwrap();
        assert_eq!(spec.constants(), [("C1".to_string(), 0)]);
        let numeric = text.replace(r#""a"}"#, "1}");
        let spec = parse_constant_spec(&numeric, &caps).unwrap();
        assert_eq!(spec.constants(), [("C1".to_string(), 1)]);
    }

    #[test]
    fn triples_parse_with_declared_and_inferred_leaves() {
        let declared = r#"{"leaves": ["a","b","c"], "triples": [["c","a","b"]]}"#;
        let ts = parse_triples(declared).unwrap();
        assert_eq!(ts.leaves(), ["a", "b", "c"]);
        assert_eq!(ts.triples(), [[2, 0, 1]]);

        let inferred = r#"{"triples": [["c","a","b"]]}"#;
        assert_eq!(parse_triples(inferred).unwrap(), ts);

        let numeric = r#"{"leaves": ["a","b","c"], "triples": [[2,0,1]]}"#;
        assert_eq!(parse_triples(numeric).unwrap(), ts);

        let bare_numeric = r#"{"triples": [[2,0,1]]}"#;
        assert!(parse_triples(bare_numeric).is_err());
    }

    #[test]
    fn quartets_and_betweenness_and_descriptions_parse() {
        let qs = parse_quartets(r#"{"quartets": [["a","b","c","d"]]}"#).unwrap();
        assert_eq!(qs.leaves(), ["a", "b", "c", "d"]);
        assert_eq!(qs.quartets(), [[0, 1, 2, 3]]);

        let b = parse_betweenness(r#"{"elements": ["p","q","r"], "triples": [["p","q","r"]]}"#)
            .unwrap();
        assert_eq!(b.triples(), [[0, 1, 2]]);

        let td = parse_tree_description(
            r#"{"vertices": ["u","v"], "anc": [["u","v"]], "nonanc": [["v","u"]]}"#,
        )
        .unwrap();
        assert_eq!(td.anc(), [(0, 1)]);
        assert_eq!(td.nonanc(), [(1, 0)]);
    }

    #[test]
    fn rooted_tree_renders_parents_and_leaf_names() {
        let ts = parse_triples(r#"{"leaves": ["a","b","c"], "triples": [["c","a","b"]]}"#).unwrap();
        let tree = solve_rooted_triples(&ts).unwrap().unwrap();
        let rendered = to_canonical_string(&rooted_tree_json(&tree, ts.leaves()));
        assert_eq!(
            rendered,
            r#"{"parent":[null,0,1,1,0],"leaf":[null,null,"a","b","c"]}"#
        );
    }
}
