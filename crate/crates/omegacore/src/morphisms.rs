//! Mappings between finite structures: classification, homomorphism and
//! embedding search, isomorphism, automorphisms, and orbits of tuples.
//!
//! All search entry points share one backtracking kernel with arc-consistency
//! preprocessing and forward checking. Variables are assigned in domain order
//! and values are tried in ascending order, so the first solution found is
//! the lexicographically least one and full enumerations come out sorted.

use std::collections::VecDeque;
use std::ops::ControlFlow;

use crate::caps::Caps;
use crate::error::Error;
use crate::structures::FinStructure;

/// A total map from `0..len` into the domain of some target structure.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mapping {
    values: Vec<usize>,
}

impl Mapping {
    pub fn new(values: Vec<usize>) -> Self {
        Mapping { values }
    }

    pub fn identity(n: usize) -> Self {
        Mapping {
            values: (0..n).collect(),
        }
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn into_values(self) -> Vec<usize> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.values[x]
    }

    pub fn apply_tuple(&self, tuple: &[usize]) -> Vec<usize> {
        tuple.iter().map(|&x| self.values[x]).collect()
    }

    /// Composition `self . first`: first apply `first`, then `self`.
    pub fn after(&self, first: &Mapping) -> Mapping {
        Mapping {
            values: first.values.iter().map(|&v| self.values[v]).collect(),
        }
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.values.len()];
        for &v in &self.values {
            if v < seen.len() {
                if seen[v] {
                    return false;
                }
                seen[v] = true;
            } else {
                // Values beyond the source size cannot repeat via this array;
                // fall back to a full scan.
                return self
                    .values
                    .iter()
                    .enumerate()
                    .all(|(i, a)| self.values[i + 1..].iter().all(|b| a != b));
            }
        }
        true
    }
}

/// What a mapping is, as a bundle of independent properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MappingFlags {
    /// Tuples of every relation are preserved forward.
    pub is_homomorphism: bool,
    /// Tuples are preserved in both directions (`R(t)` iff `R(f(t))`).
    pub is_strong: bool,
    pub is_injective: bool,
    /// Injective and strong: an isomorphism onto an induced substructure.
    pub is_embedding: bool,
    /// A surjective embedding.
    pub is_isomorphism: bool,
}

/// Classifies `m` as a map from `src` to `dst`.
///
/// The check is direct tuple-membership inspection and shares nothing with
/// the search kernel, so it doubles as an independent verifier for search
/// results.
pub fn classify(m: &Mapping, src: &FinStructure, dst: &FinStructure) -> Result<MappingFlags, Error> {
    if src.signature() != dst.signature() {
        return Err(Error::SignatureMismatch(
            "classify requires both structures over one signature".into(),
        ));
    }
    if m.len() != src.domain_size() {
        return Err(Error::invalid(format!(
            "mapping has {} entries, source has {} elements",
            m.len(),
            src.domain_size()
        )));
    }
    if let Some(&v) = m.values().iter().find(|&&v| v >= dst.domain_size()) {
        return Err(Error::invalid(format!(
            "mapping value {v} out of target domain (size {})",
            dst.domain_size()
        )));
    }

    let forward = (0..src.signature().len()).all(|idx| {
        src.tuples(idx)
            .iter()
            .all(|t| dst.contains(idx, &m.apply_tuple(t)))
    });

    // Backward direction: every tuple over the source whose image is in dst
    // must itself be in src. Walk dst tuples and their preimage products.
    let mut preimage: Vec<Vec<usize>> = vec![Vec::new(); dst.domain_size()];
    for (x, &v) in m.values().iter().enumerate() {
        preimage[v].push(x);
    }
    let backward = (0..src.signature().len()).all(|idx| {
        dst.tuples(idx).iter().all(|d| {
            preimage_product(d, &preimage, |t| src.contains(idx, t))
        })
    });

    let is_injective = m.is_injective();
    let mut image_seen = vec![false; dst.domain_size()];
    for &v in m.values() {
        image_seen[v] = true;
    }
    let surjective = image_seen.iter().all(|&b| b);

    let is_homomorphism = forward;
    let is_strong = forward && backward;
    let is_embedding = is_strong && is_injective;
    Ok(MappingFlags {
        is_homomorphism,
        is_strong,
        is_injective,
        is_embedding,
        is_isomorphism: is_embedding && surjective,
    })
}

/// Calls `check` on every tuple whose entries come from the given preimage
/// sets; returns false as soon as one fails.
fn preimage_product(
    image: &[usize],
    preimage: &[Vec<usize>],
    mut check: impl FnMut(&[usize]) -> bool,
) -> bool {
    let sets: Vec<&[usize]> = image.iter().map(|&v| preimage[v].as_slice()).collect();
    if sets.iter().any(|s| s.is_empty()) {
        return true;
    }
    let mut idx = vec![0usize; sets.len()];
    let mut tuple: Vec<usize> = sets.iter().map(|s| s[0]).collect();
    loop {
        if !check(&tuple) {
            return false;
        }
        let mut pos = sets.len();
        loop {
            if pos == 0 {
                return true;
            }
            pos -= 1;
            if idx[pos] + 1 < sets[pos].len() {
                idx[pos] += 1;
                tuple[pos] = sets[pos][idx[pos]];
                break;
            }
            idx[pos] = 0;
            tuple[pos] = sets[pos][0];
        }
    }
}

/// Fixed-capacity bit set over `0..len`.
#[derive(Debug, Clone)]
struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    fn empty(len: usize) -> Self {
        BitSet {
            words: vec![0; len.div_ceil(64)],
        }
    }

    fn full(len: usize) -> Self {
        let mut set = BitSet::empty(len);
        for (i, word) in set.words.iter_mut().enumerate() {
            let remaining = len - i * 64;
            *word = if remaining >= 64 {
                u64::MAX
            } else {
                (1u64 << remaining) - 1
            };
        }
        set
    }

    fn contains(&self, i: usize) -> bool {
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn intersects(&self, other: &BitSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .any(|(&a, &b)| a & b != 0)
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut word = w;
            std::iter::from_fn(move || {
                if word == 0 {
                    None
                } else {
                    let bit = word.trailing_zeros() as usize;
                    word &= word - 1;
                    Some(wi * 64 + bit)
                }
            })
        })
    }
}

/// Internal description of one search over mappings `src -> dst`.
#[derive(Debug, Clone)]
pub(crate) struct SearchSpec {
    /// Require distinct values.
    pub injective: bool,
    /// Require an embedding (injective and strong).
    pub embedding: bool,
    /// Try values in descending order (first solution is lex-greatest).
    pub descending: bool,
    /// Pick the unassigned variable with the smallest domain next instead of
    /// going in index order. Faster for pure existence questions, but
    /// solutions no longer arrive in lexicographic order, and merges are not
    /// supported.
    pub dynamic_order: bool,
    /// `merged[x] = Some(r)` forces `f(x) = f(r)`; `r` must precede `x`.
    pub merged: Vec<Option<usize>>,
    /// `(variable, value)` preassignments.
    pub pins: Vec<(usize, usize)>,
}

impl SearchSpec {
    pub(crate) fn homs() -> Self {
        SearchSpec {
            injective: false,
            embedding: false,
            descending: false,
            dynamic_order: false,
            merged: Vec::new(),
            pins: Vec::new(),
        }
    }

    pub(crate) fn embeddings() -> Self {
        SearchSpec {
            embedding: true,
            injective: true,
            ..SearchSpec::homs()
        }
    }

    pub(crate) fn existence() -> Self {
        SearchSpec {
            dynamic_order: true,
            ..SearchSpec::homs()
        }
    }
}

/// Runs the backtracking search, handing each solution to `on_solution`
/// until it breaks or the space is exhausted.
pub(crate) fn search(
    src: &FinStructure,
    dst: &FinStructure,
    spec: &SearchSpec,
    mut on_solution: impl FnMut(&[usize]) -> ControlFlow<()>,
) -> Result<(), Error> {
    if src.signature() != dst.signature() {
        return Err(Error::SignatureMismatch(
            "search requires both structures over one signature".into(),
        ));
    }
    let n = src.domain_size();
    let d = dst.domain_size();
    let injective = spec.injective || spec.embedding;

    if !spec.merged.is_empty() && spec.merged.len() != n {
        return Err(Error::invalid("merge table length differs from domain"));
    }
    if spec.dynamic_order && spec.merged.iter().any(Option::is_some) {
        return Err(Error::invalid(
            "dynamic variable order does not support merged variables",
        ));
    }
    for (x, r) in spec.merged.iter().enumerate() {
        if let Some(r) = r {
            if *r >= x {
                return Err(Error::invalid("merge representative must precede variable"));
            }
        }
    }
    for &(var, value) in &spec.pins {
        if var >= n || value >= d {
            return Err(Error::invalid(format!("pin ({var}, {value}) out of range")));
        }
    }

    if n == 0 {
        // The empty mapping vacuously satisfies every search flag.
        let _ = on_solution(&[]);
        return Ok(());
    }
    if injective && n > d {
        return Ok(());
    }

    let sig = src.signature().clone();
    let arity = |idx: usize| sig.symbols()[idx].arity;

    // Per-symbol target masks for unary and binary relations.
    let mut unary_mask: Vec<Option<BitSet>> = vec![None; sig.len()];
    let mut fwd: Vec<Vec<BitSet>> = vec![Vec::new(); sig.len()];
    let mut bwd: Vec<Vec<BitSet>> = vec![Vec::new(); sig.len()];
    for idx in 0..sig.len() {
        match arity(idx) {
            1 => {
                let mut mask = BitSet::empty(d);
                for t in dst.tuples(idx) {
                    mask.insert(t[0]);
                }
                unary_mask[idx] = Some(mask);
            }
            2 => {
                let mut f = vec![BitSet::empty(d); d];
                let mut b = vec![BitSet::empty(d); d];
                for t in dst.tuples(idx) {
                    f[t[0]].insert(t[1]);
                    b[t[1]].insert(t[0]);
                }
                fwd[idx] = f;
                bwd[idx] = b;
            }
            _ => {}
        }
    }

    // Source constraints, split by arity.
    // adj[x]: binary constraints (other, symbol, x_is_first) with x != other.
    let mut adj: Vec<Vec<(usize, usize, bool)>> = vec![Vec::new(); n];
    // diag[x]: symbols with the diagonal constraint (x, x).
    let mut diag: Vec<Vec<usize>> = vec![Vec::new(); n];
    // Constraints of arity >= 3, checked once all their variables are
    // assigned; var_to_higher lists, per variable, the constraints it sits in.
    let mut higher: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut var_to_higher: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domains: Vec<BitSet> = vec![BitSet::full(d); n];

    for idx in 0..sig.len() {
        match arity(idx) {
            1 => {
                let mask = unary_mask[idx].as_ref().expect("built above");
                for t in src.tuples(idx) {
                    let x = t[0];
                    for v in 0..d {
                        if domains[x].contains(v) && !mask.contains(v) {
                            domains[x].remove(v);
                        }
                    }
                }
                if spec.embedding {
                    // Values satisfying the unary relation are off limits for
                    // source elements that do not satisfy it.
                    for x in 0..n {
                        if !src.contains(idx, &[x]) {
                            for v in mask.iter().collect::<Vec<_>>() {
                                domains[x].remove(v);
                            }
                        }
                    }
                }
            }
            2 => {
                for t in src.tuples(idx) {
                    let (x, y) = (t[0], t[1]);
                    if x == y {
                        diag[x].push(idx);
                    } else {
                        adj[x].push((y, idx, true));
                        adj[y].push((x, idx, false));
                    }
                }
            }
            _ => {
                for t in src.tuples(idx) {
                    let constraint = higher.len();
                    higher.push((idx, t.clone()));
                    let mut vars: Vec<usize> = t.clone();
                    vars.sort();
                    vars.dedup();
                    for var in vars {
                        var_to_higher[var].push(constraint);
                    }
                }
            }
        }
    }
    // Number of distinct unassigned variables per higher-arity constraint.
    let mut higher_unassigned: Vec<usize> = higher
        .iter()
        .map(|(_, t)| {
            let mut vars = t.clone();
            vars.sort();
            vars.dedup();
            vars.len()
        })
        .collect();

    for x in 0..n {
        for &idx in &diag[x] {
            let keep: Vec<usize> = domains[x]
                .iter()
                .filter(|&v| !fwd[idx][v].contains(v))
                .collect();
            for v in keep {
                domains[x].remove(v);
            }
        }
    }

    for &(var, value) in &spec.pins {
        if !domains[var].contains(value) {
            return Ok(());
        }
        let others: Vec<usize> = domains[var].iter().filter(|&v| v != value).collect();
        for v in others {
            domains[var].remove(v);
        }
    }

    // Merged variables share one domain.
    if !spec.merged.is_empty() {
        for x in 0..n {
            if let Some(r) = spec.merged[x] {
                let shared: Vec<usize> = domains[r]
                    .iter()
                    .filter(|&v| domains[x].contains(v))
                    .collect();
                let mut set = BitSet::empty(d);
                for v in shared {
                    set.insert(v);
                }
                domains[x] = set.clone();
                domains[r] = set;
            }
        }
    }

    // Arc consistency over the binary constraints.
    let mut queue: VecDeque<(usize, usize, usize, bool)> = VecDeque::new();
    for x in 0..n {
        for &(y, idx, x_first) in &adj[x] {
            queue.push_back((x, y, idx, x_first));
        }
    }
    while let Some((x, y, idx, x_first)) = queue.pop_front() {
        let removals: Vec<usize> = domains[x]
            .iter()
            .filter(|&v| {
                let mask = if x_first { &fwd[idx][v] } else { &bwd[idx][v] };
                !mask.intersects(&domains[y])
            })
            .collect();
        if removals.is_empty() {
            continue;
        }
        for v in removals {
            domains[x].remove(v);
        }
        if domains[x].is_empty() {
            return Ok(());
        }
        for &(z, idx2, x_first2) in &adj[x] {
            queue.push_back((z, x, idx2, !x_first2));
        }
    }
    if domains.iter().any(|dom| dom.is_empty()) {
        return Ok(());
    }

    // Representative table for merged variables (identity when absent).
    let rep: Vec<Option<usize>> = if spec.merged.is_empty() {
        vec![None; n]
    } else {
        spec.merged.clone()
    };

    let mut assignment: Vec<Option<usize>> = vec![None; n];
    let mut used = BitSet::empty(d);
    let mut trail: Vec<(usize, usize)> = Vec::new();
    // Variables in assignment order (needed by the embedding checks).
    let mut assigned_stack: Vec<usize> = Vec::new();

    struct Frame {
        var: usize,
        candidates: Vec<usize>,
        next: usize,
        trail_mark: usize,
    }

    let binary_syms: Vec<usize> = (0..sig.len()).filter(|&i| arity(i) == 2).collect();
    let higher_syms: Vec<usize> = (0..sig.len()).filter(|&i| arity(i) >= 3).collect();

    // Next variable: index order, or smallest current domain when dynamic.
    let pick_var = |domains: &[BitSet], assignment: &[Option<usize>], depth: usize| -> usize {
        if !spec.dynamic_order {
            return depth;
        }
        let mut best = usize::MAX;
        let mut best_size = usize::MAX;
        for x in 0..n {
            if assignment[x].is_none() {
                let size = domains[x].count();
                if size < best_size {
                    best = x;
                    best_size = size;
                    if size <= 1 {
                        break;
                    }
                }
            }
        }
        best
    };

    let candidates_for =
        |var: usize, domains: &[BitSet], assignment: &[Option<usize>]| -> Vec<usize> {
            if let Some(r) = rep[var] {
                let v = assignment[r].expect("representative assigned earlier");
                if domains[var].contains(v) {
                    vec![v]
                } else {
                    Vec::new()
                }
            } else {
                let mut values: Vec<usize> = domains[var].iter().collect();
                if spec.descending {
                    values.reverse();
                }
                values
            }
        };

    let first_var = pick_var(&domains, &assignment, 0);
    let mut frames: Vec<Frame> = vec![Frame {
        var: first_var,
        candidates: candidates_for(first_var, &domains, &assignment),
        next: 0,
        trail_mark: 0,
    }];

    'outer: loop {
        let depth = match frames.len().checked_sub(1) {
            Some(d) => d,
            None => break,
        };
        let var = frames[depth].var;

        // Undo the previous attempt of this frame, if any.
        if let Some(v) = assignment[var].take() {
            if injective {
                used.remove(v);
            }
            assigned_stack.pop();
            for &c in &var_to_higher[var] {
                higher_unassigned[c] += 1;
            }
            while trail.len() > frames[depth].trail_mark {
                let (x, value) = trail.pop().expect("non-empty trail");
                domains[x].insert(value);
            }
        }

        loop {
            let v = {
                let frame = &mut frames[depth];
                if frame.next >= frame.candidates.len() {
                    break;
                }
                let v = frame.candidates[frame.next];
                frame.next += 1;
                v
            };

            if injective && used.contains(v) {
                continue;
            }

            // Embedding mode: reject value pairs that would add binary
            // tuples absent from the source.
            if spec.embedding {
                let mut clash = false;
                for &idx in &binary_syms {
                    if !src.contains(idx, &[var, var]) && fwd[idx][v].contains(v) {
                        clash = true;
                        break;
                    }
                    for &y in &assigned_stack {
                        let w = assignment[y].expect("on the assigned stack");
                        if !src.contains(idx, &[var, y]) && fwd[idx][v].contains(w) {
                            clash = true;
                            break;
                        }
                        if !src.contains(idx, &[y, var]) && bwd[idx][v].contains(w) {
                            clash = true;
                            break;
                        }
                    }
                    if clash {
                        break;
                    }
                }
                if clash {
                    continue;
                }
            }

            // Constraints of arity >= 3 with this as their last free variable.
            let mut violated = false;
            for &c in &var_to_higher[var] {
                if higher_unassigned[c] != 1 {
                    continue;
                }
                let (idx, tuple) = &higher[c];
                let image: Vec<usize> = tuple
                    .iter()
                    .map(|&x| if x == var { v } else { assignment[x].expect("assigned") })
                    .collect();
                if !dst.contains(*idx, &image) {
                    violated = true;
                    break;
                }
            }
            if violated {
                continue;
            }

            // Commit and forward-check binary constraints into the future.
            frames[depth].trail_mark = trail.len();
            assignment[var] = Some(v);
            if injective {
                used.insert(v);
            }
            assigned_stack.push(var);
            for &c in &var_to_higher[var] {
                higher_unassigned[c] -= 1;
            }
            let mut emptied = false;
            for &(other, idx, x_first) in &adj[var] {
                if assignment[other].is_some() {
                    continue;
                }
                let mask = if x_first { &fwd[idx][v] } else { &bwd[idx][v] };
                let removals: Vec<usize> = domains[other]
                    .iter()
                    .filter(|&w| !mask.contains(w))
                    .collect();
                for w in removals {
                    domains[other].remove(w);
                    trail.push((other, w));
                }
                if domains[other].is_empty() {
                    emptied = true;
                    break;
                }
            }
            if emptied {
                assignment[var] = None;
                if injective {
                    used.remove(v);
                }
                assigned_stack.pop();
                for &c in &var_to_higher[var] {
                    higher_unassigned[c] += 1;
                }
                while trail.len() > frames[depth].trail_mark {
                    let (x, value) = trail.pop().expect("non-empty trail");
                    domains[x].insert(value);
                }
                continue;
            }

            // Assigned successfully.
            if frames.len() == n {
                let values: Vec<usize> =
                    assignment.iter().map(|a| a.expect("complete")).collect();
                let ok = if spec.embedding && !higher_syms.is_empty() {
                    embedding_higher_backward(src, dst, &values, &higher_syms)
                } else {
                    true
                };
                if ok && on_solution(&values).is_break() {
                    return Ok(());
                }
                continue 'outer;
            }
            let next_var = pick_var(&domains, &assignment, frames.len());
            let candidates = candidates_for(next_var, &domains, &assignment);
            frames.push(Frame {
                var: next_var,
                candidates,
                next: 0,
                trail_mark: trail.len(),
            });
            continue 'outer;
        }

        frames.pop();
    }
    Ok(())
}

/// Backward check for relations of arity three and more, for injective maps:
/// any target tuple inside the image must pull back into the source.
fn embedding_higher_backward(
    src: &FinStructure,
    dst: &FinStructure,
    values: &[usize],
    higher_syms: &[usize],
) -> bool {
    let mut inverse: Vec<Option<usize>> = vec![None; dst.domain_size()];
    for (x, &v) in values.iter().enumerate() {
        inverse[v] = Some(x);
    }
    higher_syms.iter().all(|&idx| {
        dst.tuples(idx).iter().all(|t| {
            match t
                .iter()
                .map(|&v| inverse[v])
                .collect::<Option<Vec<usize>>>()
            {
                Some(preimage) => src.contains(idx, &preimage),
                None => true,
            }
        })
    })
}

/// First homomorphism from `src` to `dst` in lexicographic order, if any.
pub fn find_homomorphism(src: &FinStructure, dst: &FinStructure) -> Result<Option<Mapping>, Error> {
    first_solution(src, dst, &SearchSpec::homs())
}

/// All homomorphisms from `src` to `dst` in lexicographic order, cut off
/// after `limit` solutions when given.
pub fn enumerate_homomorphisms(
    src: &FinStructure,
    dst: &FinStructure,
    limit: Option<usize>,
) -> Result<Vec<Mapping>, Error> {
    collect_solutions(src, dst, &SearchSpec::homs(), limit)
}

/// First embedding (injective strong homomorphism) in lexicographic order.
pub fn find_embedding(src: &FinStructure, dst: &FinStructure) -> Result<Option<Mapping>, Error> {
    first_solution(src, dst, &SearchSpec::embeddings())
}

/// All embeddings in lexicographic order, cut off after `limit` when given.
pub fn enumerate_embeddings(
    src: &FinStructure,
    dst: &FinStructure,
    limit: Option<usize>,
) -> Result<Vec<Mapping>, Error> {
    collect_solutions(src, dst, &SearchSpec::embeddings(), limit)
}

/// Whether any homomorphism from `src` to `dst` exists. Uses dynamic
/// variable ordering, so it is usually faster than [`find_homomorphism`]
/// when only the answer matters.
pub(crate) fn exists_homomorphism(src: &FinStructure, dst: &FinStructure) -> Result<bool, Error> {
    Ok(first_solution(src, dst, &SearchSpec::existence())?.is_some())
}

/// Whether `src` embeds into `dst`, i.e. occurs as an induced substructure.
pub(crate) fn exists_embedding(src: &FinStructure, dst: &FinStructure) -> Result<bool, Error> {
    let spec = SearchSpec {
        dynamic_order: true,
        ..SearchSpec::embeddings()
    };
    Ok(first_solution(src, dst, &spec)?.is_some())
}

/// Whether some injective (not necessarily strong) homomorphism exists,
/// i.e. `src` occurs as a weak substructure of `dst`.
pub(crate) fn exists_injective_homomorphism(
    src: &FinStructure,
    dst: &FinStructure,
) -> Result<bool, Error> {
    let spec = SearchSpec {
        injective: true,
        ..SearchSpec::existence()
    };
    Ok(first_solution(src, dst, &spec)?.is_some())
}

/// Whether some homomorphism maps each pinned variable to its pinned value.
pub(crate) fn exists_hom_pinned(
    src: &FinStructure,
    dst: &FinStructure,
    pins: &[(usize, usize)],
) -> Result<bool, Error> {
    let spec = SearchSpec {
        pins: pins.to_vec(),
        ..SearchSpec::existence()
    };
    Ok(first_solution(src, dst, &spec)?.is_some())
}

pub(crate) fn first_solution(
    src: &FinStructure,
    dst: &FinStructure,
    spec: &SearchSpec,
) -> Result<Option<Mapping>, Error> {
    let mut found = None;
    search(src, dst, spec, |values| {
        found = Some(Mapping::new(values.to_vec()));
        ControlFlow::Break(())
    })?;
    Ok(found)
}

pub(crate) fn collect_solutions(
    src: &FinStructure,
    dst: &FinStructure,
    spec: &SearchSpec,
    limit: Option<usize>,
) -> Result<Vec<Mapping>, Error> {
    let mut out = Vec::new();
    if limit == Some(0) {
        return Ok(out);
    }
    search(src, dst, spec, |values| {
        out.push(Mapping::new(values.to_vec()));
        if limit.is_some_and(|l| out.len() >= l) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(out)
}

/// An isomorphism from `a` to `b` in lexicographic order, if one exists.
///
/// A bijective embedding is an isomorphism, so after cheap size and tuple
/// count comparisons this is an embedding search.
pub fn find_isomorphism(a: &FinStructure, b: &FinStructure) -> Result<Option<Mapping>, Error> {
    if a.signature() != b.signature() {
        return Err(Error::SignatureMismatch(
            "isomorphism requires both structures over one signature".into(),
        ));
    }
    if a.domain_size() != b.domain_size() {
        return Ok(None);
    }
    for idx in 0..a.signature().len() {
        if a.tuples(idx).len() != b.tuples(idx).len() {
            return Ok(None);
        }
    }
    find_embedding(a, b)
}

/// All automorphisms of `s` in lexicographic order.
///
/// Exhaustive enumeration, so the domain is capped by
/// `caps.automorphism_domain`.
pub fn automorphisms(s: &FinStructure, caps: &Caps) -> Result<Vec<Mapping>, Error> {
    Caps::check(
        "automorphism enumeration domain",
        s.domain_size() as u128,
        caps.automorphism_domain,
    )?;
    enumerate_embeddings(s, s, None)
}

/// One orbit of `k`-tuples under the automorphism group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    /// Lexicographically least tuple of the orbit.
    pub representative: Vec<usize>,
    /// All tuples of the orbit in lexicographic order.
    pub tuples: Vec<Vec<usize>>,
}

/// The partition of all `k`-tuples over a structure's domain into orbits
/// under its automorphism group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPartition {
    arity: usize,
    domain_size: usize,
    orbits: Vec<Orbit>,
    orbit_by_rank: Vec<usize>,
}

impl OrbitPartition {
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Orbits ordered by their representatives.
    pub fn orbits(&self) -> &[Orbit] {
        &self.orbits
    }

    /// The orbit containing `tuple`.
    pub fn orbit_of(&self, tuple: &[usize]) -> Result<&Orbit, Error> {
        if tuple.len() != self.arity || tuple.iter().any(|&e| e >= self.domain_size) {
            return Err(Error::invalid(format!(
                "tuple {tuple:?} is not a {}-tuple over the domain",
                self.arity
            )));
        }
        let rank = tuple.iter().fold(0, |acc, &e| acc * self.domain_size + e);
        Ok(&self.orbits[self.orbit_by_rank[rank]])
    }
}

/// Partitions all `k`-tuples over the domain of `s` into orbits under the
/// automorphism group of `s`.
///
/// Requires `k >= 1`; the tuple space `n^k` is capped by `caps.tuple_space`
/// and the automorphism enumeration by `caps.automorphism_domain`.
pub fn orbits(s: &FinStructure, k: usize, caps: &Caps) -> Result<OrbitPartition, Error> {
    if k == 0 {
        return Err(Error::invalid("orbit arity must be positive"));
    }
    let n = s.domain_size();
    let space = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    Caps::check("orbit tuple space", space, caps.tuple_space)?;
    let auts = automorphisms(s, caps)?;

    let space = space as usize;
    let rank = |tuple: &[usize]| tuple.iter().fold(0, |acc, &e| acc * n + e);
    let mut orbit_by_rank = vec![usize::MAX; space];
    let mut orbits = Vec::new();

    let mut tuple = vec![0usize; k];
    let mut done = n == 0;
    while !done {
        let r = rank(&tuple);
        if orbit_by_rank[r] == usize::MAX {
            let index = orbits.len();
            let mut members: Vec<Vec<usize>> =
                auts.iter().map(|a| a.apply_tuple(&tuple)).collect();
            members.sort();
            members.dedup();
            for member in &members {
                orbit_by_rank[rank(member)] = index;
            }
            orbits.push(Orbit {
                representative: tuple.clone(),
                tuples: members,
            });
        }
        // Advance the odometer.
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

    Ok(OrbitPartition {
        arity: k,
        domain_size: n,
        orbits,
        orbit_by_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::Signature;

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

    /// Brute-force reference: all maps src -> dst that classify as
    /// homomorphisms. Independent of the search kernel.
    fn brute_homs(src: &FinStructure, dst: &FinStructure) -> Vec<Vec<usize>> {
        let n = src.domain_size();
        let d = dst.domain_size();
        let mut out = Vec::new();
        if n == 0 {
            out.push(Vec::new());
            return out;
        }
        if d == 0 {
            return out;
        }
        let mut values = vec![0usize; n];
        loop {
            let m = Mapping::new(values.clone());
            if classify(&m, src, dst).unwrap().is_homomorphism {
                out.push(values.clone());
            }
            let mut pos = n;
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                values[pos] += 1;
                if values[pos] < d {
                    break;
                }
                values[pos] = 0;
            }
        }
    }

    fn brute_automorphism_count(s: &FinStructure) -> usize {
        brute_homs(s, s)
            .into_iter()
            .filter(|values| {
                let m = Mapping::new(values.clone());
                classify(&m, s, s).unwrap().is_isomorphism
            })
            .count()
    }

    #[test]
    fn classify_fold_of_path_is_strong_but_not_injective() {
        let p3 = path(3);
        let k2 = complete(2);
        let fold = Mapping::new(vec![0, 1, 0]);
        let flags = classify(&fold, &p3, &k2).unwrap();
        assert!(flags.is_homomorphism);
        assert!(flags.is_strong);
        assert!(!flags.is_injective);
        assert!(!flags.is_embedding);
        assert!(!flags.is_isomorphism);
    }

    #[test]
    fn classify_inclusion_of_path_into_cycle() {
        let p3 = path(3);
        let c4 = cycle(4);
        let inclusion = Mapping::new(vec![0, 1, 2]);
        let flags = classify(&inclusion, &p3, &c4).unwrap();
        assert!(flags.is_homomorphism);
        assert!(flags.is_injective);
        assert!(flags.is_embedding);
        assert!(!flags.is_isomorphism);
        // The non-edge 0-2 maps to the non-edge 0-2 of the cycle, so the
        // inclusion is strong; adding the chord in the target breaks it.
        let chorded = FinStructure::graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let flags = classify(&inclusion, &p3, &chorded).unwrap();
        assert!(flags.is_homomorphism);
        assert!(!flags.is_strong);
    }

    #[test]
    fn classify_rejects_mismatched_shapes() {
        let p3 = path(3);
        let k2 = complete(2);
        assert!(classify(&Mapping::new(vec![0, 1]), &p3, &k2).is_err());
        assert!(classify(&Mapping::new(vec![0, 1, 5]), &p3, &k2).is_err());
        let unary = FinStructure::new(
            Signature::new([("C", 1)]).unwrap(),
            3,
            [("C", vec![vec![0]])],
        )
        .unwrap();
        assert!(classify(&Mapping::new(vec![0, 1, 0]), &p3, &unary).is_err());
    }

    #[test]
    fn first_homomorphism_is_lex_least() {
        let k3 = complete(3);
        assert_eq!(
            find_homomorphism(&k3, &k3).unwrap().unwrap().values(),
            &[0, 1, 2]
        );
        let c4 = cycle(4);
        let k2 = complete(2);
        assert_eq!(
            find_homomorphism(&c4, &k2).unwrap().unwrap().values(),
            &[0, 1, 0, 1]
        );
    }

    #[test]
    fn odd_cycle_has_no_map_into_edge() {
        let c5 = cycle(5);
        let k2 = complete(2);
        assert!(find_homomorphism(&c5, &k2).unwrap().is_none());
        let c4 = cycle(4);
        assert!(find_homomorphism(&c4, &k2).unwrap().is_some());
    }

    #[test]
    fn enumeration_matches_brute_force_on_small_graphs() {
        let cases = [
            (path(3), complete(2)),
            (cycle(4), complete(3)),
            (cycle(5), complete(2)),
            (complete(3), cycle(5)),
            (path(4), path(3)),
            (cycle(3), cycle(3)),
        ];
        for (src, dst) in &cases {
            let fast: Vec<Vec<usize>> = enumerate_homomorphisms(src, dst, None)
                .unwrap()
                .into_iter()
                .map(Mapping::into_values)
                .collect();
            let slow = brute_homs(src, dst);
            assert_eq!(fast, slow, "{} -> {}", src.canonical_key(), dst.canonical_key());
        }
    }

    #[test]
    fn enumeration_matches_brute_force_on_mixed_signature() {
        let sig = Signature::new([("E", 2), ("C", 1)]).unwrap();
        let src = FinStructure::new(
            sig.clone(),
            3,
            [
                ("E", vec![vec![0, 1], vec![1, 2]]),
                ("C", vec![vec![0]]),
            ],
        )
        .unwrap();
        let dst = FinStructure::new(
            sig,
            3,
            [
                ("E", vec![vec![0, 1], vec![1, 0], vec![1, 2], vec![2, 2]]),
                ("C", vec![vec![0], vec![2]]),
            ],
        )
        .unwrap();
        let fast: Vec<Vec<usize>> = enumerate_homomorphisms(&src, &dst, None)
            .unwrap()
            .into_iter()
            .map(Mapping::into_values)
            .collect();
        assert_eq!(fast, brute_homs(&src, &dst));
    }

    #[test]
    fn enumeration_matches_brute_force_with_ternary_relation() {
        let sig = Signature::new([("T", 3)]).unwrap();
        let src = FinStructure::new(sig.clone(), 3, [("T", vec![vec![0, 1, 2]])]).unwrap();
        let dst = FinStructure::new(
            sig,
            3,
            [("T", vec![vec![0, 1, 2], vec![1, 2, 0], vec![0, 0, 1]])],
        )
        .unwrap();
        let fast: Vec<Vec<usize>> = enumerate_homomorphisms(&src, &dst, None)
            .unwrap()
            .into_iter()
            .map(Mapping::into_values)
            .collect();
        assert_eq!(fast, brute_homs(&src, &dst));
    }

    #[test]
    fn empty_source_has_exactly_the_empty_map() {
        let empty = FinStructure::graph(0, &[]).unwrap();
        let k2 = complete(2);
        let homs = enumerate_homomorphisms(&empty, &k2, None).unwrap();
        assert_eq!(homs, vec![Mapping::new(Vec::new())]);
    }

    #[test]
    fn empty_target_admits_no_map_from_nonempty_source() {
        let empty = FinStructure::graph(0, &[]).unwrap();
        let p2 = path(2);
        assert!(find_homomorphism(&p2, &empty).unwrap().is_none());
    }

    #[test]
    fn limit_truncates_enumeration() {
        let k3 = complete(3);
        let all = enumerate_homomorphisms(&k3, &k3, None).unwrap();
        assert_eq!(all.len(), 6);
        let two = enumerate_homomorphisms(&k3, &k3, Some(2)).unwrap();
        assert_eq!(two.as_slice(), &all[..2]);
    }

    #[test]
    fn isomorphism_found_for_relabeled_cycle() {
        let c4 = cycle(4);
        let relabeled = FinStructure::graph(4, &[(2, 3), (3, 1), (1, 0), (0, 2)]).unwrap();
        let iso = find_isomorphism(&c4, &relabeled).unwrap().unwrap();
        assert!(classify(&iso, &c4, &relabeled).unwrap().is_isomorphism);
    }

    #[test]
    fn cycle_and_path_are_not_isomorphic() {
        assert!(find_isomorphism(&cycle(4), &path(4)).unwrap().is_none());
        // Same tuple counts, different shape: a triangle with an isolated
        // vertex versus a path with an extra edge at the end.
        let a = FinStructure::graph(4, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let b = FinStructure::graph(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(find_isomorphism(&a, &b).unwrap().is_none());
    }

    #[test]
    fn automorphism_counts_match_brute_force() {
        let caps = Caps::default();
        for s in [complete(3), path(3), cycle(4), cycle(5), path(4)] {
            let fast = automorphisms(&s, &caps).unwrap().len();
            assert_eq!(fast, brute_automorphism_count(&s), "{}", s.canonical_key());
        }
    }

    #[test]
    fn automorphism_counts_on_known_graphs() {
        let caps = Caps::default();
        assert_eq!(automorphisms(&complete(3), &caps).unwrap().len(), 6);
        assert_eq!(automorphisms(&path(3), &caps).unwrap().len(), 2);
        assert_eq!(automorphisms(&cycle(4), &caps).unwrap().len(), 8);
        let directed_triangle = FinStructure::digraph(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(automorphisms(&directed_triangle, &caps).unwrap().len(), 3);
    }

    #[test]
    fn automorphisms_form_a_group() {
        let caps = Caps::default();
        let c4 = cycle(4);
        let auts = automorphisms(&c4, &caps).unwrap();
        assert_eq!(auts[0], Mapping::identity(4));
        for a in &auts {
            for b in &auts {
                let composed = a.after(b);
                assert!(auts.contains(&composed));
            }
        }
    }

    #[test]
    fn automorphism_cap_is_enforced() {
        let caps = Caps {
            automorphism_domain: 3,
            ..Caps::default()
        };
        assert!(matches!(
            automorphisms(&cycle(4), &caps),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn orbits_of_path_elements() {
        let caps = Caps::default();
        let partition = orbits(&path(3), 1, &caps).unwrap();
        let reps: Vec<&[usize]> = partition
            .orbits()
            .iter()
            .map(|o| o.representative.as_slice())
            .collect();
        assert_eq!(reps, vec![&[0][..], &[1][..]]);
        assert_eq!(
            partition.orbit_of(&[2]).unwrap().tuples,
            vec![vec![0], vec![2]]
        );
    }

    #[test]
    fn orbits_of_cycle_pairs() {
        let caps = Caps::default();
        let partition = orbits(&cycle(4), 2, &caps).unwrap();
        // Diagonal pairs, adjacent pairs, antipodal pairs.
        assert_eq!(partition.orbits().len(), 3);
        let sizes: Vec<usize> = partition.orbits().iter().map(|o| o.tuples.len()).collect();
        assert_eq!(sizes, vec![4, 8, 4]);
        let total: usize = sizes.iter().sum();
        assert_eq!(total, 16);
    }

    #[test]
    fn orbit_arguments_are_validated() {
        let caps = Caps::default();
        assert!(orbits(&path(3), 0, &caps).is_err());
        let tight = Caps {
            tuple_space: 8,
            ..Caps::default()
        };
        assert!(matches!(
            orbits(&path(3), 2, &tight),
            Err(Error::Capacity { .. })
        ));
        let partition = orbits(&path(3), 1, &caps).unwrap();
        assert!(partition.orbit_of(&[9]).is_err());
        assert!(partition.orbit_of(&[0, 0]).is_err());
    }

    #[test]
    fn merged_search_forces_equal_values() {
        let p3 = path(3);
        let spec = SearchSpec {
            merged: vec![None, None, Some(0)],
            ..SearchSpec::homs()
        };
        let first = first_solution(&p3, &p3, &spec).unwrap().unwrap();
        assert_eq!(first.values(), &[0, 1, 0]);
        let all = collect_solutions(&p3, &p3, &spec, None).unwrap();
        for m in &all {
            assert_eq!(m.apply(0), m.apply(2));
            assert!(classify(m, &p3, &p3).unwrap().is_homomorphism);
        }
    }

    #[test]
    fn pinned_search_respects_pins() {
        let c4 = cycle(4);
        let k2 = complete(2);
        assert!(exists_hom_pinned(&c4, &k2, &[(0, 1)]).unwrap());
        assert!(exists_hom_pinned(&c4, &k2, &[(0, 1), (1, 1)]).unwrap() == false);
        assert!(exists_hom_pinned(&c4, &k2, &[(0, 1), (2, 1)]).unwrap());
    }

    #[test]
    fn descending_search_finds_lex_greatest() {
        let k3 = complete(3);
        let spec = SearchSpec {
            descending: true,
            ..SearchSpec::homs()
        };
        let greatest = first_solution(&k3, &k3, &spec).unwrap().unwrap();
        assert_eq!(greatest.values(), &[2, 1, 0]);
    }

    #[test]
    fn embeddings_of_edge_into_path() {
        let p3 = path(3);
        let k2 = complete(2);
        let embeddings = enumerate_embeddings(&k2, &p3, None).unwrap();
        let values: Vec<&[usize]> = embeddings.iter().map(|m| m.values()).collect();
        assert_eq!(values, vec![&[0, 1][..], &[1, 0], &[1, 2], &[2, 1]]);
    }

    #[test]
    fn non_edge_does_not_embed_into_complete_graph() {
        let two = FinStructure::graph(2, &[]).unwrap();
        let k3 = complete(3);
        assert!(find_embedding(&two, &k3).unwrap().is_none());
        assert_eq!(enumerate_homomorphisms(&two, &k3, None).unwrap().len(), 9);
    }
}
