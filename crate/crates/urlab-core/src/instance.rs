//! Ground data model: facts, instances, edges, homomorphisms, subinstance
//! enumeration, and edge copying.
//!
//! All relations are binary. A fact `R(a,b)` with `a == b` is called unary;
//! the surface form `R(a)` in the text format is stored as `R(a,a)`.
//! Instances are immutable fact sets with set semantics; the domain is
//! derived from the facts.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::MAX_SUBSET_CAP;

/// A relation symbol. All relations are binary after unary encoding.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Relation(String);

impl Relation {
    pub fn new(name: impl Into<String>) -> Self {
        Relation(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A domain element identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(String);

impl Elem {
    pub fn new(name: impl Into<String>) -> Self {
        Elem(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Base name for fresh-element generation: the part before the first `#`.
    fn base(&self) -> &str {
        match self.0.find('#') {
            Some(i) => &self.0[..i],
            None => &self.0,
        }
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A ground atom `R(a, b)`.
///
/// Facts are value-comparable and ordered canonically by
/// (relation, subject, object), so fact sets have a stable iteration order
/// and the subset-index ↔ fact-set bijection is reproducible across runs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fact {
    pub rel: Relation,
    pub subject: Elem,
    pub object: Elem,
}

impl Fact {
    pub fn new(rel: impl Into<String>, subject: impl Into<String>, object: impl Into<String>) -> Self {
        Fact {
            rel: Relation::new(rel),
            subject: Elem::new(subject),
            object: Elem::new(object),
        }
    }

    /// A fact `R(a,b)` is unary iff `a = b`.
    pub fn is_unary(&self) -> bool {
        self.subject == self.object
    }

    /// True iff the fact mentions `e` as subject or object.
    pub fn uses(&self, e: &Elem) -> bool {
        self.subject == *e || self.object == *e
    }

    /// Rename elements through `map`; identifiers absent from the map stay.
    pub fn renamed(&self, map: &BTreeMap<Elem, Elem>) -> Fact {
        let get = |e: &Elem| map.get(e).cloned().unwrap_or_else(|| e.clone());
        Fact {
            rel: self.rel.clone(),
            subject: get(&self.subject),
            object: get(&self.object),
        }
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{})", self.rel, self.subject, self.object)
    }
}

/// Convenience constructor used pervasively in tests and fixtures.
pub fn fact(rel: &str, subject: &str, object: &str) -> Fact {
    Fact::new(rel, subject, object)
}

/// An ordered pair `(u, v)` of distinct elements. `(u,v)` is an edge of an
/// instance iff some fact uses both `u` and `v`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub left: Elem,
    pub right: Elem,
}

impl Edge {
    pub fn new(left: impl Into<String>, right: impl Into<String>) -> Result<Edge> {
        let (left, right) = (Elem::new(left), Elem::new(right));
        if left == right {
            return Err(Error::invalid(format!("edge endpoints must be distinct, got ({left},{right})")));
        }
        Ok(Edge { left, right })
    }

    /// The same unordered edge with the opposite orientation.
    pub fn reversed(&self) -> Edge {
        Edge { left: self.right.clone(), right: self.left.clone() }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.left, self.right)
    }
}

/// A homomorphism witness: a total map on the source domain such that every
/// source fact's image is a target fact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homomorphism(pub BTreeMap<Elem, Elem>);

impl Homomorphism {
    pub fn apply(&self, e: &Elem) -> Option<&Elem> {
        self.0.get(e)
    }

    /// Checks the defining property against concrete instances.
    pub fn is_valid(&self, src: &Instance, dst: &Instance) -> bool {
        src.facts().all(|f| {
            match (self.0.get(&f.subject), self.0.get(&f.object)) {
                (Some(a), Some(b)) => dst.contains(&Fact {
                    rel: f.rel.clone(),
                    subject: a.clone(),
                    object: b.clone(),
                }),
                _ => false,
            }
        })
    }
}

/// A finite set of facts with derived domain.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Instance {
    facts: BTreeSet<Fact>,
}

impl Instance {
    pub fn new(facts: impl IntoIterator<Item = Fact>) -> Instance {
        Instance { facts: facts.into_iter().collect() }
    }

    pub fn empty() -> Instance {
        Instance::default()
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn contains(&self, f: &Fact) -> bool {
        self.facts.contains(f)
    }

    /// Facts in canonical order.
    pub fn facts(&self) -> impl Iterator<Item = &Fact> {
        self.facts.iter()
    }

    pub fn fact_vec(&self) -> Vec<Fact> {
        self.facts.iter().cloned().collect()
    }

    /// The set of elements occurring in facts.
    pub fn dom(&self) -> BTreeSet<Elem> {
        let mut d = BTreeSet::new();
        for f in &self.facts {
            d.insert(f.subject.clone());
            d.insert(f.object.clone());
        }
        d
    }

    /// Relation symbols occurring in facts.
    pub fn relations(&self) -> BTreeSet<Relation> {
        self.facts.iter().map(|f| f.rel.clone()).collect()
    }

    pub fn with(&self, f: Fact) -> Instance {
        let mut facts = self.facts.clone();
        facts.insert(f);
        Instance { facts }
    }

    pub fn without(&self, f: &Fact) -> Instance {
        let mut facts = self.facts.clone();
        facts.remove(f);
        Instance { facts }
    }

    pub fn union(&self, other: &Instance) -> Instance {
        let mut facts = self.facts.clone();
        facts.extend(other.facts.iter().cloned());
        Instance { facts }
    }

    pub fn is_subinstance_of(&self, other: &Instance) -> bool {
        self.facts.is_subset(&other.facts)
    }

    /// Apply an element renaming to every fact.
    pub fn renamed(&self, map: &BTreeMap<Elem, Elem>) -> Instance {
        Instance::new(self.facts.iter().map(|f| f.renamed(map)))
    }

    /// Parses the fact-list text format: one fact per line, `R(a,b)` or the
    /// unary surface form `U(a)` (stored as `U(a,a)`). Blank lines are
    /// skipped; duplicate facts are silently deduplicated.
    pub fn parse(text: &str) -> Result<Instance> {
        let mut facts = BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            facts.insert(parse_fact_line(line, line_no)?);
        }
        Ok(Instance { facts })
    }

    /// Canonical text form: facts sorted, one per line, unary facts printed
    /// with both positions. Parsing this output reproduces the instance
    /// byte-for-byte on re-serialization.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for f in &self.facts {
            out.push_str(&format!("{f}\n"));
        }
        out
    }

    /// Generates a fresh element `base#k` with `k` the smallest counter not
    /// already used in this instance's domain (nor in `reserved`). `base` is
    /// the element's name up to its first `#`, so repeated dissociation of
    /// `a` yields `a#1`, `a#2`, ...
    pub fn fresh_element(&self, from: &Elem, reserved: &mut BTreeSet<Elem>) -> Elem {
        let dom = self.dom();
        let base = from.base();
        for k in 1usize.. {
            let cand = Elem::new(format!("{base}#{k}"));
            if !dom.contains(&cand) && !reserved.contains(&cand) {
                reserved.insert(cand.clone());
                return cand;
            }
        }
        unreachable!()
    }

    /// All edges of the instance, one entry per unordered pair, in canonical
    /// orientation (left < right). Use [`EdgeInfo::oriented`] for the other
    /// orientation; both orientations have the same covering facts.
    pub fn edges(&self) -> Vec<EdgeInfo> {
        let mut by_pair: BTreeMap<(Elem, Elem), BTreeSet<Fact>> = BTreeMap::new();
        for f in &self.facts {
            if f.is_unary() {
                continue;
            }
            let key = if f.subject < f.object {
                (f.subject.clone(), f.object.clone())
            } else {
                (f.object.clone(), f.subject.clone())
            };
            by_pair.entry(key).or_default().insert(f.clone());
        }
        by_pair
            .into_iter()
            .map(|((a, b), covering)| {
                let edge = Edge { left: a.clone(), right: b.clone() };
                let left_incident = self.incident_side(&a, &b);
                let right_incident = self.incident_side(&b, &a);
                EdgeInfo {
                    non_leaf: !left_incident.is_empty() && !right_incident.is_empty(),
                    edge,
                    covering,
                }
            })
            .collect()
    }

    /// Facts using `of` but not `other` (includes unary facts on `of`).
    pub fn incident_side(&self, of: &Elem, other: &Elem) -> BTreeSet<Fact> {
        self.facts
            .iter()
            .filter(|f| f.uses(of) && !f.uses(other))
            .cloned()
            .collect()
    }

    /// The covering facts of the pair `(u,v)`: facts using both endpoints.
    /// Empty iff the pair is a non-edge.
    pub fn covering(&self, u: &Elem, v: &Elem) -> BTreeSet<Fact> {
        self.facts
            .iter()
            .filter(|f| f.uses(u) && f.uses(v))
            .cloned()
            .collect()
    }

    pub fn is_edge(&self, u: &Elem, v: &Elem) -> bool {
        u != v && !self.covering(u, v).is_empty()
    }

    /// Copies the edge `e` onto the ordered `target` pair: for each covering
    /// fact, adds the fact with `e.left` renamed to `target.0` and `e.right`
    /// to `target.1`. Incident facts are not copied.
    pub fn copy_edge(&self, e: &Edge, target: (&Elem, &Elem)) -> Result<Instance> {
        if target.0 == target.1 {
            return Err(Error::invalid(format!(
                "copy target pair must be distinct, got ({},{})",
                target.0, target.1
            )));
        }
        let covering = self.covering(&e.left, &e.right);
        if covering.is_empty() {
            return Err(Error::invalid(format!("{e} is not an edge")));
        }
        let mut map = BTreeMap::new();
        map.insert(e.left.clone(), target.0.clone());
        map.insert(e.right.clone(), target.1.clone());
        let mut facts = self.facts.clone();
        facts.extend(covering.iter().map(|f| f.renamed(&map)));
        Ok(Instance { facts })
    }

    /// Deterministic enumerator of all `2^|I|` subsets of facts, in index
    /// order over the canonical fact ordering. Supports disjoint index-range
    /// partitioning for parallel consumers.
    pub fn subinstances(&self, cap: usize) -> Result<Subinstances> {
        let cap = cap.min(MAX_SUBSET_CAP);
        if self.facts.len() > cap {
            return Err(Error::CapExceeded { needed: self.facts.len(), cap });
        }
        Ok(Subinstances { facts: self.fact_vec() })
    }

    /// Backtracking homomorphism search from `self` into `dst`.
    ///
    /// Source elements are assigned in descending-degree order; candidates
    /// are pruned through a per-relation adjacency index. Deterministic for
    /// a fixed instance pair. Worst case is exponential.
    pub fn find_homomorphism(&self, dst: &Instance) -> Option<Homomorphism> {
        let src_dom: Vec<Elem> = {
            let mut d: Vec<Elem> = self.dom().into_iter().collect();
            let degree = |e: &Elem| self.facts.iter().filter(|f| f.uses(e)).count();
            d.sort_by(|a, b| degree(b).cmp(&degree(a)).then(a.cmp(b)));
            d
        };
        if src_dom.is_empty() {
            // No elements to map; valid iff we have no facts (always true here).
            return Some(Homomorphism(BTreeMap::new()));
        }
        let dst_dom: Vec<Elem> = dst.dom().into_iter().collect();
        if dst_dom.is_empty() {
            return None;
        }
        let src_facts = self.fact_vec();
        let mut assign: BTreeMap<Elem, Elem> = BTreeMap::new();
        if assign_next(&src_dom, 0, &src_facts, dst, &dst_dom, &mut assign) {
            Some(Homomorphism(assign))
        } else {
            None
        }
    }
}

fn assign_next(
    order: &[Elem],
    depth: usize,
    src_facts: &[Fact],
    dst: &Instance,
    dst_dom: &[Elem],
    assign: &mut BTreeMap<Elem, Elem>,
) -> bool {
    if depth == order.len() {
        return true;
    }
    let elem = &order[depth];
    for cand in dst_dom {
        assign.insert(elem.clone(), cand.clone());
        // Check every source fact whose endpoints are all assigned and that
        // mentions `elem`; earlier facts were checked at earlier depths.
        let ok = src_facts.iter().filter(|f| f.uses(elem)).all(|f| {
            match (assign.get(&f.subject), assign.get(&f.object)) {
                (Some(a), Some(b)) => dst.contains(&Fact {
                    rel: f.rel.clone(),
                    subject: a.clone(),
                    object: b.clone(),
                }),
                _ => true, // not yet fully assigned
            }
        });
        if ok && assign_next(order, depth + 1, src_facts, dst, dst_dom, assign) {
            return true;
        }
        assign.remove(elem);
    }
    false
}

/// One edge of an instance: canonical orientation, covering facts, and
/// whether the edge is non-leaf (incident facts on both sides).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeInfo {
    pub edge: Edge,
    pub covering: BTreeSet<Fact>,
    pub non_leaf: bool,
}

impl EdgeInfo {
    /// The same information under the opposite orientation.
    pub fn oriented(&self, left_first: bool) -> Edge {
        if left_first {
            self.edge.clone()
        } else {
            self.edge.reversed()
        }
    }
}

/// Deterministic subset enumerator; see [`Instance::subinstances`].
#[derive(Debug)]
pub struct Subinstances {
    facts: Vec<Fact>,
}

impl Subinstances {
    /// Number of subsets, `2^|I|`.
    pub fn count(&self) -> u64 {
        1u64 << self.facts.len()
    }

    pub fn fact_count(&self) -> usize {
        self.facts.len()
    }

    /// The subset at `index` (bit `i` selects the `i`-th canonical fact).
    pub fn get(&self, index: u64) -> Instance {
        Instance::new(
            self.facts
                .iter()
                .enumerate()
                .filter(|(i, _)| index >> i & 1 == 1)
                .map(|(_, f)| f.clone()),
        )
    }

    /// Iterate a half-open index range; ranges partition the subset space.
    pub fn iter_range(&self, lo: u64, hi: u64) -> impl Iterator<Item = (u64, Instance)> + '_ {
        let hi = hi.min(self.count());
        (lo..hi).map(move |i| (i, self.get(i)))
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, Instance)> + '_ {
        self.iter_range(0, self.count())
    }
}

/// Renames every relation used only in unary facts to a primed twin
/// (`U` becomes `U'`), reserving the primed name for unary use.
///
/// Relations used both unary and binary are rejected: the convention assumes
/// unary relations are distinct. A pre-existing relation equal to a primed
/// twin is a name collision and also rejected.
pub fn encode_unary(inst: &Instance) -> Result<Instance> {
    let mut unary_rels = BTreeSet::new();
    let mut binary_rels = BTreeSet::new();
    for f in inst.facts() {
        if f.is_unary() {
            unary_rels.insert(f.rel.clone());
        } else {
            binary_rels.insert(f.rel.clone());
        }
    }
    if let Some(mixed) = unary_rels.intersection(&binary_rels).next() {
        return Err(Error::invalid(format!(
            "relation {mixed} is used in both unary and binary facts; unary relations must be distinct"
        )));
    }
    let all_rels: BTreeSet<_> = unary_rels.union(&binary_rels).cloned().collect();
    let mut renames: BTreeMap<Relation, Relation> = BTreeMap::new();
    for r in &unary_rels {
        let primed = Relation::new(format!("{r}'"));
        if all_rels.contains(&primed) {
            return Err(Error::invalid(format!(
                "cannot encode unary relation {r}: primed twin {primed} already exists"
            )));
        }
        renames.insert(r.clone(), primed);
    }
    Ok(Instance::new(inst.facts().map(|f| Fact {
        rel: renames.get(&f.rel).cloned().unwrap_or_else(|| f.rel.clone()),
        subject: f.subject.clone(),
        object: f.object.clone(),
    })))
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '#' | '@' | '~' | '\'')
}

pub(crate) fn scan_ident(s: &str, start: usize) -> Option<usize> {
    let mut chars = s[start..].char_indices();
    match chars.next() {
        Some((_, c)) if is_ident_start(c) => {}
        _ => return None,
    }
    let mut end = start + 1;
    for (i, c) in chars {
        if is_ident_char(c) {
            end = start + i + c.len_utf8();
        } else {
            break;
        }
    }
    Some(end)
}

fn parse_fact_line(line: &str, line_no: usize) -> Result<Fact> {
    let err = |pos: usize, msg: &str| Error::Syntax {
        line: line_no,
        pos,
        msg: msg.to_owned(),
    };
    let rel_end = scan_ident(line, 0).ok_or_else(|| err(0, "expected relation name"))?;
    let rel = &line[..rel_end];
    let rest = &line[rel_end..];
    if !rest.starts_with('(') {
        return Err(err(rel_end, "expected '(' after relation name"));
    }
    let inner_start = rel_end + 1;
    let a_end = scan_ident(line, inner_start).ok_or_else(|| err(inner_start, "expected element identifier"))?;
    let a = &line[inner_start..a_end];
    match line[a_end..].chars().next() {
        Some(')') => {
            if a_end + 1 != line.len() {
                return Err(err(a_end + 1, "trailing characters after fact"));
            }
            Ok(Fact::new(rel, a, a))
        }
        Some(',') => {
            let b_start = a_end + 1;
            let b_end = scan_ident(line, b_start).ok_or_else(|| err(b_start, "expected element identifier"))?;
            let b = &line[b_start..b_end];
            if !line[b_end..].starts_with(')') {
                return Err(err(b_end, "expected ')'"));
            }
            if b_end + 1 != line.len() {
                return Err(err(b_end + 1, "trailing characters after fact"));
            }
            Ok(Fact::new(rel, a, b))
        }
        _ => Err(err(a_end, "expected ',' or ')'")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(text: &str) -> Instance {
        Instance::parse(text).unwrap()
    }

    #[test]
    fn parse_basic() {
        let i = inst("R(a)\nS(a,b)\nT(b)");
        assert_eq!(i.len(), 3);
        let dom: Vec<_> = i.dom().into_iter().map(|e| e.as_str().to_owned()).collect();
        assert_eq!(dom, ["a", "b"]);
        assert!(i.contains(&fact("R", "a", "a")));
    }

    #[test]
    fn parse_dedups() {
        assert_eq!(inst("S(a,b)\nS(a,b)").len(), 1);
    }

    #[test]
    fn parse_reports_line() {
        let e = Instance::parse("S(a,)").unwrap_err();
        match e {
            Error::Syntax { line, .. } => assert_eq!(line, 1),
            other => panic!("expected syntax error, got {other}"),
        }
    }

    #[test]
    fn text_roundtrip_is_byte_stable() {
        let i = inst("T(b)\nS(a,b)\nR(a)\n\nS(a,b)");
        let once = i.to_text();
        let again = Instance::parse(&once).unwrap().to_text();
        assert_eq!(once, again);
        assert_eq!(once, "R(a,a)\nS(a,b)\nT(b,b)\n");
    }

    #[test]
    fn encode_unary_primes_unary_only_relations() {
        let i = inst("U(a)");
        let enc = encode_unary(&i).unwrap();
        assert_eq!(enc, Instance::new([fact("U'", "a", "a")]));
    }

    #[test]
    fn encode_unary_keeps_binary() {
        let i = inst("S(a,b)");
        assert_eq!(encode_unary(&i).unwrap(), i);
    }

    #[test]
    fn encode_unary_rejects_mixed_use() {
        let i = inst("U(a)\nU(a,b)");
        assert!(encode_unary(&i).is_err());
    }

    #[test]
    fn encode_unary_rejects_prime_collision() {
        let i = inst("U(a)\nU'(b,c)");
        assert!(encode_unary(&i).is_err());
    }

    #[test]
    fn hom_single_fact() {
        let src = inst("S(x,y)");
        let dst = inst("S(a,b)");
        let h = src.find_homomorphism(&dst).unwrap();
        assert!(h.is_valid(&src, &dst));
        assert_eq!(h.apply(&Elem::new("x")).unwrap().as_str(), "a");
        assert_eq!(h.apply(&Elem::new("y")).unwrap().as_str(), "b");
    }

    #[test]
    fn hom_two_cycle_has_no_map_into_single_fact() {
        let src = inst("S(x,y)\nS(y,x)");
        let dst = inst("S(a,b)");
        // Independent oracle: try all 4 mappings {x,y} -> {a,b} by hand.
        for (x, y) in [("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")] {
            let mut m = BTreeMap::new();
            m.insert(Elem::new("x"), Elem::new(x));
            m.insert(Elem::new("y"), Elem::new(y));
            assert!(!Homomorphism(m).is_valid(&src, &dst));
        }
        assert!(src.find_homomorphism(&dst).is_none());
    }

    #[test]
    fn hom_identity_always_succeeds() {
        let i = inst("R(a)\nS(a,b)\nT(b)\nS(b,c)");
        let h = i.find_homomorphism(&i).unwrap();
        assert!(h.is_valid(&i, &i));
    }

    #[test]
    fn edges_weight_three_example() {
        let i = inst("R(b)\nT(b,c)\nS(b,a)\nS'(b,a)\nU(a,b)");
        let edges = i.edges();
        let ab = edges
            .iter()
            .find(|e| e.edge.left.as_str() == "a" && e.edge.right.as_str() == "b")
            .unwrap();
        assert_eq!(ab.covering.len(), 3);
    }

    #[test]
    fn edges_single_fact_is_leaf() {
        let i = inst("S(a,b)");
        let edges = i.edges();
        assert_eq!(edges.len(), 1);
        assert!(!edges[0].non_leaf);
    }

    #[test]
    fn edges_unary_incidents_make_non_leaf() {
        let i = inst("R(a,a)\nS(a,b)\nT(b,b)");
        let edges = i.edges();
        assert_eq!(edges.len(), 1);
        assert!(edges[0].non_leaf);
    }

    #[test]
    fn copy_edge_example() {
        // Copying (a,b) on (a,b') adds S(a,b') and S'(b',a).
        let i = inst("R(a)\nS(a,b)\nS'(b,a)\nT(b)");
        let e = Edge::new("a", "b").unwrap();
        let bp = Elem::new("b'");
        let out = i.copy_edge(&e, (&Elem::new("a"), &bp)).unwrap();
        assert!(out.contains(&fact("S", "a", "b'")));
        assert!(out.contains(&fact("S'", "b'", "a")));
        assert_eq!(out.len(), i.len() + 2);
    }

    #[test]
    fn copy_edge_fresh_pair_maps_back() {
        let i = inst("R(a)\nS(a,b)\nS'(b,a)\nT(b)");
        let e = Edge::new("a", "b").unwrap();
        let out = i
            .copy_edge(&e, (&Elem::new("a'"), &Elem::new("b'")))
            .unwrap();
        assert!(out.find_homomorphism(&i).is_some());
    }

    #[test]
    fn copy_edge_rejects_equal_target() {
        let i = inst("S(a,b)");
        let e = Edge::new("a", "b").unwrap();
        assert!(i.copy_edge(&e, (&Elem::new("a"), &Elem::new("a"))).is_err());
    }

    #[test]
    fn subinstances_counts() {
        let i = inst("R(a)\nS(a,b)\nT(b)");
        let s = i.subinstances(24).unwrap();
        assert_eq!(s.count(), 8);
        let all: Vec<_> = s.iter().map(|(_, sub)| sub).collect();
        assert_eq!(all.len(), 8);
        let mut union = Instance::empty();
        for sub in &all {
            union = union.union(sub);
        }
        assert_eq!(union, i);
    }

    #[test]
    fn subinstances_empty_instance() {
        let s = Instance::empty().subinstances(24).unwrap();
        assert_eq!(s.count(), 1);
        assert!(s.get(0).is_empty());
    }

    #[test]
    fn subinstances_cap() {
        let facts: Vec<Fact> = (0..25).map(|k| Fact::new("S", format!("a{k}"), format!("b{k}"))).collect();
        let i = Instance::new(facts);
        match i.subinstances(24) {
            Err(Error::CapExceeded { needed: 25, cap: 24 }) => {}
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn subinstances_range_partitioning() {
        let i = inst("R(a)\nS(a,b)\nT(b)");
        let s = i.subinstances(24).unwrap();
        let whole: Vec<_> = s.iter().map(|(i, _)| i).collect();
        let mut split: Vec<_> = s.iter_range(0, 3).map(|(i, _)| i).collect();
        split.extend(s.iter_range(3, 8).map(|(i, _)| i));
        assert_eq!(whole, split);
    }

    #[test]
    fn fresh_elements_count_up() {
        let i = inst("S(a,b)\nS(a#1,b)");
        let mut reserved = BTreeSet::new();
        let f1 = i.fresh_element(&Elem::new("a"), &mut reserved);
        assert_eq!(f1.as_str(), "a#2");
        let f2 = i.fresh_element(&Elem::new("a#1"), &mut reserved);
        assert_eq!(f2.as_str(), "a#3");
    }
}
