//! Edge structure analysis: weights, garbage/copy/extra classification,
//! dissociation, tight edges, cleanification, and critical-model search.
//!
//! For an edge `e = (u,v)` with covering facts `C`, the incident facts on
//! each side partition into garbage facts (covering sets of neighboring
//! edges isomorphic to a strict subset of `C` under the endpoint renaming),
//! copy facts (covering sets isomorphic to `C` on a non-triangle neighbor),
//! and extra facts (everything else: unary facts, triangle neighbors, and
//! non-isomorphic covering sets). The weight counts `C`; the extra weight
//! counts extra facts; the lexicographic weight is the ordered pair of
//! left and right copy-element counts.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::instance::{Edge, Elem, Fact, Instance, Relation};
use crate::query::{Matcher, Nfa, Query, QueryKind, Var};

/// Full classification of one oriented edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeAnalysis {
    pub edge: Edge,
    pub covering: BTreeSet<Fact>,
    pub garbage_left: BTreeSet<Fact>,
    pub garbage_right: BTreeSet<Fact>,
    /// Left copy elements with their copy facts.
    pub copies_left: BTreeMap<Elem, BTreeSet<Fact>>,
    pub copies_right: BTreeMap<Elem, BTreeSet<Fact>>,
    pub extras_left: BTreeSet<Fact>,
    pub extras_right: BTreeSet<Fact>,
    /// Elements forming a triangle with the edge.
    pub triangles: BTreeSet<Elem>,
    pub non_leaf: bool,
}

impl EdgeAnalysis {
    /// Number of covering facts; always at least 1.
    pub fn weight(&self) -> usize {
        self.covering.len()
    }

    /// Number of extra facts, both sides.
    pub fn extra_weight(&self) -> usize {
        self.extras_left.len() + self.extras_right.len()
    }

    /// `(tau, omega)`: left and right copy-element counts, compared
    /// lexicographically.
    pub fn lex_weight(&self) -> (usize, usize) {
        (self.copies_left.len(), self.copies_right.len())
    }

    pub fn is_clean(&self) -> bool {
        self.garbage_left.is_empty() && self.garbage_right.is_empty()
    }

    pub fn copy_facts_left(&self) -> BTreeSet<Fact> {
        self.copies_left.values().flatten().cloned().collect()
    }

    pub fn copy_facts_right(&self) -> BTreeSet<Fact> {
        self.copies_right.values().flatten().cloned().collect()
    }

    pub fn incident_left(&self) -> BTreeSet<Fact> {
        let mut s = self.garbage_left.clone();
        s.extend(self.copy_facts_left());
        s.extend(self.extras_left.iter().cloned());
        s
    }

    pub fn incident_right(&self) -> BTreeSet<Fact> {
        let mut s = self.garbage_right.clone();
        s.extend(self.copy_facts_right());
        s.extend(self.extras_right.iter().cloned());
        s
    }

    /// The weight/extra/lex tuple used by the critical-model search, in
    /// minimization order.
    pub fn weight_tuple(&self) -> (usize, usize, (usize, usize)) {
        (self.weight(), self.extra_weight(), self.lex_weight())
    }
}

fn rename_one(facts: &BTreeSet<Fact>, from: &Elem, to: &Elem) -> BTreeSet<Fact> {
    let mut map = BTreeMap::new();
    map.insert(from.clone(), to.clone());
    facts.iter().map(|f| f.renamed(&map)).collect()
}

/// Classifies the incident facts of `e` in `inst`; errors on non-edges.
pub fn analyze_edge(inst: &Instance, e: &Edge) -> Result<EdgeAnalysis> {
    let (u, v) = (&e.left, &e.right);
    let covering = inst.covering(u, v);
    if covering.is_empty() {
        return Err(Error::invalid(format!("{e} is not an edge")));
    }
    let left_incident = inst.incident_side(u, v);
    let right_incident = inst.incident_side(v, u);
    let non_leaf = !left_incident.is_empty() && !right_incident.is_empty();

    // Triangle elements: neighbors of both endpoints.
    let mut triangles = BTreeSet::new();
    for w in inst.dom() {
        if w != *u && w != *v && inst.is_edge(u, &w) && inst.is_edge(v, &w) {
            triangles.insert(w);
        }
    }

    let mut analysis = EdgeAnalysis {
        edge: e.clone(),
        covering: covering.clone(),
        garbage_left: BTreeSet::new(),
        garbage_right: BTreeSet::new(),
        copies_left: BTreeMap::new(),
        copies_right: BTreeMap::new(),
        extras_left: BTreeSet::new(),
        extras_right: BTreeSet::new(),
        triangles: triangles.clone(),
        non_leaf,
    };

    for (side_facts, own, other, left) in
        [(left_incident, u, v, true), (right_incident, v, u, false)]
    {
        // Group binary incident facts by their non-endpoint element.
        let mut groups: BTreeMap<Elem, BTreeSet<Fact>> = BTreeMap::new();
        let mut unary: BTreeSet<Fact> = BTreeSet::new();
        for f in side_facts {
            if f.is_unary() {
                unary.insert(f);
            } else {
                let x = if f.subject == *own { f.object.clone() } else { f.subject.clone() };
                groups.entry(x).or_default().insert(f);
            }
        }
        let (garbage, copies, extras) = if left {
            (&mut analysis.garbage_left, &mut analysis.copies_left, &mut analysis.extras_left)
        } else {
            (&mut analysis.garbage_right, &mut analysis.copies_right, &mut analysis.extras_right)
        };
        extras.extend(unary);
        for (x, cx) in groups {
            // Renaming x to the opposite endpoint carries the neighboring
            // edge's covering facts onto (u,v); garbage iff that lands on a
            // strict subset of C, copy iff exactly C without a triangle.
            let renamed = rename_one(&cx, &x, other);
            if renamed.is_subset(&covering) && renamed != covering {
                garbage.extend(cx);
            } else if renamed == covering && !triangles.contains(&x) {
                copies.insert(x, cx);
            } else {
                extras.extend(cx);
            }
        }
    }
    Ok(analysis)
}

/// Dissociation of the ordered pair `(u,v)` in `inst`.
///
/// Non-leaf edge: add fresh `u'` and `v'`, copy the edge to `(u',v)` and
/// `(u,v')`, then remove the covering facts. Leaf edge: rename the leaf
/// elements to fresh constants (an isomorphic instance). Non-edge: the
/// instance unchanged. In every case the pair is no longer an edge of the
/// result.
pub fn dissociate(inst: &Instance, u: &Elem, v: &Elem) -> Result<Instance> {
    if u == v {
        return Err(Error::invalid(format!("cannot dissociate equal elements ({u},{u})")));
    }
    let dom = inst.dom();
    if !dom.contains(u) || !dom.contains(v) {
        return Err(Error::invalid(format!("({u},{v}): both elements must be in the domain")));
    }
    let covering = inst.covering(u, v);
    if covering.is_empty() {
        return Ok(inst.clone());
    }
    let left_incident = inst.incident_side(u, v);
    let right_incident = inst.incident_side(v, u);
    let mut reserved = BTreeSet::new();
    match (left_incident.is_empty(), right_incident.is_empty()) {
        (false, false) => {
            let u2 = inst.fresh_element(u, &mut reserved);
            let v2 = inst.fresh_element(v, &mut reserved);
            let mut facts: BTreeSet<Fact> = inst.facts().cloned().collect();
            for f in &covering {
                facts.remove(f);
            }
            facts.extend(rename_one(&covering, u, &u2));
            facts.extend(rename_one(&covering, v, &v2));
            Ok(Instance::new(facts))
        }
        (left_leaf, right_leaf) => {
            let mut map = BTreeMap::new();
            if left_leaf {
                map.insert(u.clone(), inst.fresh_element(u, &mut reserved));
            }
            if right_leaf {
                map.insert(v.clone(), inst.fresh_element(v, &mut reserved));
            }
            Ok(inst.renamed(&map))
        }
    }
}

/// Tightness of a non-leaf edge: the instance satisfies the query but the
/// dissociation of the edge does not.
///
/// Errors when the instance violates the query, or when the pair is a leaf
/// edge or non-edge (those dissociations never break the query).
pub fn is_tight(q: &Query, inst: &Instance, e: &Edge) -> Result<bool> {
    if !q.evaluate(inst) {
        return Err(Error::invalid("tightness is only defined on models of the query"));
    }
    let analysis = analyze_edge(inst, e)?;
    if !analysis.non_leaf {
        return Err(Error::invalid(format!("{e} is a leaf edge; leaf edges are never tight")));
    }
    tightness_unchecked(q, inst, e)
}

fn tightness_unchecked(q: &Query, inst: &Instance, e: &Edge) -> Result<bool> {
    let dissociated = dissociate(inst, &e.left, &e.right)?;
    Ok(!q.evaluate(&dissociated))
}

/// True iff removing any single fact of the model breaks the query. By
/// monotonicity this certifies subinstance-minimality.
pub fn check_subinstance_minimal(q: &Query, inst: &Instance, cap: usize) -> Result<bool> {
    if inst.len() > cap.min(crate::MAX_SUBSET_CAP) {
        return Err(Error::CapExceeded { needed: inst.len(), cap });
    }
    if !q.evaluate(inst) {
        return Err(Error::invalid("minimality is only defined on models of the query"));
    }
    let matcher = Matcher::compile(q, inst);
    let n = inst.len() as u32;
    let full = (1u64 << n) - 1;
    Ok((0..n).all(|b| !matcher.eval_mask(full & !(1 << b))))
}

/// Rewrites the model so that `e` is clean while staying tight with the
/// same weight: each garbage-bearing incident edge is dissociated and its
/// dangling copy on the endpoint merged back onto `e`. The net effect moves
/// every garbage group onto a fresh endpoint away from the edge.
///
/// Errors when a step breaks the query or the post-conditions fail; in the
/// critical-search context the steps always succeed because garbage edges
/// have weight strictly below the edge's weight.
pub fn cleanify(q: &Query, inst: &Instance, e: &Edge) -> Result<(Instance, Edge)> {
    if !is_tight(q, inst, e)? {
        return Err(Error::invalid(format!("cleanify requires a tight edge, {e} is not tight")));
    }
    let before = analyze_edge(inst, e)?;
    if before.is_clean() {
        return Ok((inst.clone(), e.clone()));
    }
    let (u, v) = (&e.left, &e.right);
    let mut work = inst.clone();
    let mut reserved = BTreeSet::new();

    let garbage_partners = |facts: &BTreeSet<Fact>, own: &Elem| -> Vec<Elem> {
        let mut xs: BTreeSet<Elem> = BTreeSet::new();
        for f in facts {
            let x = if f.subject == *own { f.object.clone() } else { f.subject.clone() };
            xs.insert(x);
        }
        xs.into_iter().collect()
    };

    for x in garbage_partners(&before.garbage_left, u) {
        let group = work.covering(u, &x);
        let fresh = work.fresh_element(u, &mut reserved);
        let mut facts: BTreeSet<Fact> = work.facts().cloned().collect();
        for f in &group {
            facts.remove(f);
        }
        facts.extend(rename_one(&group, u, &fresh));
        work = Instance::new(facts);
        if !q.evaluate(&work) {
            return Err(Error::invalid(format!(
                "cleanify precondition violated: dissociating garbage edge ({u},{x}) broke the query"
            )));
        }
    }
    for w in garbage_partners(&before.garbage_right, v) {
        let group = work.covering(&w, v);
        let fresh = work.fresh_element(v, &mut reserved);
        let mut facts: BTreeSet<Fact> = work.facts().cloned().collect();
        for f in &group {
            facts.remove(f);
        }
        facts.extend(rename_one(&group, v, &fresh));
        work = Instance::new(facts);
        if !q.evaluate(&work) {
            return Err(Error::invalid(format!(
                "cleanify precondition violated: dissociating garbage edge ({w},{v}) broke the query"
            )));
        }
    }

    let after = analyze_edge(&work, e)?;
    if !after.is_clean() {
        return Err(Error::assertion("cleanify left garbage behind"));
    }
    if after.weight() != before.weight() {
        return Err(Error::assertion("cleanify changed the edge weight"));
    }
    if !is_tight(q, &work, e)? {
        return Err(Error::invalid("cleanify precondition violated: edge no longer tight"));
    }
    Ok((work, e.clone()))
}

/// Declared bounds of a critical-model search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBound {
    pub max_facts: usize,
    pub max_elems: usize,
}

/// A subinstance-minimal model with a clean tight edge whose weight, extra
/// weight and lexicographic weight are minimal among all (model, oriented
/// tight edge) pairs explored within the declared bounds, plus a chosen
/// left-incident and right-incident fact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalModel {
    pub instance: Instance,
    pub edge: Edge,
    pub f_left: Fact,
    pub f_right: Fact,
    /// Critical weight (certified within `bound`).
    pub theta: usize,
    /// Critical extra weight at weight `theta`.
    pub xi: usize,
    /// Critical lexicographic weight at `(theta, xi)`.
    pub lambda: (usize, usize),
    pub bound: SearchBound,
}

impl CriticalModel {
    /// Assembles a critical-model value from explicit parts. The weights are
    /// read off the edge's own analysis; the caller vouches for their
    /// criticality within `bound`. `f_left`/`f_right` default to the
    /// canonically smallest incident fact on each side (the choice is
    /// arbitrary).
    pub fn from_parts(
        instance: Instance,
        edge: Edge,
        f_left: Option<Fact>,
        f_right: Option<Fact>,
        bound: SearchBound,
    ) -> Result<CriticalModel> {
        let analysis = analyze_edge(&instance, &edge)?;
        if !analysis.non_leaf {
            return Err(Error::invalid(format!("{edge} is a leaf edge")));
        }
        if !analysis.is_clean() {
            return Err(Error::invalid(format!("{edge} is not clean")));
        }
        let pick = |given: Option<Fact>, pool: BTreeSet<Fact>, side: &str| -> Result<Fact> {
            match given {
                Some(f) => {
                    if pool.contains(&f) {
                        Ok(f)
                    } else {
                        Err(Error::invalid(format!("{f} is not a {side}-incident fact of {edge}")))
                    }
                }
                None => pool
                    .into_iter()
                    .next()
                    .ok_or_else(|| Error::invalid(format!("{edge} has no {side}-incident fact"))),
            }
        };
        let f_left = pick(f_left, analysis.incident_left(), "left")?;
        let f_right = pick(f_right, analysis.incident_right(), "right")?;
        Ok(CriticalModel {
            instance,
            edge,
            f_left,
            f_right,
            theta: analysis.weight(),
            xi: analysis.extra_weight(),
            lambda: analysis.lex_weight(),
            bound,
        })
    }

    /// Re-checks the structural invariants against the query: model,
    /// subinstance-minimal, edge clean and tight.
    pub fn validate(&self, q: &Query, cap: usize) -> Result<()> {
        if !q.evaluate(&self.instance) {
            return Err(Error::invalid("critical model does not satisfy the query"));
        }
        if !check_subinstance_minimal(q, &self.instance, cap)? {
            return Err(Error::invalid("critical model is not subinstance-minimal"));
        }
        let analysis = analyze_edge(&self.instance, &self.edge)?;
        if !analysis.is_clean() {
            return Err(Error::invalid("critical edge is not clean"));
        }
        if !is_tight(q, &self.instance, &self.edge)? {
            return Err(Error::invalid("critical edge is not tight"));
        }
        Ok(())
    }

    pub fn analysis(&self) -> EdgeAnalysis {
        analyze_edge(&self.instance, &self.edge).expect("critical edge is an edge")
    }
}

/// Outcome of [`find_critical_model`].
#[derive(Debug, Clone)]
pub enum CriticalSearch {
    Found { model: CriticalModel, explored: u64 },
    NotFound { explored: u64 },
}

/// Exhaustive search for a critical model within the bounds: enumerates
/// candidate models over the query's signature (up to isomorphism via
/// canonical fresh-element ordering), finds all (model, oriented tight
/// edge) pairs, minimizes weight, then extra weight, then lexicographic
/// weight, cleanifies the champion, shrinks it to a subinstance-minimal
/// model preserving the three weights, and picks the incident facts.
///
/// The reported weights are upper bounds certified within the bounds: no
/// explored pair beats them. UCQ candidates are enumerated as minimal-model
/// kernels plus fact extensions; RPQ candidates by a direct scan of all
/// instances within bounds (model-filtered), which keeps RPQ searches
/// practical only at small bounds.
pub fn find_critical_model(q: &Query, size_bound: usize, domain_bound: usize) -> Result<CriticalSearch> {
    if size_bound == 0 || domain_bound == 0 {
        return Err(Error::invalid("bounds must be positive"));
    }
    let bound = SearchBound { max_facts: size_bound, max_elems: domain_bound };
    let mut best: Option<Champion> = None;
    let mut explored: u64 = 0;

    let mut visit = |inst: &Instance| {
        explored += 1;
        scan_instance(q, inst, &mut best);
    };

    match &q.kind {
        QueryKind::Ucq(_) => {
            let kernels = ucq_minimal_models(q, size_bound, domain_bound)?;
            let sig: Vec<Relation> = q.signature().into_iter().collect();
            for kernel in &kernels {
                enumerate_extensions(kernel, &sig, size_bound, domain_bound, &mut visit);
            }
        }
        QueryKind::Rpq(_) => {
            let sig: Vec<Relation> = q.signature().into_iter().collect();
            let empty = Instance::empty();
            let mut inner = |inst: &Instance| {
                if q.evaluate(inst) {
                    visit(inst);
                }
            };
            enumerate_extensions(&empty, &sig, size_bound, domain_bound, &mut inner);
        }
    }

    let Some(champion) = best else {
        return Ok(CriticalSearch::NotFound { explored });
    };

    // Clean the champion's edge; in-bound minimality makes weight
    // preservation a consistency check rather than an assumption.
    let (cleaned, edge) = cleanify(q, &champion.instance, &champion.edge)?;
    let analysis = analyze_edge(&cleaned, &edge)?;
    if analysis.weight_tuple() != champion.tuple {
        return Err(Error::assertion(format!(
            "cleanify changed the champion's weights from {:?} to {:?}",
            champion.tuple,
            analysis.weight_tuple()
        )));
    }

    // Shrink to a subinstance-minimal model; the edge stays tight with the
    // same weights, otherwise a strictly better in-bound pair would exist
    // and the scan would have found it.
    let shrunk = shrink_to_minimal(q, &cleaned);
    let analysis = analyze_edge(&shrunk, &edge)?;
    if !is_tight(q, &shrunk, &edge)? {
        return Err(Error::assertion("shrinking broke tightness of the champion edge"));
    }
    if !analysis.is_clean() {
        return Err(Error::assertion("shrinking left the champion edge unclean"));
    }
    if analysis.weight_tuple() != champion.tuple {
        return Err(Error::assertion(format!(
            "shrinking changed the champion's weights from {:?} to {:?}",
            champion.tuple,
            analysis.weight_tuple()
        )));
    }

    let model = CriticalModel::from_parts(shrunk, edge, None, None, bound)?;
    Ok(CriticalSearch::Found { model, explored })
}

struct Champion {
    tuple: (usize, usize, (usize, usize)),
    tie_break: String,
    instance: Instance,
    edge: Edge,
}

fn scan_instance(q: &Query, inst: &Instance, best: &mut Option<Champion>) {
    let matcher = Matcher::compile(q, inst);
    let facts = inst.fact_vec();
    let full: u64 = if facts.len() >= 64 { u64::MAX } else { (1u64 << facts.len()) - 1 };
    for info in inst.edges() {
        if !info.non_leaf {
            continue;
        }
        // Cheap monotone filter: if the instance minus the covering facts
        // still satisfies the query, the dissociation (a superset of it)
        // does too, so the edge cannot be tight.
        let mut mask = full;
        for f in &info.covering {
            let idx = facts.binary_search(f).expect("covering fact present");
            mask &= !(1u64 << idx);
        }
        if matcher.eval_mask(mask) {
            continue;
        }
        let tight = tightness_unchecked(q, inst, &info.edge).unwrap_or(false);
        if !tight {
            continue;
        }
        let analysis = analyze_edge(inst, &info.edge).expect("edge exists");
        for oriented in [info.edge.clone(), info.edge.reversed()] {
            let lex = if oriented == info.edge {
                analysis.lex_weight()
            } else {
                let (t, w) = analysis.lex_weight();
                (w, t)
            };
            let tuple = (analysis.weight(), analysis.extra_weight(), lex);
            let better = match best.as_ref() {
                None => true,
                Some(champ) => {
                    tuple < champ.tuple
                        || (tuple == champ.tuple && tie_break_key(inst, &oriented) < champ.tie_break)
                }
            };
            if better {
                *best = Some(Champion {
                    tuple,
                    tie_break: tie_break_key(inst, &oriented),
                    instance: inst.clone(),
                    edge: oriented,
                });
            }
        }
    }
}

fn tie_break_key(inst: &Instance, edge: &Edge) -> String {
    format!("{}|{}", inst.to_text(), edge)
}

/// One greedy canonical-order pass removing facts whose removal keeps the
/// query satisfied; by monotonicity the result is subinstance-minimal.
pub fn shrink_to_minimal(q: &Query, inst: &Instance) -> Instance {
    let mut current = inst.clone();
    for f in inst.fact_vec() {
        let candidate = current.without(&f);
        if q.evaluate(&candidate) {
            current = candidate;
        }
    }
    current
}

/// All subinstance-minimal models of a UCQ within the bounds, up to
/// homomorphic equivalence (which coincides with isomorphism on minimal
/// models): quotients of each disjunct's canonical instance.
fn ucq_minimal_models(q: &Query, size_bound: usize, domain_bound: usize) -> Result<Vec<Instance>> {
    let QueryKind::Ucq(disjuncts) = &q.kind else {
        return Err(Error::invalid("not a UCQ"));
    };
    let mut kernels: Vec<Instance> = Vec::new();
    for atoms in disjuncts {
        let mut vars: Vec<Var> = Vec::new();
        for a in atoms {
            if !vars.contains(&a.x) {
                vars.push(a.x.clone());
            }
            if !vars.contains(&a.y) {
                vars.push(a.y.clone());
            }
        }
        for partition in partitions(vars.len(), domain_bound) {
            let name = |vi: usize| Elem::new(format!("e{}", partition[vi]));
            let inst = Instance::new(atoms.iter().map(|a| {
                let xi = vars.iter().position(|v| *v == a.x).unwrap();
                let yi = vars.iter().position(|v| *v == a.y).unwrap();
                Fact { rel: a.rel.clone(), subject: name(xi), object: name(yi) }
            }));
            if inst.len() > size_bound || inst.dom().len() > domain_bound {
                continue;
            }
            debug_assert!(q.evaluate(&inst));
            if !check_subinstance_minimal(q, &inst, crate::MAX_SUBSET_CAP).unwrap_or(false) {
                continue;
            }
            let duplicate = kernels.iter().any(|k| {
                k.len() == inst.len()
                    && k.find_homomorphism(&inst).is_some()
                    && inst.find_homomorphism(k).is_some()
            });
            if !duplicate {
                kernels.push(inst);
            }
        }
    }
    Ok(kernels)
}

/// Restricted-growth strings: all partitions of `{0..n-1}` into at most
/// `max_blocks` blocks, encoded as the block index per position.
fn partitions(n: usize, max_blocks: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
        return out;
    }
    fn rec(current: &mut Vec<usize>, pos: usize, max_used: usize, max_blocks: usize, out: &mut Vec<Vec<usize>>) {
        if pos == current.len() {
            out.push(current.clone());
            return;
        }
        for b in 0..=(max_used + 1).min(max_blocks.saturating_sub(1)) {
            current[pos] = b;
            rec(current, pos + 1, max_used.max(b), max_blocks, out);
        }
    }
    let mut current = alloc::vec![0usize; n];
    rec(&mut current, 1, 0, max_blocks, &mut out);
    out
}

/// Enumerates all supersets of `kernel` with at most `size_bound` facts
/// over `kernel`'s elements plus fresh ones (at most `domain_bound`
/// elements total). Fresh elements are introduced in first-use order, which
/// prunes relabelings of the same extension.
fn enumerate_extensions(
    kernel: &Instance,
    sig: &[Relation],
    size_bound: usize,
    domain_bound: usize,
    visit: &mut impl FnMut(&Instance),
) {
    let kernel_dom: Vec<Elem> = kernel.dom().into_iter().collect();
    if kernel_dom.len() > domain_bound || kernel.len() > size_bound {
        return;
    }
    let fresh_count = domain_bound - kernel_dom.len();
    let fresh: Vec<Elem> = (0..fresh_count).map(|i| Elem::new(format!("n{i}"))).collect();
    let mut elems = kernel_dom.clone();
    elems.extend(fresh.iter().cloned());
    let fresh_idx = |e: &Elem| fresh.iter().position(|f| f == e);

    // Pool of candidate facts with the fresh indices they introduce, in
    // first-occurrence order within the fact.
    let mut pool: Vec<(Fact, Vec<usize>)> = Vec::new();
    for rel in sig {
        for a in &elems {
            for b in &elems {
                let f = Fact { rel: rel.clone(), subject: a.clone(), object: b.clone() };
                if kernel.contains(&f) {
                    continue;
                }
                let mut new_order = Vec::new();
                for e in [a, b] {
                    if let Some(i) = fresh_idx(e) {
                        if !new_order.contains(&i) {
                            new_order.push(i);
                        }
                    }
                }
                pool.push((f, new_order));
            }
        }
    }

    fn rec_extend(
        kernel: &Instance,
        pool: &[(Fact, Vec<usize>)],
        start: usize,
        fresh_used: usize,
        remaining: usize,
        chosen: &mut Vec<Fact>,
        visit: &mut impl FnMut(&Instance),
    ) {
        let mut inst = kernel.clone();
        for f in chosen.iter() {
            inst = inst.with(f.clone());
        }
        visit(&inst);
        if remaining == 0 {
            return;
        }
        for i in start..pool.len() {
            let (f, new_order) = &pool[i];
            // First-use rule: fresh elements must appear in index order.
            let mut next = fresh_used;
            let mut ok = true;
            for &fi in new_order {
                if fi < next {
                    continue;
                }
                if fi == next {
                    next += 1;
                } else {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            chosen.push(f.clone());
            rec_extend(kernel, pool, i + 1, next, remaining - 1, chosen, visit);
            chosen.pop();
        }
    }

    let max_extra = size_bound - kernel.len();
    let mut chosen: Vec<Fact> = Vec::new();
    rec_extend(kernel, &pool, 0, 0, max_extra, &mut chosen, visit);
}

/// Words of the RPQ's regex up to a length bound; used by callers seeding
/// experiments from accepted words.
pub fn rpq_words(q: &Query, max_len: usize, max_words: usize) -> Result<Vec<Vec<Relation>>> {
    match &q.kind {
        QueryKind::Rpq(rpq) => Nfa::compile(&rpq.regex).words_up_to(max_len, max_words),
        _ => Err(Error::invalid("not an RPQ")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fact;

    fn inst(text: &str) -> Instance {
        Instance::parse(text).unwrap()
    }

    fn q0() -> Query {
        Query::parse("ucq: R(x,x),S(x,y),T(y,y)").unwrap()
    }

    fn q_prime() -> Query {
        Query::parse("ucq: R(x,x),S(x,y),S'(x,y),T(y,y)").unwrap()
    }

    fn edge(a: &str, b: &str) -> Edge {
        Edge::new(a, b).unwrap()
    }

    #[test]
    fn weight_three_example() {
        let i = inst("R(b)\nT(b,c)\nS(b,a)\nS'(b,a)\nU(a,b)");
        let a = analyze_edge(&i, &edge("a", "b")).unwrap();
        assert_eq!(a.weight(), 3);
    }

    #[test]
    fn garbage_classification_example() {
        let i = inst("S(a,b')\nU(a)\nS(a,b)\nS'(b,a)\nT(c,b)\nS(c,b)\nS'(d,b)\nS'(b,e)\nS(f,b)");
        let a = analyze_edge(&i, &edge("a", "b")).unwrap();
        assert_eq!(a.weight(), 2);
        assert_eq!(a.garbage_left, [fact("S", "a", "b'")].into_iter().collect());
        assert_eq!(
            a.garbage_right,
            [fact("S'", "b", "e"), fact("S", "f", "b")].into_iter().collect()
        );
        // (c,b) and (d,b) contribute no garbage; their facts are extras.
        assert!(a.extras_right.contains(&fact("T", "c", "b")));
        assert!(a.extras_right.contains(&fact("S", "c", "b")));
        assert!(a.extras_right.contains(&fact("S'", "d", "b")));
        // The unary fact on a is a left extra; no copy elements anywhere.
        assert_eq!(a.extras_left, [fact("U", "a", "a")].into_iter().collect());
        assert!(a.copies_left.is_empty());
        assert!(a.copies_right.is_empty());
    }

    #[test]
    fn analysis_partitions_incident_facts() {
        let i = inst("S(a,b')\nU(a)\nS(a,b)\nS'(b,a)\nT(c,b)\nS(c,b)\nS'(d,b)\nS'(b,e)\nS(f,b)");
        let a = analyze_edge(&i, &edge("a", "b")).unwrap();
        let left = i.incident_side(&Elem::new("a"), &Elem::new("b"));
        let right = i.incident_side(&Elem::new("b"), &Elem::new("a"));
        assert_eq!(a.incident_left(), left);
        assert_eq!(a.incident_right(), right);
        assert_eq!(
            a.garbage_left.len() + a.copy_facts_left().len() + a.extras_left.len(),
            left.len()
        );
        assert_eq!(
            a.garbage_right.len() + a.copy_facts_right().len() + a.extras_right.len(),
            right.len()
        );
    }

    #[test]
    fn analyze_rejects_non_edge() {
        let i = inst("S(a,b)\nS(c,d)");
        assert!(analyze_edge(&i, &edge("a", "c")).is_err());
    }

    #[test]
    fn dissociate_core_example() {
        let i = inst("R(a)\nS(a,b)\nT(b)");
        let d = dissociate(&i, &Elem::new("a"), &Elem::new("b")).unwrap();
        assert_eq!(d, inst("R(a,a)\nS(a,b#1)\nS(a#1,b)\nT(b,b)"));
    }

    #[test]
    fn dissociate_leaf_is_isomorphic_copy() {
        let i = inst("S(a,b)");
        let d = dissociate(&i, &Elem::new("a"), &Elem::new("b")).unwrap();
        assert_eq!(d, inst("S(a#1,b#1)"));
        assert!(d.find_homomorphism(&i).is_some());
        assert!(i.find_homomorphism(&d).is_some());
    }

    #[test]
    fn dissociate_non_edge_is_identity() {
        let i = inst("S(a,b)\nS(c,d)");
        let d = dissociate(&i, &Elem::new("a"), &Elem::new("c")).unwrap();
        assert_eq!(d, i);
    }

    #[test]
    fn dissociation_has_homomorphism_back() {
        let i = inst("R(a)\nS(a,b)\nS'(b,a)\nT(b)\nS(b,c)");
        let d = dissociate(&i, &Elem::new("a"), &Elem::new("b")).unwrap();
        assert!(d.find_homomorphism(&i).is_some());
    }

    #[test]
    fn core_edge_is_tight_for_q0() {
        let i = inst("R(a)\nS(a,b)\nT(b)");
        assert!(is_tight(&q0(), &i, &edge("a", "b")).unwrap());
    }

    #[test]
    fn q_prime_documented_model_edge_is_tight() {
        let i = inst("R(a)\nS(a,b)\nS'(a,b)\nT(b)");
        assert!(is_tight(&q_prime(), &i, &edge("a", "b")).unwrap());
    }

    #[test]
    fn disjoint_double_match_edge_is_not_tight() {
        let i = inst("R(a)\nS(a,b)\nT(b)\nR(c)\nS(c,d)\nT(d)");
        assert!(!is_tight(&q0(), &i, &edge("a", "b")).unwrap());
    }

    #[test]
    fn is_tight_rejects_violating_instance_and_leaf_edges() {
        let i = inst("S(a,b)");
        assert!(is_tight(&q0(), &i, &edge("a", "b")).is_err());
        let i = inst("R(a)\nS(a,b)\nT(b)\nS(c,d)");
        assert!(is_tight(&q0(), &i, &edge("c", "d")).is_err());
    }

    #[test]
    fn minimality_checks() {
        let core = inst("R(a)\nS(a,b)\nT(b)");
        assert!(check_subinstance_minimal(&q0(), &core, 24).unwrap());
        let padded = core.with(fact("T", "c", "c"));
        assert!(!check_subinstance_minimal(&q0(), &padded, 24).unwrap());
    }

    #[test]
    fn minimality_agrees_with_minimal_models_membership() {
        let i = inst("R(a)\nS(a,b)\nS(a,c)\nT(b)\nT(c)\nS(b,c)");
        let q = q0();
        let minimal = q.minimal_models_within(&i, 24).unwrap();
        let subs = i.subinstances(24).unwrap();
        for (_, sub) in subs.iter() {
            if q.evaluate(&sub) {
                let is_min = check_subinstance_minimal(&q, &sub, 24).unwrap();
                assert_eq!(is_min, minimal.contains(&sub));
            }
        }
    }

    #[test]
    fn cleanify_clean_input_unchanged() {
        let i = inst("R(a)\nS(a,b)\nT(b)");
        let (out, e) = cleanify(&q0(), &i, &edge("a", "b")).unwrap();
        assert_eq!(out, i);
        assert_eq!(e, edge("a", "b"));
    }

    #[test]
    fn critical_search_q0() {
        let outcome = find_critical_model(&q0(), 4, 3).unwrap();
        let CriticalSearch::Found { model, .. } = outcome else {
            panic!("expected a critical model");
        };
        assert_eq!(model.theta, 1);
        assert_eq!(model.xi, 2);
        assert_eq!(model.instance.len(), 3);
        model.validate(&q0(), 24).unwrap();
    }

    #[test]
    fn critical_search_none_when_no_tight_edge() {
        // A single binary atom: every model's edges are leaf or dissociable.
        let q = Query::parse("ucq: S(x,y)").unwrap();
        let outcome = find_critical_model(&q, 3, 3).unwrap();
        assert!(matches!(outcome, CriticalSearch::NotFound { .. }));
    }

    #[test]
    fn fact_removal_monotonicity_on_clean_edges() {
        // Randomized clean configurations, checked against the removal lemma.
        use rand_core::{RngCore, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        let rels = ["R", "S", "S'", "T"];
        let elems = ["a", "b", "c", "d", "e"];
        let mut checked = 0;
        while checked < 60 {
            let n = 3 + (rng.next_u64() % 6) as usize;
            let mut work = Instance::empty();
            for _ in 0..n {
                let r = rels[(rng.next_u64() % 4) as usize];
                let a = elems[(rng.next_u64() % 5) as usize];
                let b = elems[(rng.next_u64() % 5) as usize];
                work = work.with(fact(r, a, b));
            }
            for info in work.edges() {
                let a = analyze_edge(&work, &info.edge).unwrap();
                if !a.is_clean() {
                    continue;
                }
                checked += 1;
                for f in work.fact_vec() {
                    let j = work.without(&f);
                    if !j.is_edge(&info.edge.left, &info.edge.right) {
                        continue;
                    }
                    let aj = analyze_edge(&j, &info.edge).unwrap();
                    if a.covering.contains(&f) {
                        assert!(aj.weight() < a.weight());
                    } else {
                        assert_eq!(aj.weight(), a.weight());
                        if a.extras_left.contains(&f) || a.extras_right.contains(&f) {
                            assert!(aj.extra_weight() < a.extra_weight());
                        } else if a.copy_facts_left().contains(&f) || a.copy_facts_right().contains(&f) {
                            assert_eq!(aj.extra_weight(), a.extra_weight());
                            assert!(aj.lex_weight() < a.lex_weight());
                        } else {
                            assert_eq!(aj.extra_weight(), a.extra_weight());
                            assert_eq!(aj.lex_weight(), a.lex_weight());
                        }
                    }
                }
            }
        }
    }
}
