//! Gadget builders over critical models: iteration, saturated and iterable
//! codings, fine dissociation, and explosion.
//!
//! Every builder starts from the classification of the distinguished edge
//! `e = (u,v)`: covering facts, copy facts per copy element, and extra
//! facts per side. The underdetermined attachment choices (how extra facts
//! attach to chain copies, whether fresh endpoints receive extras) are
//! explicit policies so experiments can compare variants.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::hardprob::{BipartiteGraph, StGraph};
use crate::instance::{Edge, Elem, Fact, Instance};
use crate::query::Query;
use crate::structure::{analyze_edge, CriticalModel, EdgeAnalysis};

/// How extra facts attach to the chain copies of an iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExtraPolicy {
    /// Left extras stay on the first chain copy, right extras on the last
    /// (the endpoints keep their original facts).
    #[default]
    EndpointsOnly,
    /// Extras on triangle elements are replicated to every same-side copy;
    /// other extras stay on the endpoints.
    SharedTriangles,
    /// All extras are replicated to every same-side copy.
    Everywhere,
}

/// Whether fresh endpoints also receive copies of the original endpoint's
/// extra facts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DashedPolicy {
    #[default]
    Exclude,
    Include,
}

/// Role of a fact in a coded instance; roles partition the facts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum FactRole {
    /// Covering-fact copy placed for a bipartite edge `(i,j)`.
    EdgeCopy { left: String, right: String },
    /// Replica of the chosen left-incident fact on the `i`-th left copy.
    LeftChoice { tag: String },
    /// Replica of the chosen right-incident fact on the `j`-th right copy.
    RightChoice { tag: String },
    /// Saturation structure: copy facts and replicated copy-element facts.
    Saturation,
    /// Extras and untouched facts shared across copies.
    SharedExtra,
    /// Covering copy incident to a vertex gadget of a graph coding.
    VertexFact { vertex: String },
    /// Covering copy incident to an edge gadget of a graph coding.
    EdgeFact { edge: String },
    /// The terminal attachment and the facts on the terminal element.
    Terminal,
}

impl fmt::Display for FactRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactRole::EdgeCopy { left, right } => write!(f, "edge-copy({left},{right})"),
            FactRole::LeftChoice { tag } => write!(f, "left-choice({tag})"),
            FactRole::RightChoice { tag } => write!(f, "right-choice({tag})"),
            FactRole::Saturation => write!(f, "saturation"),
            FactRole::SharedExtra => write!(f, "shared-extra"),
            FactRole::VertexFact { vertex } => write!(f, "vertex({vertex})"),
            FactRole::EdgeFact { edge } => write!(f, "edge({edge})"),
            FactRole::Terminal => write!(f, "terminal"),
        }
    }
}

/// Fact-to-role bookkeeping for coded instances.
pub type RoleMap = BTreeMap<Fact, FactRole>;

fn rename_pair(facts: &BTreeSet<Fact>, from: (&Elem, &Elem), to: (&Elem, &Elem)) -> BTreeSet<Fact> {
    let mut map = BTreeMap::new();
    map.insert(from.0.clone(), to.0.clone());
    map.insert(from.1.clone(), to.1.clone());
    facts.iter().map(|f| f.renamed(&map)).collect()
}

fn rename_single(facts: &BTreeSet<Fact>, from: &Elem, to: &Elem) -> BTreeSet<Fact> {
    let mut map = BTreeMap::new();
    map.insert(from.clone(), to.clone());
    facts.iter().map(|f| f.renamed(&map)).collect()
}

/// Facts of the model not touching either endpoint of the analyzed edge.
fn untouched_facts(m: &Instance, analysis: &EdgeAnalysis) -> BTreeSet<Fact> {
    let (u, v) = (&analysis.edge.left, &analysis.edge.right);
    m.facts().filter(|f| !f.uses(u) && !f.uses(v)).cloned().collect()
}

/// The extra-fact partner element on one side, if binary.
fn extra_partner(f: &Fact, own: &Elem) -> Option<Elem> {
    if f.is_unary() {
        None
    } else if f.subject == *own {
        Some(f.object.clone())
    } else {
        Some(f.subject.clone())
    }
}

fn require_clean_non_leaf(analysis: &EdgeAnalysis) -> Result<()> {
    if !analysis.non_leaf {
        return Err(Error::invalid(format!("{} is a leaf edge", analysis.edge)));
    }
    if !analysis.is_clean() {
        return Err(Error::invalid(format!(
            "{} has garbage facts; cleanify the model first",
            analysis.edge
        )));
    }
    Ok(())
}

/// Replaces the edge's covering facts by a `k`-link chain alternating
/// u-side copies `u = u_1, .., u_k` and v-side copies `v_1, .., v_k = v`,
/// with covering copies on `(u_i, v_i)` and `(u_{i+1}, v_i)`. Copy facts
/// are replicated onto every same-side chain copy; extra facts attach per
/// policy. `k = 1` returns the model unchanged.
pub fn iterate_model(m: &Instance, e: &Edge, k: usize, policy: ExtraPolicy) -> Result<Instance> {
    if k == 0 {
        return Err(Error::invalid("iteration count must be at least 1"));
    }
    let analysis = analyze_edge(m, e)?;
    require_clean_non_leaf(&analysis)?;
    let (u, v) = (&e.left, &e.right);

    // u_1 = u and v_k = v; the middles are fresh.
    let mut reserved = BTreeSet::new();
    let mut u_side: Vec<Elem> = alloc::vec![u.clone()];
    for _ in 1..k {
        u_side.push(m.fresh_element(u, &mut reserved));
    }
    let mut v_side: Vec<Elem> = Vec::new();
    for _ in 1..k {
        v_side.push(m.fresh_element(v, &mut reserved));
    }
    v_side.push(v.clone());

    let mut facts = untouched_facts(m, &analysis);
    for i in 0..k {
        facts.extend(rename_pair(&analysis.covering, (u, v), (&u_side[i], &v_side[i])));
        if i + 1 < k {
            facts.extend(rename_pair(&analysis.covering, (u, v), (&u_side[i + 1], &v_side[i])));
        }
    }
    for cx in analysis.copies_left.values() {
        for ui in &u_side {
            facts.extend(rename_single(cx, u, ui));
        }
    }
    for cw in analysis.copies_right.values() {
        for vj in &v_side {
            facts.extend(rename_single(cw, v, vj));
        }
    }
    let spread = |facts: &mut BTreeSet<Fact>, f: &Fact, own: &Elem, side: &[Elem]| {
        for copy in side {
            facts.extend(rename_single(&[f.clone()].into_iter().collect(), own, copy));
        }
    };
    for f in &analysis.extras_left {
        match policy {
            ExtraPolicy::EndpointsOnly => {
                facts.insert(f.clone());
            }
            ExtraPolicy::Everywhere => spread(&mut facts, f, u, &u_side),
            ExtraPolicy::SharedTriangles => {
                let triangle = extra_partner(f, u).is_some_and(|x| analysis.triangles.contains(&x));
                if triangle {
                    spread(&mut facts, f, u, &u_side);
                } else {
                    facts.insert(f.clone());
                }
            }
        }
    }
    for f in &analysis.extras_right {
        match policy {
            ExtraPolicy::EndpointsOnly => {
                facts.insert(f.clone());
            }
            ExtraPolicy::Everywhere => spread(&mut facts, f, v, &v_side),
            ExtraPolicy::SharedTriangles => {
                let triangle = extra_partner(f, v).is_some_and(|x| analysis.triangles.contains(&x));
                if triangle {
                    spread(&mut facts, f, v, &v_side);
                } else {
                    facts.insert(f.clone());
                }
            }
        }
    }
    Ok(Instance::new(facts))
}

/// Whether iterating the model at the probe length keeps the query
/// satisfied (default probe is 2).
pub fn is_iterable(q: &Query, m: &Instance, e: &Edge, k: usize) -> Result<bool> {
    if !q.evaluate(m) {
        return Err(Error::invalid("iterability is only defined on models of the query"));
    }
    let iterated = iterate_model(m, e, k, ExtraPolicy::EndpointsOnly)?;
    Ok(q.evaluate(&iterated))
}

/// Default probe length for [`is_iterable`].
pub const ITERABLE_PROBE: usize = 2;

fn gadget_elem(m: &Instance, name: String) -> Result<Elem> {
    let e = Elem::new(name);
    if m.dom().contains(&e) {
        return Err(Error::invalid(format!(
            "coding element {e} collides with the model's domain; rename the model's elements"
        )));
    }
    Ok(e)
}

/// The N-saturated coding of a bipartite graph in a critical model: one
/// u-side copy per `U`-vertex and one v-side copy per `V`-vertex, covering
/// copies per bipartite edge, each copy element replicated `N` times with
/// its copy facts attached to every same-side gadget copy and its own
/// incident structure replicated per replica, and extra-fact elements
/// shared across all copies.
pub fn saturated_coding(
    cm: &CriticalModel,
    b: &BipartiteGraph,
    n: usize,
) -> Result<(Instance, RoleMap)> {
    if n == 0 {
        return Err(Error::invalid("replication count N must be at least 1"));
    }
    let m = &cm.instance;
    let analysis = cm.analysis();
    require_clean_non_leaf(&analysis)?;
    let (u, v) = (&cm.edge.left, &cm.edge.right);

    let u_copies: Vec<(String, Elem)> = b
        .u_names()
        .iter()
        .map(|name| Ok((name.clone(), gadget_elem(m, format!("{u}@{name}"))?)))
        .collect::<Result<_>>()?;
    let v_copies: Vec<(String, Elem)> = b
        .v_names()
        .iter()
        .map(|name| Ok((name.clone(), gadget_elem(m, format!("{v}@{name}"))?)))
        .collect::<Result<_>>()?;

    // Copy elements and every fact touching them, replicated per n.
    let copy_elems: BTreeSet<Elem> = analysis
        .copies_left
        .keys()
        .chain(analysis.copies_right.keys())
        .cloned()
        .collect();
    let replica = |c: &Elem, i: usize| Elem::new(format!("{c}@{}", i + 1));
    for c in &copy_elems {
        for i in 0..n {
            gadget_elem(m, replica(c, i).as_str().into())?;
        }
    }
    let ce_facts: BTreeSet<Fact> = m
        .facts()
        .filter(|f| {
            !f.uses(u)
                && !f.uses(v)
                && (copy_elems.contains(&f.subject) || copy_elems.contains(&f.object))
        })
        .cloned()
        .collect();
    let shared: BTreeSet<Fact> = untouched_facts(m, &analysis)
        .difference(&ce_facts)
        .cloned()
        .collect();

    let mut facts: BTreeSet<Fact> = BTreeSet::new();
    let mut roles: RoleMap = BTreeMap::new();
    for f in shared {
        roles.insert(f.clone(), FactRole::SharedExtra);
        facts.insert(f);
    }
    // Replicated copy-element structure, all copy elements subscripted by
    // the same replica index.
    for i in 0..n {
        let map: BTreeMap<Elem, Elem> = copy_elems.iter().map(|c| (c.clone(), replica(c, i))).collect();
        for f in &ce_facts {
            let g = f.renamed(&map);
            roles.insert(g.clone(), FactRole::Saturation);
            facts.insert(g);
        }
    }
    // Covering copies per bipartite edge.
    for &(i, j) in b.edge_indices() {
        let (ltag, le) = &u_copies[i];
        let (rtag, re) = &v_copies[j];
        for f in rename_pair(&analysis.covering, (u, v), (le, re)) {
            roles.insert(f.clone(), FactRole::EdgeCopy { left: ltag.clone(), right: rtag.clone() });
            facts.insert(f);
        }
    }
    // Copy facts from every gadget copy to every replica.
    for (x, cx) in &analysis.copies_left {
        for (_, le) in &u_copies {
            for i in 0..n {
                let mut map = BTreeMap::new();
                map.insert(u.clone(), le.clone());
                map.insert(x.clone(), replica(x, i));
                for f in cx {
                    let g = f.renamed(&map);
                    roles.insert(g.clone(), FactRole::Saturation);
                    facts.insert(g);
                }
            }
        }
    }
    for (w, cw) in &analysis.copies_right {
        for (_, re) in &v_copies {
            for i in 0..n {
                let mut map = BTreeMap::new();
                map.insert(v.clone(), re.clone());
                map.insert(w.clone(), replica(w, i));
                for f in cw {
                    let g = f.renamed(&map);
                    roles.insert(g.clone(), FactRole::Saturation);
                    facts.insert(g);
                }
            }
        }
    }
    // Extras per gadget copy; the chosen incident facts are tagged as the
    // per-copy choice facts.
    for (tag, le) in &u_copies {
        for f in &analysis.extras_left {
            let g = rename_single(&[f.clone()].into_iter().collect(), u, le)
                .into_iter()
                .next()
                .expect("one fact");
            let role = if *f == cm.f_left {
                FactRole::LeftChoice { tag: tag.clone() }
            } else {
                FactRole::SharedExtra
            };
            roles.insert(g.clone(), role);
            facts.insert(g);
        }
    }
    for (tag, re) in &v_copies {
        for f in &analysis.extras_right {
            let g = rename_single(&[f.clone()].into_iter().collect(), v, re)
                .into_iter()
                .next()
                .expect("one fact");
            let role = if *f == cm.f_right {
                FactRole::RightChoice { tag: tag.clone() }
            } else {
                FactRole::SharedExtra
            };
            roles.insert(g.clone(), role);
            facts.insert(g);
        }
    }
    Ok((Instance::new(facts), roles))
}

/// The iterable coding of a source-sink graph in a critical model: a u-side
/// copy per vertex and per edge, a v-side copy per (edge, endpoint)
/// incidence, covering copies on `(u_x, v_{e,x})` and `(u_e, v_{e,x})`, a
/// distinguished terminal v-element attached to `u_s`, copy facts
/// replicated across all gadget copies (copy elements shared), u-side
/// extras only on `u_r`, and v-side extras only on the terminal.
pub fn iterable_coding(cm: &CriticalModel, g: &StGraph) -> Result<(Instance, RoleMap)> {
    let m = &cm.instance;
    let analysis = cm.analysis();
    require_clean_non_leaf(&analysis)?;
    let (u, v) = (&cm.edge.left, &cm.edge.right);

    let vertex_copy: BTreeMap<String, Elem> = g
        .vertex_names()
        .iter()
        .map(|x| Ok((x.clone(), gadget_elem(m, format!("{u}@{x}"))?)))
        .collect::<Result<_>>()?;
    let edge_id = |i: usize, j: usize| -> String {
        let names = g.vertex_names();
        let (a, b) = (&names[i], &names[j]);
        if a <= b { format!("{a}~{b}") } else { format!("{b}~{a}") }
    };
    let mut edge_copy: BTreeMap<String, Elem> = BTreeMap::new();
    let mut incidence_copy: BTreeMap<(String, String), Elem> = BTreeMap::new();
    for &(i, j) in g.edge_indices() {
        let id = edge_id(i, j);
        edge_copy.insert(id.clone(), gadget_elem(m, format!("{u}@{id}"))?);
        for x in [i, j] {
            let xname = g.vertex_names()[x].clone();
            incidence_copy
                .insert((id.clone(), xname.clone()), gadget_elem(m, format!("{v}@{id}@{xname}"))?);
        }
    }
    let terminal = gadget_elem(m, format!("{v}@term"))?;

    let mut facts: BTreeSet<Fact> = BTreeSet::new();
    let mut roles: RoleMap = BTreeMap::new();
    for f in untouched_facts(m, &analysis) {
        roles.insert(f.clone(), FactRole::SharedExtra);
        facts.insert(f);
    }
    // Covering copies along the incidence structure.
    for &(i, j) in g.edge_indices() {
        let id = edge_id(i, j);
        let ue = &edge_copy[&id];
        for x in [i, j] {
            let xname = g.vertex_names()[x].clone();
            let ux = &vertex_copy[&xname];
            let ve = &incidence_copy[&(id.clone(), xname.clone())];
            for f in rename_pair(&analysis.covering, (u, v), (ux, ve)) {
                roles.insert(f.clone(), FactRole::VertexFact { vertex: xname.clone() });
                facts.insert(f);
            }
            for f in rename_pair(&analysis.covering, (u, v), (ue, ve)) {
                roles.insert(f.clone(), FactRole::EdgeFact { edge: id.clone() });
                facts.insert(f);
            }
        }
    }
    // Terminal attachment from the sink's vertex copy.
    let us = &vertex_copy[g.s_name()];
    for f in rename_pair(&analysis.covering, (u, v), (us, &terminal)) {
        roles.insert(f.clone(), FactRole::Terminal);
        facts.insert(f);
    }
    // Copy facts to the shared copy elements, from every u-side and v-side
    // gadget element.
    let all_u: Vec<&Elem> = vertex_copy.values().chain(edge_copy.values()).collect();
    let all_v: Vec<&Elem> = incidence_copy.values().chain([&terminal]).collect();
    for cx in analysis.copies_left.values() {
        for ue in &all_u {
            for f in rename_single(cx, u, ue) {
                roles.insert(f.clone(), FactRole::Saturation);
                facts.insert(f);
            }
        }
    }
    for cw in analysis.copies_right.values() {
        for ve in &all_v {
            for f in rename_single(cw, v, ve) {
                roles.insert(f.clone(), FactRole::Saturation);
                facts.insert(f);
            }
        }
    }
    // u-side extras only on the source copy; v-side extras only on the
    // terminal.
    let ur = &vertex_copy[g.r_name()];
    for f in &analysis.extras_left {
        for g in rename_single(&[f.clone()].into_iter().collect(), u, ur) {
            roles.insert(g.clone(), FactRole::LeftChoice { tag: cm.edge.left.as_str().into() });
            facts.insert(g);
        }
    }
    for f in &analysis.extras_right {
        for g in rename_single(&[f.clone()].into_iter().collect(), v, &terminal) {
            roles.insert(g.clone(), FactRole::Terminal);
            facts.insert(g);
        }
    }
    Ok((Instance::new(facts), roles))
}

/// Like dissociation, but each fresh endpoint also receives copies of the
/// original endpoint's copy facts; extra facts follow the dashed policy
/// (default exclude).
pub fn fine_dissociation(m: &Instance, e: &Edge, dashed: DashedPolicy) -> Result<Instance> {
    let analysis = analyze_edge(m, e)?;
    require_clean_non_leaf(&analysis)?;
    let (u, v) = (&e.left, &e.right);
    let mut reserved = BTreeSet::new();
    let u2 = m.fresh_element(u, &mut reserved);
    let v2 = m.fresh_element(v, &mut reserved);

    let mut facts: BTreeSet<Fact> = m.facts().cloned().collect();
    for f in &analysis.covering {
        facts.remove(f);
    }
    facts.extend(rename_single(&analysis.covering, v, &v2));
    facts.extend(rename_single(&analysis.covering, u, &u2));
    for cx in analysis.copies_left.values() {
        facts.extend(rename_single(cx, u, &u2));
    }
    for cw in analysis.copies_right.values() {
        facts.extend(rename_single(cw, v, &v2));
    }
    if dashed == DashedPolicy::Include {
        for f in &analysis.extras_left {
            facts.extend(rename_single(&[f.clone()].into_iter().collect(), u, &u2));
        }
        for f in &analysis.extras_right {
            facts.extend(rename_single(&[f.clone()].into_iter().collect(), v, &v2));
        }
    }
    Ok(Instance::new(facts))
}

/// The explosion of the edge with `k` intermediate elements: fresh `u'`,
/// `v'` and middles `u_1..u_k`, covering copies on `(u,v')`, `(u_i,v')`,
/// `(u_i,v)` and `(u',v)`; the `i`-th middle carries only the `i`-th left
/// copy element's facts, `u'` carries all left copy facts, `v'` all right
/// copy facts, and the original endpoints keep their incident facts.
/// Requires `k` at most the number of left copy elements; `k = 0`
/// degenerates to the fine dissociation.
pub fn explosion(m: &Instance, e: &Edge, k: usize) -> Result<Instance> {
    let analysis = analyze_edge(m, e)?;
    require_clean_non_leaf(&analysis)?;
    let left_elems: Vec<Elem> = analysis.copies_left.keys().cloned().collect();
    if k > left_elems.len() {
        return Err(Error::invalid(format!(
            "k = {k} exceeds the number of left copy elements ({})",
            left_elems.len()
        )));
    }
    if k == 0 {
        return fine_dissociation(m, e, DashedPolicy::Exclude);
    }
    let (u, v) = (&e.left, &e.right);
    let mut reserved = BTreeSet::new();
    let u2 = m.fresh_element(u, &mut reserved);
    let v2 = m.fresh_element(v, &mut reserved);
    let middles: Vec<Elem> = (0..k).map(|_| m.fresh_element(u, &mut reserved)).collect();

    let mut facts: BTreeSet<Fact> = m.facts().cloned().collect();
    for f in &analysis.covering {
        facts.remove(f);
    }
    // Covering copies per the explosion shape.
    facts.extend(rename_single(&analysis.covering, v, &v2));
    facts.extend(rename_single(&analysis.covering, u, &u2));
    for mid in &middles {
        facts.extend(rename_pair(&analysis.covering, (u, v), (mid, &v2)));
        facts.extend(rename_single(&analysis.covering, u, mid));
    }
    // u' and v' carry the full same-side copy facts.
    for cx in analysis.copies_left.values() {
        facts.extend(rename_single(cx, u, &u2));
    }
    for cw in analysis.copies_right.values() {
        facts.extend(rename_single(cw, v, &v2));
    }
    // The i-th middle carries only the i-th left copy element's facts.
    for (i, mid) in middles.iter().enumerate() {
        let cx = &analysis.copies_left[&left_elems[i]];
        facts.extend(rename_single(cx, u, mid));
    }
    Ok(Instance::new(facts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::SearchBound;

    fn inst(text: &str) -> Instance {
        Instance::parse(text).unwrap()
    }

    fn edge(a: &str, b: &str) -> Edge {
        Edge::new(a, b).unwrap()
    }

    fn m0() -> Instance {
        inst("R(a)\nS(a,b)\nT(b)")
    }

    fn cm_m0() -> CriticalModel {
        CriticalModel::from_parts(
            m0(),
            edge("a", "b"),
            None,
            None,
            SearchBound { max_facts: 4, max_elems: 3 },
        )
        .unwrap()
    }

    #[test]
    fn iterate_k1_is_identity() {
        let m = m0();
        let it = iterate_model(&m, &edge("a", "b"), 1, ExtraPolicy::EndpointsOnly).unwrap();
        assert_eq!(it, m);
    }

    #[test]
    fn iterate_m0_k2_endpoints_only() {
        let it = iterate_model(&m0(), &edge("a", "b"), 2, ExtraPolicy::EndpointsOnly).unwrap();
        assert_eq!(it, inst("R(a,a)\nS(a,b#1)\nS(a#1,b#1)\nS(a#1,b)\nT(b,b)"));
    }

    #[test]
    fn iterate_rejects_leaf_edge() {
        let m = inst("S(a,b)");
        assert!(iterate_model(&m, &edge("a", "b"), 2, ExtraPolicy::EndpointsOnly).is_err());
    }

    #[test]
    fn iterability_of_m0() {
        let one_way = Query::parse("rpq: R . S* . T").unwrap();
        let two_way = Query::parse("rpq[2way]: R . S* . T").unwrap();
        let q0 = Query::parse("ucq: R(x,x),S(x,y),T(y,y)").unwrap();
        let m = m0();
        let e = edge("a", "b");
        assert!(!is_iterable(&one_way, &m, &e, ITERABLE_PROBE).unwrap());
        assert!(is_iterable(&two_way, &m, &e, ITERABLE_PROBE).unwrap());
        assert!(!is_iterable(&q0, &m, &e, ITERABLE_PROBE).unwrap());
    }

    #[test]
    fn saturated_coding_of_m0_is_bipartite_instance() {
        let b = BipartiteGraph::new(
            alloc::vec!["1".into(), "2".into()],
            alloc::vec!["x".into(), "y".into()],
            alloc::vec![("1".into(), "x".into()), ("2".into(), "y".into())],
        )
        .unwrap();
        let (coded, roles) = saturated_coding(&cm_m0(), &b, 3).unwrap();
        let expect = inst("R(a@1,a@1)\nR(a@2,a@2)\nS(a@1,b@x)\nS(a@2,b@y)\nT(b@x,b@x)\nT(b@y,b@y)");
        assert_eq!(coded, expect);
        // Every fact has a role; endpoint roles point at the graph tags.
        assert_eq!(roles.len(), coded.len());
        assert_eq!(
            roles[&Fact::new("R", "a@1", "a@1")],
            FactRole::LeftChoice { tag: "1".into() }
        );
        assert_eq!(
            roles[&Fact::new("T", "b@y", "b@y")],
            FactRole::RightChoice { tag: "y".into() }
        );
        assert!(matches!(
            roles[&Fact::new("S", "a@1", "b@x")],
            FactRole::EdgeCopy { .. }
        ));
    }

    #[test]
    fn saturated_coding_empty_edges_unsatisfied() {
        let b = BipartiteGraph::from_indices(2, 2, alloc::vec![]).unwrap();
        let (coded, _) = saturated_coding(&cm_m0(), &b, 2).unwrap();
        let q0 = Query::parse("ucq: R(x,x),S(x,y),T(y,y)").unwrap();
        assert!(!q0.evaluate(&coded));
    }

    #[test]
    fn iterable_coding_single_edge_counts() {
        let g = StGraph::new(
            alloc::vec!["r".into(), "s".into()],
            alloc::vec![("r".into(), "s".into())],
            "r",
            "s",
        )
        .unwrap();
        let (coded, roles) = iterable_coding(&cm_m0(), &g).unwrap();
        // 3 u-elements (r, s, the edge), 2 incidence v-elements + terminal.
        let dom = coded.dom();
        assert_eq!(dom.len(), 6);
        // 4 incidence covering copies + terminal attachment + R + T.
        assert_eq!(coded.len(), 7);
        assert!(roles.values().any(|r| matches!(r, FactRole::Terminal)));
        let two_way = Query::parse("rpq[2way]: R . S* . T").unwrap();
        assert!(two_way.evaluate(&coded));
    }

    #[test]
    fn iterable_coding_tracks_connectivity() {
        let two_way = Query::parse("rpq[2way]: R . S* . T").unwrap();
        // Disconnected terminals: not satisfied.
        let g = StGraph::new(
            alloc::vec!["r".into(), "s".into(), "a".into()],
            alloc::vec![("r".into(), "a".into())],
            "r",
            "s",
        )
        .unwrap();
        let (coded, _) = iterable_coding(&cm_m0(), &g).unwrap();
        assert!(!two_way.evaluate(&coded));
        // Connected through a: satisfied.
        let g = StGraph::new(
            alloc::vec!["r".into(), "s".into(), "a".into()],
            alloc::vec![("r".into(), "a".into()), ("a".into(), "s".into())],
            "r",
            "s",
        )
        .unwrap();
        let (coded, _) = iterable_coding(&cm_m0(), &g).unwrap();
        assert!(two_way.evaluate(&coded));
    }

    #[test]
    fn fine_dissociation_of_m0_is_plain_dissociation() {
        let out = fine_dissociation(&m0(), &edge("a", "b"), DashedPolicy::Exclude).unwrap();
        assert_eq!(out, inst("R(a,a)\nS(a,b#1)\nS(a#1,b)\nT(b,b)"));
    }

    #[test]
    fn fine_dissociation_maps_back() {
        let m = inst("E(u,t)\nS(u,t1)\nS(u,t2)\nS(u,v)\nF(w,v)\nS(w1,v)\nS(w2,v)");
        let out = fine_dissociation(&m, &edge("u", "v"), DashedPolicy::Exclude).unwrap();
        assert!(out.find_homomorphism(&m).is_some());
        let out = fine_dissociation(&m, &edge("u", "v"), DashedPolicy::Include).unwrap();
        assert!(out.find_homomorphism(&m).is_some());
    }

    #[test]
    fn explosion_element_count_and_degenerate_case() {
        let m = inst("E(u,t)\nS(u,t1)\nS(u,t2)\nS(u,v)\nF(w,v)\nS(w1,v)\nS(w2,v)");
        let e = edge("u", "v");
        let out = explosion(&m, &e, 2).unwrap();
        assert_eq!(out.dom().len(), m.dom().len() + 2 + 2);
        let k0 = explosion(&m, &e, 0).unwrap();
        assert_eq!(k0, fine_dissociation(&m, &e, DashedPolicy::Exclude).unwrap());
        // k beyond the left copy elements is rejected.
        assert!(explosion(&m, &e, 3).is_err());
    }
}
