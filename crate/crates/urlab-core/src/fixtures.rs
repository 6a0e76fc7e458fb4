//! Reference models and golden construction outputs used by the
//! verification suites.
//!
//! Each `*_expected` instance is written out fact by fact rather than
//! computed, so the suites compare the builders against an independent
//! transcription. The naming follows the builders' deterministic scheme:
//! fresh elements are `base#k`, gadget copies are `base@tag`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::gadgets::{DashedPolicy, ExtraPolicy};
use crate::hardprob::{BipartiteGraph, StGraph};
use crate::instance::{Edge, Instance};
use crate::query::Query;
use crate::structure::{CriticalModel, SearchBound};

fn inst(lines: &[&str]) -> Instance {
    Instance::parse(&lines.join("\n")).expect("fixture parses")
}

pub fn edge(a: &str, b: &str) -> Edge {
    Edge::new(a, b).expect("fixture edge")
}

/// The three-fact core model of the prototypical query: `R(a)`, `S(a,b)`,
/// `T(b)` after unary encoding.
pub fn m0() -> Instance {
    inst(&["R(a,a)", "S(a,b)", "T(b,b)"])
}

pub fn q0() -> Query {
    Query::parse("ucq: R(x,x),S(x,y),T(y,y)").expect("fixture query")
}

/// Two-way path query satisfied by `m0` and by its iterations.
pub fn q_rpq_two_way() -> Query {
    Query::parse("rpq[2way]: R . S* . T").expect("fixture query")
}

/// Critical-model value for `m0` with edge `(a,b)`; weight 1, extra
/// weight 2, no copy elements.
pub fn cm_m0() -> CriticalModel {
    CriticalModel::from_parts(
        m0(),
        edge("a", "b"),
        None,
        None,
        SearchBound { max_facts: 4, max_elems: 3 },
    )
    .expect("m0 critical model")
}

/// Weight example: the edge `(a,b)` has three covering facts.
pub fn weight_example() -> (Instance, Edge) {
    (inst(&["R(b,b)", "T(b,c)", "S(b,a)", "S'(b,a)", "U(a,b)"]), edge("a", "b"))
}

/// Garbage-classification example around the edge `(a,b)`.
pub fn garbage_example() -> (Instance, Edge) {
    (
        inst(&[
            "S(a,b')", "U(a,a)", "S(a,b)", "S'(b,a)", "T(c,b)", "S(c,b)", "S'(d,b)", "S'(b,e)",
            "S(f,b)",
        ]),
        edge("a", "b"),
    )
}

/// Copy/extra/garbage panorama around the edge `(u,v)`: covering pair
/// `{S,S'}`, full copies on `t1`, `t2` (left) and `w1`, `w2` (right),
/// strict-subset neighbors `g1`, `g2`, `g3` and the left side of `x4`
/// (garbage), and extras on `x1` (not isomorphic) and `x2`/`x3`/`x4`
/// (triangles).
pub fn classification_example() -> (Instance, Edge) {
    (
        inst(&[
            "S(u,v)", "S'(u,v)",
            "S(u,t1)", "S'(u,t1)", "S(u,t2)", "S'(u,t2)",
            "S(w1,v)", "S'(w1,v)", "S(w2,v)", "S'(w2,v)",
            "S(u,g1)",
            "S(u,g2)", "S(g2,v)",
            "S(g3,v)",
            "A(u,x1)",
            "S(u,x2)", "S'(u,x2)", "S(x2,v)", "S'(x2,v)",
            "B(u,x3)", "A(x3,v)",
            "S(u,x4)", "S(x4,v)", "S'(x4,v)",
        ]),
        edge("u", "v"),
    )
}

/// Cleanification scenario: a tight edge `(u,v)` of weight 2 with one
/// garbage neighbor per side (`x1` left, `y1` right), a copy per side
/// (`t1`, `w1`) and an extra per side (`t2`, `w2`).
pub fn cleanify_input() -> (Instance, Edge, Query) {
    (
        inst(&[
            "S(u,v)", "S'(u,v)",
            "S(u,t1)", "S'(u,t1)",
            "A(u,t2)",
            "S(u,x1)",
            "S(w1,v)", "S'(w1,v)",
            "B(w2,v)",
            "S(y1,v)",
        ]),
        edge("u", "v"),
        Query::parse("ucq: A(x,z1),S(x,y),S'(x,y),B(z2,y)").expect("fixture query"),
    )
}

/// Expected cleanification output: each garbage group moved onto a fresh
/// endpoint (`u#1`, `v#1`), everything else untouched.
pub fn cleanify_expected() -> Instance {
    inst(&[
        "S(u,v)", "S'(u,v)",
        "S(u,t1)", "S'(u,t1)",
        "A(u,t2)",
        "S(u#1,x1)",
        "S(w1,v)", "S'(w1,v)",
        "B(w2,v)",
        "S(y1,v#1)",
    ])
}

/// Non-iterable-side example model: edge `(u,v)` with covering fact
/// `S(u,v)`, copy elements `t1`, `t2` (left) and `w1`, `w2` (right), extra
/// neighbors `x1`, `x2`, `x3` (`x2` forms a triangle), and inter-element
/// structure among copy elements and extras.
pub fn m_noniter() -> Instance {
    inst(&[
        "S(u,v)",
        "A(u,x1)", "A(u,x2)",
        "B(v,x2)", "B(v,x3)",
        "C(x1,x2)", "C(x2,x3)", "C(x1,x3)",
        "S(u,t1)", "S(u,t2)",
        "S(w1,v)", "S(w2,v)",
        "P(t1,t2)", "P(w1,w2)", "P(t2,w2)", "P(x1,t1)", "P(x3,w1)",
    ])
}

pub fn m_noniter_edge() -> Edge {
    edge("u", "v")
}

pub fn cm_noniter() -> CriticalModel {
    CriticalModel::from_parts(
        m_noniter(),
        m_noniter_edge(),
        None,
        None,
        SearchBound { max_facts: 17, max_elems: 10 },
    )
    .expect("noniter critical model")
}

/// The 2-link iteration of [`m_noniter`] under the triangle-sharing policy:
/// chain `u — v#1 — u#1 — v`, copy facts replicated on both chain copies
/// per side, the triangle extra `x2` shared across copies, the other
/// extras kept on the endpoints.
pub fn m_noniter_iterated_expected() -> Instance {
    inst(&[
        // untouched structure
        "C(x1,x2)", "C(x2,x3)", "C(x1,x3)",
        "P(t1,t2)", "P(w1,w2)", "P(t2,w2)", "P(x1,t1)", "P(x3,w1)",
        // chain
        "S(u,v#1)", "S(u#1,v#1)", "S(u#1,v)",
        // copy facts on every same-side copy
        "S(u,t1)", "S(u,t2)", "S(u#1,t1)", "S(u#1,t2)",
        "S(w1,v#1)", "S(w2,v#1)", "S(w1,v)", "S(w2,v)",
        // extras
        "A(u,x1)", "A(u,x2)", "A(u#1,x2)",
        "B(v,x3)", "B(v,x2)", "B(v#1,x2)",
    ])
}

pub fn noniter_iteration_policy() -> ExtraPolicy {
    ExtraPolicy::SharedTriangles
}

/// The bipartite graph coded in the 3-saturated coding fixture:
/// `U = {1,2}`, `V = {1',2'}`, `E = {(1,1'),(1,2'),(2,2')}`.
pub fn saturated_coding_graph() -> BipartiteGraph {
    BipartiteGraph::new(
        vec!["1".into(), "2".into()],
        vec!["1'".into(), "2'".into()],
        vec![
            ("1".into(), "1'".into()),
            ("1".into(), "2'".into()),
            ("2".into(), "2'".into()),
        ],
    )
    .expect("fixture graph")
}

/// The 3-saturated coding of [`saturated_coding_graph`] in [`m_noniter`]:
/// two u-copies, two v-copies, shared extras `x1`, `x2`, `x3`, and each
/// copy element replicated three times with its structure per replica.
pub fn saturated_coding_expected() -> Instance {
    let mut lines: Vec<String> = vec![
        // covering copies per bipartite edge
        "S(u@1,v@1')".into(),
        "S(u@1,v@2')".into(),
        "S(u@2,v@2')".into(),
        // shared facts among the extra elements
        "C(x1,x2)".into(),
        "C(x2,x3)".into(),
        "C(x1,x3)".into(),
    ];
    // extras per gadget copy, extra elements shared
    for ue in ["u@1", "u@2"] {
        lines.push(alloc::format!("A({ue},x1)"));
        lines.push(alloc::format!("A({ue},x2)"));
    }
    for ve in ["v@1'", "v@2'"] {
        lines.push(alloc::format!("B({ve},x2)"));
        lines.push(alloc::format!("B({ve},x3)"));
    }
    for n in 1..=3 {
        // copy-element structure per replica
        lines.push(alloc::format!("P(t1@{n},t2@{n})"));
        lines.push(alloc::format!("P(w1@{n},w2@{n})"));
        lines.push(alloc::format!("P(t2@{n},w2@{n})"));
        lines.push(alloc::format!("P(x1,t1@{n})"));
        lines.push(alloc::format!("P(x3,w1@{n})"));
        // copy facts from every gadget copy to every replica
        for ue in ["u@1", "u@2"] {
            lines.push(alloc::format!("S({ue},t1@{n})"));
            lines.push(alloc::format!("S({ue},t2@{n})"));
        }
        for ve in ["v@1'", "v@2'"] {
            lines.push(alloc::format!("S(w1@{n},{ve})"));
            lines.push(alloc::format!("S(w2@{n},{ve})"));
        }
    }
    let refs: Vec<&str> = lines.iter().map(|s| s.as_str()).collect();
    inst(&refs)
}

/// Iterable-side example model: edge `(u,v)` with covering fact `S(u,v)`,
/// copy elements `t1`, `t2` / `w1`, `w2`, and one extra per side (`t` on
/// the left via relation `E`, `w` on the right via `F`).
pub fn m_iter() -> Instance {
    inst(&[
        "S(u,v)",
        "E(u,t)",
        "S(u,t1)", "S(u,t2)",
        "F(w,v)",
        "S(w1,v)", "S(w2,v)",
    ])
}

pub fn m_iter_edge() -> Edge {
    edge("u", "v")
}

pub fn cm_iter() -> CriticalModel {
    CriticalModel::from_parts(
        m_iter(),
        m_iter_edge(),
        None,
        None,
        SearchBound { max_facts: 7, max_elems: 8 },
    )
    .expect("iter critical model")
}

/// The 4-step iteration of [`m_iter`] under the default endpoints-only
/// policy: the extra `t` stays on the first chain copy and `w` on the
/// last, copy facts replicated on every chain copy.
pub fn m_iter_iterated_expected() -> Instance {
    inst(&[
        // chain
        "S(u,v#1)", "S(u#1,v#1)", "S(u#1,v#2)", "S(u#2,v#2)", "S(u#2,v#3)", "S(u#3,v#3)",
        "S(u#3,v)",
        // copy facts on every chain copy
        "S(u,t1)", "S(u,t2)", "S(u#1,t1)", "S(u#1,t2)", "S(u#2,t1)", "S(u#2,t2)", "S(u#3,t1)",
        "S(u#3,t2)",
        "S(w1,v#1)", "S(w2,v#1)", "S(w1,v#2)", "S(w2,v#2)", "S(w1,v#3)", "S(w2,v#3)", "S(w1,v)",
        "S(w2,v)",
        // endpoint extras
        "E(u,t)", "F(w,v)",
    ])
}

/// The graph coded in the iterable-coding fixture: a triangle on
/// `{a, r, s}` with terminals `r`, `s`.
pub fn iterable_coding_graph() -> StGraph {
    StGraph::new(
        vec!["a".into(), "r".into(), "s".into()],
        vec![
            ("r".into(), "s".into()),
            ("a".into(), "r".into()),
            ("a".into(), "s".into()),
        ],
        "r",
        "s",
    )
    .expect("fixture graph")
}

/// The iterable coding of the triangle graph in [`m_iter`]: a u-element per
/// vertex and per edge, a v-element per incidence plus the terminal, twelve
/// covering copies plus the terminal attachment, copy facts everywhere, the
/// extra `t` only on `u@r` and the extra `w` only on the terminal.
pub fn iterable_coding_expected() -> Instance {
    let mut lines: Vec<String> = vec![
        // vertex-side covering copies
        "S(u@a,v@a~r@a)".into(),
        "S(u@r,v@a~r@r)".into(),
        "S(u@a,v@a~s@a)".into(),
        "S(u@s,v@a~s@s)".into(),
        "S(u@r,v@r~s@r)".into(),
        "S(u@s,v@r~s@s)".into(),
        // edge-side covering copies
        "S(u@a~r,v@a~r@a)".into(),
        "S(u@a~r,v@a~r@r)".into(),
        "S(u@a~s,v@a~s@a)".into(),
        "S(u@a~s,v@a~s@s)".into(),
        "S(u@r~s,v@r~s@r)".into(),
        "S(u@r~s,v@r~s@s)".into(),
        // terminal attachment and endpoint extras
        "S(u@s,v@term)".into(),
        "E(u@r,t)".into(),
        "F(w,v@term)".into(),
    ];
    for ue in ["u@a", "u@r", "u@s", "u@a~r", "u@a~s", "u@r~s"] {
        lines.push(alloc::format!("S({ue},t1)"));
        lines.push(alloc::format!("S({ue},t2)"));
    }
    for ve in ["v@a~r@a", "v@a~r@r", "v@a~s@a", "v@a~s@s", "v@r~s@r", "v@r~s@s", "v@term"] {
        lines.push(alloc::format!("S(w1,{ve})"));
        lines.push(alloc::format!("S(w2,{ve})"));
    }
    let refs: Vec<&str> = lines.iter().map(|s| s.as_str()).collect();
    inst(&refs)
}

/// The fine dissociation of [`m_iter`] with dashed facts excluded: chain
/// copies on `(u,v#1)` and `(u#1,v)`, copy facts mirrored onto the fresh
/// endpoints, extras untouched.
pub fn m_iter_fine_dissociation_expected() -> Instance {
    inst(&[
        "E(u,t)", "S(u,t1)", "S(u,t2)",
        "F(w,v)", "S(w1,v)", "S(w2,v)",
        "S(u,v#1)", "S(u#1,v)",
        "S(u#1,t1)", "S(u#1,t2)",
        "S(w1,v#1)", "S(w2,v#1)",
    ])
}

pub fn fine_dissociation_policy() -> DashedPolicy {
    DashedPolicy::Exclude
}

/// The explosion of [`m_iter`] with two middles: `u#1` plays the dangling
/// left endpoint, `v#1` the dangling right endpoint, and the middles
/// `u#2`, `u#3` carry one left copy element each.
pub fn m_iter_explosion_expected() -> Instance {
    inst(&[
        // original endpoints keep their facts
        "E(u,t)", "S(u,t1)", "S(u,t2)",
        "F(w,v)", "S(w1,v)", "S(w2,v)",
        // covering copies
        "S(u,v#1)", "S(u#1,v)", "S(u#2,v#1)", "S(u#3,v#1)", "S(u#2,v)", "S(u#3,v)",
        // the dangling left endpoint carries all left copy facts, the
        // middles one each
        "S(u#1,t1)", "S(u#1,t2)", "S(u#2,t1)", "S(u#3,t2)",
        // the dangling right endpoint carries the right copy facts
        "S(w1,v#1)", "S(w2,v#1)",
    ])
}

pub fn m_iter_explosion_k() -> usize {
    2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::analyze_edge;

    #[test]
    fn noniter_model_classifies_as_described() {
        let a = analyze_edge(&m_noniter(), &m_noniter_edge()).unwrap();
        assert_eq!(a.weight(), 1);
        assert!(a.is_clean());
        let copies_l: Vec<&str> = a.copies_left.keys().map(|e| e.as_str()).collect();
        let copies_r: Vec<&str> = a.copies_right.keys().map(|e| e.as_str()).collect();
        assert_eq!(copies_l, ["t1", "t2"]);
        assert_eq!(copies_r, ["w1", "w2"]);
        assert_eq!(a.extra_weight(), 4);
        let triangles: Vec<&str> = a.triangles.iter().map(|e| e.as_str()).collect();
        assert_eq!(triangles, ["x2"]);
    }

    #[test]
    fn iter_model_classifies_as_described() {
        let a = analyze_edge(&m_iter(), &m_iter_edge()).unwrap();
        assert_eq!(a.weight(), 1);
        assert!(a.is_clean());
        assert_eq!(a.lex_weight(), (2, 2));
        assert_eq!(a.extra_weight(), 2);
    }

    #[test]
    fn chosen_incident_facts_are_canonical_smallest() {
        let cm = cm_iter();
        assert_eq!(cm.f_left, crate::instance::fact("E", "u", "t"));
        assert_eq!(cm.f_right, crate::instance::fact("F", "w", "v"));
    }
}
