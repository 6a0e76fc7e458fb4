//! Property tests for the module invariants: monotonicity, homomorphism
//! closure, enumeration bijectivity, exactness identities, and cache
//! transparency.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use urlab_core::instance::{Edge, Elem, Fact, Instance};
use urlab_core::query::{Matcher, Query};
use urlab_core::reliability::{pow2_rational, pqe, ur_count, MaskCache, Probability, Tid};
use urlab_core::structure::dissociate;

const RELS: [&str; 4] = ["R", "S", "S'", "T"];
const ELEMS: [&str; 5] = ["a", "b", "c", "d", "e"];

fn arb_instance(max_facts: usize) -> impl Strategy<Value = Instance> {
    proptest::collection::vec((0..RELS.len(), 0..ELEMS.len(), 0..ELEMS.len()), 0..=max_facts)
        .prop_map(|triples| {
            Instance::new(
                triples
                    .into_iter()
                    .map(|(r, a, b)| Fact::new(RELS[r], ELEMS[a], ELEMS[b])),
            )
        })
}

fn arb_query() -> impl Strategy<Value = Query> {
    prop_oneof![
        Just(Query::parse("ucq: R(x,x),S(x,y),T(y,y)").unwrap()),
        Just(Query::parse("ucq: R(x,x),S(x,y),S'(x,y),T(y,y)").unwrap()),
        Just(Query::parse("ucq: R(x,x),S(x,y) | S(x,y),T(y,y)").unwrap()),
        Just(Query::parse("rpq: R . S* . T").unwrap()),
        Just(Query::parse("rpq[2way]: R . S* . T").unwrap()),
        Just(Query::parse("rpq[2way]: R . (S | S')+ . T").unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Monotonicity: a satisfied subset implies a satisfied superset.
    #[test]
    fn evaluation_is_monotone(inst in arb_instance(10), q in arb_query(), mask: u64) {
        let subs = inst.subinstances(24).unwrap();
        let sub = subs.get(mask % subs.count());
        if q.evaluate(&sub) {
            prop_assert!(q.evaluate(&inst));
        }
    }

    /// Homomorphism closure: satisfaction transfers along any found witness.
    #[test]
    fn satisfaction_closed_under_homomorphisms(
        src in arb_instance(6),
        dst in arb_instance(8),
        q in arb_query(),
    ) {
        if let Some(h) = src.find_homomorphism(&dst) {
            prop_assert!(h.is_valid(&src, &dst));
            if q.evaluate(&src) {
                prop_assert!(q.evaluate(&dst));
            }
        }
    }

    /// The subset enumerator yields exactly 2^n distinct subsets whose
    /// union is the instance.
    #[test]
    fn subinstance_enumeration_is_bijective(inst in arb_instance(8)) {
        let subs = inst.subinstances(24).unwrap();
        let mut seen = BTreeSet::new();
        let mut union = Instance::empty();
        for (_, sub) in subs.iter() {
            union = union.union(&sub);
            prop_assert!(seen.insert(sub.to_text()));
        }
        prop_assert_eq!(seen.len() as u64, subs.count());
        prop_assert_eq!(union, inst);
    }

    /// Identity homomorphism always exists.
    #[test]
    fn identity_homomorphism(inst in arb_instance(8)) {
        let h = inst.find_homomorphism(&inst);
        prop_assert!(h.is_some());
        prop_assert!(h.unwrap().is_valid(&inst, &inst));
    }

    /// Both orientations of an edge report the same covering facts.
    #[test]
    fn edge_orientations_share_covering(inst in arb_instance(10)) {
        for info in inst.edges() {
            let forward = inst.covering(&info.edge.left, &info.edge.right);
            let backward = inst.covering(&info.edge.right, &info.edge.left);
            prop_assert_eq!(&forward, &backward);
            prop_assert_eq!(&forward, &info.covering);
        }
    }

    /// Dissociating any ordered pair of domain elements maps back.
    #[test]
    fn dissociation_maps_back(inst in arb_instance(10), i: usize, j: usize) {
        let dom: Vec<Elem> = inst.dom().into_iter().collect();
        if dom.len() >= 2 {
            let u = dom[i % dom.len()].clone();
            let v = dom[j % dom.len()].clone();
            if u != v {
                let d = dissociate(&inst, &u, &v).unwrap();
                prop_assert!(d.find_homomorphism(&inst).is_some());
            }
        }
    }

    /// Copying an edge onto a fresh pair maps back.
    #[test]
    fn copy_edge_maps_back(inst in arb_instance(10)) {
        if let Some(info) = inst.edges().into_iter().next() {
            let mut reserved = BTreeSet::new();
            let fu = inst.fresh_element(&info.edge.left, &mut reserved);
            let fv = inst.fresh_element(&info.edge.right, &mut reserved);
            let copied = inst.copy_edge(&info.edge, (&fu, &fv)).unwrap();
            prop_assert!(copied.find_homomorphism(&inst).is_some());
        }
    }

    /// The renormalization identity holds exactly on random instances.
    #[test]
    fn renormalization_identity(inst in arb_instance(12), q in arb_query()) {
        let ur = ur_count(&q, &inst, 24).unwrap();
        let p = pqe(&q, &Tid::uniform(inst.clone(), Probability::half()), 24).unwrap();
        prop_assert_eq!(
            p.as_ratio() * pow2_rational(inst.len()),
            BigRational::from_integer(BigInt::from(ur))
        );
    }

    /// Raising one fact's probability never lowers the query probability.
    #[test]
    fn pqe_is_monotone_per_fact(inst in arb_instance(8), q in arb_query(), pick: usize) {
        if !inst.is_empty() {
            let facts = inst.fact_vec();
            let f = &facts[pick % facts.len()];
            let lo = Tid::uniform(inst.clone(), Probability::from_ratio(1, 3).unwrap());
            let hi = lo.with_prob(f, Probability::from_ratio(2, 3).unwrap()).unwrap();
            prop_assert!(pqe(&q, &lo, 24).unwrap() <= pqe(&q, &hi, 24).unwrap());
        }
    }

    /// All-certain probabilities reduce PQE to plain evaluation.
    #[test]
    fn pqe_with_certain_facts_is_evaluation(inst in arb_instance(8), q in arb_query()) {
        let tid = Tid::uniform(inst.clone(), Probability::one());
        let p = pqe(&q, &tid, 24).unwrap();
        prop_assert_eq!(p.is_one(), q.evaluate(&inst));
        prop_assert!(p.is_one() || p.is_zero());
    }

    /// Two-way path satisfaction is invariant under reversing any fact.
    #[test]
    fn two_way_rpq_ignores_fact_orientation(inst in arb_instance(10), pick: usize) {
        let q = Query::parse("rpq[2way]: R . (S | S')* . T").unwrap();
        if !inst.is_empty() {
            let facts = inst.fact_vec();
            let f = &facts[pick % facts.len()];
            let flipped = inst.without(f).with(Fact::new(
                f.rel.as_str(),
                f.object.as_str(),
                f.subject.as_str(),
            ));
            prop_assert_eq!(q.evaluate(&inst), q.evaluate(&flipped));
        }
    }

    /// The monotone mask cache never changes results.
    #[test]
    fn mask_cache_is_transparent(inst in arb_instance(8), q in arb_query()) {
        let matcher = Matcher::compile(&q, &inst);
        let mut cache = MaskCache::new();
        for mask in 0..(1u64 << inst.len()) {
            prop_assert_eq!(cache.eval(&matcher, mask), matcher.eval_mask(mask));
        }
    }

    /// Tightness is orientation-independent (the dissociation is the same
    /// instance either way).
    #[test]
    fn dissociation_is_orientation_symmetric(inst in arb_instance(10)) {
        for info in inst.edges() {
            let forward = dissociate(&inst, &info.edge.left, &info.edge.right).unwrap();
            let backward = dissociate(&inst, &info.edge.right, &info.edge.left).unwrap();
            prop_assert_eq!(forward, backward);
        }
    }

    /// Edge analysis partitions the incident facts on each side.
    #[test]
    fn analysis_partitions_incidents(inst in arb_instance(10)) {
        for info in inst.edges() {
            let a = urlab_core::structure::analyze_edge(&inst, &info.edge).unwrap();
            let left = inst.incident_side(&info.edge.left, &info.edge.right);
            let right = inst.incident_side(&info.edge.right, &info.edge.left);
            prop_assert_eq!(
                a.garbage_left.len() + a.copy_facts_left().len() + a.extras_left.len(),
                left.len()
            );
            prop_assert_eq!(
                a.garbage_right.len() + a.copy_facts_right().len() + a.extras_right.len(),
                right.len()
            );
            prop_assert_eq!(a.incident_left(), left);
            prop_assert_eq!(a.incident_right(), right);
        }
    }
}

#[test]
fn edge_requires_distinct_endpoints() {
    assert!(Edge::new("a", "a").is_err());
}
