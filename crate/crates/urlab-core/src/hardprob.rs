//! The two weighted counting source problems, computed exactly by brute
//! force, plus the bipartite-graph ↔ instance correspondence.
//!
//! The first problem asks, on a bipartite graph, for the probability of
//! keeping an edge together with both incident vertices when `U`-vertices,
//! edges, and `V`-vertices survive independently with probabilities
//! `lambda`, `mu`, `nu`. The second asks, on an undirected graph with
//! terminals `r != s`, for the probability that the kept vertices and kept
//! edges contain an `r`–`s` path when vertices survive with probability
//! `phi` and edges with `eta`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::instance::{Fact, Instance};
use crate::query::Query;
use crate::reliability::{pqe, Probability, Tid};

/// Cap on `|V| + |E|` (and `|U| + |V| + |E|`) for the brute-force sums.
pub const GRAPH_CAP: usize = 26;

/// A bipartite graph `(U ∪ V, E)` with `E ⊆ U × V`. Vertex labels must be
/// unique across the two sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    u: Vec<String>,
    v: Vec<String>,
    edges: Vec<(usize, usize)>,
}

impl BipartiteGraph {
    pub fn new(
        u: Vec<String>,
        v: Vec<String>,
        edges: Vec<(String, String)>,
    ) -> Result<BipartiteGraph> {
        let u_set: BTreeSet<&String> = u.iter().collect();
        let v_set: BTreeSet<&String> = v.iter().collect();
        if u_set.len() != u.len() || v_set.len() != v.len() {
            return Err(Error::invalid("duplicate vertex label"));
        }
        if u_set.intersection(&v_set).next().is_some() {
            return Err(Error::invalid("U and V must be disjoint"));
        }
        let mut idx_edges = Vec::new();
        for (a, b) in edges {
            let i = u.iter().position(|x| *x == a)
                .ok_or_else(|| Error::invalid(format!("edge endpoint {a} not in U")))?;
            let j = v.iter().position(|x| *x == b)
                .ok_or_else(|| Error::invalid(format!("edge endpoint {b} not in V")))?;
            if !idx_edges.contains(&(i, j)) {
                idx_edges.push((i, j));
            }
        }
        Ok(BipartiteGraph { u, v, edges: idx_edges })
    }

    /// Index-based constructor used by enumeration loops.
    pub fn from_indices(nu: usize, nv: usize, edges: Vec<(usize, usize)>) -> Result<BipartiteGraph> {
        let u = (0..nu).map(|i| format!("u{i}")).collect();
        let v = (0..nv).map(|j| format!("v{j}")).collect();
        let b = BipartiteGraph { u, v, edges: Vec::new() };
        let mut dedup = Vec::new();
        for (i, j) in edges {
            if i >= nu || j >= nv {
                return Err(Error::invalid("edge index out of range"));
            }
            if !dedup.contains(&(i, j)) {
                dedup.push((i, j));
            }
        }
        Ok(BipartiteGraph { edges: dedup, ..b })
    }

    pub fn u_names(&self) -> &[String] {
        &self.u
    }

    pub fn v_names(&self) -> &[String] {
        &self.v
    }

    pub fn edge_names(&self) -> Vec<(String, String)> {
        self.edges.iter().map(|&(i, j)| (self.u[i].clone(), self.v[j].clone())).collect()
    }

    pub fn edge_indices(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn size(&self) -> usize {
        self.u.len() + self.v.len() + self.edges.len()
    }
}

/// An undirected graph with distinguished source and sink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StGraph {
    vertices: Vec<String>,
    edges: Vec<(usize, usize)>,
    r: usize,
    s: usize,
}

impl StGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<(String, String)>, r: &str, s: &str) -> Result<StGraph> {
        let set: BTreeSet<&String> = vertices.iter().collect();
        if set.len() != vertices.len() {
            return Err(Error::invalid("duplicate vertex label"));
        }
        let find = |name: &str| -> Result<usize> {
            vertices.iter().position(|x| x == name)
                .ok_or_else(|| Error::invalid(format!("vertex {name} not declared")))
        };
        let r = find(r)?;
        let s = find(s)?;
        if r == s {
            return Err(Error::invalid("source and sink must differ"));
        }
        let mut idx_edges: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            let i = find(&a)?;
            let j = find(&b)?;
            if i == j {
                return Err(Error::invalid(format!("self-loop on {a}")));
            }
            let e = (i.min(j), i.max(j));
            if !idx_edges.contains(&e) {
                idx_edges.push(e);
            }
        }
        Ok(StGraph { vertices, edges: idx_edges, r, s })
    }

    pub fn from_indices(n: usize, edges: Vec<(usize, usize)>, r: usize, s: usize) -> Result<StGraph> {
        let vertices = (0..n).map(|i| format!("x{i}")).collect();
        if r >= n || s >= n {
            return Err(Error::invalid("terminal index out of range"));
        }
        if r == s {
            return Err(Error::invalid("source and sink must differ"));
        }
        let mut idx_edges: Vec<(usize, usize)> = Vec::new();
        for (i, j) in edges {
            if i >= n || j >= n || i == j {
                return Err(Error::invalid("bad edge"));
            }
            let e = (i.min(j), i.max(j));
            if !idx_edges.contains(&e) {
                idx_edges.push(e);
            }
        }
        Ok(StGraph { vertices, edges: idx_edges, r, s })
    }

    /// Parses the edge-list text format: a header line `st <r> <s>`, then
    /// one `<u> <v>` edge per line. Vertices are the union of endpoints and
    /// the terminals; isolated non-terminal vertices need the JSON format.
    pub fn parse(text: &str) -> Result<StGraph> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (ln, header) = lines.next().ok_or_else(|| Error::Syntax {
            line: 1,
            pos: 0,
            msg: "empty graph file".to_string(),
        })?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 3 || parts[0] != "st" {
            return Err(Error::Syntax {
                line: ln + 1,
                pos: 0,
                msg: "expected header 'st <r> <s>'".to_string(),
            });
        }
        let (r, s) = (parts[1].to_string(), parts[2].to_string());
        let mut vertices: Vec<String> = vec![r.clone()];
        if !vertices.contains(&s) {
            vertices.push(s.clone());
        }
        let mut edges = Vec::new();
        for (ln, line) in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(Error::Syntax {
                    line: ln + 1,
                    pos: 0,
                    msg: "expected '<u> <v>' edge line".to_string(),
                });
            }
            for p in &parts {
                if !vertices.iter().any(|x| x == p) {
                    vertices.push(p.to_string());
                }
            }
            edges.push((parts[0].to_string(), parts[1].to_string()));
        }
        StGraph::new(vertices, edges, &r, &s)
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn edge_indices(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_names(&self) -> Vec<(String, String)> {
        self.edges.iter().map(|&(i, j)| (self.vertices[i].clone(), self.vertices[j].clone())).collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn r_index(&self) -> usize {
        self.r
    }

    pub fn s_index(&self) -> usize {
        self.s
    }

    pub fn r_name(&self) -> &str {
        &self.vertices[self.r]
    }

    pub fn s_name(&self) -> &str {
        &self.vertices[self.s]
    }

    pub fn terminals_adjacent(&self) -> bool {
        let e = (self.r.min(self.s), self.r.max(self.s));
        self.edges.contains(&e)
    }

    /// The brute force enumerates `2^|V|` vertex subsets, and for each the
    /// subsets of its induced edges when `eta < 1`. The cap bounds the
    /// enumerated bits: `|V|` alone when the edge side is certain.
    fn check_cap(&self, edges_enumerated: bool) -> Result<()> {
        let needed = if edges_enumerated {
            self.vertex_count() + self.edge_count()
        } else {
            self.vertex_count()
        };
        if needed > GRAPH_CAP {
            return Err(Error::CapExceeded { needed, cap: GRAPH_CAP });
        }
        Ok(())
    }

    /// Neighbor bitmasks over the full edge set.
    fn adjacency_masks(&self) -> Vec<u64> {
        let mut adj = vec![0u64; self.vertices.len()];
        for &(i, j) in &self.edges {
            adj[i] |= 1 << j;
            adj[j] |= 1 << i;
        }
        adj
    }
}

/// Bitmask BFS: whether `r` and `s` are connected inside `kept` using the
/// adjacency masks.
fn connected_in(adj: &[u64], kept: u64, r: usize, s: usize) -> bool {
    if kept >> r & 1 == 0 || kept >> s & 1 == 0 {
        return false;
    }
    let mut seen = 1u64 << r;
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0u64;
        let mut f = frontier;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= adj[v];
        }
        next &= kept & !seen;
        if next >> s & 1 == 1 {
            return true;
        }
        seen |= next;
        frontier = next;
    }
    false
}

fn powers(base: &BigRational, upto: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(upto + 1);
    out.push(BigRational::one());
    for k in 1..=upto {
        let next = &out[k - 1] * base;
        out.push(next);
    }
    out
}

fn validate_prob(name: &str, p: &Probability, hi_open: bool, strict: bool) -> Result<()> {
    if !strict {
        return Ok(());
    }
    if p.is_zero() || (hi_open && p.is_one()) {
        return Err(Error::invalid(format!(
            "{name}={p} outside the problem definition's range"
        )));
    }
    Ok(())
}

/// Exact `lambda,mu,nu`-probabilistic bipartite edge-cover probability: the
/// triple sum over `(U', E', V')` with `E' ∩ (U' × V') ≠ ∅`, each subset
/// weighted by its survival probability. Brute force over all subsets.
///
/// `strict` enforces the definition ranges `0 < lambda, nu < 1` and
/// `0 < mu <= 1`; boundary values are accepted when it is off.
pub fn pp2dnf_prob(
    lambda: &Probability,
    mu: &Probability,
    nu: &Probability,
    b: &BipartiteGraph,
    strict: bool,
) -> Result<Probability> {
    validate_prob("lambda", lambda, true, strict)?;
    validate_prob("nu", nu, true, strict)?;
    validate_prob("mu", mu, false, strict)?;
    if b.size() > GRAPH_CAP {
        return Err(Error::CapExceeded { needed: b.size(), cap: GRAPH_CAP });
    }
    let (nu_count, nv_count, ne) = (b.u.len(), b.v.len(), b.edges.len());
    let lam = lambda.as_ratio();
    let mu_r = mu.as_ratio();
    let nu_r = nu.as_ratio();
    let one = BigRational::one();
    let mut total = BigRational::zero();
    for us in 0u64..1 << nu_count {
        for vs in 0u64..1 << nv_count {
            for es in 0u64..1 << ne {
                let hit = b.edges.iter().enumerate().any(|(k, &(i, j))| {
                    es >> k & 1 == 1 && us >> i & 1 == 1 && vs >> j & 1 == 1
                });
                if !hit {
                    continue;
                }
                let mut w = BigRational::one();
                for i in 0..nu_count {
                    w *= if us >> i & 1 == 1 { lam.clone() } else { &one - lam };
                }
                for j in 0..nv_count {
                    w *= if vs >> j & 1 == 1 { nu_r.clone() } else { &one - nu_r };
                }
                for k in 0..ne {
                    w *= if es >> k & 1 == 1 { mu_r.clone() } else { &one - mu_r };
                }
                total += w;
            }
        }
    }
    Probability::new(total)
}

/// The signature-level view of a bipartite graph: `R`-facts on `U`-vertices,
/// `S`-facts on edges, `T`-facts on `V`-vertices, with the `R` and `T`
/// domains disjoint by construction.
pub fn bipartite_instance(b: &BipartiteGraph) -> Instance {
    let u_elem = |i: usize| format!("u@{}", b.u[i]);
    let v_elem = |j: usize| format!("v@{}", b.v[j]);
    let mut facts = Vec::new();
    for i in 0..b.u.len() {
        facts.push(Fact::new("R", u_elem(i), u_elem(i)));
    }
    for j in 0..b.v.len() {
        facts.push(Fact::new("T", v_elem(j), v_elem(j)));
    }
    for &(i, j) in &b.edges {
        facts.push(Fact::new("S", u_elem(i), v_elem(j)));
    }
    Instance::new(facts)
}

/// The query whose PQE over [`bipartite_instance`] realizes the bipartite
/// problem.
pub fn bipartite_query() -> Query {
    Query::parse("ucq: R(x,x),S(x,y),T(y,y)").expect("fixed query parses")
}

/// Computes the bipartite problem through the PQE route: build the
/// instance, attach `lambda`/`mu`/`nu` per relation, and evaluate the query
/// probability. Must agree exactly with [`pp2dnf_prob`].
pub fn pp2dnf_as_pqe(
    lambda: &Probability,
    mu: &Probability,
    nu: &Probability,
    b: &BipartiteGraph,
    strict: bool,
) -> Result<Probability> {
    validate_prob("lambda", lambda, true, strict)?;
    validate_prob("nu", nu, true, strict)?;
    validate_prob("mu", mu, false, strict)?;
    if b.size() > GRAPH_CAP {
        return Err(Error::CapExceeded { needed: b.size(), cap: GRAPH_CAP });
    }
    let inst = bipartite_instance(b);
    let pi = inst
        .facts()
        .map(|f| {
            let p = match f.rel.as_str() {
                "R" => lambda.clone(),
                "T" => nu.clone(),
                _ => mu.clone(),
            };
            (f.clone(), p)
        })
        .collect();
    let tid = Tid::new(inst, pi)?;
    pqe(&bipartite_query(), &tid, GRAPH_CAP)
}

/// Small union-find for per-subset connectivity.
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Exact `phi,eta`-vertex-edge probabilistic source-sink connectivity: the
/// sum over vertex subsets `V'` and edge subsets `E'` such that `r` and `s`
/// are connected in `(V', E'|V')`, weighted by survival probabilities.
///
/// Vertex subsets are enumerated in the outer loop; for each, edge subsets
/// of the induced subgraph are enumerated with union-find connectivity, and
/// edges leaving `V'` are summed out. When `eta = 1` only the vertex side
/// varies, so subsets are counted by cardinality and weighted once.
/// `strict` enforces the definition ranges `0 < phi <= 1`, `0 < eta < 1`.
pub fn ustcon_prob(phi: &Probability, eta: &Probability, g: &StGraph, strict: bool) -> Result<Probability> {
    validate_prob("phi", phi, false, strict)?;
    validate_prob("eta", eta, true, strict)?;
    g.check_cap(!eta.is_one())?;
    let n = g.vertex_count();
    let inner: Vec<usize> = (0..n).filter(|&i| i != g.r && i != g.s).collect();
    let adj = g.adjacency_masks();
    let terminals = (1u64 << g.r) | (1u64 << g.s);
    let phi_pow = powers(phi.as_ratio(), n);
    let phi_not_pow = powers(&(BigRational::one() - phi.as_ratio()), n);

    if eta.is_one() {
        // Count good vertex subsets by cardinality, then weight once.
        let mut by_card = vec![0u64; n + 1];
        for mask in 0u64..1 << inner.len() {
            let mut kept = terminals;
            let mut m = mask;
            while m != 0 {
                let k = m.trailing_zeros() as usize;
                m &= m - 1;
                kept |= 1 << inner[k];
            }
            if connected_in(&adj, kept, g.r, g.s) {
                by_card[kept.count_ones() as usize] += 1;
            }
        }
        let mut total = BigRational::zero();
        for (k, count) in by_card.iter().enumerate() {
            if *count == 0 {
                continue;
            }
            total += BigRational::from_integer(BigInt::from(*count)) * &phi_pow[k] * &phi_not_pow[n - k];
        }
        return Probability::new(total);
    }

    let eta_pow = powers(eta.as_ratio(), g.edges.len());
    let eta_not_pow = powers(&(BigRational::one() - eta.as_ratio()), g.edges.len());
    let mut total = BigRational::zero();
    for mask in 0u64..1 << inner.len() {
        let mut kept = terminals;
        let mut m = mask;
        while m != 0 {
            let k = m.trailing_zeros() as usize;
            m &= m - 1;
            kept |= 1 << inner[k];
        }
        let kept_count = kept.count_ones() as usize;
        let vertex_weight = &phi_pow[kept_count] * &phi_not_pow[n - kept_count];
        let induced: Vec<(usize, usize)> = g
            .edges
            .iter()
            .copied()
            .filter(|&(i, j)| kept >> i & 1 == 1 && kept >> j & 1 == 1)
            .collect();
        let m_in = induced.len();
        // Count connecting induced-edge subsets by cardinality; edges
        // outside the induced subgraph sum to 1.
        let mut by_card = vec![0u64; m_in + 1];
        for es in 0u64..1 << m_in {
            let mut uf = UnionFind::new(n);
            for (k, &(i, j)) in induced.iter().enumerate() {
                if es >> k & 1 == 1 {
                    uf.union(i, j);
                }
            }
            if uf.find(g.r) == uf.find(g.s) {
                by_card[es.count_ones() as usize] += 1;
            }
        }
        let mut edge_prob = BigRational::zero();
        for (k, count) in by_card.iter().enumerate() {
            if *count == 0 {
                continue;
            }
            edge_prob +=
                BigRational::from_integer(BigInt::from(*count)) * &eta_pow[k] * &eta_not_pow[m_in - k];
        }
        total += vertex_weight * edge_prob;
    }
    Probability::new(total)
}

/// Good-subset count used by the node-connectedness reduction: the number
/// of subsets `V' ⊆ V \ {r,s}` whose induced subgraph together with `r`
/// and `s` connects the terminals. Direct enumeration.
pub fn count_good_vertex_subsets(g: &StGraph) -> Result<num_bigint::BigUint> {
    g.check_cap(false)?;
    let n = g.vertex_count();
    let inner: Vec<usize> = (0..n).filter(|&i| i != g.r && i != g.s).collect();
    let mut count = num_bigint::BigUint::zero();
    for mask in 0u64..1 << inner.len() {
        let mut kept = vec![false; n];
        kept[g.r] = true;
        kept[g.s] = true;
        for (k, &i) in inner.iter().enumerate() {
            if mask >> k & 1 == 1 {
                kept[i] = true;
            }
        }
        let mut uf = UnionFind::new(n);
        for &(i, j) in &g.edges {
            if kept[i] && kept[j] {
                uf.union(i, j);
            }
        }
        if uf.find(g.r) == uf.find(g.s) {
            count += 1u32;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Probability {
        Probability::parse(s).unwrap()
    }

    #[test]
    fn pp2dnf_single_edge_is_product() {
        let b = BipartiteGraph::from_indices(1, 1, vec![(0, 0)]).unwrap();
        let (l, m, n) = (p("1/2"), p("1/3"), p("2/5"));
        let got = pp2dnf_prob(&l, &m, &n, &b, true).unwrap();
        let expect = l.as_ratio() * m.as_ratio() * n.as_ratio();
        assert_eq!(got.as_ratio(), &expect);
    }

    #[test]
    fn pp2dnf_disjoint_edges_independence() {
        let b = BipartiteGraph::from_indices(2, 2, vec![(0, 0), (1, 1)]).unwrap();
        let (l, m, n) = (p("1/2"), p("1/2"), p("1/2"));
        let got = pp2dnf_prob(&l, &m, &n, &b, true).unwrap();
        // 1 - (1 - lmn)^2 by independence across vertex-disjoint components.
        let lmn = l.as_ratio() * m.as_ratio() * n.as_ratio();
        let one = BigRational::one();
        let expect = &one - (&one - &lmn) * (&one - &lmn);
        assert_eq!(got.as_ratio(), &expect);
    }

    #[test]
    fn pp2dnf_shared_v_vertex() {
        let b = BipartiteGraph::from_indices(2, 1, vec![(0, 0), (1, 0)]).unwrap();
        let (l, m, n) = (p("1/3"), p("1/2"), p("2/3"));
        let got = pp2dnf_prob(&l, &m, &n, &b, true).unwrap();
        // Condition on the shared V-vertex: nu * (1 - (1 - lm)^2).
        let lm = l.as_ratio() * m.as_ratio();
        let one = BigRational::one();
        let expect = n.as_ratio() * (&one - (&one - &lm) * (&one - &lm));
        assert_eq!(got.as_ratio(), &expect);
    }

    #[test]
    fn pp2dnf_as_pqe_matches_direct_on_single_edge() {
        let b = BipartiteGraph::from_indices(1, 1, vec![(0, 0)]).unwrap();
        let (l, m, n) = (p("1/2"), p("1/2"), p("1/2"));
        assert_eq!(
            pp2dnf_as_pqe(&l, &m, &n, &b, true).unwrap(),
            pp2dnf_prob(&l, &m, &n, &b, true).unwrap()
        );
    }

    #[test]
    fn pp2dnf_as_pqe_empty_edges_is_zero() {
        let b = BipartiteGraph::from_indices(2, 2, vec![]).unwrap();
        let (l, m, n) = (p("1/2"), p("1/2"), p("1/2"));
        assert!(pp2dnf_as_pqe(&l, &m, &n, &b, true).unwrap().is_zero());
    }

    #[test]
    fn ustcon_single_edge() {
        let g = StGraph::from_indices(2, vec![(0, 1)], 0, 1).unwrap();
        let got = ustcon_prob(&p("1/2"), &p("1/3"), &g, true).unwrap();
        // phi^2 * eta
        assert_eq!(got, p("1/12"));
    }

    #[test]
    fn ustcon_path_of_two_edges() {
        let g = StGraph::from_indices(3, vec![(0, 2), (2, 1)], 0, 1).unwrap();
        let got = ustcon_prob(&p("1/2"), &p("1/2"), &g, true).unwrap();
        // phi^3 * eta^2
        assert_eq!(got, p("1/32"));
    }

    #[test]
    fn ustcon_triangle_at_full_vertices_matches_edge_reliability() {
        // phi = 1 collapses the vertex factor; eta = 1/2 is the classic
        // two-terminal reliability: P(rs or (ra and as)) = 1/2 + 1/2 * 1/4.
        let g = StGraph::from_indices(3, vec![(0, 1), (0, 2), (1, 2)], 0, 1).unwrap();
        let got = ustcon_prob(&p("1"), &p("1/2"), &g, false).unwrap();
        assert_eq!(got, p("5/8"));
    }

    #[test]
    fn ustcon_eta_one_depends_only_on_vertices() {
        let g = StGraph::from_indices(3, vec![(0, 2), (2, 1)], 0, 1).unwrap();
        let got = ustcon_prob(&p("1/2"), &p("1"), &g, false).unwrap();
        // r,s kept (1/4) and the middle vertex kept (1/2).
        assert_eq!(got, p("1/8"));
    }

    #[test]
    fn ustcon_monotone_in_probabilities_and_edges() {
        let g = StGraph::from_indices(3, vec![(0, 2), (2, 1)], 0, 1).unwrap();
        let base = ustcon_prob(&p("1/2"), &p("1/2"), &g, true).unwrap();
        let more_phi = ustcon_prob(&p("2/3"), &p("1/2"), &g, true).unwrap();
        let more_eta = ustcon_prob(&p("1/2"), &p("2/3"), &g, true).unwrap();
        assert!(more_phi >= base && more_eta >= base);
        let denser = StGraph::from_indices(3, vec![(0, 2), (2, 1), (0, 1)], 0, 1).unwrap();
        let with_edge = ustcon_prob(&p("1/2"), &p("1/2"), &denser, true).unwrap();
        assert!(with_edge >= base);
    }

    #[test]
    fn strict_ranges_enforced() {
        let g = StGraph::from_indices(2, vec![(0, 1)], 0, 1).unwrap();
        assert!(ustcon_prob(&p("1/2"), &p("1"), &g, true).is_err());
        assert!(ustcon_prob(&p("1/2"), &p("1"), &g, false).is_ok());
        let b = BipartiteGraph::from_indices(1, 1, vec![(0, 0)]).unwrap();
        assert!(pp2dnf_prob(&p("1"), &p("1/2"), &p("1/2"), &b, true).is_err());
        assert!(pp2dnf_prob(&p("1"), &p("1/2"), &p("1/2"), &b, false).is_ok());
    }

    #[test]
    fn graph_text_parse() {
        let g = StGraph::parse("st r s\nr a\na s\n").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.r_name(), "r");
        assert_eq!(g.s_name(), "s");
        assert!(!g.terminals_adjacent());
    }

    #[test]
    fn good_subset_count_on_path() {
        let g = StGraph::parse("st r s\nr a\na s\n").unwrap();
        assert_eq!(count_good_vertex_subsets(&g).unwrap(), 1u32.into());
    }
}
