//! Executable reduction pipelines: vertex-copying with Vandermonde
//! interpolation, and parallel-paths saturation with rounding recovery.
//!
//! Both pipelines drive a connectivity oracle on transformed graphs and
//! recover exact integer answers from exact rational oracle values. Oracle
//! answers are injected as values so the pipelines run against brute-force,
//! collapsed, or externally supplied answers interchangeably.

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::hardprob::{ustcon_prob, StGraph};
use crate::reliability::Probability;

/// Where an oracle answer came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    BruteForce,
    Collapsed,
    External,
}

/// An exact oracle answer with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleAnswer {
    pub value: Probability,
    pub provenance: Provenance,
}

/// Good-subset counts indexed by cardinality `0..=n-2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountVector(pub Vec<BigUint>);

impl CountVector {
    pub fn total(&self) -> BigUint {
        let mut acc = BigUint::zero();
        for x in &self.0 {
            acc += x;
        }
        acc
    }
}

/// Replaces each inner vertex (everything except the terminals) by `q`
/// mutually non-adjacent copies: inner-inner edges become `q*q` edges and
/// edges touching a terminal become `q` edges. Requires non-adjacent
/// terminals.
pub fn build_vertex_copies(g: &StGraph, q: usize) -> Result<StGraph> {
    if q == 0 {
        return Err(Error::invalid("q must be positive"));
    }
    if g.terminals_adjacent() {
        return Err(Error::invalid("terminals must not be adjacent"));
    }
    let names = g.vertex_names();
    let r = g.r_name().to_owned();
    let s = g.s_name().to_owned();
    let is_terminal = |i: usize| i == g.r_index() || i == g.s_index();
    let copy_name = |i: usize, k: usize| format!("{}@{}", names[i], k + 1);

    let mut vertices: Vec<String> = vec![r.clone(), s.clone()];
    for i in 0..names.len() {
        if !is_terminal(i) {
            for k in 0..q {
                vertices.push(copy_name(i, k));
            }
        }
    }
    let mut edges: Vec<(String, String)> = Vec::new();
    for &(i, j) in g.edge_indices() {
        match (is_terminal(i), is_terminal(j)) {
            (true, true) => unreachable!("terminals are not adjacent"),
            (true, false) => {
                for k in 0..q {
                    edges.push((names[i].clone(), copy_name(j, k)));
                }
            }
            (false, true) => {
                for k in 0..q {
                    edges.push((copy_name(i, k), names[j].clone()));
                }
            }
            (false, false) => {
                for k in 0..q {
                    for l in 0..q {
                        edges.push((copy_name(i, k), copy_name(j, l)));
                    }
                }
            }
        }
    }
    StGraph::new(vertices, edges, &r, &s)
}

/// Solves the square system `M x = y` exactly by Gaussian elimination.
/// Errors on singular matrices.
pub fn solve_exact(mut m: Vec<Vec<BigRational>>, mut y: Vec<BigRational>) -> Result<Vec<BigRational>> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) || y.len() != n {
        return Err(Error::invalid("system must be square"));
    }
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .ok_or_else(|| Error::assertion("singular linear system"))?;
        m.swap(col, pivot);
        y.swap(col, pivot);
        let p = m[col][col].clone();
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &p;
            for c in col..n {
                let sub = &factor * &m[col][c];
                m[r][c] -= sub;
            }
            let sub = &factor * &y[col];
            y[r] -= sub;
        }
    }
    Ok((0..n).map(|i| &y[i] / &m[i][i]).collect())
}

/// The interpolation node positions: `alpha(q) = 1/(1-phi)^q - 1`, the
/// kept/not-kept odds of a vertex with `q` copies. Strictly increasing in
/// `q`, hence pairwise distinct and the Vandermonde matrix is invertible.
pub fn alpha_node(phi: &Probability, q: usize) -> BigRational {
    let beta = not_kept_prob(phi, q);
    BigRational::one() / beta - BigRational::one()
}

/// `(1-phi)^q`: the probability that none of a vertex's `q` copies is kept.
fn not_kept_prob(phi: &Probability, q: usize) -> BigRational {
    let mut acc = BigRational::one();
    let base = BigRational::one() - phi.as_ratio();
    for _ in 0..q {
        acc *= &base;
    }
    acc
}

/// Recovers the per-cardinality good-subset counts from conditioned oracle
/// answers `P[q-1]` for `q = 1..n-1` on the vertex-copied graphs: divides
/// each answer by the normalization factor `((1-phi)^q)^(n-2)`, then solves
/// the Vandermonde system at the nodes `alpha(q)`.
///
/// The answers must already be conditioned on both terminals being present
/// (the pipeline divides raw oracle values by `phi^2`).
pub fn interpolate_node_counts(
    phi: &Probability,
    answers: &[OracleAnswer],
    n: usize,
) -> Result<CountVector> {
    if phi.is_zero() || phi.is_one() {
        return Err(Error::invalid("interpolation requires 0 < phi < 1"));
    }
    if n < 2 || answers.len() != n - 1 {
        return Err(Error::invalid(format!(
            "need n-1 = {} oracle answers, got {}",
            n.saturating_sub(1),
            answers.len()
        )));
    }
    let dim = n - 1; // unknowns X_0..X_{n-2}
    let mut matrix = Vec::with_capacity(dim);
    let mut rhs = Vec::with_capacity(dim);
    for q in 1..=dim {
        let beta = not_kept_prob(phi, q);
        let mut norm = BigRational::one();
        for _ in 0..n - 2 {
            norm *= &beta;
        }
        rhs.push(answers[q - 1].value.as_ratio() / &norm);
        let alpha = alpha_node(phi, q);
        let mut row = Vec::with_capacity(dim);
        let mut pow = BigRational::one();
        for _ in 0..dim {
            row.push(pow.clone());
            pow *= &alpha;
        }
        matrix.push(row);
    }
    let solution = solve_exact(matrix, rhs)?;
    let mut counts = Vec::with_capacity(dim);
    for (i, x) in solution.into_iter().enumerate() {
        if !x.is_integer() || x.is_negative() {
            return Err(Error::assertion(format!(
                "interpolated count X_{i} = {x} is not a non-negative integer"
            )));
        }
        counts.push(x.to_integer().to_biguint().expect("non-negative"));
    }
    Ok(CountVector(counts))
}

/// Forward evaluation of the interpolation model: the conditioned oracle
/// answer on the `q`-copied graph implied by a count vector. The inverse of
/// [`interpolate_node_counts`], used for round-trip validation.
pub fn evaluate_node_counts(phi: &Probability, counts: &CountVector, n: usize, q: usize) -> BigRational {
    let beta = not_kept_prob(phi, q);
    let kept = BigRational::one() - &beta;
    let mut total = BigRational::zero();
    for (i, x) in counts.0.iter().enumerate() {
        let mut term = BigRational::from_integer(BigInt::from(x.clone()));
        for _ in 0..i {
            term *= &kept;
        }
        for _ in 0..(n - 2 - i) {
            term *= &beta;
        }
        total += term;
    }
    total
}

/// Report of one node-connectedness pipeline run.
#[derive(Debug, Clone)]
pub struct NodePipelineReport {
    /// Number of good vertex subsets (terminals conditioned present).
    pub count: BigUint,
    pub counts_by_cardinality: CountVector,
    /// Raw oracle values per `q = 1..n-1`.
    pub oracle_values: Vec<OracleAnswer>,
}

/// Full vertex-copying reduction: builds the copied graph for each
/// `q = 1..n-1`, queries the `(phi, 1)` connectivity oracle, conditions on
/// the terminals (dividing by `phi^2`), interpolates the count vector, and
/// returns the total number of good vertex subsets.
pub fn node_connectedness_pipeline(
    g: &StGraph,
    phi: &Probability,
    oracle: &mut dyn FnMut(&StGraph) -> Result<OracleAnswer>,
) -> Result<NodePipelineReport> {
    if phi.is_zero() || phi.is_one() {
        return Err(Error::invalid("pipeline requires 0 < phi < 1"));
    }
    if g.terminals_adjacent() {
        return Err(Error::invalid("terminals must not be adjacent"));
    }
    let n = g.vertex_count();
    if n == 2 {
        // No inner vertices: non-adjacent terminals are never connected.
        return Ok(NodePipelineReport {
            count: BigUint::zero(),
            counts_by_cardinality: CountVector(vec![BigUint::zero()]),
            oracle_values: Vec::new(),
        });
    }
    let phi2 = phi.as_ratio() * phi.as_ratio();
    let mut raw = Vec::new();
    let mut conditioned = Vec::new();
    for q in 1..n {
        let gq = build_vertex_copies(g, q)?;
        let ans = oracle(&gq)?;
        raw.push(ans.clone());
        conditioned.push(OracleAnswer {
            value: Probability::new(ans.value.as_ratio() / &phi2)?,
            provenance: ans.provenance,
        });
    }
    let counts = interpolate_node_counts(phi, &conditioned, n)?;
    if g.edge_indices().is_empty() || !counts.0[0].is_zero() {
        // X_0 = 0 whenever the terminals are non-adjacent.
        if !counts.0[0].is_zero() {
            return Err(Error::assertion("X_0 must be zero for non-adjacent terminals"));
        }
    }
    Ok(NodePipelineReport {
        count: counts.total(),
        counts_by_cardinality: counts,
        oracle_values: raw,
    })
}

/// Brute-force `(phi, 1)` oracle over [`ustcon_prob`].
pub fn brute_force_phi1_oracle(phi: &Probability) -> impl FnMut(&StGraph) -> Result<OracleAnswer> + '_ {
    move |g| {
        Ok(OracleAnswer {
            value: ustcon_prob(phi, &Probability::one(), g, false)?,
            provenance: Provenance::BruteForce,
        })
    }
}

/// The smallest integer `q` strictly above the saturation threshold
/// `(ln(chi) - ln(eps)) / (-ln(1-zeta))`, decided by exact rational
/// comparison: `q` is past the threshold iff `(1-zeta)^q < eps/chi`. The
/// lemma bound `1 - (1 - (1-zeta)^q)^chi < eps` is re-verified exactly.
pub fn saturation_parameter(zeta: &Probability, eps: &Probability, chi: usize) -> Result<usize> {
    if zeta.is_zero() || zeta.is_one() {
        return Err(Error::invalid("saturation requires 0 < zeta < 1"));
    }
    if eps.is_zero() || eps.is_one() {
        return Err(Error::invalid("saturation requires 0 < eps < 1"));
    }
    if chi == 0 {
        return Err(Error::invalid("chi must be at least 1"));
    }
    let target = eps.as_ratio() / BigRational::from_integer(BigInt::from(chi));
    let base = BigRational::one() - zeta.as_ratio();
    let mut power = base.clone();
    let mut q = 1usize;
    while power >= target {
        power *= &base;
        q += 1;
        if q > 1_000_000 {
            return Err(Error::assertion("saturation parameter exceeded 1e6"));
        }
    }
    let bound = lemma_bound(zeta, q, chi);
    if &bound >= eps.as_ratio() {
        return Err(Error::assertion(format!(
            "lemma bound violated at q={q}: {bound} >= {eps}"
        )));
    }
    Ok(q)
}

/// Exact value of `1 - (1 - (1-zeta)^q)^chi`.
pub fn lemma_bound(zeta: &Probability, q: usize, chi: usize) -> BigRational {
    let base = BigRational::one() - zeta.as_ratio();
    let mut pow_q = BigRational::one();
    for _ in 0..q {
        pow_q *= &base;
    }
    let inner = BigRational::one() - pow_q;
    let mut pow_chi = BigRational::one();
    for _ in 0..chi {
        pow_chi *= &inner;
    }
    BigRational::one() - pow_chi
}

/// Intermediate vertices introduced per original edge index.
pub type PathRegistry = Vec<(usize, Vec<String>)>;

/// Replaces each edge `{u,v}` by `q` parallel length-2 paths through fresh
/// intermediate vertices. Returns the transformed graph and the registry of
/// intermediates per original edge.
pub fn build_parallel_paths(g: &StGraph, q: usize) -> Result<(StGraph, PathRegistry)> {
    if q == 0 {
        return Err(Error::invalid("q must be positive"));
    }
    let names = g.vertex_names();
    let mut vertices: Vec<String> = names.to_vec();
    let mut edges: Vec<(String, String)> = Vec::new();
    let mut registry = Vec::new();
    for (k, &(i, j)) in g.edge_indices().iter().enumerate() {
        let mut mids = Vec::new();
        for p in 1..=q {
            let w = format!("w@{}~{}@{p}", names[i], names[j]);
            vertices.push(w.clone());
            edges.push((names[i].clone(), w.clone()));
            edges.push((w.clone(), names[j].clone()));
            mids.push(w);
        }
        registry.push((k, mids));
    }
    let g2 = StGraph::new(vertices, edges, g.r_name(), g.s_name())?;
    Ok((g2, registry))
}

/// Exact connectivity probability on the parallel-paths graph, computed on
/// the base graph: each original edge is realized independently iff one of
/// its `q` length-2 paths survives intact, with probability
/// `1 - (1 - phi*eta^2)^q`, so the value equals `ustcon_prob` on the base
/// graph at that edge probability.
pub fn collapsed_ustcon_oracle(
    g: &StGraph,
    phi: &Probability,
    eta: &Probability,
    q: usize,
) -> Result<OracleAnswer> {
    if q == 0 {
        return Err(Error::invalid("q must be positive"));
    }
    let zeta = phi.as_ratio() * eta.as_ratio() * eta.as_ratio();
    let base = BigRational::one() - zeta;
    let mut pow = BigRational::one();
    for _ in 0..q {
        pow *= &base;
    }
    let rho = Probability::new(BigRational::one() - pow)?;
    Ok(OracleAnswer {
        value: ustcon_prob(phi, &rho, g, false)?,
        provenance: Provenance::Collapsed,
    })
}

/// Oracle selection for the saturation pipeline.
pub enum SaturationOracle {
    /// Collapse the parallel-paths structure onto the base graph (exact).
    Collapsed,
    /// Enumerate the transformed graph directly; only feasible for tiny `q`.
    BruteForce,
    /// An externally supplied answer for the transformed graph.
    External(Probability),
}

/// Report of one saturation pipeline run.
#[derive(Debug, Clone)]
pub struct SaturationReport {
    /// The recovered integer `Z` with `Y = Z / b^n`.
    pub z: BigInt,
    pub q: usize,
    pub epsilon: BigRational,
    pub epsilon_prime: BigRational,
    pub oracle: OracleAnswer,
    /// Number of vertices of the base graph.
    pub n: usize,
    /// Denominator of `phi` in lowest terms.
    pub b: BigInt,
}

/// Full saturation-and-rounding reduction from `(phi, 1)`-connectivity to
/// `(phi, eta)`-connectivity: picks the target precision
/// `eps = (1/b)^n / 2`, derives `q` from the saturation lemma with
/// `zeta = phi*eta^2` and `chi = m`, verifies the exact invalid-world mass
/// `eps' = 1 - (1 - (1-zeta)^q)^m < eps`, queries the oracle on the
/// parallel-paths graph, and recovers `Z` by rounding `O * b^n` to the
/// nearest integer. `Z / b^n` equals the `(phi, 1)` answer.
pub fn saturation_pipeline(
    g: &StGraph,
    phi: &Probability,
    eta: &Probability,
    oracle: SaturationOracle,
) -> Result<SaturationReport> {
    if phi.is_zero() {
        return Err(Error::invalid("phi must be positive"));
    }
    if eta.is_zero() || eta.is_one() {
        return Err(Error::invalid("saturation requires 0 < eta < 1"));
    }
    let n = g.vertex_count();
    let m = g.edge_count();
    let b = phi.as_ratio().denom().clone();
    if m == 0 {
        // No edges: the terminals are never connected.
        return Ok(SaturationReport {
            z: BigInt::zero(),
            q: 0,
            epsilon: BigRational::zero(),
            epsilon_prime: BigRational::zero(),
            oracle: OracleAnswer { value: Probability::zero(), provenance: Provenance::BruteForce },
            n,
            b,
        });
    }
    // eps = (1/b)^n / 2 bounds half the mass quantum of any vertex subset.
    let mut bn = BigInt::one();
    for _ in 0..n {
        bn *= &b;
    }
    let eps = BigRational::new(BigInt::one(), bn.clone() * 2);
    let zeta = Probability::new(phi.as_ratio() * eta.as_ratio() * eta.as_ratio())?;
    let q = saturation_parameter(&zeta, &Probability::new(eps.clone())?, m)?;
    let eps_prime = lemma_bound(&zeta, q, m);
    if eps_prime >= eps {
        return Err(Error::assertion(format!("eps' = {eps_prime} not below eps = {eps}")));
    }
    let answer = match oracle {
        SaturationOracle::Collapsed => collapsed_ustcon_oracle(g, phi, eta, q)?,
        SaturationOracle::BruteForce => {
            let (gq, _) = build_parallel_paths(g, q)?;
            OracleAnswer {
                value: ustcon_prob(phi, eta, &gq, false)?,
                provenance: Provenance::BruteForce,
            }
        }
        SaturationOracle::External(value) => OracleAnswer { value, provenance: Provenance::External },
    };
    let scaled = answer.value.as_ratio() * BigRational::from_integer(bn.clone());
    let z = round_nearest(&scaled);
    let gap = (&scaled - BigRational::from_integer(z.clone())).abs();
    if gap >= BigRational::new(BigInt::one(), BigInt::from(2)) {
        return Err(Error::assertion(format!(
            "rounding gap {gap} reaches 1/2; the saturation bound failed"
        )));
    }
    Ok(SaturationReport { z, q, epsilon: eps, epsilon_prime: eps_prime, oracle: answer, n, b })
}

fn round_nearest(x: &BigRational) -> BigInt {
    // round() from num-rational rounds half away from zero; the gap check
    // rejects exact halves anyway.
    x.round().to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardprob::count_good_vertex_subsets;

    fn p(s: &str) -> Probability {
        Probability::parse(s).unwrap()
    }

    fn path_ras() -> StGraph {
        StGraph::parse("st r s\nr a\na s\n").unwrap()
    }

    #[test]
    fn vertex_copies_on_path() {
        let g2 = build_vertex_copies(&path_ras(), 2).unwrap();
        let mut names = g2.vertex_names().to_vec();
        names.sort();
        assert_eq!(names, ["a@1", "a@2", "r", "s"]);
        assert_eq!(g2.edge_count(), 4);
    }

    #[test]
    fn vertex_copies_q1_is_isomorphic() {
        let g = path_ras();
        let g1 = build_vertex_copies(&g, 1).unwrap();
        assert_eq!(g1.vertex_count(), g.vertex_count());
        assert_eq!(g1.edge_count(), g.edge_count());
        // Same connectivity probability at any parameters.
        assert_eq!(
            ustcon_prob(&p("1/2"), &p("1/2"), &g1, true).unwrap(),
            ustcon_prob(&p("1/2"), &p("1/2"), &g, true).unwrap()
        );
    }

    #[test]
    fn vertex_copies_inner_edge_squares() {
        let g = StGraph::parse("st r s\nr a\na b\nb s\n").unwrap();
        let g3 = build_vertex_copies(&g, 3).unwrap();
        // r-a becomes 3, a-b becomes 9, b-s becomes 3.
        assert_eq!(g3.edge_count(), 15);
    }

    #[test]
    fn vertex_copies_reject_adjacent_terminals() {
        let g = StGraph::parse("st r s\nr s\n").unwrap();
        assert!(build_vertex_copies(&g, 2).is_err());
    }

    #[test]
    fn interpolation_recovers_path_counts() {
        let g = path_ras();
        let phi = p("1/2");
        let mut oracle = brute_force_phi1_oracle(&phi);
        let report = node_connectedness_pipeline(&g, &phi, &mut oracle).unwrap();
        assert_eq!(report.counts_by_cardinality.0, vec![BigUint::zero(), BigUint::from(1u32)]);
        assert_eq!(report.count, BigUint::from(1u32));
    }

    #[test]
    fn interpolation_round_trip_on_random_vectors() {
        use rand_core::{RngCore, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        // Counts bounded by the binomial coefficients so the forward values
        // are genuine probabilities.
        let binom = |n: usize, k: usize| -> u64 {
            let mut acc = 1u64;
            for i in 0..k {
                acc = acc * (n - i) as u64 / (i + 1) as u64;
            }
            acc
        };
        for n in 3..=5usize {
            for _ in 0..5 {
                let counts = CountVector(
                    (0..n - 1)
                        .map(|i| BigUint::from(rng.next_u64() % (binom(n - 2, i) + 1)))
                        .collect(),
                );
                for phi_s in ["1/2", "1/3"] {
                    let phi = p(phi_s);
                    let answers: Vec<OracleAnswer> = (1..n)
                        .map(|q| OracleAnswer {
                            value: Probability::new(evaluate_node_counts(&phi, &counts, n, q))
                                .unwrap(),
                            provenance: Provenance::External,
                        })
                        .collect();
                    let mut back = interpolate_node_counts(&phi, &answers, n).unwrap();
                    // Zero-pad comparison length.
                    while back.0.len() < counts.0.len() {
                        back.0.push(BigUint::zero());
                    }
                    assert_eq!(back, counts);
                }
            }
        }
    }

    #[test]
    fn zero_answers_give_zero_counts() {
        let phi = p("1/2");
        let answers: Vec<OracleAnswer> = (1..4)
            .map(|_| OracleAnswer { value: Probability::zero(), provenance: Provenance::External })
            .collect();
        let counts = interpolate_node_counts(&phi, &answers, 4).unwrap();
        assert!(counts.0.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn pipeline_isolated_terminals() {
        let g = StGraph::from_indices(2, vec![], 0, 1).unwrap();
        let phi = p("1/2");
        let mut oracle = brute_force_phi1_oracle(&phi);
        let report = node_connectedness_pipeline(&g, &phi, &mut oracle).unwrap();
        assert!(report.count.is_zero());
    }

    #[test]
    fn pipeline_matches_direct_count_on_small_graphs() {
        // 4-vertex graphs at two probabilities, exhaustive edge sets.
        let phis = [p("1/2"), p("1/3")];
        let all_pairs: Vec<(usize, usize)> =
            (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).collect();
        for mask in 0u32..1 << all_pairs.len() {
            let edges: Vec<(usize, usize)> = all_pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let g = StGraph::from_indices(4, edges, 0, 1).unwrap();
            if g.terminals_adjacent() {
                continue;
            }
            let expect = count_good_vertex_subsets(&g).unwrap();
            for phi in &phis {
                let mut oracle = brute_force_phi1_oracle(phi);
                let report = node_connectedness_pipeline(&g, phi, &mut oracle).unwrap();
                assert_eq!(report.count, expect);
            }
        }
    }

    #[test]
    fn saturation_parameter_examples() {
        // zeta=1/2, chi=1, eps=1/2: threshold is exactly 1, so q=2, and
        // 1-(1-1/4) = 1/4 < 1/2.
        assert_eq!(saturation_parameter(&p("1/2"), &p("1/2"), 1).unwrap(), 2);
        assert_eq!(lemma_bound(&p("1/2"), 2, 1), p("1/4").into_ratio());
        // zeta=3/4, chi=2, eps=1/8: threshold is exactly 2, so q=3, and
        // 1-(63/64)^2 = 127/4096 < 1/8.
        assert_eq!(saturation_parameter(&p("3/4"), &p("1/8"), 2).unwrap(), 3);
        assert_eq!(
            lemma_bound(&p("3/4"), 3, 2),
            BigRational::new(BigInt::from(127), BigInt::from(4096))
        );
    }

    #[test]
    fn saturation_parameter_is_minimal_above_threshold() {
        for zeta in ["1/4", "1/2", "3/4"] {
            for eps in ["1/2", "1/8", "1/128"] {
                for chi in [1usize, 2, 10, 100] {
                    let z = p(zeta);
                    let e = p(eps);
                    let q = saturation_parameter(&z, &e, chi).unwrap();
                    // (1-z)^q < e/chi <= (1-z)^(q-1)
                    let base = BigRational::one() - z.as_ratio();
                    let target = e.as_ratio() / BigRational::from_integer(BigInt::from(chi));
                    let mut pow = BigRational::one();
                    for _ in 0..q - 1 {
                        pow *= &base;
                    }
                    assert!(pow >= target, "q not minimal for {zeta},{eps},{chi}");
                    pow *= &base;
                    assert!(pow < target, "q too small for {zeta},{eps},{chi}");
                    assert!(&lemma_bound(&z, q, chi) < e.as_ratio());
                }
            }
        }
    }

    #[test]
    fn parallel_paths_counts() {
        let g = StGraph::from_indices(2, vec![(0, 1)], 0, 1).unwrap();
        let (g2, registry) = build_parallel_paths(&g, 2).unwrap();
        assert_eq!(g2.vertex_count(), 4);
        assert_eq!(g2.edge_count(), 4);
        assert_eq!(registry.len(), 1);
        assert_eq!(registry[0].1.len(), 2);
        // |V_q| = |V| + q|E| in general.
        let g3 = StGraph::parse("st r s\nr a\na s\n").unwrap();
        let (g3q, _) = build_parallel_paths(&g3, 3).unwrap();
        assert_eq!(g3q.vertex_count(), 3 + 3 * 2);
    }

    #[test]
    fn parallel_paths_q1_is_subdivision() {
        let g = path_ras();
        let (g1, _) = build_parallel_paths(&g, 1).unwrap();
        assert_eq!(g1.vertex_count(), g.vertex_count() + g.edge_count());
        assert_eq!(g1.edge_count(), 2 * g.edge_count());
    }

    #[test]
    fn collapsed_oracle_single_edge_formula() {
        // Single edge r-s at q=1: phi^2 * (phi * eta^2).
        let g = StGraph::from_indices(2, vec![(0, 1)], 0, 1).unwrap();
        let got = collapsed_ustcon_oracle(&g, &p("1/2"), &p("1/2"), 1).unwrap();
        assert_eq!(got.value, p("1/32"));
        assert_eq!(got.provenance, Provenance::Collapsed);
    }

    #[test]
    fn collapsed_oracle_matches_direct_enumeration() {
        let graphs = [
            StGraph::from_indices(2, vec![(0, 1)], 0, 1).unwrap(),
            StGraph::parse("st r s\nr a\na s\n").unwrap(),
            StGraph::from_indices(3, vec![(0, 1), (0, 2), (1, 2)], 0, 1).unwrap(),
        ];
        for g in &graphs {
            for q in 1..=2usize {
                if g.vertex_count() + q * g.edge_count() + 2 * q * g.edge_count() > 14 {
                    continue;
                }
                let (gq, _) = build_parallel_paths(g, q).unwrap();
                let direct = ustcon_prob(&p("1/2"), &p("1/3"), &gq, true).unwrap();
                let collapsed = collapsed_ustcon_oracle(g, &p("1/2"), &p("1/3"), q).unwrap();
                assert_eq!(collapsed.value, direct);
            }
        }
    }

    #[test]
    fn collapsed_oracle_approaches_eta_one_limit() {
        let g = path_ras();
        let limit = ustcon_prob(&p("1/2"), &p("1"), &g, false).unwrap();
        let mut prev = Probability::zero();
        for q in [1usize, 4, 16, 64] {
            let v = collapsed_ustcon_oracle(&g, &p("1/2"), &p("1/2"), q).unwrap().value;
            assert!(v >= prev);
            assert!(v <= limit);
            prev = v;
        }
        let close = collapsed_ustcon_oracle(&g, &p("1/2"), &p("1/2"), 256).unwrap().value;
        let diff = limit.as_ratio() - close.as_ratio();
        assert!(diff < BigRational::new(BigInt::one(), BigInt::from(1_000_000)));
    }

    #[test]
    fn saturation_pipeline_single_edge() {
        let g = StGraph::from_indices(2, vec![(0, 1)], 0, 1).unwrap();
        let report = saturation_pipeline(&g, &p("1/2"), &p("1/2"), SaturationOracle::Collapsed).unwrap();
        let y = ustcon_prob(&p("1/2"), &p("1"), &g, false).unwrap();
        let mut bn = BigInt::one();
        for _ in 0..report.n {
            bn *= &report.b;
        }
        assert_eq!(
            BigRational::from_integer(report.z.clone()),
            y.as_ratio() * BigRational::from_integer(bn)
        );
        assert!(report.epsilon_prime < report.epsilon);
    }

    #[test]
    fn saturation_pipeline_triangle() {
        let g = StGraph::from_indices(3, vec![(0, 1), (0, 2), (1, 2)], 0, 1).unwrap();
        let report = saturation_pipeline(&g, &p("1/2"), &p("1/2"), SaturationOracle::Collapsed).unwrap();
        let y = ustcon_prob(&p("1/2"), &p("1"), &g, false).unwrap();
        assert_eq!(
            BigRational::new(report.z.clone(), report.b.pow(report.n as u32)),
            y.into_ratio()
        );
    }

    #[test]
    fn saturation_pipeline_no_edges_is_zero() {
        let g = StGraph::from_indices(3, vec![], 0, 1).unwrap();
        let report = saturation_pipeline(&g, &p("1/2"), &p("1/2"), SaturationOracle::Collapsed).unwrap();
        assert!(report.z.is_zero());
    }
}
