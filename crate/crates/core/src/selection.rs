//! Codebook selection as a clique search on the Hamming graph of index
//! patterns: spectral upper bound, brute-force k-clique search, vertex
//! exclusion, and an exact branch-and-bound solver used as a reference.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::combinatorics::{binomial, next_combination, unrank_combination, BigCount, LabelVector};
use crate::error::{Error, Result};

/// Slack for "eigenvalue does not exceed -1".
pub const EIGEN_EPS: f64 = 1e-9;

const WORD: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Bitset(Vec<u64>);

impl Bitset {
    fn empty(n: usize) -> Self {
        Self(vec![0; n.div_ceil(WORD)])
    }

    fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for i in 0..n {
            s.insert(i);
        }
        s
    }

    #[inline]
    fn contains(&self, i: usize) -> bool {
        self.0[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    fn insert(&mut self, i: usize) {
        self.0[i / WORD] |= 1 << (i % WORD);
    }

    #[inline]
    fn remove(&mut self, i: usize) {
        self.0[i / WORD] &= !(1 << (i % WORD));
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn first(&self) -> Option<usize> {
        self.0.iter().enumerate().find(|(_, &w)| w != 0).map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    fn and(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn and_not_assign(&mut self, other: &Self) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= !b;
        }
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * WORD + b)
            })
        })
    }
}

/// Simple undirected graph with bitset adjacency rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    rows: Vec<Bitset>,
    degree: Vec<usize>,
}

impl Graph {
    /// Vertices are the patterns in input order; two are adjacent when they
    /// differ in at least two positions.
    pub fn hamming(patterns: &[LabelVector]) -> Result<Self> {
        if patterns.len() < 2 {
            return Err(Error::Graph("need at least two patterns".into()));
        }
        let n = patterns[0].len();
        if let Some(p) = patterns.iter().find(|p| p.len() != n) {
            return Err(Error::Graph(format!("pattern {p} has length {}, expected {n}", p.len())));
        }
        let mut seen = std::collections::HashSet::with_capacity(patterns.len());
        if let Some(p) = patterns.iter().find(|p| !seen.insert(*p)) {
            return Err(Error::Graph(format!("duplicate pattern {p}")));
        }
        let v = patterns.len();
        let rows: Vec<Bitset> = (0..v)
            .into_par_iter()
            .map(|i| {
                let mut row = Bitset::empty(v);
                for (j, q) in patterns.iter().enumerate() {
                    if i != j && patterns[i].hamming_distance(q) >= 2 {
                        row.insert(j);
                    }
                }
                row
            })
            .collect();
        Ok(Self::from_rows(rows))
    }

    /// Graph on `0..n` from an undirected edge list.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Graph("graph needs at least one vertex".into()));
        }
        let mut rows = vec![Bitset::empty(n); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Graph(format!("edge ({a}, {b}) outside 0..{n}")));
            }
            if a == b {
                return Err(Error::Graph(format!("self loop at {a}")));
            }
            rows[a].insert(b);
            rows[b].insert(a);
        }
        Ok(Self::from_rows(rows))
    }

    /// Parses `l m` lines (0-based, `#` comments). The vertex count is one
    /// more than the largest index unless `n` is given.
    pub fn parse_edge_list(text: &str, n: Option<usize>) -> Result<Self> {
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let nums: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Graph(format!("line {}: {e}", lineno + 1)))?;
            if nums.len() != 2 {
                return Err(Error::Graph(format!("line {}: expected two vertex indices", lineno + 1)));
            }
            edges.push((nums[0], nums[1]));
        }
        let inferred = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
        Self::from_edges(n.unwrap_or(inferred), &edges)
    }

    fn from_rows(rows: Vec<Bitset>) -> Self {
        let degree = rows.iter().map(Bitset::count).collect();
        Self { rows, degree }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.rows[a].contains(b)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degree[v]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degree
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.rows[v].iter()
    }

    pub fn num_edges(&self) -> usize {
        self.degree.iter().sum::<usize>() / 2
    }

    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| if self.adjacent(i, j) { 1.0 } else { 0.0 })
    }

    /// Edge list, one `l m` pair per line with `l < m`.
    pub fn edge_list_text(&self) -> String {
        let mut s = String::new();
        for a in 0..self.len() {
            for b in self.rows[a].iter().filter(|&b| b > a) {
                s.push_str(&format!("{a} {b}\n"));
            }
        }
        s
    }
}

/// Eigenvalues of the adjacency matrix in ascending order.
pub fn adjacency_eigenvalues(graph: &Graph) -> Vec<f64> {
    let mut ev: Vec<f64> = graph.adjacency_matrix().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// One plus the number of adjacency eigenvalues `<= -1 + EIGEN_EPS`.
pub fn clique_upper_bound(graph: &Graph) -> usize {
    bound_from_eigenvalues(&adjacency_eigenvalues(graph))
}

pub fn bound_from_eigenvalues(ev: &[f64]) -> usize {
    ev.iter().filter(|&&l| l <= -1.0 + EIGEN_EPS).count() + 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    BruteForce,
    VertexExclusion,
    Exact,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::BruteForce => "alg1",
            Algorithm::VertexExclusion => "alg2",
            Algorithm::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliqueResult {
    /// Vertex indices in ascending order.
    pub selected: Vec<usize>,
    pub algorithm: Algorithm,
    pub elapsed: Duration,
    /// Spectral bound, when it was computed.
    pub bound: Option<usize>,
    /// False when the exact solver ran out of time.
    pub proven_optimal: bool,
    /// Candidate subsets examined (brute force only).
    pub examined: u64,
}

impl CliqueResult {
    pub fn size(&self) -> usize {
        self.selected.len()
    }
}

pub fn is_clique(graph: &Graph, subset: &[usize]) -> Result<bool> {
    if let Some(&v) = subset.iter().find(|&&v| v >= graph.len()) {
        return Err(Error::Range(format!("vertex {v} >= {}", graph.len())));
    }
    Ok(subset_is_clique(graph, subset))
}

fn subset_is_clique(graph: &Graph, subset: &[usize]) -> bool {
    subset
        .iter()
        .enumerate()
        .all(|(i, &a)| subset[i + 1..].iter().all(|&b| graph.adjacent(a, b)))
}

const BATCH: usize = 4096;

/// Brute-force k-clique search with `k = 2^(floor(log2 bound) - kappa)`,
/// kappa = 0, 1, ... Candidates are visited in lexicographic rank order
/// starting from `unrank_combination(0)`; the lowest-rank clique wins.
/// `budget` caps the total number of candidates examined.
pub fn brute_force_k_clique(graph: &Graph, bound: usize, budget: Option<u64>) -> Result<CliqueResult> {
    if graph.is_empty() {
        return Err(Error::Graph("empty graph".into()));
    }
    let start = Instant::now();
    let l = graph.len();
    let mut examined = 0u64;
    let mut exp = bound.max(1).ilog2();
    loop {
        let k = (1usize << exp).min(l);
        let total = binomial(l, k);
        let mut combo = unrank_combination(&BigCount::zero(), l, k)?;
        let mut done = false;
        let mut tried_for_k = BigCount::zero();
        while !done {
            let room = budget.map(|b| b - examined);
            if room == Some(0) {
                return Err(Error::BudgetExhausted { k, examined });
            }
            let cap = room.map_or(BATCH, |r| (r as usize).min(BATCH));
            let mut batch = Vec::with_capacity(cap);
            batch.push(combo.clone());
            while batch.len() < cap {
                if !next_combination(&mut combo, l) {
                    done = true;
                    break;
                }
                batch.push(combo.clone());
            }
            if !done && !next_combination(&mut combo, l) {
                done = true;
            }
            let hit = batch.par_iter().position_first(|c| subset_is_clique(graph, c));
            if let Some(p) = hit {
                examined += p as u64 + 1;
                return Ok(CliqueResult {
                    selected: batch[p].clone(),
                    algorithm: Algorithm::BruteForce,
                    elapsed: start.elapsed(),
                    bound: Some(bound),
                    proven_optimal: false,
                    examined,
                });
            }
            examined += batch.len() as u64;
            tried_for_k = &tried_for_k + &BigCount::from(batch.len() as u64);
        }
        debug_assert_eq!(tried_for_k, total);
        if exp == 0 {
            return Err(Error::Graph("no single vertex found".into()));
        }
        exp -= 1;
    }
}

/// Repeatedly deletes a minimum-degree vertex (lowest index on ties) until
/// the remaining vertices are pairwise adjacent.
pub fn vertex_exclusion(graph: &Graph) -> Result<CliqueResult> {
    if graph.is_empty() {
        return Err(Error::Graph("empty graph".into()));
    }
    let start = Instant::now();
    let mut alive = Bitset::full(graph.len());
    let mut degree = graph.degree.clone();
    let mut remaining = graph.len();
    loop {
        let (v, d) = alive.iter().map(|v| (v, degree[v])).min_by_key(|&(v, d)| (d, v)).expect("non-empty");
        if d == remaining - 1 {
            break;
        }
        alive.remove(v);
        remaining -= 1;
        for u in graph.rows[v].and(&alive).iter() {
            degree[u] -= 1;
        }
    }
    Ok(CliqueResult {
        selected: alive.iter().collect(),
        algorithm: Algorithm::VertexExclusion,
        elapsed: start.elapsed(),
        bound: None,
        proven_optimal: false,
        examined: 0,
    })
}

struct Search<'a> {
    graph: &'a Graph,
    best: Vec<usize>,
    deadline: Instant,
    timed_out: bool,
    steps: u64,
}

impl Search<'_> {
    // greedy sequential colouring; returns vertices in colour order with
    // their colour numbers (non-decreasing)
    fn colour_sort(&self, p: &Bitset) -> (Vec<usize>, Vec<usize>) {
        let mut uncoloured = p.clone();
        let mut order = Vec::new();
        let mut colours = Vec::new();
        let mut colour = 0;
        while !uncoloured.is_empty() {
            colour += 1;
            let mut q = uncoloured.clone();
            while let Some(v) = q.first() {
                uncoloured.remove(v);
                q.remove(v);
                q.and_not_assign(&self.graph.rows[v]);
                order.push(v);
                colours.push(colour);
            }
        }
        (order, colours)
    }

    fn expand(&mut self, r: &mut Vec<usize>, mut p: Bitset) {
        let (order, colours) = self.colour_sort(&p);
        for idx in (0..order.len()).rev() {
            if r.len() + colours[idx] <= self.best.len() {
                return;
            }
            self.steps += 1;
            if self.steps.is_multiple_of(1024) && Instant::now() >= self.deadline {
                self.timed_out = true;
            }
            if self.timed_out {
                return;
            }
            let v = order[idx];
            r.push(v);
            let next = p.and(&self.graph.rows[v]);
            if next.is_empty() {
                if r.len() > self.best.len() {
                    self.best = r.clone();
                }
            } else {
                self.expand(r, next);
            }
            r.pop();
            p.remove(v);
        }
    }
}

/// Maximum clique by branch and bound with a greedy-colouring bound. When
/// `time_budget` runs out the best clique found so far is returned with
/// `proven_optimal = false`.
pub fn exact_max_clique(graph: &Graph, time_budget: Duration) -> Result<CliqueResult> {
    if graph.is_empty() {
        return Err(Error::Graph("empty graph".into()));
    }
    let start = Instant::now();
    let mut search = Search {
        graph,
        best: vec![0],
        deadline: start + time_budget,
        timed_out: false,
        steps: 0,
    };
    search.expand(&mut Vec::new(), Bitset::full(graph.len()));
    let mut selected = search.best;
    selected.sort_unstable();
    Ok(CliqueResult {
        selected,
        algorithm: Algorithm::Exact,
        elapsed: start.elapsed(),
        bound: None,
        proven_optimal: !search.timed_out,
        examined: search.steps,
    })
}

pub const SELECT_CSV_HEADER: &str = "algorithm,size,bound,elapsed_ms,indices";

pub fn select_csv_row(r: &CliqueResult) -> String {
    let indices: Vec<String> = r.selected.iter().map(|i| i.to_string()).collect();
    format!(
        "{},{},{},{:.3},{}",
        r.algorithm.name(),
        r.size(),
        r.bound.map_or(String::new(), |b| b.to_string()),
        r.elapsed.as_secs_f64() * 1e3,
        indices.join(" ")
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::{IndexCodebook, Variant};
    use proptest::prelude::*;

    fn lv(s: &str) -> LabelVector {
        s.parse().unwrap()
    }

    fn graph_of(v: Variant, n: usize) -> Graph {
        Graph::hamming(IndexCodebook::build(v, n).unwrap().patterns()).unwrap()
    }

    // dimension of the kernel of A + I over GF(p)
    fn nullity_plus_identity_mod(g: &Graph, p: u64) -> usize {
        let n = g.len();
        let mut m: Vec<Vec<u64>> = (0..n)
            .map(|i| (0..n).map(|j| u64::from(i == j || g.adjacent(i, j))).collect())
            .collect();
        let pow = |mut b: u64, mut e: u64| {
            let mut r = 1u64;
            while e > 0 {
                if e & 1 == 1 {
                    r = (r as u128 * b as u128 % p as u128) as u64;
                }
                b = (b as u128 * b as u128 % p as u128) as u64;
                e >>= 1;
            }
            r
        };
        let mut rank = 0;
        for col in 0..n {
            let Some(piv) = (rank..n).find(|&r| m[r][col] != 0) else { continue };
            m.swap(rank, piv);
            let inv = pow(m[rank][col], p - 2);
            for r in 0..n {
                if r != rank && m[r][col] != 0 {
                    let f = (m[r][col] as u128 * inv as u128 % p as u128) as u64;
                    for c in col..n {
                        let sub = (f as u128 * m[rank][c] as u128 % p as u128) as u64;
                        m[r][c] = (m[r][c] + p - sub) % p;
                    }
                }
            }
            rank += 1;
        }
        n - rank
    }

    #[test]
    fn table_1_adjacency() {
        let pats = ["0111", "1011", "1101", "1110", "0011", "0101", "0110"].map(lv);
        let g = Graph::hamming(&pats).unwrap();
        assert!(!g.adjacent(0, 4));
        assert!(g.adjacent(0, 1));
        assert!(!is_clique(&g, &[0, 4]).unwrap());
        assert!(is_clique(&g, &[3]).unwrap());
        assert!(is_clique(&g, &[9]).is_err());
        assert!(Graph::hamming(&[lv("0111"), lv("0111")]).is_err());
        assert!(Graph::hamming(&[lv("0111"), lv("011")]).is_err());
    }

    #[test]
    fn degree_is_row_sum() {
        let g = graph_of(Variant::Ofspm, 4);
        let a = g.adjacency_matrix();
        for i in 0..g.len() {
            assert_eq!(a.row(i).sum() as usize, g.degree(i));
            assert_eq!(a[(i, i)], 0.0);
        }
        assert_eq!(a, a.transpose());
    }

    #[test]
    fn complete_graph_bound() {
        for m in 2..8 {
            let edges: Vec<(usize, usize)> = (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect();
            let g = Graph::from_edges(m, &edges).unwrap();
            assert!(clique_upper_bound(&g) >= m);
            let r = vertex_exclusion(&g).unwrap();
            assert_eq!(r.selected, (0..m).collect::<Vec<_>>());
        }
    }

    // The exact -1 multiplicity decides these counts; the floating-point
    // count agrees with kernel dimension of A + I over two primes.
    #[test]
    fn spectral_bound_exact_counts() {
        for (v, n, expected) in [
            (Variant::Ospm { k: 2 }, 4, 10),
            (Variant::Ospm { k: 2 }, 6, 41),
            (Variant::Ofspm, 3, 7),
            (Variant::Ofspm, 4, 34),
        ] {
            let g = graph_of(v, n);
            let ev = adjacency_eigenvalues(&g);
            let below = ev.iter().filter(|&&l| l < -1.0 - 1e-6).count();
            let null_a = nullity_plus_identity_mod(&g, 1_000_000_007);
            let null_b = nullity_plus_identity_mod(&g, 998_244_353);
            assert_eq!(null_a, null_b);
            assert_eq!(below + null_a + 1, expected, "{v} {n}");
            assert_eq!(bound_from_eigenvalues(&ev), expected, "{v} {n}");
        }
    }

    #[test]
    fn small_table_instances() {
        let ospm = graph_of(Variant::Ospm { k: 2 }, 4);
        let bound = clique_upper_bound(&ospm);
        let a1 = brute_force_k_clique(&ospm, bound, None).unwrap();
        assert_eq!(a1.size(), 8);
        assert!(is_clique(&ospm, &a1.selected).unwrap());
        assert_eq!(vertex_exclusion(&ospm).unwrap().size(), 8);
        let ex = exact_max_clique(&ospm, Duration::from_secs(10)).unwrap();
        assert_eq!(ex.size(), 8);
        assert!(ex.proven_optimal);

        let of3 = graph_of(Variant::Ofspm, 3);
        let bound = clique_upper_bound(&of3);
        assert_eq!(brute_force_k_clique(&of3, bound, None).unwrap().size(), 4);
        assert_eq!(vertex_exclusion(&of3).unwrap().size(), 7);
        assert_eq!(exact_max_clique(&of3, Duration::from_secs(10)).unwrap().size(), 7);
    }

    #[test]
    fn vertex_exclusion_table_sizes() {
        assert_eq!(vertex_exclusion(&graph_of(Variant::Ospm { k: 2 }, 6)).unwrap().size(), 32);
        assert_eq!(vertex_exclusion(&graph_of(Variant::Ospm { k: 2 }, 8)).unwrap().size(), 128);
        assert_eq!(vertex_exclusion(&graph_of(Variant::Ofspm, 4)).unwrap().size(), 32);
    }

    #[test]
    fn brute_force_first_rank_and_budget() {
        // path 0-1-2 plus edge 2-3: the lowest-rank 2-clique is {0,1}
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let r = brute_force_k_clique(&g, 2, None).unwrap();
        assert_eq!(r.selected, vec![0, 1]);
        assert_eq!(r.examined, 1);
        let g = Graph::from_edges(4, &[(2, 3)]).unwrap();
        let r = brute_force_k_clique(&g, 2, None).unwrap();
        assert_eq!(r.selected, vec![2, 3]);
        assert_eq!(r.examined, 6);
        assert_eq!(
            brute_force_k_clique(&g, 2, Some(3)),
            Err(Error::BudgetExhausted { k: 2, examined: 3 })
        );
    }

    #[test]
    fn edgeless_graph_falls_back_to_single_vertex() {
        let g = Graph::from_edges(5, &[]).unwrap();
        let r = brute_force_k_clique(&g, clique_upper_bound(&g), None).unwrap();
        assert_eq!(r.selected, vec![0]);
        assert_eq!(vertex_exclusion(&g).unwrap().size(), 1);
        assert_eq!(exact_max_clique(&g, Duration::from_secs(1)).unwrap().size(), 1);
    }

    #[test]
    fn triangle_plus_isolated() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(exact_max_clique(&g, Duration::from_secs(1)).unwrap().selected, vec![0, 1, 2]);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = graph_of(Variant::Spm { k: 2 }, 4);
        let text = g.edge_list_text();
        let back = Graph::parse_edge_list(&text, Some(g.len())).unwrap();
        assert_eq!(back, g);
        assert!(Graph::parse_edge_list("0 1 2\n", None).is_err());
        assert!(Graph::parse_edge_list("0 x\n", None).is_err());
    }

    // all SPM-family graphs with at most 20 vertices for N <= 4
    #[test]
    fn algorithms_agree_on_small_graphs() {
        let mut variants = vec![Variant::Fspm, Variant::Ofspm, Variant::MmOfdmIm, Variant::GdmOfdmIm];
        for k in 1..=4 {
            variants.push(Variant::Spm { k });
            variants.push(Variant::Ospm { k });
        }
        for d in 1..4 {
            variants.push(Variant::DmOfdmIm { d });
        }
        for v in variants {
            for n in 2..=4 {
                let Ok(book) = IndexCodebook::build(v, n) else { continue };
                if book.len() < 2 || book.len() > 20 {
                    continue;
                }
                let g = Graph::hamming(book.patterns()).unwrap();
                let bound = clique_upper_bound(&g);
                let exact = exact_max_clique(&g, Duration::from_secs(10)).unwrap();
                assert!(exact.proven_optimal);
                assert!(is_clique(&g, &exact.selected).unwrap());
                let ve = vertex_exclusion(&g).unwrap();
                assert!(is_clique(&g, &ve.selected).unwrap());
                assert!(ve.size() <= exact.size());
                assert!(exact.size() <= bound, "{v} {n}");
                let k = 1usize << bound.ilog2();
                let bf = brute_force_k_clique(&g, bound, None).unwrap();
                assert!(is_clique(&g, &bf.selected).unwrap());
                assert_eq!(bf.size() == k, exact.size() >= k, "{v} {n}");
            }
        }
    }

    #[test]
    fn selected_books_have_rank_two_index_pairs() {
        use crate::codebook::{codebook_dmin, Scheme};
        use crate::constellations::psk_family;
        let full = IndexCodebook::build(Variant::Ospm { k: 2 }, 4).unwrap();
        let g = Graph::hamming(full.patterns()).unwrap();
        let sel = full.select(&vertex_exclusion(&g).unwrap().selected).unwrap();
        // index-only differences: same modulation bits, different pattern
        let scheme = Scheme::new(sel, psk_family::<f64>(2, 2, 2).unwrap()).unwrap();
        let f2 = scheme.mod_bits();
        for m in 0..1u64 << f2 {
            let cws: Vec<_> = (0..8u64).map(|i| scheme.transmit((i << f2) | m).unwrap().symbols).collect();
            assert!(codebook_dmin(&cws).unwrap().min_rank >= 2);
        }
    }

    proptest! {
        #[test]
        fn random_graph_results_are_cliques(n in 2usize..24, seed in any::<u64>()) {
            let mut s = seed;
            let mut edges = vec![];
            for a in 0..n {
                for b in a + 1..n {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    if s >> 62 != 0 {
                        edges.push((a, b));
                    }
                }
            }
            let g = Graph::from_edges(n, &edges).unwrap();
            let bound = clique_upper_bound(&g);
            let ve = vertex_exclusion(&g).unwrap();
            let ex = exact_max_clique(&g, Duration::from_secs(5)).unwrap();
            prop_assert!(is_clique(&g, &ve.selected).unwrap());
            prop_assert!(is_clique(&g, &ex.selected).unwrap());
            prop_assert!(ve.size() <= ex.size());
            prop_assert!(ex.size() <= bound);
            let again = vertex_exclusion(&g).unwrap();
            prop_assert_eq!(again.selected, ve.selected);
        }
    }
}
