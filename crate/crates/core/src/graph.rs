//! Simple undirected graphs with bit-row adjacency.
//!
//! Each vertex owns a fixed-width row of `u64` words, so adjacency queries are
//! O(1) and neighbourhood iteration walks set bits. Graphs are immutable once
//! built; use [`Graph::from_edges`] or one of the named constructors.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Seed;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Graph {
            n,
            words,
            rows: vec![0; n * words],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.insert_edge(u, v);
            }
        }
        g
    }

    /// Cycle 0-1-...-(n-1)-0. Requires `n >= 3`.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let mut g = Graph::empty(n);
        for v in 0..n {
            g.insert_edge(v, (v + 1) % n);
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for v in 1..n {
            g.insert_edge(v - 1, v);
        }
        g
    }

    /// Star with centre 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let mut g = Graph::empty(leaves + 1);
        for v in 1..=leaves {
            g.insert_edge(0, v);
        }
        g
    }

    /// Builds a graph from an edge list, rejecting self-loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::param(format!("edge ({u},{v}) out of range for n={n}")));
            }
            if u == v {
                return Err(Error::param(format!("self-loop at vertex {u}")));
            }
            if g.has_edge(u, v) {
                return Err(Error::param(format!("duplicate edge ({u},{v})")));
            }
            g.insert_edge(u, v);
        }
        Ok(g)
    }

    pub(crate) fn insert_edge(&mut self, u: usize, v: usize) {
        debug_assert!(u != v && u < self.n && v < self.n);
        self.rows[u * self.words + v / 64] |= 1 << (v % 64);
        self.rows[v * self.words + u / 64] |= 1 << (u % 64);
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    #[inline]
    fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }

    /// Open neighbourhood of `v` in increasing order.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(v)
            .iter()
            .enumerate()
            .flat_map(|(w, &bits)| BitIter(bits).map(move |b| w * 64 + b))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            out.extend(self.neighbors(u).filter(|&v| v > u).map(|v| (u, v)));
        }
        out
    }

    /// Exact average degree `2m / n` (zero for the empty vertex set).
    pub fn average_degree(&self) -> BigRational {
        if self.n == 0 {
            return BigRational::zero();
        }
        BigRational::new(BigInt::from(2 * self.edge_count()), BigInt::from(self.n))
    }

    /// Adjacency row of `v` as a single word. Only valid when `n <= 64`.
    #[inline]
    pub fn row_mask(&self, v: usize) -> u64 {
        debug_assert!(self.n <= 64);
        self.rows[v * self.words]
    }

    /// Subgraph induced by `vertices`; vertex `i` of the result is `vertices[i]`.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<InducedSubgraph> {
        let mut seen = vec![false; self.n];
        for &v in vertices {
            if v >= self.n {
                return Err(Error::param(format!("vertex {v} out of range for n={}", self.n)));
            }
            if seen[v] {
                return Err(Error::param(format!("vertex {v} listed twice")));
            }
            seen[v] = true;
        }
        let mut g = Graph::empty(vertices.len());
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.insert_edge(i, j);
                }
            }
        }
        Ok(InducedSubgraph {
            graph: g,
            original: vertices.to_vec(),
        })
    }

    /// Subgraph induced by all vertices except `removed`.
    pub fn without_vertices(&self, removed: &[usize]) -> InducedSubgraph {
        let mut keep = vec![true; self.n];
        for &v in removed {
            keep[v] = false;
        }
        let vs: Vec<usize> = (0..self.n).filter(|&v| keep[v]).collect();
        self.induced_subgraph(&vs).expect("in-range vertices")
    }

    /// Whether `set` is independent.
    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| !self.has_edge(u, v)))
    }

    /// Whether the graph is bipartite (BFS 2-colouring).
    pub fn is_bipartite(&self) -> bool {
        let mut side = vec![u8::MAX; self.n];
        for s in 0..self.n {
            if side[s] != u8::MAX {
                continue;
            }
            side[s] = 0;
            let mut queue = vec![s];
            while let Some(u) = queue.pop() {
                for v in self.neighbors(u) {
                    if side[v] == u8::MAX {
                        side[v] = 1 - side[u];
                        queue.push(v);
                    } else if side[v] == side[u] {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn to_json(&self) -> GraphFile {
        GraphFile {
            n: self.n,
            edges: self.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        }
    }

    /// Loads the `{"n", "edges"}` format. Edges must satisfy `u < v` and be
    /// sorted lexicographically without repeats.
    pub fn from_json(file: &GraphFile) -> Result<Self> {
        let mut prev: Option<[usize; 2]> = None;
        for (i, e) in file.edges.iter().enumerate() {
            if e[0] >= e[1] {
                if e[0] == e[1] {
                    return Err(Error::Load(format!("edges[{i}]: self-loop at {}", e[0])));
                }
                return Err(Error::Load(format!("edges[{i}]: expected u < v, got {:?}", e)));
            }
            if e[1] >= file.n {
                return Err(Error::Load(format!(
                    "edges[{i}]: vertex {} out of range (n={})",
                    e[1], file.n
                )));
            }
            if let Some(p) = prev {
                if p == *e {
                    return Err(Error::Load(format!("edges[{i}]: duplicate edge {:?}", e)));
                }
                if p > *e {
                    return Err(Error::Load(format!(
                        "edges[{i}]: edges not sorted ({:?} after {:?})",
                        e, p
                    )));
                }
            }
            prev = Some(*e);
        }
        let edges: Vec<(usize, usize)> = file.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::from_edges(file.n, &edges).map_err(|e| Error::Load(e.to_string()))
    }
}

/// An induced subgraph together with its index map back to the parent graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedSubgraph {
    pub graph: Graph,
    /// `original[i]` is the parent vertex of local vertex `i`.
    pub original: Vec<usize>,
}

/// On-disk graph format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

pub(crate) struct BitIter(pub u64);

impl Iterator for BitIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(b)
    }
}

/// Erdős-Rényi G(n, q): every pair is an edge independently with
/// probability `q`.
///
/// `q` is the **edge** probability. For a graph "G(n, 1 - p)" with non-edge
/// probability `p`, pass `q = 1 - p`.
pub fn random_graph(n: usize, q: f64, seed: Seed) -> Result<Graph> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::param(format!("edge probability {q} outside [0,1]")));
    }
    let mut rng = seed.rng();
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            // gen_bool(1.0) is always true and gen_bool(0.0) always false.
            if rng.gen_bool(q) {
                g.insert_edge(u, v);
            }
        }
    }
    Ok(g)
}

/// Random bipartite graph with parts `{0..left}` and `{left..left+right}`,
/// each cross pair an edge with probability `q`.
pub fn random_bipartite(left: usize, right: usize, q: f64, seed: Seed) -> Result<Graph> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::param(format!("edge probability {q} outside [0,1]")));
    }
    let mut rng = seed.rng();
    let mut g = Graph::empty(left + right);
    for u in 0..left {
        for v in left..left + right {
            if rng.gen_bool(q) {
                g.insert_edge(u, v);
            }
        }
    }
    Ok(g)
}

/// Turán's lower bound `n / (d + 1)` on the independence number of a graph
/// with `n` vertices and average degree `d`.
pub fn turan_bound(n: usize, avg_degree: &BigRational) -> Result<BigRational> {
    if avg_degree.is_negative() {
        return Err(Error::param("average degree must be nonnegative"));
    }
    Ok(BigRational::from_integer(BigInt::from(n)) / (avg_degree + BigRational::from_integer(1.into())))
}
