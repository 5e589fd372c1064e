//! Independent-set counting.
//!
//! [`count_profile`] runs the deletion recursion
//! `I(G) = I(G - v) + I(G - N[v])` on vertex bitmasks, per size stratum (the
//! `G - N[v]` branch contributes to stratum `k + 1`). Residual graphs are
//! memoised by their vertex mask for the duration of one call, and
//! disconnected residuals are split into components whose profiles are
//! convolved. Graphs are limited to 64 vertices so a residual fits in a `u64`.

use std::collections::HashMap;
use std::rc::Rc;

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{BitIter, Graph};
use crate::rng::Seed;

/// Largest graph accepted by the exact counter and the sampler.
pub const MAX_COUNT_VERTICES: usize = 64;
/// Largest graph accepted by the brute-force oracle.
pub const MAX_BRUTE_VERTICES: usize = 20;

/// Independent-set counts of a graph, stratified by set size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ISProfile {
    /// `counts[k]` is the number of independent sets of size `k`; the vector
    /// has length `alpha + 1`.
    pub counts: Vec<BigUint>,
    pub total: BigUint,
    pub alpha: usize,
    pub median: usize,
}

impl ISProfile {
    pub fn from_counts(mut counts: Vec<BigUint>) -> Self {
        while counts.len() > 1 && counts.last().is_some_and(Zero::is_zero) {
            counts.pop();
        }
        if counts.is_empty() {
            counts.push(BigUint::one());
        }
        let total = counts.iter().sum();
        let alpha = counts.len() - 1;
        let median = median_of(&counts, &total);
        ISProfile {
            counts,
            total,
            alpha,
            median,
        }
    }

    /// Number of independent sets with more than `b` vertices.
    pub fn count_larger_than(&self, b: usize) -> BigUint {
        self.counts.iter().skip(b + 1).sum()
    }
}

#[derive(Serialize, Deserialize)]
struct ProfileJson {
    counts: Vec<String>,
    total: String,
    alpha: usize,
    median: usize,
}

impl Serialize for ISProfile {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ProfileJson {
            counts: self.counts.iter().map(|c| c.to_string()).collect(),
            total: self.total.to_string(),
            alpha: self.alpha,
            median: self.median,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ISProfile {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = ProfileJson::deserialize(d)?;
        let counts = raw
            .counts
            .iter()
            .map(|c| c.parse::<BigUint>().map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let p = ISProfile::from_counts(counts);
        if p.total.to_string() != raw.total || p.alpha != raw.alpha || p.median != raw.median {
            return Err(D::Error::custom("profile fields inconsistent with counts"));
        }
        Ok(p)
    }
}

fn median_of(counts: &[BigUint], total: &BigUint) -> usize {
    // Largest m with 2 * #{sets of size >= m} >= total.
    let mut tail = BigUint::zero();
    for m in (0..counts.len()).rev() {
        tail += &counts[m];
        if &tail * 2u32 >= *total {
            return m;
        }
    }
    0
}

/// Median independent-set size of a profile.
pub fn median_alpha(p: &ISProfile) -> usize {
    median_of(&p.counts, &p.total)
}

fn check_budget(g: &Graph, limit: usize) -> Result<()> {
    if g.n() > limit {
        return Err(Error::Resource {
            what: "independent-set counting",
            size: g.n(),
            limit,
        });
    }
    Ok(())
}

#[inline]
fn bit(v: usize) -> u64 {
    1u64 << v
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        bit(n) - 1
    }
}

fn adjacency_masks(g: &Graph) -> Vec<u64> {
    (0..g.n()).map(|v| g.row_mask(v)).collect()
}

/// Vertex of maximum degree inside `mask` together with that degree.
fn pivot(adj: &[u64], mask: u64) -> (usize, u32) {
    let mut best = (mask.trailing_zeros() as usize, 0);
    for v in BitIter(mask) {
        let d = (adj[v] & mask).count_ones();
        if d > best.1 {
            best = (v, d);
        }
    }
    best
}

/// Connected component of the lowest vertex of `mask`.
fn component(adj: &[u64], mask: u64) -> u64 {
    let mut comp = mask & mask.wrapping_neg();
    let mut frontier = comp;
    while frontier != 0 {
        let mut next = 0;
        for v in BitIter(frontier) {
            next |= adj[v];
        }
        next &= mask & !comp;
        comp |= next;
        frontier = next;
    }
    comp
}

fn binomial_row(k: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for i in 0..k {
        let next = &row[i] * BigUint::from(k - i) / BigUint::from(i + 1);
        row.push(next);
    }
    row
}

fn convolve(a: &[BigUint], b: &[BigUint]) -> Vec<BigUint> {
    let mut out = vec![BigUint::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

struct ProfileCounter {
    adj: Vec<u64>,
    memo: HashMap<u64, Rc<Vec<BigUint>>>,
}

impl ProfileCounter {
    fn profile(&mut self, mask: u64) -> Rc<Vec<BigUint>> {
        if let Some(p) = self.memo.get(&mask) {
            return Rc::clone(p);
        }
        let (v, deg) = pivot(&self.adj, mask);
        let result = if mask == 0 || deg == 0 {
            binomial_row(mask.count_ones() as usize)
        } else {
            let comp = component(&self.adj, mask);
            if comp != mask {
                let a = self.profile(comp);
                let b = self.profile(mask & !comp);
                convolve(&a, &b)
            } else {
                let without = self.profile(mask & !bit(v));
                let with = self.profile(mask & !(self.adj[v] | bit(v)));
                let mut out: Vec<BigUint> = without.as_ref().clone();
                if out.len() < with.len() + 1 {
                    out.resize(with.len() + 1, BigUint::zero());
                }
                for (k, c) in with.iter().enumerate() {
                    out[k + 1] += c;
                }
                out
            }
        };
        let rc = Rc::new(result);
        self.memo.insert(mask, Rc::clone(&rc));
        rc
    }
}

/// Exact size-stratified independent-set profile.
pub fn count_profile(g: &Graph) -> Result<ISProfile> {
    check_budget(g, MAX_COUNT_VERTICES)?;
    let mut counter = ProfileCounter {
        adj: adjacency_masks(g),
        memo: HashMap::new(),
    };
    let counts = counter.profile(full_mask(g.n()));
    Ok(ISProfile::from_counts(counts.as_ref().clone()))
}

/// Number of independent sets, `I(G)`.
pub fn count_total(g: &Graph) -> Result<BigUint> {
    check_budget(g, MAX_COUNT_VERTICES)?;
    let mut counter = TotalCounter::new(g);
    Ok(counter.total(full_mask(g.n())))
}

/// Full `2^n` enumeration. Test oracle; limited to 20 vertices.
pub fn brute_profile(g: &Graph) -> Result<ISProfile> {
    check_budget(g, MAX_BRUTE_VERTICES)?;
    let n = g.n();
    let mut counts = vec![0u64; n + 1];
    for subset in 0u64..(1u64 << n) {
        let members: Vec<usize> = (0..n).filter(|&v| subset >> v & 1 == 1).collect();
        if g.is_independent(&members) {
            counts[members.len()] += 1;
        }
    }
    Ok(ISProfile::from_counts(counts.into_iter().map(BigUint::from).collect()))
}

struct TotalCounter {
    adj: Vec<u64>,
    memo: HashMap<u64, BigUint>,
}

impl TotalCounter {
    fn new(g: &Graph) -> Self {
        TotalCounter {
            adj: adjacency_masks(g),
            memo: HashMap::new(),
        }
    }

    fn total(&mut self, mask: u64) -> BigUint {
        if let Some(t) = self.memo.get(&mask) {
            return t.clone();
        }
        let (v, deg) = pivot(&self.adj, mask);
        let t = if mask == 0 || deg == 0 {
            BigUint::one() << mask.count_ones()
        } else {
            let comp = component(&self.adj, mask);
            if comp != mask {
                self.total(comp) * self.total(mask & !comp)
            } else {
                self.total(mask & !bit(v)) + self.total(mask & !(self.adj[v] | bit(v)))
            }
        };
        self.memo.insert(mask, t.clone());
        t
    }
}

/// Uniformly random independent set of `g`, returned as sorted vertex indices.
///
/// A single uniform draw `r < I(G)` is decoded along the deletion recursion:
/// with pivot `v`, the sets containing `v` are ranked first
/// (`I(G - N[v])` of them), so `v` is included with probability
/// `I(G - N[v]) / I(G)`.
pub fn sample_independent_set(g: &Graph, seed: Seed) -> Result<Vec<usize>> {
    let mut rng = seed.rng();
    sample_independent_set_with(g, &mut rng)
}

pub(crate) fn sample_independent_set_with<R: rand::Rng + ?Sized>(g: &Graph, rng: &mut R) -> Result<Vec<usize>> {
    check_budget(g, MAX_COUNT_VERTICES)?;
    let mut counter = TotalCounter::new(g);
    let mut mask = full_mask(g.n());
    let total = counter.total(mask);
    let mut r = rng.gen_biguint_below(&total);
    let mut chosen = 0u64;
    loop {
        let (v, deg) = pivot(&counter.adj, mask);
        if mask == 0 || deg == 0 {
            // Residual is edgeless: r < 2^|mask| picks a subset bit by bit.
            for (i, w) in BitIter(mask).enumerate() {
                if r.bit(i as u64) {
                    chosen |= bit(w);
                }
            }
            break;
        }
        let include_mask = mask & !(counter.adj[v] | bit(v));
        let with = counter.total(include_mask);
        if r < with {
            chosen |= bit(v);
            mask = include_mask;
        } else {
            r -= with;
            mask &= !bit(v);
        }
    }
    Ok(BitIter(chosen).collect())
}

/// Independence number by branch and bound on vertex masks.
pub fn independence_number(g: &Graph) -> Result<usize> {
    check_budget(g, MAX_COUNT_VERTICES)?;
    let adj = adjacency_masks(g);
    let mut best = 0;
    mis(&adj, full_mask(g.n()), 0, &mut best);
    Ok(best)
}

fn mis(adj: &[u64], cand: u64, size: usize, best: &mut usize) {
    if size + cand.count_ones() as usize <= *best {
        return;
    }
    let (v, deg) = pivot(adj, cand);
    if cand == 0 || deg == 0 {
        *best = (*best).max(size + cand.count_ones() as usize);
        return;
    }
    // Vertices of degree <= 1 can always be taken.
    for w in BitIter(cand) {
        if (adj[w] & cand).count_ones() <= 1 {
            mis(adj, cand & !(adj[w] | bit(w)), size + 1, best);
            return;
        }
    }
    mis(adj, cand & !(adj[v] | bit(v)), size + 1, best);
    mis(adj, cand & !bit(v), size, best);
}
