//! IS-richness.
//!
//! A subgraph `F` of a graph with maximum degree `Δ` is *b-large* when
//! `binom(|F|, <= b) > Δ^{1/3}`; the graph is *b-IS-rich* when every b-large
//! subgraph of an open neighbourhood has at least `2 binom(|F|, <= b)`
//! independent sets.
//!
//! Removing edges never decreases the number of independent sets, so among
//! all subgraphs on a vertex set `X` the induced one has the fewest. The
//! exact checker therefore enumerates vertex subsets of each neighbourhood and
//! checks only induced subgraphs.
//!
//! The second half of the module is the analytic route: given a growth
//! function `g` with `I(F) >= g(|F|)` for large subgraphs, three conditions on
//! `b`, `s_Δ = ceil(g^{-1}(Δ^{1/3}))` and `g` certify richness. They are
//! evaluated in log-space (natural logs) so that `Δ` may be astronomically
//! large, with an exact integer cross-check where `Δ` and `s_Δ` are small.

use std::f64::consts::{E, LN_2};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Neighbourhoods larger than this are rejected by the exact checker.
pub const MAX_NEIGHBORHOOD: usize = 22;
/// Above this `s_Δ` the verifier only uses log-space arithmetic.
pub const EXACT_CUTOFF: u64 = 10_000;

/// `sum_{i <= floor(b)} C(n, i)`.
pub fn binom_le(n: u64, b: f64) -> BigUint {
    let top = if b.is_nan() || b < 0.0 {
        0
    } else {
        (b.floor() as u64).min(n)
    };
    let mut term = BigUint::one();
    let mut sum = BigUint::one();
    for i in 0..top {
        term = term * BigUint::from(n - i) / BigUint::from(i + 1);
        sum += &term;
    }
    sum
}

/// Exact `C(n, k)`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let k = k.min(n - k);
    let mut c = BigUint::one();
    for i in 0..k {
        c = c * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    c
}

/// Whether a subgraph on `s` vertices is b-large, i.e. `binom_le(s, b)^3 > Δ`.
pub fn is_b_large(s: u64, b: f64, delta: u64) -> bool {
    binom_le(s, b).pow(3) > BigUint::from(delta)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub center: usize,
    /// Vertices of the offending subgraph, ascending.
    pub subset: Vec<usize>,
    pub count: u64,
    pub required: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RichnessReport {
    pub rich: bool,
    pub b: f64,
    pub delta: u64,
    pub violations: Vec<Violation>,
    /// Number of b-large neighbourhood subsets that were checked.
    pub checked_subsets: u64,
}

/// Exhaustive b-IS-richness check over all nonempty subsets of every open
/// neighbourhood. `delta` defaults to the maximum degree of `g`.
pub fn check_is_rich_exact(g: &Graph, b: f64, delta: Option<u64>) -> Result<RichnessReport> {
    if let Some(v) = (0..g.n()).find(|&v| g.degree(v) > MAX_NEIGHBORHOOD) {
        return Err(Error::NeighborhoodTooLarge {
            vertex: v,
            size: g.degree(v),
            limit: MAX_NEIGHBORHOOD,
        });
    }
    let delta = delta.unwrap_or(g.max_degree() as u64);
    let mut large = [false; MAX_NEIGHBORHOOD + 1];
    let mut required = [0u64; MAX_NEIGHBORHOOD + 1];
    for s in 0..=MAX_NEIGHBORHOOD {
        large[s] = is_b_large(s as u64, b, delta);
        required[s] = 2 * binom_le(s as u64, b).to_u64().expect("at most 2^22");
    }

    let per_center: Vec<(Vec<Violation>, u64)> = (0..g.n())
        .into_par_iter()
        .map(|v| check_center(g, v, &large, &required))
        .collect();

    let mut violations = Vec::new();
    let mut checked = 0;
    for (mut vs, c) in per_center {
        vs.sort_by(|a, b| a.subset.cmp(&b.subset));
        violations.extend(vs);
        checked += c;
    }
    Ok(RichnessReport {
        rich: violations.is_empty(),
        b,
        delta,
        violations,
        checked_subsets: checked,
    })
}

fn check_center(g: &Graph, center: usize, large: &[bool], required: &[u64]) -> (Vec<Violation>, u64) {
    let nbrs: Vec<usize> = g.neighbors(center).collect();
    let d = nbrs.len();
    if !large[1..=d].iter().any(|&l| l) {
        return (Vec::new(), 0);
    }
    let local: Vec<u32> = nbrs
        .iter()
        .map(|&u| {
            nbrs.iter()
                .enumerate()
                .filter(|&(_, &w)| g.has_edge(u, w))
                .fold(0u32, |m, (j, _)| m | 1 << j)
        })
        .collect();
    // counts[X] = I(G[X]) over subsets X of the neighbourhood, via the
    // deletion recursion on the highest vertex of X.
    let mut counts = vec![0u32; 1 << d];
    counts[0] = 1;
    let mut violations = Vec::new();
    let mut checked = 0;
    for x in 1u32..(1 << d) {
        let top = 31 - x.leading_zeros();
        let rest = x & !(1 << top);
        counts[x as usize] = counts[rest as usize] + counts[(rest & !local[top as usize]) as usize];
        let size = x.count_ones() as usize;
        if large[size] {
            checked += 1;
            let c = counts[x as usize] as u64;
            if c < required[size] {
                violations.push(Violation {
                    center,
                    subset: (0..d).filter(|&j| x >> j & 1 == 1).map(|j| nbrs[j]).collect(),
                    count: c,
                    required: required[size],
                });
            }
        }
    }
    (violations, checked)
}

/// The `b(Δ) = (1/6) log2 Δ` of triangle-free graphs, whose neighbourhoods
/// are edgeless so that `I(F) = 2^{|F|}`. Uses base-2 logarithm; clamps to 0.
pub fn triangle_free_b(delta: u64) -> f64 {
    if delta <= 1 {
        return 0.0;
    }
    (delta as f64).log2() / 6.0
}

/// A maximum degree that may be too large for machine integers.
///
/// `ln` is always set; `exact` is available when the value is an integer
/// that was given exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxDegree {
    ln: f64,
    exact: Option<BigUint>,
}

impl MaxDegree {
    pub fn from_u64(delta: u64) -> Self {
        MaxDegree::from_biguint(BigUint::from(delta))
    }

    pub fn from_biguint(delta: BigUint) -> Self {
        MaxDegree {
            ln: big_ln(&delta),
            exact: Some(delta),
        }
    }

    /// `2^k`, exact.
    pub fn pow2(k: u32) -> Self {
        MaxDegree::from_biguint(BigUint::one() << k)
    }

    /// `e^x`; no exact integer value.
    pub fn from_ln(x: f64) -> Self {
        MaxDegree { ln: x, exact: None }
    }

    pub fn ln(&self) -> f64 {
        self.ln
    }

    pub fn exact(&self) -> Option<&BigUint> {
        self.exact.as_ref()
    }
}

fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    let shift = bits.saturating_sub(60);
    let top = (x >> shift).to_f64().expect("fits in 60 bits");
    top.ln() + shift as f64 * LN_2
}

/// Signature of a custom `s -> ln g(s)` or `s -> psi(s)` evaluator.
pub type ProfileFn = fn(f64) -> f64;

#[derive(Debug, Clone)]
pub struct CustomProfile {
    pub name: String,
    pub ln_g: ProfileFn,
    pub psi: ProfileFn,
    pub psi_nondecreasing: bool,
}

/// Lower-bound growth function for independent-set counts.
///
/// Evaluators work with `ln g` so that huge values stay representable.
/// `psi(s) = s * (ln g)'(s)`; the derivative condition reads `psi(s) >= 2b`.
#[derive(Debug, Clone)]
pub enum GrowthProfile {
    /// Graphs with chromatic number at most `r` among neighbourhoods:
    /// `g(s) = 2^{s/r}`.
    Colorable {
        r: u32,
    },
    /// Neighbourhoods with clique number at most `r`: `g(s) = 2^{s^{1/r} - 1}`.
    Clique {
        r: u32,
    },
    /// Dense random graphs with non-edge probability `p`:
    /// `g_p(s) = exp(ln^2 s / (3 ln(1/p)))`.
    RandomGraph {
        p: f64,
    },
    Custom(CustomProfile),
}

/// A `b(Δ)` value produced by a profile's formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BChoice {
    pub b: u64,
    /// The constant in front of the asymptotic expression, when the profile
    /// tunes one.
    pub constant: Option<f64>,
}

impl GrowthProfile {
    pub fn colorable(r: u32) -> Result<Self> {
        if r < 2 {
            return Err(Error::param(format!("colorable profile needs r >= 2, got {r}")));
        }
        Ok(GrowthProfile::Colorable { r })
    }

    pub fn clique(r: u32) -> Result<Self> {
        if r < 2 {
            return Err(Error::param(format!("clique profile needs r >= 2, got {r}")));
        }
        Ok(GrowthProfile::Clique { r })
    }

    /// `p` is the non-edge probability of the random graph.
    pub fn random_graph(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::param(format!("random-graph profile needs 0 < p < 1, got {p}")));
        }
        Ok(GrowthProfile::RandomGraph { p })
    }

    pub fn name(&self) -> String {
        match self {
            GrowthProfile::Colorable { r } => format!("colorable(r={r})"),
            GrowthProfile::Clique { r } => format!("clique(r={r})"),
            GrowthProfile::RandomGraph { p } => format!("randomgraph(p={p})"),
            GrowthProfile::Custom(c) => c.name.clone(),
        }
    }

    pub fn ln_g(&self, s: f64) -> f64 {
        match self {
            GrowthProfile::Colorable { r } => s * LN_2 / *r as f64,
            GrowthProfile::Clique { r } => (s.powf(1.0 / *r as f64) - 1.0) * LN_2,
            GrowthProfile::RandomGraph { p } => s.ln().powi(2) / (3.0 * (1.0 / p).ln()),
            GrowthProfile::Custom(c) => (c.ln_g)(s),
        }
    }

    pub fn g(&self, s: f64) -> f64 {
        self.ln_g(s).exp()
    }

    pub fn psi(&self, s: f64) -> f64 {
        match self {
            GrowthProfile::Colorable { r } => s * LN_2 / *r as f64,
            GrowthProfile::Clique { r } => LN_2 * s.powf(1.0 / *r as f64) / *r as f64,
            GrowthProfile::RandomGraph { p } => 2.0 * s.ln() / (3.0 * (1.0 / p).ln()),
            GrowthProfile::Custom(c) => (c.psi)(s),
        }
    }

    pub fn psi_nondecreasing(&self) -> bool {
        match self {
            GrowthProfile::Custom(c) => c.psi_nondecreasing,
            _ => true,
        }
    }

    /// For the colorable profile, the smallest integer `γ` with
    /// `(eγ)^{1/γ} <= 2^{1/(2r)}` and `γ >= 2r / ln 2`.
    pub fn gamma(&self) -> Option<u64> {
        let GrowthProfile::Colorable { r } = self else {
            return None;
        };
        let r = *r as f64;
        let rhs = LN_2 / (2.0 * r);
        (1u64..).find(|&gm| {
            let gf = gm as f64;
            (E * gf).ln() / gf <= rhs && gf >= 2.0 * r / LN_2
        })
    }

    /// The profile's own choice of `b(Δ)`, clamped to be nonnegative.
    pub fn b_formula(&self, delta: &MaxDegree) -> Result<BChoice> {
        match self {
            GrowthProfile::Colorable { .. } => {
                let s = s_delta(self, delta)?;
                let gamma = self.gamma().expect("colorable");
                Ok(BChoice {
                    b: s / gamma,
                    constant: None,
                })
            }
            GrowthProfile::Clique { r } => {
                // c * ln Δ / (r ln ln Δ), starting at c = 1/4 and halving
                // until the verifier accepts.
                let ln_d = delta.ln();
                if ln_d <= 1.0 {
                    return Ok(BChoice { b: 0, constant: None });
                }
                let expr = ln_d / (*r as f64 * ln_d.ln());
                let mut c = 0.25;
                loop {
                    let b = (c * expr).floor().max(0.0) as u64;
                    if b == 0 {
                        return Ok(BChoice {
                            b: 0,
                            constant: Some(c),
                        });
                    }
                    if verify_obsver(self, delta, b)?.certified {
                        return Ok(BChoice { b, constant: Some(c) });
                    }
                    c /= 2.0;
                }
            }
            GrowthProfile::RandomGraph { p } => {
                // floor((1/6) sqrt(ln Δ / ln(1/p))) - 1, natural logs.
                let x = (delta.ln().max(0.0) / (1.0 / p).ln()).sqrt() / 6.0;
                let b = (x.floor() as i64 - 1).max(0) as u64;
                Ok(BChoice { b, constant: None })
            }
            GrowthProfile::Custom(_) => Err(Error::Profile("custom profiles have no b formula".into())),
        }
    }
}

/// `s_Δ = ceil(g^{-1}(Δ^{1/3}))`: the least integer `s >= 1` with
/// `ln g(s) >= ln(Δ) / 3` (up to a relative tolerance of 1e-12, so that exact
/// boundary cases such as `g(40) = 2^20 = (2^60)^{1/3}` are not lost to rounding).
pub fn s_delta(profile: &GrowthProfile, delta: &MaxDegree) -> Result<u64> {
    if !(delta.ln() >= 0.0) {
        return Err(Error::param("s_delta needs delta >= 1"));
    }
    let target = delta.ln() / 3.0;
    let tol = 1e-12 * target.abs().max(1.0);
    let reaches = |s: u64| profile.ln_g(s as f64) >= target - tol;
    if reaches(1) {
        return Ok(1);
    }
    let mut lo = 1u64;
    let mut hi = 2u64;
    while !reaches(hi) {
        if !(profile.ln_g(hi as f64) > profile.ln_g(lo as f64)) {
            return Err(Error::Profile(format!(
                "{} is not increasing on [{lo}, {hi}]",
                profile.name()
            )));
        }
        lo = hi;
        hi = hi
            .checked_mul(2)
            .filter(|&h| h <= 1 << 62)
            .ok_or_else(|| Error::Profile(format!("{} does not reach Δ^(1/3) below 2^62", profile.name())))?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if reaches(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObsVerReport {
    pub profile: String,
    pub ln_delta: f64,
    pub s_delta: u64,
    pub b: u64,
    /// `C(s_Δ, b) <= Δ^{1/3} / 4`.
    pub cond_main: bool,
    /// `ln C(s_Δ, b)`.
    pub main_lhs_ln: f64,
    /// `ln Δ / 3 - ln 4`.
    pub main_rhs_ln: f64,
    /// Exact verdict `64 C(s_Δ, b)^3 <= Δ`, when Δ is an exact integer and
    /// `s_Δ <= EXACT_CUTOFF`. Authoritative when present.
    pub main_exact: Option<bool>,
    /// `b <= s_Δ / 3`.
    pub cond_tub: bool,
    /// `psi(s) >= 2b` for all `s >= s_Δ`.
    pub cond_der: bool,
    /// Smallest `psi(s)` seen on the checked range.
    pub der_lhs: f64,
    pub der_rhs: f64,
    /// True when `psi` is not known to be monotone and the derivative condition was only
    /// checked on a geometric grid.
    pub der_grid_checked: bool,
    pub certified: bool,
}

const GRID_POINTS: usize = 4000;
const GRID_SPAN: f64 = 1e6;
/// Relative margin demanded of `psi` on grid points.
const GRID_MARGIN: f64 = 1e-9;

/// Evaluates the three sufficient conditions for b-IS-richness.
pub fn verify_obsver(profile: &GrowthProfile, delta: &MaxDegree, b: u64) -> Result<ObsVerReport> {
    let s = s_delta(profile, delta)?;
    let main_lhs_ln = if b > s { f64::NEG_INFINITY } else { ln_binomial(s, b) };
    let main_rhs_ln = delta.ln() / 3.0 - 4f64.ln();
    let main_exact = match delta.exact() {
        Some(d) if s <= EXACT_CUTOFF => Some(binomial(s, b).pow(3) * 64u32 <= *d),
        _ => None,
    };
    let cond_main = main_exact.unwrap_or(main_lhs_ln <= main_rhs_ln + 1e-12 * main_rhs_ln.abs().max(1.0));
    let cond_tub = 3 * b <= s;

    let der_rhs = 2.0 * b as f64;
    let (der_lhs, cond_der, grid) = if profile.psi_nondecreasing() {
        let v = profile.psi(s as f64);
        (v, v >= der_rhs - 1e-12 * der_rhs.max(1.0), false)
    } else {
        let lo = (s as f64).ln();
        let step = GRID_SPAN.ln() / (GRID_POINTS - 1) as f64;
        let min = (0..GRID_POINTS)
            .map(|i| profile.psi((lo + step * i as f64).exp()))
            .fold(f64::INFINITY, f64::min);
        (min, min >= der_rhs * (1.0 + GRID_MARGIN), true)
    };

    Ok(ObsVerReport {
        profile: profile.name(),
        ln_delta: delta.ln(),
        s_delta: s,
        b,
        cond_main,
        main_lhs_ln,
        main_rhs_ln,
        main_exact,
        cond_tub,
        cond_der,
        der_lhs,
        der_rhs,
        der_grid_checked: grid,
        certified: cond_main && cond_tub && cond_der,
    })
}

/// Largest `b` certified by [`verify_obsver`], scanning upward from 0 until
/// the binomial or size condition fails. Returns 0 if nothing is certified.
pub fn max_verified_b(profile: &GrowthProfile, delta: &MaxDegree) -> Result<u64> {
    let mut best = 0;
    for b in 0u64.. {
        let r = verify_obsver(profile, delta, b)?;
        if !(r.cond_main && r.cond_tub) {
            break;
        }
        if r.cond_der {
            best = b;
        }
    }
    Ok(best)
}

/// The three named growth profiles with the given parameters, plus the
/// triangle-free formula (which does not route through a growth profile).
pub fn builtin_profiles(r_colorable: u32, r_clique: u32, p: f64) -> Result<[GrowthProfile; 3]> {
    Ok([
        GrowthProfile::colorable(r_colorable)?,
        GrowthProfile::clique(r_clique)?,
        GrowthProfile::random_graph(p)?,
    ])
}
