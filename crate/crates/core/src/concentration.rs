//! Expected independent-set counts in random graphs and the tail bounds
//! used to show concentration, with Monte Carlo experiments that check them.
//!
//! Convention: `expected_is_count`, `dependency_quantities`, `lower_tail_bound`
//! and [`run_concentration_experiment`] take the **non-edge** probability
//! `p` and sample `G(s, 1 - p)` (edge probability `1 - p`).
//! [`run_alpha_experiment`] instead takes the **edge** probability `p` of
//! `G(s, p)`. All logarithms are natural.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed};
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};
use crate::graph::{random_graph, BitIter, Graph};
use crate::iscount::independence_number;
use crate::rng::Seed;

fn c2(t: u64) -> u64 {
    t * t.saturating_sub(1) / 2
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::param(format!("probability {p} outside (0,1]")));
    }
    Ok(())
}

/// `ln I_p(s,t) = ln C(s,t) + C(t,2) ln p`.
pub fn ln_expected_is_count(s: u64, t: u64, p: f64) -> Result<f64> {
    check_p(p)?;
    if t > s {
        return Err(Error::param(format!("t={t} exceeds s={s}")));
    }
    let tail = if c2(t) == 0 { 0.0 } else { c2(t) as f64 * p.ln() };
    Ok(ln_binomial(s, t) + tail)
}

/// `I_p(s,t) = C(s,t) p^{C(t,2)}`: expected number of size-`t` independent
/// sets in `G(s, 1 - p)`.
pub fn expected_is_count(s: u64, t: u64, p: f64) -> Result<f64> {
    Ok(ln_expected_is_count(s, t, p)?.exp())
}

/// Exact `I_p(s,t)` for rational `p`.
pub fn expected_is_count_exact(s: u64, t: u64, p: &BigRational) -> Result<BigRational> {
    if !p.is_positive() || *p > BigRational::one() {
        return Err(Error::param("probability outside (0,1]"));
    }
    if t > s {
        return Err(Error::param(format!("t={t} exceeds s={s}")));
    }
    let c = BigInt::from(crate::richness::binomial(s, t));
    Ok(BigRational::from_integer(c) * Pow::pow(p, c2(t)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalT {
    pub t: u64,
    pub value: f64,
    /// `ln s / ln(1/p)`, the continuous estimate of the maximiser.
    pub continuous_estimate: f64,
}

/// Integer `t ∈ [1, s]` maximising `I_p(s,t)`, ties to the smaller `t`.
pub fn optimal_t(s: u64, p: f64) -> Result<OptimalT> {
    if !(p > 0.0 && p < 1.0) || s < 1 {
        return Err(Error::param("optimal_t needs 0 < p < 1 and s >= 1"));
    }
    let mut best = (1, ln_expected_is_count(s, 1, p)?);
    for t in 2..=s {
        let v = ln_expected_is_count(s, t, p)?;
        if v > best.1 {
            best = (t, v);
        } else if v < best.1 - 50.0 {
            // log-concave in t: once far below the max it only decreases
            break;
        }
    }
    Ok(OptimalT {
        t: best.0,
        value: best.1.exp(),
        continuous_estimate: (s as f64).ln() / (1.0 / p).ln(),
    })
}

/// Inputs of Suen's inequality for the size-`t` independent-set indicators
/// of `G(s, 1 - p)`, with dependency graph "share at least two vertices".
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DependencyQuantities {
    pub mu: f64,
    pub d: f64,
    #[serde(rename = "D")]
    pub big_d: f64,
    /// `2 p^{C(t,2)} C(t,2) C(s,t-2)`.
    pub d_relaxed: f64,
    /// `C(s,t) p^{2C(t,2)-1} C(t,2) C(s,t-2)`.
    pub big_d_relaxed: f64,
    /// The dependency graph has no edges (`t < 3`).
    pub edgeless: bool,
}

/// Exact `μ`, `d` and `D`:
///
/// * `d = p^{C(t,2)} Σ_{i=2}^{t-1} C(t,i) C(s-t,t-i)`
/// * `D = ½ C(s,t) p^{2C(t,2)} Σ_{i=2}^{t-1} C(t,i) C(s-t,t-i) p^{-C(i,2)}`
pub fn dependency_quantities(s: u64, t: u64, p: f64) -> Result<DependencyQuantities> {
    let ln_mu = ln_expected_is_count(s, t, p)?;
    let lp = p.ln();
    let mu = ln_mu.exp();
    if t < 3 {
        return Ok(DependencyQuantities {
            mu,
            d: 0.0,
            big_d: 0.0,
            d_relaxed: if t == 2 { relaxed_d(s, t, lp) } else { 0.0 },
            big_d_relaxed: if t == 2 { relaxed_big_d(s, t, lp) } else { 0.0 },
            edgeless: true,
        });
    }
    let pt = c2(t) as f64 * lp;
    let mut d = 0.0;
    let mut big_d = 0.0;
    for i in 2..t {
        if t - i > s - t {
            continue;
        }
        let ln_pairs = ln_binomial(t, i) + ln_binomial(s - t, t - i);
        d += (ln_pairs + pt).exp();
        big_d += (ln_binomial(s, t) + 2.0 * pt + ln_pairs - c2(i) as f64 * lp).exp();
    }
    Ok(DependencyQuantities {
        mu,
        d,
        big_d: big_d / 2.0,
        d_relaxed: relaxed_d(s, t, lp),
        big_d_relaxed: relaxed_big_d(s, t, lp),
        edgeless: false,
    })
}

fn relaxed_d(s: u64, t: u64, lp: f64) -> f64 {
    (2f64.ln() + c2(t) as f64 * lp + (c2(t) as f64).ln() + ln_binomial(s, t - 2)).exp()
}

fn relaxed_big_d(s: u64, t: u64, lp: f64) -> f64 {
    (ln_binomial(s, t) + (2 * c2(t) - 1) as f64 * lp + (c2(t) as f64).ln() + ln_binomial(s, t - 2)).exp()
}

/// Suen's inequality with `a = 1/2`:
/// `P[X <= μ/2] <= exp(-min(μ² / (32D + 8μ), μ / (12d)))`.
pub fn suen_bound(q: &DependencyQuantities) -> Result<f64> {
    if !(q.mu > 0.0) || !(q.d > 0.0) || q.big_d < 0.0 {
        return Err(Error::param("Suen's bound needs mu > 0, d > 0, D >= 0"));
    }
    let exponent = (q.mu * q.mu / (32.0 * q.big_d + 8.0 * q.mu)).min(q.mu / (12.0 * q.d));
    Ok(if exponent <= 0.0 { 1.0 } else { (-exponent).exp() })
}

/// `exp(-s² p / (80 t⁴))`, valid when `s >= 2t² + t` and `I_p(s,t) >= s²/t⁴`.
pub fn lower_tail_bound(s: u64, t: u64, p: f64) -> Result<f64> {
    check_p(p)?;
    if t == 0 {
        return Err(Error::param("t must be positive"));
    }
    if s < 2 * t * t + t {
        return Err(Error::Precondition(format!(
            "s >= 2t^2 + t fails: {s} < {}",
            2 * t * t + t
        )));
    }
    let mu = expected_is_count(s, t, p)?;
    let need = (s * s) as f64 / (t as f64).powi(4);
    if mu < need {
        return Err(Error::Precondition(format!("I_p(s,t) >= s^2/t^4 fails: {mu} < {need}")));
    }
    Ok((-((s * s) as f64) * p / (80.0 * (t as f64).powi(4))).exp())
}

/// `g_p(s) = exp(ln² s / (3 ln(1/p)))`.
pub fn g_p_value(s: f64, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) || !(s >= 1.0) {
        return Err(Error::param("g_p needs 0 < p < 1 and s >= 1"));
    }
    Ok((s.ln().powi(2) / (3.0 * (1.0 / p).ln())).exp())
}

/// Chernoff tail `P[X >= t] <= e^{-t/8}` for `t >= 2μ`.
pub fn chernoff_tail(mu: f64, t: f64) -> Result<f64> {
    if !(t >= 2.0 * mu) {
        return Err(Error::param(format!("Chernoff tail needs t >= 2 mu (t={t}, mu={mu})")));
    }
    Ok((-t / 8.0).exp())
}

/// `A(s, n) = min(s/15, ln² n)`.
pub fn a_threshold(s: f64, n: f64) -> f64 {
    (s / 15.0).min(n.ln().powi(2))
}

/// Number of independent sets of size exactly `t` (graphs up to 64 vertices).
pub fn count_size_t(g: &Graph, t: usize) -> Result<u64> {
    if g.n() > 64 {
        return Err(Error::Resource {
            what: "size-t enumeration",
            size: g.n(),
            limit: 64,
        });
    }
    if t == 0 {
        return Ok(1);
    }
    let adj: Vec<u64> = (0..g.n()).map(|v| g.row_mask(v)).collect();
    let all = if g.n() == 64 { u64::MAX } else { (1u64 << g.n()) - 1 };
    Ok(count_rec(&adj, all, t))
}

fn count_rec(adj: &[u64], cand: u64, left: usize) -> u64 {
    if left == 1 {
        return cand.count_ones() as u64;
    }
    if (cand.count_ones() as usize) < left {
        return 0;
    }
    let mut total = 0;
    let mut rest = cand;
    for v in BitIter(cand) {
        rest &= !(1u64 << v);
        // v is the smallest chosen vertex; later picks come from `rest`.
        total += count_rec(adj, rest & !adj[v], left - 1);
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialRow {
    pub trial: u64,
    pub seed: u64,
    pub count: u64,
    pub alpha: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcReport {
    pub s: u64,
    pub t: u64,
    /// Non-edge probability.
    pub p: f64,
    pub trials: u64,
    pub mu: f64,
    pub empirical_mean: f64,
    /// Fraction of trials with at most `μ/2` independent sets of size `t`.
    pub empirical_tail_freq: f64,
    pub analytic_suen: Option<f64>,
    pub analytic_tail: Option<f64>,
    pub preconditions_ok: bool,
}

/// Subset-check budget for one experiment.
pub const SUBSET_BUDGET: f64 = 1e10;

/// Samples `trials` graphs `G(s, 1 - p)` (non-edge probability `p`) and counts
/// their size-`t` independent sets.
pub fn run_concentration_experiment(
    s: u64,
    t: u64,
    p: f64,
    trials: u64,
    seed: Seed,
) -> Result<(ConcReport, Vec<TrialRow>)> {
    check_p(p)?;
    if s > 64 || t > s {
        return Err(Error::param("need t <= s <= 64"));
    }
    let cost = ln_binomial(s, t).exp() * trials as f64;
    if cost > SUBSET_BUDGET && s > 40 {
        return Err(Error::Resource {
            what: "concentration experiment subset checks",
            size: cost.min(usize::MAX as f64) as usize,
            limit: SUBSET_BUDGET as usize,
        });
    }
    let mu = expected_is_count(s, t, p)?;
    let rows: Vec<TrialRow> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let ts = seed.derive(trial);
            // G(s, 1 - p): edge probability is 1 - p.
            let g = random_graph(s as usize, 1.0 - p, ts)?;
            Ok(TrialRow {
                trial,
                seed: ts.value(),
                count: count_size_t(&g, t as usize)?,
                alpha: independence_number(&g)?,
            })
        })
        .collect::<Result<_>>()?;

    let n = trials.max(1) as f64;
    let empirical_mean = rows.iter().map(|r| r.count as f64).sum::<f64>() / n;
    let tail = rows.iter().filter(|r| (r.count as f64) <= mu / 2.0).count() as f64 / n;
    let tail_bound = lower_tail_bound(s, t, p).ok();
    let suen = dependency_quantities(s, t, p).ok().and_then(|q| suen_bound(&q).ok());
    Ok((
        ConcReport {
            s,
            t,
            p,
            trials,
            mu,
            empirical_mean,
            empirical_tail_freq: tail,
            analytic_suen: suen,
            analytic_tail: tail_bound,
            preconditions_ok: tail_bound.is_some(),
        },
        rows,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AlphaRow {
    pub trial: u64,
    pub seed: u64,
    pub alpha: usize,
    pub edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaReport {
    pub s: u64,
    pub n: f64,
    /// Edge probability.
    pub p: f64,
    pub trials: u64,
    pub threshold: f64,
    pub hits: u64,
    /// Fraction of trials with `α(G(s,p)) <= A(s,n)`.
    pub empirical_freq: f64,
    /// `n^{-3s}` and its natural logarithm.
    pub analytic_bound: f64,
    pub ln_analytic_bound: f64,
    pub precondition_ok: bool,
}

/// Samples `G(s, p)` with **edge** probability `p` and records how often
/// `α <= A(s, n)`. Requires `p <= n^{-13/14}` unless `allow_any_p`.
pub fn run_alpha_experiment(
    s: u64,
    n: f64,
    p: f64,
    trials: u64,
    seed: Seed,
    allow_any_p: bool,
) -> Result<(AlphaReport, Vec<AlphaRow>)> {
    if !(n >= 1.0) || !(0.0..=1.0).contains(&p) {
        return Err(Error::param("need n >= 1 and 0 <= p <= 1"));
    }
    let limit = n.powf(-13.0 / 14.0);
    let precondition_ok = p <= limit * (1.0 + 1e-12);
    if !precondition_ok && !allow_any_p {
        return Err(Error::Precondition(format!("p = {p} exceeds n^(-13/14) = {limit}")));
    }
    let threshold = a_threshold(s as f64, n);
    let rows: Vec<AlphaRow> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let ts = seed.derive(trial);
            let g = random_graph(s as usize, p, ts)?;
            Ok(AlphaRow {
                trial,
                seed: ts.value(),
                alpha: independence_number(&g)?,
                edges: g.edge_count(),
            })
        })
        .collect::<Result<_>>()?;
    let hits = rows.iter().filter(|r| r.alpha as f64 <= threshold).count() as u64;
    let ln_bound = -3.0 * s as f64 * n.ln();
    Ok((
        AlphaReport {
            s,
            n,
            p,
            trials,
            threshold,
            hits,
            empirical_freq: hits as f64 / trials.max(1) as f64,
            analytic_bound: ln_bound.exp(),
            ln_analytic_bound: ln_bound,
            precondition_ok,
        },
        rows,
    ))
}

/// Exact rational from a float probability with denominator `2^16` or less,
/// when `p` is exactly such a dyadic-or-small fraction.
pub fn small_rational(p: f64) -> Option<BigRational> {
    for den in 1u32..=(1 << 16) {
        let num = (p * den as f64).round();
        if (num / den as f64 - p).abs() <= f64::EPSILON * p.abs().max(1.0) {
            return Some(BigRational::new(BigInt::from(num as i64), BigInt::from(den)));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iscount::count_profile;
    use std::f64::consts::E;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn expected_count_examples() {
        assert!((expected_is_count(4, 2, 0.5).unwrap() - 3.0).abs() < 1e-12);
        assert!((expected_is_count(17, 1, 0.3).unwrap() - 17.0).abs() < 1e-9);
        assert_eq!(expected_is_count_exact(55, 5, &q(1, 2)).unwrap(), q(3478761, 1024));
        assert!((expected_is_count(55, 5, 0.5).unwrap() - 3397.2275390625).abs() < 1e-8);
        assert!(expected_is_count(3, 4, 0.5).is_err());
        assert!(expected_is_count(3, 1, 0.0).is_err());
    }

    #[test]
    fn optimal_t_examples() {
        let o = optimal_t(55, 0.5).unwrap();
        assert_eq!(o.t, 4);
        assert!((o.value - 5328.984375).abs() < 1e-6);
        assert_eq!(optimal_t(4, 0.5).unwrap().t, 1);
        assert_eq!(optimal_t(1, 0.3).unwrap().t, 1);
    }

    #[test]
    fn suen_examples() {
        let mk = |mu, d, big_d| DependencyQuantities {
            mu,
            d,
            big_d,
            d_relaxed: 0.0,
            big_d_relaxed: 0.0,
            edgeless: false,
        };
        assert!((suen_bound(&mk(10.0, 1.0, 0.0)).unwrap() - (-5.0f64 / 6.0).exp()).abs() < 1e-12);
        assert!((suen_bound(&mk(8.0, 1.0, 1.0)).unwrap() - (-2.0f64 / 3.0).exp()).abs() < 1e-12);
        assert!(suen_bound(&mk(8.0, 2.0, 1.0)).unwrap() >= suen_bound(&mk(8.0, 1.0, 1.0)).unwrap());
        assert!(suen_bound(&mk(8.0, 1.0, 5.0)).unwrap() >= suen_bound(&mk(8.0, 1.0, 1.0)).unwrap());
        assert!(suen_bound(&mk(0.0, 1.0, 1.0)).is_err());
        assert!(suen_bound(&mk(1.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn dependency_examples() {
        let dq = dependency_quantities(5, 3, 0.5).unwrap();
        assert!((dq.mu - 1.25).abs() < 1e-12);
        assert!((dq.d - 0.75).abs() < 1e-12);
        assert!((dq.big_d - 0.9375).abs() < 1e-12);
        let two = dependency_quantities(9, 2, 0.5).unwrap();
        assert!(two.edgeless && two.d == 0.0 && two.big_d == 0.0);
        assert!(dependency_quantities(3, 5, 0.5).is_err());
    }

    #[test]
    fn lower_tail_examples() {
        assert!((lower_tail_bound(55, 5, 0.5).unwrap() - (-0.03025f64).exp()).abs() < 1e-12);
        assert!(matches!(lower_tail_bound(30, 5, 0.5), Err(Error::Precondition(_))));
        assert!((lower_tail_bound(200, 5, 0.5).unwrap() - (-0.4f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn small_formulas() {
        assert_eq!(g_p_value(1.0, 0.3).unwrap(), 1.0);
        assert!((g_p_value(E.powi(3), 1.0 / E).unwrap() - E.powi(3)).abs() < 1e-9);
        assert!((g_p_value(E.powi(6), 1.0 / E).unwrap() - 162754.791419).abs() < 1e-3);
        assert!((chernoff_tail(1.0, 2.0).unwrap() - (-0.25f64).exp()).abs() < 1e-15);
        assert_eq!(chernoff_tail(0.0, 0.0).unwrap(), 1.0);
        assert!(chernoff_tail(1.0, 1.0).is_err());
        assert!((a_threshold(30.0, E.powi(3)) - 2.0).abs() < 1e-12);
        assert!((a_threshold(150.0, E.powi(3)) - 9.0).abs() < 1e-9);
        assert_eq!(a_threshold(0.0, 50.0), 0.0);
    }

    #[test]
    fn size_t_counts_match_profile() {
        for s in 0..20 {
            let g = random_graph(18, 0.4, Seed(s)).unwrap();
            let p = count_profile(&g).unwrap();
            for t in 0..=6 {
                let want = p.counts.get(t).map(|c| u64::try_from(c).unwrap()).unwrap_or(0);
                assert_eq!(count_size_t(&g, t).unwrap(), want);
            }
        }
    }

    #[test]
    fn concentration_small() {
        let (rep, rows) = run_concentration_experiment(4, 2, 0.5, 10_000, Seed(1)).unwrap();
        assert_eq!(rows.len(), 10_000);
        assert!((rep.empirical_mean - 3.0).abs() < 0.1, "{}", rep.empirical_mean);

        let (rep, rows) = run_concentration_experiment(12, 3, 1.0, 5, Seed(1)).unwrap();
        assert!(rows.iter().all(|r| r.count == 220));
        assert_eq!(rep.empirical_mean, 220.0);
    }

    #[test]
    fn alpha_small() {
        let (rep, _) = run_alpha_experiment(15, 1e6, 0.0, 20, Seed(2), false).unwrap();
        assert_eq!(rep.threshold, 1.0);
        assert_eq!(rep.hits, 0);
        assert!(run_alpha_experiment(15, 1e4, 0.5, 2, Seed(2), false).is_err());
        assert!(run_alpha_experiment(15, 1e4, 0.5, 2, Seed(2), true).is_ok());
    }

    #[test]
    fn small_rational_detection() {
        assert_eq!(small_rational(0.5), Some(q(1, 2)));
        assert_eq!(small_rational(0.375), Some(q(3, 8)));
        assert_eq!(small_rational(std::f64::consts::PI / 10.0), None);
    }
}
