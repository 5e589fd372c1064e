//! Deciding and finding `(L, M)`-colourings.
//!
//! [`decide_colorable`] is a complete backtracking search and is the only
//! routine that may answer `Unsat`. [`lll_color`] is a constructive
//! resampling heuristic built on the neighbourhood kernel
//! [`resample_neighborhood`]; it never proves non-colourability and stops at
//! a round cap.
//!
//! The neighbourhood kernel processes the colours of `u` in ascending order.
//! For colour `c`, `R_c` is the set of neighbours `v` whose colour `c'` is
//! matched to `(u, c)`. Vertices of `R_c` holding `c'` are uncoloured; among
//! the uncoloured vertices of `R_c`, those where `c'` is usable form the cover
//! subgraph `F_c`, and a uniformly random independent set of `F_c` is
//! coloured. Each step maps the uniform distribution on partial colourings
//! with `u` uncoloured to itself.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::correspondence::{available_colors, is_usable, Color, CorrespondenceAssignment, PartialColoring};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::iscount::sample_independent_set_with;
use crate::rng::Seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Colored,
    Unsat,
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SolveStats {
    /// Search nodes (colour assignments tried) for the exact solver.
    pub nodes: u64,
    pub resample_rounds: u64,
    /// Wall time; kept out of serialized output so reruns are byte-identical.
    #[serde(skip)]
    pub elapsed: Duration,
    /// Partial colouring held when the resampling driver hit its cap.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surviving: Option<PartialColoring>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub coloring: Option<PartialColoring>,
    pub stats: SolveStats,
}

impl SolveResult {
    pub fn is_colored(&self) -> bool {
        self.status == SolveStatus::Colored
    }
}

/// Default node budget for the exact solver.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

struct Search {
    lists: Vec<Vec<Color>>,
    /// For each vertex, its neighbours with the partner list index of each of
    /// the vertex's own list indices.
    links: Vec<Vec<(usize, Vec<Option<u32>>)>>,
    blocked: Vec<Vec<u32>>,
    avail: Vec<u32>,
    assigned: Vec<Option<u32>>,
    nodes: u64,
    budget: u64,
}

enum Outcome {
    Found,
    Exhausted,
    Budget,
}

impl Search {
    fn new(ca: &CorrespondenceAssignment, budget: u64) -> Self {
        let n = ca.n();
        let lists: Vec<Vec<Color>> = (0..n).map(|v| ca.list(v).to_vec()).collect();
        let links = (0..n)
            .map(|v| {
                ca.base()
                    .neighbors(v)
                    .map(|w| {
                        let part = lists[v]
                            .iter()
                            .map(|&c| {
                                ca.partner(v, c, w)
                                    .map(|cw| lists[w].binary_search(&cw).expect("partner in list") as u32)
                            })
                            .collect();
                        (w, part)
                    })
                    .collect()
            })
            .collect();
        Search {
            blocked: lists.iter().map(|l| vec![0; l.len()]).collect(),
            avail: lists.iter().map(|l| l.len() as u32).collect(),
            assigned: vec![None; n],
            lists,
            links,
            nodes: 0,
            budget,
        }
    }

    /// Assigns list index `i` to `v`; returns false on a domain wipe-out
    /// (the assignment is still recorded and must be undone).
    fn assign(&mut self, v: usize, i: usize) -> bool {
        self.assigned[v] = Some(i as u32);
        let mut ok = true;
        for (w, part) in &self.links[v] {
            if self.assigned[*w].is_some() {
                continue;
            }
            if let Some(j) = part[i] {
                let b = &mut self.blocked[*w][j as usize];
                *b += 1;
                if *b == 1 {
                    self.avail[*w] -= 1;
                    if self.avail[*w] == 0 {
                        ok = false;
                    }
                }
            }
        }
        ok
    }

    fn unassign(&mut self, v: usize, i: usize) {
        self.assigned[v] = None;
        for (w, part) in &self.links[v] {
            if self.assigned[*w].is_some() {
                continue;
            }
            if let Some(j) = part[i] {
                let b = &mut self.blocked[*w][j as usize];
                *b -= 1;
                if *b == 0 {
                    self.avail[*w] += 1;
                }
            }
        }
    }

    fn run(&mut self) -> Outcome {
        // Smallest availability first, ties by index.
        let Some(v) = (0..self.assigned.len())
            .filter(|&v| self.assigned[v].is_none())
            .min_by_key(|&v| (self.avail[v], v))
        else {
            return Outcome::Found;
        };
        if self.avail[v] == 0 {
            return Outcome::Exhausted;
        }
        for i in 0..self.lists[v].len() {
            if self.blocked[v][i] != 0 {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Outcome::Budget;
            }
            if self.assign(v, i) {
                match self.run() {
                    Outcome::Exhausted => {}
                    other => return other,
                }
            }
            self.unassign(v, i);
        }
        Outcome::Exhausted
    }
}

/// Exact decision by backtracking with forward checking. `Unsat` is a proof
/// that no `(L, M)`-colouring exists.
pub fn decide_colorable(ca: &CorrespondenceAssignment, budget: u64) -> SolveResult {
    let start = Instant::now();
    let mut search = Search::new(ca, budget);
    let outcome = search.run();
    let stats = SolveStats {
        nodes: search.nodes,
        elapsed: start.elapsed(),
        ..SolveStats::default()
    };
    match outcome {
        Outcome::Found => {
            let coloring = PartialColoring::from_vec(
                search
                    .assigned
                    .iter()
                    .enumerate()
                    .map(|(v, i)| i.map(|i| search.lists[v][i as usize]))
                    .collect(),
            );
            debug_assert!(crate::correspondence::validate(ca, &coloring).valid);
            SolveResult {
                status: SolveStatus::Colored,
                coloring: Some(coloring),
                stats,
            }
        }
        Outcome::Exhausted => SolveResult {
            status: SolveStatus::Unsat,
            coloring: None,
            stats,
        },
        Outcome::Budget => SolveResult {
            status: SolveStatus::BudgetExceeded,
            coloring: None,
            stats,
        },
    }
}

/// Colours the uncoloured vertices of `order` in turn with their smallest
/// available colour, skipping vertices with none. Never uncolours.
pub fn greedy_extend(ca: &CorrespondenceAssignment, phi: &PartialColoring, order: &[usize]) -> PartialColoring {
    let mut out = phi.clone();
    for &v in order {
        if out.is_colored(v) {
            continue;
        }
        if let Some(&c) = ca.list(v).iter().find(|&&c| is_usable(ca, &out, v, c)) {
            out.set(v, c);
        }
    }
    out
}

/// Smallest integer `k` with `k >= Δ^{7/12}`, so that an integer count `x`
/// satisfies `x < Δ^{7/12}` exactly when `x < k`.
pub fn threshold_7_12(delta: u64) -> u64 {
    let target = BigUint::from(delta).pow(7);
    let approx = (delta as f64).powf(7.0 / 12.0).floor() as u64;
    let mut k = approx.saturating_sub(2);
    while BigUint::from(k).pow(12) < target {
        k += 1;
    }
    k
}

/// `A_u`: `u` is uncoloured and fewer than `Δ^{7/12}` colours are available.
pub fn event_au(ca: &CorrespondenceAssignment, phi: &PartialColoring, u: usize, delta: u64) -> bool {
    !phi.is_colored(u) && (available_colors(ca, phi, u).len() as u64) < threshold_7_12(delta)
}

/// `B_S`: every vertex of `set` is uncoloured with `A_x` false.
pub fn event_bs(ca: &CorrespondenceAssignment, phi: &PartialColoring, set: &[usize], delta: u64) -> bool {
    set.iter().all(|&x| !phi.is_colored(x) && !event_au(ca, phi, x, delta))
}

/// `B_u`: at least `Δ^{7/12}` neighbours `x` of `u` are uncoloured with
/// `A_x` false.
pub fn event_bu(ca: &CorrespondenceAssignment, phi: &PartialColoring, u: usize, delta: u64) -> bool {
    let good = ca
        .base()
        .neighbors(u)
        .filter(|&x| !phi.is_colored(x) && !event_au(ca, phi, x, delta))
        .count() as u64;
    good >= threshold_7_12(delta)
}

/// One colour step of the kernel: the cover nodes `(v, c')` that may receive
/// their colour, and the conflicts among them.
struct ColorStep {
    targets: Vec<(usize, Color)>,
    conflicts: Graph,
}

fn begin_step(ca: &CorrespondenceAssignment, phi: &mut PartialColoring, u: usize, c: Color) -> ColorStep {
    let r: Vec<(usize, Color)> = ca
        .base()
        .neighbors(u)
        .filter_map(|v| ca.partner(u, c, v).map(|cv| (v, cv)))
        .collect();
    for &(v, cv) in &r {
        if phi.get(v) == Some(cv) {
            phi.unset(v);
        }
    }
    let targets: Vec<(usize, Color)> = r
        .into_iter()
        .filter(|&(v, cv)| !phi.is_colored(v) && is_usable(ca, phi, v, cv))
        .collect();
    let mut conflicts = Graph::empty(targets.len());
    for (i, &(v, cv)) in targets.iter().enumerate() {
        for (j, &(w, cw)) in targets.iter().enumerate().skip(i + 1) {
            if ca.conflicts(v, cv, w, cw) {
                conflicts.insert_edge(i, j);
            }
        }
    }
    ColorStep { targets, conflicts }
}

fn check_kernel_input(ca: &CorrespondenceAssignment, phi: &PartialColoring, u: usize) -> Result<()> {
    if u >= ca.n() || phi.len() != ca.n() {
        return Err(Error::param("vertex or colouring does not match the assignment"));
    }
    if phi.is_colored(u) {
        return Err(Error::Precondition(format!("vertex {u} must be uncoloured")));
    }
    Ok(())
}

/// Resamples the colours around `u` (which must be uncoloured).
pub fn resample_neighborhood(
    ca: &CorrespondenceAssignment,
    phi: &PartialColoring,
    u: usize,
    seed: Seed,
) -> Result<PartialColoring> {
    resample_neighborhood_with(ca, phi, u, &mut seed.rng())
}

pub fn resample_neighborhood_with<R: Rng + ?Sized>(
    ca: &CorrespondenceAssignment,
    phi: &PartialColoring,
    u: usize,
    rng: &mut R,
) -> Result<PartialColoring> {
    check_kernel_input(ca, phi, u)?;
    let mut out = phi.clone();
    for &c in ca.list(u) {
        let step = begin_step(ca, &mut out, u, c);
        if step.targets.is_empty() {
            continue;
        }
        for i in sample_independent_set_with(&step.conflicts, rng)? {
            let (v, cv) = step.targets[i];
            out.set(v, cv);
        }
    }
    Ok(out)
}

/// Exact transition distribution of [`resample_neighborhood`] from `phi`.
pub fn resample_kernel(
    ca: &CorrespondenceAssignment,
    phi: &PartialColoring,
    u: usize,
) -> Result<BTreeMap<PartialColoring, BigRational>> {
    check_kernel_input(ca, phi, u)?;
    let mut dist = BTreeMap::new();
    dist.insert(phi.clone(), BigRational::one());
    for &c in ca.list(u) {
        let mut next: BTreeMap<PartialColoring, BigRational> = BTreeMap::new();
        for (state, p) in dist {
            let mut base = state;
            let step = begin_step(ca, &mut base, u, c);
            let k = step.targets.len();
            if k > 20 {
                return Err(Error::Resource {
                    what: "exact kernel enumeration",
                    size: k,
                    limit: 20,
                });
            }
            let sets: Vec<Vec<usize>> = (0u32..1 << k)
                .map(|m| (0..k).filter(|&i| m >> i & 1 == 1).collect::<Vec<_>>())
                .filter(|s| step.conflicts.is_independent(s))
                .collect();
            let share = &p / BigRational::from_integer(BigInt::from(sets.len()));
            for s in sets {
                let mut st = base.clone();
                for i in s {
                    let (v, cv) = step.targets[i];
                    st.set(v, cv);
                }
                *next.entry(st).or_insert_with(BigRational::zero) += &share;
            }
        }
        dist = next;
    }
    Ok(dist)
}

/// Default resampling cap, `2 n Δ^3` rounds.
pub fn default_cap(n: usize, delta: u64) -> u64 {
    2 * n as u64 * delta.max(1).pow(3)
}

/// Resampling driver: random-order greedy start, then resample around the
/// lowest-index vertex with `A_u` or `B_u`, and finish greedily once no bad
/// event remains. Returns `Colored` or `BudgetExceeded`, never `Unsat`.
pub fn lll_color(ca: &CorrespondenceAssignment, delta: u64, seed: Seed, cap: Option<u64>) -> Result<SolveResult> {
    let start = Instant::now();
    let n = ca.n();
    let delta = delta.max(1);
    let cap = cap.unwrap_or_else(|| default_cap(n, delta));
    let mut rng = seed.rng();

    let mut phi = PartialColoring::empty(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    for &v in &order {
        let avail = available_colors(ca, &phi, v);
        if let Some(&c) = avail.choose(&mut rng) {
            phi.set(v, c);
        }
    }

    let mut rounds = 0u64;
    loop {
        if phi.is_total() {
            break;
        }
        let bad = (0..n).find(|&u| event_au(ca, &phi, u, delta) || event_bu(ca, &phi, u, delta));
        let target = match bad {
            Some(u) => u,
            None => {
                let mut pending: Vec<(usize, usize)> = (0..n)
                    .filter(|&v| !phi.is_colored(v))
                    .map(|v| (available_colors(ca, &phi, v).len(), v))
                    .collect();
                pending.sort_unstable();
                let order: Vec<usize> = pending.into_iter().map(|(_, v)| v).collect();
                phi = greedy_extend(ca, &phi, &order);
                match (0..n).find(|&v| !phi.is_colored(v)) {
                    None => break,
                    Some(v) => v,
                }
            }
        };
        if rounds >= cap {
            return Ok(SolveResult {
                status: SolveStatus::BudgetExceeded,
                coloring: None,
                stats: SolveStats {
                    resample_rounds: rounds,
                    elapsed: start.elapsed(),
                    surviving: Some(phi),
                    ..SolveStats::default()
                },
            });
        }
        rounds += 1;
        phi.unset(target);
        phi = resample_neighborhood_with(ca, &phi, target, &mut rng)?;
    }
    debug_assert!(crate::correspondence::validate(ca, &phi).valid);
    Ok(SolveResult {
        status: SolveStatus::Colored,
        coloring: Some(phi),
        stats: SolveStats {
            resample_rounds: rounds,
            elapsed: start.elapsed(),
            ..SolveStats::default()
        },
    })
}

/// Greedy in index order; `Colored` only if every vertex gets a colour.
pub fn greedy_color(ca: &CorrespondenceAssignment) -> SolveResult {
    let start = Instant::now();
    let order: Vec<usize> = (0..ca.n()).collect();
    let phi = greedy_extend(ca, &PartialColoring::empty(ca.n()), &order);
    let total = phi.is_total();
    SolveResult {
        status: if total {
            SolveStatus::Colored
        } else {
            SolveStatus::BudgetExceeded
        },
        coloring: total.then(|| phi.clone()),
        stats: SolveStats {
            elapsed: start.elapsed(),
            surviving: (!total).then_some(phi),
            ..SolveStats::default()
        },
    }
}

/// `ℓ(Δ) = max(Δ_0, 2 ceil(5Δ / (2b)))`, always even unless `Δ_0` wins.
pub fn ell_for(delta: u64, b: f64, delta0: u64) -> Result<u64> {
    if !(b > 0.0) {
        return Err(Error::param(format!("b must be positive, got {b}")));
    }
    let half = (2.5 * delta as f64 / b).ceil() as u64;
    Ok(delta0.max(2 * half))
}

/// `ℓ` for the complete graph `K_n` with `b(n) = ln(n) / 21`.
pub fn ell_for_complete(n: u64, delta0: u64) -> Result<u64> {
    ell_for(n.saturating_sub(1), (n as f64).ln() / 21.0, delta0)
}
