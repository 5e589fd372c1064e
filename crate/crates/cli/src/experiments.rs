//! Seeded experiment pipelines. Each returns per-row records for CSV and a
//! summary for JSON; both are deterministic in the configuration.

use anyhow::{bail, Context, Result};
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use dpcolor_core::concentration::{
    g_p_value, run_alpha_experiment, run_concentration_experiment, AlphaReport, AlphaRow, ConcReport, TrialRow,
};
use dpcolor_core::correspondence::{build_cover_graph, random_assignment, CorrespondenceAssignment};
use dpcolor_core::graph::{random_graph, Graph};
use dpcolor_core::iscount::{count_total, independence_number};
use dpcolor_core::richness::{s_delta, verify_obsver, GrowthProfile, MaxDegree, ObsVerReport};
use dpcolor_core::solver::{decide_colorable, ell_for, lll_color, SolveStatus};
use dpcolor_core::Seed;

use crate::args::{AlphaArgs, ConcArgs, LbcomArgs, RenArgs};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetRow {
    pub index: usize,
    pub size: usize,
    /// Space-separated vertex ids of the subset.
    pub vertices: String,
    /// Exact independent-set count of the induced subgraph, in decimal.
    pub total: String,
    pub g_p: f64,
    pub exceeds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveOutcome {
    pub ell: u64,
    pub status: SolveStatus,
    /// Which solver produced `status`: `lll`, or `backtrack` after the
    /// resampler hit its cap.
    pub method: &'static str,
    pub resample_rounds: u64,
    pub nodes: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RenSummary {
    pub config: RenArgs,
    pub n: usize,
    pub edges: usize,
    pub delta: u64,
    /// `(1-p) n / 2`, the degree a typical G(n, 1-p) exceeds.
    pub delta_typical_lower: f64,
    pub s_delta: u64,
    pub b: u64,
    pub verifier: ObsVerReport,
    pub subsets_checked: usize,
    pub subsets_exceeding: usize,
    pub solve: SolveOutcome,
    /// Sanity run with ℓ = n.
    pub ceiling: SolveOutcome,
}

fn solve_with_fallback(ca: &CorrespondenceAssignment, delta: u64, seed: Seed, budget: u64) -> Result<SolveOutcome> {
    let r = lll_color(ca, delta, seed, None)?;
    let ell = ca.lists().iter().map(Vec::len).max().unwrap_or(0) as u64;
    if r.is_colored() {
        return Ok(SolveOutcome {
            ell,
            status: r.status,
            method: "lll",
            resample_rounds: r.stats.resample_rounds,
            nodes: 0,
        });
    }
    let exact = decide_colorable(ca, budget);
    Ok(SolveOutcome {
        ell,
        status: exact.status,
        method: "backtrack",
        resample_rounds: r.stats.resample_rounds,
        nodes: exact.stats.nodes,
    })
}

pub fn ren(cfg: &RenArgs) -> Result<(RenSummary, Vec<SubsetRow>)> {
    let p = cfg.nonedge_p;
    if !(p > 0.0 && p < 1.0) {
        bail!("--nonedge-p must lie in (0, 1)");
    }
    if cfg.n > 64 {
        bail!("ren needs n <= 64 for exact counting and solving");
    }
    let seed = Seed(cfg.seed);
    let g = random_graph(cfg.n, 1.0 - p, seed.derive(0))?;
    let delta = g.max_degree() as u64;
    if delta == 0 {
        bail!("generated graph has no edges");
    }
    let profile = GrowthProfile::random_graph(p)?;
    let md = MaxDegree::from_u64(delta);
    let s = s_delta(&profile, &md)?;
    let b = profile.b_formula(&md)?.b;
    let verifier = verify_obsver(&profile, &md, b)?;

    let mut rng = seed.derive(1).rng();
    let mut rows = Vec::new();
    if (s as usize) <= cfg.n {
        for index in 0..cfg.subsets {
            let size = rng.gen_range(s as usize..=cfg.n);
            let mut vs: Vec<usize> = (0..cfg.n).collect();
            vs.shuffle(&mut rng);
            vs.truncate(size);
            vs.sort_unstable();
            let sub = g.induced_subgraph(&vs)?.graph;
            let total = count_total(&sub)?;
            let g_p = g_p_value(size as f64, p)?;
            let exceeds = total.to_f64().is_some_and(|t| t > g_p);
            let ids: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
            rows.push(SubsetRow {
                index,
                size,
                vertices: ids.join(" "),
                total: total.to_string(),
                g_p,
                exceeds,
            });
        }
    }

    let ell = ell_for(delta, (b as f64).max(1.0), cfg.delta0)?;
    let ca = random_assignment(&g, ell as usize, seed.derive(2))?;
    let solve = solve_with_fallback(&ca, delta, seed.derive(3), cfg.budget)?;
    let ceiling_ca = random_assignment(&g, cfg.n, seed.derive(4))?;
    let ceiling = solve_with_fallback(&ceiling_ca, delta, seed.derive(5), cfg.budget)?;

    let summary = RenSummary {
        config: cfg.clone(),
        n: cfg.n,
        edges: g.edge_count(),
        delta,
        delta_typical_lower: (1.0 - p) * cfg.n as f64 / 2.0,
        s_delta: s,
        b,
        verifier,
        subsets_checked: rows.len(),
        subsets_exceeding: rows.iter().filter(|r| r.exceeds).count(),
        solve,
        ceiling,
    };
    Ok((summary, rows))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LbcomRow {
    pub ell: usize,
    pub c: Option<f64>,
    pub trial: u64,
    pub seed: u64,
    pub status: SolveStatus,
    pub nodes: u64,
    /// α of the cover graph restricted to one random node per vertex.
    pub plausible_alpha: usize,
    pub plausible_edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LbcomPoint {
    pub ell: usize,
    pub c: Option<f64>,
    pub trials: u64,
    pub colored: u64,
    pub unsat: u64,
    pub inconclusive: u64,
    /// Colored fraction among conclusive trials.
    pub success_fraction: Option<f64>,
    pub std_error: Option<f64>,
    pub mean_plausible_alpha: f64,
    /// Mean edge density of the plausible subgraph; about 1/ℓ.
    pub mean_plausible_density: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LbcomSummary {
    pub config: LbcomArgs,
    pub points: Vec<LbcomPoint>,
}

/// `max(1, ⌈c n / ln n⌉)`.
pub fn ell_from_c(c: f64, n: usize) -> usize {
    let v = (c * n as f64 / (n as f64).ln()).ceil();
    if v.is_finite() && v >= 1.0 {
        v as usize
    } else {
        1
    }
}

fn lbcom_trial(g: &Graph, ell: usize, c: Option<f64>, trial: u64, seed: Seed, budget: u64) -> Result<LbcomRow> {
    let ca = random_assignment(g, ell, seed)?;
    let r = decide_colorable(&ca, budget);
    let cover = build_cover_graph(&ca);
    let mut rng = seed.derive(1).rng();
    let nodes: Vec<usize> = (0..g.n())
        .map(|v| {
            let col = *ca.list(v).choose(&mut rng).expect("nonempty list");
            cover.node_index(v, col).expect("cover node")
        })
        .collect();
    let h = cover.graph.induced_subgraph(&nodes)?.graph;
    Ok(LbcomRow {
        ell,
        c,
        trial,
        seed: seed.value(),
        status: r.status,
        nodes: r.stats.nodes,
        plausible_alpha: independence_number(&h)?,
        plausible_edges: h.edge_count(),
    })
}

pub fn lbcom(cfg: &LbcomArgs) -> Result<(LbcomSummary, Vec<LbcomRow>)> {
    if cfg.n > 24 || cfg.n < 2 {
        bail!("lbcom needs 2 <= n <= 24");
    }
    let sweep: Vec<(usize, Option<f64>)> = match &cfg.c_sweep {
        Some(cs) => cs.iter().map(|&c| (ell_from_c(c, cfg.n), Some(c))).collect(),
        None => cfg.ell.iter().map(|&l| (l, None)).collect(),
    };
    if sweep.iter().any(|&(l, _)| l == 0) {
        bail!("list sizes must be positive");
    }
    let g = Graph::complete(cfg.n);
    let master = Seed(cfg.seed);
    let jobs: Vec<(usize, Option<f64>, u64)> = sweep
        .iter()
        .flat_map(|&(l, c)| (0..cfg.trials).map(move |t| (l, c, t)))
        .collect();
    let rows: Vec<LbcomRow> = jobs
        .par_iter()
        .map(|&(l, c, t)| lbcom_trial(&g, l, c, t, master.derive(l as u64).derive(t), cfg.budget))
        .collect::<Result<_>>()?;

    let pairs = (cfg.n * (cfg.n - 1) / 2) as f64;
    let points = sweep
        .iter()
        .enumerate()
        .map(|(i, &(ell, c))| {
            let chunk = &rows[i * cfg.trials as usize..(i + 1) * cfg.trials as usize];
            let count = |s: SolveStatus| chunk.iter().filter(|r| r.status == s).count() as u64;
            let colored = count(SolveStatus::Colored);
            let unsat = count(SolveStatus::Unsat);
            let conclusive = colored + unsat;
            let frac = (conclusive > 0).then(|| colored as f64 / conclusive as f64);
            let k = chunk.len().max(1) as f64;
            LbcomPoint {
                ell,
                c,
                trials: cfg.trials,
                colored,
                unsat,
                inconclusive: count(SolveStatus::BudgetExceeded),
                success_fraction: frac,
                std_error: frac.map(|f| (f * (1.0 - f) / conclusive as f64).sqrt()),
                mean_plausible_alpha: chunk.iter().map(|r| r.plausible_alpha as f64).sum::<f64>() / k,
                mean_plausible_density: chunk.iter().map(|r| r.plausible_edges as f64 / pairs).sum::<f64>() / k,
            }
        })
        .collect();
    Ok((
        LbcomSummary {
            config: cfg.clone(),
            points,
        },
        rows,
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcSummary {
    pub config: ConcArgs,
    pub report: ConcReport,
}

pub fn conc(cfg: &ConcArgs) -> Result<(ConcSummary, Vec<TrialRow>)> {
    let (report, rows) = run_concentration_experiment(cfg.s, cfg.t, cfg.nonedge_p, cfg.trials, Seed(cfg.seed))
        .context("concentration experiment")?;
    Ok((
        ConcSummary {
            config: cfg.clone(),
            report,
        },
        rows,
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct AlphaSummary {
    pub config: AlphaArgs,
    pub edge_p: f64,
    pub report: AlphaReport,
}

pub fn alpha(cfg: &AlphaArgs) -> Result<(AlphaSummary, Vec<AlphaRow>)> {
    let edge_p = cfg.edge_p.unwrap_or_else(|| cfg.n.powf(-13.0 / 14.0));
    let (report, rows) = run_alpha_experiment(cfg.s, cfg.n, edge_p, cfg.trials, Seed(cfg.seed), cfg.allow_any_p)
        .context("independence-number experiment")?;
    Ok((
        AlphaSummary {
            config: cfg.clone(),
            edge_p,
            report,
        },
        rows,
    ))
}
