//! Command-line front end for `dpcolor-core`: graph generation, counting,
//! richness checks, solving, and the seeded experiment pipelines.

pub mod args;
pub mod experiments;
pub mod output;

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use dpcolor_core::correspondence::{random_assignment, AssignmentFile, CorrespondenceAssignment};
use dpcolor_core::graph::{random_bipartite, random_graph, Graph, GraphFile};
use dpcolor_core::iscount::count_profile;
use dpcolor_core::richness::{
    check_is_rich_exact, max_verified_b, triangle_free_b, verify_obsver, GrowthProfile, MaxDegree,
};
use dpcolor_core::solver::{decide_colorable, greedy_color, lll_color};
use dpcolor_core::Seed;

use args::{
    AssignArgs, Cli, Command, CountArgs, ExpCommand, GenArgs, GraphKind, Method, ProfileKind, RichnessCheckArgs,
    RichnessCommand, RichnessVerifyArgs, SolveArgs,
};
use output::{emit_json, read_json, write_csv, write_json};

/// Runs a parsed command line on a pool of `cli.threads` workers.
pub fn run(cli: Cli) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .context("building worker pool")?;
    pool.install(|| dispatch(cli.command))
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Gen(a) => cmd_gen(&a),
        Command::Count(a) => cmd_count(&a),
        Command::Richness(RichnessCommand::Check(a)) => cmd_richness_check(&a),
        Command::Richness(RichnessCommand::Verify(a)) => cmd_richness_verify(&a),
        Command::Assign(a) => cmd_assign(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Exp(e) => match e {
            ExpCommand::Ren(a) => {
                let (summary, rows) = experiments::ren(&a)?;
                if finish_experiment("ren", a.out.as_deref(), &summary, &rows)? {
                    println!(
                        "delta {} s_delta {} b {} ell {} status {}",
                        summary.delta,
                        summary.s_delta,
                        summary.b,
                        summary.solve.ell,
                        status_name(&summary.solve.status)?
                    );
                }
                Ok(())
            }
            ExpCommand::Lbcom(a) => {
                let (summary, rows) = experiments::lbcom(&a)?;
                if finish_experiment("lbcom", a.out.as_deref(), &summary, &rows)? {
                    for p in &summary.points {
                        let frac = p.success_fraction.map_or("n/a".to_string(), |f| format!("{f:.3}"));
                        println!("ell {} success {} inconclusive {}", p.ell, frac, p.inconclusive);
                    }
                }
                Ok(())
            }
            ExpCommand::Conc(a) => {
                let (summary, rows) = experiments::conc(&a)?;
                if finish_experiment("conc", a.out.as_deref(), &summary, &rows)? {
                    let r = &summary.report;
                    println!("mu {} mean {} tail {}", r.mu, r.empirical_mean, r.empirical_tail_freq);
                }
                Ok(())
            }
            ExpCommand::Alpha(a) => {
                let (summary, rows) = experiments::alpha(&a)?;
                if finish_experiment("alpha", a.out.as_deref(), &summary, &rows)? {
                    let r = &summary.report;
                    println!(
                        "threshold {} hits {} ln_bound {}",
                        r.threshold, r.hits, r.ln_analytic_bound
                    );
                }
                Ok(())
            }
        },
    }
}

fn status_name<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_value(v)?.as_str().unwrap_or_default().to_string())
}

/// Writes `<dir>/<name>.csv` and `<dir>/<name>.json`, or prints the summary
/// when no directory is given. Returns whether files were written.
fn finish_experiment<S: Serialize, R: Serialize>(
    name: &str,
    dir: Option<&Path>,
    summary: &S,
    rows: &[R],
) -> Result<bool> {
    match dir {
        Some(d) => {
            write_csv(&d.join(format!("{name}.csv")), rows)?;
            write_json(&d.join(format!("{name}.json")), summary)?;
            Ok(true)
        }
        None => emit_json(None, summary).map(|_| false),
    }
}

pub fn load_graph(path: &Path) -> Result<Graph> {
    let file: GraphFile = read_json(path)?;
    Graph::from_json(&file).with_context(|| format!("invalid graph in {}", path.display()))
}

pub fn load_assignment(g: &Graph, path: &Path) -> Result<CorrespondenceAssignment> {
    let file: AssignmentFile = read_json(path)?;
    CorrespondenceAssignment::from_file(g.clone(), &file)
        .with_context(|| format!("invalid assignment in {}", path.display()))
}

fn cmd_gen(a: &GenArgs) -> Result<()> {
    let seed = Seed(a.seed);
    let g = match a.kind {
        GraphKind::Gnp => random_graph(a.n, a.edge_prob, seed)?,
        GraphKind::Bipartite => random_bipartite(a.n, a.right.unwrap_or(a.n), a.edge_prob, seed)?,
        GraphKind::Complete => Graph::complete(a.n),
        GraphKind::Cycle => Graph::cycle(a.n),
        GraphKind::Path => Graph::path(a.n),
        GraphKind::Star => Graph::star(a.n),
        GraphKind::Empty => Graph::empty(a.n),
    };
    emit_json(a.out.as_deref(), &g.to_json())
}

fn cmd_count(a: &CountArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let p = count_profile(&g)?;
    if let Some(out) = &a.out {
        write_json(out, &p)?;
    }
    println!("vertices {}", g.n());
    println!("total {}", p.total);
    println!("alpha {}", p.alpha);
    println!("median {}", p.median);
    let counts: Vec<String> = p.counts.iter().map(|c| c.to_string()).collect();
    println!("counts {}", counts.join(" "));
    Ok(())
}

fn cmd_richness_check(a: &RichnessCheckArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let delta = a.delta.unwrap_or(g.max_degree() as u64);
    let b = a.b.unwrap_or_else(|| triangle_free_b(delta));
    let report = check_is_rich_exact(&g, b, Some(delta))?;
    println!(
        "rich {} b {} delta {} checked {} violations {}",
        report.rich,
        report.b,
        report.delta,
        report.checked_subsets,
        report.violations.len()
    );
    if let Some(out) = &a.out {
        write_json(out, &report)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifySummary<'a> {
    config: &'a RichnessVerifyArgs,
    max_verified_b: u64,
    report: dpcolor_core::richness::ObsVerReport,
}

fn cmd_richness_verify(a: &RichnessVerifyArgs) -> Result<()> {
    let profile = match a.profile {
        ProfileKind::Colorable => GrowthProfile::colorable(a.r)?,
        ProfileKind::Clique => GrowthProfile::clique(a.r)?,
        ProfileKind::Randomgraph => GrowthProfile::random_graph(a.nonedge_p)?,
    };
    let delta = match (a.log2_delta, a.delta) {
        (Some(k), _) => MaxDegree::pow2(k),
        (None, Some(d)) => MaxDegree::from_u64(d),
        (None, None) => bail!("give --log2-delta or --delta"),
    };
    let best = max_verified_b(&profile, &delta)?;
    let report = verify_obsver(&profile, &delta, a.b.unwrap_or(best))?;
    println!(
        "profile {} s_delta {} b {} certified {} max_verified_b {}",
        report.profile, report.s_delta, report.b, report.certified, best
    );
    if let Some(out) = &a.out {
        write_json(
            out,
            &VerifySummary {
                config: a,
                max_verified_b: best,
                report,
            },
        )?;
    }
    Ok(())
}

fn cmd_assign(a: &AssignArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let ca = random_assignment(&g, a.ell, Seed(a.seed))?;
    emit_json(a.out.as_deref(), &ca.to_file())
}

fn cmd_solve(a: &SolveArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let ca = load_assignment(&g, &a.assignment)?;
    let result = match a.method {
        Method::Backtrack => decide_colorable(&ca, a.budget),
        Method::Lll => lll_color(&ca, g.max_degree() as u64, Seed(a.seed), a.cap)?,
        Method::Greedy => greedy_color(&ca),
    };
    println!("{}", status_name(&result.status)?);
    if let Some(c) = &result.coloring {
        let cols: Vec<String> = c
            .as_slice()
            .iter()
            .map(|x| x.map_or("-".into(), |v| v.to_string()))
            .collect();
        println!("coloring {}", cols.join(" "));
    }
    if let Some(out) = &a.out {
        write_json(out, &result)?;
    }
    Ok(())
}
