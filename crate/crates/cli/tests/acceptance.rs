//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use dpcolor_cli::args::LbcomArgs;
use dpcolor_cli::experiments::lbcom;
use dpcolor_core::concentration::{a_threshold, lower_tail_bound, run_alpha_experiment, run_concentration_experiment};
use dpcolor_core::correspondence::{
    from_lists, random_assignment, validate, Color, CorrespondenceAssignment, PartialColoring,
};
use dpcolor_core::graph::{random_bipartite, random_graph, Graph};
use dpcolor_core::iscount::{brute_profile, count_profile, sample_independent_set};
use dpcolor_core::richness::{
    binom_le, binomial, check_is_rich_exact, max_verified_b, triangle_free_b, verify_obsver, GrowthProfile, MaxDegree,
};
use dpcolor_core::solver::{decide_colorable, resample_kernel, SolveStatus, DEFAULT_NODE_BUDGET};
use dpcolor_core::Seed;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 11] = [
        ("counting oracle", Duration::from_secs(60), counting_oracle),
        ("binomial sandwich", Duration::from_secs(1), binomial_sandwich),
        (
            "triangle-free richness",
            Duration::from_secs(120),
            triangle_free_richness,
        ),
        ("richness verifier at 2^60", Duration::from_secs(1), verifier_2_pow_60),
        ("solver exactness", Duration::from_secs(120), solver_exactness),
        ("kernel stationarity", Duration::from_secs(10), kernel_stationarity),
        ("concentration", Duration::from_secs(600), concentration),
        ("sparse independence number", Duration::from_secs(60), sparse_alpha),
        ("K_n list-size sweep", Duration::from_secs(900), kn_sweep),
        ("sampler uniformity", Duration::from_secs(30), sampler_uniformity),
        ("CLI reproducibility", Duration::from_secs(60), reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = f();
        let took = start.elapsed();
        let pass = out.pass && took <= *limit;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} [{}] {}: {} ({:.2}s, limit {}s)",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            name,
            out.detail,
            took.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn all_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    (0u32..1 << pairs.len())
        .map(|mask| {
            let edges: Vec<_> = (0..pairs.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| pairs[i])
                .collect();
            Graph::from_edges(n, &edges).unwrap()
        })
        .collect()
}

fn counting_oracle() -> Outcome {
    let mut graphs = all_graphs(5);
    for i in 0..500u64 {
        let n = (i % 15) as usize;
        graphs.push(random_graph(n, [0.15, 0.3, 0.5, 0.7][(i % 4) as usize], Seed(i)).unwrap());
    }
    let bad = graphs
        .iter()
        .filter(|g| count_profile(g).unwrap() != brute_profile(g).unwrap())
        .count();
    outcome(bad == 0, format!("{} graphs, {bad} mismatches", graphs.len()))
}

fn binomial_sandwich() -> Outcome {
    let mut rng = Seed(2).rng();
    let mut bad = 0;
    for _ in 0..1000 {
        let b: f64 = rng.gen_range(0.0..60.0);
        let n = (3.0 * b).ceil() as u64 + rng.gen_range(0..500);
        let lo = binomial(n, b.floor() as u64);
        let mid = binom_le(n, b);
        if !(lo <= mid && mid <= &lo * 2u32) {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("1000 random (n, b), {bad} violations"))
}

fn triangle_free_richness() -> Outcome {
    let mut tested = 0;
    let mut failures = 0;
    for i in 0..1000u64 {
        if tested == 50 {
            break;
        }
        let g = random_bipartite(12 + (i % 10) as usize, 12, 0.6, Seed(i)).unwrap();
        let delta = g.max_degree() as u64;
        if !(2..=22).contains(&delta) {
            continue;
        }
        tested += 1;
        if !check_is_rich_exact(&g, triangle_free_b(delta), None).unwrap().rich {
            failures += 1;
        }
    }
    let k4 = check_is_rich_exact(&Graph::complete(4), 1.0, None).unwrap();
    let single = k4
        .violations
        .iter()
        .filter(|v| v.subset.len() == 1 && v.count == 2 && v.required == 4)
        .count();
    outcome(
        tested == 50 && failures == 0 && !k4.rich && single == 12,
        format!(
            "{tested} bipartite graphs, {failures} not rich; K_4 b=1 rich={} with {single} single-vertex violations",
            k4.rich
        ),
    )
}

fn verifier_2_pow_60() -> Outcome {
    let p = GrowthProfile::colorable(2).unwrap();
    let d = MaxDegree::pow2(60);
    let best = max_verified_b(&p, &d).unwrap();
    let r4 = verify_obsver(&p, &d, 4).unwrap();
    let r5 = verify_obsver(&p, &d, 5).unwrap();
    let cap = BigUint::from(262_144u32);
    let exact4 = binomial(40, 4) == BigUint::from(91_390u32) && binomial(40, 4) <= cap;
    let exact5 = binomial(40, 5) == BigUint::from(658_008u32) && binomial(40, 5) > cap;
    let logs_match = (r4.main_lhs_ln.exp() / 91_390.0 - 1.0).abs() < 1e-9
        && (r5.main_lhs_ln.exp() / 658_008.0 - 1.0).abs() < 1e-9
        && (r4.main_rhs_ln.exp() / 262_144.0 - 1.0).abs() < 1e-9;
    let verdicts = r4.main_exact == Some(true)
        && r5.main_exact == Some(false)
        && (r4.main_lhs_ln <= r4.main_rhs_ln)
        && (r5.main_lhs_ln > r5.main_rhs_ln)
        && r4.certified
        && r4.cond_tub
        && r4.cond_der
        && r4.s_delta == 40;
    outcome(
        best == 4 && exact4 && exact5 && logs_match && verdicts,
        format!(
            "max_verified_b {best}; s_delta {}; C(40,4) = {:.0} vs {:.0}; C(40,5) = {:.0}",
            r4.s_delta,
            r4.main_lhs_ln.exp(),
            r4.main_rhs_ln.exp(),
            r5.main_lhs_ln.exp()
        ),
    )
}

fn brute_colorable(ca: &CorrespondenceAssignment) -> bool {
    let n = ca.n();
    let mut idx = vec![0usize; n];
    loop {
        let phi = PartialColoring::from_vec((0..n).map(|v| Some(ca.list(v)[idx[v]])).collect());
        if validate(ca, &phi).valid {
            return true;
        }
        let mut k = 0;
        while k < n && idx[k] + 1 == ca.list(k).len() {
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            return false;
        }
        idx[k] += 1;
    }
}

fn solver_corpus() -> Vec<CorrespondenceAssignment> {
    let mut out = Vec::new();
    for i in 0..240u64 {
        let n = 1 + (i % 6) as usize;
        let g = random_graph(n, 0.6, Seed(7000 + i)).unwrap();
        out.push(random_assignment(&g, 1 + (i % 3) as usize, Seed(8000 + i)).unwrap());
    }
    let sublists: [&[Color]; 7] = [&[1], &[2], &[3], &[1, 2], &[1, 3], &[2, 3], &[1, 2, 3]];
    for g in [Graph::complete(3), Graph::cycle(4), Graph::complete(4)] {
        let n = g.n();
        let mut idx = vec![0usize; n];
        loop {
            out.push(from_lists(&g, idx.iter().map(|&i| sublists[i].to_vec()).collect()).unwrap());
            let mut k = 0;
            while k < n && idx[k] + 1 == sublists.len() {
                idx[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
            idx[k] += 1;
        }
    }
    out
}

fn solver_exactness() -> Outcome {
    let corpus = solver_corpus();
    let mut bad = 0;
    let (mut sat, mut unsat) = (0, 0);
    for ca in &corpus {
        let r = decide_colorable(ca, DEFAULT_NODE_BUDGET);
        let truth = brute_colorable(ca);
        let ok = match r.status {
            SolveStatus::Colored => truth && validate(ca, r.coloring.as_ref().unwrap()).valid,
            SolveStatus::Unsat => !truth,
            SolveStatus::BudgetExceeded => false,
        };
        if !ok {
            bad += 1;
        }
        if truth {
            sat += 1;
        } else {
            unsat += 1;
        }
    }
    outcome(
        corpus.len() >= 200 && bad == 0,
        format!(
            "{} instances ({sat} colorable, {unsat} not), {bad} disagreements",
            corpus.len()
        ),
    )
}

fn valid_states(ca: &CorrespondenceAssignment, u: usize) -> Vec<PartialColoring> {
    let mut states = vec![PartialColoring::empty(ca.n())];
    for v in (0..ca.n()).filter(|&v| v != u) {
        let mut next = Vec::new();
        for s in &states {
            next.push(s.clone());
            for &c in ca.list(v) {
                let mut t = s.clone();
                t.set(v, c);
                next.push(t);
            }
        }
        states = next;
    }
    states.into_iter().filter(|s| validate(ca, s).valid).collect()
}

fn is_stationary(ca: &CorrespondenceAssignment, u: usize) -> bool {
    let states = valid_states(ca, u);
    let w = BigRational::new(BigInt::one(), BigInt::from(states.len()));
    let mut image: BTreeMap<PartialColoring, BigRational> = BTreeMap::new();
    for s in &states {
        for (t, p) in resample_kernel(ca, s, u).unwrap() {
            *image.entry(t).or_insert_with(BigRational::zero) += &w * p;
        }
    }
    image.len() == states.len() && states.iter().all(|s| image[s] == w)
}

fn kernel_stationarity() -> Outcome {
    let k3 = from_lists(&Graph::complete(3), vec![vec![1, 2]; 3]).unwrap();
    let p3_diag = from_lists(&Graph::path(3), vec![vec![1, 2]; 3]).unwrap();
    let p3_mixed = CorrespondenceAssignment::new(
        Graph::path(3),
        vec![vec![1, 2]; 3],
        [((0, 1), vec![(1, 2), (2, 1)]), ((1, 2), vec![(1, 1), (2, 2)])],
    )
    .unwrap();
    let mut checked = 0;
    let mut ok = true;
    for ca in [&k3, &p3_diag, &p3_mixed] {
        for u in 0..3 {
            ok &= is_stationary(ca, u);
            checked += 1;
        }
    }
    outcome(
        ok,
        format!("{checked} (instance, u) pairs on K_3 and P_3 with l = 2, exact rationals"),
    )
}

fn concentration() -> Outcome {
    let (r, rows) = run_concentration_experiment(55, 5, 0.5, 200, Seed(55)).unwrap();
    let mu_exact = 3_478_761.0 / 1024.0;
    let mean_ok = (r.empirical_mean / mu_exact - 1.0).abs() <= 0.05;
    let tail_cap = 0.9703 + 3.0 * (0.97f64 * 0.03 / 200.0).sqrt();
    let tail_ok = r.empirical_tail_freq <= tail_cap;
    let bound = lower_tail_bound(55, 5, 0.5).unwrap();
    let bound_ok = (bound - (-0.03025f64).exp()).abs() < 5e-7;
    outcome(
        mean_ok && tail_ok && bound_ok && rows.len() == 200 && (r.mu - mu_exact).abs() < 1e-6,
        format!(
            "mean {:.2} vs {mu_exact:.2}; tail {:.3} <= {tail_cap:.4}; bound {bound:.7}",
            r.empirical_mean, r.empirical_tail_freq
        ),
    )
}

fn sparse_alpha() -> Outcome {
    let n = 1e4f64;
    let (r, _) = run_alpha_experiment(20, n, n.powf(-13.0 / 14.0), 200, Seed(20), false).unwrap();
    let threshold_ok = (a_threshold(20.0, n) - 4.0 / 3.0).abs() < 1e-12 && (r.threshold - 4.0 / 3.0).abs() < 1e-12;
    let bound_ok = (r.ln_analytic_bound + 60.0 * n.ln()).abs() < 1e-9 && (r.analytic_bound / 1e-240 - 1.0).abs() < 1e-9;
    outcome(
        r.empirical_freq == 0.0 && threshold_ok && bound_ok,
        format!(
            "frequency {} over {} trials; A = {:.4}; bound n^-60 = {:e}",
            r.empirical_freq, r.trials, r.threshold, r.analytic_bound
        ),
    )
}

fn kn_sweep() -> Outcome {
    let cfg = LbcomArgs {
        n: 16,
        ell: vec![1, 2, 3, 4, 6, 8, 12, 16],
        c_sweep: None,
        trials: 100,
        budget: DEFAULT_NODE_BUDGET,
        seed: 16,
        out: None,
    };
    let (summary, _) = lbcom(&cfg).unwrap();
    let frac: HashMap<usize, (f64, f64)> = summary
        .points
        .iter()
        .map(|p| {
            (
                p.ell,
                (p.success_fraction.unwrap_or(f64::NAN), p.std_error.unwrap_or(0.0)),
            )
        })
        .collect();
    let sweep = [2usize, 3, 4, 6, 8, 12, 16];
    let monotone = sweep.windows(2).all(|w| {
        let (a, sa) = frac[&w[0]];
        let (b, sb) = frac[&w[1]];
        b >= a - 2.0 * (sa * sa + sb * sb).sqrt()
    });
    let inconclusive: u64 = summary.points.iter().map(|p| p.inconclusive).sum();
    let listing: Vec<String> = summary
        .points
        .iter()
        .map(|p| format!("{}:{:.2}", p.ell, p.success_fraction.unwrap_or(f64::NAN)))
        .collect();
    outcome(
        frac[&1].0 == 0.0 && frac[&16].0 == 1.0 && monotone,
        format!("success by l {}; {inconclusive} inconclusive", listing.join(" ")),
    )
}

fn sampler_uniformity() -> Outcome {
    let g = Graph::cycle(5);
    let draws = 100_000u64;
    let mut freq: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    let mut rng = Seed(5).rng();
    for _ in 0..draws {
        *freq
            .entry(sample_independent_set(&g, Seed(rng.gen())).unwrap())
            .or_default() += 1;
    }
    let p = 1.0 / 11.0;
    let sd = (draws as f64 * p * (1.0 - p)).sqrt();
    let worst = freq
        .values()
        .map(|&c| (c as f64 - draws as f64 * p).abs() / sd)
        .fold(0.0, f64::max);
    outcome(
        freq.len() == 11 && worst <= 5.0,
        format!("{} distinct sets, worst deviation {worst:.2} sd", freq.len()),
    )
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// Runs the fixture command suite into `dir`, returning stdout of each call.
fn run_suite(dir: &Path) -> Vec<Vec<u8>> {
    let d = |f: &str| dir.join(f).to_string_lossy().into_owned();
    let c5 = fixture("c5.json").to_string_lossy().into_owned();
    let k3 = fixture("k3.json").to_string_lossy().into_owned();
    let k3a = fixture("k3_lists12.json").to_string_lossy().into_owned();
    let g = d("g.json");
    let a = d("a.json");
    let calls: Vec<Vec<String>> = vec![
        vec![
            "gen",
            "--kind",
            "gnp",
            "--n",
            "12",
            "--edge-prob",
            "0.4",
            "--seed",
            "9",
            "--out",
            &g,
        ],
        vec!["count", &c5, "--out", &d("count.json")],
        vec!["count", &g],
        vec!["richness", "check", &g, "--b", "1", "--out", &d("rich.json")],
        vec![
            "richness",
            "verify",
            "--profile",
            "colorable",
            "--r",
            "2",
            "--log2-delta",
            "60",
            "--out",
            &d("verify.json"),
        ],
        vec!["assign", &g, "--ell", "4", "--seed", "3", "--out", &a],
        vec!["solve", &g, &a, "--method", "backtrack", "--out", &d("bt.json")],
        vec![
            "solve",
            &g,
            &a,
            "--method",
            "lll",
            "--seed",
            "2",
            "--out",
            &d("lll.json"),
        ],
        vec!["solve", &g, &a, "--method", "greedy", "--out", &d("greedy.json")],
        vec!["solve", &k3, &k3a, "--method", "backtrack"],
        vec!["exp", "ren", "--n", "30", "--seed", "4", "--out", &d("ren")],
        vec![
            "exp",
            "lbcom",
            "--n",
            "10",
            "--ell",
            "1,3,5,10",
            "--trials",
            "20",
            "--seed",
            "4",
            "--out",
            &d("lb"),
        ],
        vec![
            "exp",
            "lbcom",
            "--n",
            "10",
            "--c-sweep",
            "0.5,1,2",
            "--trials",
            "10",
            "--seed",
            "4",
            "--out",
            &d("lbc"),
        ],
        vec![
            "exp",
            "conc",
            "--s",
            "30",
            "--t",
            "3",
            "--trials",
            "30",
            "--seed",
            "4",
            "--out",
            &d("conc"),
        ],
        vec![
            "exp",
            "alpha",
            "--s",
            "20",
            "--trials",
            "30",
            "--seed",
            "4",
            "--out",
            &d("alpha"),
        ],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();
    calls
        .iter()
        .map(|args| {
            let out = Command::new(env!("CARGO_BIN_EXE_dpcolor")).args(args).output().unwrap();
            assert!(
                out.status.success(),
                "{args:?}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            out.stdout
        })
        .collect()
}

fn read_tree(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                files.insert(p.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&p).unwrap());
            }
        }
    }
    files
}

fn reproducibility() -> Outcome {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let out_a = run_suite(a.path());
    let out_b = run_suite(b.path());
    // stdout mentions no paths, so it must match byte for byte too
    let files_a = read_tree(a.path());
    let files_b = read_tree(b.path());
    let same = out_a == out_b && files_a == files_b;
    outcome(
        same && files_a.len() >= 16,
        format!(
            "{} commands, {} output files byte-identical: {same}",
            out_a.len(),
            files_a.len()
        ),
    )
}
