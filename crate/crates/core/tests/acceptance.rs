//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Every quantity the library reports is recomputed here from raw
//! coordinates: fair radii, LP feasibility, costs, reassignment stretch and
//! fairness ratios.

mod common;

use fairclust::dataio::{self, Dataset};
use fairclust::fairround::fair_round;
use fairclust::harness::{self, ExperimentConfig, RunParams};
use fairclust::lp::{
    build_lp, build_outlier_free_lp, check_feasibility, solve_lp, solve_with, FractionalSolution,
    InteriorPointBackend, SimplexBackend, SolveStatus,
};
use fairclust::metric::build_metric;
use fairclust::oracle::brute_force_opt;
use fairclust::outround::{cost_bound_factor, out_round};
use fairclust::synth::{self, DatasetStyle};
use fairclust::{Exec, Power};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::path::Path;
use std::time::Instant;

const P_BOTH: [Power; 2] = [Power::One, Power::Two];

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn powd(d: f64, p: Power) -> f64 {
    match p {
        Power::One => d,
        Power::Two => d * d,
    }
}

/// Plain recomputation of the geometry from coordinates.
struct Geometry {
    d: Vec<Vec<f64>>,
    r: Vec<f64>,
}

impl Geometry {
    fn new(data: &Dataset, k: usize) -> Geometry {
        let n = data.len();
        let d: Vec<Vec<f64>> = (0..n)
            .map(|v| (0..n).map(|u| dist(data.point(v), data.point(u))).collect())
            .collect();
        let t = n.div_ceil(k).min(n - 1);
        let r = (0..n)
            .map(|v| {
                let mut others: Vec<f64> = (0..n).filter(|&u| u != v).map(|u| d[v][u]).collect();
                others.sort_by(f64::total_cmp);
                if t == 0 {
                    0.0
                } else {
                    others[t - 1]
                }
            })
            .collect();
        Geometry { d, r }
    }
}

/// Constraint-by-constraint feasibility check written from the model
/// definition, independent of the library's constraint builder.
fn independent_violations(g: &Geometry, sol: &FractionalSolution, k: usize, m: usize, alpha: f64) -> Vec<String> {
    let tol = 1e-6;
    let mut bad = Vec::new();
    let sy: f64 = sol.y.iter().sum();
    let sz: f64 = sol.z.iter().sum();
    if sy > k as f64 + tol {
        bad.push(format!("sum y = {sy}"));
    }
    if sz > m as f64 + tol {
        bad.push(format!("sum z = {sz}"));
    }
    let mut cover = sol.z.clone();
    for (&(v, u), &x) in &sol.x {
        cover[v] += x;
        if !(-tol..=1.0 + tol).contains(&x) {
            bad.push(format!("x({v},{u}) = {x}"));
        }
        if x > sol.y[u] + tol {
            bad.push(format!("x({v},{u}) > y({u})"));
        }
        if x > 0.0 && g.d[v][u] > alpha * g.r[v] + 1e-9 {
            bad.push(format!("x({v},{u}) outside the fair ball"));
        }
    }
    for (v, &c) in cover.iter().enumerate() {
        if c < 1.0 - tol {
            bad.push(format!("coverage of {v} = {c}"));
        }
        if sol.y[v] + sol.z[v] > 1.0 + tol {
            bad.push(format!("y({v}) + z({v}) > 1"));
        }
        for val in [sol.y[v], sol.z[v]] {
            if !(-tol..=1.0 + tol).contains(&val) {
                bad.push(format!("bound at {v}: {val}"));
            }
        }
    }
    bad
}

fn ratio(dv: f64, rv: f64) -> f64 {
    if rv > 0.0 {
        dv / rv
    } else if dv == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

#[derive(Default)]
struct Tally {
    runs: usize,
    lemma_checks: usize,
    lemma_violations: Vec<String>,
    theorem1_failures: Vec<String>,
    max_p2_ratio: f64,
    envelope_failures: Vec<String>,
    max_ratio: f64,
    feasibility_failures: Vec<String>,
    support_failures: Vec<String>,
    consistency_failures: Vec<String>,
}

struct RunSummary {
    fr_cost: f64,
    outliers: BTreeSet<usize>,
    centers: Vec<usize>,
    lp_star: f64,
}

/// One pipeline run, stage by stage, with every stage audited against the
/// recomputed geometry. Also cross-checks the harness route.
fn audited_run(tally: &mut Tally, label: &str, data: &Dataset, k: usize, p: Power, m: usize) -> Option<RunSummary> {
    tally.runs += 1;
    let tag = format!("{label} k={k} p={p} m={m}");
    let g = Geometry::new(data, k);
    let ctx = build_metric(data, k).expect("metric");
    for v in 0..data.len() {
        if (ctx.fair_radius(v) - g.r[v]).abs() > 1e-12 {
            tally.consistency_failures.push(format!("{tag}: r({v}) {} vs {}", ctx.fair_radius(v), g.r[v]));
        }
    }
    let inst = build_lp(&ctx, p, k, m, 1.0).expect("lp");
    let report = solve_lp(&inst);
    if report.status != SolveStatus::Optimal {
        tally.feasibility_failures.push(format!("{tag}: solver status {:?} {:?}", report.status, report.message));
        return None;
    }
    let sol = report.solution.clone().unwrap();

    let lib = check_feasibility(&inst, &sol, 1e-6).expect("audit");
    if !lib.is_empty() {
        tally.feasibility_failures.push(format!("{tag}: {} library-reported violations", lib.len()));
    }
    let own = independent_violations(&g, &sol, k, m, 1.0);
    if !own.is_empty() {
        tally.feasibility_failures.push(format!("{tag}: {}", own.join("; ")));
    }
    let lp_star: f64 = sol.x.iter().map(|(&(v, u), &x)| x * powd(g.d[v][u], p)).sum();
    if (lp_star - report.objective).abs() > 1e-6 * lp_star.abs().max(1.0) {
        tally.consistency_failures.push(format!("{tag}: objective {} vs recomputed {lp_star}", report.objective));
    }

    let rf = match out_round(&ctx, &sol, 0.0) {
        Ok(rf) => rf,
        Err(e) => {
            tally.lemma_violations.push(format!("{tag}: out_round failed: {e}"));
            return None;
        }
    };
    let outlier = |v: usize| rf.outlier_indices.contains(&v);
    for re in &rf.reassignments {
        for (&(v, u), &x) in &sol.x {
            if u != re.from || outlier(v) || x == 0.0 {
                continue;
            }
            tally.lemma_checks += 1;
            if g.d[v][re.to] > 2.0 * g.d[v][re.from] + 1e-9 {
                tally.lemma_violations.push(format!("{tag}: v={v} {} -> {}", re.from, re.to));
            }
        }
    }
    for (&(v, u), &x) in &rf.x_prime {
        if outlier(v) || outlier(u) {
            tally.support_failures.push(format!("{tag}: x'({v},{u}) touches an outlier"));
        }
        if x > 0.0 && g.d[v][u] > 2.0 * g.r[v] + 1e-9 {
            tally.support_failures.push(format!("{tag}: x'({v},{u}) beyond 2r"));
        }
        if x > rf.y_prime[u] + 1e-6 {
            tally.support_failures.push(format!("{tag}: x'({v},{u}) > y'({u})"));
        }
    }
    let lp_prime: f64 = rf.x_prime.iter().map(|(&(v, u), &x)| x * powd(g.d[v][u], p)).sum();
    let factor = cost_bound_factor(p);
    let t1 = if lp_star > 0.0 { lp_prime / lp_star } else { 1.0 };
    if lp_prime > factor * lp_star * (1.0 + 1e-6) + 1e-12 {
        tally.theorem1_failures.push(format!("{tag}: {lp_prime} > {factor} * {lp_star}"));
    }
    if p == Power::Two {
        tally.max_p2_ratio = tally.max_p2_ratio.max(t1);
    }

    let res = match fair_round(&ctx, &rf, p, Exec::default()) {
        Ok(res) => res,
        Err(e) => {
            tally.envelope_failures.push(format!("{tag}: fair_round failed: {e}"));
            return None;
        }
    };
    let inliers: Vec<usize> = (0..data.len()).filter(|&v| !outlier(v)).collect();
    let mut cost = 0.0;
    let mut worst: f64 = 0.0;
    for &v in &inliers {
        let dv = res.centers.iter().map(|&s| g.d[v][s]).fold(f64::INFINITY, f64::min);
        cost += powd(dv, p);
        worst = worst.max(ratio(dv, g.r[v]));
    }
    if (cost - res.cost).abs() > 1e-9 * cost.max(1.0) {
        tally.consistency_failures.push(format!("{tag}: cost {} vs recomputed {cost}", res.cost));
    }
    tally.max_ratio = tally.max_ratio.max(worst);
    let cap = if rf.has_deficit() { 16.0 } else { 6.0 + 1e-9 };
    if worst > cap {
        tally.envelope_failures.push(format!("{tag}: ratio {worst} > {cap}"));
    }
    if res.centers.len() > k || res.centers.iter().any(|&s| outlier(s)) {
        tally.consistency_failures.push(format!("{tag}: bad center set {:?}", res.centers));
    }

    let params = RunParams { k, p, m, alpha: 1.0, tau: 0.0 };
    match harness::ifxo_dataset(data, &params, None, Exec::default()) {
        Ok(out) if out.result.centers == res.centers && out.record.fr_cost == res.cost => {}
        Ok(out) => tally.consistency_failures.push(format!("{tag}: harness gave {:?}", out.result.centers)),
        Err(e) => tally.consistency_failures.push(format!("{tag}: harness failed: {e}")),
    }

    Some(RunSummary {
        fr_cost: cost,
        outliers: rf.outlier_indices.clone(),
        centers: res.centers,
        lp_star,
    })
}

fn working_sample(style: DatasetStyle, n: usize, seed: u64, inject: f64) -> Dataset {
    let raw = synth::generate(style, 2000, seed).unwrap();
    let scaled = dataio::standard_scale(&raw).unwrap();
    let sample = dataio::sample_points(&scaled, n, seed).unwrap();
    if inject > 0.0 {
        dataio::inject_outliers(&sample, inject, seed).unwrap()
    } else {
        sample
    }
}

fn fixtures() -> Vec<(&'static str, Dataset)> {
    let two_clusters = Dataset::from_rows(
        ["x", "y"],
        &[
            vec![0.0, 0.0],
            vec![0.5, 0.2],
            vec![0.1, 0.6],
            vec![0.4, 0.5],
            vec![10.0, 0.0],
            vec![10.5, 0.3],
            vec![10.2, 0.6],
            vec![9.8, 0.4],
            vec![5.0, 0.2],
        ],
    )
    .unwrap();
    vec![
        ("three-point line", Dataset::from_1d(&[0.0, 1.0, 10.0]).unwrap()),
        ("uneven line", Dataset::from_1d(&[0.0, 0.3, 0.4, 1.0, 1.1, 1.3, 5.0, 5.2, 5.3, 20.0, -14.0]).unwrap()),
        ("two clusters with midpoint", two_clusters),
    ]
}

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, id: &str, ok: bool, detail: String) {
        if !ok {
            self.failed += 1;
        }
        println!("criterion {id}: {} | {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn show(list: &[String]) -> String {
    match list.len() {
        0 => String::new(),
        n => format!("; {n} failing, first: {}", list[0]),
    }
}

fn main() {
    let start = Instant::now();
    let mut report = Report { failed: 0 };
    let mut tally = Tally::default();

    // 1, 2, 3, 7: fixtures and style samples
    for (name, data) in fixtures() {
        let n = data.len();
        for k in [1, 2, 3].into_iter().filter(|&k| k < n) {
            for p in P_BOTH {
                for m in [0, 1] {
                    audited_run(&mut tally, name, &data, k, p, m);
                }
            }
        }
    }
    for style in DatasetStyle::ALL {
        for n in [100, 200] {
            let data = working_sample(style, n, 7, 0.01);
            let m = harness::default_outlier_budget(n);
            for k in [5, 10, 15] {
                for p in P_BOTH {
                    audited_run(&mut tally, style.name(), &data, k, p, m);
                }
            }
        }
    }
    let sweep_runs = tally.runs;

    // 2: random feasible fractional inputs with opening mass on outliers
    let mut stress_reassignments = 0;
    for seed in 0..300u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1_000 + seed);
        let n = rng.gen_range(4..=30);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)]).collect();
        let data = Dataset::from_rows(["x", "y"], &rows).unwrap();
        let k = rng.gen_range(1..=4);
        let g = Geometry::new(&data, k);
        let ctx = build_metric(&data, k).unwrap();
        let sol = common::random_fractional(&mut rng, &ctx);
        let rf = match out_round(&ctx, &sol, 0.0) {
            Ok(rf) => rf,
            Err(fairclust::Error::AllOutliers) => continue,
            Err(e) => {
                tally.lemma_violations.push(format!("stress seed {seed}: {e}"));
                continue;
            }
        };
        stress_reassignments += rf.reassignments.len();
        for re in &rf.reassignments {
            for (&(v, u), &x) in &sol.x {
                if u == re.from && x != 0.0 && !rf.outlier_indices.contains(&v) {
                    tally.lemma_checks += 1;
                    if g.d[v][re.to] > 2.0 * g.d[v][re.from] + 1e-9 {
                        tally.lemma_violations.push(format!("stress seed {seed}: v={v} {} -> {}", re.from, re.to));
                    }
                }
            }
        }
        for (&(v, u), &x) in &rf.x_prime {
            if x > 0.0 && g.d[v][u] > 2.0 * g.r[v] + 1e-9 {
                tally.support_failures.push(format!("stress seed {seed}: x'({v},{u}) beyond 2r"));
            }
        }
    }

    // 4: oracle comparison on tiny random instances
    let mut lp_above_opt = Vec::new();
    let mut cost_above_bound = Vec::new();
    let mut bad_centers = Vec::new();
    let mut ifxo_failures = Vec::new();
    let (mut instances, mut compared, mut worst_ratio) = (0, 0, 0.0f64);
    let oracle_clock = Instant::now();
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(3..=8);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)]).collect();
        let data = Dataset::from_rows(["x", "y"], &rows).unwrap();
        let k = rng.gen_range(1..=3.min(n));
        let m = rng.gen_range(0..=2.min(n - 1));
        for p in P_BOTH {
            instances += 1;
            let tag = format!("seed={seed} n={n} k={k} m={m} p={p}");
            let ctx = build_metric(&data, k).unwrap();
            let opt = brute_force_opt(&ctx, p, k, m, 1.0).unwrap();
            let lp = solve_lp(&build_lp(&ctx, p, k, m, 1.0).unwrap());
            if opt.is_feasible() && (lp.status != SolveStatus::Optimal || lp.objective > opt.opt_cost + 1e-9) {
                lp_above_opt.push(format!("{tag}: LP {} vs OPT {}", lp.objective, opt.opt_cost));
            }
            if lp.status != SolveStatus::Optimal {
                continue;
            }
            let Some(run) = audited_run(&mut tally, "oracle instance", &data, k, p, m) else {
                ifxo_failures.push(tag);
                continue;
            };
            if run.centers.is_empty() || run.centers.len() > k || run.centers.iter().any(|s| run.outliers.contains(s)) {
                bad_centers.push(format!("{tag}: {:?}", run.centers));
            }
            if opt.is_feasible() {
                compared += 1;
                let bound = match p {
                    Power::One => 24.0,
                    Power::Two => 12.0,
                };
                if opt.opt_cost > 0.0 {
                    worst_ratio = worst_ratio.max(run.fr_cost / opt.opt_cost);
                }
                if run.fr_cost > bound * opt.opt_cost + 1e-9 {
                    cost_above_bound.push(format!("{tag}: {} > {bound} * {}", run.fr_cost, opt.opt_cost));
                }
                if run.lp_star > opt.opt_cost + 1e-9 {
                    lp_above_opt.push(format!("{tag}: recomputed LP {} vs OPT {}", run.lp_star, opt.opt_cost));
                }
            }
        }
    }
    let oracle_secs = oracle_clock.elapsed().as_secs_f64();

    // 5: outlier counts at n = 200
    let (mut within, mut total) = (0, 0);
    let mut exceed = Vec::new();
    for seed in 0..20u64 {
        let data = working_sample(DatasetStyle::Bank, 200, 100 + seed, 0.01);
        let m = harness::default_outlier_budget(200);
        if let Some(run) = audited_run(&mut tally, "outlier count", &data, 10, Power::Two, m) {
            total += 1;
            if run.outliers.len() <= 3 * m {
                within += 1;
            } else {
                exceed.push(format!("seed {}: {} > {}", 100 + seed, run.outliers.len(), 3 * m));
            }
        }
    }

    // 6: removing outliers lowers the cost
    let bank = working_sample(DatasetStyle::Bank, 200, 11, 0.01);
    let m = harness::default_outlier_budget(200);
    let mut ordering = Vec::new();
    let mut ordering_ok = true;
    for k in [5, 10, 15] {
        let with = audited_run(&mut tally, "ordering", &bank, k, Power::Two, m).map(|r| r.fr_cost);
        let without = audited_run(&mut tally, "ordering", &bank, k, Power::Two, 0).map(|r| r.fr_cost);
        match (with, without) {
            (Some(a), Some(b)) => {
                ordering_ok &= a < b;
                ordering.push(format!("k={k}: {a:.3} vs {b:.3}"));
            }
            _ => {
                ordering_ok = false;
                ordering.push(format!("k={k}: run failed"));
            }
        }
    }
    // two clusters plus a midpoint point: dropping the midpoint helps
    let (_, fig) = fixtures().remove(2);
    let fig_with = audited_run(&mut tally, "midpoint", &fig, 2, Power::Two, 1).map(|r| r.fr_cost);
    let fig_without = audited_run(&mut tally, "midpoint", &fig, 2, Power::Two, 0).map(|r| r.fr_cost);
    let fig_ok = matches!((fig_with, fig_without), (Some(a), Some(b)) if a < b);

    // 9: m = 0 reduction
    let mut reduction = Vec::new();
    let mut reduction_cases = 0;
    let mut m0_data: Vec<(String, Dataset)> = fixtures().into_iter().map(|(s, d)| (s.to_string(), d)).collect();
    m0_data.push(("diabetes".into(), working_sample(DatasetStyle::Diabetes, 100, 3, 0.01)));
    for (name, data) in &m0_data {
        for k in [2, 3, 5].into_iter().filter(|&k| k < data.len()) {
            for p in P_BOTH {
                reduction_cases += 1;
                let tag = format!("{name} k={k} p={p}");
                let ctx = build_metric(data, k).unwrap();
                let a = solve_lp(&build_lp(&ctx, p, k, 0, 1.0).unwrap());
                let b = solve_lp(&build_outlier_free_lp(&ctx, p, k, 1.0).unwrap());
                if a.status != b.status
                    || (a.status == SolveStatus::Optimal
                        && (a.objective - b.objective).abs() > 1e-6 * a.objective.abs().max(1.0))
                {
                    reduction.push(format!("{tag}: {} vs {}", a.objective, b.objective));
                }
                if let Some(run) = audited_run(&mut tally, "m=0", data, k, p, 0) {
                    if !run.outliers.is_empty() {
                        reduction.push(format!("{tag}: {} outliers with m = 0", run.outliers.len()));
                    }
                }
            }
        }
    }

    // 8: byte-identical sweeps
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bank.csv");
    synth::generate(DatasetStyle::Bank, 2000, 5).unwrap().export(&csv).unwrap();
    std::fs::remove_file(dataio::sidecar_path(&csv)).unwrap();
    let cfg = ExperimentConfig { sample_size: 100, seed: 5, ..ExperimentConfig::new(&csv, &[]) };
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    harness::run_table(&cfg, &[5, 10], &P_BOTH, Some(&a), Exec::default()).unwrap();
    harness::run_table(&cfg, &[5, 10], &P_BOTH, Some(&b), Exec::Sequential).unwrap();
    let diff = compare_dirs(&a, &b);

    // cross-backend objective agreement
    let mut backend_gaps = Vec::new();
    let mut worst_gap = 0.0f64;
    for (name, data) in fixtures().into_iter().chain([("adult", working_sample(DatasetStyle::Adult, 60, 2, 0.01))]) {
        for k in [2, 3, 5].into_iter().filter(|&k| k < data.len()) {
            for p in P_BOTH {
                let ctx = build_metric(&data, k).unwrap();
                let inst = build_lp(&ctx, p, k, 1, 1.0).unwrap();
                let s = solve_with(&SimplexBackend, &inst);
                let i = solve_with(&InteriorPointBackend::default(), &inst);
                let gap = (s.objective - i.objective).abs();
                worst_gap = worst_gap.max(gap);
                if s.status != SolveStatus::Optimal || i.status != SolveStatus::Optimal || gap > 1e-5 {
                    backend_gaps.push(format!("{name} k={k} p={p}: {} vs {} ({:?})", s.objective, i.objective, i.message));
                }
            }
        }
    }

    report.line(
        "1 (LP' <= 3 LP* for p=1, 5 LP* for p=2)",
        tally.theorem1_failures.is_empty(),
        format!("{} runs; max p=2 ratio {:.6}{}", tally.runs, tally.max_p2_ratio, show(&tally.theorem1_failures)),
    );
    report.line(
        "2 (reassignment stretch <= 2)",
        tally.lemma_violations.is_empty(),
        format!(
            "{} checks over {stress_reassignments} stress reassignments and all pipeline runs, {} violations{}",
            tally.lemma_checks,
            tally.lemma_violations.len(),
            show(&tally.lemma_violations)
        ),
    );
    report.line(
        "3 (fair-radius ratio <= 16, <= 6 without deficit)",
        tally.envelope_failures.is_empty(),
        format!("max ratio {:.6}{}", tally.max_ratio, show(&tally.envelope_failures)),
    );
    report.line(
        "4a (LP <= OPT)",
        lp_above_opt.is_empty(),
        format!("{instances} instances{}", show(&lp_above_opt)),
    );
    report.line(
        "4b (cost <= 12 OPT for p=2, 24 OPT for p=1)",
        cost_above_bound.is_empty() && ifxo_failures.is_empty(),
        format!(
            "{compared} compared; worst cost/OPT {worst_ratio:.4}; {} pipeline failures{}{}",
            ifxo_failures.len(),
            show(&cost_above_bound),
            show(&ifxo_failures)
        ),
    );
    report.line(
        "4c (|S| <= k, no outlier in S)",
        bad_centers.is_empty(),
        format!("oracle suite {oracle_secs:.1}s{}", show(&bad_centers)),
    );
    report.line(
        "5 (outliers <= 3m on >= 95% of runs)",
        total > 0 && within * 100 >= 95 * total,
        format!("{within}/{total} within 3m{}", show(&exceed)),
    );
    report.line(
        "6 (cost with outlier budget < cost without)",
        ordering_ok && fig_ok,
        format!("{}; midpoint fixture {:?} vs {:?}", ordering.join(", "), fig_with, fig_without),
    );
    report.line(
        "7 (LP feasibility and 2r support)",
        tally.feasibility_failures.is_empty() && tally.support_failures.is_empty(),
        format!(
            "{} runs{}{}",
            tally.runs,
            show(&tally.feasibility_failures),
            show(&tally.support_failures)
        ),
    );
    report.line(
        "8 (byte-identical table outputs)",
        diff.is_empty(),
        format!("parallel and sequential sweeps compared file by file{}", show(&diff)),
    );
    report.line(
        "9 (m = 0 reduction)",
        reduction.is_empty(),
        format!("{reduction_cases} cases{}", show(&reduction)),
    );
    report.line(
        "extra (simplex vs interior point within 1e-5)",
        backend_gaps.is_empty(),
        format!("max gap {worst_gap:.2e}{}", show(&backend_gaps)),
    );
    report.line(
        "extra (library vs recomputed values)",
        tally.consistency_failures.is_empty(),
        format!("{sweep_runs} sweep runs{}", show(&tally.consistency_failures)),
    );
    println!("acceptance finished in {:.1}s", start.elapsed().as_secs_f64());
    if report.failed > 0 {
        println!("{} criteria failed", report.failed);
        std::process::exit(1);
    }
}

fn compare_dirs(a: &Path, b: &Path) -> Vec<String> {
    let list = |d: &Path| -> BTreeSet<String> {
        std::fs::read_dir(d)
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .filter(|f| f != "timings.csv")
            .collect()
    };
    let (la, lb) = (list(a), list(b));
    let mut diff = Vec::new();
    if la != lb {
        diff.push(format!("file sets differ: {la:?} vs {lb:?}"));
    }
    for f in la.intersection(&lb) {
        if std::fs::read(a.join(f)).unwrap() != std::fs::read(b.join(f)).unwrap() {
            diff.push(format!("{f} differs"));
        }
    }
    if la.is_empty() {
        diff.push("no outputs written".into());
    }
    diff
}
