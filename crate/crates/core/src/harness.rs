//! End-to-end pipeline (LP → outlier rounding → fair rounding) and the
//! experiment sweep that writes plot-ready tables.

use crate::dataio::{self, Dataset};
use crate::fairround::{fair_round, fairness_ratio, ClusteringResult};
use crate::lp::{build_lp, solve_lp, SolveStatus};
use crate::metric::{build_metric_with, MetricContext};
use crate::outround::{cost_bound_factor, out_round, RoundedFractional};
use crate::{Error, Exec, Power, Result};
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub data: PathBuf,
    /// Empty selects every column (and reads the export sidecar if present).
    pub features: Vec<String>,
    pub k: usize,
    pub p: Power,
    /// Outlier budget; `None` means `⌈0.01 · n⌉` of the working sample.
    pub m: Option<usize>,
    pub alpha: f64,
    pub tau: f64,
    /// Sampling is skipped when the dataset is not larger than this.
    pub sample_size: usize,
    pub seed: u64,
    pub inject_fraction: f64,
    pub scale: bool,
    /// One 0-based point index per line, indexing the working sample.
    pub outlier_labels: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(data: impl Into<PathBuf>, features: &[&str]) -> Self {
        ExperimentConfig {
            data: data.into(),
            features: features.iter().map(|s| s.to_string()).collect(),
            k: 5,
            p: Power::Two,
            m: None,
            alpha: 1.0,
            tau: 0.0,
            sample_size: 1000,
            seed: 0,
            inject_fraction: 0.01,
            scale: true,
            outlier_labels: None,
        }
    }
}

/// Default outlier budget for a working sample of `n` points.
pub fn default_outlier_budget(n: usize) -> usize {
    dataio::ceil_count(0.01, n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunParams {
    pub k: usize,
    pub p: Power,
    pub m: usize,
    pub alpha: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StageTimings {
    pub metric: f64,
    pub build_lp: f64,
    pub solve: f64,
    pub outround: f64,
    pub fairround: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub k: usize,
    pub p: Power,
    pub m: usize,
    pub alpha: f64,
    pub tau: f64,
    pub seed: u64,
    pub n: usize,
    /// `"lp"` or `"labels"`.
    pub outlier_source: &'static str,
    pub lp_star: f64,
    pub lp_prime: f64,
    pub fr_cost: f64,
    pub n_outliers_detected: usize,
    pub n_injected: usize,
    /// Injected points that ended up marked as outliers.
    pub injected_detected: usize,
    pub max_fairness_ratio: f64,
    pub theorem1_ratio: f64,
    pub n_centers: usize,
    /// Centers opened by the filter representatives before the budget fill.
    pub n_filter_centers: usize,
    pub coverage_deficit: f64,
    pub lemma_checks: usize,
    /// More than `3m` outliers detected (reported, not an error).
    pub outliers_exceed_3m: bool,
    pub solver: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<StageTimings>,
}

/// Per-point row for fair-radius plots.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRecord {
    pub index: usize,
    pub assigned_center: Option<usize>,
    pub distance: Option<f64>,
    pub r: f64,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub result: ClusteringResult,
    pub record: RunRecord,
    pub rounded: RoundedFractional,
    pub points: Vec<PointRecord>,
}

/// Exported clustering: centers and assignment in working-sample indices.
#[derive(Debug, Clone, Serialize)]
pub struct ResultExport<'a> {
    pub centers: &'a [usize],
    pub assignment: &'a [Option<usize>],
    pub cost: f64,
    pub max_fairness_ratio: f64,
    pub k: usize,
    pub m: usize,
    pub p: Power,
    pub seed: u64,
}

impl RunOutput {
    pub fn export(&self) -> ResultExport<'_> {
        ResultExport {
            centers: &self.result.centers,
            assignment: &self.result.assignment,
            cost: self.result.cost,
            max_fairness_ratio: self.result.max_fairness_ratio,
            k: self.record.k,
            m: self.record.m,
            p: self.record.p,
            seed: self.record.seed,
        }
    }

    pub fn points_csv(&self) -> String {
        let mut out = String::from("index,assigned_center,distance,r,ratio\n");
        for pt in &self.points {
            let opt = |x: Option<f64>| x.map(|x| x.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                pt.index,
                pt.assigned_center.map(|c| c.to_string()).unwrap_or_default(),
                opt(pt.distance),
                pt.r,
                opt(pt.ratio)
            );
        }
        out
    }
}

/// load → scale → sample → inject, skipping stages already applied to an
/// exported dataset.
pub fn prepare_dataset(config: &ExperimentConfig) -> Result<Dataset> {
    let mut d = if config.features.is_empty() {
        Dataset::import(&config.data)?
    } else {
        dataio::load_csv(&config.data, &config.features)?
    };
    if config.scale && !d.is_scaled() {
        d = dataio::standard_scale(&d)?;
    }
    if config.sample_size < d.len() {
        d = dataio::sample_points(&d, config.sample_size, config.seed)?;
    }
    if config.inject_fraction > 0.0 && d.injected_outlier_indices().is_empty() {
        d = dataio::inject_outliers(&d, config.inject_fraction, config.seed)?;
    }
    Ok(d)
}

pub fn read_outlier_labels(path: impl AsRef<Path>) -> Result<BTreeSet<usize>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut labels = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let idx = line.parse().map_err(|_| Error::BadCell {
            row: i + 1,
            column: "index".into(),
            value: line.to_string(),
        })?;
        labels.insert(idx);
    }
    Ok(labels)
}

fn resolve_params(config: &ExperimentConfig, n: usize) -> RunParams {
    RunParams {
        k: config.k,
        p: config.p,
        m: config.m.unwrap_or_else(|| default_outlier_budget(n)),
        alpha: config.alpha,
        tau: config.tau,
    }
}

/// Runs the whole pipeline for one configuration.
pub fn ifxo(config: &ExperimentConfig) -> Result<(ClusteringResult, RunRecord)> {
    let out = ifxo_detailed(config)?;
    Ok((out.result, out.record))
}

pub fn ifxo_detailed(config: &ExperimentConfig) -> Result<RunOutput> {
    let d = prepare_dataset(config)?;
    let params = resolve_params(config, d.len());
    let labels = config.outlier_labels.as_ref().map(read_outlier_labels).transpose()?;
    ifxo_dataset(&d, &params, labels.as_ref(), Exec::default())
}

/// Pipeline on an already prepared dataset. With `labels`, the labeled
/// points are removed up front and the LP runs on the rest with `m = 0`.
pub fn ifxo_dataset(
    d: &Dataset,
    params: &RunParams,
    labels: Option<&BTreeSet<usize>>,
    exec: Exec,
) -> Result<RunOutput> {
    match labels {
        None => run_lp_pipeline(d, params, exec),
        Some(labels) => run_with_labels(d, params, labels, exec),
    }
}

struct Staged {
    ctx: MetricContext,
    rounded: RoundedFractional,
    result: ClusteringResult,
    lp_star: f64,
    lp_prime: f64,
    solver: String,
    timings: StageTimings,
}

fn solve_and_round(d: &Dataset, params: &RunParams, m: usize, exec: Exec) -> Result<Staged> {
    let mut timings = StageTimings::default();
    let clock = Instant::now();
    let ctx = build_metric_with(d, params.k, exec)?;
    timings.metric = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let inst = build_lp(&ctx, params.p, params.k, m, params.alpha)?;
    timings.build_lp = clock.elapsed().as_secs_f64();

    let report = solve_lp(&inst);
    timings.solve = report.solve_time;
    let sol = match report.status {
        SolveStatus::Optimal => report.solution.expect("optimal report carries a solution"),
        SolveStatus::Infeasible => {
            return Err(Error::Infeasible(format!(
                "k = {}, m = {m}, alpha = {}",
                params.k, params.alpha
            )))
        }
        SolveStatus::Error => return Err(Error::Solver(report.message.unwrap_or_default())),
    };

    let clock = Instant::now();
    let rounded = out_round(&ctx, &sol, params.tau)?;
    timings.outround = clock.elapsed().as_secs_f64();
    let lp_star = report.objective;
    let lp_prime = rounded.cost(&ctx, params.p);
    let bound = cost_bound_factor(params.p) * lp_star;
    if lp_prime > bound * (1.0 + 1e-6) + 1e-9 {
        return Err(Error::Invariant(format!(
            "rounded LP cost {lp_prime} exceeds {} · {lp_star}",
            cost_bound_factor(params.p)
        )));
    }

    let clock = Instant::now();
    let result = fair_round(&ctx, &rounded, params.p, exec)?;
    timings.fairround = clock.elapsed().as_secs_f64();

    Ok(Staged {
        ctx,
        rounded,
        result,
        lp_star,
        lp_prime,
        solver: report.solver_name,
        timings,
    })
}

fn theorem1_ratio(lp_prime: f64, lp_star: f64) -> f64 {
    if lp_star > 0.0 {
        lp_prime / lp_star
    } else if lp_prime == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

fn exceeds_3m(outliers: usize, m: usize) -> bool {
    outliers > 3 * m
}

fn run_lp_pipeline(d: &Dataset, params: &RunParams, exec: Exec) -> Result<RunOutput> {
    let s = solve_and_round(d, params, params.m, exec)?;
    let outliers = &s.rounded.outlier_indices;
    let injected = d.injected_outlier_indices();
    let record = RunRecord {
        k: params.k,
        p: params.p,
        m: params.m,
        alpha: params.alpha,
        tau: params.tau,
        seed: d.seed(),
        n: d.len(),
        outlier_source: "lp",
        lp_star: s.lp_star,
        lp_prime: s.lp_prime,
        fr_cost: s.result.cost,
        n_outliers_detected: outliers.len(),
        n_injected: injected.len(),
        injected_detected: injected.intersection(outliers).count(),
        max_fairness_ratio: s.result.max_fairness_ratio,
        theorem1_ratio: theorem1_ratio(s.lp_prime, s.lp_star),
        n_centers: s.result.centers.len(),
        n_filter_centers: s.result.filter_centers.len(),
        coverage_deficit: s.rounded.total_deficit(),
        lemma_checks: s.rounded.lemma_checks,
        outliers_exceed_3m: exceeds_3m(outliers.len(), params.m),
        solver: s.solver,
        timings: Some(s.timings),
    };
    let points = (0..d.len())
        .map(|v| {
            let r = s.ctx.fair_radius(v);
            let a = s.result.assignment[v];
            let dist = a.map(|c| s.ctx.dist(v, c));
            PointRecord {
                index: v,
                assigned_center: a,
                distance: dist,
                r,
                ratio: dist.map(|dv| fairness_ratio(dv, r)),
            }
        })
        .collect();
    Ok(RunOutput {
        result: s.result,
        record,
        rounded: s.rounded,
        points,
    })
}

fn run_with_labels(d: &Dataset, params: &RunParams, labels: &BTreeSet<usize>, exec: Exec) -> Result<RunOutput> {
    let n = d.len();
    if let Some(&bad) = labels.iter().find(|&&i| i >= n) {
        return Err(Error::InvalidParameter(format!("outlier label {bad} out of range for {n} points")));
    }
    let keep: Vec<usize> = (0..n).filter(|v| !labels.contains(v)).collect();
    if keep.is_empty() {
        return Err(Error::AllOutliers);
    }
    let sub = d.subset(&keep)?;
    let s = solve_and_round(&sub, params, 0, exec)?;

    // back to working-sample indices
    let to_full = |xs: &[usize]| xs.iter().map(|&i| keep[i]).collect::<Vec<_>>();
    let centers = to_full(&s.result.centers);
    let filter_set = to_full(&s.result.filter_set);
    let filter_centers = to_full(&s.result.filter_centers);
    let mut assignment = vec![None; n];
    for (i, &v) in keep.iter().enumerate() {
        assignment[v] = s.result.assignment[i].map(|c| keep[c]);
    }
    let result = ClusteringResult {
        centers,
        assignment,
        cost: s.result.cost,
        max_fairness_ratio: s.result.max_fairness_ratio,
        filter_set,
        filter_centers,
    };
    let mut rounded = s.rounded.clone();
    rounded.outlier_indices = labels.clone();

    let injected = d.injected_outlier_indices();
    let record = RunRecord {
        k: params.k,
        p: params.p,
        m: labels.len(),
        alpha: params.alpha,
        tau: params.tau,
        seed: d.seed(),
        n,
        outlier_source: "labels",
        lp_star: s.lp_star,
        lp_prime: s.lp_prime,
        fr_cost: result.cost,
        n_outliers_detected: labels.len(),
        n_injected: injected.len(),
        injected_detected: injected.intersection(labels).count(),
        max_fairness_ratio: result.max_fairness_ratio,
        theorem1_ratio: theorem1_ratio(s.lp_prime, s.lp_star),
        n_centers: result.centers.len(),
        n_filter_centers: result.filter_centers.len(),
        coverage_deficit: s.rounded.total_deficit(),
        lemma_checks: s.rounded.lemma_checks,
        outliers_exceed_3m: false,
        solver: s.solver,
        timings: Some(s.timings),
    };
    let mut points: Vec<PointRecord> = (0..n)
        .map(|v| PointRecord {
            index: v,
            assigned_center: None,
            distance: None,
            r: f64::NAN,
            ratio: None,
        })
        .collect();
    for (i, &v) in keep.iter().enumerate() {
        let r = s.ctx.fair_radius(i);
        let c = s.result.assignment[i].expect("every kept point is an inlier");
        let dist = s.ctx.dist(i, c);
        points[v] = PointRecord {
            index: v,
            assigned_center: Some(keep[c]),
            distance: Some(dist),
            r,
            ratio: Some(fairness_ratio(dist, r)),
        };
    }
    Ok(RunOutput {
        result,
        record,
        rounded,
        points,
    })
}

/// Outcome of one `(k, p)` cell of a sweep.
#[derive(Debug)]
pub struct TableEntry {
    pub k: usize,
    pub p: Power,
    pub outcome: Result<RunOutput>,
}

#[derive(Serialize)]
struct FailedRecord<'a> {
    k: usize,
    p: Power,
    error: &'a str,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Runs every `(k, p)` combination on one prepared dataset. Failed cells are
/// recorded and the sweep continues.
///
/// With `out_dir`, writes `table.csv`, `records.json`, and per cell
/// `fair_radius_k{k}_p{p}.csv` and `audit_k{k}_p{p}.json` (all byte-for-byte
/// reproducible), plus `timings.csv` (wall-clock, not reproducible).
pub fn run_table(
    config: &ExperimentConfig,
    k_list: &[usize],
    p_list: &[Power],
    out_dir: Option<&Path>,
    exec: Exec,
) -> Result<Vec<TableEntry>> {
    let d = prepare_dataset(config)?;
    let labels = config.outlier_labels.as_ref().map(read_outlier_labels).transpose()?;
    let cells: Vec<(usize, Power)> = k_list
        .iter()
        .flat_map(|&k| p_list.iter().map(move |&p| (k, p)))
        .collect();
    let entries: Vec<TableEntry> = exec.map_slice(&cells, |&(k, p)| {
        let cfg = ExperimentConfig { k, p, ..config.clone() };
        let params = resolve_params(&cfg, d.len());
        TableEntry {
            k,
            p,
            outcome: ifxo_dataset(&d, &params, labels.as_ref(), Exec::Sequential),
        }
    });
    if let Some(dir) = out_dir {
        write_table(dir, &entries)?;
    }
    Ok(entries)
}

pub fn write_table(dir: &Path, entries: &[TableEntry]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut table = csv::Writer::from_writer(Vec::new());
    table.write_record([
        "k",
        "p",
        "status",
        "lp_star",
        "lp_prime",
        "fr_cost",
        "n_outliers",
        "max_fairness_ratio",
        "theorem1_ratio",
        "n_centers",
    ])?;
    let mut timings = String::from("k,p,metric,build_lp,solve,outround,fairround\n");
    let mut records = Vec::new();
    for e in entries {
        let (k, p) = (e.k.to_string(), e.p.to_string());
        match &e.outcome {
            Ok(out) => {
                let r = &out.record;
                table.write_record([
                    k.clone(),
                    p.clone(),
                    "ok".to_string(),
                    r.lp_star.to_string(),
                    r.lp_prime.to_string(),
                    r.fr_cost.to_string(),
                    r.n_outliers_detected.to_string(),
                    r.max_fairness_ratio.to_string(),
                    r.theorem1_ratio.to_string(),
                    r.n_centers.to_string(),
                ])?;
                if let Some(t) = &r.timings {
                    let _ = writeln!(
                        timings,
                        "{k},{p},{},{},{},{},{}",
                        t.metric, t.build_lp, t.solve, t.outround, t.fairround
                    );
                }
                let clean = RunRecord { timings: None, ..r.clone() };
                records.push(serde_json::to_value(&clean)?);
                write_file(&dir.join(format!("fair_radius_k{k}_p{p}.csv")), &out.points_csv())?;
                write_file(&dir.join(format!("audit_k{k}_p{p}.json")), &out.rounded.audit_json()?)?;
            }
            Err(err) => {
                let msg = err.to_string();
                table.write_record([k.clone(), p.clone(), msg.clone(), String::new(), String::new(), String::new(), String::new(), String::new(), String::new(), String::new()])?;
                records.push(serde_json::to_value(FailedRecord { k: e.k, p: e.p, error: &msg })?);
            }
        }
    }
    let table = String::from_utf8(table.into_inner().map_err(|e| Error::io(dir, e.into_error()))?)
        .expect("csv output is utf-8");
    write_file(&dir.join("table.csv"), &table)?;
    write_file(&dir.join("records.json"), &serde_json::to_string_pretty(&records)?)?;
    write_file(&dir.join("timings.csv"), &timings)?;
    Ok(())
}
