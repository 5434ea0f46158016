//! Pairwise Euclidean distances, fair radii and fair balls.

use crate::dataio::Dataset;
use crate::{Error, Exec, Result};
use std::io::Write;
use std::path::Path;

/// Distances and fair radii for a fixed point set and center budget `k`.
///
/// `fair_radius(v)` is the distance from `v` to its `t`-th nearest *other*
/// point, with `t = min(⌈n/k⌉, n - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricContext {
    n: usize,
    k: usize,
    neighbor_count: usize,
    dist: Vec<f64>,
    fair_radius: Vec<f64>,
}

pub fn neighbor_count(n: usize, k: usize) -> usize {
    n.div_ceil(k).min(n.saturating_sub(1))
}

pub fn build_metric(d: &Dataset, k: usize) -> Result<MetricContext> {
    build_metric_with(d, k, Exec::default())
}

pub fn build_metric_with(d: &Dataset, k: usize, exec: Exec) -> Result<MetricContext> {
    let n = d.len();
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 points, got {n}")));
    }
    check_k(k, n)?;
    let mut dist = vec![0.0; n * n];
    exec.fill_rows(&mut dist, n, |v, row| {
        let pv = d.point(v);
        for (u, out) in row.iter_mut().enumerate() {
            *out = euclidean(pv, d.point(u));
        }
    });
    Ok(MetricContext::assemble(n, k, dist, exec))
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("k = {k} must be in 1..={n}")));
    }
    Ok(())
}

#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

impl MetricContext {
    /// Builds a context from an explicit row-major `n × n` distance matrix.
    /// Unlike [`build_metric`] this accepts `n = 1`, where the fair radius is 0.
    pub fn from_distance_matrix(n: usize, k: usize, dist: Vec<f64>) -> Result<MetricContext> {
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        check_k(k, n)?;
        if dist.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "distance matrix has {} entries, expected {}",
                dist.len(),
                n * n
            )));
        }
        for v in 0..n {
            if dist[v * n + v] != 0.0 {
                return Err(Error::InvalidParameter(format!("d({v},{v}) != 0")));
            }
            for u in 0..n {
                let duv = dist[v * n + u];
                if !(duv.is_finite() && duv >= 0.0) || duv != dist[u * n + v] {
                    return Err(Error::InvalidParameter(format!(
                        "distance ({v},{u}) must be finite, nonnegative and symmetric"
                    )));
                }
            }
        }
        Ok(MetricContext::assemble(n, k, dist, Exec::default()))
    }

    fn assemble(n: usize, k: usize, dist: Vec<f64>, exec: Exec) -> MetricContext {
        let t = neighbor_count(n, k);
        let fair_radius = exec.map_range(n, |v| {
            if t == 0 {
                return 0.0;
            }
            let mut others: Vec<f64> = (0..n)
                .filter(|&u| u != v)
                .map(|u| dist[v * n + u])
                .collect();
            let (_, r, _) = others.select_nth_unstable_by(t - 1, f64::total_cmp);
            *r
        });
        MetricContext {
            n,
            k,
            neighbor_count: t,
            dist,
            fair_radius,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn neighbor_count(&self) -> usize {
        self.neighbor_count
    }

    #[inline]
    pub fn dist(&self, v: usize, u: usize) -> f64 {
        self.dist[v * self.n + u]
    }

    pub fn row(&self, v: usize) -> &[f64] {
        &self.dist[v * self.n..(v + 1) * self.n]
    }

    #[inline]
    pub fn fair_radius(&self, v: usize) -> f64 {
        self.fair_radius[v]
    }

    pub fn fair_radii(&self) -> &[f64] {
        &self.fair_radius
    }

    /// `{u : d(v,u) <= alpha · r(v)}` in ascending index order; always contains `v`.
    pub fn fair_ball(&self, v: usize, alpha: f64) -> Vec<usize> {
        assert!(alpha >= 1.0, "fair ball stretch must be >= 1, got {alpha}");
        let radius = alpha * self.fair_radius[v];
        self.row(v)
            .iter()
            .enumerate()
            .filter(|(_, &d)| d <= radius)
            .map(|(u, _)| u)
            .collect()
    }

    /// Nearest member of `candidates` to `v`; ties go to the smallest index.
    pub fn nearest<I>(&self, v: usize, candidates: I) -> Option<(usize, f64)>
    where
        I: IntoIterator<Item = usize>,
    {
        let row = self.row(v);
        let mut best: Option<(usize, f64)> = None;
        for u in candidates {
            let d = row[u];
            match best {
                Some((bu, bd)) if d > bd || (d == bd && u > bu) => {}
                _ => best = Some((u, d)),
            }
        }
        best
    }

    /// Dumps `index,radius` rows.
    pub fn write_radius_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::from("index,radius\n");
        for (v, r) in self.fair_radius.iter().enumerate() {
            out.push_str(&format!("{v},{r}\n"));
        }
        std::fs::File::create(path)
            .and_then(|mut f| f.write_all(out.as_bytes()))
            .map_err(|e| Error::io(path, e))
    }
}
