//! Banded vs dense eigensolver timing on Fibonacci operators.

use std::time::{Duration, Instant};

use serde_json::{json, Value};

use super::Document;
use crate::error::{Error, Result};
use crate::fractal::loglog_fit;
use crate::operator::{boundary_eigenvalues, Boundary, PeriodicJacobi, Pipeline};
use crate::realnum::{DoubleDouble, Precision, Real};
use crate::substitution::Model;

const MIN_SAMPLE: Duration = Duration::from_millis(10);
const FIT_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Banded,
    Dense,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Banded => "banded",
            Method::Dense => "dense",
        }
    }

    fn pipeline(self) -> Pipeline {
        match self {
            Method::Banded => Pipeline::Banded,
            Method::Dense => Pipeline::Dense,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// `K = 2^e` for each exponent.
    pub k_exps: Vec<u32>,
    pub dense_cap: usize,
    pub reps: usize,
    pub precisions: Vec<Precision>,
    pub lambdas: Vec<f64>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            k_exps: (9..=13).collect(),
            dense_cap: 4096,
            reps: 3,
            precisions: vec![Precision::Double, Precision::Extended],
            lambdas: vec![1.0, 2.0, 3.0, 4.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub k: usize,
    pub method: Method,
    pub precision: Precision,
    /// Median over repetitions, averaged over the couplings.
    pub wall_seconds: f64,
    /// Band-reduction rotations (the dense path uses reflections and reports 0).
    pub rotation_count: u64,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    /// `(method, precision, slope)` of log(seconds) against log(K) over the last five points.
    pub slopes: Vec<(Method, Precision, f64)>,
}

impl BenchReport {
    pub fn slope(&self, method: Method, precision: Precision) -> Option<f64> {
        self.slopes.iter().find(|s| s.0 == method && s.1 == precision).map(|s| s.2)
    }

    pub fn series(&self, method: Method, precision: Precision) -> Vec<&BenchRecord> {
        self.records.iter().filter(|r| r.method == method && r.precision == precision).collect()
    }

    pub fn to_document(&self) -> Document {
        let records: Vec<Value> = self
            .records
            .iter()
            .map(|r| {
                json!({
                    "K": r.k,
                    "method": r.method.name(),
                    "precision": r.precision.name(),
                    "wall_seconds": r.wall_seconds.to_decimal(),
                    "rotation_count": r.rotation_count,
                })
            })
            .collect();
        let slopes: Vec<Value> = self
            .slopes
            .iter()
            .map(|(m, p, s)| json!({"method": m.name(), "precision": p.name(), "slope": s.to_decimal()}))
            .collect();
        let rows = self
            .records
            .iter()
            .map(|r| {
                vec![
                    r.k.to_string(),
                    r.method.name().to_string(),
                    r.precision.name().to_string(),
                    r.wall_seconds.to_decimal(),
                    r.rotation_count.to_string(),
                ]
            })
            .collect();
        Document {
            json: json!({"records": records, "slopes": slopes}),
            csv_header: "K,method,precision,wall_seconds,rotation_count",
            csv_rows: rows,
        }
    }
}

/// Seconds per call, repeating the call until the sample spans at least 10 ms.
fn time_once(mut f: impl FnMut() -> Result<u64>) -> Result<(f64, u64)> {
    let start = Instant::now();
    let mut calls = 0u32;
    let mut rotations;
    loop {
        rotations = f()?;
        calls += 1;
        if start.elapsed() >= MIN_SAMPLE {
            break;
        }
    }
    Ok((start.elapsed().as_secs_f64() / calls as f64, rotations))
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn measure<R: Real>(k: usize, method: Method, cfg: &BenchConfig) -> Result<BenchRecord> {
    let mut total = 0.0;
    let mut rotations = 0u64;
    for &lambda in &cfg.lambdas {
        let op: PeriodicJacobi<R> = Model::fibonacci(R::from_f64(lambda)).sample_potential(k)?;
        let mut samples = Vec::with_capacity(cfg.reps);
        for _ in 0..cfg.reps {
            let (secs, rot) = time_once(|| {
                let (eigs, rot) = boundary_eigenvalues(&op, Boundary::Periodic, method.pipeline())?;
                std::hint::black_box(eigs);
                Ok(rot)
            })?;
            samples.push(secs);
            rotations = rotations.max(rot);
        }
        total += median(samples);
    }
    Ok(BenchRecord {
        k,
        method,
        precision: R::PRECISION,
        wall_seconds: total / cfg.lambdas.len() as f64,
        rotation_count: rotations,
    })
}

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.k_exps.len() < FIT_POINTS {
        return Err(Error::invalid(format!("the K grid needs at least {FIT_POINTS} points")));
    }
    if cfg.reps < 3 {
        return Err(Error::invalid("the benchmark needs at least 3 repetitions"));
    }
    if cfg.lambdas.is_empty() || cfg.precisions.is_empty() {
        return Err(Error::invalid("the benchmark needs couplings and precisions"));
    }
    let mut records = Vec::new();
    let mut slopes = Vec::new();
    for &precision in &cfg.precisions {
        for method in [Method::Banded, Method::Dense] {
            let mut series = Vec::new();
            for &e in &cfg.k_exps {
                let k = 1usize << e;
                if method == Method::Dense && k > cfg.dense_cap {
                    continue;
                }
                let rec = match precision {
                    Precision::Double => measure::<f64>(k, method, cfg)?,
                    Precision::Extended => measure::<DoubleDouble>(k, method, cfg)?,
                };
                series.push(rec);
            }
            let tail = &series[series.len().saturating_sub(FIT_POINTS)..];
            if tail.len() >= 2 {
                let xs: Vec<f64> = tail.iter().map(|r| r.k as f64).collect();
                let ys: Vec<f64> = tail.iter().map(|r| r.wall_seconds).collect();
                slopes.push((method, precision, loglog_fit(&xs, &ys)?.0));
            }
            records.extend(series);
        }
    }
    Ok(BenchReport { records, slopes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_runs() {
        let cfg = BenchConfig {
            k_exps: (4..=8).collect(),
            dense_cap: 64,
            reps: 3,
            precisions: vec![Precision::Double],
            lambdas: vec![1.0, 2.0],
        };
        let report = run_bench(&cfg).unwrap();
        assert_eq!(report.series(Method::Banded, Precision::Double).len(), 5);
        assert_eq!(report.series(Method::Dense, Precision::Double).len(), 3);
        assert!(report.records.iter().all(|r| r.wall_seconds > 0.0));
        assert!(report.slope(Method::Banded, Precision::Double).is_some());
        let doc = report.to_document().render(super::super::Format::Csv).unwrap();
        assert_eq!(doc.lines().count(), 9);
    }

    #[test]
    fn rejects_short_grid() {
        let cfg = BenchConfig { k_exps: vec![4, 5], ..BenchConfig::default() };
        assert!(run_bench(&cfg).is_err());
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
