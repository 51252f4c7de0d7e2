//! Fractal statistics of spectral covers: a two-level Hausdorff-dimension
//! estimate, box counting, gap widths and band widths.

use crate::coverset::{CoverFamily, IntervalSet};
use crate::error::{Error, Result};
use crate::operator::degenerate_width;
use crate::realnum::Real;


pub const MAX_BISECTIONS: usize = 200;
const GRID_POINTS: usize = 1024;

/// Default root tolerance: `1e-12` in double, `1e-24` in extended precision.
pub fn default_root_tol<R: Real>() -> R {
    R::from_f64(if R::UNIT_ROUNDOFF < 1e-20 { 1e-24 } else { 1e-12 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateStatus {
    Converged,
    /// `f` keeps one sign on `[0, 1]`; `alpha` minimizes `|f|` on a grid.
    NoSignChange,
    /// Both covers carry the same widths, so `f` vanishes identically.
    DegenerateCover,
    /// The bracket stopped shrinking before `|f|` reached the tolerance.
    Stalled,
}

#[derive(Debug, Clone)]
pub struct DimensionEstimate<R> {
    pub alpha: R,
    pub k_pair: (usize, usize),
    /// `|f(alpha)|`
    pub residual: R,
    pub iterations: usize,
    pub status: EstimateStatus,
    /// Whether `f` was monotone on the sampling grid.
    pub monotone: bool,
}

/// Log-widths of a cover's intervals, with degenerate widths raised to the repair floor.
fn log_widths<R: Real>(widths: &[R]) -> Vec<R> {
    let floor = degenerate_width::<R>();
    widths.iter().map(|w| w.max(floor).ln()).collect()
}

fn power_sum<R: Real>(logs: &[R], alpha: R) -> R {
    logs.iter().fold(R::zero(), |acc, &l| acc + (alpha * l).exp())
}

fn power_sum_f64(logs: &[f64], alpha: f64) -> f64 {
    logs.iter().map(|l| (alpha * l).exp()).sum()
}

/// Root `alpha` of `f(alpha) = sum |B_k|^alpha - sum |B_{k+1}|^alpha` on `[0, 1]`.
pub fn hausdorff_estimate<R: Real>(
    widths_k: &[R],
    widths_k1: &[R],
    k_pair: (usize, usize),
    root_tol: R,
) -> Result<DimensionEstimate<R>> {
    if widths_k.is_empty() || widths_k1.is_empty() {
        return Err(Error::invalid("dimension estimate needs two nonempty covers"));
    }
    let lk = log_widths(widths_k);
    let lk1 = log_widths(widths_k1);
    let f = |alpha: R| power_sum(&lk, alpha) - power_sum(&lk1, alpha);

    let mut sorted_k = lk.clone();
    let mut sorted_k1 = lk1.clone();
    sorted_k.sort_by(R::total_cmp);
    sorted_k1.sort_by(R::total_cmp);
    if sorted_k == sorted_k1 {
        return Ok(DimensionEstimate {
            alpha: R::one(),
            k_pair,
            residual: R::zero(),
            iterations: 0,
            status: EstimateStatus::DegenerateCover,
            monotone: true,
        });
    }

    let lk_f: Vec<f64> = lk.iter().map(|v| v.to_f64()).collect();
    let lk1_f: Vec<f64> = lk1.iter().map(|v| v.to_f64()).collect();
    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|i| {
            let a = i as f64 / (GRID_POINTS - 1) as f64;
            power_sum_f64(&lk_f, a) - power_sum_f64(&lk1_f, a)
        })
        .collect();
    let monotone = grid.windows(2).all(|w| w[1] >= w[0]) || grid.windows(2).all(|w| w[1] <= w[0]);

    let (mut lo, mut hi) = (R::zero(), R::one());
    let (mut f_lo, f_hi) = (f(lo), f(hi));
    if (f_lo > R::zero()) == (f_hi > R::zero()) && f_lo != R::zero() && f_hi != R::zero() {
        let best = (0..GRID_POINTS)
            .min_by(|&i, &j| grid[i].abs().total_cmp(&grid[j].abs()))
            .expect("grid is nonempty");
        let alpha = R::from_f64(best as f64 / (GRID_POINTS - 1) as f64);
        return Ok(DimensionEstimate {
            alpha,
            k_pair,
            residual: f(alpha).abs(),
            iterations: 0,
            status: EstimateStatus::NoSignChange,
            monotone,
        });
    }
    if f_lo == R::zero() {
        return Ok(DimensionEstimate { alpha: lo, k_pair, residual: R::zero(), iterations: 0, status: EstimateStatus::Converged, monotone });
    }
    let mut iterations = 0;
    let mut mid = (lo + hi).mul_f64(0.5);
    let mut f_mid = f(mid);
    while iterations < MAX_BISECTIONS && f_mid.abs() > root_tol {
        iterations += 1;
        if (f_mid > R::zero()) == (f_lo > R::zero()) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        let next = (lo + hi).mul_f64(0.5);
        if next == lo || next == hi {
            break;
        }
        mid = next;
        f_mid = f(mid);
    }
    let residual = f_mid.abs();
    let status = if residual <= root_tol { EstimateStatus::Converged } else { EstimateStatus::Stalled };
    Ok(DimensionEstimate { alpha: mid, k_pair, residual, iterations, status, monotone })
}

/// Widths of every unmerged constituent band of a cover.
pub fn cover_widths<R: Real>(cover: &CoverFamily<R>) -> Vec<R> {
    cover.raw_bands().map(|(_, _, b)| b.width()).collect()
}

/// [`hausdorff_estimate`] on the raw bands of two consecutive covers.
pub fn hausdorff_from_covers<R: Real>(
    ck: &CoverFamily<R>,
    ck1: &CoverFamily<R>,
    root_tol: R,
) -> Result<DimensionEstimate<R>> {
    hausdorff_estimate(&cover_widths(ck), &cover_widths(ck1), (ck.k, ck1.k), root_tol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxCount<R> {
    pub epsilon: R,
    pub count: u64,
}

/// Number of grid cells `[j eps, (j+1) eps)` meeting `set` in positive length.
///
/// A zero-length interval counts the cell containing it.
pub fn box_count<R: Real>(set: &IntervalSet<R>, eps: R) -> Result<BoxCount<R>> {
    if !(eps > R::zero()) || !eps.is_finite() {
        return Err(Error::invalid(format!("box size must be positive, got {eps}")));
    }
    let cell = |j: i64| R::from_i64(j) * eps;
    let mut count = 0u64;
    let mut last: Option<i64> = None;
    for &(lo, hi) in set.intervals() {
        let mut first = (lo / eps).floor().to_f64() as i64;
        while cell(first) > lo {
            first -= 1;
        }
        while cell(first + 1) <= lo {
            first += 1;
        }
        let mut end = first;
        if hi > lo {
            // last cell whose left edge lies strictly below hi
            end = (hi / eps).floor().to_f64() as i64;
            while cell(end) >= hi {
                end -= 1;
            }
            while cell(end + 1) < hi {
                end += 1;
            }
        }
        let start = match last {
            Some(l) if l >= first => l + 1,
            _ => first,
        };
        if end >= start {
            count += (end - start + 1) as u64;
            last = Some(end);
        }
    }
    Ok(BoxCount { epsilon: eps, count })
}

/// `(eps, log N(eps) / log(1/eps))` for each box size.
pub fn box_dim_curve<R: Real>(set: &IntervalSet<R>, eps_list: &[R]) -> Result<Vec<(R, R)>> {
    eps_list
        .iter()
        .map(|&eps| {
            if eps == R::one() {
                return Err(Error::invalid("box size 1 gives log(1/eps) = 0"));
            }
            let n = box_count(set, eps)?.count;
            Ok((eps, R::from_i64(n as i64).ln() / (-eps.ln())))
        })
        .collect()
}

/// Widest gap of the merged cover, zero when it is connected.
pub fn largest_gap<R: Real>(cover: &CoverFamily<R>) -> R {
    cover.cover.largest_gap()
}

/// Narrowest unmerged band and whether any band was repaired.
///
/// Widths below the repair floor are not resolved by the arithmetic and are
/// reported at the floor.
pub fn min_band_width<R: Real>(cover: &CoverFamily<R>) -> (R, bool) {
    let floor = degenerate_width::<R>();
    let width = cover
        .raw_bands()
        .map(|(_, _, b)| b.width().max(floor))
        .fold(None, |m: Option<R>, w| Some(m.map_or(w, |m| m.min(w))));
    (width.unwrap_or(R::zero()), cover.repaired() > 0)
}

/// Least-squares line through `(ln x, ln y)`; returns `(slope, intercept)`.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::invalid("log-log fit needs at least two paired points"));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::invalid("log-log fit needs positive finite data"));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("log-log fit needs distinct abscissae"));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// `log(1 + sqrt 2) / log S` for the upper and lower growth rates of the Fibonacci trace map.
pub fn fibonacci_dimension_bounds(lambda: f64) -> Option<(f64, f64)> {
    let upper_rate = 2.0 * lambda + 22.0;
    let disc = (lambda - 4.0).powi(2) - 12.0;
    if disc < 0.0 {
        return None;
    }
    let lower_rate = 0.5 * (lambda - 4.0 + disc.sqrt());
    if lower_rate <= 1.0 {
        return None;
    }
    let num = (1.0 + std::f64::consts::SQRT_2).ln();
    Some((num / upper_rate.ln(), num / lower_rate.ln()))
}
