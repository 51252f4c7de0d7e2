//! Interval-set algebra and the nested periodic covers of substitution spectra.
//!
//! For period doubling the level-`k` cover is the union of the spectra of the
//! periodic operators built from `S^k(a)` and `S^k(b)`; for Thue-Morse and
//! Fibonacci it is the union over `S^k(a)` and `S^{k+1}(a)`. The trace maps of
//! these substitutions make the covers shrink as `k` grows.

mod interval;

pub use interval::{IntervalSet, IntervalSetJson, MINKOWSKI_CAP};

use crate::error::{Error, Result};
use crate::monodromy::{schrodinger_monodromy, Monodromy};
use crate::operator::{spectrum, Band, SpectrumResult};
use crate::realnum::Real;
use crate::substitution::{Model, ModelKind, DEFAULT_MAX_WORD_LENGTH};

#[cfg(test)]
mod tests;

/// Which constituent spectra make up a cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverKind {
    /// Levels `k` from seeds `a` and `b`.
    BothSeeds,
    /// Levels `k` and `k + 1` from seed `a`.
    ConsecutiveLevels,
}

impl CoverKind {
    pub fn for_model<R>(model: &Model<R>) -> Result<Self> {
        match model.kind {
            ModelKind::PeriodDoubling => Ok(CoverKind::BothSeeds),
            ModelKind::ThueMorse | ModelKind::Fibonacci => Ok(CoverKind::ConsecutiveLevels),
            _ => Err(Error::invalid("covers are defined for period doubling, Thue-Morse and Fibonacci")),
        }
    }

    /// `(seed, level)` of each constituent of the level-`k` cover.
    pub fn parts(self, k: usize) -> [(char, usize); 2] {
        match self {
            CoverKind::BothSeeds => [('a', k), ('b', k)],
            CoverKind::ConsecutiveLevels => [('a', k), ('a', k + 1)],
        }
    }
}

/// Spectrum of the periodic operator built from `S^level(seed)`.
#[derive(Debug, Clone)]
pub struct LevelSpectrum<R> {
    pub seed: char,
    pub level: usize,
    pub period: usize,
    /// `2 + max|b| + 2 max|a|` of the operator.
    pub norm: R,
    pub spectrum: SpectrumResult<R>,
}

pub fn level_spectrum<R: Real>(model: &Model<R>, seed: char, level: usize, max_len: usize) -> Result<LevelSpectrum<R>> {
    let op = model.level_operator(seed, level, max_len)?;
    Ok(LevelSpectrum { seed, level, period: op.period(), norm: op.norm_bound(), spectrum: spectrum(&op)? })
}

/// Level-`k` cover with its unmerged constituent bands.
#[derive(Debug, Clone)]
pub struct CoverFamily<R> {
    pub kind: CoverKind,
    pub k: usize,
    pub cover: IntervalSet<R>,
    pub parts: Vec<LevelSpectrum<R>>,
}

impl<R: Real> CoverFamily<R> {
    pub fn from_parts(kind: CoverKind, k: usize, parts: Vec<LevelSpectrum<R>>) -> Self {
        let cover = parts
            .iter()
            .fold(IntervalSet::empty(), |acc, p| acc.union(&p.spectrum.merged));
        CoverFamily { kind, k, cover, parts }
    }

    /// Every constituent band, tagged with `(seed, level)`.
    pub fn raw_bands(&self) -> impl Iterator<Item = (char, usize, &Band<R>)> + '_ {
        self.parts.iter().flat_map(|p| p.spectrum.bands.iter().map(move |b| (p.seed, p.level, b)))
    }

    pub fn repaired(&self) -> usize {
        self.parts.iter().map(|p| p.spectrum.repaired).sum()
    }

    pub fn max_period(&self) -> usize {
        self.parts.iter().map(|p| p.period).max().unwrap_or(0)
    }

    pub fn norm(&self) -> R {
        self.parts.iter().fold(R::zero(), |m, p| m.max(p.norm))
    }

    /// `1e3 K u ||J||`, the slack used when comparing covers.
    pub fn tolerance(&self) -> R {
        self.norm().mul_f64(1e3 * self.max_period() as f64 * R::UNIT_ROUNDOFF)
    }
}

pub fn build_cover<R: Real>(model: &Model<R>, k: usize) -> Result<CoverFamily<R>> {
    build_cover_capped(model, k, DEFAULT_MAX_WORD_LENGTH)
}

pub fn build_cover_capped<R: Real>(model: &Model<R>, k: usize, max_len: usize) -> Result<CoverFamily<R>> {
    if k == 0 {
        return Err(Error::invalid("cover level must be at least 1"));
    }
    let kind = CoverKind::for_model(model)?;
    let [(s0, l0), (s1, l1)] = kind.parts(k);
    let (p0, p1) = rayon::join(
        || level_spectrum(model, s0, l0, max_len),
        || level_spectrum(model, s1, l1, max_len),
    );
    Ok(CoverFamily::from_parts(kind, k, vec![p0?, p1?]))
}

/// Covers for levels `k_min..=k_max`, sharing constituent spectra between neighbouring levels.
pub fn build_cover_sequence<R: Real>(
    model: &Model<R>,
    k_min: usize,
    k_max: usize,
    max_len: usize,
) -> Result<Vec<CoverFamily<R>>> {
    if k_min == 0 || k_max < k_min {
        return Err(Error::invalid(format!("bad level range {k_min}..={k_max}")));
    }
    let kind = CoverKind::for_model(model)?;
    let mut needed: Vec<(char, usize)> = (k_min..=k_max).flat_map(|k| kind.parts(k)).collect();
    needed.sort_unstable();
    needed.dedup();
    use rayon::prelude::*;
    let spectra = needed
        .par_iter()
        .map(|&(seed, level)| level_spectrum(model, seed, level, max_len))
        .collect::<Result<Vec<_>>>()?;
    Ok((k_min..=k_max)
        .map(|k| {
            let parts = kind
                .parts(k)
                .iter()
                .map(|key| spectra[needed.binary_search(key).expect("level computed")].clone())
                .collect();
            CoverFamily::from_parts(kind, k, parts)
        })
        .collect())
}

/// Largest trace-map residual over the sample energies.
#[derive(Debug, Clone)]
pub struct TraceMapReport<R> {
    /// Maximum relative residual of the trace recursions.
    pub trace_residual: R,
    /// Maximum relative residual of the matrix recursions (period doubling only).
    pub matrix_residual: R,
    pub evaluated: usize,
    pub skipped: Vec<String>,
}

fn relative<R: Real>(diff: R, scale: R) -> R {
    diff.abs() / (R::one() + scale.abs())
}

// `factors` is the product of the factor norms, which bounds the rounding error when the product cancels
fn matrix_gap<R: Real>(x: &Monodromy<R>, y: &Monodromy<R>, factors: R) -> R {
    let d = Monodromy { m11: x.m11 - y.m11, m12: x.m12 - y.m12, m21: x.m21 - y.m21, m22: x.m22 - y.m22 };
    relative(d.max_abs(), x.max_abs().max(y.max_abs()).max(factors))
}

/// Checks the period-doubling or Thue-Morse trace map at level `k` against direct transfer-matrix products.
///
/// Period doubling: `x_{k+1} = x_k y_k - 2`, `y_{k+1} = x_k^2 - 2`, and
/// `M_{k+1}^a = M_k^b M_k^a`, `M_{k+1}^b = M_k^a M_k^a`. Thue-Morse:
/// `x_{k+1} = x_{k-1}^2 (x_k - 2) + 2` and `y_{k+1} = x_{k+1}`, which needs
/// `x_{k-1} = y_{k-1}` and so starts at `k = 2`. Residuals are relative to
/// `1 +` the largest term or product of matrix entries involved, since a trace
/// of large matrices carries an absolute error proportional to their entries.
/// Energies where a product overflows are skipped.
pub fn check_trace_map<R: Real>(model: &Model<R>, k: usize, energies: &[R]) -> Result<TraceMapReport<R>> {
    let pd = match model.kind {
        ModelKind::PeriodDoubling => true,
        ModelKind::ThueMorse => false,
        _ => return Err(Error::invalid("trace maps are checked for period doubling and Thue-Morse")),
    };
    let first = if pd { 1 } else { 2 };
    if k < first {
        return Err(Error::invalid(format!("this trace map holds from k = {first}")));
    }
    let rule = model.rule().expect("substitution model");
    let potential = |seed: u8, level: usize| -> Result<Vec<R>> {
        let w = rule.iterate(seed, level)?;
        Ok(rule.word_to_operator(&w, model.lambda)?.b().to_vec())
    };
    let (lo_level, hi_level) = if pd { (k, k + 1) } else { (k - 1, k + 1) };
    let mut words = Vec::new();
    for level in lo_level..=hi_level {
        words.push((potential(0, level)?, potential(1, level)?));
    }
    let mut report = TraceMapReport {
        trace_residual: R::zero(),
        matrix_residual: R::zero(),
        evaluated: 0,
        skipped: Vec::new(),
    };
    let two = R::from_f64(2.0);
    for &e in energies {
        let mats: Result<Vec<(Monodromy<R>, Monodromy<R>)>> = words
            .iter()
            .map(|(wa, wb)| Ok((schrodinger_monodromy(wa, e)?, schrodinger_monodromy(wb, e)?)))
            .collect();
        let mats = match mats {
            Ok(m) => m,
            Err(err) => {
                report.skipped.push(format!("E = {e}: {err}"));
                continue;
            }
        };
        let (trace_res, matrix_res) = if pd {
            let (ma, mb) = mats[0];
            let (na, nb) = mats[1];
            let (x, y) = (ma.trace(), mb.trace());
            let x1 = x * y - two;
            let y1 = x * x - two;
            let (a, b) = (ma.max_abs(), mb.max_abs());
            let t = relative(na.trace() - x1, (x * y).abs().max(na.max_abs()).max(a * b))
                .max(relative(nb.trace() - y1, (x * x).abs().max(nb.max_abs()).max(a * a)));
            let m = matrix_gap(&na, &(mb * ma), a * b).max(matrix_gap(&nb, &(ma * ma), a * a));
            (t, m)
        } else {
            let x_prev = mats[0].0.trace();
            let x = mats[1].0.trace();
            let (na, nb) = mats[2];
            let pred = x_prev * x_prev * (x - two) + two;
            let (p, c) = (mats[0].0.max_abs(), mats[1].0.max_abs());
            let scale = (x_prev * x_prev * x).abs().max(na.max_abs()).max(p * p * c);
            let t = relative(na.trace() - pred, scale).max(relative(nb.trace() - na.trace(), scale));
            (t, R::zero())
        };
        if !trace_res.is_finite() || !matrix_res.is_finite() {
            report.skipped.push(format!("E = {e}: non-finite residual"));
            continue;
        }
        report.trace_residual = report.trace_residual.max(trace_res);
        report.matrix_residual = report.matrix_residual.max(matrix_res);
        report.evaluated += 1;
    }
    Ok(report)
}

/// Band midpoints and gap midpoints of a cover, kept within its hull widened by 1.
pub fn default_trace_samples<R: Real>(cover: &IntervalSet<R>) -> Vec<R> {
    let Some((lo, hi)) = cover.hull() else {
        return Vec::new();
    };
    let half = R::from_f64(0.5);
    let mut out: Vec<R> = cover.intervals().iter().map(|&(a, b)| (a + b) * half).collect();
    out.extend(cover.gaps(None).intervals().iter().map(|&(a, b)| (a + b) * half));
    out.retain(|&e| e >= lo - R::one() && e <= hi + R::one());
    out.sort_by(R::total_cmp);
    out
}
