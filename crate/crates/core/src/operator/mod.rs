//! Periodic Jacobi operators and their band spectra.
//!
//! The spectrum of a period-`K` operator is a union of `K` closed bands whose
//! endpoints are the eigenvalues of two `K x K` matrices: `J+` with periodic
//! and `J-` with antiperiodic corner entries. Relabelling the cycle
//! `1 - 2 - ... - K - 1` by alternating sides turns both matrices into
//! pentadiagonal ones, which the banded pipeline reduces in `O(K^2)`.

use serde::{Deserialize, Serialize};

use crate::bandeig::{
    default_tolerance, dense_eig, householder_tridiag, penta_to_tridiag_counted, tridiag_eigenvalues, DenseSym,
    SymPentadiag,
};
use crate::coverset::IntervalSet;
use crate::error::{Error, Result};
use crate::realnum::{parse_real, Real};


/// Period-`K` coefficients `a_1..a_K` (off-diagonal) and `b_1..b_K` (diagonal).
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicJacobi<R> {
    a: Vec<R>,
    b: Vec<R>,
}

impl<R: Real> PeriodicJacobi<R> {
    pub fn new(a: Vec<R>, b: Vec<R>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::invalid("period must be at least 1"));
        }
        if a.len() != b.len() {
            return Err(Error::invalid(format!("{} off-diagonal vs {} diagonal coefficients", a.len(), b.len())));
        }
        if !a.iter().chain(b.iter()).all(|v| v.is_finite()) {
            return Err(Error::NonFinite("operator coefficients"));
        }
        if let Some(n) = a.iter().position(|&v| v == R::zero()) {
            return Err(Error::invalid(format!("off-diagonal coefficient a_{} is zero", n + 1)));
        }
        Ok(PeriodicJacobi { a, b })
    }

    /// Discrete Schrodinger operator: `a = 1`, `b = potential`.
    pub fn schrodinger(potential: Vec<R>) -> Result<Self> {
        Self::new(vec![R::one(); potential.len()], potential)
    }

    /// `a = 1`, `b = 0`.
    pub fn free(period: usize) -> Result<Self> {
        Self::schrodinger(vec![R::zero(); period])
    }

    pub fn period(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[R] {
        &self.a
    }

    pub fn b(&self) -> &[R] {
        &self.b
    }

    /// Shifts the coefficient indices by `shift` (same operator, translated).
    pub fn rotated(&self, shift: usize) -> Self {
        let mut a = self.a.clone();
        let mut b = self.b.clone();
        let s = shift % self.period();
        a.rotate_left(s);
        b.rotate_left(s);
        PeriodicJacobi { a, b }
    }

    /// `2 + max|b| + 2 max|a|`, a bound on the operator norm.
    pub fn norm_bound(&self) -> R {
        let amax = self.a.iter().fold(R::zero(), |m, v| m.max(v.abs()));
        let bmax = self.b.iter().fold(R::zero(), |m, v| m.max(v.abs()));
        R::from_f64(2.0) + bmax + amax.mul_f64(2.0)
    }

    /// Product of all `a_n`; its sign orients the discriminant.
    fn a_product_positive(&self) -> bool {
        self.a.iter().filter(|v| **v < R::zero()).count() % 2 == 0
    }

    pub fn to_json(&self) -> OperatorJson {
        OperatorJson {
            period: self.period(),
            a: self.a.iter().map(|v| v.to_decimal()).collect(),
            b: self.b.iter().map(|v| v.to_decimal()).collect(),
        }
    }

    pub fn from_json(json: &OperatorJson) -> Result<Self> {
        if json.a.len() != json.period || json.b.len() != json.period {
            return Err(Error::invalid(format!(
                "K = {} but {} a-values and {} b-values",
                json.period,
                json.a.len(),
                json.b.len()
            )));
        }
        let a = json.a.iter().map(|s| parse_real(s)).collect::<Result<Vec<R>>>()?;
        let b = json.b.iter().map(|s| parse_real(s)).collect::<Result<Vec<R>>>()?;
        Self::new(a, b)
    }
}

/// File form of an operator: `{"K": 3, "a": ["1", ...], "b": ["0", ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    #[serde(rename = "K")]
    pub period: usize,
    pub a: Vec<String>,
    pub b: Vec<String>,
}

/// Corner sign of the boundary matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// `J+`
    Periodic,
    /// `J-`
    Antiperiodic,
}

impl Boundary {
    fn sign<R: Real>(self) -> R {
        match self {
            Boundary::Periodic => R::one(),
            Boundary::Antiperiodic => -R::one(),
        }
    }
}

/// `J+` or `J-` as a dense matrix in the original ordering.
///
/// For `K = 2` the corner and the superdiagonal coincide and add up, for
/// `K = 1` both neighbours wrap onto the single site.
pub fn assemble_dense<R: Real>(op: &PeriodicJacobi<R>, boundary: Boundary) -> DenseSym<R> {
    let k = op.period();
    let sign: R = boundary.sign();
    let (a, b) = (op.a(), op.b());
    if k == 1 {
        return DenseSym::from_fn(1, |_, _| b[0] + sign * a[0].mul_f64(2.0));
    }
    if k == 2 {
        return DenseSym::from_fn(2, |i, j| if i == j { b[i] } else { a[0] + sign * a[1] });
    }
    DenseSym::from_fn(k, |i, j| {
        if i == j {
            b[i]
        } else if i == j + 1 {
            a[j]
        } else if i == k - 1 && j == 0 {
            sign * a[k - 1]
        } else {
            R::zero()
        }
    })
}

/// New 1-based label of each original site 1..K that makes the cycle pentadiagonal.
///
/// Sites `1..=ceil(K/2)` take the odd labels in order, the rest take the even
/// labels walking back, so every cycle edge joins labels at most two apart.
pub fn cycle_reorder(k: usize) -> Result<Vec<usize>> {
    if k < 3 {
        return Err(Error::invalid(format!("cycle reordering needs K >= 3, got {k}")));
    }
    let half = k.div_ceil(2);
    Ok((1..=k).map(|j| if j <= half { 2 * j - 1 } else { 2 * (k - j + 1) }).collect())
}

/// `J+` or `J-` after [`cycle_reorder`], as a pentadiagonal matrix (`K >= 3`).
pub fn assemble_banded<R: Real>(op: &PeriodicJacobi<R>, boundary: Boundary) -> Result<SymPentadiag<R>> {
    let k = op.period();
    let labels = cycle_reorder(k)?;
    let pos: Vec<usize> = labels.iter().map(|l| l - 1).collect();
    let mut diag = vec![R::zero(); k];
    let mut off1 = vec![R::zero(); k - 1];
    let mut off2 = vec![R::zero(); k - 2];
    for j in 0..k {
        diag[pos[j]] = op.b()[j];
    }
    let sign: R = boundary.sign();
    for j in 0..k {
        let (next, weight) = if j + 1 < k { (j + 1, op.a()[j]) } else { (0, sign * op.a()[j]) };
        let (p, q) = (pos[j].min(pos[next]), pos[j].max(pos[next]));
        match q - p {
            1 => off1[p] = weight,
            2 => off2[p] = weight,
            d => unreachable!("cycle edge spans {d} labels"),
        }
    }
    SymPentadiag::new(diag, off1, off2)
}

/// How the boundary eigenproblems are solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pipeline {
    /// Cycle reordering, bulge-chasing reduction, tridiagonal solver: `O(K^2)`.
    #[default]
    Banded,
    /// Householder tridiagonalization of the unreordered matrix: `O(K^3)`.
    Dense,
}

/// Eigenvalues of `J+` or `J-`, ascending, with the number of band-reduction rotations.
pub fn boundary_eigenvalues<R: Real>(
    op: &PeriodicJacobi<R>,
    boundary: Boundary,
    pipeline: Pipeline,
) -> Result<(Vec<R>, u64)> {
    if op.period() < 3 {
        return Ok((dense_eig(&assemble_dense(op, boundary))?, 0));
    }
    let (tri, rotations) = match pipeline {
        Pipeline::Banded => {
            let red = penta_to_tridiag_counted(&assemble_banded(op, boundary)?)?;
            (red.tridiag, red.rotations)
        }
        Pipeline::Dense => (householder_tridiag(&assemble_dense(op, boundary))?, 0),
    };
    let tol = default_tolerance(&tri);
    Ok((tridiag_eigenvalues(&tri, tol)?, rotations))
}

/// Which boundary matrix a band endpoint came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Source {
    Plus,
    Minus,
}

/// One band `[lo, hi]` of the spectrum with the provenance of its endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band<R> {
    pub lo: R,
    pub hi: R,
    pub lo_source: Source,
    pub hi_source: Source,
    pub repaired: bool,
}

impl<R: Real> Band<R> {
    pub fn width(&self) -> R {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumResult<R> {
    pub eigs_plus: Vec<R>,
    pub eigs_minus: Vec<R>,
    /// Exactly `K` bands, ascending, before merging.
    pub bands: Vec<Band<R>>,
    /// Union of the bands.
    pub merged: IntervalSet<R>,
    /// Number of bands replaced by the degenerate-width floor.
    pub repaired: usize,
    pub diagnostics: Vec<String>,
    /// Rotations spent in the band reduction of both matrices.
    pub rotations: u64,
}

impl<R: Real> SpectrumResult<R> {
    pub fn band_intervals(&self) -> Vec<(R, R)> {
        self.bands.iter().map(|b| (b.lo, b.hi)).collect()
    }
}

/// Width given to a band whose computed endpoints come out inverted.
pub fn degenerate_width<R: Real>() -> R {
    R::from_f64(20.0 * R::UNIT_ROUNDOFF)
}

/// Spectrum of `op` as a union of `K` bands.
pub fn spectrum<R: Real>(op: &PeriodicJacobi<R>) -> Result<SpectrumResult<R>> {
    spectrum_with(op, Pipeline::Banded)
}

pub fn spectrum_with<R: Real>(op: &PeriodicJacobi<R>, pipeline: Pipeline) -> Result<SpectrumResult<R>> {
    let (plus, minus) = rayon::join(
        || boundary_eigenvalues(op, Boundary::Periodic, pipeline),
        || boundary_eigenvalues(op, Boundary::Antiperiodic, pipeline),
    );
    let (eigs_plus, rot_plus) = plus?;
    let (eigs_minus, rot_minus) = minus?;
    let (bands, repaired, diagnostics) = pair_bands(&eigs_plus, &eigs_minus, op.a_product_positive());
    let merged = IntervalSet::from_intervals(bands.iter().map(|b| (b.lo, b.hi)).collect())?;
    Ok(SpectrumResult {
        eigs_plus,
        eigs_minus,
        bands,
        merged,
        repaired,
        diagnostics,
        rotations: rot_plus + rot_minus,
    })
}

/// Pairs the `j`-th eigenvalues of `J+` and `J-` into the `j`-th band.
///
/// Counting from the top, band `K` ends where the discriminant equals `+2`
/// when the product of the `a_n` is positive, and the roles alternate going
/// down. A band whose expected upper endpoint lies below its lower one is
/// replaced by a tiny interval around the midpoint.
fn pair_bands<R: Real>(plus: &[R], minus: &[R], a_positive: bool) -> (Vec<Band<R>>, usize, Vec<String>) {
    let k = plus.len();
    let mut bands = Vec::with_capacity(k);
    let mut repaired = 0;
    let mut diagnostics = Vec::new();
    for j in 0..k {
        let plus_on_top = ((k - 1 - j) % 2 == 0) == a_positive;
        let (lo, hi, lo_source, hi_source) = if plus_on_top {
            (minus[j], plus[j], Source::Minus, Source::Plus)
        } else {
            (plus[j], minus[j], Source::Plus, Source::Minus)
        };
        // Bands of a periodic operator have positive width, so a collapsed band is as wrong as an inverted one.
        if hi <= lo {
            let mid = (lo + hi).mul_f64(0.5);
            let half = degenerate_width::<R>().mul_f64(0.5);
            diagnostics.push(format!("band {} inverted by {:e}; repaired", j + 1, (lo - hi).to_f64()));
            bands.push(Band { lo: mid - half, hi: mid + half, lo_source, hi_source, repaired: true });
            repaired += 1;
        } else {
            bands.push(Band { lo, hi, lo_source, hi_source, repaired: false });
        }
    }
    (bands, repaired, diagnostics)
}
