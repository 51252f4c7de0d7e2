use crate::error::{Error, Result};
use crate::realnum::{givens, Real};

fn check_finite<R: Real>(values: &[R], what: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag<R> {
    diag: Vec<R>,
    off: Vec<R>,
}

impl<R: Real> SymTridiag<R> {
    pub fn new(diag: Vec<R>, off: Vec<R>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::invalid("tridiagonal matrix must have dimension >= 1"));
        }
        if off.len() + 1 != diag.len() {
            return Err(Error::invalid(format!(
                "tridiagonal of dimension {} needs {} off-diagonal entries, got {}",
                diag.len(),
                diag.len() - 1,
                off.len()
            )));
        }
        check_finite(&diag, "tridiagonal diagonal")?;
        check_finite(&off, "tridiagonal off-diagonal")?;
        Ok(SymTridiag { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[R] {
        &self.diag
    }

    pub fn off(&self) -> &[R] {
        &self.off
    }

    /// Gershgorin enclosure `[lo, hi]` of the spectrum.
    pub fn gershgorin(&self) -> (R, R) {
        let n = self.dim();
        let mut lo = self.diag[0];
        let mut hi = self.diag[0];
        for i in 0..n {
            let mut radius = R::zero();
            if i > 0 {
                radius += self.off[i - 1].abs();
            }
            if i + 1 < n {
                radius += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - radius);
            hi = hi.max(self.diag[i] + radius);
        }
        (lo, hi)
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm(&self) -> R {
        let n = self.dim();
        let mut best = R::zero();
        for i in 0..n {
            let mut row = self.diag[i].abs();
            if i > 0 {
                row += self.off[i - 1].abs();
            }
            if i + 1 < n {
                row += self.off[i].abs();
            }
            best = best.max(row);
        }
        best
    }

    pub fn to_dense(&self) -> DenseSym<R> {
        let n = self.dim();
        DenseSym::from_fn(n, |i, j| {
            if i == j {
                self.diag[i]
            } else if i == j + 1 {
                self.off[j]
            } else {
                R::zero()
            }
        })
    }
}

/// Real symmetric matrix of bandwidth at most two.
#[derive(Debug, Clone, PartialEq)]
pub struct SymPentadiag<R> {
    diag: Vec<R>,
    off1: Vec<R>,
    off2: Vec<R>,
}

impl<R: Real> SymPentadiag<R> {
    /// `off1[i] = A[i+1][i]`, `off2[i] = A[i+2][i]`.
    pub fn new(diag: Vec<R>, off1: Vec<R>, off2: Vec<R>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::invalid("pentadiagonal matrix must have dimension >= 1"));
        }
        if off1.len() != n - 1 || off2.len() != n.saturating_sub(2) {
            return Err(Error::invalid(format!(
                "pentadiagonal of dimension {n} needs band lengths ({}, {}), got ({}, {})",
                n - 1,
                n.saturating_sub(2),
                off1.len(),
                off2.len()
            )));
        }
        check_finite(&diag, "pentadiagonal diagonal")?;
        check_finite(&off1, "pentadiagonal first off-diagonal")?;
        check_finite(&off2, "pentadiagonal second off-diagonal")?;
        Ok(SymPentadiag { diag, off1, off2 })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[R] {
        &self.diag
    }

    pub fn off1(&self) -> &[R] {
        &self.off1
    }

    pub fn off2(&self) -> &[R] {
        &self.off2
    }

    pub fn norm(&self) -> R {
        self.to_dense().norm()
    }

    pub fn to_dense(&self) -> DenseSym<R> {
        DenseSym::from_fn(self.dim(), |i, j| match i - j {
            0 => self.diag[i],
            1 => self.off1[j],
            2 => self.off2[j],
            _ => R::zero(),
        })
    }
}

/// Dense symmetric matrix, row-major, symmetric by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSym<R> {
    n: usize,
    data: Vec<R>,
}

impl<R: Real> DenseSym<R> {
    /// Builds the matrix from its lower triangle: `f(i, j)` is called for `i >= j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut data = vec![R::zero(); n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        DenseSym { n, data }
    }

    /// Row-major entries; rejects asymmetric input.
    pub fn from_rows(n: usize, data: Vec<R>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(Error::invalid(format!("dense matrix needs {}x{} entries", n, n)));
        }
        check_finite(&data, "dense matrix")?;
        for i in 0..n {
            for j in 0..i {
                if data[i * n + j] != data[j * n + i] {
                    return Err(Error::invalid(format!("matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(DenseSym { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> R {
        self.data[i * self.n + j]
    }

    pub(crate) fn data(&self) -> &[R] {
        &self.data
    }

    pub fn norm(&self) -> R {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().fold(R::zero(), |acc, v| acc + v.abs()))
            .fold(R::zero(), R::max)
    }

    pub fn frobenius(&self) -> R {
        self.data.iter().fold(R::zero(), |acc, &v| acc + v * v).sqrt()
    }
}

/// Working storage for the bulge chase: lower band with room for one extra diagonal.
struct BulgeBand<R> {
    n: usize,
    // bands[d][j] = A[j + d][j], d = 0..=3
    bands: [Vec<R>; 4],
}

impl<R: Real> BulgeBand<R> {
    #[inline]
    fn get(&self, i: usize, j: usize) -> R {
        debug_assert!(i >= j);
        let d = i - j;
        if d > 3 {
            R::zero()
        } else {
            self.bands[d][j]
        }
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: R) {
        let d = i - j;
        if d > 3 {
            debug_assert!(v == R::zero(), "fill-in outside the working band at ({i}, {j})");
            return;
        }
        self.bands[d][j] = v;
    }

    /// Similarity by the plane rotation acting on rows/columns `p` and `p + 1`.
    fn rotate(&mut self, p: usize, c: R, s: R) {
        let q = p + 1;
        for j in p.saturating_sub(3)..p {
            let x = self.get(p, j);
            let y = self.get(q, j);
            self.set(p, j, c * x + s * y);
            self.set(q, j, c * y - s * x);
        }
        let a = self.get(p, p);
        let b = self.get(q, p);
        let d = self.get(q, q);
        let cc = c * c;
        let ss = s * s;
        let cs = c * s;
        let two_csb = (cs * b).mul_f64(2.0);
        self.set(p, p, cc * a + two_csb + ss * d);
        self.set(q, q, ss * a - two_csb + cc * d);
        self.set(q, p, cs * (d - a) + (cc - ss) * b);
        for i in q + 1..(q + 4).min(self.n) {
            let x = self.get(i, p);
            let y = self.get(i, q);
            self.set(i, p, c * x + s * y);
            self.set(i, q, c * y - s * x);
        }
    }

    /// Zeroes `A[row][col]` against `A[row - 1][col]`; returns whether a rotation was applied.
    fn annihilate(&mut self, row: usize, col: usize) -> bool {
        let y = self.get(row, col);
        if y == R::zero() {
            return false;
        }
        let x = self.get(row - 1, col);
        let (c, s, r) = givens(x, y);
        self.rotate(row - 1, c, s);
        self.set(row - 1, col, r);
        self.set(row, col, R::zero());
        true
    }
}

/// Outcome of the banded reduction.
#[derive(Debug, Clone)]
pub struct Reduction<R> {
    pub tridiag: SymTridiag<R>,
    pub rotations: u64,
}

/// Orthogonal reduction of a pentadiagonal matrix to tridiagonal form.
///
/// Columns are cleared left to right. Removing `A[j+2][j]` creates a bulge on
/// the third subdiagonal, which is chased off the bottom-right corner two rows
/// at a time before the next column is touched. Rotations are not stored.
pub fn penta_to_tridiag<R: Real>(p: &SymPentadiag<R>) -> Result<SymTridiag<R>> {
    Ok(penta_to_tridiag_counted(p)?.tridiag)
}

/// [`penta_to_tridiag`] that also reports how many rotations were applied.
pub fn penta_to_tridiag_counted<R: Real>(p: &SymPentadiag<R>) -> Result<Reduction<R>> {
    let n = p.dim();
    let mut band = BulgeBand {
        n,
        bands: [
            p.diag.clone(),
            pad(&p.off1, n),
            pad(&p.off2, n),
            vec![R::zero(); n],
        ],
    };
    let mut rotations = 0u64;
    for j in 0..n.saturating_sub(2) {
        if !band.annihilate(j + 2, j) {
            continue;
        }
        rotations += 1;
        let (mut row, mut col) = (j + 4, j + 1);
        while row < n {
            if !band.annihilate(row, col) {
                break;
            }
            rotations += 1;
            col = row - 1;
            row += 2;
        }
    }
    let [diag, mut off, _, _] = band.bands;
    off.truncate(n - 1);
    if !diag.iter().chain(off.iter()).all(|v| v.is_finite()) {
        return Err(Error::NonFinite("banded reduction"));
    }
    Ok(Reduction { tridiag: SymTridiag { diag, off }, rotations })
}

fn pad<R: Real>(v: &[R], n: usize) -> Vec<R> {
    let mut out = v.to_vec();
    out.resize(n, R::zero());
    out
}
