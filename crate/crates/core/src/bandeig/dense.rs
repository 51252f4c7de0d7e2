use super::band::{DenseSym, SymTridiag};
use crate::error::{Error, Result};
use crate::realnum::Real;

const MAX_SWEEPS: usize = 50;

/// All eigenvalues of a dense symmetric matrix by cyclic Jacobi, ascending.
pub fn dense_eig<R: Real>(a: &DenseSym<R>) -> Result<Vec<R>> {
    let n = a.dim();
    let mut m = a.data().to_vec();
    let target = a.frobenius().mul_f64(n as f64 * R::UNIT_ROUNDOFF);
    let mut converged = false;
    for _ in 0..=MAX_SWEEPS {
        let mut off = R::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += m[i * n + j] * m[i * n + j];
                }
            }
        }
        if off.sqrt() <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                jacobi_rotate(&mut m, n, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { method: "cyclic Jacobi", iterations: MAX_SWEEPS });
    }
    let mut eigs: Vec<R> = (0..n).map(|i| m[i * n + i]).collect();
    if eigs.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("dense eigenvalues"));
    }
    eigs.sort_by(R::total_cmp);
    Ok(eigs)
}

fn jacobi_rotate<R: Real>(m: &mut [R], n: usize, p: usize, q: usize) {
    let apq = m[p * n + q];
    if apq == R::zero() {
        return;
    }
    let app = m[p * n + p];
    let aqq = m[q * n + q];
    let theta = (aqq - app) / apq.mul_f64(2.0);
    let t = {
        let mag = if theta.abs() > R::from_f64(1e100) {
            R::one() / theta.abs().mul_f64(2.0)
        } else {
            R::one() / (theta.abs() + (theta * theta + R::one()).sqrt())
        };
        if theta < R::zero() {
            -mag
        } else {
            mag
        }
    };
    let c = R::one() / (t * t + R::one()).sqrt();
    let s = t * c;
    let tau = s / (R::one() + c);
    m[p * n + p] = app - t * apq;
    m[q * n + q] = aqq + t * apq;
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let g = m[k * n + p];
        let h = m[k * n + q];
        let kp = g - s * (h + g * tau);
        let kq = h + s * (g - h * tau);
        m[k * n + p] = kp;
        m[p * n + k] = kp;
        m[k * n + q] = kq;
        m[q * n + k] = kq;
    }
    m[p * n + q] = R::zero();
    m[q * n + p] = R::zero();
}

/// Householder reduction of a dense symmetric matrix to tridiagonal form, O(n³).
///
/// Only the lower triangle is referenced and updated. The rank-2 update of
/// each step is deferred and applied during the next step's matrix-vector
/// product, so the trailing block is streamed once per column.
pub fn householder_tridiag<R: Real>(a: &DenseSym<R>) -> Result<SymTridiag<R>> {
    let n = a.dim();
    let mut m = a.data().to_vec();
    let mut v = vec![R::zero(); n];
    let mut w = vec![R::zero(); n];
    let mut pending: Option<(usize, Vec<R>, Vec<R>)> = None;
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n.saturating_sub(1) {
        let start = k + 1;
        if let Some((_, pv, pw)) = &pending {
            for i in k..n {
                m[i * n + k] -= pv[i] * pw[k] + pw[i] * pv[k];
            }
        }
        let mut scale = R::zero();
        for i in start..n {
            scale = scale.max(m[i * n + k].abs());
        }
        if scale == R::zero() || start == n - 1 {
            off.push(m[start * n + k]);
            if let Some((from, pv, pw)) = pending.take() {
                rank2_update(&mut m, n, from.max(start), &pv, &pw);
            }
            continue;
        }
        let mut norm2 = R::zero();
        for i in start..n {
            v[i] = m[i * n + k] / scale;
            norm2 += v[i] * v[i];
        }
        let norm = norm2.sqrt();
        let alpha = if v[start] > R::zero() { -norm } else { norm };
        // v = x - alpha e1, H = I - 2 v v^T / (v^T v)
        let vtv = (norm2 - alpha * v[start]).mul_f64(2.0);
        v[start] -= alpha;
        let beta = R::from_f64(2.0) / vtv;
        for i in start..n {
            w[i] = R::zero();
        }
        let empty: (Vec<R>, Vec<R>) = (Vec::new(), Vec::new());
        let (pv, pw) = pending.as_ref().map_or((&empty.0, &empty.1), |(_, pv, pw)| (pv, pw));
        for i in start..n {
            let vi = v[i];
            let row = &mut m[i * n + start..i * n + i + 1];
            let acc = if pending.is_some() {
                update_dot_scatter(row, &pv[start..=i], &pw[start..=i], pv[i], pw[i], &v[start..i], &mut w[start..i], vi)
            } else {
                dot_scatter(&row[..i - start], &v[start..i], &mut w[start..i], vi)
            };
            w[i] += acc + row[i - start] * vi;
        }
        let mut vtw = R::zero();
        for i in start..n {
            w[i] *= beta;
            vtw += v[i] * w[i];
        }
        let half_beta_vtw = beta * vtw * R::from_f64(0.5);
        for i in start..n {
            w[i] -= half_beta_vtw * v[i];
        }
        pending = Some((start, v.clone(), w.clone()));
        off.push(alpha * scale);
    }
    if let Some((from, pv, pw)) = pending.take() {
        rank2_update(&mut m, n, from, &pv, &pw);
    }
    let diag = (0..n).map(|i| m[i * n + i]).collect();
    SymTridiag::new(diag, off)
}

fn rank2_update<R: Real>(m: &mut [R], n: usize, from: usize, v: &[R], w: &[R]) {
    for i in from..n {
        let (vi, wi) = (v[i], w[i]);
        let row = &mut m[i * n..i * n + i + 1];
        for j in from..=i {
            row[j] -= vi * w[j] + wi * v[j];
        }
    }
}

/// Applies the deferred update `row -= pv_i pw + pw_i pv` to a full lower row
/// (the last entry is the diagonal), then returns the dot product of the
/// off-diagonal part with `x` and adds `alpha * row` into `y`.
#[inline]
#[allow(clippy::too_many_arguments)]
fn update_dot_scatter<R: Real>(row: &mut [R], pv: &[R], pw: &[R], pvi: R, pwi: R, x: &[R], y: &mut [R], alpha: R) -> R {
    const LANES: usize = 8;
    let len = x.len();
    let mut acc = [R::zero(); LANES];
    let split = len - len % LANES;
    for ((((r, a), b), xs), ys) in row[..split]
        .chunks_exact_mut(LANES)
        .zip(pw[..split].chunks_exact(LANES))
        .zip(pv[..split].chunks_exact(LANES))
        .zip(x[..split].chunks_exact(LANES))
        .zip(y[..split].chunks_exact_mut(LANES))
    {
        for l in 0..LANES {
            let t = r[l] - (pvi * a[l] + pwi * b[l]);
            r[l] = t;
            acc[l] += t * xs[l];
            ys[l] += t * alpha;
        }
    }
    let mut tail = R::zero();
    for j in split..len {
        let r = row[j] - (pvi * pw[j] + pwi * pv[j]);
        row[j] = r;
        tail += r * x[j];
        y[j] += r * alpha;
    }
    row[len] -= pvi * pw[len] + pwi * pv[len];
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

/// Returns `row . x` and adds `alpha * row` into `y`.
///
/// The dot product runs on independent partial sums so the loop is not
/// serialized on one accumulator.
#[inline]
fn dot_scatter<R: Real>(row: &[R], x: &[R], y: &mut [R], alpha: R) -> R {
    const LANES: usize = 8;
    let mut acc = [R::zero(); LANES];
    let split = row.len() - row.len() % LANES;
    for ((r, xs), ys) in row[..split]
        .chunks_exact(LANES)
        .zip(x[..split].chunks_exact(LANES))
        .zip(y[..split].chunks_exact_mut(LANES))
    {
        for l in 0..LANES {
            acc[l] += r[l] * xs[l];
            ys[l] += r[l] * alpha;
        }
    }
    let mut tail = R::zero();
    for j in split..row.len() {
        tail += row[j] * x[j];
        y[j] += row[j] * alpha;
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}
