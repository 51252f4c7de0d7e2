use rayon::prelude::*;

use super::band::SymTridiag;
use crate::error::{Error, Result};
use crate::realnum::Real;

const MAX_PROBES: usize = 600;
const PARALLEL_THRESHOLD: usize = 256;
const CHUNK: usize = 64;
/// Shifts evaluated together in one pass, so their recurrences overlap.
const LANES: usize = 4;
/// Probes allowed without halving the bracket before bisection is forced.
const STALL_LIMIT: usize = 6;
/// `2^-960`
const PIVOT_FLOOR: f64 = 1.0261342003245941e-289;

/// Prepared inertia counter for a fixed tridiagonal matrix.
pub struct SturmCounter<'a, R> {
    diag: &'a [R],
    off2: Vec<R>,
    pivmin: R,
}

/// Inertia count at a shift plus `G = d/dx ln|det(x - T)|` and `H = -dG/dx`.
#[derive(Debug, Clone, Copy)]
struct Probe {
    count: usize,
    g: f64,
    h: f64,
}

impl<'a, R: Real> SturmCounter<'a, R> {
    pub fn new(t: &'a SymTridiag<R>) -> Self {
        // Far above the f64 underflow threshold: double-double products split
        // their operands by 2^27, so 1/pivmin has to stay well below 1e300.
        let floor = R::from_f64(PIVOT_FLOOR);
        let off2: Vec<R> = t.off().iter().map(|&e| (e * e).max(floor)).collect();
        let largest = off2.iter().fold(R::one(), |acc, &v| acc.max(v));
        SturmCounter { diag: t.diag(), off2, pivmin: floor * largest }
    }

    #[inline(always)]
    fn guard(&self, q: R) -> R {
        if q.abs() <= self.pivmin {
            -self.pivmin
        } else {
            q
        }
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count(&self, x: R) -> usize {
        let mut q = self.guard(self.diag[0] - x);
        let mut negatives = usize::from(q < R::zero());
        for i in 1..self.diag.len() {
            q = self.guard((self.diag[i] - x) - self.off2[i - 1] / q);
            negatives += usize::from(q < R::zero());
        }
        negatives
    }

    /// Counts and log-derivatives at `LANES` shifts in a single sweep. The
    /// derivatives are accumulated in `f64` from the working-precision pivots.
    fn probe_lanes(&self, xs: [R; LANES]) -> [Probe; LANES] {
        let mut q = [R::zero(); LANES];
        let mut neg = [0usize; LANES];
        let mut r = [0.0f64; LANES];
        let mut s = [0.0f64; LANES];
        let mut g = [0.0f64; LANES];
        let mut h = [0.0f64; LANES];
        for k in 0..LANES {
            q[k] = self.guard(self.diag[0] - xs[k]);
            neg[k] = usize::from(q[k] < R::zero());
            r[k] = -1.0 / q[k].to_f64();
            g[k] = r[k];
            h[k] = r[k] * r[k];
        }
        for i in 1..self.diag.len() {
            let d = self.diag[i];
            let e2 = self.off2[i - 1];
            for k in 0..LANES {
                let t = e2 / q[k];
                q[k] = self.guard((d - xs[k]) - t);
                neg[k] += usize::from(q[k] < R::zero());
                let tf = t.to_f64();
                let qf = q[k].to_f64();
                let dq = -1.0 + tf * r[k];
                let ddq = tf * (s[k] - 2.0 * r[k] * r[k]);
                r[k] = dq / qf;
                s[k] = ddq / qf;
                g[k] += r[k];
                h[k] += r[k] * r[k] - s[k];
            }
        }
        std::array::from_fn(|k| Probe { count: neg[k], g: g[k], h: h[k] })
    }

    fn scale(&self) -> R {
        let d = self.diag.iter().fold(R::zero(), |acc, v| acc.max(v.abs()));
        let e = self.off2.iter().fold(R::zero(), |acc, &v| acc.max(v)).sqrt();
        d.max(e).max(R::from_f64(f64::MIN_POSITIVE))
    }
}

/// Laguerre correction from `x` towards the nearest root above (`up`) or
/// below, treating that root as `m`-fold. For a real-rooted polynomial it
/// does not pass that root in exact arithmetic.
fn laguerre_step(n: usize, m: usize, g: f64, h: f64, up: bool) -> Option<f64> {
    let nf = n as f64;
    let mf = m.clamp(1, n) as f64;
    let disc = ((nf / mf - 1.0) * (nf * h - g * g)).max(0.0).sqrt();
    // G = sum 1/(x - lambda): a root just above contributes a large negative term.
    let denom = if up { g - disc } else { g + disc };
    let step = -nf / denom;
    (step.is_finite() && step != 0.0 && (step > 0.0) == up).then_some(step)
}

/// Default bisection tolerance: `8 u` times the Gershgorin radius.
pub fn default_tolerance<R: Real>(t: &SymTridiag<R>) -> R {
    let (lo, hi) = t.gershgorin();
    lo.abs().max(hi.abs()).max(R::from_f64(f64::MIN_POSITIVE)).mul_f64(8.0 * R::UNIT_ROUNDOFF)
}

fn check_tolerance<R: Real>(tol: R) -> Result<()> {
    if tol > R::zero() && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("eigenvalue tolerance must be positive and finite"))
    }
}

/// All eigenvalues of `t`, ascending.
///
/// Each eigenvalue is isolated by its own inertia-count bracket
/// `count(lo) <= i < count(hi)`, which is only ever narrowed by count
/// evaluations, so nothing can be missed or duplicated. Inside the bracket the
/// probes follow Laguerre's iteration, started from a cheap `f64` QL estimate,
/// with bisection as the fallback.
pub fn tridiag_eigenvalues<R: Real>(t: &SymTridiag<R>, tol: R) -> Result<Vec<R>> {
    check_tolerance(tol)?;
    let n = t.dim();
    if n == 1 {
        return Ok(vec![t.diag()[0]]);
    }
    let tol = tol.max(t.norm().mul_f64(2.0 * R::UNIT_ROUNDOFF));
    let counter = SturmCounter::new(t);
    let outer = outer_bracket(t, &counter)?;
    let seeds = ql_seeds(t);
    let ctx = SearchContext {
        n,
        tol,
        half_tol: tol.mul_f64(0.5),
        tight: counter.scale().mul_f64(1e-6),
        seed_spread: tol.max(counter.scale().mul_f64(4.0 * f64::EPSILON)),
    };
    // Indices are handled in fixed chunks, so the result does not depend on
    // thread scheduling.
    let solve_chunk = |c: usize| {
        let range = c * CHUNK..((c + 1) * CHUNK).min(n);
        solve_range(&counter, &ctx, range, outer, seeds.as_deref())
    };
    let chunks = n.div_ceil(CHUNK);
    let mut eigs: Vec<R> = if n >= PARALLEL_THRESHOLD {
        (0..chunks).into_par_iter().flat_map_iter(solve_chunk).collect()
    } else {
        (0..chunks).flat_map(solve_chunk).collect()
    };
    eigs.sort_by(R::total_cmp);
    if eigs.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("tridiagonal eigenvalues"));
    }
    Ok(eigs)
}

/// Bisection only, without Laguerre acceleration or QL seeds.
pub fn tridiag_eigenvalues_bisection<R: Real>(t: &SymTridiag<R>, tol: R) -> Result<Vec<R>> {
    check_tolerance(tol)?;
    let n = t.dim();
    if n == 1 {
        return Ok(vec![t.diag()[0]]);
    }
    let tol = tol.max(t.norm().mul_f64(2.0 * R::UNIT_ROUNDOFF));
    let counter = SturmCounter::new(t);
    let (lo, hi) = outer_bracket(t, &counter)?;
    let mut eigs: Vec<R> = (0..n).map(|i| bisect(&counter, i, lo, hi, tol)).collect();
    eigs.sort_by(R::total_cmp);
    Ok(eigs)
}

fn outer_bracket<R: Real>(t: &SymTridiag<R>, counter: &SturmCounter<'_, R>) -> Result<(R, R)> {
    let n = t.dim();
    let (glo, ghi) = t.gershgorin();
    let mut pad = (glo.abs().max(ghi.abs())).mul_f64(4.0 * n as f64 * R::UNIT_ROUNDOFF)
        + counter.pivmin.mul_f64(4.0);
    for _ in 0..64 {
        let lo = glo - pad;
        let hi = ghi + pad;
        if counter.count(lo) == 0 && counter.count(hi) == n {
            return Ok((lo, hi));
        }
        pad = pad.mul_f64(4.0) + R::from_f64(f64::MIN_POSITIVE);
    }
    Err(Error::NoConvergence { method: "Gershgorin bracket", iterations: 64 })
}

fn bisect<R: Real>(counter: &SturmCounter<'_, R>, i: usize, mut lo: R, mut hi: R, tol: R) -> R {
    let half = R::from_f64(0.5);
    for _ in 0..MAX_PROBES {
        if hi - lo <= tol {
            break;
        }
        let mid = (lo + hi) * half;
        if !(mid > lo && mid < hi) {
            break;
        }
        if counter.count(mid) <= i {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * half
}

struct SearchContext<R> {
    n: usize,
    tol: R,
    half_tol: R,
    /// Below this width a bracket holding m eigenvalues is treated as an m-fold root.
    tight: R,
    /// Expected error of the `f64` starting estimates.
    seed_spread: R,
}

#[derive(Clone, Copy)]
struct Expansion<R> {
    origin: R,
    delta: R,
    up: bool,
}

/// Resumable search for one eigenvalue.
struct Search<R> {
    index: usize,
    lo: R,
    below: usize,
    hi: R,
    upto: usize,
    /// Next shift to probe.
    x: R,
    last_step: f64,
    expansion: Option<Expansion<R>>,
    mark: R,
    since_mark: usize,
    /// The pending probe is an accepted, fast-converging Laguerre iterate.
    converging: bool,
    seeded: bool,
    probes: usize,
    value: Option<R>,
}

impl<R: Real> Search<R> {
    fn new(index: usize, n: usize, outer: (R, R), seed: Option<f64>) -> Self {
        let (lo, hi) = outer;
        let mid = (lo + hi).mul_f64(0.5);
        let seed = seed.map(R::from_f64).filter(|&s| s > lo && s < hi);
        let x = seed.unwrap_or(mid);
        Search {
            index,
            lo,
            below: 0,
            hi,
            upto: n,
            x,
            last_step: f64::INFINITY,
            expansion: None,
            mark: hi - lo,
            since_mark: 0,
            converging: false,
            seeded: seed.is_some(),
            probes: 0,
            value: None,
        }
    }

    fn finish(&mut self) {
        self.value = Some((self.lo + self.hi).mul_f64(0.5));
    }

    fn bisect(&mut self) {
        self.converging = false;
        self.expansion = None;
        self.last_step = f64::INFINITY;
        let mid = (self.lo + self.hi).mul_f64(0.5);
        if mid > self.lo && mid < self.hi {
            self.x = mid;
        } else {
            self.finish();
        }
    }

    fn inside(&self, y: R) -> bool {
        y > self.lo && y < self.hi
    }

    fn feed(&mut self, p: Probe, ctx: &SearchContext<R>) {
        let i = self.index;
        let x = self.x;
        self.probes += 1;
        if p.count <= i {
            if x > self.lo {
                self.lo = x;
                self.below = p.count;
            }
        } else if x < self.hi {
            self.hi = x;
            self.upto = p.count;
        }
        let width = self.hi - self.lo;
        if width <= ctx.tol || self.probes >= MAX_PROBES {
            self.finish();
            return;
        }
        if width <= self.mark.mul_f64(0.5) || self.converging {
            self.mark = width;
            self.since_mark = 0;
        } else {
            self.since_mark += 1;
            if self.since_mark >= STALL_LIMIT {
                self.mark = width;
                self.since_mark = 0;
                self.bisect();
                return;
            }
        }

        self.converging = false;
        if let Some(mut ex) = self.expansion {
            let crossed = if ex.up { p.count > i } else { p.count <= i };
            if !crossed {
                ex.delta = ex.delta.mul_f64(4.0);
                let y = if ex.up { ex.origin + ex.delta } else { ex.origin - ex.delta };
                if self.inside(y) {
                    self.expansion = Some(ex);
                    self.x = y;
                } else {
                    self.bisect();
                }
                return;
            }
            self.expansion = None;
            self.last_step = f64::INFINITY;
        }

        let up = p.count <= i;
        if self.probes == 1 && self.seeded && p.count != i && p.count != i + 1 {
            // The estimate is off by at least one root: search outward from it.
            let ex = Expansion { origin: x, delta: ctx.seed_spread, up };
            let y = if up { x + ex.delta } else { x - ex.delta };
            if self.inside(y) {
                self.expansion = Some(ex);
                self.x = y;
                return;
            }
        }
        // Laguerre is aimed only at the neighbouring root, so it is used only
        // when that root is the wanted one.
        if p.count == i || p.count == i + 1 {
            // G^2/H estimates how many roots sit at about the nearest distance.
            let local = (p.g * p.g / p.h).round();
            let mut m = if local.is_finite() && local >= 2.0 { local as usize } else { 1 };
            if width <= ctx.tight {
                m = m.min(self.upto - self.below).max(1);
            }
            if let Some(step) = laguerre_step(ctx.n, m, p.g, p.h, up) {
                let size = step.abs();
                let target = x + R::from_f64(step);
                self.converging = size <= 0.5 * self.last_step;
                let cand = if size < ctx.half_tol.to_f64() {
                    // Step just past the root to close the bracket.
                    if up {
                        target + ctx.half_tol
                    } else {
                        target - ctx.half_tol
                    }
                } else if size <= 0.5 * self.last_step {
                    target
                } else {
                    // Converging slowly, typically next to a close neighbour:
                    // probe outward geometrically until the root is crossed.
                    let ex = Expansion { origin: x, delta: R::from_f64(2.0 * size), up };
                    self.expansion = Some(ex);
                    if up {
                        x + ex.delta
                    } else {
                        x - ex.delta
                    }
                };
                self.last_step = size;
                if self.inside(cand) {
                    self.x = cand;
                    return;
                }
            }
        }
        self.bisect();
    }
}

fn solve_range<R: Real>(
    counter: &SturmCounter<'_, R>,
    ctx: &SearchContext<R>,
    range: std::ops::Range<usize>,
    outer: (R, R),
    seeds: Option<&[f64]>,
) -> Vec<R> {
    let mut searches: Vec<Search<R>> = range
        .map(|i| Search::new(i, ctx.n, outer, seeds.map(|s| s[i])))
        .collect();
    let first = searches.first().map_or(0, |s| s.index);
    loop {
        let active: Vec<usize> = (0..searches.len()).filter(|&j| searches[j].value.is_none()).collect();
        if active.is_empty() {
            break;
        }
        for group in active.chunks(LANES) {
            let xs: [R; LANES] = std::array::from_fn(|k| searches[group[k.min(group.len() - 1)]].x);
            let probes = counter.probe_lanes(xs);
            for (k, &j) in group.iter().enumerate() {
                searches[j].feed(probes[k], ctx);
            }
        }
        // A finished bracket holding several eigenvalues settles all of them.
        for &j in &active {
            let Some(value) = searches[j].value else { continue };
            let (below, upto) = (searches[j].below, searches[j].upto);
            if upto - below < 2 || searches[j].hi - searches[j].lo > ctx.tol {
                continue;
            }
            for other in below.max(first)..upto.min(first + searches.len()) {
                let s = &mut searches[other - first];
                if s.value.is_none() {
                    s.value = Some(value);
                }
            }
        }
    }
    searches.into_iter().map(|s| s.value.expect("search finished")).collect()
}

/// Eigenvalue estimates from implicit QL on an `f64` copy; `None` if it stalls.
fn ql_seeds<R: Real>(t: &SymTridiag<R>) -> Option<Vec<f64>> {
    let mut d: Vec<f64> = t.diag().iter().map(|v| v.to_f64()).collect();
    let mut e: Vec<f64> = t.off().iter().map(|v| v.to_f64()).collect();
    e.push(0.0);
    ql_implicit(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Some(d)
}

#[inline]
fn pythag(a: f64, b: f64) -> f64 {
    let r = (a * a + b * b).sqrt();
    if r.is_finite() && r > 0.0 {
        r
    } else {
        a.hypot(b)
    }
}

/// Root-free implicit QL, eigenvalues only. `e[i]` couples `i` and `i + 1`.
fn ql_implicit(d: &mut [f64], e: &mut [f64]) -> Option<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return None;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = pythag(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = pythag(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.iter().all(|v| v.is_finite()).then_some(())
}
