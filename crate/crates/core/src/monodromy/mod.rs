//! Transfer matrices over one period and the discriminant test `|tr M| <= 2`.

use std::ops::Mul;

use crate::error::{Error, Result};
use crate::operator::PeriodicJacobi;
use crate::realnum::Real;

/// 2x2 real matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monodromy<R> {
    pub m11: R,
    pub m12: R,
    pub m21: R,
    pub m22: R,
}

impl<R: Real> Monodromy<R> {
    pub fn identity() -> Self {
        Monodromy { m11: R::one(), m12: R::zero(), m21: R::zero(), m22: R::one() }
    }

    pub fn trace(&self) -> R {
        self.m11 + self.m22
    }

    pub fn det(&self) -> R {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> R {
        self.m11.abs().max(self.m12.abs()).max(self.m21.abs()).max(self.m22.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.m11.is_finite() && self.m12.is_finite() && self.m21.is_finite() && self.m22.is_finite()
    }

    /// Left-multiplies by the transfer step `[[c, d], [1, 0]]`.
    #[inline]
    fn push(&mut self, c: R, d: R) {
        let (r11, r12) = (c * self.m11 + d * self.m21, c * self.m12 + d * self.m22);
        self.m21 = self.m11;
        self.m22 = self.m12;
        self.m11 = r11;
        self.m12 = r12;
    }
}

impl<R: Real> Mul for Monodromy<R> {
    type Output = Self;

    fn mul(self, o: Self) -> Self {
        Monodromy {
            m11: self.m11 * o.m11 + self.m12 * o.m21,
            m12: self.m11 * o.m12 + self.m12 * o.m22,
            m21: self.m21 * o.m11 + self.m22 * o.m21,
            m22: self.m21 * o.m12 + self.m22 * o.m22,
        }
    }
}

fn check_overflow<R: Real>(m: Monodromy<R>, energy: R) -> Result<Monodromy<R>> {
    if m.is_finite() {
        Ok(m)
    } else {
        Err(Error::Overflow { context: format!("transfer-matrix product at E = {}", energy.to_decimal()) })
    }
}

/// `M(E) = T_K ... T_2 T_1` with `T_n = [[(E - b_n)/a_n, -a_{n-1}/a_n], [1, 0]]` and `a_0 = a_K`.
pub fn monodromy_at<R: Real>(op: &PeriodicJacobi<R>, energy: R) -> Result<Monodromy<R>> {
    let (a, b) = (op.a(), op.b());
    let k = op.period();
    let mut m = Monodromy::identity();
    for n in 0..k {
        let prev = if n == 0 { a[k - 1] } else { a[n - 1] };
        m.push((energy - b[n]) / a[n], -prev / a[n]);
    }
    check_overflow(m, energy)
}

/// Monodromy of the Schrodinger operator (`a = 1`) with the given potential over one period.
pub fn schrodinger_monodromy<R: Real>(potential: &[R], energy: R) -> Result<Monodromy<R>> {
    let mut m = Monodromy::identity();
    for &v in potential {
        m.push(energy - v, -R::one());
    }
    check_overflow(m, energy)
}

/// Position of an energy relative to the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Outside,
    Boundary,
}

/// Classifies `energy` by `|tr M(E)|` against `2 -+ slack`.
pub fn trace_test<R: Real>(op: &PeriodicJacobi<R>, energy: R, slack: R) -> Result<Membership> {
    Ok(classify_trace(monodromy_at(op, energy)?.trace(), slack))
}

pub fn classify_trace<R: Real>(trace: R, slack: R) -> Membership {
    let two = R::from_f64(2.0);
    let t = trace.abs();
    if t < two - slack {
        Membership::Inside
    } else if t > two + slack {
        Membership::Outside
    } else {
        Membership::Boundary
    }
}

/// `1e3 K u (2 + max|b| + 2 max|a|)`.
pub fn default_slack<R: Real>(op: &PeriodicJacobi<R>) -> R {
    op.norm_bound().mul_f64(1e3 * op.period() as f64 * R::UNIT_ROUNDOFF)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realnum::DoubleDouble;

    #[test]
    fn single_site() {
        let op = PeriodicJacobi::<f64>::free(1).unwrap();
        let m = monodromy_at(&op, 0.7).unwrap();
        assert_eq!(m, Monodromy { m11: 0.7, m12: -1.0, m21: 1.0, m22: 0.0 });
        assert_eq!(m.trace(), 0.7);
    }

    #[test]
    fn two_site_band_edge() {
        let op = PeriodicJacobi::<f64>::free(2).unwrap();
        let m = monodromy_at(&op, 0.0).unwrap();
        assert_eq!(m, Monodromy { m11: -1.0, m12: 0.0, m21: 0.0, m22: -1.0 });
    }

    #[test]
    fn unit_determinant() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let k = rng.gen_range(1..=20);
            let a: Vec<f64> = (0..k).map(|_| rng.gen_range(0.5..2.0) * if rng.gen_bool(0.2) { -1.0 } else { 1.0 }).collect();
            let b: Vec<f64> = (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let op = PeriodicJacobi::new(a, b).unwrap();
            let e = rng.gen_range(-3.0..3.0);
            let m = monodromy_at(&op, e).unwrap();
            let bound = 64.0 * k as f64 * f64::EPSILON * m.max_abs().powi(2).max(1.0);
            assert!((m.det() - 1.0).abs() <= bound, "det {} for K={k}", m.det());
        }
    }

    #[test]
    fn free_classification() {
        let op = PeriodicJacobi::<f64>::free(4).unwrap();
        let slack = default_slack(&op);
        assert_eq!(trace_test(&op, 0.5, slack).unwrap(), Membership::Inside);
        assert_eq!(trace_test(&op, 3.0, slack).unwrap(), Membership::Outside);
        assert_eq!(trace_test(&op, 2.0, slack).unwrap(), Membership::Boundary);
        // at K = 4 the two middle bands touch at 0, where tr M = 2
        assert_eq!(trace_test(&op, 0.0, slack).unwrap(), Membership::Boundary);
        assert_eq!(trace_test(&PeriodicJacobi::<f64>::free(3).unwrap(), 0.0, slack).unwrap(), Membership::Inside);
    }

    #[test]
    fn overflow_is_reported() {
        let op = PeriodicJacobi::<f64>::free(400).unwrap();
        let err = monodromy_at(&op, 1e6).unwrap_err();
        assert!(matches!(err, Error::Overflow { .. }));
        assert!(err.to_string().contains("extended"));
    }

    #[test]
    fn schrodinger_shortcut_matches_general_form() {
        let pot = [1.0, 0.0, 1.0, 1.0, 0.0];
        let op = PeriodicJacobi::schrodinger(pot.to_vec()).unwrap();
        for e in [-2.5, -0.3, 0.9, 2.2] {
            assert_eq!(monodromy_at(&op, e).unwrap(), schrodinger_monodromy(&pot, e).unwrap());
        }
    }

    #[test]
    fn discriminant_is_a_polynomial_of_degree_k() {
        // Newton divided differences through K+1 nodes predict the next sample.
        for k in [3usize, 8, 16] {
            let pot: Vec<DoubleDouble> = (0..k).map(|n| DoubleDouble::from_f64(((n * 7) % 5) as f64 * 0.3)).collect();
            let op = PeriodicJacobi::schrodinger(pot).unwrap();
            let nodes: Vec<DoubleDouble> =
                (0..=k + 1).map(|i| DoubleDouble::from_f64(-2.2 + 4.4 * i as f64 / (k + 1) as f64)).collect();
            let vals: Vec<DoubleDouble> = nodes.iter().map(|&e| monodromy_at(&op, e).unwrap().trace()).collect();
            let mut coef = vals[..=k].to_vec();
            for level in 1..=k {
                for i in (level..=k).rev() {
                    coef[i] = (coef[i] - coef[i - 1]) / (nodes[i] - nodes[i - level]);
                }
            }
            let x = nodes[k + 1];
            let mut p = coef[k];
            for i in (0..k).rev() {
                p = p * (x - nodes[i]) + coef[i];
            }
            let rel = ((p - vals[k + 1]) / vals[k + 1].abs().max(DoubleDouble::one())).abs().to_f64();
            assert!(rel < 1e-8, "K={k}: rel {rel:e}");
        }
    }
}
