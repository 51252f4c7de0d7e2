use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::realnum::{parse_real, Real};

/// Cap on the number of pairwise sums formed by [`IntervalSet::minkowski_sum`].
pub const MINKOWSKI_CAP: u128 = 10_000_000;

/// Finite union of closed intervals, kept sorted, disjoint and normalized.
///
/// Intervals that overlap or share an endpoint are merged.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet<R> {
    intervals: Vec<(R, R)>,
}

impl<R: Real> Default for IntervalSet<R> {
    fn default() -> Self {
        Self::empty()
    }
}

impl<R: Real> IntervalSet<R> {
    pub fn empty() -> Self {
        IntervalSet { intervals: Vec::new() }
    }

    pub fn single(lo: R, hi: R) -> Result<Self> {
        Self::from_intervals(vec![(lo, hi)])
    }

    /// Normalizes an arbitrary list of closed intervals.
    pub fn from_intervals(mut raw: Vec<(R, R)>) -> Result<Self> {
        for &(lo, hi) in &raw {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::NonFinite("interval endpoint"));
            }
            if hi < lo {
                return Err(Error::invalid(format!("interval [{lo}, {hi}] has hi < lo")));
            }
        }
        raw.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        let mut out: Vec<(R, R)> = Vec::with_capacity(raw.len());
        for (lo, hi) in raw {
            match out.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => out.push((lo, hi)),
            }
        }
        Ok(IntervalSet { intervals: out })
    }

    pub fn intervals(&self) -> &[(R, R)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Total length.
    pub fn measure(&self) -> R {
        self.intervals.iter().fold(R::zero(), |acc, &(lo, hi)| acc + (hi - lo))
    }

    /// Smallest interval containing the set.
    pub fn hull(&self) -> Option<(R, R)> {
        Some((self.intervals.first()?.0, self.intervals.last()?.1))
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut all = self.intervals.clone();
        all.extend_from_slice(&other.intervals);
        Self::from_intervals(all).expect("union of valid sets")
    }

    /// Whether `x` lies in the set.
    pub fn contains_point(&self, x: R) -> bool {
        let idx = self.intervals.partition_point(|iv| iv.1 < x);
        idx < self.intervals.len() && self.intervals[idx].0 <= x
    }

    /// Whether every point of `inner` lies within distance `tol` of `self`.
    pub fn contains(&self, inner: &Self, tol: R) -> bool {
        let fat = self.fattened(tol);
        let mut i = 0;
        for &(lo, hi) in &inner.intervals {
            while i < fat.len() && fat[i].1 < lo {
                i += 1;
            }
            if i == fat.len() || fat[i].0 > lo || fat[i].1 < hi {
                return false;
            }
        }
        true
    }

    fn fattened(&self, tol: R) -> Vec<(R, R)> {
        IntervalSet::from_intervals(self.intervals.iter().map(|&(lo, hi)| (lo - tol, hi + tol)).collect())
            .expect("fattening keeps intervals valid")
            .intervals
    }

    /// Bounded complementary intervals inside `hull` (the convex hull by default).
    pub fn gaps(&self, hull: Option<(R, R)>) -> Self {
        let Some((hlo, hhi)) = hull.or_else(|| self.hull()) else {
            return Self::empty();
        };
        let mut out = Vec::new();
        let mut cursor = hlo;
        for &(lo, hi) in &self.intervals {
            if lo > cursor && lo <= hhi {
                out.push((cursor, lo.min(hhi)));
            }
            cursor = cursor.max(hi);
            if cursor >= hhi {
                break;
            }
        }
        if cursor < hhi && hull.is_some() {
            out.push((cursor, hhi));
        }
        IntervalSet { intervals: out }
    }

    /// Width of the widest gap, zero when connected.
    pub fn largest_gap(&self) -> R {
        self.gaps(None).intervals.iter().fold(R::zero(), |acc, &(lo, hi)| acc.max(hi - lo))
    }

    /// `{x + y : x in self, y in other}`.
    pub fn minkowski_sum(&self, other: &Self) -> Result<Self> {
        let pairs = self.len() as u128 * other.len() as u128;
        if pairs > MINKOWSKI_CAP {
            return Err(Error::LimitExceeded { what: "Minkowski sum interval count", size: pairs, cap: MINKOWSKI_CAP });
        }
        let mut all = Vec::with_capacity(pairs as usize);
        for &(a, b) in &self.intervals {
            for &(c, d) in &other.intervals {
                all.push((a + c, b + d));
            }
        }
        Self::from_intervals(all)
    }

    pub fn to_json(&self) -> IntervalSetJson {
        IntervalSetJson {
            intervals: self.intervals.iter().map(|&(lo, hi)| [lo.to_decimal(), hi.to_decimal()]).collect(),
        }
    }

    pub fn from_json(json: &IntervalSetJson) -> Result<Self> {
        let raw = json
            .intervals
            .iter()
            .map(|[lo, hi]| Ok((parse_real(lo)?, parse_real(hi)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_intervals(raw)
    }
}

/// Serialized form: `{"intervals": [["lo", "hi"], ...]}` with decimal strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSetJson {
    pub intervals: Vec<[String; 2]>,
}
