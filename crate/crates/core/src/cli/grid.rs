//! Scalar and grid syntax shared by the subcommands.

use crate::error::{Error, Result};
use crate::realnum::{parse_real, Real};

/// Parses a decimal literal or a power `B^E` with integer exponent, e.g. `2^-7`.
pub fn parse_scalar<R: Real>(text: &str) -> Result<R> {
    let text = text.trim();
    match text.split_once('^') {
        None => parse_real(text),
        Some((base, exp)) => {
            let base: R = parse_real(base.trim())?;
            let exp: i32 = exp
                .trim()
                .parse()
                .map_err(|e| Error::Parse { text: text.to_string(), reason: format!("exponent: {e}") })?;
            Ok(powi(base, exp))
        }
    }
}

fn powi<R: Real>(base: R, exp: i32) -> R {
    let mut acc = R::one();
    let mut sq = base;
    let mut n = exp.unsigned_abs();
    while n > 0 {
        if n & 1 == 1 {
            acc = acc * sq;
        }
        sq = sq * sq;
        n >>= 1;
    }
    if exp < 0 {
        R::one() / acc
    } else {
        acc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Lin,
    Log,
}

/// `MIN..MAX {lin|log} STEPS`
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<R> {
    pub min: R,
    pub max: R,
    pub spacing: Spacing,
    pub steps: usize,
}

impl<R: Real> Grid<R> {
    pub fn parse(parts: &[String]) -> Result<Self> {
        let [range, spacing, steps] = parts else {
            return Err(Error::invalid("grid needs MIN..MAX SPACING STEPS"));
        };
        let (lo, hi) = range
            .split_once("..")
            .ok_or_else(|| Error::invalid(format!("grid range {range:?} must look like MIN..MAX")))?;
        let spacing = match spacing.to_ascii_lowercase().as_str() {
            "lin" => Spacing::Lin,
            "log" => Spacing::Log,
            other => return Err(Error::invalid(format!("grid spacing {other:?} must be lin or log"))),
        };
        let steps: usize = steps
            .parse()
            .map_err(|e| Error::invalid(format!("grid steps {steps:?}: {e}")))?;
        let grid = Grid { min: parse_scalar(lo)?, max: parse_scalar(hi)?, spacing, steps };
        if steps == 0 {
            return Err(Error::invalid("grid needs at least one step"));
        }
        if grid.max < grid.min {
            return Err(Error::invalid("grid maximum is below its minimum"));
        }
        if spacing == Spacing::Log && grid.min <= R::zero() {
            return Err(Error::invalid("log grid needs a positive minimum"));
        }
        Ok(grid)
    }

    pub fn values(&self) -> Vec<R> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let last = R::from_i64(self.steps as i64 - 1);
        (0..self.steps)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i + 1 == self.steps {
                    return self.max;
                }
                let t = R::from_i64(i as i64) / last;
                match self.spacing {
                    Spacing::Lin => self.min + (self.max - self.min) * t,
                    Spacing::Log => self.min * ((self.max / self.min).ln() * t).exp(),
                }
            })
            .collect()
    }
}

/// Comma-separated box sizes. `B^E1..B^E2` expands over every integer exponent between.
pub fn parse_eps_list<R: Real>(text: &str) -> Result<Vec<R>> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.split_once("..") {
            None => out.push(parse_scalar(item)?),
            Some((a, b)) => {
                let split = |s: &str| -> Result<(String, i32)> {
                    let (base, exp) = s
                        .trim()
                        .split_once('^')
                        .ok_or_else(|| Error::invalid(format!("range endpoint {s:?} must be a power B^E")))?;
                    let exp = exp
                        .trim()
                        .parse()
                        .map_err(|e| Error::invalid(format!("exponent in {s:?}: {e}")))?;
                    Ok((base.trim().to_string(), exp))
                };
                let (b1, e1) = split(a)?;
                let (b2, e2) = split(b)?;
                if b1 != b2 {
                    return Err(Error::invalid(format!("range {item:?} mixes bases")));
                }
                let base: R = parse_real(&b1)?;
                let step = if e2 >= e1 { 1 } else { -1 };
                let mut e = e1;
                loop {
                    out.push(powi(base, e));
                    if e == e2 {
                        break;
                    }
                    e += step;
                }
            }
        }
    }
    if out.is_empty() {
        return Err(Error::invalid("empty box-size list"));
    }
    if out.iter().any(|&e| e <= R::zero()) {
        return Err(Error::invalid("box sizes must be positive"));
    }
    Ok(out)
}
