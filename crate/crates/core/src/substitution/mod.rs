//! Substitution rules, their iterated words, and the potentials built from them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::PeriodicJacobi;
use crate::realnum::{DecimalLiteral, Real};


/// Default cap on generated word length.
pub const DEFAULT_MAX_WORD_LENGTH: usize = 1 << 26;

/// Finite sequence of symbols, stored as indices into the owning alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }
}

/// Substitution on a finite alphabet with a numeric value per symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct SubstitutionRule {
    symbols: Vec<char>,
    values: Vec<DecimalLiteral>,
    images: Vec<Vec<u8>>,
}

impl SubstitutionRule {
    /// `alphabet` pairs each symbol with its value; `images[i]` is the image of symbol `i`.
    pub fn new(alphabet: Vec<(char, &str)>, images: Vec<&str>) -> Result<Self> {
        let symbols: Vec<char> = alphabet.iter().map(|(c, _)| *c).collect();
        if symbols.is_empty() || symbols.len() > 255 {
            return Err(Error::invalid("alphabet must have between 1 and 255 symbols"));
        }
        for (i, c) in symbols.iter().enumerate() {
            if symbols[..i].contains(c) {
                return Err(Error::invalid(format!("symbol {c:?} listed twice")));
            }
        }
        let values = alphabet.iter().map(|(_, v)| DecimalLiteral::parse(v)).collect::<Result<Vec<_>>>()?;
        if images.len() != symbols.len() {
            return Err(Error::invalid(format!("{} symbols but {} images", symbols.len(), images.len())));
        }
        let mut rule = SubstitutionRule { symbols, values, images: Vec::new() };
        for (c, image) in rule.symbols.clone().into_iter().zip(images) {
            if image.is_empty() {
                return Err(Error::invalid(format!("image of {c:?} is empty")));
            }
            let w = rule.parse_word(image)?;
            rule.images.push(w.0);
        }
        Ok(rule)
    }

    pub fn fibonacci() -> Self {
        Self::two_letter("ab", "a")
    }

    pub fn period_doubling() -> Self {
        Self::two_letter("ab", "aa")
    }

    pub fn thue_morse() -> Self {
        Self::two_letter("ab", "ba")
    }

    /// Rudin-Shapiro on `{a, b, c, d}` with caller-chosen values.
    pub fn rudin_shapiro(values: [&str; 4]) -> Result<Self> {
        Self::new(
            vec![('a', values[0]), ('b', values[1]), ('c', values[2]), ('d', values[3])],
            vec!["ab", "ac", "db", "dc"],
        )
    }

    fn two_letter(a: &str, b: &str) -> Self {
        Self::new(vec![('a', "1"), ('b', "0")], vec![a, b]).expect("built-in rule")
    }

    pub fn alphabet(&self) -> &[char] {
        &self.symbols
    }

    pub fn symbol_index(&self, c: char) -> Result<u8> {
        self.symbols
            .iter()
            .position(|&s| s == c)
            .map(|i| i as u8)
            .ok_or_else(|| Error::invalid(format!("symbol {c:?} not in alphabet")))
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        text.chars().map(|c| self.symbol_index(c)).collect::<Result<Vec<_>>>().map(Word)
    }

    pub fn render(&self, w: &Word) -> String {
        w.0.iter().map(|&i| self.symbols[i as usize]).collect()
    }

    pub fn value<R: Real>(&self, symbol: u8) -> Result<R> {
        R::from_decimal(&self.values[symbol as usize])
    }

    /// `M[i][j]` = occurrences of symbol `i` in the image of symbol `j`.
    pub fn incidence(&self) -> Vec<Vec<u64>> {
        let m = self.symbols.len();
        let mut out = vec![vec![0u64; m]; m];
        for (j, image) in self.images.iter().enumerate() {
            for &i in image {
                out[i as usize][j] += 1;
            }
        }
        out
    }

    /// Length of `S^k(seed)` without building it, saturating at `u128::MAX`.
    pub fn iterate_len(&self, seed: u8, k: usize) -> u128 {
        let inc = self.incidence();
        let m = self.symbols.len();
        let mut counts = vec![0u128; m];
        counts[seed as usize] = 1;
        for _ in 0..k {
            let mut next = vec![0u128; m];
            for i in 0..m {
                for j in 0..m {
                    next[i] = next[i].saturating_add((inc[i][j] as u128).saturating_mul(counts[j]));
                }
            }
            counts = next;
        }
        counts.iter().fold(0u128, |acc, &c| acc.saturating_add(c))
    }

    /// `S^k(seed)`, refusing words longer than `max_len`.
    pub fn iterate_capped(&self, seed: u8, k: usize, max_len: usize) -> Result<Word> {
        if seed as usize >= self.symbols.len() {
            return Err(Error::invalid(format!("seed index {seed} outside the alphabet")));
        }
        let len = self.iterate_len(seed, k);
        if len > max_len as u128 {
            return Err(Error::LimitExceeded { what: "substitution word length", size: len, cap: max_len as u128 });
        }
        let mut word = vec![seed];
        for _ in 0..k {
            let mut next = Vec::with_capacity(word.len() * 2);
            for &s in &word {
                next.extend_from_slice(&self.images[s as usize]);
            }
            word = next;
        }
        Ok(Word(word))
    }

    pub fn iterate(&self, seed: u8, k: usize) -> Result<Word> {
        self.iterate_capped(seed, k, DEFAULT_MAX_WORD_LENGTH)
    }

    /// Least `k` with every entry of the `k`-th incidence power positive, up to `(m-1)^2 + 1`.
    pub fn check_primitive(&self) -> Primitivity {
        let m = self.symbols.len();
        let step: Vec<Vec<bool>> = self.incidence().iter().map(|r| r.iter().map(|&c| c > 0).collect()).collect();
        let mut power = step.clone();
        for k in 1..=(m - 1) * (m - 1) + 1 {
            if power.iter().all(|r| r.iter().all(|&p| p)) {
                return Primitivity::Primitive(k);
            }
            power = (0..m)
                .map(|i| (0..m).map(|j| (0..m).any(|l| power[i][l] && step[l][j])).collect())
                .collect();
        }
        Primitivity::NotPrimitive
    }

    /// Schrodinger operator with `b_n = lambda * value(w_n)`.
    pub fn word_to_operator<R: Real>(&self, w: &Word, lambda: R) -> Result<PeriodicJacobi<R>> {
        if w.is_empty() {
            return Err(Error::invalid("empty word"));
        }
        let table = (0..self.symbols.len() as u8).map(|s| Ok(lambda * self.value::<R>(s)?)).collect::<Result<Vec<R>>>()?;
        PeriodicJacobi::schrodinger(w.0.iter().map(|&s| table[s as usize]).collect())
    }

    pub fn to_json(&self, seed: u8) -> SubstitutionJson {
        SubstitutionJson {
            alphabet: self
                .symbols
                .iter()
                .zip(&self.values)
                .map(|(c, v)| SymbolJson { symbol: c.to_string(), value: v.to_string() })
                .collect(),
            rules: self
                .symbols
                .iter()
                .zip(&self.images)
                .map(|(c, img)| (c.to_string(), self.render(&Word(img.clone()))))
                .collect(),
            seed: Some(self.symbols[seed as usize].to_string()),
        }
    }

    /// Parses the file form; returns the rule and its seed symbol.
    pub fn from_json(json: &SubstitutionJson) -> Result<(Self, u8)> {
        let mut alphabet = Vec::new();
        for entry in &json.alphabet {
            let mut chars = entry.symbol.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => alphabet.push((c, entry.value.as_str())),
                _ => return Err(Error::invalid(format!("symbol {:?} must be a single character", entry.symbol))),
            }
        }
        let images = alphabet
            .iter()
            .map(|(c, _)| {
                json.rules
                    .get(&c.to_string())
                    .map(String::as_str)
                    .ok_or_else(|| Error::invalid(format!("no rule for symbol {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(extra) = json.rules.keys().find(|k| !alphabet.iter().any(|(c, _)| c.to_string() == **k)) {
            return Err(Error::invalid(format!("rule for unknown symbol {extra:?}")));
        }
        let rule = Self::new(alphabet, images)?;
        let seed = match &json.seed {
            Some(s) if s.chars().count() == 1 => rule.symbol_index(s.chars().next().unwrap())?,
            Some(s) => return Err(Error::invalid(format!("seed {s:?} must be a single character"))),
            None => 0,
        };
        Ok((rule, seed))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primitivity {
    Primitive(usize),
    NotPrimitive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolJson {
    pub symbol: String,
    pub value: String,
}

/// File form: `{"alphabet": [{"symbol": "a", "value": "1.0"}, ...], "rules": {"a": "ab", ...}, "seed": "a"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubstitutionJson {
    pub alphabet: Vec<SymbolJson>,
    pub rules: BTreeMap<String, String>,
    #[serde(default)]
    pub seed: Option<String>,
}

/// Rational rotation number `p/q` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rotation {
    p: u64,
    q: u64,
}

impl Rotation {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::invalid("rotation denominator must be positive"));
        }
        let g = num_integer::gcd(p, q);
        Ok(Rotation { p: p / g, q: q / g })
    }

    pub fn numer(&self) -> u64 {
        self.p
    }

    pub fn denom(&self) -> u64 {
        self.q
    }

    /// `n p mod q`, so that `frac(n alpha) = residue / q` exactly.
    fn residue(&self, n: u64) -> u64 {
        ((n as u128 * self.p as u128) % self.q as u128) as u64
    }

    /// `F_{k}/F_{k+1}`, the continued-fraction convergents of the inverse golden mean.
    pub fn golden_convergent(k: usize) -> Self {
        let (mut num, mut den) = (1u64, 1u64);
        for _ in 0..k {
            (num, den) = (den, num + den);
        }
        Rotation::new(num, den).expect("positive denominator")
    }
}

/// Potential families.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind<R> {
    Fibonacci,
    PeriodDoubling,
    ThueMorse,
    /// Values for `a, b, c, d`, scaled by the coupling.
    RudinShapiro([R; 4]),
    /// `b_n = 2 lambda cos(2 pi (n alpha + theta))`
    AlmostMathieu { alpha: Rotation, theta: R },
    /// `b_n = lambda` when `(n alpha + theta) mod 1` lies in `[1 - alpha, 1)`, else 0.
    Sturmian { alpha: Rotation, theta: R },
}

/// A potential family together with its coupling constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Model<R> {
    pub kind: ModelKind<R>,
    pub lambda: R,
}

impl<R: Real> Model<R> {
    pub fn new(kind: ModelKind<R>, lambda: R) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::NonFinite("coupling constant"));
        }
        Ok(Model { kind, lambda })
    }

    pub fn fibonacci(lambda: R) -> Self {
        Model { kind: ModelKind::Fibonacci, lambda }
    }

    pub fn period_doubling(lambda: R) -> Self {
        Model { kind: ModelKind::PeriodDoubling, lambda }
    }

    pub fn thue_morse(lambda: R) -> Self {
        Model { kind: ModelKind::ThueMorse, lambda }
    }

    /// The substitution behind the model, if any.
    pub fn rule(&self) -> Option<SubstitutionRule> {
        match &self.kind {
            ModelKind::Fibonacci => Some(SubstitutionRule::fibonacci()),
            ModelKind::PeriodDoubling => Some(SubstitutionRule::period_doubling()),
            ModelKind::ThueMorse => Some(SubstitutionRule::thue_morse()),
            ModelKind::RudinShapiro(v) => {
                let texts: Vec<String> = v.iter().map(|x| x.to_decimal()).collect();
                Some(SubstitutionRule::rudin_shapiro([&texts[0], &texts[1], &texts[2], &texts[3]]).expect("valid values"))
            }
            _ => None,
        }
    }

    /// Operator for the word `S^k(seed)`.
    pub fn level_operator(&self, seed: char, k: usize, max_len: usize) -> Result<PeriodicJacobi<R>> {
        let rule = self
            .rule()
            .ok_or_else(|| Error::invalid("levels are defined only for substitution models"))?;
        let w = rule.iterate_capped(rule.symbol_index(seed)?, k, max_len)?;
        rule.word_to_operator(&w, self.lambda)
    }

    /// Period-`K` operator whose potential is the first `K` samples of the model.
    ///
    /// Rotation models need `K` to be a multiple of the denominator of `alpha`;
    /// substitution models use the prefix of the word generated from `a`.
    pub fn sample_potential(&self, period: usize) -> Result<PeriodicJacobi<R>> {
        if period == 0 {
            return Err(Error::invalid("period must be at least 1"));
        }
        let check_q = |alpha: &Rotation| {
            if period as u64 % alpha.q != 0 {
                Err(Error::invalid(format!("period {period} is not a multiple of q = {}", alpha.q)))
            } else {
                Ok(())
            }
        };
        let potential: Vec<R> = match &self.kind {
            ModelKind::AlmostMathieu { alpha, theta } => {
                check_q(alpha)?;
                let q = R::from_i64(alpha.q as i64);
                (1..=period as u64)
                    .map(|n| (R::from_i64(alpha.residue(n) as i64) / q + *theta).cos_turns() * self.lambda.mul_f64(2.0))
                    .collect()
            }
            ModelKind::Sturmian { alpha, theta } => {
                check_q(alpha)?;
                (1..=period as u64)
                    .map(|n| if sturmian_hit(alpha, n, *theta) { self.lambda } else { R::zero() })
                    .collect()
            }
            _ => {
                let rule = self.rule().expect("substitution model");
                let mut k = 0;
                while rule.iterate_len(0, k) < period as u128 {
                    k += 1;
                    if k > 256 {
                        return Err(Error::invalid("seed word does not grow"));
                    }
                }
                let w = rule.iterate(0, k)?;
                let op = rule.word_to_operator(&Word(w.0[..period].to_vec()), self.lambda)?;
                return Ok(op);
            }
        };
        PeriodicJacobi::schrodinger(potential)
    }
}

/// `(n alpha + theta) mod 1` in `[1 - alpha, 1)`, exact when `theta` is zero.
fn sturmian_hit<R: Real>(alpha: &Rotation, n: u64, theta: R) -> bool {
    let r = alpha.residue(n);
    if theta == R::zero() {
        return r + alpha.p >= alpha.q;
    }
    let q = R::from_i64(alpha.q as i64);
    let x = R::from_i64(r as i64) / q + theta;
    let frac = x - x.floor();
    frac >= R::one() - R::from_i64(alpha.p as i64) / q
}
