//! Continued fraction expansion `a/p = [0; b_1, ..., b_l]` and its convergents.
//!
//! The expansion is the one produced by Euclid's algorithm, so the final
//! partial quotient is at least 2 whenever `l >= 2`. Convergents are indexed
//! from `n = 1` (`q_1 = b_1`); `n = 0` denotes the trivial convergent `0/1`.

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    a: u64,
    p: u64,
    quotients: Vec<u64>,
    /// `(p_n, q_n)` for `n = 1..=l`.
    convergents: Vec<(u64, u64)>,
}

/// Canonical expansion of `a/p` for `1 <= a <= p - 1`, `gcd(a, p) = 1`.
pub fn expand(a: u64, p: u64) -> Result<ContinuedFraction> {
    if p < 2 || a == 0 || a >= p {
        return Err(Error::ResidueOutOfRange {
            value: a as i64,
            max: p.saturating_sub(1),
        });
    }
    if a.gcd(&p) != 1 {
        return Err(Error::NotCoprime { a, p });
    }
    let mut quotients = Vec::new();
    let mut convergents = Vec::new();
    // (p_{n-2}, q_{n-2}), (p_{n-1}, q_{n-1}) seeded with n = -1, 0
    let (mut pm2, mut qm2, mut pm1, mut qm1) = (1u64, 0u64, 0u64, 1u64);
    let (mut num, mut den) = (p, a);
    while den != 0 {
        let b = num / den;
        (num, den) = (den, num % den);
        let pn = b * pm1 + pm2;
        let qn = b * qm1 + qm2;
        quotients.push(b);
        convergents.push((pn, qn));
        (pm2, qm2, pm1, qm1) = (pm1, qm1, pn, qn);
    }
    Ok(ContinuedFraction {
        a,
        p,
        quotients,
        convergents,
    })
}

impl ContinuedFraction {
    pub fn numerator(&self) -> u64 {
        self.a
    }

    pub fn denominator(&self) -> u64 {
        self.p
    }

    /// `b_1, ..., b_l`.
    pub fn quotients(&self) -> &[u64] {
        &self.quotients
    }

    /// `(p_n, q_n)` for `n = 1..=l`.
    pub fn convergents(&self) -> &[(u64, u64)] {
        &self.convergents
    }

    /// `l(a)`.
    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    /// `(p_n, q_n)` for `0 <= n <= l`, with `(p_0, q_0) = (0, 1)`.
    pub fn convergent(&self, n: usize) -> Option<(u64, u64)> {
        match n {
            0 => Some((0, 1)),
            _ => self.convergents.get(n - 1).copied(),
        }
    }

    /// Denominators `q_1 < q_2 < ... < q_l`.
    pub fn denominators(&self) -> impl Iterator<Item = u64> + '_ {
        self.convergents.iter().map(|&(_, q)| q)
    }

    pub fn sum_quotients(&self) -> u64 {
        self.quotients.iter().sum()
    }

    pub fn max_quotient(&self) -> u64 {
        self.quotients.iter().copied().max().unwrap_or(0)
    }

    /// Evaluates `[0; b_1, ..., b_l]` bottom-up, independently of the stored convergents.
    pub fn value(&self) -> Ratio<u128> {
        let mut acc: Option<Ratio<u128>> = None;
        for &b in self.quotients.iter().rev() {
            let tail = match acc {
                None => Ratio::from_integer(b as u128),
                Some(r) => Ratio::from_integer(b as u128) + r,
            };
            acc = Some(tail.recip());
        }
        acc.unwrap_or_else(|| Ratio::from_integer(0))
    }

    pub fn is_canonical(&self) -> bool {
        self.len() < 2 || self.quotients.last().is_some_and(|&b| b >= 2)
    }
}

pub fn sum_quotients(cf: &ContinuedFraction) -> u64 {
    cf.sum_quotients()
}

pub fn max_quotient(cf: &ContinuedFraction) -> u64 {
    cf.max_quotient()
}

/// Sum, maximum and length of the partial quotients, without allocating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientStats {
    pub sum: u64,
    pub max: u64,
    pub len: u32,
}

/// Same statistics as [`expand`] followed by the accessors; `a/p` must be reduced.
#[inline]
pub fn quotient_stats(a: u64, p: u64) -> QuotientStats {
    let mut stats = QuotientStats {
        sum: 0,
        max: 0,
        len: 0,
    };
    let (mut num, mut den) = (p, a);
    while den != 0 {
        let b = num / den;
        (num, den) = (den, num - b * den);
        stats.sum += b;
        stats.max = stats.max.max(b);
        stats.len += 1;
    }
    stats
}

/// Outcome of the best-approximation test: if `|a/p - b/x| < 1/(2x^2)`
/// then `b/x` must be a convergent of `a/p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaAVerdict {
    /// `|a/p - b/x| < 1/(2x^2)`, compared exactly.
    pub condition: bool,
    /// The reduced fraction `b/x` equals some `p_n/q_n`, `0 <= n <= l`.
    pub is_convergent: bool,
    pub reduced: (i64, u64),
}

impl LemmaAVerdict {
    /// The implication `condition => is_convergent`.
    pub fn holds(&self) -> bool {
        !self.condition || self.is_convergent
    }
}

pub fn check_lemma_a(a: u64, p: u64, b: i64, x: u64) -> Result<LemmaAVerdict> {
    if x == 0 {
        return Err(Error::ZeroDenominator);
    }
    let cf = expand(a, p)?;
    // |a/p - b/x| < 1/(2x^2)  <=>  2x|ax - bp| < p
    let diff = (a as i128 * x as i128 - b as i128 * p as i128).abs();
    let condition = 2 * x as i128 * diff < p as i128;

    let g = (b.unsigned_abs()).gcd(&x);
    let reduced = (b / g as i64, x / g);
    let is_convergent = reduced.0 >= 0
        && (0..=cf.len()).any(|n| cf.convergent(n) == Some((reduced.0 as u64, reduced.1)));
    Ok(LemmaAVerdict {
        condition,
        is_convergent,
        reduced,
    })
}

/// Two-sided bound `1/(q_n(q_n + q_{n+1})) < |a/p - p_n/q_n| < 1/(q_n q_{n+1})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaBCheck {
    pub n: usize,
    pub lower: Ratio<i128>,
    pub actual: Ratio<i128>,
    pub upper: Ratio<i128>,
    pub lower_strict: bool,
    pub upper_strict: bool,
    /// `actual == upper`; only possible at the last proper convergent.
    pub upper_attained: bool,
    /// `n + 1 == l`: the next convergent is `a/p` itself.
    pub terminal: bool,
}

impl LemmaBCheck {
    /// Strict on both sides, except that equality at the upper bound is
    /// accepted at the terminal convergent.
    pub fn holds(&self) -> bool {
        self.lower_strict && (self.upper_strict || (self.terminal && self.upper_attained))
    }
}

pub fn check_lemma_b(cf: &ContinuedFraction, n: usize) -> Result<LemmaBCheck> {
    if n == 0 || n >= cf.len() {
        return Err(Error::ConvergentIndex { n, len: cf.len() });
    }
    let (pn, qn) = cf.convergent(n).expect("index checked");
    let (_, qn1) = cf.convergent(n + 1).expect("index checked");
    let (a, p) = (cf.a as i128, cf.p as i128);
    let (pn, qn, qn1) = (pn as i128, qn as i128, qn1 as i128);

    let lower = Ratio::new(1, qn * (qn + qn1));
    let actual = Ratio::new((a * qn - p * pn).abs(), p * qn);
    let upper = Ratio::new(1, qn * qn1);
    Ok(LemmaBCheck {
        n,
        lower_strict: lower < actual,
        upper_strict: actual < upper,
        upper_attained: actual == upper,
        terminal: n + 1 == cf.len(),
        lower,
        actual,
        upper,
    })
}
