//! Dirichlet characters modulo an odd prime, short interval sums, the dyadic
//! rectangle family `Π^c` covering the hyperbolic region `xy <= p/c`, and the
//! congruence count `S(a)` together with its character-sum expansion.
//!
//! Characters are indexed by `j ∈ [0, p - 2]`:
//! `χ_j(x) = exp(2πi · j · ind_g(x) / (p - 1))` for `x ≢ 0` and `0` otherwise.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modmath::{is_prime, PrimeContext, SubgroupCoset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    Natural,
    Binary,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Binary => x.log2(),
        }
    }
}

/// All `p - 1` characters modulo `p`, sharing one table of roots of unity.
#[derive(Debug, Clone)]
pub struct CharacterGroup {
    ctx: Arc<PrimeContext>,
    roots: Arc<[Complex64]>,
}

impl CharacterGroup {
    pub fn new(ctx: Arc<PrimeContext>) -> Self {
        let n = ctx.group_order();
        let roots: Arc<[Complex64]> = (0..n)
            .map(|e| {
                // exact values at the quarter points keep sign tests clean
                if e == 0 {
                    Complex64::new(1.0, 0.0)
                } else if 2 * e == n {
                    Complex64::new(-1.0, 0.0)
                } else if 4 * e == n {
                    Complex64::new(0.0, 1.0)
                } else if 4 * e == 3 * n {
                    Complex64::new(0.0, -1.0)
                } else {
                    Complex64::from_polar(1.0, 2.0 * PI * e as f64 / n as f64)
                }
            })
            .collect();
        Self { ctx, roots }
    }

    pub fn context(&self) -> &Arc<PrimeContext> {
        &self.ctx
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn character(&self, index: u64) -> Result<Character> {
        if index >= self.ctx.group_order() {
            return Err(Error::CharacterIndex {
                index,
                p: self.ctx.p(),
            });
        }
        Ok(Character {
            ctx: Arc::clone(&self.ctx),
            roots: Arc::clone(&self.roots),
            index,
        })
    }

    pub fn characters(&self) -> impl Iterator<Item = Character> + '_ {
        (0..self.ctx.group_order()).map(move |j| self.character(j).expect("index in range"))
    }

    pub fn nonprincipal(&self) -> impl Iterator<Item = Character> + '_ {
        self.characters().skip(1)
    }
}

#[derive(Debug, Clone)]
pub struct Character {
    ctx: Arc<PrimeContext>,
    roots: Arc<[Complex64]>,
    index: u64,
}

impl Character {
    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn p(&self) -> u64 {
        self.ctx.p()
    }

    pub fn is_principal(&self) -> bool {
        self.index == 0
    }

    /// `χ(x)`, periodic in `x` and zero on multiples of `p`.
    #[inline]
    pub fn value(&self, x: i128) -> Complex64 {
        match self.ctx.dlog(x) {
            None => Complex64::new(0.0, 0.0),
            Some(k) => {
                let e = (self.index * k as u64) % self.ctx.group_order();
                self.roots[e as usize]
            }
        }
    }

    /// Exact test: `χ_j(u) = 1` for every `u ∈ U`, i.e. `j · ind(u) ≡ 0 (mod p - 1)`.
    pub fn is_trivial_on(&self, group: &SubgroupCoset) -> bool {
        let n = self.ctx.group_order();
        group.elements().iter().all(|&u| {
            let k = self.ctx.dlog(u as i128).expect("coset elements are units") as u64;
            (self.index * k).is_multiple_of(n)
        })
    }

    /// `Σ_{x=1}^{n} χ(x)`, accumulated in ascending order.
    pub fn interval_sum(&self, n: u64) -> Complex64 {
        (1..=n as i128).map(|x| self.value(x)).sum()
    }

    /// Prefix sums `P[n] = Σ_{x=1}^{n} χ(x)` for `n = 0..=max_n`.
    pub fn prefix_sums(&self, max_n: u64) -> PrefixSums {
        let mut sums = Vec::with_capacity(max_n as usize + 1);
        let mut acc = Complex64::new(0.0, 0.0);
        sums.push(acc);
        for x in 1..=max_n as i128 {
            acc += self.value(x);
            sums.push(acc);
        }
        PrefixSums { sums }
    }
}

pub fn char_value(chi: &Character, x: i128) -> Complex64 {
    chi.value(x)
}

pub fn interval_sum(chi: &Character, n: u64) -> Complex64 {
    chi.interval_sum(n)
}

#[derive(Debug, Clone)]
pub struct PrefixSums {
    sums: Vec<Complex64>,
}

impl PrefixSums {
    /// `Σ_{x=lo}^{hi} χ(x)`; zero for an empty range.
    #[inline]
    pub fn range(&self, lo: u64, hi: u64) -> Complex64 {
        if lo > hi {
            return Complex64::new(0.0, 0.0);
        }
        self.sums[hi as usize] - self.sums[lo as usize - 1]
    }

    pub fn upto(&self, n: u64) -> Complex64 {
        self.sums[n as usize]
    }
}

/// Burgess-type bound `30 N^{1-1/r} p^{(r+1)/(4r^2)} (ln p)^{1/r}`.
pub fn burgess_bound(p: u64, n: u64, r: u32) -> f64 {
    burgess_bound_with(p, n, r, LogBase::Natural)
}

pub fn burgess_bound_with(p: u64, n: u64, r: u32, base: LogBase) -> f64 {
    let r = r.max(1) as f64;
    let p = p as f64;
    30.0 * (n as f64).powf(1.0 - 1.0 / r) * p.powf((r + 1.0) / (4.0 * r * r)) * base.log(p).powf(1.0 / r)
}

/// `10^4 p^{7/8} (ln p)^2 / √c`.
pub fn lemma1_bound(p: u64, c: f64) -> f64 {
    lemma1_bound_with(p, c, LogBase::Natural)
}

pub fn lemma1_bound_with(p: u64, c: f64, base: LogBase) -> f64 {
    let pf = p as f64;
    1e4 * pf.powf(7.0 / 8.0) * base.log(pf).powi(2) / c.sqrt()
}

/// `⌊sqrt(2^e · h)⌋`, exact for the `f64` value `h` (scaling by `2^e` is exact).
fn floor_sqrt_scaled(h: f64, e: i32) -> u64 {
    let z = h * 2f64.powi(e);
    let mut m = z.sqrt().floor() as u64;
    while ((m + 1) as f64) * ((m + 1) as f64) <= z {
        m += 1;
    }
    while m > 0 && (m as f64) * (m as f64) > z {
        m -= 1;
    }
    m
}

/// One rectangle `Π_ν` with its real bounds and inclusive integer ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub index: i32,
    pub x_real: (f64, f64),
    pub y_real: (f64, f64),
    /// Inclusive; empty when `lo > hi`.
    pub columns: (u64, u64),
    pub rows: (u64, u64),
}

impl Rectangle {
    #[inline]
    pub fn contains(&self, x: u64, y: u64) -> bool {
        (self.columns.0..=self.columns.1).contains(&x) && (self.rows.0..=self.rows.1).contains(&y)
    }

    pub fn is_empty(&self) -> bool {
        self.columns.0 > self.columns.1 || self.rows.0 > self.rows.1
    }

    pub fn point_count(&self) -> u64 {
        let w = (self.columns.1 + 1).saturating_sub(self.columns.0);
        let h = (self.rows.1 + 1).saturating_sub(self.rows.0);
        w * h
    }
}

/// The dyadic family `Π_{-j}, ..., Π_j` for parameter `c >= 1`, with
/// `k = sqrt(2p/c)` and `j` the least integer with `2^j k >= p`.
///
/// `Π_ν` for `ν >= 1` takes the integer columns `⌊2^{ν-1}k⌋ + 1 ..= ⌊2^ν k⌋`,
/// so consecutive column blocks tile `[1, ⌊2^j k⌋]` with no gaps; rows are
/// `1 ..= ⌊k/2^ν⌋`. `Π_{-ν}` is the transpose and `Π_0 = [1, ⌊k⌋]^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectangleFamily {
    pub p: u64,
    pub c: f64,
    pub k: f64,
    pub j: u32,
    /// `p / c`, the bound on `xy` in the covered region.
    pub hyperbola: f64,
    pub rects: Vec<Rectangle>,
}

pub fn build_pi(p: u64, c: f64) -> Result<RectangleFamily> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if !c.is_finite() || c < 1.0 {
        return Err(Error::ParameterOutOfRange { c, p });
    }
    let h = p as f64 / c;
    let k = (2.0 * h).sqrt();
    // least j with 2^j k >= p  <=>  2^{2j+1} h >= p^2
    let p2 = (p as f64) * (p as f64);
    let mut j = 0u32;
    while h * 2f64.powi(2 * j as i32 + 1) < p2 {
        j += 1;
    }

    let scaled_up = |nu: u32| floor_sqrt_scaled(h, 2 * nu as i32 + 1); // ⌊2^ν k⌋
    let scaled_down = |nu: u32| floor_sqrt_scaled(h, 1 - 2 * nu as i32); // ⌊k / 2^ν⌋

    let k0 = scaled_up(0);
    let mut rects = Vec::with_capacity(2 * j as usize + 1);
    for nu in (1..=j).rev() {
        let lo = 2f64.powi(nu as i32 - 1) * k + 1.0;
        let hi = 2f64.powi(nu as i32) * k;
        let cols = (1, scaled_down(nu));
        let rows = (scaled_up(nu - 1) + 1, scaled_up(nu));
        rects.push(Rectangle {
            index: -(nu as i32),
            x_real: (1.0, k / 2f64.powi(nu as i32)),
            y_real: (lo, hi),
            columns: cols,
            rows,
        });
    }
    rects.push(Rectangle {
        index: 0,
        x_real: (1.0, k),
        y_real: (1.0, k),
        columns: (1, k0),
        rows: (1, k0),
    });
    for nu in 1..=j {
        let lo = 2f64.powi(nu as i32 - 1) * k + 1.0;
        let hi = 2f64.powi(nu as i32) * k;
        rects.push(Rectangle {
            index: nu as i32,
            x_real: (lo, hi),
            y_real: (1.0, k / 2f64.powi(nu as i32)),
            columns: (scaled_up(nu - 1) + 1, scaled_up(nu)),
            rows: (1, scaled_down(nu)),
        });
    }
    Ok(RectangleFamily {
        p,
        c,
        k,
        j,
        hyperbola: h,
        rects,
    })
}

impl RectangleFamily {
    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    /// Index `ν` of the rectangle holding `(x, y)`, if any.
    pub fn locate(&self, x: u64, y: u64) -> Option<i32> {
        self.rects.iter().find(|r| r.contains(x, y)).map(|r| r.index)
    }

    pub fn contains(&self, x: u64, y: u64) -> bool {
        self.locate(x, y).is_some()
    }

    /// Largest coordinate used by any rectangle.
    pub fn extent(&self) -> u64 {
        self.rects
            .iter()
            .map(|r| r.columns.1.max(r.rows.1))
            .max()
            .unwrap_or(0)
    }

    pub fn point_count(&self) -> u64 {
        self.rects.iter().map(Rectangle::point_count).sum()
    }
}

/// `Σ_{(x,u) ∈ Π^c} χ(x) conj(χ(u))`, one product of interval sums per rectangle.
pub fn lemma1_sum(family: &RectangleFamily, chi: &Character) -> Result<Complex64> {
    if chi.is_principal() {
        return Err(Error::PrincipalCharacter);
    }
    let prefix = chi.prefix_sums(family.extent());
    Ok(family
        .rects
        .iter()
        .map(|r| prefix.range(r.columns.0, r.columns.1) * prefix.range(r.rows.0, r.rows.1).conj())
        .sum())
}

/// The same double sum evaluated point by point.
pub fn lemma1_sum_naive(family: &RectangleFamily, chi: &Character) -> Result<Complex64> {
    if chi.is_principal() {
        return Err(Error::PrincipalCharacter);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for r in &family.rects {
        for x in r.columns.0..=r.columns.1 {
            for u in r.rows.0..=r.rows.1 {
                acc += chi.value(x as i128) * chi.value(u as i128).conj();
            }
        }
    }
    Ok(acc)
}

/// `δ_p(z)`: 1 if `p | z`, else 0.
pub fn delta_p(z: i128, p: u64) -> u64 {
    u64::from(z.rem_euclid(p as i128) == 0)
}

/// `#{y ∈ [lo, hi] : y ≡ r (mod p)}`.
fn count_congruent(lo: u64, hi: u64, r: u64, p: u64) -> u64 {
    if lo > hi {
        return 0;
    }
    let (lo, hi, r, p) = (lo as i64, hi as i64, r as i64, p as i64);
    ((hi - r).div_euclid(p) - (lo - 1 - r).div_euclid(p)) as u64
}

/// `S(a)`: pairs `(x, y)` with `(x, |y|) ∈ Π^t`, `y ≢ 0` and `ax ≡ y (mod p)`.
pub fn s_count(p: u64, a: u64, t: f64) -> Result<u64> {
    Ok(s_count_in(&build_pi(p, t)?, a))
}

pub fn s_count_in(family: &RectangleFamily, a: u64) -> u64 {
    let p = family.p;
    let mut total = 0;
    for rect in &family.rects {
        if rect.rows.0 > rect.rows.1 {
            continue;
        }
        for x in rect.columns.0..=rect.columns.1 {
            let r = crate::modmath::mul_mod(a % p, x % p, p);
            if r == 0 {
                continue;
            }
            total += count_congruent(rect.rows.0, rect.rows.1, r, p);
            total += count_congruent(rect.rows.0, rect.rows.1, p - r, p);
        }
    }
    total
}

/// Character expansion of `S(a)` for one family, precomputed over all characters:
/// `S(a) = (1/(p-1)) Σ_χ χ(a) T_χ` with
/// `T_χ = Σ_rect (Σ_x χ(x)) · conj(Σ_u χ(u) + χ(-u))`.
#[derive(Debug, Clone)]
pub struct SCharFormula {
    group: CharacterGroup,
    weights: Vec<Complex64>,
}

impl SCharFormula {
    pub fn new(ctx: Arc<PrimeContext>, family: &RectangleFamily) -> Self {
        let group = CharacterGroup::new(ctx);
        let extent = family.extent();
        let weights = group
            .characters()
            .map(|chi| {
                let prefix = chi.prefix_sums(extent);
                let both_signs = Complex64::new(1.0, 0.0) + chi.value(-1);
                family
                    .rects
                    .iter()
                    .map(|r| {
                        let xs = prefix.range(r.columns.0, r.columns.1);
                        let ys = prefix.range(r.rows.0, r.rows.1) * both_signs;
                        xs * ys.conj()
                    })
                    .sum()
            })
            .collect();
        Self { group, weights }
    }

    pub fn eval(&self, a: u64) -> f64 {
        let n = self.weights.len() as f64;
        let total: Complex64 = self
            .group
            .characters()
            .zip(&self.weights)
            .map(|(chi, w)| chi.value(a as i128) * w)
            .sum();
        total.re / n
    }
}

pub fn s_char_formula(p: u64, a: u64, t: f64) -> Result<f64> {
    let ctx = Arc::new(PrimeContext::new(p)?);
    let family = build_pi(p, t)?;
    Ok(SCharFormula::new(ctx, &family).eval(a))
}
