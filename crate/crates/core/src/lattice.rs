//! The point set `ξ_x = (x/p, {ax/p})`, `x = 0..p-1`, box counts and the exact
//! (unnormalized) star discrepancy
//!
//! ```text
//! D_p(a) = sup_{γ1, γ2 ∈ [0,1]} |N_p(γ1, γ2) - γ1 γ2 p|.
//! ```
//!
//! All coordinates live on the grid `{0, 1/p, ..., (p-1)/p}`, so `p·D_p(a)` is
//! an integer and the supremum is a maximum over two families of corners:
//! closed boxes `[0, i/p] × [0, j/p]` (where the count jumps up) and open boxes
//! `[0, i/p) × [0, j/p)` (limits from below, where the volume term wins).

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::contfrac::ContinuedFraction;
use crate::error::{Error, Result};
use crate::modmath::{is_prime, mul_mod, PrimeContext};
use crate::report::ratio_string;

/// Default largest `p` accepted by [`discrepancy_exact`].
pub const DEFAULT_EXACT_LIMIT: u64 = 20_000;

/// Constant `C_D` in the bound `D_p(a) <= C_D (Σ b_i + 1)`.
pub const DISCREPANCY_CONSTANT: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoxMode {
    /// `[0, γ1] × [0, γ2]`
    Closed,
    /// `[0, γ1) × [0, γ2)`
    Open,
}

/// `ξ_x` stored as the integer pairs `(x, ax mod p)` over the common denominator `p`.
#[derive(Debug, Clone)]
pub struct LatticePointSet {
    p: u64,
    a: u64,
    ys: Vec<u32>,
}

impl LatticePointSet {
    /// Accepts any prime `p` (including 2) and `1 <= a <= p - 1`.
    pub fn new(p: u64, a: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p > u32::MAX as u64 {
            return Err(Error::ModulusTooLarge {
                p,
                limit: u32::MAX as u64,
            });
        }
        if a == 0 || a >= p {
            return Err(Error::ResidueOutOfRange {
                value: a as i64,
                max: p - 1,
            });
        }
        let ys = (0..p).map(|x| mul_mod(a, x, p) as u32).collect();
        Ok(Self { p, a, ys })
    }

    pub fn from_context(ctx: &PrimeContext, a: u64) -> Result<Self> {
        Self::new(ctx.p(), a)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn generator(&self) -> u64 {
        self.a
    }

    /// Numerator pairs `(x, ax mod p)`.
    pub fn points(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.ys.iter().enumerate().map(|(x, &y)| (x as u64, y as u64))
    }

    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    pub fn count_box(&self, gamma1: Ratio<i64>, gamma2: Ratio<i64>, mode: BoxMode) -> Result<u64> {
        count_box(self, gamma1, gamma2, mode)
    }
}

fn check_corner(g: Ratio<i64>) -> Result<()> {
    if g < Ratio::from_integer(0) || g > Ratio::from_integer(1) {
        return Err(Error::CornerOutOfRange(g.to_string()));
    }
    Ok(())
}

/// `N_p(γ1, γ2)` for closed boxes, or the count of the open box for [`BoxMode::Open`].
pub fn count_box(
    set: &LatticePointSet,
    gamma1: Ratio<i64>,
    gamma2: Ratio<i64>,
    mode: BoxMode,
) -> Result<u64> {
    check_corner(gamma1)?;
    check_corner(gamma2)?;
    let p = set.p as i128;
    let (n1, d1) = (*gamma1.numer() as i128, *gamma1.denom() as i128);
    let (n2, d2) = (*gamma2.numer() as i128, *gamma2.denom() as i128);
    // x/p <= n/d  <=>  x d <= n p
    let inside = |x: u64, y: u64| match mode {
        BoxMode::Closed => x as i128 * d1 <= n1 * p && y as i128 * d2 <= n2 * p,
        BoxMode::Open => (x as i128 * d1) < n1 * p && (y as i128 * d2) < n2 * p,
    };
    Ok(set.points().filter(|&(x, y)| inside(x, y)).count() as u64)
}

/// A box attaining the supremum, corners as exact fractions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalBox {
    #[serde(with = "ratio_string")]
    pub gamma1: Ratio<i64>,
    #[serde(with = "ratio_string")]
    pub gamma2: Ratio<i64>,
    pub mode: BoxMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub p: u64,
    pub a: u64,
    /// Exact `D_p(a)`.
    #[serde(with = "ratio_string")]
    pub value: Ratio<i64>,
    pub value_f64: f64,
    pub argmax: ExtremalBox,
    pub sum_quotients: u64,
    pub cf_constant: u64,
    /// `cf_constant · (Σ b_i + 1)`.
    pub cf_bound: u64,
}

impl DiscrepancyReport {
    pub fn within_cf_bound(&self) -> bool {
        self.value <= Ratio::from_integer(self.cf_bound as i64)
    }
}

/// `p · D_p(a)` together with the corner `(i/p, j/p)` attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaledExtremum {
    pub scaled: i64,
    pub i: u64,
    pub j: u64,
    pub mode: BoxMode,
}

impl ScaledExtremum {
    fn offer(&mut self, scaled: i64, i: u64, j: u64, mode: BoxMode) {
        if scaled > self.scaled {
            *self = Self { scaled, i, j, mode };
        }
    }
}

pub fn discrepancy_exact(set: &LatticePointSet) -> Result<DiscrepancyReport> {
    discrepancy_exact_with_limit(set, DEFAULT_EXACT_LIMIT)
}

pub fn discrepancy_exact_with_limit(set: &LatticePointSet, limit: u64) -> Result<DiscrepancyReport> {
    if set.p > limit {
        return Err(Error::ModulusTooLarge { p: set.p, limit });
    }
    let ext = scaled_discrepancy(set);
    let p = set.p as i64;
    let cf = crate::contfrac::expand(set.a, set.p)?;
    let value = Ratio::new(ext.scaled, p);
    Ok(DiscrepancyReport {
        p: set.p,
        a: set.a,
        value,
        value_f64: ext.scaled as f64 / p as f64,
        argmax: ExtremalBox {
            gamma1: Ratio::new(ext.i as i64, p),
            gamma2: Ratio::new(ext.j as i64, p),
            mode: ext.mode,
        },
        sum_quotients: cf.sum_quotients(),
        cf_constant: DISCREPANCY_CONSTANT,
        cf_bound: discrepancy_bound(&cf),
    })
}

/// `C_D · (Σ b_i + 1)` with `C_D = 3`.
pub fn discrepancy_bound(cf: &ContinuedFraction) -> u64 {
    DISCREPANCY_CONSTANT * (cf.sum_quotients() + 1)
}

// Sweep state shared by both scans. With `h(j) = p · #{x < i : y_x < j}`:
//   open corner (i, j):        i·j - h_i(j)
//   closed corner (i, j' - 1): h_{i+1}(j') - i·(j' - 1)
// so each column needs max and min of `h(j) - i·j` over `j ∈ [0, p]`.

/// `p · D_p(a)` by a plain `O(p^2)` corner scan.
pub fn scaled_discrepancy_quadratic(set: &LatticePointSet) -> ScaledExtremum {
    let p = set.p as usize;
    let pi = set.p as i64;
    let mut h = vec![0i64; p + 1];
    let mut best = ScaledExtremum {
        scaled: i64::MIN,
        i: 0,
        j: 0,
        mode: BoxMode::Closed,
    };
    for i in 0..p {
        let s = i as i64;
        for (j, &hj) in h.iter().enumerate() {
            best.offer(s * j as i64 - hj, i as u64, j as u64, BoxMode::Open);
        }
        for v in &mut h[set.ys[i] as usize + 1..] {
            *v += pi;
        }
        for (j, &hj) in h.iter().enumerate().skip(1) {
            best.offer(hj - s * (j as i64 - 1), i as u64, j as u64 - 1, BoxMode::Closed);
        }
    }
    best
}

/// `p · D_p(a)` by a column sweep over a block-decomposed envelope: each
/// block keeps the upper and lower convex hulls of `(j, h(j))`, suffix
/// updates rebuild one block and shift the rest lazily, and the monotone
/// slope `i` lets every hull be queried with a forward-only pointer.
/// `O(p^1.5)` time, `O(p)` memory.
pub fn scaled_discrepancy(set: &LatticePointSet) -> ScaledExtremum {
    let p = set.p as usize;
    let pi = set.p as i64;
    let mut env = Envelope::new(p + 1);
    let mut best = ScaledExtremum {
        scaled: i64::MIN,
        i: 0,
        j: 0,
        mode: BoxMode::Closed,
    };
    for i in 0..p {
        let s = i as i64;
        let (low, j_low) = env.min_tilted(s);
        best.offer(-low, i as u64, j_low as u64, BoxMode::Open);
        env.add_suffix(set.ys[i] as usize + 1, pi);
        let (high, j_high) = env.max_tilted(s);
        // j_high = 0 is the empty corner (value i < p) and never wins
        best.offer(high + s, i as u64, j_high.saturating_sub(1) as u64, BoxMode::Closed);
    }
    best
}

// Hull vertices of block `b` live in `upper[b * size..]` / `lower[b * size..]`.
struct Envelope {
    h: Vec<i64>,
    size: usize,
    lazy: Vec<i64>,
    upper: Vec<u32>,
    lower: Vec<u32>,
    up_len: Vec<u32>,
    low_len: Vec<u32>,
    up_ptr: Vec<u32>,
    low_ptr: Vec<u32>,
}

// Slopes are integers in [0, p] and heights in [0, p^2], so products stay in i64
// for every p the exact engine accepts.
#[inline]
fn turn(h: &[i64], o: usize, a: usize, b: usize) -> i64 {
    (a as i64 - o as i64) * (h[b] - h[o]) - (h[a] - h[o]) * (b as i64 - o as i64)
}

impl Envelope {
    fn new(n: usize) -> Self {
        let size = ((n as f64).sqrt() as usize).max(8);
        let blocks = n.div_ceil(size);
        let mut env = Self {
            h: vec![0; n],
            size,
            lazy: vec![0; blocks],
            upper: vec![0; blocks * size],
            lower: vec![0; blocks * size],
            up_len: vec![0; blocks],
            low_len: vec![0; blocks],
            up_ptr: vec![0; blocks],
            low_ptr: vec![0; blocks],
        };
        for b in 0..blocks {
            env.rebuild(b);
        }
        env
    }

    fn rebuild(&mut self, b: usize) {
        let h = &self.h;
        let lo = b * self.size;
        let hi = (lo + self.size).min(h.len());
        let upper = &mut self.upper[lo..lo + self.size];
        let lower = &mut self.lower[lo..lo + self.size];
        let (mut nu, mut nl) = (0usize, 0usize);
        for j in lo..hi {
            while nu >= 2 && turn(h, upper[nu - 2] as usize, upper[nu - 1] as usize, j) >= 0 {
                nu -= 1;
            }
            upper[nu] = j as u32;
            nu += 1;
            while nl >= 2 && turn(h, lower[nl - 2] as usize, lower[nl - 1] as usize, j) <= 0 {
                nl -= 1;
            }
            lower[nl] = j as u32;
            nl += 1;
        }
        self.up_len[b] = nu as u32;
        self.low_len[b] = nl as u32;
        self.up_ptr[b] = nu as u32 - 1;
        self.low_ptr[b] = 0;
    }

    fn add_suffix(&mut self, from: usize, delta: i64) {
        if from >= self.h.len() {
            return;
        }
        let first = from / self.size;
        let hi = ((first + 1) * self.size).min(self.h.len());
        for v in &mut self.h[from..hi] {
            *v += delta;
        }
        self.rebuild(first);
        for l in &mut self.lazy[first + 1..] {
            *l += delta;
        }
    }

    /// `max_j h(j) - s·j`; `s` must not decrease between calls.
    fn max_tilted(&mut self, s: i64) -> (i64, usize) {
        let h = &self.h;
        let mut best = (i64::MIN, 0);
        for b in 0..self.lazy.len() {
            let hull = &self.upper[b * self.size..];
            let val = |k: usize| h[hull[k] as usize] - s * hull[k] as i64;
            let mut k = self.up_ptr[b] as usize;
            let mut cur = val(k);
            while k > 0 {
                let next = val(k - 1);
                if next < cur {
                    break;
                }
                k -= 1;
                cur = next;
            }
            self.up_ptr[b] = k as u32;
            let v = cur + self.lazy[b];
            if v > best.0 {
                best = (v, hull[k] as usize);
            }
        }
        best
    }

    /// `min_j h(j) - s·j`; `s` must not decrease between calls.
    fn min_tilted(&mut self, s: i64) -> (i64, usize) {
        let h = &self.h;
        let mut best = (i64::MAX, 0);
        for b in 0..self.lazy.len() {
            let hull = &self.lower[b * self.size..];
            let len = self.low_len[b] as usize;
            let val = |k: usize| h[hull[k] as usize] - s * hull[k] as i64;
            let mut k = self.low_ptr[b] as usize;
            let mut cur = val(k);
            while k + 1 < len {
                let next = val(k + 1);
                if next > cur {
                    break;
                }
                k += 1;
                cur = next;
            }
            self.low_ptr[b] = k as u32;
            let v = cur + self.lazy[b];
            if v < best.0 {
                best = (v, hull[k] as usize);
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contfrac::expand;

    fn r(n: i64, d: i64) -> Ratio<i64> {
        Ratio::new(n, d)
    }

    #[test]
    fn count_box_examples() {
        let set = LatticePointSet::new(3, 1).unwrap();
        assert_eq!(count_box(&set, r(2, 3), r(2, 3), BoxMode::Closed).unwrap(), 3);
        assert_eq!(count_box(&set, r(0, 1), r(0, 1), BoxMode::Closed).unwrap(), 1);
        assert_eq!(count_box(&set, r(2, 3), r(2, 3), BoxMode::Open).unwrap(), 2);
        assert!(count_box(&set, r(4, 3), r(1, 2), BoxMode::Closed).is_err());
        assert!(count_box(&set, r(-1, 3), r(1, 2), BoxMode::Open).is_err());
    }

    #[test]
    fn point_set_marginals_are_complete() {
        let set = LatticePointSet::new(31, 7).unwrap();
        let mut xs: Vec<u64> = set.points().map(|(x, _)| x).collect();
        let mut ys: Vec<u64> = set.points().map(|(_, y)| y).collect();
        xs.sort_unstable();
        ys.sort_unstable();
        assert_eq!(xs, (0..31).collect::<Vec<_>>());
        assert_eq!(ys, xs);
        assert_eq!(set.points().next(), Some((0, 0)));
    }

    #[test]
    fn discrepancy_small_examples() {
        let d = discrepancy_exact(&LatticePointSet::new(2, 1).unwrap()).unwrap();
        assert_eq!(d.value, r(3, 2));
        assert_eq!(
            d.argmax,
            ExtremalBox {
                gamma1: r(1, 2),
                gamma2: r(1, 2),
                mode: BoxMode::Closed
            }
        );
        let set = LatticePointSet::new(3, 1).unwrap();
        let d = discrepancy_exact(&set).unwrap();
        assert_eq!(d.value, r(5, 3));
        // both [0, 1/3]^2 and [0, 2/3]^2 attain 5/3
        let n = count_box(&set, d.argmax.gamma1, d.argmax.gamma2, d.argmax.mode).unwrap() as i64;
        let volume = d.argmax.gamma1 * d.argmax.gamma2 * r(3, 1);
        assert_eq!((r(n, 1) - volume), r(5, 3));
        assert_eq!(count_box(&set, r(2, 3), r(2, 3), BoxMode::Closed).unwrap(), 3);
    }

    #[test]
    fn sweep_agrees_with_quadratic_scan() {
        for p in crate::modmath::primes_up_to(400) {
            for a in 1..p {
                let set = LatticePointSet::new(p, a).unwrap();
                let fast = scaled_discrepancy(&set);
                let slow = scaled_discrepancy_quadratic(&set);
                assert_eq!(fast.scaled, slow.scaled, "p={p} a={a}");
                // the reported corner must actually attain the value
                let g1 = r(fast.i as i64, p as i64);
                let g2 = r(fast.j as i64, p as i64);
                let n = count_box(&set, g1, g2, fast.mode).unwrap() as i64;
                assert_eq!((p as i64 * n - (fast.i * fast.j) as i64).abs(), fast.scaled);
            }
        }
    }

    #[test]
    fn bound_examples() {
        assert_eq!(discrepancy_bound(&expand(1, 7).unwrap()), 24);
        assert_eq!(discrepancy_bound(&expand(5, 13).unwrap()), 21);
        assert_eq!(discrepancy_bound(&expand(3, 7).unwrap()), 18);
        let d = discrepancy_exact(&LatticePointSet::new(7, 3).unwrap()).unwrap();
        assert!(d.within_cf_bound());
        assert_eq!(d.cf_bound, 18);
    }

    #[test]
    fn size_limit_is_enforced() {
        let set = LatticePointSet::new(101, 3).unwrap();
        assert!(matches!(
            discrepancy_exact_with_limit(&set, 100),
            Err(Error::ModulusTooLarge { p: 101, limit: 100 })
        ));
    }

    #[test]
    fn rejects_bad_generators() {
        assert!(LatticePointSet::new(7, 0).is_err());
        assert!(LatticePointSet::new(7, 7).is_err());
        assert!(LatticePointSet::new(9, 2).is_err());
    }
}
