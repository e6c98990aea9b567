//! Exact residue arithmetic modulo an odd prime.
//!
//! [`PrimeContext`] fixes the modulus, its least primitive root and a dense
//! discrete-log table, so that every character evaluation downstream is a
//! single lookup. [`SubgroupCoset`] holds a multiplicative subgroup `U` of
//! order `m` or one of its cosets `v·U`.

use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the modulus for which a discrete-log table is built.
pub const DEFAULT_DLOG_LIMIT: u64 = 2_000_000;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Reduces any integer into `[0, p)`.
#[inline]
pub fn reduce(z: i128, p: u64) -> u64 {
    z.rem_euclid(p as i128) as u64
}

/// Deterministic Miller-Rabin; the first twelve prime bases are a proven
/// witness set for every `n < 2^64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &b in &BASES {
        let mut x = pow_mod(b, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Sieve of Eratosthenes: all primes `<= n` in increasing order.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Primes in the closed range `[lo, hi]`, increasing.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    primes_up_to(hi).into_iter().filter(|&q| q >= lo).collect()
}

/// Distinct prime factors of `n`, increasing.
pub fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// All positive divisors of `n`, increasing.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// An odd prime `p` with its least primitive root and a full discrete-log table.
#[derive(Debug, Clone)]
pub struct PrimeContext {
    p: u64,
    g: u64,
    // dlog[x - 1] = k with g^k = x
    dlog: Vec<u32>,
    // powers[k] = g^k
    powers: Vec<u32>,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        Self::with_limit(p, DEFAULT_DLOG_LIMIT)
    }

    pub fn with_limit(p: u64, limit: u64) -> Result<Self> {
        if p == 2 || (p > 2 && p.is_multiple_of(2)) {
            return Err(Error::EvenModulus(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p > limit || p > u32::MAX as u64 {
            return Err(Error::ModulusTooLarge { p, limit });
        }
        let g = least_primitive_root(p);
        let n = (p - 1) as usize;
        let mut dlog = vec![0u32; n];
        let mut powers = vec![0u32; n];
        let mut x = 1u64;
        for (k, slot) in powers.iter_mut().enumerate() {
            *slot = x as u32;
            dlog[(x - 1) as usize] = k as u32;
            x = mul_mod(x, g, p);
        }
        Ok(Self { p, g, dlog, powers })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Least primitive root.
    pub fn generator(&self) -> u64 {
        self.g
    }

    /// Order of the multiplicative group, `p - 1`.
    pub fn group_order(&self) -> u64 {
        self.p - 1
    }

    /// Discrete log of `x` to base `g`, or `None` when `x ≡ 0`.
    #[inline]
    pub fn dlog(&self, x: i128) -> Option<u32> {
        let r = reduce(x, self.p);
        if r == 0 {
            None
        } else {
            Some(self.dlog[(r - 1) as usize])
        }
    }

    /// `g^k mod p`, with `k` taken modulo `p - 1`.
    #[inline]
    pub fn pow_g(&self, k: u64) -> u64 {
        self.powers[(k % (self.p - 1)) as usize] as u64
    }

    #[inline]
    pub fn reduce(&self, z: i128) -> u64 {
        reduce(z, self.p)
    }

    pub fn mod_inverse(&self, y: i128) -> Result<u64> {
        mod_inverse(y, self)
    }

    pub fn nearest_int_distance(&self, z: i128) -> NearestIntDistance {
        nearest_int_distance(z, self)
    }
}

fn least_primitive_root(p: u64) -> u64 {
    let n = p - 1;
    let factors = distinct_prime_factors(n);
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow_mod(g, n / q, p) != 1))
        .unwrap_or(1) // p = 3 gives g = 2 above; only p = 2 would fall through
}

/// Inverse of `y` modulo `p` by the extended Euclidean algorithm.
pub fn mod_inverse(y: i128, ctx: &PrimeContext) -> Result<u64> {
    let p = ctx.p as i128;
    let r = y.rem_euclid(p);
    if r == 0 {
        return Err(Error::NotInvertible {
            value: y as i64,
            p: ctx.p,
        });
    }
    let (mut old_r, mut cur_r) = (r, p);
    let (mut old_s, mut cur_s) = (1i128, 0i128);
    while cur_r != 0 {
        let q = old_r / cur_r;
        (old_r, cur_r) = (cur_r, old_r - q * cur_r);
        (old_s, cur_s) = (cur_s, old_s - q * cur_s);
    }
    debug_assert_eq!(old_r, 1);
    Ok(old_s.rem_euclid(p) as u64)
}

/// `‖z/p‖` held exactly as `numerator / p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NearestIntDistance {
    pub numerator: u64,
    pub p: u64,
}

impl NearestIntDistance {
    pub fn to_f64(self) -> f64 {
        self.numerator as f64 / self.p as f64
    }

    pub fn as_ratio(self) -> Ratio<i128> {
        Ratio::new(self.numerator as i128, self.p as i128)
    }
}

/// Numerator of `‖z/p‖`, i.e. `min(z mod p, p - z mod p)`.
#[inline]
pub fn nearest_numerator(z: i128, p: u64) -> u64 {
    let r = reduce(z, p);
    r.min(p - r)
}

pub fn nearest_int_distance(z: i128, ctx: &PrimeContext) -> NearestIntDistance {
    NearestIntDistance {
        numerator: nearest_numerator(z, ctx.p),
        p: ctx.p,
    }
}

/// A coset `R = v·U` of the subgroup `U` of order `m` in `Z_p^*`.
#[derive(Debug, Clone)]
pub struct SubgroupCoset {
    ctx: Arc<PrimeContext>,
    order: u64,
    v: u64,
    elements: Vec<u64>,
}

impl SubgroupCoset {
    /// The unique subgroup of order `m`, i.e. the powers of `g^((p-1)/m)`.
    pub fn subgroup(ctx: Arc<PrimeContext>, m: u64) -> Result<Self> {
        let n = ctx.group_order();
        if m == 0 || !n.is_multiple_of(m) {
            return Err(Error::OrderNotDivisor {
                order: m,
                group_order: n,
            });
        }
        let d = n / m;
        let mut elements: Vec<u64> = (0..m).map(|t| ctx.pow_g(d * t)).collect();
        elements.sort_unstable();
        Ok(Self {
            ctx,
            order: m,
            v: 1,
            elements,
        })
    }

    /// The whole group `Z_p^*`.
    pub fn full_group(ctx: Arc<PrimeContext>) -> Self {
        let m = ctx.group_order();
        Self::subgroup(ctx, m).expect("p - 1 divides itself")
    }

    /// `v·R`; on a subgroup this is the coset `v·U`.
    pub fn coset(&self, v: i128) -> Result<Self> {
        let p = self.ctx.p;
        let r = reduce(v, p);
        if r == 0 {
            return Err(Error::ResidueOutOfRange {
                value: v as i64,
                max: p - 1,
            });
        }
        let mut elements: Vec<u64> = self.elements.iter().map(|&u| mul_mod(r, u, p)).collect();
        elements.sort_unstable();
        Ok(Self {
            ctx: Arc::clone(&self.ctx),
            order: self.order,
            v: mul_mod(r, self.v, p),
            elements,
        })
    }

    pub fn context(&self) -> &Arc<PrimeContext> {
        &self.ctx
    }

    pub fn p(&self) -> u64 {
        self.ctx.p
    }

    /// `#R`.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Index `(p - 1) / m` of the subgroup.
    pub fn index(&self) -> u64 {
        self.ctx.group_order() / self.order
    }

    /// Coset representative.
    pub fn representative(&self) -> u64 {
        self.v
    }

    /// Sorted residues of `R`.
    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elements.binary_search(&x).is_ok()
    }
}
