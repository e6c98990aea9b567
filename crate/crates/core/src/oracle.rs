//! Brute-force reference implementations.
//!
//! Nothing here calls the optimized code paths it is compared against: the
//! discrepancy oracle enumerates every corner with exact rationals, `f_a` is
//! found by scanning `c`, and `S(a)` is counted pair by pair with inverses
//! found by search. Speed is irrelevant; each function caps its input size.

use num_rational::Ratio;

use crate::characters::RectangleFamily;
use crate::error::{Error, Result};

pub const DISCREPANCY_LIMIT: u64 = 200;
pub const F_A_LIMIT: u64 = 500;
pub const PI_LIMIT: u64 = 2000;
pub const S_COUNT_LIMIT: u64 = 300;

fn limit(p: u64, max: u64) -> Result<()> {
    if p > max {
        Err(Error::ModulusTooLarge { p, limit: max })
    } else {
        Ok(())
    }
}

/// `sup |N - γ1 γ2 p|` over every corner `γ ∈ {0, 1/p, ..., 1}^2`, closed and open.
pub fn oracle_discrepancy(p: u64, a: u64) -> Result<Ratio<i64>> {
    limit(p, DISCREPANCY_LIMIT)?;
    let p = p as i64;
    let pts: Vec<(Ratio<i64>, Ratio<i64>)> = (0..p)
        .map(|x| (Ratio::new(x, p), Ratio::new((a as i64 * x) % p, p)))
        .collect();
    let mut best = Ratio::from_integer(0);
    for i in 0..=p {
        for j in 0..=p {
            let g1 = Ratio::new(i, p);
            let g2 = Ratio::new(j, p);
            let closed = pts
                .iter()
                .filter(|(x, y)| *x <= g1 && *y <= g2)
                .count() as i64;
            let open = pts
                .iter()
                .filter(|(x, y)| *x < g1 && *y < g2)
                .count() as i64;
            let volume = g1 * g2 * Ratio::from_integer(p);
            for n in [closed, open] {
                let diff = Ratio::from_integer(n) - volume;
                let dev = if diff < Ratio::from_integer(0) { -diff } else { diff };
                if dev > best {
                    best = dev;
                }
            }
        }
    }
    Ok(best)
}

/// Largest `c` with `‖ax/p‖ <= 1/(cx)` (exact rationals), else 0.
pub fn oracle_f_a(p: u64, a: u64, x: u64) -> Result<u64> {
    limit(p, F_A_LIMIT)?;
    let (p, a, x) = (p as i64, a as i64, x as i64);
    let frac = Ratio::new((a * x) % p, p);
    let dist = frac.min(Ratio::from_integer(1) - frac);
    let in_b = |c: i64| dist <= Ratio::new(1, c * x);
    // membership shrinks as c grows, so scan up to the first failure
    let mut c = 0;
    while c < p && in_b(c + 1) {
        c += 1;
    }
    Ok(c as u64)
}

/// `{(x, y) ∈ [1, p-1]^2 : xy <= p/c}`.
pub fn oracle_pi_membership(p: u64, c: f64) -> Result<Vec<(u64, u64)>> {
    limit(p, PI_LIMIT)?;
    let h = p as f64 / c;
    let mut out = Vec::new();
    for x in 1..p {
        for y in 1..p {
            if ((x * y) as f64) <= h {
                out.push((x, y));
            }
        }
    }
    Ok(out)
}

/// For every `(x, y) ∈ [1, p-1]^2`, how many rectangles of the family contain it
/// (row-major, `(x - 1) * (p - 1) + (y - 1)`).
pub fn oracle_rectangle_multiplicity(family: &RectangleFamily) -> Result<Vec<u8>> {
    let p = family.p;
    limit(p, PI_LIMIT)?;
    let n = (p - 1) as usize;
    let mut counts = vec![0u8; n * n];
    for r in &family.rects {
        for x in r.columns.0..=r.columns.1.min(p - 1) {
            for y in r.rows.0..=r.rows.1.min(p - 1) {
                counts[(x as usize - 1) * n + (y as usize - 1)] += 1;
            }
        }
    }
    Ok(counts)
}

/// Pairs `(x, y)`, `x ∈ [1, 2p]`, `0 < |y| <= 2p`, `(x, |y|) ∈ Π^t`, with
/// `δ_p(a x y* - 1) = 1`, where `y*` is found by search.
pub fn oracle_s_count(family: &RectangleFamily, a: u64) -> Result<u64> {
    let p = family.p;
    limit(p, S_COUNT_LIMIT)?;
    let p = p as i64;
    let inverse = |y: i64| (1..p).find(|&z| (y.rem_euclid(p) * z) % p == 1);
    let mut total = 0;
    for x in 1..=2 * p {
        for y in -2 * p..=2 * p {
            if y == 0 || !family.contains(x as u64, y.unsigned_abs()) {
                continue;
            }
            if let Some(ys) = inverse(y) {
                if (a as i64 * x % p * ys - 1).rem_euclid(p) == 0 {
                    total += 1;
                }
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::build_pi;

    #[test]
    fn discrepancy_oracle_examples() {
        assert_eq!(oracle_discrepancy(2, 1).unwrap(), Ratio::new(3, 2));
        assert_eq!(oracle_discrepancy(3, 1).unwrap(), Ratio::new(5, 3));
        for a in 1..7 {
            assert!(oracle_discrepancy(7, a).unwrap() >= Ratio::from_integer(1));
        }
        assert!(oracle_discrepancy(211, 1).is_err());
    }

    #[test]
    fn f_a_oracle_examples() {
        assert_eq!(oracle_f_a(7, 3, 2).unwrap(), 3);
        assert_eq!(oracle_f_a(5, 2, 4).unwrap(), 0);
        assert_eq!(oracle_f_a(7, 1, 1).unwrap(), 7);
        let s: u64 = (1..5).map(|x| oracle_f_a(5, 2, x).unwrap()).sum();
        assert_eq!(s, 5);
    }

    #[test]
    fn pi_membership_examples() {
        assert_eq!(oracle_pi_membership(101, 16.0 * 101f64.ln()).unwrap(), vec![(1, 1)]);
        assert_eq!(oracle_pi_membership(7, 7.0).unwrap(), vec![(1, 1)]);
        let all = oracle_pi_membership(7, 1.0).unwrap();
        assert!(all.iter().all(|&(x, y)| x * y <= 7));
        assert_eq!(all.len(), 14);
    }

    #[test]
    fn s_count_oracle_examples() {
        let fam = build_pi(101, 16.0 * 101f64.ln()).unwrap();
        assert_eq!(oracle_s_count(&fam, 1).unwrap(), 1);
        assert_eq!(oracle_s_count(&fam, 50).unwrap(), 0);
    }
}
