//! Executable versions of the counting arguments behind the two existence
//! results for cosets `R = v·U`: the `S(a) = 0` step, the sets `B(c)`, the
//! level function `f_a`, the sums `S_a`, the share `Ω` of `a ∈ R` with small
//! partial quotients, the search for `min Σ b_i`, and the discrepancy ratio.
//!
//! Logarithms are natural unless a field says `log2`.

use std::sync::Arc;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characters::{build_pi, s_count_in};
use crate::contfrac::{expand, quotient_stats};
use crate::error::{Error, Result};
use crate::lattice::{discrepancy_exact_with_limit, LatticePointSet};
use crate::modmath::{mul_mod, nearest_numerator, SubgroupCoset};
use crate::report::ratio_string;

/// `t = 16 ln p`.
pub fn theorem1_threshold(p: u64) -> f64 {
    16.0 * (p as f64).ln()
}

/// `500 ln p ln ln p`.
pub fn theorem2_bound(p: u64) -> f64 {
    let l = (p as f64).ln();
    500.0 * l * l.ln()
}

fn check_unit(v: u64, p: u64) -> Result<()> {
    if v == 0 || v >= p {
        return Err(Error::ResidueOutOfRange {
            value: v as i64,
            max: p - 1,
        });
    }
    Ok(())
}

#[inline]
fn level(p: u64, a: u64, x: u64) -> u64 {
    let m = nearest_numerator(mul_mod(a, x, p) as i128, p);
    p / (x * m)
}

/// `f_a(x)`: the `c` with `(a, x) ∈ B(c) \ B(c+1)`, or 0. Since
/// `‖ax/p‖ = m/p <= 1/(cx)` iff `c <= p/(xm)`, this is `⌊p/(xm)⌋`.
pub fn f_a(p: u64, a: u64, x: u64) -> Result<u64> {
    check_unit(a, p)?;
    check_unit(x, p)?;
    Ok(level(p, a, x))
}

/// `S_a = Σ_{x=1}^{p-1} f_a(x)`.
pub fn s_a(p: u64, a: u64) -> Result<u64> {
    check_unit(a, p)?;
    Ok((1..p).map(|x| level(p, a, x)).sum())
}

/// `#B(c) = #{(a, x) : a ∈ R, 1 <= x < p, ‖ax/p‖ <= 1/(cx)}`.
pub fn count_b(r: &SubgroupCoset, c: u64) -> u64 {
    let p = r.p();
    r.elements()
        .par_iter()
        .map(|&a| (1..p).filter(|&x| level(p, a, x) >= c).count() as u64)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProofStepOutcome {
    pub s_count: u64,
    /// `‖ax/p‖ > 1/(xt)` for every `1 <= x < p`.
    pub inequality_a: bool,
    /// `max b_j < t`.
    pub quotients_below: bool,
}

impl ProofStepOutcome {
    /// `S(a) = 0` implies both conclusions.
    pub fn holds(&self) -> bool {
        self.s_count != 0 || (self.inequality_a && self.quotients_below)
    }

    pub fn vacuous(&self) -> bool {
        self.s_count != 0
    }
}

pub fn theorem1_proofstep_check(p: u64, a: u64, t: f64) -> Result<ProofStepOutcome> {
    if t.is_nan() || t <= 1.0 {
        return Err(Error::Threshold(t));
    }
    check_unit(a, p)?;
    let family = build_pi(p, t)?;
    let s = s_count_in(&family, a);
    // ‖ax/p‖ > 1/(xt)  <=>  x·m > p/t, with p/t the family's own bound
    let inequality_a = (1..p).all(|x| (x * nearest_numerator(mul_mod(a, x, p) as i128, p)) as f64 > family.hyperbola);
    let quotients_below = (expand(a, p)?.max_quotient() as f64) < t;
    Ok(ProofStepOutcome {
        s_count: s,
        inequality_a,
        quotients_below,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaFraction {
    pub threshold: f64,
    /// `#Ω`.
    pub omega: u64,
    /// `#R`.
    pub size: u64,
    #[serde(with = "ratio_string")]
    pub fraction: Ratio<u64>,
    pub fraction_f64: f64,
}

/// Share of `a ∈ R` whose partial quotients are all `< threshold`.
pub fn omega_fraction(r: &SubgroupCoset, threshold: f64) -> OmegaFraction {
    let p = r.p();
    let omega = r
        .elements()
        .par_iter()
        .filter(|&&a| (quotient_stats(a, p).max as f64) < threshold)
        .count() as u64;
    let size = r.len() as u64;
    OmegaFraction {
        threshold,
        omega,
        size,
        fraction: Ratio::new(omega, size),
        fraction_f64: omega as f64 / size as f64,
    }
}

/// `Ω` at `t = 16 ln p`.
pub fn theorem1_fraction(r: &SubgroupCoset) -> OmegaFraction {
    omega_fraction(r, theorem1_threshold(r.p()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Search {
    pub best_a: u64,
    pub best_sum: u64,
    pub best_len: u32,
    pub bound: f64,
    pub within_bound: bool,
}

/// Exhaustive `argmin_{a ∈ R} Σ b_i(a)`, ties to the smallest `a`.
pub fn theorem2_search(r: &SubgroupCoset) -> Result<Theorem2Search> {
    let p = r.p();
    let bound = theorem2_bound(p);
    if bound.is_nan() || bound <= 0.0 {
        return Err(Error::Threshold(bound));
    }
    let (best_sum, best_a, best_len) = r
        .elements()
        .par_iter()
        .map(|&a| {
            let s = quotient_stats(a, p);
            (s.sum, a, s.len)
        })
        .min()
        .expect("cosets are non-empty");
    Ok(Theorem2Search {
        best_a,
        best_sum,
        best_len,
        bound,
        within_bound: (best_sum as f64) <= bound,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryCheck {
    pub p: u64,
    pub a: u64,
    #[serde(with = "ratio_string")]
    pub discrepancy: Ratio<i64>,
    /// `D_p(a) / (ln p ln ln p)`.
    pub ratio: f64,
    pub ratio_log2: f64,
    pub within_bound: bool,
}

pub const COROLLARY_RATIO_LIMIT: f64 = 500.0;

pub fn corollary_check(p: u64, a: u64, exact_limit: u64) -> Result<CorollaryCheck> {
    let set = LatticePointSet::new(p, a)?;
    let d = discrepancy_exact_with_limit(&set, exact_limit)?;
    let scale = |l: f64| l * l.ln();
    let pf = p as f64;
    let ratio = d.value_f64 / scale(pf.ln());
    Ok(CorollaryCheck {
        p,
        a,
        discrepancy: d.value,
        ratio,
        ratio_log2: d.value_f64 / scale(pf.log2()),
        within_bound: ratio <= COROLLARY_RATIO_LIMIT,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisFlags {
    /// `#R >= 10^5 p^{7/8} (ln p)^{3/2}`.
    pub theorem1: bool,
    /// `#R >= 10^8 p^{7/8} (ln p)^{5/2}`.
    pub theorem2: bool,
    pub theorem1_required: f64,
    pub theorem2_required: f64,
}

pub fn hypothesis_check(p: u64, size_r: u64) -> HypothesisFlags {
    let pf = p as f64;
    let base = pf.powf(7.0 / 8.0);
    let l = pf.ln();
    let theorem1_required = 1e5 * base * l.powf(1.5);
    let theorem2_required = 1e8 * base * l.powf(2.5);
    HypothesisFlags {
        theorem1: size_r as f64 >= theorem1_required,
        theorem2: size_r as f64 >= theorem2_required,
        theorem1_required,
        theorem2_required,
    }
}

/// Reference values of the two terms in the upper bound for `Σ_{a∈Ω} S_a`
/// (`190 #R ln p ln ln p` and `8·10^6 p^{7/8} (ln p)^{5/2}`); reported only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProofReference {
    pub main_term: f64,
    pub error_term: f64,
}

pub fn proof_reference(p: u64, size_r: u64) -> ProofReference {
    let pf = p as f64;
    let l = pf.ln();
    ProofReference {
        main_term: 190.0 * size_r as f64 * l * l.ln(),
        error_term: 8e6 * pf.powf(7.0 / 8.0) * l.powf(2.5),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub p: u64,
    pub order: u64,
    pub index: u64,
    pub coset: u64,
    pub threshold: f64,
    pub threshold_log2: f64,
    pub omega: OmegaFraction,
    pub omega_log2: OmegaFraction,
    pub best_a: u64,
    pub best_sum: u64,
    pub t2_bound: f64,
    pub t2_bound_log2: f64,
    pub t2_within_bound: bool,
    pub corollary: Option<CorollaryCheck>,
    pub hypotheses: HypothesisFlags,
    pub proof_reference: ProofReference,
}

/// Full report for a coset; the corollary is computed when `exact_limit` admits `p`.
pub fn theorem_report(r: &SubgroupCoset, exact_limit: Option<u64>) -> Result<TheoremReport> {
    let p = r.p();
    let omega = theorem1_fraction(r);
    let threshold_log2 = 16.0 * (p as f64).log2();
    let omega_log2 = omega_fraction(r, threshold_log2);
    let search = theorem2_search(r)?;
    let l2 = (p as f64).log2();
    let corollary = match exact_limit {
        Some(limit) if p <= limit => Some(corollary_check(p, search.best_a, limit)?),
        _ => None,
    };
    Ok(TheoremReport {
        p,
        order: r.order(),
        index: r.index(),
        coset: r.representative(),
        threshold: omega.threshold,
        threshold_log2,
        omega,
        omega_log2,
        best_a: search.best_a,
        best_sum: search.best_sum,
        t2_bound: search.bound,
        t2_bound_log2: 500.0 * l2 * l2.log2(),
        t2_within_bound: search.within_bound,
        corollary,
        hypotheses: hypothesis_check(p, r.len() as u64),
        proof_reference: proof_reference(p, r.len() as u64),
    })
}

/// Convenience for callers holding only `p` and a subgroup order.
pub fn coset_for(p: u64, order: u64, v: u64) -> Result<SubgroupCoset> {
    let ctx = Arc::new(crate::modmath::PrimeContext::new(p)?);
    SubgroupCoset::subgroup(ctx, order)?.coset(v as i128)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modmath::PrimeContext;

    fn full(p: u64) -> SubgroupCoset {
        SubgroupCoset::full_group(Arc::new(PrimeContext::new(p).unwrap()))
    }

    #[test]
    fn f_a_examples() {
        assert_eq!(f_a(7, 3, 2).unwrap(), 3);
        assert_eq!(f_a(5, 2, 4).unwrap(), 0);
        assert_eq!(f_a(7, 1, 1).unwrap(), 7);
        assert!(f_a(7, 0, 1).is_err());
        assert!(f_a(7, 1, 7).is_err());
    }

    #[test]
    fn s_a_examples() {
        // f = 2, 2, 1, 0 over x = 1..4
        assert_eq!(s_a(5, 2).unwrap(), 5);
        assert!(s_a(5, 2).unwrap() as f64 >= 4.0 - 5.0 * 5f64.ln());
        // m = 1, 2, 3, 3, 2, 1 gives f = 7, 1, 0, 0, 0, 1
        assert_eq!(s_a(7, 1).unwrap(), 9);
    }

    #[test]
    fn count_b_examples() {
        assert_eq!(count_b(&full(7), 7), 2);
        let r = coset_for(7, 3, 3).unwrap();
        assert_eq!(r.elements(), &[3, 5, 6]);
        // levels for a = 3: 2,3,1,0,1,0; a = 5: 3,1,2,1,0,0; a = 6: 7,1,0,0,0,1
        assert_eq!(count_b(&r, 1), 11);
        assert_eq!(count_b(&r, 3), 3);
        assert!(count_b(&r, 2) <= count_b(&r, 1));
    }

    #[test]
    fn proofstep_examples() {
        let t = 16.0 * 101f64.ln();
        let o = theorem1_proofstep_check(101, 50, t).unwrap();
        assert_eq!(o.s_count, 0);
        assert!(o.inequality_a && o.quotients_below && o.holds());
        let o = theorem1_proofstep_check(101, 1, t).unwrap();
        assert!(o.vacuous() && o.holds());
        assert!(theorem1_proofstep_check(101, 1, 1.0).is_err());
    }

    #[test]
    fn omega_examples() {
        let o = theorem1_fraction(&full(7));
        assert_eq!(o.fraction, Ratio::new(1, 1));
        let trivial = SubgroupCoset::subgroup(Arc::new(PrimeContext::new(89).unwrap()), 1).unwrap();
        let o = theorem1_fraction(&trivial);
        assert_eq!(o.omega, 0);
        assert_eq!(o.fraction_f64, 0.0);
    }

    #[test]
    fn search_examples() {
        let r = coset_for(13, 4, 1).unwrap();
        let s = theorem2_search(&r).unwrap();
        assert_eq!((s.best_a, s.best_sum), (5, 6));
        assert!(s.within_bound);
        let s = theorem2_search(&full(101)).unwrap();
        assert!(s.best_sum >= 1 && s.best_sum as f64 <= theorem2_bound(101));
        assert!((theorem2_bound(101) - 3530.0).abs() < 1.0);
    }

    #[test]
    fn corollary_examples() {
        let c = corollary_check(17, 1, 20_000).unwrap();
        let floor = 1.0 / (17f64.ln() * 17f64.ln().ln());
        assert!(c.ratio >= floor);
        assert!((floor - 0.34).abs() < 0.01);
        assert!(corollary_check(101, 3, 100).is_err());
    }

    #[test]
    fn hypothesis_examples() {
        let h = hypothesis_check(101, 100);
        assert!(!h.theorem1 && !h.theorem2);
        let h = hypothesis_check(3, 2);
        assert!(!h.theorem1 && !h.theorem2);
        assert!(h.theorem2_required > h.theorem1_required);
    }

    #[test]
    fn report_for_small_coset() {
        let r = coset_for(13, 4, 1).unwrap();
        let rep = theorem_report(&r, Some(20_000)).unwrap();
        assert_eq!((rep.order, rep.index, rep.coset), (4, 3, 1));
        assert_eq!(rep.best_a, 5);
        assert!(rep.corollary.is_some());
        assert!(!rep.hypotheses.theorem1);
        let rep = theorem_report(&r, None).unwrap();
        assert!(rep.corollary.is_none());
    }
}
