//! Exact big-integer binomial coefficients and the sparse-overlap counts
//! `b(n, s, r) = C(s-1, r-1) · C(n-s, s-r)`.

use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Exact binomial coefficient `C(n, k)`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Counts of s-sparse supports (containing a fixed index) sharing exactly `r`
/// non-zero positions with a fixed one, for r = 1..=s.
#[derive(Clone, Debug)]
pub struct OverlapCounts {
    pub n: u64,
    pub s: u64,
    /// `b(n, s, r)` for r = 1..=s.
    pub counts: Vec<BigUint>,
}

impl OverlapCounts {
    pub fn new(n: u64, s: u64) -> Result<Self> {
        if s < 1 || 2 * s > n {
            return Err(Error::ParameterDomain(format!(
                "overlap counts need 1 <= s <= n/2, got n={n}, s={s}"
            )));
        }
        let counts = (1..=s)
            .map(|r| binomial(s - 1, r - 1) * binomial(n - s, s - r))
            .collect();
        Ok(OverlapCounts { n, s, counts })
    }

    /// Total number of supports, which must equal `C(n-1, s-1)`.
    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// Consistency check `Σ_r b(n,s,r) = C(n-1, s-1)`.
    pub fn verify_total(&self) -> bool {
        self.total() == binomial(self.n - 1, self.s - 1)
    }

    pub fn counts_f64(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::INFINITY))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_binomials() {
        assert_eq!(binomial(9, 1), BigUint::from(9u32));
        assert_eq!(binomial(10, 5), BigUint::from(252u32));
        assert_eq!(binomial(4, 7), BigUint::zero());
    }

    #[test]
    fn overlap_counts_match_direct_enumeration() {
        // enumerate 2-sparse supports of {0..9} containing index 0
        let n = 10usize;
        let fixed = [0usize, 1];
        let mut by_overlap = [0u64; 3];
        for a in 0..n {
            for b in (a + 1)..n {
                if a != 0 && b != 0 {
                    continue;
                }
                let overlap = [a, b].iter().filter(|i| fixed.contains(i)).count();
                by_overlap[overlap] += 1;
            }
        }
        let oc = OverlapCounts::new(10, 2).unwrap();
        assert_eq!(oc.counts[0], BigUint::from(by_overlap[1]));
        assert_eq!(oc.counts[1], BigUint::from(by_overlap[2]));
        assert_eq!(oc.counts[0], BigUint::from(8u32));
        assert_eq!(oc.counts[1], BigUint::from(1u32));
        assert!(oc.verify_total());
    }

    #[test]
    fn totals_hold_for_large_n() {
        for &(n, s) in &[(1_000_000u64, 3u64), (10_000, 5), (2500, 5)] {
            assert!(OverlapCounts::new(n, s).unwrap().verify_total());
        }
    }

    #[test]
    fn rejects_oversparse_input() {
        assert!(OverlapCounts::new(10, 6).is_err());
        assert!(OverlapCounts::new(10, 0).is_err());
    }
}
