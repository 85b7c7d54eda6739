//! Closed-form bounds on `#ρ log(C(Q_p))` and the density estimates built from them.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::arith::{is_prime, pow_p};
use crate::error::{Error, Result};
use crate::expectation::BigRational;
use crate::series::delta;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn frac(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// `p^{e}` for a possibly negative exponent.
fn p_pow(p: u64, e: i64) -> BigRational {
    let m = BigRational::from_integer(pow_p(p, e.unsigned_abs() as u32));
    if e >= 0 {
        m
    } else {
        m.recip()
    }
}

/// `Δ_p(d, N) = max Σ_{j≤d} δ(p, n_j)` over `n_j ≥ 0` with `Σ n_j ≤ N`.
pub fn exact_delta(p: u64, d: usize, n: usize) -> Result<usize> {
    if !is_prime(p) || p == 2 {
        return Err(Error::Precondition("exact_delta needs an odd prime".into()));
    }
    let table: Vec<usize> = (0..=n).map(|k| delta(p, k)).collect();
    // best[m] for the disks placed so far, with total budget m.
    let mut best = vec![0usize; n + 1];
    for _ in 0..d {
        let mut next = vec![0usize; n + 1];
        for m in 0..=n {
            next[m] = (0..=m).map(|k| table[k] + best[m - k]).max().expect("nonempty");
        }
        best = next;
    }
    Ok(best[n])
}

/// Whole-curve bound for `d` residue disks.
pub fn curve_image_bound(p: u64, d: u64, g: u64) -> Result<BigRational> {
    if !is_prime(p) {
        return Err(Error::NonPrime(p));
    }
    if d == 0 || g == 0 {
        return Err(Error::Precondition("need d ≥ 1 and g ≥ 1".into()));
    }
    let (d, g) = (d as i64, g as i64);
    if p == 2 {
        return Ok(q(5 * d + 6 * g - 6));
    }
    let p = p as i64;
    Ok(q((p + 1) * d) + frac(p * p - p, p - 2) * q(2 * g - 2))
}

/// Bound on the average size of `ρ log(C(Q_p))`.
pub fn avg_rholog_bound(p: u64, g: u64, refined: bool) -> Result<BigRational> {
    if !is_prime(p) {
        return Err(Error::NonPrime(p));
    }
    if g == 0 {
        return Err(Error::Precondition("need g ≥ 1".into()));
    }
    let g = g as i64;
    let pi = p as i64;
    Ok(match (p, refined) {
        (2, false) => q(6 * g + 9),
        (2, true) => q(3 * g) + frac(9, 2),
        (_, false) => frac(pi * pi - pi, pi - 2) * q(2 * g - 2) + q((pi + 1) * (pi + 1)),
        (_, true) => frac(pi * pi - pi, pi - 2) * q(g - 1) + frac((pi + 1) * (pi + 1), 2),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormulaId {
    /// `1 − (12g + 20)2^{−g}`.
    Main,
    /// `1 − (6g + 11)2^{−g}`.
    MainRefined,
    /// `1 − (1 + (p+1)² + (p²−p)/(p−2)·(2g−2))p^{1−g}`.
    OddPrime,
    /// Same with the refined average.
    OddPrimeRefined,
    /// Excluded density `(1 + #I)p^{1−g}`.
    General,
}

impl FormulaId {
    pub fn name(self) -> &'static str {
        match self {
            FormulaId::Main => "main",
            FormulaId::MainRefined => "main_refined",
            FormulaId::OddPrime => "odd_prime",
            FormulaId::OddPrimeRefined => "odd_prime_refined",
            FormulaId::General => "general_excluded",
        }
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub formula: FormulaId,
    pub p: u64,
    pub g: u64,
    pub image_size: Option<u64>,
    pub value: BigRational,
}

/// Lower bound for the density of `C(Q) = {∞}` given an average image bound `a`.
fn density_from_average(p: u64, g: u64, a: BigRational) -> BigRational {
    BigRational::one() - (BigRational::one() + a) * p_pow(p, 1 - g as i64)
}

pub fn density_main(g: u64) -> BigRational {
    density_from_average(2, g, q(6 * g as i64 + 9))
}

/// Every density bound that applies to `(g, p)`; `image_size` adds the
/// excluded-density bound for a known image of that size.
pub fn density_bounds(g: u64, p: u64, image_size: Option<u64>) -> Result<Vec<BoundReport>> {
    if g < 2 {
        return Err(Error::Precondition("need g > 1".into()));
    }
    if !is_prime(p) {
        return Err(Error::NonPrime(p));
    }
    let mut out = Vec::new();
    let mut push = |formula, value| out.push(BoundReport { formula, p, g, image_size: None, value });
    let (main, refined) = if p == 2 { (FormulaId::Main, FormulaId::MainRefined) } else { (FormulaId::OddPrime, FormulaId::OddPrimeRefined) };
    push(main, density_from_average(p, g, avg_rholog_bound(p, g, false)?));
    push(refined, density_from_average(p, g, avg_rholog_bound(p, g, true)?));
    if let Some(i) = image_size {
        out.push(BoundReport {
            formula: FormulaId::General,
            p,
            g,
            image_size: Some(i),
            value: q(1 + i as i64) * p_pow(p, 1 - g as i64),
        });
    }
    Ok(out)
}

/// `p(2g−2) + (p+1)d + p·Δ`, the sum the whole-curve bound is folded from.
pub fn unfolded_curve_bound(p: u64, d: u64, g: u64, delta_sum: BigRational) -> BigRational {
    let (p, d, g) = (p as i64, d as i64, g as i64);
    q(p * (2 * g - 2) + (p + 1) * d) + q(p) * delta_sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn delta_examples() {
        for p in [3u64, 5, 7] {
            for d in 0..5 {
                assert_eq!(exact_delta(p, d, 0).unwrap(), d * delta(p, 0));
            }
        }
        let best = (0..=2).map(|n| delta(3, n)).max().unwrap();
        assert_eq!(exact_delta(3, 1, 2).unwrap(), best);
        assert!(exact_delta(2, 1, 1).is_err());
    }

    /// Brute force over all compositions with `Σ n_j ≤ N`.
    fn brute(p: u64, d: usize, n: usize) -> usize {
        fn go(p: u64, left: usize, budget: usize) -> usize {
            if left == 0 {
                return 0;
            }
            (0..=budget).map(|k| delta(p, k) + go(p, left - 1, budget - k)).max().unwrap()
        }
        go(p, d, n)
    }

    #[test]
    fn delta_dp_matches_brute_force() {
        for p in [3u64, 5] {
            for d in 0..4 {
                for n in 0..12 {
                    assert_eq!(exact_delta(p, d, n).unwrap(), brute(p, d, n), "p={p} d={d} n={n}");
                }
            }
        }
    }

    #[test]
    fn delta_bound_exhaustive() {
        for p in [3u64, 5, 7] {
            for d in 0..=8 {
                for n in 0..=40 {
                    let v = exact_delta(p, d, n).unwrap();
                    assert!(v * (p as usize - 2) <= n, "p={p} d={d} n={n} Δ={v}");
                }
            }
        }
    }

    #[test]
    fn curve_bound_examples() {
        assert_eq!(curve_image_bound(2, 1, 2).unwrap(), q(11));
        assert_eq!(curve_image_bound(3, 4, 2).unwrap(), q(28));
        assert!(matches!(curve_image_bound(2, 0, 2), Err(Error::Precondition(_))));
    }

    #[test]
    fn curve_bound_folds_from_components() {
        for g in 1..8u64 {
            for d in 1..8u64 {
                // δ(2, n) ≤ 1 + n/2 summed over d disks with Σn ≤ 2g−2.
                let s = q(d as i64) + frac(2 * g as i64 - 2, 2);
                assert_eq!(unfolded_curve_bound(2, d, g, s), curve_image_bound(2, d, g).unwrap());
                for p in [3u64, 5, 7, 11] {
                    let s = frac(2 * g as i64 - 2, p as i64 - 2);
                    assert_eq!(unfolded_curve_bound(p, d, g, s), curve_image_bound(p, d, g).unwrap());
                }
            }
        }
    }

    #[test]
    fn average_examples() {
        assert_eq!(avg_rholog_bound(2, 3, false).unwrap(), q(27));
        assert_eq!(avg_rholog_bound(2, 3, true).unwrap(), frac(27, 2));
        assert_eq!(avg_rholog_bound(3, 2, false).unwrap(), q(28));
    }

    #[test]
    fn density_examples() {
        assert_eq!(density_main(7), frac(3, 16));
        assert_eq!(density_main(10), frac(221, 256));
        for g in 2..=30 {
            assert_eq!(density_main(g) > BigRational::zero(), g >= 7, "g={g}");
        }
        let r = density_bounds(3, 2, Some(1)).unwrap();
        let general = r.iter().find(|b| b.formula == FormulaId::General).unwrap();
        assert_eq!(general.value, frac(1, 2));
        let refined = r.iter().find(|b| b.formula == FormulaId::MainRefined).unwrap();
        assert_eq!(refined.value, BigRational::one() - frac(6 * 3 + 11, 8));
        let odd = density_bounds(4, 3, None).unwrap();
        let want = BigRational::one() - (q(1 + 16) + q(6 * 6)) * frac(1, 27);
        assert_eq!(odd[0].value, want);
    }
}
