//! Weierstrass preparation for series converging on `Z_p`.
//!
//! After dividing out the content `p^c`, a series `A` whose last
//! minimum-valuation coefficient sits at index `N` factors as `A = f·u` with
//! `f` a polynomial of degree `N` (unit leading coefficient) and
//! `u ∈ 1 + p·t·Z_p[[t]]`. The factorization is computed modulo `p^M` by
//! linear Hensel lifting on polynomials over `Z/p^M`.

use alloc::format;
use alloc::vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::series::{SeriesVector, TruncatedSeries, UpperEnd};
use crate::zpoly::ZpPoly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeierstrassFactorization {
    /// `v_p` of the input's content; the input equals `p^content · f · u`.
    pub content: i64,
    /// `N_L`.
    pub degree: usize,
    pub poly_part: ZpPoly,
    pub unit_part: ZpPoly,
    pub modulus_p: u32,
    pub modulus_t: usize,
}

impl WeierstrassFactorization {
    /// `f·u` modulo `p^M`.
    pub fn reconstruct(&self) -> ZpPoly {
        self.poly_part.mul(&self.unit_part)
    }
}

/// The content-normalized input as a polynomial modulo `p^m`, with `(c, N)`.
pub(crate) fn normalized_input(l: &TruncatedSeries, m: u32, t: usize) -> Result<(ZpPoly, i64, usize)> {
    if t > l.len() {
        return Err(Error::InsufficientTruncation(l.len()));
    }
    let l = l.truncate(t);
    let np = SeriesVector::new(vec![l.clone()])?.newton_polygon()?;
    let big_n = match np.n_and_big_n() {
        Ok((_, UpperEnd::Bounded(n))) => n,
        Ok((_, UpperEnd::UnboundedWithinTruncation)) | Err(Error::MinimumNotAttained) => {
            return Err(Error::NUndefined)
        }
        Err(e) => return Err(e),
    };
    let c = np.min_height();
    let tail_ok = l.bound_from(t).is_some_and(|b| b - c >= m as i64);
    if !tail_ok {
        return Err(Error::InsufficientTruncation(t));
    }
    let mut coeffs = vec![BigInt::zero(); t];
    for (i, a) in l.coeffs().iter().enumerate() {
        if a.is_exact_zero() {
            continue;
        }
        if a.abs_prec() - c < m as i64 {
            return Err(Error::InsufficientPrecision(format!(
                "coefficient {i} known mod p^{}, need p^{}",
                a.abs_prec(),
                c + m as i64
            )));
        }
        coeffs[i] = a.shift(-c).residue(m)?;
    }
    Ok((ZpPoly::new(l.prime(), coeffs, Some(m)), c, big_n))
}

/// Factors `L = p^c · f · u` modulo `(p^M, t^T)`.
pub fn weierstrass_prepare(l: &TruncatedSeries, m: u32, t: usize) -> Result<WeierstrassFactorization> {
    if m == 0 {
        return Err(Error::Precondition("modulus exponent must be positive".into()));
    }
    let (a, c, big_n) = normalized_input(l, m, t)?;
    let p = l.prime();
    let mut f = ZpPoly::new(p, a.coeffs().iter().take(big_n + 1).cloned().collect(), Some(m));
    let mut u = ZpPoly::new(p, vec![BigInt::one()], Some(m));
    // Each step gains at least one factor of p in the residual.
    let cap = m as usize + 2;
    for _ in 0..cap {
        let r = a.sub(&f.mul(&u));
        if r.is_zero() {
            return Ok(WeierstrassFactorization {
                content: c,
                degree: big_n,
                poly_part: f,
                unit_part: u,
                modulus_p: m,
                modulus_t: t,
            });
        }
        let (q, rem) = r.divrem(&f);
        let q0 = ZpPoly::new(p, vec![q.coeff(0)], Some(m));
        u = u.add(&q.sub(&q0));
        f = f.add(&rem).add(&f.mul(&q0));
    }
    Err(Error::PrecisionExhausted(cap))
}
