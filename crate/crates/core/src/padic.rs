//! Finite-precision elements of `Q_p`.
//!
//! A [`Padic`] is either `p^v · u + O(p^N)` with `u` a unit reduced modulo
//! `p^(N−v)`, or zero to absolute precision `N`. Precision propagates
//! pessimistically: sums keep the smaller absolute precision, products and
//! quotients keep the smaller relative precision.

use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use alloc::string::ToString;
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{self, pow_p, pow_p_u};
use crate::error::{Error, Result};

/// Absolute precision of an exact zero.
pub const EXACT: i64 = i64::MAX / 4;

fn clamp(prec: i64) -> i64 {
    prec.min(EXACT)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Padic {
    p: u64,
    abs_prec: i64,
    /// `None` when zero to precision.
    val: Option<i64>,
    unit: BigUint,
}

impl Padic {
    /// `num/den` to absolute precision `abs_prec`.
    pub fn new(p: u64, num: &BigInt, den: &BigInt, abs_prec: i64) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(Self::zero(p, abs_prec));
        }
        let (vn, un) = arith::split_p(num, p);
        let (vd, ud) = arith::split_p(den, p);
        let v = vn as i64 - vd as i64;
        if v >= abs_prec {
            return Ok(Self::zero(p, abs_prec));
        }
        let rel = (abs_prec - v) as u32;
        let m = pow_p(p, rel);
        let inv = arith::inv_mod(&ud, &m).expect("unit denominator is invertible");
        let u = (un * inv).mod_floor(&m);
        Ok(Padic {
            p,
            abs_prec,
            val: Some(v),
            unit: u.to_biguint().expect("residue"),
        })
    }

    pub fn from_int(p: u64, n: i64, abs_prec: i64) -> Self {
        Self::from_bigint(p, &BigInt::from(n), abs_prec)
    }

    pub fn from_bigint(p: u64, n: &BigInt, abs_prec: i64) -> Self {
        Self::normalize(p, 0, n.clone(), abs_prec)
    }

    pub fn zero(p: u64, abs_prec: i64) -> Self {
        Padic {
            p,
            abs_prec: clamp(abs_prec),
            val: None,
            unit: BigUint::zero(),
        }
    }

    /// A structural zero: absorbs precision in sums and products.
    pub fn exact_zero(p: u64) -> Self {
        Self::zero(p, EXACT)
    }

    pub fn one(p: u64, abs_prec: i64) -> Self {
        Self::from_int(p, 1, abs_prec)
    }

    /// `p^val · u` known modulo `p^abs_prec`, where `u` need not be a unit.
    pub(crate) fn normalize(p: u64, val: i64, u: BigInt, abs_prec: i64) -> Self {
        let abs_prec = clamp(abs_prec);
        if u.is_zero() {
            return Self::zero(p, abs_prec);
        }
        let (k, u) = arith::split_p(&u, p);
        let v = val + k as i64;
        if v >= abs_prec {
            return Self::zero(p, abs_prec);
        }
        debug_assert!(abs_prec < EXACT, "nonzero values cannot be exact");
        let rel = (abs_prec - v) as u32;
        let m = pow_p(p, rel);
        let u = u.mod_floor(&m);
        Padic {
            p,
            abs_prec,
            val: Some(v),
            unit: u.to_biguint().expect("residue"),
        }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn abs_prec(&self) -> i64 {
        self.abs_prec
    }

    pub fn is_exact_zero(&self) -> bool {
        self.val.is_none() && self.abs_prec >= EXACT
    }

    /// Zero to the stored precision.
    pub fn is_zero(&self) -> bool {
        self.val.is_none()
    }

    pub fn valuation(&self) -> Option<i64> {
        self.val
    }

    /// Lower bound on the true valuation: the valuation, or the precision for zero.
    pub fn valuation_lower_bound(&self) -> i64 {
        self.val.unwrap_or(self.abs_prec)
    }

    /// Relative precision `N − v`; `None` for zero.
    pub fn rel_prec(&self) -> Option<i64> {
        self.val.map(|v| self.abs_prec - v)
    }

    pub fn unit(&self) -> &BigUint {
        &self.unit
    }

    pub fn is_integral(&self) -> bool {
        self.val.map_or(self.abs_prec >= 0, |v| v >= 0)
    }

    pub fn is_unit(&self) -> bool {
        self.val == Some(0)
    }

    /// Integer representative `p^v · u` of an integral element.
    pub fn to_bigint(&self) -> Option<BigInt> {
        match self.val {
            None => Some(BigInt::zero()),
            Some(v) if v >= 0 => Some(pow_p(self.p, v as u32) * BigInt::from_biguint(Sign::Plus, self.unit.clone())),
            _ => None,
        }
    }

    /// Value modulo `p^k`; needs an integral element known to at least `p^k`.
    pub fn residue(&self, k: u32) -> Result<BigInt> {
        if self.abs_prec < k as i64 {
            return Err(Error::InsufficientPrecision(alloc::format!(
                "need the value mod p^{k}, known mod p^{}",
                self.abs_prec
            )));
        }
        let n = self.to_bigint().ok_or_else(|| {
            Error::InsufficientPrecision("residue of a non-integral element".to_string())
        })?;
        Ok(n.mod_floor(&pow_p(self.p, k)))
    }

    pub fn with_abs_prec(&self, abs_prec: i64) -> Self {
        if abs_prec >= self.abs_prec {
            return self.clone();
        }
        match self.val {
            None => Self::zero(self.p, abs_prec),
            Some(v) => Self::normalize(self.p, v, BigInt::from_biguint(Sign::Plus, self.unit.clone()), abs_prec),
        }
    }

    /// Multiplication by `p^k` (exact, shifts precision with the value).
    pub fn shift(&self, k: i64) -> Self {
        match self.val {
            None => Self::zero(self.p, clamp(self.abs_prec.saturating_add(k))),
            Some(v) => Padic {
                p: self.p,
                abs_prec: self.abs_prec + k,
                val: Some(v + k),
                unit: self.unit.clone(),
            },
        }
    }

    fn check_prime(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        Ok(())
    }

    fn signed_unit(&self) -> BigInt {
        BigInt::from_biguint(Sign::Plus, self.unit.clone())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        let n = self.abs_prec.min(other.abs_prec);
        let terms: alloc::vec::Vec<(i64, BigInt)> = [self, other]
            .iter()
            .filter_map(|x| x.val.map(|v| (v, x.signed_unit())))
            .filter(|(v, _)| *v < n)
            .collect();
        let Some(m) = terms.iter().map(|(v, _)| *v).min() else {
            return Ok(Self::zero(self.p, n));
        };
        let sum: BigInt = terms
            .into_iter()
            .map(|(v, u)| pow_p(self.p, (v - m) as u32) * u)
            .sum();
        Ok(Self::normalize(self.p, m, sum, n))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        Ok(match (self.val, other.val) {
            (None, None) => Self::zero(self.p, clamp(self.abs_prec.saturating_add(other.abs_prec))),
            (None, Some(vb)) => Self::zero(self.p, clamp(self.abs_prec.saturating_add(vb))),
            (Some(va), None) => Self::zero(self.p, clamp(other.abs_prec.saturating_add(va))),
            (Some(va), Some(vb)) => {
                let rel = (self.abs_prec - va).min(other.abs_prec - vb);
                let m = pow_p_u(self.p, rel as u32);
                let u = (&self.unit * &other.unit) % m;
                Padic {
                    p: self.p,
                    abs_prec: va + vb + rel,
                    val: Some(va + vb),
                    unit: u,
                }
            }
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        let Some(vb) = other.val else {
            return Err(Error::DivisionByZeroToPrecision);
        };
        Ok(match self.val {
            None => Self::zero(self.p, clamp(self.abs_prec.saturating_sub(vb))),
            Some(va) => {
                let rel = (self.abs_prec - va).min(other.abs_prec - vb);
                let m = pow_p(self.p, rel as u32);
                let inv = arith::inv_mod(&other.signed_unit(), &m).expect("unit");
                let u = (self.signed_unit() * inv).mod_floor(&m);
                Padic {
                    p: self.p,
                    abs_prec: va - vb + rel,
                    val: Some(va - vb),
                    unit: u.to_biguint().expect("residue"),
                }
            }
        })
    }

    pub fn inverse(&self) -> Result<Self> {
        let one = Self::one(self.p, self.rel_prec().unwrap_or(1) + 1);
        one.checked_div(self)
    }

    fn neg_ref(&self) -> Self {
        match self.val {
            None => self.clone(),
            Some(v) => {
                let m = pow_p_u(self.p, (self.abs_prec - v) as u32);
                Padic {
                    p: self.p,
                    abs_prec: self.abs_prec,
                    val: Some(v),
                    unit: m - &self.unit,
                }
            }
        }
    }

    /// The canonical square root: for odd `p` the root whose unit reduces
    /// into `1..=(p−1)/2`, for `p = 2` the root `≡ 1 (mod 4)`.
    pub fn sqrt(&self) -> Result<Self> {
        let Some(v) = self.val else {
            return Err(Error::InsufficientPrecision("square root of zero-to-precision".to_string()));
        };
        if v.rem_euclid(2) != 0 {
            return Err(Error::OddValuation(v));
        }
        let rel = self.abs_prec - v;
        let p = self.p;
        if p == 2 {
            if rel < 3 {
                return Err(Error::InsufficientPrecision("2-adic unit known mod less than 8".to_string()));
            }
            let u = BigInt::from_biguint(Sign::Plus, self.unit.clone());
            if arith::small_mod(&u, 8) != 1 {
                return Err(Error::NotASquare);
            }
            // r² ≡ u (mod 2^k) for k ≥ 3 lifts by adjusting bit k−1.
            let mut r = BigInt::one();
            for k in 3..rel as u32 {
                let m = pow_p(2, k + 1);
                if (&r * &r - &u).mod_floor(&m) != BigInt::zero() {
                    r += pow_p(2, k - 1);
                }
            }
            let out_rel = (rel - 1) as u32;
            let m = pow_p(2, out_rel);
            let mut r = r.mod_floor(&m);
            if arith::small_mod(&r, 4) == 3 {
                r = (-r).mod_floor(&m);
            }
            return Ok(Padic {
                p,
                abs_prec: v / 2 + out_rel as i64,
                val: Some(v / 2),
                unit: r.to_biguint().expect("residue"),
            });
        }
        let u = BigInt::from_biguint(Sign::Plus, self.unit.clone());
        let u0 = arith::small_mod(&u, p);
        let r0 = arith::sqrt_mod_prime(u0, p).ok_or(Error::NotASquare)?;
        let mut r = BigInt::from(r0);
        let mut k = 1u32;
        while (k as i64) < rel {
            k = (2 * k).min(rel as u32);
            let m = pow_p(p, k);
            let f = (&r * &r - &u).mod_floor(&m);
            let inv = arith::inv_mod(&(BigInt::from(2) * &r), &m).expect("2r is a unit");
            r = (&r - f * inv).mod_floor(&m);
        }
        let m = pow_p(p, rel as u32);
        if arith::small_mod(&r, p) > (p - 1) / 2 {
            r = (-r).mod_floor(&m);
        }
        Ok(Padic {
            p,
            abs_prec: v / 2 + rel,
            val: Some(v / 2),
            unit: r.to_biguint().expect("residue"),
        })
    }

    /// Multiplication by an exact integer.
    pub fn mul_int(&self, n: &BigInt) -> Self {
        if n.is_zero() {
            return Self::exact_zero(self.p);
        }
        let (k, u) = arith::split_p(n, self.p);
        match self.val {
            None => Self::zero(self.p, clamp(self.abs_prec.saturating_add(k as i64))),
            Some(v) => {
                let rel = self.abs_prec - v;
                Self::normalize(self.p, v + k as i64, self.signed_unit() * u, v + k as i64 + rel)
            }
        }
    }

    /// Division by a nonzero exact integer; precision drops by `v_p(n)`.
    pub fn div_int(&self, n: &BigInt) -> Self {
        assert!(!n.is_zero(), "division by zero integer");
        let (k, u) = arith::split_p(n, self.p);
        match self.val {
            None => Self::zero(self.p, clamp(self.abs_prec.saturating_sub(k as i64))),
            Some(v) => {
                let rel = self.abs_prec - v;
                let m = pow_p(self.p, rel as u32);
                let inv = arith::inv_mod(&u, &m).expect("unit");
                Self::normalize(self.p, v - k as i64, self.signed_unit() * inv, v - k as i64 + rel)
            }
        }
    }

    /// `1/n` style rational entries are convenient in tests.
    pub fn from_ratio(p: u64, num: i64, den: i64, abs_prec: i64) -> Result<Self> {
        Self::new(p, &BigInt::from(num), &BigInt::from(den), abs_prec)
    }

    /// Residue of the unit part modulo `p`, or `None` for zero.
    pub fn unit_residue(&self) -> Option<u64> {
        self.val.map(|_| (&self.unit % BigUint::from(self.p)).to_u64().expect("small"))
    }
}

impl fmt::Display for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.val {
            None if self.abs_prec >= EXACT => write!(f, "0"),
            None => write!(f, "O({}^{})", self.p, self.abs_prec),
            Some(0) => write!(f, "{} + O({}^{})", self.unit, self.p, self.abs_prec),
            Some(v) => write!(f, "{}*{}^{} + O({}^{})", self.unit, self.p, v, self.p, self.abs_prec),
        }
    }
}

impl Neg for &Padic {
    type Output = Padic;
    fn neg(self) -> Padic {
        self.neg_ref()
    }
}

impl Neg for Padic {
    type Output = Padic;
    fn neg(self) -> Padic {
        self.neg_ref()
    }
}

macro_rules! forward_op {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&Padic> for &Padic {
            type Output = Padic;
            fn $m(self, rhs: &Padic) -> Padic {
                self.$checked(rhs).expect(concat!("p-adic ", stringify!($m)))
            }
        }
        impl $tr<Padic> for Padic {
            type Output = Padic;
            fn $m(self, rhs: Padic) -> Padic {
                (&self).$checked(&rhs).expect(concat!("p-adic ", stringify!($m)))
            }
        }
        impl $tr<&Padic> for Padic {
            type Output = Padic;
            fn $m(self, rhs: &Padic) -> Padic {
                (&self).$checked(rhs).expect(concat!("p-adic ", stringify!($m)))
            }
        }
    };
}

forward_op!(Add, add, checked_add);
forward_op!(Sub, sub, checked_sub);
forward_op!(Mul, mul, checked_mul);
forward_op!(Div, div, checked_div);

/// Arithmetic entry point mirroring the four binary operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn arith(op: ArithOp, a: &Padic, b: &Padic) -> Result<Padic> {
    match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Sub => a.checked_sub(b),
        ArithOp::Mul => a.checked_mul(b),
        ArithOp::Div => a.checked_div(b),
    }
}
