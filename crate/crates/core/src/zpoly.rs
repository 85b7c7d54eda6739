//! Polynomials with `Z_p` coefficients known modulo a common `p^k`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{inv_mod, pow_p, small_mod, vp};

/// `Σ c_i t^i` with every coefficient known modulo `p^prec`
/// (`prec = None` means exact integers).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZpPoly {
    p: u64,
    coeffs: Vec<BigInt>,
    prec: Option<u32>,
}

impl ZpPoly {
    pub fn new(p: u64, coeffs: Vec<BigInt>, prec: Option<u32>) -> Self {
        let mut f = ZpPoly { p, coeffs, prec };
        f.normalize();
        f
    }

    pub fn exact(p: u64, coeffs: Vec<BigInt>) -> Self {
        Self::new(p, coeffs, None)
    }

    pub fn from_i64(p: u64, coeffs: &[i64], prec: Option<u32>) -> Self {
        Self::new(p, coeffs.iter().map(|&c| BigInt::from(c)).collect(), prec)
    }

    fn normalize(&mut self) {
        if let Some(k) = self.prec {
            let m = pow_p(self.p, k);
            for c in &mut self.coeffs {
                *c = c.mod_floor(&m);
            }
        }
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn prec(&self) -> Option<u32> {
        self.prec
    }

    /// `None` for the zero polynomial (to precision).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Smallest `v_p` among the coefficients; `None` if zero to precision.
    pub fn content(&self) -> Option<u32> {
        self.coeffs.iter().filter_map(|c| vp(c, self.p)).min()
    }

    /// Divides by `p^k`; all coefficients must be divisible.
    pub fn div_p_pow(&self, k: u32) -> Self {
        let m = pow_p(self.p, k);
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let (q, r) = c.div_rem(&m);
                debug_assert!(r.is_zero(), "coefficient not divisible by p^{k}");
                q
            })
            .collect();
        Self::new(self.p, coeffs, self.prec.map(|e| e - k))
    }

    pub fn with_prec(&self, prec: Option<u32>) -> Self {
        let prec = match (self.prec, prec) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Self::new(self.p, self.coeffs.clone(), prec)
    }

    /// `f(c + t)`.
    pub fn taylor_shift(&self, c: &BigInt) -> Self {
        let mut out = self.coeffs.clone();
        let n = out.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let add = &out[j + 1] * c;
                out[j] += add;
            }
        }
        Self::new(self.p, out, self.prec)
    }

    /// `f(p^k t)`.
    pub fn scale_var_p(&self, k: u32) -> Self {
        let q = pow_p(self.p, k);
        let mut pw = BigInt::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c * &pw);
            pw *= &q;
        }
        Self::new(self.p, out, self.prec)
    }

    /// `t^d f(1/t)`.
    pub fn reversed(&self, d: usize) -> Self {
        let mut out = vec![BigInt::zero(); d + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            assert!(i <= d, "degree exceeds reversal degree");
            out[d - i] = c.clone();
        }
        Self::new(self.p, out, self.prec)
    }

    pub fn derivative(&self) -> Self {
        let out = self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
        Self::new(self.p, out, self.prec)
    }

    fn joint_prec(&self, other: &Self) -> Option<u32> {
        match (self.prec, other.prec) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let out = (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect();
        Self::new(self.p, out, self.joint_prec(other))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let out = (0..n).map(|i| self.coeff(i) - other.coeff(i)).collect();
        Self::new(self.p, out, self.joint_prec(other))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::new(self.p, Vec::new(), self.joint_prec(other));
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(self.p, out, self.joint_prec(other))
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.p, self.coeffs.iter().map(|a| a * c).collect(), self.prec)
    }

    /// Euclidean division by a polynomial whose leading coefficient is a unit
    /// (inverted modulo `p^prec`; for exact inputs it must be `±1`).
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let prec = self.joint_prec(d);
        let n = d.degree().expect("division by zero polynomial");
        let lead = &d.coeffs[n];
        let inv = match prec {
            Some(k) => inv_mod(lead, &pow_p(self.p, k)).expect("leading coefficient must be a unit"),
            None => {
                assert!(lead.abs().is_one(), "exact division needs a leading coefficient ±1");
                lead.clone()
            }
        };
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); r.len().saturating_sub(n).max(1)];
        let m = prec.map(|k| pow_p(self.p, k));
        for i in (n..r.len()).rev() {
            let mut c = &r[i] * &inv;
            if let Some(m) = &m {
                c = c.mod_floor(m);
            }
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.coeffs.iter().enumerate() {
                r[i - n + j] -= &c * dj;
            }
            q[i - n] = c;
        }
        r.truncate(n);
        (Self::new(self.p, q, prec), Self::new(self.p, r, prec))
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        match self.prec {
            Some(k) => acc.mod_floor(&pow_p(self.p, k)),
            None => acc,
        }
    }

    /// Coefficients modulo `p` (without trailing zeros).
    pub fn reduce_mod_p(&self) -> Vec<u64> {
        let mut out: Vec<u64> = self.coeffs.iter().map(|c| small_mod(c, self.p)).collect();
        while out.last() == Some(&0) {
            out.pop();
        }
        out
    }
}

/// Evaluation of a polynomial over `F_p`.
pub fn eval_mod_p(f: &[u64], x: u64, p: u64) -> u64 {
    let mut acc: u128 = 0;
    for &c in f.iter().rev() {
        acc = (acc * x as u128 + c as u128) % p as u128;
    }
    acc as u64
}

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_small(a: u64, p: u64) -> u64 {
    crate::arith::pow_mod_u64(a, p - 2, p)
}

/// Remainder of `a` by nonzero `b` over `F_p`.
pub fn rem_mod_p(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    let lead_inv = inv_small(*b.last().expect("nonzero divisor"), p) as u128;
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = (*r.last().expect("nonempty") as u128 * lead_inv % p as u128) as u64;
        for (i, &bi) in b.iter().enumerate() {
            let sub = (c as u128 * bi as u128 % p as u128) as u64;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        r = trim(r);
    }
    r
}

/// Monic gcd over `F_p`; `gcd(0, 0) = 0`.
pub fn gcd_mod_p(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (trim(a.iter().map(|x| x % p).collect()), trim(b.iter().map(|x| x % p).collect()));
    while !b.is_empty() {
        let r = rem_mod_p(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(&l) = a.last() {
        let li = inv_small(l, p) as u128;
        for c in &mut a {
            *c = (*c as u128 * li % p as u128) as u64;
        }
    }
    a
}

/// Valuation of a determinant, known modulo `p^k` (`None`: exact entries).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetValuation {
    Zero,
    Exactly(u32),
    AtLeast(u32),
}

/// `v_p(det m)` by elimination with minimal-valuation pivots.
///
/// For exact entries the working modulus is taken beyond the Hadamard bound,
/// so a vanishing residue means the determinant is zero.
pub fn det_valuation(m: &[Vec<BigInt>], p: u64, prec: Option<u32>) -> DetValuation {
    let n = m.len();
    if n == 0 {
        return DetValuation::Exactly(0);
    }
    let k = match prec {
        Some(k) => k,
        None => hadamard_exponent(m, p) + 1,
    };
    let modulus = pow_p(p, k);
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|x| x.mod_floor(&modulus)).collect()).collect();
    let mut total = 0u32;
    for col in 0..n {
        let mut best: Option<(usize, usize, u32)> = None;
        for (i, row) in a.iter().enumerate().skip(col) {
            for (j, x) in row.iter().enumerate().skip(col) {
                if let Some(v) = vp(x, p) {
                    if best.is_none_or(|b| v < b.2) {
                        best = Some((i, j, v));
                    }
                }
            }
        }
        let Some((bi, bj, v)) = best else {
            return if prec.is_none() { DetValuation::Zero } else { DetValuation::AtLeast(k) };
        };
        total += v;
        if total >= k {
            return if prec.is_none() { DetValuation::Zero } else { DetValuation::AtLeast(k) };
        }
        a.swap(col, bi);
        for row in &mut a {
            row.swap(col, bj);
        }
        let pv = pow_p(p, v);
        let unit = &a[col][col] / &pv;
        let uinv = inv_mod(&unit, &modulus).expect("unit pivot");
        for i in col + 1..n {
            if a[i][col].is_zero() {
                continue;
            }
            let factor = (&a[i][col] / &pv * &uinv).mod_floor(&modulus);
            for j in col..n {
                let sub = &factor * &a[col][j];
                a[i][j] = (&a[i][j] - sub).mod_floor(&modulus);
            }
        }
    }
    DetValuation::Exactly(total)
}

fn hadamard_exponent(m: &[Vec<BigInt>], p: u64) -> u32 {
    // |det| ≤ Π ‖row‖₂ ≤ Π (n · max|entry|); bounded via bit lengths.
    let n = m.len() as u64;
    let mut bits = 0u64;
    for row in m {
        let mx = row.iter().map(|x| x.bits()).max().unwrap_or(0);
        bits += mx + 64 - n.leading_zeros() as u64;
    }
    let log2p = 64 - p.leading_zeros() as u64 - 1;
    (bits / log2p.max(1) + 1) as u32
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det_exact(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Sylvester matrix of two polynomials of the given formal degrees.
pub fn sylvester(a: &[BigInt], da: usize, b: &[BigInt], db: usize) -> Vec<Vec<BigInt>> {
    let n = da + db;
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for i in 0..db {
        for j in 0..=da {
            m[i][i + j] = a.get(da - j).cloned().unwrap_or_default();
        }
    }
    for i in 0..da {
        for j in 0..=db {
            m[db + i][i + j] = b.get(db - j).cloned().unwrap_or_default();
        }
    }
    m
}

/// `v_p(Res(a, b))`; `None` when either polynomial is zero.
pub fn resultant_valuation(a: &ZpPoly, b: &ZpPoly) -> Option<DetValuation> {
    let da = a.degree()?;
    let db = b.degree()?;
    let prec = a.joint_prec(b);
    if da == 0 && db == 0 {
        return Some(DetValuation::Exactly(0));
    }
    Some(det_valuation(&sylvester(a.coeffs(), da, b.coeffs(), db), a.prime(), prec))
}
