//! Hyperelliptic curves `y² = f(x)` over `Z_p` and decent models built by
//! recursive subdivision of the `x`-line.
//!
//! A patch `y² = h(x)` is examined one residue column `x ≡ c` at a time. With
//! `a = h(c)`, `b = h'(c)`:
//!
//! | condition                     | case                         | smooth `F_p`-points |
//! |-------------------------------|------------------------------|---------------------|
//! | `p ∤ b`                       | unit derivative              | `#{y : y² = a}`     |
//! | `p ∣ b`, `p ∤ a`, `p` odd     | unit value                   | `#{y ≠ 0 : y² = a}` |
//! | `p = 2`, `2 ∣ b`, `a ≡ 3 (4)` | regular, not smooth          | 0                   |
//! | `p = 2`, `2 ∣ b`, `a ≡ 1 (4)` | blown up: `y'²+y' = …`       | `2·#{x' : RHS = 0}` |
//! | `p ∣ a`, `p² ∤ a`             | simple zero                  | 0                   |
//! | `p² ∣ a`                      | recurse on `p⁻²h(c + px)`    | children            |
//!
//! The point at infinity is always smooth and contributes 1.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_core::RngCore;

use crate::arith::{is_prime, pow_p, small_mod, square_root_count, vp};
use crate::error::{Error, Result};
use crate::padic::Padic;
use crate::zpoly::{det_exact, sylvester, ZpPoly};

/// `y² = f(x)` with `f = x^{2g+1} + a₁x^{2g} + ⋯ + a_{2g+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveInput {
    p: u64,
    g: usize,
    f: ZpPoly,
}

impl CurveInput {
    /// From `a₁, …, a_{2g+1}`.
    pub fn new(p: u64, a: &[BigInt], prec: Option<u32>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if a.len() < 3 || a.len() % 2 == 0 {
            return Err(Error::InvalidCurve(format!("need 2g+1 coefficients, got {}", a.len())));
        }
        let g = (a.len() - 1) / 2;
        let mut coeffs: Vec<BigInt> = a.iter().rev().cloned().collect();
        coeffs.push(BigInt::one());
        Ok(CurveInput { p, g, f: ZpPoly::new(p, coeffs, prec) })
    }

    pub fn from_i64(p: u64, a: &[i64]) -> Result<Self> {
        Self::new(p, &a.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>(), None)
    }

    /// From `p`-adic coefficients, which must be integral.
    pub fn from_padic(p: u64, a: &[Padic]) -> Result<Self> {
        let prec = a.iter().map(Padic::abs_prec).min().unwrap_or(0);
        if prec <= 0 {
            return Err(Error::InsufficientPrecision("coefficients carry no digits".into()));
        }
        let prec = u32::try_from(prec.min(1 << 20)).expect("bounded");
        let ints = a
            .iter()
            .map(|x| x.to_bigint().ok_or_else(|| Error::InvalidCurve("non-integral coefficient".into())))
            .collect::<Result<Vec<_>>>()?;
        Self::new(p, &ints, Some(prec))
    }

    /// Monic `f` given by its coefficients in increasing degree.
    pub fn from_poly(f: ZpPoly) -> Result<Self> {
        let d = f.degree().unwrap_or(0);
        if d < 3 || d % 2 == 0 || !f.coeff(d).is_one() {
            return Err(Error::InvalidCurve("f must be monic of odd degree ≥ 3".into()));
        }
        Ok(CurveInput { p: f.prime(), g: (d - 1) / 2, f })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn f(&self) -> &ZpPoly {
        &self.f
    }

    /// `a₁, …, a_{2g+1}`.
    pub fn a(&self) -> Vec<BigInt> {
        (0..2 * self.g + 1).rev().map(|i| self.f.coeff(i)).collect()
    }
}

/// `disc(f) = (−1)^{d(d−1)/2} Res(f, f')` for monic `f` of degree `d`,
/// on the stored integer coefficients.
pub fn discriminant_int(f: &ZpPoly) -> BigInt {
    let d = f.degree().unwrap_or(0);
    let df = f.derivative();
    let dd = df.degree().unwrap_or(0);
    let r = det_exact(&sylvester(f.coeffs(), d, df.coeffs(), dd));
    if (d * d.saturating_sub(1) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

/// [`discriminant_int`] as a `p`-adic number known to the precision of `f`.
pub fn discriminant(f: &ZpPoly) -> Padic {
    let p = f.prime();
    let r = discriminant_int(f);
    match f.prec() {
        None if r.is_zero() => Padic::exact_zero(p),
        // Only the valuation matters downstream; keep ample digits beyond it.
        None => Padic::from_bigint(p, &r, vp(&r, p).unwrap_or(0) as i64 + 64),
        Some(k) => {
            let r = r.mod_floor(&pow_p(p, k));
            if r.is_zero() {
                Padic::zero(p, k as i64)
            } else {
                Padic::from_bigint(p, &r, k as i64)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitValueKind {
    /// `p` odd: smooth points with `y ≠ 0`.
    Odd,
    /// `p = 2`, `a ≡ 3 (mod 4)`.
    RegularNotSmooth,
    /// `p = 2`, `a ≡ 1 (mod 4)`: the blow-up patch `y'² + y' = r₀ + r₁x' + r₂x'²` mod 2.
    BlownUpSmooth { rhs: [u8; 3] },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColumnCase {
    UnitDerivative,
    UnitValue(UnitValueKind),
    SimpleZero,
    Recurse,
}

impl ColumnCase {
    pub fn tag(&self) -> &'static str {
        match self {
            ColumnCase::UnitDerivative => "UnitDerivative",
            ColumnCase::UnitValue(UnitValueKind::Odd) => "UnitValue",
            ColumnCase::UnitValue(UnitValueKind::RegularNotSmooth) => "RegularNotSmooth",
            ColumnCase::UnitValue(UnitValueKind::BlownUpSmooth { .. }) => "BlownUpSmooth",
            ColumnCase::SimpleZero => "SimpleZero",
            ColumnCase::Recurse => "Recurse",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnRecord {
    pub c: u64,
    pub case: ColumnCase,
    /// Smooth points in this column; for `Recurse`, the sum over the child.
    pub smooth_count: u64,
    pub child: Option<Box<PatchNode>>,
    /// `Recurse` left unexpanded by a truncated model.
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatchNode {
    pub depth: u32,
    pub h: ZpPoly,
    pub parent_column: Option<u64>,
    pub columns: Vec<ColumnRecord>,
}

impl PatchNode {
    pub fn smooth_count(&self) -> u64 {
        self.columns.iter().map(|c| c.smooth_count).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecentModel {
    pub p: u64,
    pub root: PatchNode,
    pub infinity_count: u64,
    pub total_smooth: u64,
    pub max_depth_reached: u32,
}

/// `(h(c), h'(c), h''(c)/2)` modulo `p^prec`.
fn taylor3(h: &ZpPoly, c: u64) -> (BigInt, BigInt, BigInt) {
    let s = h.taylor_shift(&BigInt::from(c));
    (s.coeff(0), s.coeff(1), s.coeff(2))
}

/// Case analysis for the column `x ≡ c` of the patch `y² = h(x)`.
///
/// Needs `h` modulo `p²` (`2³` when `p = 2`).
pub fn classify_column(h: &ZpPoly, c: u64) -> Result<ColumnRecord> {
    let p = h.prime();
    let need = if p == 2 { 3 } else { 2 };
    if h.prec().is_some_and(|k| k < need) {
        return Err(Error::InsufficientPrecision(format!("patch known mod p^{}, need p^{need}", h.prec().unwrap())));
    }
    let (a, b, c2) = taylor3(h, c);
    let pb = BigInt::from(p);
    let a_mod_p = small_mod(&a, p);
    let record = |case, smooth_count| ColumnRecord { c, case, smooth_count, child: None, truncated: false };
    if !b.is_multiple_of(&pb) {
        return Ok(record(ColumnCase::UnitDerivative, square_root_count(a_mod_p, p)));
    }
    if a_mod_p != 0 {
        if p != 2 {
            return Ok(record(ColumnCase::UnitValue(UnitValueKind::Odd), square_root_count(a_mod_p, p)));
        }
        let a8 = small_mod(&a, 8);
        if a8 % 4 == 3 {
            return Ok(record(ColumnCase::UnitValue(UnitValueKind::RegularNotSmooth), 0));
        }
        let rhs = [((a8 - 1) / 4) as u8 & 1, (small_mod(&b, 4) / 2) as u8, small_mod(&c2, 2) as u8];
        let zeros = (0..2u8).filter(|&x| (rhs[0] + rhs[1] * x + rhs[2] * x * x) % 2 == 0).count() as u64;
        return Ok(record(ColumnCase::UnitValue(UnitValueKind::BlownUpSmooth { rhs }), 2 * zeros));
    }
    if vp(&a, p).is_some_and(|v| v < 2) {
        return Ok(record(ColumnCase::SimpleZero, 0));
    }
    Ok(record(ColumnCase::Recurse, 0))
}

/// `p^{−2}·h(c + px)`.
pub fn child_patch(h: &ZpPoly, c: u64) -> ZpPoly {
    h.taylor_shift(&BigInt::from(c)).scale_var_p(1).div_p_pow(2)
}

/// `⌊v_p(disc)/2⌋ + 2`.
pub fn default_depth_guard(curve: &CurveInput) -> Result<u32> {
    let d = discriminant(curve.f());
    let v = d.valuation().ok_or(Error::ZeroDiscriminant)?;
    Ok(v as u32 / 2 + 2)
}

struct Builder {
    p: u64,
    guard: u32,
    /// `Some(k)`: recursions below depth `k` count zero instead of expanding.
    truncate_at: Option<u32>,
    deepest: u32,
}

impl Builder {
    fn patch(&mut self, h: ZpPoly, depth: u32, parent_column: Option<u64>) -> Result<PatchNode> {
        self.deepest = self.deepest.max(depth);
        let mut columns = Vec::with_capacity(self.p as usize);
        for c in 0..self.p {
            let mut rec = classify_column(&h, c)?;
            if rec.case == ColumnCase::Recurse {
                if self.truncate_at.is_some_and(|k| depth >= k) {
                    rec.truncated = true;
                } else {
                    if depth + 1 > self.guard {
                        return Err(Error::DepthGuardExceeded(self.guard));
                    }
                    let child = self.patch(child_patch(&h, c), depth + 1, Some(c))?;
                    rec.smooth_count = child.smooth_count();
                    rec.child = Some(Box::new(child));
                }
            }
            columns.push(rec);
        }
        Ok(PatchNode { depth, h, parent_column, columns })
    }
}

fn build(curve: &CurveInput, guard: Option<u32>, truncate_at: Option<u32>) -> Result<DecentModel> {
    if truncate_at.is_none() && discriminant(curve.f()).valuation().is_none() {
        return Err(Error::ZeroDiscriminant);
    }
    let guard = match guard {
        Some(g) => g,
        None => default_depth_guard(curve)?,
    };
    if let Some(k) = curve.f().prec() {
        let need = 2 * guard.min(truncate_at.unwrap_or(u32::MAX)) + if curve.prime() == 2 { 3 } else { 2 };
        if k < need {
            return Err(Error::InsufficientPrecision(format!("coefficients known mod p^{k}, need p^{need}")));
        }
    }
    let mut b = Builder { p: curve.prime(), guard, truncate_at, deepest: 0 };
    let root = b.patch(curve.f().clone(), 0, None)?;
    let total_smooth = 1 + root.smooth_count();
    Ok(DecentModel { p: curve.prime(), root, infinity_count: 1, total_smooth, max_depth_reached: b.deepest })
}

/// Decent model; `depth_guard` defaults to `⌊v_p(disc)/2⌋ + 2`.
pub fn make_decent_model(curve: &CurveInput, depth_guard: Option<u32>) -> Result<DecentModel> {
    build(curve, depth_guard, None)
}

/// As [`make_decent_model`], but recursion from patches at depth `k` is not
/// expanded and contributes nothing. Defined for every `f`, including those
/// with vanishing discriminant.
pub fn make_truncated_model(curve: &CurveInput, k: u32) -> Result<DecentModel> {
    build(curve, Some(k + 1), Some(k))
}

/// Where a point of `C(Q_p)` lands on the special fibre of a decent model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReducedPoint {
    Infinity,
    /// `(x, y)` on the patch reached via the column digits in `path`.
    Affine { path: Vec<u64>, x: u64, y: u64 },
    /// `(x', y')` on the `p = 2` blow-up patch of the last column of `path`.
    BlowUp { path: Vec<u64>, x: u64, y: u64 },
}

fn digit(x: &Padic) -> Result<u64> {
    Ok(small_mod(&x.residue(1)?, x.prime()))
}

/// Follows the `x`-digits of `(x, y)` through the patch tree.
pub fn reduce_point(model: &DecentModel, x: &Padic, y: &Padic) -> Result<ReducedPoint> {
    let p = model.p;
    if x.valuation().is_some_and(|v| v < 0) {
        return Ok(ReducedPoint::Infinity);
    }
    let mut node = &model.root;
    let (mut xn, mut yn) = (x.clone(), y.clone());
    let mut path = Vec::new();
    loop {
        let c = digit(&xn)?;
        path.push(c);
        let rec = &node.columns[c as usize];
        let cp = Padic::from_int(p, c as i64, xn.abs_prec().max(1));
        match rec.case {
            ColumnCase::UnitDerivative | ColumnCase::UnitValue(UnitValueKind::Odd) => {
                let yd = digit(&yn)?;
                let a = small_mod(&node.h.eval(&BigInt::from(c)), p);
                if (yd as u128 * yd as u128 % p as u128) as u64 != a {
                    return Err(Error::NotOnCurve);
                }
                if rec.case != ColumnCase::UnitDerivative && yd == 0 {
                    return Err(Error::LandsOnNonSmooth(format!("{path:?}")));
                }
                return Ok(ReducedPoint::Affine { path, x: c, y: yd });
            }
            ColumnCase::UnitValue(UnitValueKind::BlownUpSmooth { rhs }) => {
                let xp = digit(&xn.checked_sub(&cp)?.shift(-1))?;
                let yp = digit(&yn.checked_sub(&Padic::one(p, yn.abs_prec().max(1)))?.shift(-1))?;
                let r = (rhs[0] as u64 + rhs[1] as u64 * xp + rhs[2] as u64 * xp * xp) % 2;
                if r != 0 {
                    return Err(Error::LandsOnNonSmooth(format!("{path:?} blow-up x'={xp}")));
                }
                return Ok(ReducedPoint::BlowUp { path, x: xp, y: yp });
            }
            ColumnCase::UnitValue(UnitValueKind::RegularNotSmooth) | ColumnCase::SimpleZero => {
                return Err(Error::LandsOnNonSmooth(format!("{path:?} {}", rec.case.tag())));
            }
            ColumnCase::Recurse => {
                let Some(child) = &rec.child else {
                    return Err(Error::DepthGuardExceeded(node.depth));
                };
                xn = xn.checked_sub(&cp)?.shift(-1);
                yn = yn.shift(-1);
                node = child;
            }
        }
    }
}

/// The point with the given `x`-coordinate, if `f(x)` is a square.
pub fn curve_point_at(curve: &CurveInput, x: &Padic) -> Option<(Padic, Padic)> {
    let p = curve.prime();
    let mut fx = Padic::exact_zero(p);
    let prec = curve.f().prec().map_or(x.abs_prec(), |k| x.abs_prec().min(k as i64));
    for c in curve.f().coeffs().iter().rev() {
        fx = fx.checked_mul(x).ok()?.checked_add(&Padic::from_bigint(p, c, prec)).ok()?;
    }
    let y = fx.sqrt().ok()?;
    Some((x.clone(), y))
}

/// Draws `x ∈ Z_p` from `digits` uniform digits and tries to lift to a point.
pub fn sample_curve_point<R: RngCore>(curve: &CurveInput, rng: &mut R, digits: u32) -> Option<(Padic, Padic)> {
    let p = curve.prime();
    let mut x = BigInt::zero();
    let mut pw = BigInt::one();
    for _ in 0..digits {
        x += &pw * BigInt::from(rng.next_u64() % p);
        pw *= p;
    }
    curve_point_at(curve, &Padic::from_bigint(p, &x, digits as i64))
}

/// `max_m |a_m|^{1/m}`.
pub fn height(a: &[BigInt]) -> f64 {
    a.iter()
        .enumerate()
        .map(|(i, x)| {
            let v = x.abs().to_f64().unwrap_or(f64::INFINITY);
            if v == 0.0 {
                0.0
            } else {
                libm::pow(v, 1.0 / (i + 1) as f64)
            }
        })
        .fold(0.0, f64::max)
}
