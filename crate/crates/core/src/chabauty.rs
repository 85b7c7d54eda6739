//! Residue disks, local expansions of the holomorphic 1-forms and the
//! `ρ∘log` image for hyperelliptic curves with good reduction.
//!
//! Curves are `y² + q(x)y = r(x)` with `deg r = 2g+1` and `deg q ≤ g`
//! (`q = 0` for the odd-prime form `y² = f`). The basis of 1-forms is
//! `ω_j = −x^{g−j} dx/(2y+q)`, `j = 1..g`, which on the chart at infinity
//! (`s = 1/x`, `t = y/x^{g+1}`) reads `ω_j = s^{j−1} ds/G_t`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{inv_mod, is_prime, pow_p, small_mod, vp};
use crate::error::{Error, Result};
use crate::padic::Padic;
use crate::projred::{image_of_series_on_pzp, rho, ProjPointFp, ReductionImage};
use crate::series::{delta, formal_integrate, SeriesVector, Tail, TruncatedSeries};
use crate::zpoly::gcd_mod_p;

/// A hyperelliptic curve `y² + q(x)y = r(x)` over `Z_p` with smooth special fiber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodReductionCurve {
    p: u64,
    g: usize,
    q: Vec<BigInt>,
    r: Vec<BigInt>,
}

fn trimmed(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

fn reduce(v: &[BigInt], p: u64) -> Vec<u64> {
    v.iter().map(|c| small_mod(c, p)).collect()
}

fn fp_derivative(a: &[u64], p: u64) -> Vec<u64> {
    a.iter().enumerate().skip(1).map(|(i, &c)| (c as u128 * i as u128 % p as u128) as u64).collect()
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ((out[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
        }
    }
    out
}

fn fp_add(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    (0..n).map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p).collect()
}

fn is_unit_poly(a: &[u64]) -> bool {
    a == [1]
}

fn int_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn eval_int(c: &[BigInt], x: &BigInt) -> BigInt {
    c.iter().rev().fold(BigInt::zero(), |acc, a| acc * x + a)
}

fn deriv_int(c: &[BigInt]) -> Vec<BigInt> {
    c.iter().enumerate().skip(1).map(|(i, a)| a * BigInt::from(i)).collect()
}

impl GoodReductionCurve {
    /// `y² + q(x)y = r(x)`, coefficients in increasing degree.
    pub fn new(p: u64, q: Vec<BigInt>, r: Vec<BigInt>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        let q = trimmed(q);
        let r = trimmed(r);
        let dr = r.len().saturating_sub(1);
        if dr < 3 || dr % 2 == 0 {
            return Err(Error::InvalidCurve(format!("deg r = {dr} must be odd and at least 3")));
        }
        let g = (dr - 1) / 2;
        if q.len() > g + 1 {
            return Err(Error::InvalidCurve(format!("deg q must be at most {g}")));
        }
        let curve = GoodReductionCurve { p, g, q, r };
        if !curve.special_fiber_smooth() {
            return Err(Error::BadReduction);
        }
        Ok(curve)
    }

    /// `y² = f(x)`.
    pub fn from_f(p: u64, f: Vec<BigInt>) -> Result<Self> {
        Self::new(p, Vec::new(), f)
    }

    pub fn from_i64(p: u64, q: &[i64], r: &[i64]) -> Result<Self> {
        Self::new(p, q.iter().map(|&c| BigInt::from(c)).collect(), r.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `y² + y = x^{2g+1} + x + 1`.
    pub fn family(g: usize) -> Result<Self> {
        let mut r = vec![0i64; 2 * g + 2];
        r[0] = 1;
        r[1] = 1;
        r[2 * g + 1] = 1;
        Self::from_i64(2, &[1], &r)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn q(&self) -> &[BigInt] {
        &self.q
    }

    pub fn r(&self) -> &[BigInt] {
        &self.r
    }

    fn special_fiber_smooth(&self) -> bool {
        let p = self.p;
        let lead = self.r.last().expect("nonzero r");
        if small_mod(lead, p) == 0 {
            return false;
        }
        let q = reduce(&self.q, p);
        let r = reduce(&self.r, p);
        if p == 2 {
            // Singular points sit over roots of q with q'²r + r'² = 0.
            let dq = fp_derivative(&q, p);
            let dr = fp_derivative(&r, p);
            let h = fp_add(&fp_mul(&fp_mul(&dq, &dq, p), &r, p), &fp_mul(&dr, &dr, p), p);
            return is_unit_poly(&gcd_mod_p(&q, &h, p));
        }
        let h = reduce(&self.completed_square(), p);
        is_unit_poly(&gcd_mod_p(&h, &fp_derivative(&h, p), p))
    }

    /// `q² + 4r`, i.e. `4·f` for the model `(2y+q)² = q² + 4r`.
    pub fn completed_square(&self) -> Vec<BigInt> {
        let mut h = int_mul(&self.q, &self.q);
        h.resize(self.r.len(), BigInt::zero());
        for (i, c) in self.r.iter().enumerate() {
            h[i] += c * BigInt::from(4);
        }
        h
    }

    fn f_eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        y * y + eval_int(&self.q, x) * y - eval_int(&self.r, x)
    }

    fn fy_eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        y * BigInt::from(2) + eval_int(&self.q, x)
    }

    fn fx_eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        eval_int(&deriv_int(&self.q), x) * y - eval_int(&deriv_int(&self.r), x)
    }

    /// Coefficients of `q̃(s) = s^{g+1} q(1/s)` and `r̃(s) = s^{2g+2} r(1/s)`.
    fn infinity_chart(&self) -> (Vec<BigInt>, Vec<BigInt>) {
        let g = self.g;
        let mut qt = vec![BigInt::zero(); g + 2];
        for (i, c) in self.q.iter().enumerate() {
            qt[g + 1 - i] = c.clone();
        }
        let mut rt = vec![BigInt::zero(); 2 * g + 3];
        for (i, c) in self.r.iter().enumerate() {
            rt[2 * g + 2 - i] = c.clone();
        }
        (trimmed(qt), trimmed(rt))
    }
}

impl fmt::Display for GoodReductionCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let poly = |c: &[BigInt]| -> String {
            let terms: Vec<String> = c
                .iter()
                .enumerate()
                .rev()
                .filter(|(_, a)| !a.is_zero())
                .map(|(i, a)| match i {
                    0 => a.to_string(),
                    1 => format!("{a}*x"),
                    _ => format!("{a}*x^{i}"),
                })
                .collect();
            if terms.is_empty() {
                "0".to_string()
            } else {
                terms.join(" + ")
            }
        };
        if self.q.is_empty() {
            write!(f, "y^2 = {}", poly(&self.r))
        } else {
            write!(f, "y^2 + ({})*y = {}", poly(&self.q), poly(&self.r))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiskCenter {
    Affine { x: u64, y: u64 },
    Infinity,
}

/// Local parameter on a residue disk; the disk is `{t ∈ pZ_p}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Uniformizer {
    /// `t = y/x^{g+1}` on the chart at infinity.
    InfinityT,
    /// `t = x − x₀`, used when `F_y` is a unit at the centre.
    XMinusX0,
    /// `t = y − y₀`, used at points where `F_y ≡ 0`.
    YMinusY0,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ResidueDisk {
    pub center: DiskCenter,
    pub uniformizer: Uniformizer,
}

impl ResidueDisk {
    pub fn is_infinity_disk(&self) -> bool {
        self.center == DiskCenter::Infinity
    }
}

impl fmt::Display for ResidueDisk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.center {
            DiskCenter::Infinity => write!(f, "∞"),
            DiskCenter::Affine { x, y } => write!(f, "({x},{y})"),
        }
    }
}

/// All `F_p`-points of the special fiber, affine ones first, then `∞`.
pub fn residue_disks(curve: &GoodReductionCurve) -> Vec<ResidueDisk> {
    let p = curve.p;
    let pb = BigInt::from(p);
    let mut out = Vec::new();
    for x in 0..p {
        let xb = BigInt::from(x);
        for y in 0..p {
            let yb = BigInt::from(y);
            if !curve.f_eval(&xb, &yb).mod_floor(&pb).is_zero() {
                continue;
            }
            let uniformizer = if curve.fy_eval(&xb, &yb).mod_floor(&pb).is_zero() {
                Uniformizer::YMinusY0
            } else {
                Uniformizer::XMinusX0
            };
            out.push(ResidueDisk { center: DiskCenter::Affine { x, y }, uniformizer });
        }
    }
    out.push(ResidueDisk { center: DiskCenter::Infinity, uniformizer: Uniformizer::InfinityT });
    out
}

/// Power series over `Z/p^K` truncated at `t^T`.
struct Ring {
    m: BigInt,
    t: usize,
}

type Ser = Vec<BigInt>;

impl Ring {
    fn red(&self, mut a: Ser) -> Ser {
        a.resize(self.t, BigInt::zero());
        for c in &mut a {
            *c = c.mod_floor(&self.m);
        }
        a
    }

    fn cst(&self, c: &BigInt) -> Ser {
        self.red(vec![c.clone()])
    }

    /// `c + t`.
    fn shifted_var(&self, c: &BigInt) -> Ser {
        self.red(vec![c.clone(), BigInt::one()])
    }

    fn add(&self, a: &Ser, b: &Ser) -> Ser {
        self.red(a.iter().zip(b).map(|(x, y)| x + y).collect())
    }

    fn sub(&self, a: &Ser, b: &Ser) -> Ser {
        self.red(a.iter().zip(b).map(|(x, y)| x - y).collect())
    }

    fn mul(&self, a: &Ser, b: &Ser) -> Ser {
        let mut out = vec![BigInt::zero(); self.t];
        for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in b.iter().take(self.t - i).enumerate() {
                out[i + j] += x * y;
            }
        }
        self.red(out)
    }

    fn scale(&self, a: &Ser, c: &BigInt) -> Ser {
        self.red(a.iter().map(|x| x * c).collect())
    }

    fn inv(&self, a: &Ser) -> Option<Ser> {
        let b0 = inv_mod(&a[0], &self.m)?;
        let mut b = vec![BigInt::zero(); self.t];
        b[0] = b0.clone();
        for n in 1..self.t {
            let s: BigInt = (1..=n).map(|i| &a[i] * &b[n - i]).sum();
            b[n] = (-s * &b0).mod_floor(&self.m);
        }
        Some(b)
    }

    fn poly(&self, c: &[BigInt], s: &Ser) -> Ser {
        let mut acc = self.cst(&BigInt::zero());
        for a in c.iter().rev() {
            acc = self.add(&self.mul(&acc, s), &self.cst(a));
        }
        acc
    }

    fn pow(&self, s: &Ser, e: usize) -> Ser {
        (0..e).fold(self.cst(&BigInt::one()), |acc, _| self.mul(&acc, s))
    }
}

/// Newton iteration for a simple root of `h` modulo `m` starting from `x0`.
fn hensel_root(h: impl Fn(&BigInt) -> BigInt, dh: impl Fn(&BigInt) -> BigInt, x0: u64, m: &BigInt) -> Result<BigInt> {
    let mut x = BigInt::from(x0);
    for _ in 0..128 {
        let v = h(&x).mod_floor(m);
        if v.is_zero() {
            return Ok(x);
        }
        let d = inv_mod(&dh(&x), m).ok_or(Error::BadReduction)?;
        x = (x - v * d).mod_floor(m);
    }
    Err(Error::PrecisionExhausted(128))
}

/// The `g` forms restricted to one residue disk, `ω_j = w_j(t) dt`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiskExpansion {
    pub disk: ResidueDisk,
    pub w: SeriesVector,
    pub n_d: usize,
    /// `s(t)` at infinity, `y(t)` for `t = x − x₀`, `x(t)` for `t = y − y₀`.
    pub coordinate: TruncatedSeries,
    pub truncation: usize,
    pub precision: u32,
}

fn to_series(p: u64, s: &Ser, k: u32) -> TruncatedSeries {
    let coeffs = s.iter().map(|c| Padic::from_bigint(p, c, k as i64)).collect();
    TruncatedSeries::new(p, coeffs, Tail::at_least(0)).expect("consistent prime")
}

/// Expands `ω_1..ω_g` on `disk` modulo `(p^k, t^trunc)` and certifies `n_D`.
pub fn expand_at_disk(curve: &GoodReductionCurve, disk: &ResidueDisk, trunc: usize, k: u32) -> Result<DiskExpansion> {
    let g = curve.g;
    if trunc < 2 * g + 2 {
        return Err(Error::InsufficientTruncation(trunc));
    }
    if k == 0 {
        return Err(Error::Precondition("precision must be positive".to_string()));
    }
    let p = curve.p;
    let ring = Ring { m: pow_p(p, k), t: trunc };
    let (coordinate, w) = match disk.center {
        DiskCenter::Infinity => {
            let (qt, rt) = curve.infinity_chart();
            let c_inv = inv_mod(&rt[1], &ring.m).ok_or(Error::BadReduction)?;
            let t = ring.shifted_var(&BigInt::zero());
            let t2 = ring.mul(&t, &t);
            // G(s,t) = t² + q̃(s)t − r̃(s); each step gains one power of t.
            let mut s = ring.cst(&BigInt::zero());
            for _ in 0..=trunc {
                let g_val = ring.sub(&ring.add(&t2, &ring.mul(&ring.poly(&qt, &s), &t)), &ring.poly(&rt, &s));
                s = ring.add(&s, &ring.scale(&g_val, &c_inv));
            }
            let neg_gs = ring.sub(&ring.poly(&deriv_int(&rt), &s), &ring.mul(&ring.poly(&deriv_int(&qt), &s), &t));
            let base = ring.inv(&neg_gs).ok_or(Error::BadReduction)?;
            let w: Vec<Ser> = (0..g).map(|j| ring.mul(&ring.pow(&s, j), &base)).collect();
            (s, w)
        }
        DiskCenter::Affine { x, y } if disk.uniformizer == Uniformizer::XMinusX0 => {
            let x0 = BigInt::from(x);
            let y0 = hensel_root(|v| curve.f_eval(&x0, v), |v| curve.fy_eval(&x0, v), y, &ring.m)?;
            let c_inv = inv_mod(&curve.fy_eval(&x0, &y0), &ring.m).ok_or(Error::BadReduction)?;
            let xs = ring.shifted_var(&x0);
            let qx = ring.poly(&curve.q, &xs);
            let rx = ring.poly(&curve.r, &xs);
            let mut ys = ring.cst(&y0);
            for _ in 0..=trunc {
                let f_val = ring.sub(&ring.add(&ring.mul(&ys, &ys), &ring.mul(&qx, &ys)), &rx);
                ys = ring.sub(&ys, &ring.scale(&f_val, &c_inv));
            }
            let fy = ring.add(&ring.scale(&ys, &BigInt::from(2)), &qx);
            let base = ring.scale(&ring.inv(&fy).ok_or(Error::BadReduction)?, &BigInt::from(-1));
            let w: Vec<Ser> = (0..g).map(|j| ring.mul(&ring.pow(&xs, g - 1 - j), &base)).collect();
            (ys, w)
        }
        DiskCenter::Affine { x, y } => {
            let y0 = BigInt::from(y);
            let x0 = hensel_root(|v| curve.f_eval(v, &y0), |v| curve.fx_eval(v, &y0), x, &ring.m)?;
            let c_inv = inv_mod(&curve.fx_eval(&x0, &y0), &ring.m).ok_or(Error::BadReduction)?;
            let ys = ring.shifted_var(&y0);
            let mut xs = ring.cst(&x0);
            for _ in 0..=trunc {
                let f_val = ring.sub(
                    &ring.add(&ring.mul(&ys, &ys), &ring.mul(&ring.poly(&curve.q, &xs), &ys)),
                    &ring.poly(&curve.r, &xs),
                );
                xs = ring.sub(&xs, &ring.scale(&f_val, &c_inv));
            }
            let fx = ring.sub(
                &ring.mul(&ring.poly(&deriv_int(&curve.q), &xs), &ys),
                &ring.poly(&deriv_int(&curve.r), &xs),
            );
            let base = ring.inv(&fx).ok_or(Error::BadReduction)?;
            let w: Vec<Ser> = (0..g).map(|j| ring.mul(&ring.pow(&xs, g - 1 - j), &base)).collect();
            (xs, w)
        }
    };
    let w = SeriesVector::new(w.iter().map(|s| to_series(p, s, k)).collect())?;
    let (n_d, _) = w.newton_polygon()?.n_and_big_n()?;
    Ok(DiskExpansion { disk: *disk, w, n_d, coordinate: to_series(p, &coordinate, k), truncation: trunc, precision: k })
}

/// `p(n + 1 + δ(p, n)) + 1`.
pub fn disk_bound(p: u64, n_d: usize) -> u64 {
    p * (n_d as u64 + 1 + delta(p, n_d) as u64) + 1
}

/// `ℓ = c + ∫w`, with `c = 0` when no constants are given.
pub fn disk_log(exp: &DiskExpansion, constants: Option<&[Padic]>) -> Result<SeriesVector> {
    let l = formal_integrate(&exp.w);
    let Some(c) = constants else {
        return Ok(l);
    };
    if c.len() != l.g() {
        return Err(Error::Precondition(format!("expected {} constants, got {}", l.g(), c.len())));
    }
    let entries = l
        .entries()
        .iter()
        .zip(c)
        .map(|(s, c)| {
            let mut coeffs = s.coeffs().to_vec();
            coeffs[0] = c.clone();
            TruncatedSeries::new(s.prime(), coeffs, s.tail())
        })
        .collect::<Result<_>>()?;
    SeriesVector::new(entries)
}

/// `ℓ(τ)` for `τ ∈ pZ_p`.
pub fn log_at(l: &SeriesVector, tau: &Padic) -> Result<Vec<Padic>> {
    if tau.valuation_lower_bound() < 1 {
        return Err(Error::Precondition("point must lie in pZ_p".to_string()));
    }
    l.entries().iter().map(|s| s.eval(tau)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnalysisOptions {
    /// Starting truncation; doubled on certification failures.
    pub truncation: Option<usize>,
    /// How many doublings to allow.
    pub max_doublings: u32,
    /// Modulus exponent handed to the preparation step.
    pub modulus: u32,
    pub max_depth: Option<u32>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { truncation: None, max_doublings: 3, modulus: 8, max_depth: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiskAnalysis {
    pub expansion: DiskExpansion,
    pub log: SeriesVector,
    pub n_d: usize,
    pub bound: u64,
    /// Image of `ℓ(pZ_p)` for the constants in use (zero unless supplied).
    pub image: ReductionImage,
    pub constants_supplied: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoLogResult {
    pub p: u64,
    pub g: usize,
    pub disks: Vec<DiskAnalysis>,
    /// `ρ log(C(Q_p))`, available when every disk's constant is known.
    pub union: Option<Vec<ProjPointFp>>,
    pub sum_n_d: usize,
    pub hypotheses: Option<HypothesesReport>,
}

fn retryable(e: &Error) -> bool {
    matches!(
        e,
        Error::UncertifiableHull(_)
            | Error::InsufficientTruncation(_)
            | Error::InsufficientPrecision(_)
            | Error::NUndefined
            | Error::MinimumNotAttained
            | Error::PrecisionExhausted(_)
    )
}

/// One disk of [`analyze_disks`]; `constants` is `∫_∞^{P} ω` at the centre lift.
pub fn analyze_disk(
    curve: &GoodReductionCurve,
    disk: &ResidueDisk,
    constants: Option<&[Padic]>,
    opts: &AnalysisOptions,
) -> Result<DiskAnalysis> {
    let t0 = opts.truncation.unwrap_or(4 * curve.g + 6);
    let mut last = Error::InsufficientTruncation(t0);
    for attempt in 0..=opts.max_doublings {
        let trunc = t0 << attempt;
        let m = opts.modulus << attempt;
        let k = (trunc as u32 + 2 * m + 8).max(16);
        let run = || -> Result<DiskAnalysis> {
            let expansion = expand_at_disk(curve, disk, trunc, k)?;
            let log = disk_log(&expansion, constants)?;
            let image = image_of_series_on_pzp(&log, m, log.truncation(), opts.max_depth)?;
            let n_d = expansion.n_d;
            Ok(DiskAnalysis {
                bound: disk_bound(curve.p, n_d),
                expansion,
                log,
                n_d,
                image,
                constants_supplied: constants.is_some(),
            })
        };
        match run() {
            Ok(a) => return Ok(a),
            Err(e) if retryable(&e) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// Per-disk expansions, `n_D`, bounds and images.
///
/// `constants[i]` is `∫_∞^{P_i} ω` for the centre lift of disk `i`; it is
/// not computed here. Without it a disk's image is taken relative to its
/// centre, and the union is only reported for the single-disk case.
pub fn analyze_disks(
    curve: &GoodReductionCurve,
    constants: Option<&[Vec<Padic>]>,
    opts: &AnalysisOptions,
) -> Result<RhoLogResult> {
    let disks = residue_disks(curve);
    if let Some(c) = constants {
        if c.len() != disks.len() {
            return Err(Error::Precondition(format!("expected constants for {} disks", disks.len())));
        }
    }
    let analyses = disks
        .iter()
        .enumerate()
        .map(|(i, d)| analyze_disk(curve, d, constants.map(|c| c[i].as_slice()), opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(curve, analyses, constants.is_some()))
}

/// Collects per-disk analyses, in [`residue_disks`] order, into a result.
pub fn assemble(curve: &GoodReductionCurve, analyses: Vec<DiskAnalysis>, constants_supplied: bool) -> RhoLogResult {
    let union = (constants_supplied || analyses.len() == 1).then(|| {
        let mut pts: Vec<ProjPointFp> = analyses.iter().flat_map(|a| a.image.points.iter().cloned()).collect();
        pts.sort();
        pts.dedup();
        pts
    });
    RhoLogResult {
        p: curve.p,
        g: curve.g,
        sum_n_d: analyses.iter().map(|a| a.n_d).sum(),
        disks: analyses,
        union,
        hypotheses: (curve.p == 2).then(|| verify_hypotheses(curve)),
    }
}

/// `ρ log(C(Q_2))` for a curve whose only `F_2`-point is `∞`.
pub fn rholog_single_disk_curve(curve: &GoodReductionCurve, opts: &AnalysisOptions) -> Result<RhoLogResult> {
    if curve.p != 2 {
        return Err(Error::Precondition("single-disk analysis is for p = 2".to_string()));
    }
    let report = verify_hypotheses(curve);
    if let Some(c) = report.checks.iter().find(|c| c.status == CheckStatus::Fail) {
        return Err(Error::HypothesisFailed(c.id.name().to_string()));
    }
    analyze_disks(curve, None, opts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CheckId {
    SmoothSpecialFiber,
    MultipleDisks,
    InvolutionFixedPoints,
    NewtonPolygonIrreducible,
}

impl CheckId {
    pub fn name(self) -> &'static str {
        match self {
            CheckId::SmoothSpecialFiber => "SmoothSpecialFiber",
            CheckId::MultipleDisks => "MultipleDisks",
            CheckId::InvolutionFixedPoints => "InvolutionFixedPoints",
            CheckId::NewtonPolygonIrreducible => "NewtonPolygonIrreducible",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypothesisCheck {
    pub id: CheckId,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypothesesReport {
    pub checks: Vec<HypothesisCheck>,
    /// Endpoints of the Newton polygon of the completed square, when it is one segment.
    pub segment: Option<((usize, i64), (usize, i64))>,
}

impl HypothesesReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status == CheckStatus::Pass)
    }

    pub fn status(&self, id: CheckId) -> Option<CheckStatus> {
        self.checks.iter().find(|c| c.id == id).map(|c| c.status)
    }
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    a.abs().gcd(&b.abs())
}

/// Checks behind the single-disk computation at `p = 2`.
pub fn verify_hypotheses(curve: &GoodReductionCurve) -> HypothesesReport {
    let p = curve.p;
    let mut checks = Vec::new();
    checks.push(HypothesisCheck {
        id: CheckId::SmoothSpecialFiber,
        status: if curve.special_fiber_smooth() { CheckStatus::Pass } else { CheckStatus::Fail },
        detail: String::new(),
    });
    let affine: Vec<String> = residue_disks(curve)
        .iter()
        .filter(|d| !d.is_infinity_disk())
        .map(ToString::to_string)
        .collect();
    checks.push(HypothesisCheck {
        id: CheckId::MultipleDisks,
        status: if affine.is_empty() { CheckStatus::Pass } else { CheckStatus::Fail },
        detail: if affine.is_empty() { String::new() } else { format!("affine points {}", affine.join(", ")) },
    });
    // Fixed points of (x, y) ↦ (x, y + q(x)) lie over the roots of q̄ in F̄_p.
    let qbar = trimmed_u64(reduce(&curve.q, p));
    let inv_ok = qbar.len() == 1;
    checks.push(HypothesisCheck {
        id: CheckId::InvolutionFixedPoints,
        status: if inv_ok { CheckStatus::Pass } else { CheckStatus::Fail },
        detail: if inv_ok { String::new() } else { format!("q mod {p} has degree {}", qbar.len() as i64 - 1) },
    });

    // Newton polygon of f = (q² + 4r)/4.
    let h = curve.completed_square();
    let pts: Vec<(usize, i64)> = h
        .iter()
        .enumerate()
        .filter_map(|(i, c)| vp(c, 2).map(|v| (i, v as i64 - 2)))
        .collect();
    let d = h.len() - 1;
    let (first, last) = (pts[0], pts[pts.len() - 1]);
    let one_segment = first.0 == 0
        && last.0 == d
        && pts.iter().all(|&(i, v)| {
            // (v − v₀)·d ≥ (v_d − v₀)·i
            (v - first.1) * d as i64 >= (last.1 - first.1) * i as i64
        });
    let no_interior = gcd_i64(last.1 - first.1, d as i64) == 1;
    let (status, segment) = if one_segment && no_interior {
        (CheckStatus::Pass, Some((first, last)))
    } else if one_segment {
        (CheckStatus::Inconclusive, Some((first, last)))
    } else {
        (CheckStatus::Inconclusive, None)
    };
    checks.push(HypothesisCheck {
        id: CheckId::NewtonPolygonIrreducible,
        status,
        detail: format!("points {pts:?}"),
    });
    HypothesesReport { checks, segment }
}

fn trimmed_u64(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// `ρ(ℓ(τ))` for a sample point of the disk.
pub fn rho_at(l: &SeriesVector, tau: &Padic) -> Result<ProjPointFp> {
    rho(&log_at(l, tau)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::UpperEnd;
    use num_traits::ToPrimitive;
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    fn pt(p: u64, c: &[u64]) -> ProjPointFp {
        ProjPointFp::new(p, c.to_vec()).unwrap()
    }

    fn affine(x: u64, y: u64) -> DiskCenter {
        DiskCenter::Affine { x, y }
    }

    #[test]
    fn disk_counts() {
        let c = GoodReductionCurve::family(2).unwrap();
        let d = residue_disks(&c);
        assert_eq!(d.len(), 1);
        assert!(d[0].is_infinity_disk());

        let c = GoodReductionCurve::from_i64(3, &[], &[1, 0, 0, 0, 0, 1]).unwrap();
        let centers: Vec<DiskCenter> = residue_disks(&c).iter().map(|d| d.center).collect();
        assert_eq!(centers, [affine(0, 1), affine(0, 2), affine(2, 0), DiskCenter::Infinity]);
        assert_eq!(residue_disks(&c)[2].uniformizer, Uniformizer::YMinusY0);

        let c = GoodReductionCurve::from_i64(3, &[], &[0, 1, 0, 1]).unwrap();
        assert_eq!(residue_disks(&c).len(), 4);
    }

    #[test]
    fn bad_reduction_rejected() {
        // x³ − x² = x²(x − 1)
        assert_eq!(GoodReductionCurve::from_i64(3, &[], &[0, 0, -1, 1]), Err(Error::BadReduction));
        assert_eq!(GoodReductionCurve::from_i64(2, &[], &[1, 1, 0, 1]), Err(Error::BadReduction));
        assert_eq!(GoodReductionCurve::from_i64(5, &[], &[1, 1, 0, 5]), Err(Error::BadReduction));
        assert!(matches!(GoodReductionCurve::from_i64(3, &[], &[1, 0, 1]), Err(Error::InvalidCurve(_))));
    }

    /// Number of points over `F_p` by brute force, plus the one at infinity.
    fn brute_count(p: u64, q: &[i64], r: &[i64]) -> usize {
        let ev = |c: &[i64], x: i64| c.iter().rev().fold(0i64, |a, &b| (a * x + b).rem_euclid(p as i64));
        let mut n = 1;
        for x in 0..p as i64 {
            for y in 0..p as i64 {
                if (y * y + ev(q, x) * y - ev(r, x)).rem_euclid(p as i64) == 0 {
                    n += 1;
                }
            }
        }
        n
    }

    fn random_curve(rng: &mut ChaCha8Rng, p: u64, g: usize) -> GoodReductionCurve {
        loop {
            let mut r: Vec<i64> = (0..=2 * g).map(|_| (rng.next_u64() % 50) as i64 - 25).collect();
            r.push(1);
            let q: Vec<i64> = if p == 2 { (0..=g).map(|_| (rng.next_u64() % 4) as i64).collect() } else { Vec::new() };
            if let Ok(c) = GoodReductionCurve::from_i64(p, &q, &r) {
                return c;
            }
        }
    }

    #[test]
    fn disk_count_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in [2u64, 3, 5, 7] {
            for _ in 0..20 {
                let c = random_curve(&mut rng, p, 2);
                let q: Vec<i64> = c.q().iter().map(|x| x.to_i64().unwrap()).collect();
                let r: Vec<i64> = c.r().iter().map(|x| x.to_i64().unwrap()).collect();
                assert_eq!(residue_disks(&c).len(), brute_count(p, &q, &r));
            }
        }
    }

    fn residue_of(s: &TruncatedSeries, n: usize) -> u64 {
        s.coeff(n).residue(1).unwrap().to_u64().unwrap()
    }

    #[test]
    fn infinity_expansion_of_family() {
        for g in 2..=4 {
            let c = GoodReductionCurve::family(g).unwrap();
            let e = expand_at_disk(&c, &residue_disks(&c)[0], 4 * g + 6, 20).unwrap();
            let s = &e.coordinate;
            assert_eq!(s.coeff(2).residue(20).unwrap(), BigInt::one());
            for n in (0..2).chain(3..2 * g + 3) {
                assert!(s.coeff(n).is_zero(), "s_{n} for g={g}");
            }
            assert_eq!(s.coeff(2 * g + 3).residue(20).unwrap(), BigInt::one());
            let w = e.w.entries();
            assert_eq!(w[0].coeff(0).residue(20).unwrap(), BigInt::one());
            assert!(w[0].coeff(1).is_zero());
            for (j, wj) in w.iter().enumerate() {
                let lead = (0..wj.len()).find(|&n| !wj.coeff(n).is_zero()).unwrap();
                assert_eq!(lead, 2 * j);
                assert_eq!(wj.coeff(lead).residue(20).unwrap(), BigInt::one());
                assert!(wj.coeffs().iter().all(|c| c.valuation_lower_bound() >= 0));
            }
            assert_eq!(e.n_d, 0);
        }
    }

    #[test]
    fn log_leading_denominators() {
        let g = 3;
        let c = GoodReductionCurve::family(g).unwrap();
        let e = expand_at_disk(&c, &residue_disks(&c)[0], 4 * g + 6, 20).unwrap();
        let l = disk_log(&e, None).unwrap();
        for j in 0..g {
            let lj = &l.entries()[j];
            let lead = 2 * j + 1;
            let want = Padic::from_ratio(2, 1, lead as i64, 20).unwrap();
            let got = lj.coeff(lead);
            assert_eq!(got.residue(10).unwrap(), want.residue(10).unwrap());
            assert!((0..lead).all(|n| lj.coeff(n).is_zero()));
        }
    }

    #[test]
    fn family_image_is_single_point() {
        for g in 2..=4 {
            let c = GoodReductionCurve::family(g).unwrap();
            let res = rholog_single_disk_curve(&c, &AnalysisOptions::default()).unwrap();
            let mut want = vec![0u64; g];
            want[0] = 1;
            assert_eq!(res.union.as_deref(), Some(&[pt(2, &want)][..]), "g={g}");
            assert!(res.hypotheses.as_ref().unwrap().all_pass());
            assert!(res.sum_n_d <= 2 * g - 2);
            assert!(res.disks[0].image.len() as u64 <= res.disks[0].bound);
        }
    }

    #[test]
    fn family_log_vanishes_only_at_infinity() {
        let g = 2;
        let c = GoodReductionCurve::family(g).unwrap();
        let e = expand_at_disk(&c, &residue_disks(&c)[0], 14, 20).unwrap();
        let l = disk_log(&e, None).unwrap();
        // ℓ₁(2u)/u on the closed disk u ∈ Z_2.
        let l1 = l.entries()[0].substitute_p_power(1).shift_down(1).unwrap();
        let np = SeriesVector::new(vec![l1]).unwrap().newton_polygon().unwrap();
        assert_eq!(np.n_and_big_n().unwrap(), (0, UpperEnd::Bounded(0)));
    }

    #[test]
    fn hypotheses_examples() {
        let r = verify_hypotheses(&GoodReductionCurve::family(3).unwrap());
        assert!(r.all_pass());
        assert_eq!(r.segment, Some(((0, -2), (7, 0))));

        let c = GoodReductionCurve::from_i64(2, &[1], &[0, 0, 0, 0, 0, 1]).unwrap();
        let r = verify_hypotheses(&c);
        assert_eq!(r.status(CheckId::MultipleDisks), Some(CheckStatus::Fail));
        assert_eq!(
            rholog_single_disk_curve(&c, &AnalysisOptions::default()),
            Err(Error::HypothesisFailed("MultipleDisks".to_string()))
        );

        // y² + xy = x⁵ + 1: q̄ = x vanishes at 0.
        let c = GoodReductionCurve::from_i64(2, &[0, 1], &[1, 0, 0, 0, 0, 1]).unwrap();
        assert_eq!(verify_hypotheses(&c).status(CheckId::InvolutionFixedPoints), Some(CheckStatus::Fail));
    }

    #[test]
    fn weierstrass_disk_n_d() {
        let c = GoodReductionCurve::from_i64(3, &[], &[1, 0, 0, 0, 0, 1]).unwrap();
        let d = residue_disks(&c)[2];
        let e = expand_at_disk(&c, &d, 14, 20).unwrap();
        // ω_j(0) = x₀^{g−j}/F_x(x₀, 0) directly over F_3, x₀ = 2, F_x = −5x⁴.
        let fx = (-5i64 * 16).rem_euclid(3);
        let oracle_n = if (0..2).any(|j| 2i64.pow(1 - j) * fx % 3 != 0) { 0 } else { 1 };
        assert_eq!(e.n_d, oracle_n);
        assert_eq!(residue_of(&e.coordinate, 0), 2);
    }

    #[test]
    fn expansion_satisfies_curve() {
        let c = GoodReductionCurve::from_i64(5, &[], &[2, 1, 0, 3, 0, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for d in residue_disks(&c) {
            let e = expand_at_disk(&c, &d, 20, 30).unwrap();
            for _ in 0..5 {
                let tau = Padic::from_int(5, 5 * (rng.next_u64() % 1000) as i64, 30);
                let v = e.coordinate.eval(&tau).unwrap();
                let (x, y) = match d.center {
                    DiskCenter::Affine { x, .. } if d.uniformizer == Uniformizer::XMinusX0 => {
                        (Padic::from_int(5, x as i64, 30).checked_add(&tau).unwrap(), v)
                    }
                    DiskCenter::Affine { y, .. } => (v, Padic::from_int(5, y as i64, 30).checked_add(&tau).unwrap()),
                    DiskCenter::Infinity => continue,
                };
                let fx = c.r().iter().rev().fold(Padic::exact_zero(5), |a, b| {
                    a.checked_mul(&x).unwrap().checked_add(&Padic::from_bigint(5, b, 40)).unwrap()
                });
                let diff = y.checked_mul(&y).unwrap().checked_sub(&fx).unwrap();
                assert!(diff.valuation_lower_bound() >= 15, "{d}");
            }
        }
    }

    #[test]
    fn random_curves_bounds_and_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for p in [3u64, 5] {
            for _ in 0..6 {
                let c = random_curve(&mut rng, p, 2);
                let res = analyze_disks(&c, None, &AnalysisOptions::default()).unwrap();
                assert!(res.sum_n_d <= 2 * c.genus() - 2);
                for a in &res.disks {
                    assert!(a.image.len() as u64 <= a.bound);
                    for _ in 0..30 {
                        let tau = Padic::from_int(p, p as i64 * (1 + (rng.next_u64() % 10_000) as i64), 40);
                        let q = rho_at(&a.log, &tau).unwrap();
                        assert!(a.image.contains(&q), "{c} disk {} τ={tau:?}", a.expansion.disk);
                    }
                }
            }
        }
    }

    #[test]
    fn scaling_does_not_change_image() {
        let c = GoodReductionCurve::from_i64(3, &[], &[1, 0, 0, 0, 0, 1]).unwrap();
        let d = residue_disks(&c)[0];
        let e = expand_at_disk(&c, &d, 14, 30).unwrap();
        let l = disk_log(&e, None).unwrap();
        let base = image_of_series_on_pzp(&l, 8, l.truncation(), None).unwrap();
        for s in [Padic::from_int(3, 2, 30), Padic::from_int(3, 9, 30), Padic::from_int(3, 27 * 5, 40)] {
            let scaled = SeriesVector::new(l.entries().iter().map(|x| x.scale(&s).unwrap()).collect()).unwrap();
            let img = image_of_series_on_pzp(&scaled, 8, scaled.truncation(), None).unwrap();
            assert_eq!(img.points, base.points);
        }
    }
}
