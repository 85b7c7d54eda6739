//! Truncated power series over `Q_p` and their Newton polygons.
//!
//! A series stores its first `T` coefficients together with a [`Tail`]
//! describing what is known about every coefficient of index `≥ T`. Newton
//! polygons are certified against both zero-to-precision coefficients and
//! the tail: a vertex is *stable* when no admissible value of the unknown
//! coefficients could remove it.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::padic::{Padic, EXACT};

type Q = Ratio<i128>;

/// `⌊log_p n⌋` for `n ≥ 1`.
pub fn ilog(p: u64, n: usize) -> i64 {
    let mut k = 0;
    let mut m = n as u64;
    while m >= p {
        m /= p;
        k += 1;
    }
    k
}

/// Valuation information about the coefficients beyond the truncation order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tail {
    /// All further coefficients are exactly zero.
    Exact,
    /// `v(c_n) ≥ base + slope·n − ⌊log_p n⌋·[log_loss]` for every `n ≥ T`.
    Bounded { base: i64, slope: i64, log_loss: bool },
    Unknown,
}

impl Tail {
    pub fn at_least(base: i64) -> Self {
        Tail::Bounded { base, slope: 0, log_loss: false }
    }

    fn from_min(m: Option<i64>) -> Self {
        match m {
            None => Tail::Unknown,
            Some(b) if b >= EXACT => Tail::Exact,
            Some(b) => Tail::at_least(b),
        }
    }

    /// Lower bound for the valuations of all coefficients of index `≥ t`;
    /// `None` when unbounded below.
    pub fn min_from(&self, p: u64, t: usize) -> Option<i64> {
        match *self {
            Tail::Exact => Some(EXACT),
            Tail::Unknown => None,
            Tail::Bounded { base, slope, log_loss } => {
                if slope < 0 || (log_loss && slope == 0) {
                    return None;
                }
                let n = t.max(1);
                // slope·n − ⌊log_p n⌋ is nondecreasing once slope ≥ 1.
                let loss = if log_loss { ilog(p, n) } else { 0 };
                Some(base + slope * n as i64 - loss)
            }
        }
    }
}

fn add_bounds(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    Some((a? + b?).min(EXACT))
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    Some(a?.min(b?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    p: u64,
    coeffs: Vec<Padic>,
    tail: Tail,
}

impl TruncatedSeries {
    pub fn new(p: u64, coeffs: Vec<Padic>, tail: Tail) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Precondition("truncation order must be at least 1".to_string()));
        }
        if let Some(c) = coeffs.iter().find(|c| c.prime() != p) {
            return Err(Error::PrimeMismatch(p, c.prime()));
        }
        Ok(TruncatedSeries { p, coeffs, tail })
    }

    /// A polynomial: coefficients beyond the stored ones are exactly zero.
    pub fn polynomial(p: u64, coeffs: Vec<Padic>) -> Result<Self> {
        Self::new(p, coeffs, Tail::Exact)
    }

    /// Integer coefficients at a common absolute precision; zeros are exact.
    pub fn from_ints(p: u64, coeffs: &[i64], abs_prec: i64, tail: Tail) -> Self {
        let coeffs = coeffs
            .iter()
            .map(|&c| {
                if c == 0 {
                    Padic::exact_zero(p)
                } else {
                    Padic::from_int(p, c, abs_prec)
                }
            })
            .collect();
        TruncatedSeries { p, coeffs, tail }
    }

    pub fn zero(p: u64, len: usize) -> Self {
        TruncatedSeries { p, coeffs: vec![Padic::exact_zero(p); len.max(1)], tail: Tail::Exact }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// Truncation order `T`.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Padic] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &Padic {
        &self.coeffs[n]
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn with_tail(mut self, tail: Tail) -> Self {
        self.tail = tail;
        self
    }

    /// Every coefficient (stored and beyond) is an exact zero.
    pub fn is_exact_zero(&self) -> bool {
        self.tail == Tail::Exact && self.coeffs.iter().all(Padic::is_exact_zero)
    }

    /// Lower bound on the valuation of every coefficient of index `≥ from`.
    pub fn bound_from(&self, from: usize) -> Option<i64> {
        let stored = self.coeffs.iter().skip(from).map(Padic::valuation_lower_bound).min();
        let tail = self.tail.min_from(self.p, self.len().max(from));
        match stored {
            Some(s) => min_opt(Some(s), tail),
            None => tail,
        }
    }

    pub fn truncate(&self, len: usize) -> Self {
        if len >= self.len() {
            return self.clone();
        }
        TruncatedSeries {
            p: self.p,
            coeffs: self.coeffs[..len.max(1)].to_vec(),
            tail: Tail::from_min(self.bound_from(len.max(1))),
        }
    }

    fn combine_tail(&self, other: &Self, len: usize) -> Tail {
        if self.tail == Tail::Exact && other.tail == Tail::Exact && self.len() == other.len() {
            return Tail::Exact;
        }
        Tail::from_min(min_opt(self.bound_from(len), other.bound_from(len)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.checked_add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.checked_sub(b))
    }

    fn zip(&self, other: &Self, f: impl Fn(&Padic, &Padic) -> Result<Padic>) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        let len = self.len().min(other.len());
        let coeffs = (0..len)
            .map(|i| f(&self.coeffs[i], &other.coeffs[i]))
            .collect::<Result<Vec<_>>>()?;
        Ok(TruncatedSeries { p: self.p, coeffs, tail: self.combine_tail(other, len) })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        let len = self.len().min(other.len());
        let mut coeffs = vec![Padic::exact_zero(self.p); len];
        for (i, a) in self.coeffs.iter().take(len).enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(len - i).enumerate() {
                if b.is_exact_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].checked_add(&a.checked_mul(b)?)?;
            }
        }
        let tail = Tail::from_min(add_bounds(self.bound_from(0), other.bound_from(0)));
        Ok(TruncatedSeries { p: self.p, coeffs, tail })
    }

    pub fn scale(&self, c: &Padic) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(|a| a.checked_mul(c)).collect::<Result<Vec<_>>>()?;
        let tail = match self.tail {
            Tail::Exact => Tail::Exact,
            Tail::Bounded { base, slope, log_loss } => match c.valuation() {
                Some(v) => Tail::Bounded { base: base + v, slope, log_loss },
                None if c.is_exact_zero() => Tail::Exact,
                None => Tail::Unknown,
            },
            Tail::Unknown => Tail::Unknown,
        };
        Ok(TruncatedSeries { p: self.p, coeffs, tail })
    }

    /// `t ↦ p^k·t`, exactly.
    pub fn substitute_p_power(&self, k: i64) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(n, a)| a.shift(k * n as i64)).collect();
        let tail = match self.tail {
            Tail::Bounded { base, slope, log_loss } => Tail::Bounded { base, slope: slope + k, log_loss },
            t => t,
        };
        TruncatedSeries { p: self.p, coeffs, tail }
    }

    /// Drops the first `k` coefficients, which must be exact zeros (division by `t^k`).
    pub fn shift_down(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Ok(self.clone());
        }
        if k >= self.len() {
            return Err(Error::InsufficientTruncation(self.len()));
        }
        if !self.coeffs[..k].iter().all(Padic::is_exact_zero) {
            return Err(Error::Precondition(format!("series is not divisible by t^{k}")));
        }
        let tail = match self.tail {
            Tail::Bounded { base, slope, log_loss: false } => {
                Tail::Bounded { base: base + slope * k as i64, slope, log_loss: false }
            }
            Tail::Exact => Tail::Exact,
            _ => Tail::from_min(self.tail.min_from(self.p, self.len())),
        };
        Ok(TruncatedSeries { p: self.p, coeffs: self.coeffs[k..].to_vec(), tail })
    }

    /// Multiplicative inverse; the constant term must be nonzero to precision.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::DivisionByZeroToPrecision);
        }
        let inv0 = c0.inverse()?;
        let mut out: Vec<Padic> = Vec::with_capacity(self.len());
        out.push(inv0.clone());
        for n in 1..self.len() {
            let mut acc = Padic::exact_zero(self.p);
            for k in 1..=n {
                if self.coeffs[k].is_exact_zero() || out[n - k].is_exact_zero() {
                    continue;
                }
                acc = acc.checked_add(&self.coeffs[k].checked_mul(&out[n - k])?)?;
            }
            out.push(-(acc.checked_mul(&inv0)?));
        }
        let integral_unit = c0.is_unit() && self.bound_from(0).is_some_and(|b| b >= 0);
        let tail = if integral_unit { Tail::at_least(0) } else { Tail::Unknown };
        Ok(TruncatedSeries { p: self.p, coeffs: out, tail })
    }

    pub fn derivative(&self) -> Self {
        let coeffs: Vec<Padic> = if self.len() <= 1 {
            vec![Padic::exact_zero(self.p)]
        } else {
            (1..self.len()).map(|n| self.coeffs[n].mul_int(&BigInt::from(n))).collect()
        };
        let tail = match self.tail {
            Tail::Exact => Tail::Exact,
            Tail::Bounded { base, slope, log_loss: false } => {
                Tail::Bounded { base: base + slope, slope, log_loss: false }
            }
            _ => Tail::Unknown,
        };
        TruncatedSeries { p: self.p, coeffs, tail }
    }

    /// The antiderivative vanishing at `0`; one coefficient longer than `self`.
    pub fn integrate(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.len() + 1);
        coeffs.push(Padic::exact_zero(self.p));
        for (n, a) in self.coeffs.iter().enumerate() {
            coeffs.push(if a.is_exact_zero() { a.clone() } else { a.div_int(&BigInt::from(n + 1)) });
        }
        let tail = match self.tail {
            Tail::Exact => Tail::Exact,
            Tail::Bounded { base, slope, log_loss: false } => {
                Tail::Bounded { base: base - slope, slope, log_loss: true }
            }
            _ => Tail::Unknown,
        };
        TruncatedSeries { p: self.p, coeffs, tail }
    }

    /// `Σ c_n τ^n` with the precision capped by what the tail allows.
    pub fn eval(&self, tau: &Padic) -> Result<Padic> {
        let mut acc = Padic::exact_zero(self.p);
        for c in self.coeffs.iter().rev() {
            acc = acc.checked_mul(tau)?.checked_add(c)?;
        }
        let vt = tau.valuation_lower_bound();
        let cap = match self.tail {
            Tail::Exact => None,
            Tail::Bounded { base, slope, log_loss } => {
                let shifted = Tail::Bounded { base, slope: slope + vt, log_loss };
                Some(shifted.min_from(self.p, self.len()).ok_or_else(|| {
                    Error::InsufficientPrecision("series does not converge at this point".to_string())
                })?)
            }
            Tail::Unknown => {
                return Err(Error::InsufficientPrecision("unknown tail".to_string()));
            }
        };
        Ok(match cap {
            Some(c) => acc.with_abs_prec(c),
            None => acc,
        })
    }
}

/// Horner evaluation of a polynomial at a series.
pub fn eval_poly_at_series(poly: &[Padic], s: &TruncatedSeries) -> Result<TruncatedSeries> {
    let p = s.prime();
    let mut acc = TruncatedSeries::zero(p, s.len());
    for c in poly.iter().rev() {
        acc = acc.mul(s)?;
        let mut constant = vec![Padic::exact_zero(p); s.len()];
        constant[0] = c.clone();
        acc = acc.add(&TruncatedSeries::polynomial(p, constant)?)?;
    }
    Ok(acc)
}

/// A vector of series sharing a prime and truncation order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesVector {
    entries: Vec<TruncatedSeries>,
}

impl SeriesVector {
    pub fn new(entries: Vec<TruncatedSeries>) -> Result<Self> {
        let Some(first) = entries.first() else {
            return Err(Error::Precondition("empty series vector".to_string()));
        };
        for e in &entries {
            if e.prime() != first.prime() {
                return Err(Error::PrimeMismatch(first.prime(), e.prime()));
            }
            if e.len() != first.len() {
                return Err(Error::Precondition("entries have different truncation orders".to_string()));
            }
        }
        Ok(SeriesVector { entries })
    }

    pub fn entries(&self) -> &[TruncatedSeries] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<TruncatedSeries> {
        self.entries
    }

    pub fn g(&self) -> usize {
        self.entries.len()
    }

    pub fn prime(&self) -> u64 {
        self.entries[0].prime()
    }

    pub fn truncation(&self) -> usize {
        self.entries[0].len()
    }

    pub fn newton_polygon(&self) -> Result<NewtonPolygon> {
        newton_polygon(self)
    }
}

/// Componentwise antiderivative vanishing at `0`.
pub fn formal_integrate(w: &SeriesVector) -> SeriesVector {
    SeriesVector { entries: w.entries.iter().map(TruncatedSeries::integrate).collect() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HullVertex {
    pub n: usize,
    pub v: i64,
    pub stable: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpperEnd {
    Bounded(usize),
    UnboundedWithinTruncation,
}

/// The lower convex hull of `{(n, v_p(w_{j,n}))}` up to its last
/// minimum-height vertex (segments of positive slope are not kept).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    vertices: Vec<HullVertex>,
    truncation: usize,
    /// Indices whose coefficients are all zero to precision, with the
    /// smallest precision bound among them.
    unknowns: Vec<(usize, i64)>,
    tail_bound: Option<i64>,
}

fn cross(a: (i128, i128), b: (i128, i128), c: (i128, i128)) -> i128 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn lower_hull(points: &[(usize, i64)]) -> Vec<(usize, i64)> {
    let mut hull: Vec<(usize, i64)> = Vec::new();
    for &pt in points {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let c = (
                (a.0 as i128, a.1 as i128),
                (b.0 as i128, b.1 as i128),
                (pt.0 as i128, pt.1 as i128),
            );
            if cross(c.0, c.1, c.2) <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    hull
}

/// Full lower convex hull of a finite point set (sorted, distinct `n`),
/// positive slopes included. Used for polynomial Newton polygons.
pub fn full_lower_hull(points: &[(usize, i64)]) -> Vec<(usize, i64)> {
    let mut pts = points.to_vec();
    pts.sort();
    lower_hull(&pts)
}

#[derive(Clone, Copy)]
struct Bound {
    value: Q,
    strict: bool,
}

fn feasible(lowers: &[Bound], uppers: &[Bound]) -> bool {
    let lo = lowers.iter().max_by(|a, b| a.value.cmp(&b.value).then(a.strict.cmp(&b.strict)));
    let hi = uppers.iter().min_by(|a, b| a.value.cmp(&b.value).then(b.strict.cmp(&a.strict)));
    match (lo, hi) {
        (Some(l), Some(h)) => l.value < h.value || (l.value == h.value && !l.strict && !h.strict),
        _ => true,
    }
}

fn slope(a: (usize, i64), b: (usize, i64)) -> Q {
    Q::new(b.1 as i128 - a.1 as i128, b.0 as i128 - a.0 as i128)
}

/// Newton polygon of a vector of series.
pub fn newton_polygon(w: &SeriesVector) -> Result<NewtonPolygon> {
    let t = w.truncation();
    let p = w.prime();
    let mut known: Vec<(usize, i64)> = Vec::new();
    let mut unknowns: Vec<(usize, i64)> = Vec::new();
    for n in 0..t {
        let mut best: Option<i64> = None;
        let mut unknown: Option<i64> = None;
        for e in w.entries() {
            let c = e.coeff(n);
            match c.valuation() {
                Some(v) => best = Some(best.map_or(v, |b: i64| b.min(v))),
                None if c.is_exact_zero() => {}
                None => unknown = Some(unknown.map_or(c.abs_prec(), |u: i64| u.min(c.abs_prec()))),
            }
        }
        if let Some(b) = best {
            known.push((n, b));
        }
        if let Some(u) = unknown {
            if best.is_none_or(|b| u < b) {
                unknowns.push((n, u));
            }
        }
    }
    if known.is_empty() {
        return Err(Error::AllZeroToPrecision);
    }
    let tail_bound = w
        .entries()
        .iter()
        .map(|e| e.tail().min_from(p, t))
        .try_fold(EXACT, |acc, b| b.map(|b| acc.min(b)));

    let hull = lower_hull(&known);
    let vmin = hull.iter().map(|h| h.1).min().expect("nonempty");
    let last_min = hull.iter().rposition(|h| h.1 == vmin).expect("nonempty");

    let mut vertices = Vec::with_capacity(last_min + 1);
    for i in 0..=last_min {
        let (n, v) = hull[i];
        let mut lowers = Vec::new();
        let mut uppers = Vec::new();
        if i > 0 {
            lowers.push(Bound { value: slope(hull[i - 1], hull[i]), strict: true });
        }
        if i + 1 < hull.len() {
            uppers.push(Bound { value: slope(hull[i], hull[i + 1]), strict: true });
        }
        for &(nk, bk) in &unknowns {
            let s = slope((n, v), (nk, bk));
            if nk < n {
                lowers.push(Bound { value: s, strict: true });
            } else {
                uppers.push(Bound { value: s, strict: true });
            }
        }
        let first = i == 0 && unknowns.iter().all(|u| u.0 > n);
        match tail_bound {
            Some(b) if b >= EXACT => {}
            Some(b) => {
                uppers.push(Bound { value: Q::from_integer(0), strict: false });
                uppers.push(Bound { value: slope((n, v), (t, b)), strict: true });
            }
            None => {}
        }
        let stable = if tail_bound.is_none() {
            // Arbitrarily low coefficients may follow; only a leftmost point
            // is guaranteed to remain extreme.
            first && feasible(&lowers, &uppers[..uppers.len().min(1 + usize::from(i + 1 < hull.len()))])
        } else {
            feasible(&lowers, &uppers)
        };
        vertices.push(HullVertex { n, v, stable });
    }
    Ok(NewtonPolygon { vertices, truncation: t, unknowns, tail_bound })
}

impl NewtonPolygon {
    pub fn vertices(&self) -> &[HullVertex] {
        &self.vertices
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn min_height(&self) -> i64 {
        self.vertices.iter().map(|v| v.v).min().expect("nonempty")
    }

    /// Lower bound on coefficient valuations beyond the truncation (`None`: unknown).
    pub fn tail_bound(&self) -> Option<i64> {
        self.tail_bound
    }

    /// Slopes between consecutive vertices.
    pub fn slopes(&self) -> Vec<Ratio<i128>> {
        self.vertices
            .windows(2)
            .map(|w| slope((w[0].n, w[0].v), (w[1].n, w[1].v)))
            .collect()
    }

    /// `(n_w, N_w)`: first and last x-coordinates of the minimum-height vertices.
    pub fn n_and_big_n(&self) -> Result<(usize, UpperEnd)> {
        let vmin = self.min_height();
        let first = self.vertices.iter().find(|h| h.v == vmin).expect("nonempty");
        let last = self.vertices.last().expect("nonempty");
        match self.tail_bound {
            None => return Err(Error::MinimumNotAttained),
            Some(b) if b < vmin => return Err(Error::MinimumNotAttained),
            _ => {}
        }
        if !first.stable {
            return Err(Error::UncertifiableHull(format!("vertex ({}, {}) is not stable", first.n, first.v)));
        }
        if let Some(&(nk, bk)) = self.unknowns.iter().find(|(nk, bk)| *nk < first.n && *bk <= vmin) {
            return Err(Error::UncertifiableHull(format!(
                "coefficient {nk} is only known to be divisible by p^{bk}"
            )));
        }
        if self.unknowns.iter().any(|&(nk, bk)| bk < vmin && nk > first.n) {
            return Err(Error::UncertifiableHull("a coefficient right of n_w could lie lower".to_string()));
        }
        let right_ok = self.tail_bound.is_some_and(|b| b > vmin)
            && self.unknowns.iter().all(|&(nk, bk)| nk < last.n || bk > vmin);
        let upper = if right_ok { UpperEnd::Bounded(last.n) } else { UpperEnd::UnboundedWithinTruncation };
        Ok((first.n, upper))
    }
}

pub fn n_and_big_n(np: &NewtonPolygon) -> Result<(usize, UpperEnd)> {
    np.n_and_big_n()
}

/// Number of zeros (with multiplicity) on the open unit disk: `n_w`.
pub fn count_zeros_unit_disk(w: &TruncatedSeries) -> Result<usize> {
    let v = SeriesVector::new(vec![w.clone()])?;
    Ok(newton_polygon(&v)?.n_and_big_n()?.0)
}

fn vp_usize(n: usize, p: u64) -> u32 {
    crate::arith::vp_u64(n as u64, p)
}

/// `max{d ≥ 0 : v_p(n+1) + d ≤ v_p(n+d+1)}` by direct scan.
pub fn delta(p: u64, n: usize) -> usize {
    let base = vp_usize(n + 1, p) as usize;
    let mut best = 0;
    let mut d = 0usize;
    let mut pd: u128 = 1;
    // For p^d > n+d+1 the condition fails, and p^d − d only grows.
    while pd <= (n + d + 1) as u128 {
        if base + d <= vp_usize(n + d + 1, p) as usize {
            best = d;
        }
        d += 1;
        pd *= p as u128;
    }
    best
}

/// `true` when every coefficient is zero modulo `p^m` (used to certify reconstructions).
pub fn is_zero_mod(s: &TruncatedSeries, m: i64) -> bool {
    s.coeffs().iter().all(|c| c.valuation().is_none_or(|v| v >= m) && (c.valuation().is_some() || c.abs_prec() >= m))
}

#[doc(hidden)]
pub fn _bigint_is_zero(n: &BigInt) -> bool {
    n.is_zero()
}
