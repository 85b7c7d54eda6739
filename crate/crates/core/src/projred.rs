//! The reduction map `ρ: Q_p^g \ {0} → P^{g−1}(F_p)` and certified images of
//! polynomial and power-series maps under it.
//!
//! Images are computed by subdividing the domain into disks `c + p^r·Z_p`:
//! on each disk the map is recentred and divided by its `p`-content; if the
//! result reduces to a constant vector mod `p` the disk is certified,
//! otherwise it is split into `p` subdisks.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{inv_mod, pow_p, small_mod, vp};
use crate::error::{Error, Result};
use crate::padic::Padic;
use crate::series::{SeriesVector, TruncatedSeries, UpperEnd};
use crate::weierstrass::weierstrass_prepare;
use crate::zpoly::{eval_mod_p, resultant_valuation, DetValuation, ZpPoly};

/// A point of `P^{g−1}(F_p)` whose first nonzero coordinate is `1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjPointFp {
    p: u64,
    coords: Vec<u64>,
}

impl ProjPointFp {
    pub fn new(p: u64, coords: Vec<u64>) -> Result<Self> {
        let mut coords: Vec<u64> = coords.into_iter().map(|c| c % p).collect();
        let Some(&lead) = coords.iter().find(|&&c| c != 0) else {
            return Err(Error::AllZeroToPrecision);
        };
        let inv = inv_mod(&BigInt::from(lead), &BigInt::from(p)).expect("p prime");
        let inv = small_mod(&inv, p) as u128;
        for c in &mut coords {
            *c = ((*c as u128 * inv) % p as u128) as u64;
        }
        Ok(ProjPointFp { p, coords })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }
}

impl fmt::Display for ProjPointFp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(":")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// `ρ(v)`: scale by the minimal valuation and reduce mod `p`.
pub fn rho(v: &[Padic]) -> Result<ProjPointFp> {
    let p = v.first().ok_or(Error::AllZeroToPrecision)?.prime();
    if let Some(x) = v.iter().find(|x| x.prime() != p) {
        return Err(Error::PrimeMismatch(p, x.prime()));
    }
    let m = v.iter().filter_map(Padic::valuation).min().ok_or(Error::AllZeroToPrecision)?;
    let mut coords = Vec::with_capacity(v.len());
    for x in v {
        coords.push(match x.valuation() {
            Some(k) if k == m => x.unit_residue().expect("nonzero"),
            Some(_) => 0,
            None if x.is_exact_zero() || x.abs_prec() > m => 0,
            None => {
                return Err(Error::InsufficientPrecision(alloc::format!(
                    "entry known only mod p^{}, minimal valuation {m}",
                    x.abs_prec()
                )))
            }
        });
    }
    ProjPointFp::new(p, coords)
}

/// `ρ` of an integer vector.
pub fn rho_int(p: u64, v: &[BigInt]) -> Option<ProjPointFp> {
    let m = v.iter().filter_map(|x| vp(x, p)).min()?;
    let q = pow_p(p, m);
    let coords = v.iter().map(|x| small_mod(&(x / &q), p)).collect();
    ProjPointFp::new(p, coords).ok()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    P1,
    Zp,
    PZp,
}

/// Which affine coordinate a certified disk is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Chart {
    /// The coordinate `t`.
    Finite,
    /// `u = 1/t`; the disk `u ∈ pZ_p` contains `∞`.
    Infinity,
}

/// `{center + p^radius · Z_p}` in the given chart, on which `ρ∘f` equals `value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertDisk {
    pub chart: Chart,
    pub center: BigInt,
    pub radius: u32,
    pub value: ProjPointFp,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionImage {
    /// Sorted, without repetition.
    pub points: Vec<ProjPointFp>,
    pub certificate: Vec<CertDisk>,
    pub max_depth_used: u32,
    /// `x = C·y`: recovers input coordinates from the aligned ones used internally.
    pub codomain_change: Option<Vec<Vec<i64>>>,
}

impl ReductionImage {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, q: &ProjPointFp) -> bool {
        self.points.binary_search(q).is_ok()
    }

    fn from_disks(certificate: Vec<CertDisk>, max_depth_used: u32) -> Self {
        let points: BTreeSet<ProjPointFp> = certificate.iter().map(|d| d.value.clone()).collect();
        ReductionImage { points: points.into_iter().collect(), certificate, max_depth_used, codomain_change: None }
    }
}

struct Walk {
    p: u64,
    max_depth: u32,
    disks: Vec<CertDisk>,
    deepest: u32,
    exceeded: bool,
}

impl Walk {
    fn subdivide(&mut self, chart: Chart, center: BigInt, radius: u32, g: &[ZpPoly], depth: u32) -> Result<()> {
        self.deepest = self.deepest.max(depth);
        let content = g
            .iter()
            .filter_map(ZpPoly::content)
            .min()
            .ok_or_else(|| Error::InsufficientPrecision("map vanishes to precision on a disk".into()))?;
        let g: Vec<ZpPoly> = g.iter().map(|f| f.div_p_pow(content)).collect();
        let reds: Vec<Vec<u64>> = g.iter().map(ZpPoly::reduce_mod_p).collect();
        if reds.iter().all(|r| r.len() <= 1) {
            let value = ProjPointFp::new(self.p, reds.iter().map(|r| r.first().copied().unwrap_or(0)).collect())
                .expect("content removed");
            self.disks.push(CertDisk { chart, center, radius, value });
            return Ok(());
        }
        let step = pow_p(self.p, radius);
        for s0 in 0..self.p {
            let sub_center = &center + &step * BigInt::from(s0);
            let vals: Vec<u64> = reds.iter().map(|r| eval_mod_p(r, s0, self.p)).collect();
            if let Ok(value) = ProjPointFp::new(self.p, vals) {
                self.disks.push(CertDisk { chart, center: sub_center, radius: radius + 1, value });
                continue;
            }
            if depth + 1 > self.max_depth {
                self.exceeded = true;
                continue;
            }
            let s = BigInt::from(s0);
            let next: Vec<ZpPoly> = g.iter().map(|f| f.taylor_shift(&s).scale_var_p(1)).collect();
            self.subdivide(chart, sub_center, radius + 1, &next, depth + 1)?;
        }
        Ok(())
    }
}

fn dv_value(d: DetValuation) -> Option<u32> {
    match d {
        DetValuation::Zero => None,
        DetValuation::Exactly(v) | DetValuation::AtLeast(v) => Some(v),
    }
}

fn max_pairwise_resultant(f: &[ZpPoly]) -> Option<u32> {
    let mut best = None;
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            if let Some(v) = resultant_valuation(&f[i], &f[j]).and_then(dv_value) {
                best = Some(best.map_or(v, |b: u32| b.max(v)));
            }
        }
    }
    best
}

fn reversed_all(f: &[ZpPoly]) -> Vec<ZpPoly> {
    let d = f.iter().filter_map(ZpPoly::degree).max().unwrap_or(0);
    f.iter().map(|h| h.reversed(d)).collect()
}

/// `2·(1 + max v_p(Res(f_i, f_j)))` over nonzero resultants, both charts for `P1`.
pub fn default_max_depth(f: &[ZpPoly], domain: Domain) -> u32 {
    let mut m = max_pairwise_resultant(f);
    if domain == Domain::P1 {
        if let Some(v) = max_pairwise_resultant(&reversed_all(f)) {
            m = Some(m.map_or(v, |b| b.max(v)));
        }
    }
    2 * (1 + m.unwrap_or(0))
}

/// Fixed combinations used to detect a common factor of exact components.
fn has_common_factor(f: &[ZpPoly]) -> bool {
    let nonzero: Vec<&ZpPoly> = f.iter().filter(|h| !h.is_zero()).collect();
    if nonzero.iter().any(|h| h.prec().is_some()) {
        return false;
    }
    let Some(h1) = nonzero.iter().min_by_key(|h| h.degree()).copied() else {
        return false;
    };
    if h1.degree() == Some(0) {
        return false;
    }
    let rest: Vec<&ZpPoly> = nonzero.iter().filter(|h| !core::ptr::eq(**h, h1)).copied().collect();
    if rest.is_empty() {
        return true;
    }
    for base in [2i64, 3, 7] {
        let mut comb = ZpPoly::exact(h1.prime(), Vec::new());
        let mut lam = BigInt::one();
        for h in &rest {
            comb = comb.add(&h.scale(&lam));
            lam *= base;
        }
        if comb.is_zero() {
            continue;
        }
        if resultant_valuation(h1, &comb) != Some(DetValuation::Zero) {
            return false;
        }
    }
    true
}

/// Exact `ρ(f(domain))` for a polynomial map `f = (f_1, …, f_g)`.
pub fn image_of_poly_map(p: u64, f: &[ZpPoly], domain: Domain, max_depth: Option<u32>) -> Result<ReductionImage> {
    if f.is_empty() || f.iter().all(ZpPoly::is_zero) {
        return Err(Error::AllZeroToPrecision);
    }
    if let Some(h) = f.iter().find(|h| h.prime() != p) {
        return Err(Error::PrimeMismatch(p, h.prime()));
    }
    if f.len() == 1 {
        let value = ProjPointFp::new(p, vec![1])?;
        let (chart, radius) = if domain == Domain::PZp { (Chart::Finite, 1) } else { (Chart::Finite, 0) };
        return Ok(ReductionImage::from_disks(vec![CertDisk { chart, center: BigInt::zero(), radius, value }], 0));
    }
    if has_common_factor(f) {
        return Err(Error::CommonRoot);
    }
    let max_depth = max_depth.unwrap_or_else(|| default_max_depth(f, domain));
    let mut walk = Walk { p, max_depth, disks: Vec::new(), deepest: 0, exceeded: false };
    match domain {
        Domain::Zp => walk.subdivide(Chart::Finite, BigInt::zero(), 0, f, 0)?,
        Domain::PZp => {
            let g: Vec<ZpPoly> = f.iter().map(|h| h.scale_var_p(1)).collect();
            walk.subdivide(Chart::Finite, BigInt::zero(), 1, &g, 0)?;
        }
        Domain::P1 => {
            walk.subdivide(Chart::Finite, BigInt::zero(), 0, f, 0)?;
            let g: Vec<ZpPoly> = reversed_all(f).iter().map(|h| h.scale_var_p(1)).collect();
            walk.subdivide(Chart::Infinity, BigInt::zero(), 1, &g, 0)?;
        }
    }
    let image = ReductionImage::from_disks(walk.disks, walk.deepest);
    if walk.exceeded {
        return Err(Error::MaxDepthExceeded { max_depth, partial: Box::new(image) });
    }
    Ok(image)
}

fn map_point(q: &ProjPointFp, g: usize, support: &[usize], change: &[Vec<i64>]) -> ProjPointFp {
    let p = q.prime() as i64;
    let mut y = vec![0i64; g];
    for (k, &i) in support.iter().enumerate() {
        y[i] = q.coords()[k] as i64;
    }
    let x: Vec<u64> = change
        .iter()
        .map(|row| row.iter().zip(&y).map(|(a, b)| a * b).sum::<i64>().rem_euclid(p) as u64)
        .collect();
    ProjPointFp::new(q.prime(), x).expect("change of coordinates is invertible")
}

/// Exact `ρ(ℓ(pZ_p))` for a vector of series.
///
/// `ℓ(pt)` is divided by the largest power of `t` dividing every component
/// exactly (so `ρ` at `t = 0` is the limiting direction), aligned so that
/// the last minimal vertex is shared by every component, prepared modulo
/// `(p^m, t^trunc)`, and handed to [`image_of_poly_map`] on `Z_p`.
pub fn image_of_series_on_pzp(l: &SeriesVector, m: u32, trunc: usize, max_depth: Option<u32>) -> Result<ReductionImage> {
    let p = l.prime();
    let g = l.g();
    let big_l: Vec<TruncatedSeries> = l.entries().iter().map(|s| s.substitute_p_power(1)).collect();
    let support: Vec<usize> = (0..g).filter(|&i| !big_l[i].is_exact_zero()).collect();
    if support.is_empty() {
        return Err(Error::AllZeroToPrecision);
    }
    let k = support
        .iter()
        .map(|&i| big_l[i].coeffs().iter().position(|c| !c.is_exact_zero()).unwrap_or(big_l[i].len()))
        .min()
        .expect("nonempty");
    let mut ys: Vec<TruncatedSeries> = support.iter().map(|&i| big_l[i].shift_down(k)).collect::<Result<_>>()?;
    let trunc = trunc.min(ys[0].len());
    ys = ys.iter().map(|s| s.truncate(trunc)).collect();

    let whole = CertDisk {
        chart: Chart::Finite,
        center: BigInt::zero(),
        radius: 1,
        value: ProjPointFp::new(p, vec![1])?,
    };
    if support.len() == 1 {
        let mut c = vec![0u64; g];
        c[support[0]] = 1;
        let value = ProjPointFp::new(p, c)?;
        return Ok(ReductionImage::from_disks(vec![CertDisk { value, ..whole }], 0));
    }

    let np = SeriesVector::new(ys.clone())?.newton_polygon()?;
    let big_n = match np.n_and_big_n()? {
        (_, UpperEnd::Bounded(n)) => n,
        (_, UpperEnd::UnboundedWithinTruncation) => return Err(Error::NUndefined),
    };
    let c = np.min_height();
    let j0 = (0..ys.len()).find(|&j| ys[j].coeff(big_n).valuation() == Some(c)).expect("vertex attained");
    let mut change: Vec<Vec<i64>> = (0..g).map(|i| (0..g).map(|j| i64::from(i == j)).collect()).collect();
    let mut aligned = false;
    let pivot = ys[j0].clone();
    for (k, y) in ys.iter_mut().enumerate() {
        if k != j0 && y.coeff(big_n).valuation() != Some(c) {
            *y = y.add(&pivot)?;
            change[support[k]][support[j0]] = -1;
            aligned = true;
        }
    }

    let polys: Vec<ZpPoly> = ys
        .iter()
        .map(|y| weierstrass_prepare(y, m, trunc).map(|w| w.poly_part))
        .collect::<Result<_>>()?;
    let relabel = |img: ReductionImage| -> ReductionImage {
        let disks = img
            .certificate
            .into_iter()
            .map(|d| CertDisk {
                chart: Chart::Finite,
                center: d.center * BigInt::from(p),
                radius: d.radius + 1,
                value: map_point(&d.value, g, &support, &change),
            })
            .collect();
        let mut out = ReductionImage::from_disks(disks, img.max_depth_used);
        if aligned {
            out.codomain_change = Some(change.clone());
        }
        out
    };
    match image_of_poly_map(p, &polys, Domain::Zp, max_depth) {
        Ok(img) => Ok(relabel(img)),
        Err(Error::MaxDepthExceeded { max_depth, partial }) => {
            Err(Error::MaxDepthExceeded { max_depth, partial: Box::new(relabel(*partial)) })
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{delta, formal_integrate, Tail};
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    fn pt(p: u64, c: &[u64]) -> ProjPointFp {
        ProjPointFp::new(p, c.to_vec()).unwrap()
    }

    fn poly(p: u64, c: &[i64]) -> ZpPoly {
        ZpPoly::from_i64(p, c, None)
    }

    #[test]
    fn rho_examples() {
        let v = |p, xs: &[i64]| xs.iter().map(|&x| Padic::from_int(p, x, 20)).collect::<Vec<_>>();
        assert_eq!(rho(&v(2, &[2, 1, 3])).unwrap(), pt(2, &[0, 1, 1]));
        assert_eq!(rho(&v(2, &[4, 2])).unwrap(), pt(2, &[0, 1]));
        assert_eq!(rho(&[Padic::zero(3, 5), Padic::zero(3, 5), Padic::zero(3, 5)]), Err(Error::AllZeroToPrecision));
        assert!(matches!(rho(&[Padic::zero(3, 1), Padic::from_int(3, 9, 5)]), Err(Error::InsufficientPrecision(_))));
        assert_eq!(rho(&v(5, &[3, 6])).unwrap(), pt(5, &[1, 2]));
    }

    #[test]
    fn poly_examples() {
        let img = image_of_poly_map(2, &[poly(2, &[1]), poly(2, &[5])], Domain::Zp, None).unwrap();
        assert_eq!(img.points, [pt(2, &[1, 1])]);
        let img = image_of_poly_map(3, &[poly(3, &[1]), poly(3, &[0, 1])], Domain::P1, None).unwrap();
        assert_eq!(img.len(), 4);
        let img = image_of_poly_map(3, &[poly(3, &[0, 1]), poly(3, &[0, 1, 1])], Domain::Zp, None);
        assert_eq!(img, Err(Error::CommonRoot));
    }

    fn sharpness(p: u64, n: usize, g: usize) -> Vec<ZpPoly> {
        (1..=g)
            .map(|j| {
                if j > n + 1 {
                    return ZpPoly::exact(p, Vec::new());
                }
                let mut c = vec![BigInt::zero(); j];
                c[j - 1] = pow_p(p, (j * (j - 1)) as u32);
                ZpPoly::exact(p, c)
            })
            .collect()
    }

    #[test]
    fn sharpness_family() {
        for p in [2u64, 3, 5] {
            for n in 1..=3 {
                for g in [n + 1, n + 2] {
                    let img = image_of_poly_map(p, &sharpness(p, n, g), Domain::P1, None).unwrap();
                    assert_eq!(img.len() as u64, n as u64 * p + 1, "p={p} n={n} g={g}");
                }
            }
        }
    }

    fn random_poly(rng: &mut ChaCha8Rng, p: u64, deg: usize) -> ZpPoly {
        let c: Vec<i64> = (0..=deg).map(|_| (rng.next_u32() % 200) as i64 - 100).collect();
        ZpPoly::from_i64(p, &c, None)
    }

    fn sample_check(p: u64, f: &[ZpPoly], domain: Domain, img: &ReductionImage, rng: &mut ChaCha8Rng) {
        let m = pow_p(p, 12);
        for _ in 0..1000 {
            let r = BigInt::from(rng.next_u64()) % &m;
            let vals: Vec<BigInt> = match domain {
                Domain::PZp => f.iter().map(|h| h.eval(&(&r * BigInt::from(p)))).collect(),
                Domain::Zp => f.iter().map(|h| h.eval(&r)).collect(),
                Domain::P1 => {
                    // u = p·r in the chart at infinity
                    let rev = reversed_all(f);
                    rev.iter().map(|h| h.eval(&(&r * BigInt::from(p)))).collect()
                }
            };
            if let Some(q) = rho_int(p, &vals) {
                assert!(img.contains(&q), "sampled {q} missing");
            }
        }
        for q in &img.points {
            assert!(img.certificate.iter().any(|d| &d.value == q));
        }
    }

    #[test]
    fn random_maps_respect_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut done = 0;
        while done < 200 {
            let p = [2u64, 3, 5][done % 3];
            let n = 1 + (rng.next_u32() % 4) as usize;
            let g = 2 + (rng.next_u32() % 3) as usize;
            let f: Vec<ZpPoly> = (0..g)
                .map(|_| {
                    let d = (rng.next_u32() as usize) % (n + 1);
                    random_poly(&mut rng, p, d)
                })
                .collect();
            let deg = f.iter().filter_map(ZpPoly::degree).max().unwrap_or(0);
            match image_of_poly_map(p, &f, Domain::P1, None) {
                Ok(img) => {
                    assert!(img.len() as u64 <= deg as u64 * p + 1, "{f:?}");
                    sample_check(p, &f, Domain::Zp, &img, &mut rng);
                    sample_check(p, &f, Domain::P1, &img, &mut rng);
                    done += 1;
                }
                Err(Error::CommonRoot) | Err(Error::AllZeroToPrecision) => {}
                Err(e) => panic!("{e:?} for {f:?}"),
            }
        }
    }

    #[test]
    fn max_depth_is_reported() {
        // t and t + p^10 separate only deep inside the disk around 0.
        let p = 3;
        let f = [poly(p, &[0, 1]), poly(p, &[59049, 1])];
        match image_of_poly_map(p, &f, Domain::Zp, Some(2)) {
            Err(Error::MaxDepthExceeded { max_depth: 2, partial }) => assert!(!partial.certificate.is_empty()),
            other => panic!("{other:?}"),
        }
        let img = image_of_poly_map(p, &f, Domain::Zp, None).unwrap();
        assert!(img.max_depth_used >= 10);
    }

    fn series(p: u64, num: &[i64], den: &[i64], prec: i64) -> TruncatedSeries {
        let c = num
            .iter()
            .zip(den)
            .map(|(&a, &b)| if a == 0 { Padic::exact_zero(p) } else { Padic::from_ratio(p, a, b, prec).unwrap() })
            .collect();
        TruncatedSeries::polynomial(p, c).unwrap()
    }

    #[test]
    fn series_examples() {
        let l = SeriesVector::new(vec![series(2, &[0, 1], &[1, 1], 30), series(2, &[0, 0], &[1, 1], 30)]).unwrap();
        assert_eq!(image_of_series_on_pzp(&l, 10, 2, None).unwrap().points, [pt(2, &[1, 0])]);

        let l = SeriesVector::new(vec![series(3, &[0, 1, 0], &[1, 1, 1], 30), series(3, &[0, 0, 1], &[1, 1, 1], 30)])
            .unwrap();
        let img = image_of_series_on_pzp(&l, 10, 3, None).unwrap();
        assert_eq!(img.points, [pt(3, &[1, 0])]);
        // sampling oracle over τ ∈ 3Z/3⁴
        for s in 1..27i64 {
            let tau = Padic::from_int(3, 3 * s, 30);
            let v: Vec<Padic> = l.entries().iter().map(|e| e.eval(&tau).unwrap()).collect();
            assert!(img.contains(&rho(&v).unwrap()));
        }
    }

    /// ℓ polynomial with integer coefficients: compare against direct
    /// subdivision of the exact map ℓ(pt)/t.
    #[test]
    fn alignment_preserves_image() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut checked = 0;
        for trial in 0..300 {
            let p = [2u64, 3, 5][trial % 3];
            let g = 2 + (rng.next_u32() % 2) as usize;
            let deg = 2 + (rng.next_u32() % 3) as usize;
            let comps: Vec<Vec<i64>> = (0..g)
                .map(|_| {
                    let mut c = vec![0i64];
                    c.extend((0..deg).map(|_| (rng.next_u32() % 40) as i64 - 20));
                    c
                })
                .collect();
            if comps.iter().any(|c| c.iter().all(|&x| x == 0)) {
                continue;
            }
            let l = SeriesVector::new(
                comps.iter().map(|c| TruncatedSeries::from_ints(p, c, 60, Tail::Exact)).collect(),
            )
            .unwrap();
            let direct: Vec<ZpPoly> = comps
                .iter()
                .map(|c| {
                    let scaled: Vec<BigInt> =
                        c.iter().enumerate().skip(1).map(|(n, &a)| BigInt::from(a) * pow_p(p, n as u32)).collect();
                    ZpPoly::exact(p, scaled)
                })
                .collect();
            let Ok(want) = image_of_poly_map(p, &direct, Domain::Zp, None) else { continue };
            let got = image_of_series_on_pzp(&l, 30, deg + 1, None).unwrap();
            assert_eq!(got.points, want.points, "p={p} {comps:?}");
            let w = SeriesVector::new(l.entries().iter().map(|e| e.derivative()).collect()).unwrap();
            let (nw, _) = w.newton_polygon().unwrap().n_and_big_n().unwrap();
            assert!(got.len() as u64 <= p * (nw as u64 + 1 + delta(p, nw) as u64) + 1);
            checked += 1;
        }
        assert!(checked > 150, "{checked}");
    }

    #[test]
    fn integrated_series_bound() {
        // w = (1, t, t², …) style vectors with random integral coefficients.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut ok = 0;
        for trial in 0..60 {
            let p = [2u64, 3, 5][trial % 3];
            let t = 30;
            let w: Vec<TruncatedSeries> = (0..3)
                .map(|_| {
                    let c: Vec<i64> = (0..t).map(|_| (rng.next_u32() % 50) as i64 - 25).collect();
                    TruncatedSeries::from_ints(p, &c, 60, Tail::at_least(0))
                })
                .collect();
            let w = SeriesVector::new(w).unwrap();
            let Ok((nw, _)) = w.newton_polygon().and_then(|np| np.n_and_big_n()) else { continue };
            let l = formal_integrate(&w);
            match image_of_series_on_pzp(&l, 12, t + 1, None) {
                Ok(img) => {
                    assert!(img.len() as u64 <= p * (nw as u64 + 1 + delta(p, nw) as u64) + 1);
                    for s in 1..40i64 {
                        let tau = Padic::from_int(p, p as i64 * s, 60);
                        let v: Vec<Padic> = l.entries().iter().map(|e| e.eval(&tau).unwrap()).collect();
                        if let Ok(q) = rho(&v) {
                            assert!(img.contains(&q), "p={p} τ={s}");
                        }
                    }
                    ok += 1;
                }
                Err(Error::CommonRoot) => {}
                Err(e) => panic!("{e:?}"),
            }
        }
        assert!(ok > 40, "{ok}");
    }
}
