//! Acceptance criteria 1–8. Runs without the libtest harness so every
//! criterion prints exactly one `PASS`/`FAIL` line.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use padic_chabauty_core::arith::pow_p;
use padic_chabauty_core::bounds::{curve_image_bound, density_main, exact_delta};
use padic_chabauty_core::chabauty::{
    analyze_disks, residue_disks, rho_at, rholog_single_disk_curve, verify_hypotheses, AnalysisOptions,
    GoodReductionCurve,
};
use padic_chabauty_core::expectation::{
    enumerate_genus_one, exact_truncated_average, mc_trial, BigRational, MCResult, SampleConfig,
};
use padic_chabauty_core::model::{
    default_depth_guard, discriminant, make_decent_model, reduce_point, sample_curve_point, CurveInput,
    ReducedPoint,
};
use padic_chabauty_core::projred::{image_of_poly_map, rho_int, Domain, ProjPointFp, ReductionImage};
use padic_chabauty_core::series::{delta, Tail, TruncatedSeries};
use padic_chabauty_core::weierstrass::weierstrass_prepare;
use padic_chabauty_core::{Error, Padic};

// Pinned limits.
const C1_SECONDS_PER_GENUS: u64 = 10;
const C2_SECONDS: u64 = 60;
const C3_SECONDS: u64 = 300;
const C3_TRIALS: u64 = 100_000;
const C3_TOLERANCE: f64 = 0.05;
const C3_MAX_GUARD_HITS: u64 = 10;
const C4_SECONDS: u64 = 120;
const C4_RANDOM_MAPS: usize = 200;
const C4_EVALUATIONS: usize = 1000;
const C5_CURVES: usize = 500;
const C5_POINTS: usize = 20;
const C6_CURVES: usize = 100;
const C8_SERIES: usize = 100;
const C8_MODULUS: u32 = 12;

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn within(start: Instant, limit: u64, what: &str) -> std::result::Result<Duration, String> {
    let t = start.elapsed();
    if t > Duration::from_secs(limit) {
        return Err(format!("{what} took {:.1}s, limit {limit}s", t.as_secs_f64()));
    }
    Ok(t)
}

fn c1_single_disk_family() -> Check {
    let mut times = Vec::new();
    for g in 2..=5usize {
        let start = Instant::now();
        let curve = GoodReductionCurve::family(g).map_err(|e| e.to_string())?;
        let disks = residue_disks(&curve);
        ensure!(disks.len() == 1 && disks[0].is_infinity_disk(), "g={g}: disks {disks:?}");
        let report = verify_hypotheses(&curve);
        ensure!(report.all_pass(), "g={g}: hypotheses {report:?}");
        let res = rholog_single_disk_curve(&curve, &AnalysisOptions::default()).map_err(|e| format!("g={g}: {e}"))?;
        let mut e1 = vec![0u64; g];
        e1[0] = 1;
        let want = vec![ProjPointFp::new(2, e1).unwrap()];
        ensure!(res.union.as_ref() == Some(&want), "g={g}: image {:?}", res.union);
        times.push(format!("{:.2}s", within(start, C1_SECONDS_PER_GENUS, &format!("g={g}"))?.as_secs_f64()));
    }
    Ok(format!("g=2..5 → {{(1:0:…:0)}}, times {}", times.join(" ")))
}

fn c2_exact_expectation() -> Check {
    let start = Instant::now();
    let cases = [(2u64, 0u32, rat(5, 2)), (2, 1, rat(23, 8)), (3, 0, rat(11, 3))];
    for (p, k, want) in &cases {
        let got = exact_truncated_average(*p, 2, *k).map_err(|e| e.to_string())?.value;
        ensure!(&got == want, "p={p} k={k}: {got} ≠ {want}");
    }
    for (p, k, want) in &cases[..2] {
        let brute = enumerate_genus_one(*p, *k);
        ensure!(&brute == want, "enumeration p={p} k={k}: {brute} ≠ {want}");
    }
    let out = padic_chabauty::run(["padic-chabauty", "--format", "text", "expect", "exact", "--p", "2", "--k", "1"]);
    ensure!(out.code == 0 && out.stdout.contains("23/8"), "cli: {} {}", out.stdout, out.stderr);
    let t = within(start, C2_SECONDS, "exact expectation")?;
    Ok(format!("5/2, 23/8, 11/3; g=1 enumeration agrees ({:.1}s)", t.as_secs_f64()))
}

fn c3_monte_carlo() -> Check {
    let start = Instant::now();
    let mut parts = Vec::new();
    for p in [2u64, 3] {
        let cfg = SampleConfig::new(p, 2, C3_TRIALS, 20_240 + p);
        let outcomes: Vec<_> = (0..cfg.trials).into_par_iter().map(|t| mc_trial(&cfg, t)).collect();
        let r = MCResult::from_outcomes(&outcomes).map_err(|e| e.to_string())?;
        let mean = r.mean_f64();
        let target = (p + 1) as f64;
        ensure!((mean - target).abs() <= C3_TOLERANCE, "p={p}: mean {mean:.4}, target {target}");
        ensure!(r.guard_hits < C3_MAX_GUARD_HITS, "p={p}: {} guard hits", r.guard_hits);
        parts.push(format!("p={p} mean {mean:.4}±{:.4} guard_hits {}", r.stderr, r.guard_hits));
    }
    let t = within(start, C3_SECONDS, "monte carlo")?;
    Ok(format!("{} (statistical; {:.1}s)", parts.join(", "), t.as_secs_f64()))
}

fn sharpness_family(p: u64, n: usize) -> Vec<padic_chabauty_core::zpoly::ZpPoly> {
    (1..=n + 1)
        .map(|j| {
            let mut c = vec![BigInt::zero(); j];
            c[j - 1] = pow_p(p, (j * (j - 1)) as u32);
            padic_chabauty_core::zpoly::ZpPoly::exact(p, c)
        })
        .collect()
}

/// Evaluates the map at random points of `P^1(Q_p)`: half in `Z_p`, half near `∞`.
fn sampled_points_land(p: u64, f: &[padic_chabauty_core::zpoly::ZpPoly], img: &ReductionImage, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = f.iter().filter_map(|h| h.degree()).max().unwrap_or(0);
    let m = pow_p(p, 16);
    let pb = BigInt::from(p);
    (0..C4_EVALUATIONS).all(|i| {
        let r = BigInt::from(rng.next_u64()) % &m;
        let vals: Vec<BigInt> = if i % 2 == 0 {
            f.iter().map(|h| h.eval(&r)).collect()
        } else {
            // t = 1/u with u ∈ pZ_p: u^n·f_j(1/u).
            let u = &r * &pb;
            f.iter()
                .map(|h| {
                    let mut acc = BigInt::zero();
                    for k in 0..=n {
                        acc += h.coeff(k) * u.pow((n - k) as u32);
                    }
                    acc
                })
                .collect()
        };
        rho_int(p, &vals).map_or(true, |q| img.contains(&q))
    })
}

fn c4_sharpness() -> Check {
    let start = Instant::now();
    for p in [2u64, 3, 5] {
        for n in 1..=3usize {
            let f = sharpness_family(p, n);
            let img = image_of_poly_map(p, &f, Domain::P1, None).map_err(|e| format!("p={p} n={n}: {e}"))?;
            ensure!(img.len() as u64 == n as u64 * p + 1, "p={p} n={n}: size {} ≠ {}", img.len(), n as u64 * p + 1);
            ensure!(sampled_points_land(p, &f, &img, p * 10 + n as u64), "p={p} n={n}: sample escaped");
        }
    }
    let jobs: Vec<(u64, usize)> = [2u64, 3, 5].iter().flat_map(|&p| (1..=3).map(move |n| (p, n))).collect();
    let results: Vec<std::result::Result<usize, String>> = jobs
        .par_iter()
        .map(|&(p, n)| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 * p + n as u64);
            let mut done = 0;
            let mut skipped = 0;
            while done < C4_RANDOM_MAPS {
                let g = n + 1;
                let f: Vec<_> = (0..g)
                    .map(|_| {
                        let d = (rng.next_u32() as usize) % (n + 1);
                        let c: Vec<i64> = (0..=d).map(|_| (rng.next_u32() % 200) as i64 - 100).collect();
                        padic_chabauty_core::zpoly::ZpPoly::from_i64(p, &c, None)
                    })
                    .collect();
                match image_of_poly_map(p, &f, Domain::P1, None) {
                    Ok(img) => {
                        if img.len() as u64 > n as u64 * p + 1 {
                            return Err(format!("p={p} n={n}: size {} for {f:?}", img.len()));
                        }
                        if !sampled_points_land(p, &f, &img, rng.next_u64()) {
                            return Err(format!("p={p} n={n}: sample escaped for {f:?}"));
                        }
                        done += 1;
                    }
                    Err(Error::CommonRoot) | Err(Error::AllZeroToPrecision) => skipped += 1,
                    Err(e) => return Err(format!("p={p} n={n}: {e} for {f:?}")),
                }
            }
            Ok(skipped)
        })
        .collect();
    let mut skipped = 0;
    for r in results {
        skipped += r?;
    }
    let t = within(start, C4_SECONDS, "sharpness")?;
    Ok(format!(
        "family sizes np+1; {} random maps ≤ np+1 ({skipped} degenerate redrawn; {:.1}s)",
        C4_RANDOM_MAPS * jobs.len(),
        t.as_secs_f64()
    ))
}

/// Monic quintic; half the draws cluster two roots `p`-adically.
fn random_quintic(rng: &mut ChaCha8Rng, p: u64) -> CurveInput {
    loop {
        let a: Vec<i64> = if rng.next_u32() % 2 == 0 {
            (0..5).map(|_| (rng.next_u32() % 64) as i64 - 32).collect()
        } else {
            let r1 = (rng.next_u32() % 20) as i64 - 10;
            let k = 1 + rng.next_u32() % 4;
            let r2 = r1 + (p as i64).pow(k) * (1 + (rng.next_u32() % 3) as i64);
            let cubic: Vec<i64> = (0..3).map(|_| (rng.next_u32() % 16) as i64 - 8).collect();
            // (x² − (r1+r2)x + r1r2)(x³ + c0x² + c1x + c2)
            let (s, pr) = (-(r1 + r2), r1 * r2);
            let q = [1, s, pr];
            let c = [1, cubic[0], cubic[1], cubic[2]];
            let mut prod = [0i64; 6];
            for i in 0..3 {
                for j in 0..4 {
                    prod[i + j] += q[i] * c[j];
                }
            }
            prod[1..].to_vec()
        };
        let c = CurveInput::from_i64(p, &a).expect("shape");
        if discriminant(c.f()).valuation().is_some() {
            return c;
        }
    }
}

fn c5_decency() -> Check {
    let results: Vec<std::result::Result<(u64, u32), String>> = [2u64, 3]
        .par_iter()
        .map(|&p| {
            let mut rng = ChaCha8Rng::seed_from_u64(50 + p);
            let mut points = 0u64;
            let mut deepest = 0u32;
            for i in 0..C5_CURVES {
                let c = random_quintic(&mut rng, p);
                let guard = default_depth_guard(&c).map_err(|e| e.to_string())?;
                let m = match make_decent_model(&c, Some(guard)) {
                    Ok(m) => m,
                    Err(e) => return Err(format!("p={p} curve {i} {:?}: {e}", c.a())),
                };
                deepest = deepest.max(m.max_depth_reached);
                let mut got = 0;
                let mut attempts = 0;
                while got < C5_POINTS && attempts < 400 * C5_POINTS {
                    attempts += 1;
                    let Some((x, y)) = sample_curve_point(&c, &mut rng, 48) else { continue };
                    got += 1;
                    match reduce_point(&m, &x, &y) {
                        Ok(ReducedPoint::Affine { path, .. }) | Ok(ReducedPoint::BlowUp { path, .. }) => {
                            let mut node = &m.root;
                            for &d in &path[..path.len() - 1] {
                                node = node.columns[d as usize].child.as_deref().expect("path follows children");
                            }
                            let rec = &node.columns[*path.last().unwrap() as usize];
                            if rec.smooth_count == 0 {
                                return Err(format!("p={p} curve {i}: point in empty column {path:?}"));
                            }
                        }
                        Ok(ReducedPoint::Infinity) => {}
                        Err(e) => return Err(format!("p={p} curve {i} {:?} x={x}: {e}", c.a())),
                    }
                }
                points += got as u64;
            }
            Ok((points, deepest))
        })
        .collect();
    let mut parts = Vec::new();
    for (p, r) in [2u64, 3].iter().zip(results) {
        let (pts, deepest) = r?;
        parts.push(format!("p={p}: {pts} points, depth ≤ {deepest}"));
    }
    Ok(format!("{} curves/prime, 0 guard violations; {}", C5_CURVES, parts.join(", ")))
}

fn random_good_curve(rng: &mut ChaCha8Rng, p: u64, g: usize) -> GoodReductionCurve {
    loop {
        let mut r: Vec<i64> = (0..=2 * g).map(|_| (rng.next_u64() % 50) as i64 - 25).collect();
        r.push(1);
        let q: Vec<i64> =
            if rng.next_u32() % 2 == 0 { Vec::new() } else { (0..=g).map(|_| (rng.next_u64() % 7) as i64 - 3).collect() };
        if let Ok(c) = GoodReductionCurve::from_i64(p, &q, &r) {
            return c;
        }
    }
}

fn disk_checks(curve: &GoodReductionCurve, constants: Option<&[Vec<Padic>]>, rng: &mut ChaCha8Rng) -> std::result::Result<usize, String> {
    let res = analyze_disks(curve, constants, &AnalysisOptions::default()).map_err(|e| format!("{curve}: {e}"))?;
    let g = curve.genus();
    ensure!(res.sum_n_d <= 2 * g - 2, "{curve}: Σn_D = {}", res.sum_n_d);
    for a in &res.disks {
        ensure!(a.image.len() as u64 <= a.bound, "{curve} disk {}: {} > {}", a.expansion.disk, a.image.len(), a.bound);
        let p = curve.prime() as i64;
        for _ in 0..10 {
            let tau = Padic::from_int(curve.prime(), p * (1 + (rng.next_u64() % 100_000) as i64), 40);
            let q = rho_at(&a.log, &tau).map_err(|e| format!("{curve}: {e}"))?;
            ensure!(a.image.contains(&q), "{curve} disk {}: sampled {q} missing", a.expansion.disk);
        }
    }
    let union = res.union.ok_or_else(|| format!("{curve}: no union"))?;
    let bound = curve_image_bound(curve.prime(), res.disks.len() as u64, g as u64).map_err(|e| e.to_string())?;
    ensure!(
        BigRational::from_integer(BigInt::from(union.len())) <= bound,
        "{curve}: whole image {} > {bound}",
        union.len()
    );
    Ok(union.len())
}

fn c6_disk_bounds() -> Check {
    let results: Vec<std::result::Result<usize, String>> = [3u64, 5]
        .par_iter()
        .map(|&p| {
            let mut rng = ChaCha8Rng::seed_from_u64(60 + p);
            let mut largest = 0;
            for _ in 0..C6_CURVES {
                let c = random_good_curve(&mut rng, p, 2);
                // log at each disk centre is unknown; any constants must respect the bounds.
                let consts: Vec<Vec<Padic>> = residue_disks(&c)
                    .iter()
                    .map(|_| (0..2).map(|_| Padic::from_int(p, (rng.next_u64() % 10_000) as i64, 40)).collect())
                    .collect();
                largest = largest.max(disk_checks(&c, Some(&consts), &mut rng)?);
            }
            Ok(largest)
        })
        .collect();
    let mut parts = Vec::new();
    for (p, r) in [3u64, 5].iter().zip(results) {
        parts.push(format!("p={p} max union {}", r?));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(62);
    for g in 2..=5 {
        disk_checks(&GoodReductionCurve::family(g).map_err(|e| e.to_string())?, None, &mut rng)?;
    }
    Ok(format!("{} curves/prime + p=2 family g=2..5; {}", C6_CURVES, parts.join(", ")))
}

fn c7_formulas() -> Check {
    for n in 0..=10_000usize {
        ensure!(2 * delta(2, n) <= 2 + n, "δ(2,{n}) = {}", delta(2, n));
    }
    for p in [3u64, 5, 7] {
        for d in 0..=8 {
            for n in 0..=40 {
                let v = exact_delta(p, d, n).map_err(|e| e.to_string())?;
                ensure!(v * (p as usize - 2) <= n, "Δ_{p}({d},{n}) = {v}");
            }
        }
    }
    for g in 2..=30u64 {
        let positive = density_main(g) > BigRational::zero();
        ensure!(positive == (g >= 7), "density_main({g}) = {}", density_main(g));
    }
    ensure!(density_main(10) == rat(221, 256), "density_main(10) = {}", density_main(10));
    Ok("δ(2,n) ≤ 1+n/2, Δ ≤ N/(p−2), density > 0 ⇔ g ≥ 7, density_main(10) = 221/256".into())
}

fn c8_weierstrass() -> Check {
    let mut total = 0;
    for p in [2u64, 3, 5] {
        let mut rng = ChaCha8Rng::seed_from_u64(80 + p);
        let pi = p as i64;
        for i in 0..C8_SERIES {
            let big_n = (rng.next_u32() % 6) as usize;
            let len = big_n + 1 + (rng.next_u32() % 12) as usize;
            let content = rng.next_u32() % 3;
            let scale = pi.pow(content);
            let mut c: Vec<i64> = (0..len)
                .map(|j| {
                    let x = (rng.next_u32() % 200) as i64 - 100;
                    if j < big_n {
                        x
                    } else if j == big_n {
                        let u = 1 + (rng.next_u32() % 50) as i64;
                        if u % pi == 0 { u + 1 } else { u }
                    } else {
                        x * pi
                    }
                })
                .collect();
            for x in &mut c {
                *x *= scale;
            }
            let l = TruncatedSeries::from_ints(p, &c, 60, Tail::Exact);
            let w = weierstrass_prepare(&l, C8_MODULUS, len).map_err(|e| format!("p={p} #{i} {c:?}: {e}"))?;

            // N_L straight from the coefficients: last index of minimal valuation.
            let vals: Vec<u32> = c.iter().map(|&x| if x == 0 { u32::MAX } else { padic_v(x, pi) }).collect();
            let vmin = *vals.iter().min().unwrap();
            let want_n = vals.iter().rposition(|&v| v == vmin).unwrap();
            ensure!(w.degree == want_n && w.poly_part.degree() == Some(want_n), "p={p} #{i}: deg {:?} ≠ {want_n}", w.poly_part.degree());
            ensure!(w.content == vmin as i64, "p={p} #{i}: content {} ≠ {vmin}", w.content);

            let modulus = pow_p(p, C8_MODULUS);
            let prod = w.reconstruct();
            let unit = BigInt::from(pi.pow(vmin));
            for (j, &x) in c.iter().enumerate() {
                let a = BigInt::from(x) / &unit;
                let r = (prod.coeff(j) - a).mod_floor(&modulus);
                ensure!(r.is_zero(), "p={p} #{i}: residual at t^{j}");
            }
            ensure!(w.unit_part.coeff(0).mod_floor(&modulus).is_one(), "p={p} #{i}: unit constant");
            total += 1;
        }
    }
    Ok(format!("{total} series, residual ≡ 0 mod (p^{C8_MODULUS}, t^T), deg = N_L"))
}

fn padic_v(mut x: i64, p: i64) -> u32 {
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("1 single-disk family", c1_single_disk_family),
        ("2 exact expectation", c2_exact_expectation),
        ("3 monte carlo", c3_monte_carlo),
        ("4 sharpness", c4_sharpness),
        ("5 decency", c5_decency),
        ("6 disk bounds", c6_disk_bounds),
        ("7 formula suite", c7_formulas),
        ("8 weierstrass", c8_weierstrass),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|s| name.contains(s.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS criterion {name}: {msg} [{secs:.1}s]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg} [{secs:.1}s]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
