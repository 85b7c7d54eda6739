//! Averages of `#D^smooth(F_p)` over random curves.
//!
//! Exact values come from enumerating the first three Taylor coefficients
//! of a patch at a column: they are an upper-triangular, unit-diagonal image
//! of the three lowest coefficients, which are uniform and independent at
//! every depth, because `h ↦ p⁻²h(px)` respects Haar measure. Linearity of
//! expectation removes the need for independence between columns.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::model::{child_patch, classify_column, make_truncated_model, ColumnCase, CurveInput, UnitValueKind};
use crate::zpoly::ZpPoly;

pub type BigRational = Ratio<BigInt>;

fn rat(n: i64, d: i64) -> BigRational {
    Ratio::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleConfig {
    pub p: u64,
    pub g: usize,
    pub trials: u64,
    pub seed: u64,
    pub depth_guard: u32,
    pub digit_budget: u32,
}

impl SampleConfig {
    /// Guard 10 and the smallest admissible digit budget.
    pub fn new(p: u64, g: usize, trials: u64, seed: u64) -> Self {
        SampleConfig { p, g, trials, seed, depth_guard: 10, digit_budget: 24 }
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return Err(Error::NonPrime(self.p));
        }
        if self.g == 0 {
            return Err(Error::Precondition("genus must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::Precondition("trials must be at least 1".into()));
        }
        if self.digit_budget < 2 * self.depth_guard + 4 {
            return Err(Error::Precondition(format!(
                "digit budget {} below 2·guard + 4 = {}",
                self.digit_budget,
                2 * self.depth_guard + 4
            )));
        }
        Ok(())
    }
}

fn uniform_below<R: RngCore>(rng: &mut R, p: u64) -> u64 {
    let zone = u64::MAX - u64::MAX % p;
    loop {
        let x = rng.next_u64();
        if x < zone {
            return x % p;
        }
    }
}

/// The first `digits` base-`p` digits of coefficient `index` in `trial`.
///
/// Each `(seed, trial, index)` owns its own ChaCha stream position and digits
/// are read sequentially, so a longer budget extends the same number.
pub fn coefficient_digits(seed: u64, trial: u64, index: usize, p: u64, digits: u32) -> BigInt {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng.set_word_pos((index as u128) << 64);
    let mut x = BigInt::zero();
    let mut pw = BigInt::one();
    for _ in 0..digits {
        x += &pw * BigInt::from(uniform_below(&mut rng, p));
        pw *= p;
    }
    x
}

/// The random curve of a trial: `a₁, …, a_{2g+1}` known mod `p^budget`.
pub fn trial_curve(cfg: &SampleConfig, trial: u64) -> CurveInput {
    let a: Vec<BigInt> =
        (0..2 * cfg.g + 1).map(|i| coefficient_digits(cfg.seed, trial, i, cfg.p, cfg.digit_budget)).collect();
    CurveInput::new(cfg.p, &a, Some(cfg.digit_budget)).expect("valid shape")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub trial: u64,
    pub total_smooth: u64,
    pub max_depth: u32,
    pub guard_hit: bool,
}

fn any_truncated(node: &crate::model::PatchNode) -> bool {
    node.columns
        .iter()
        .any(|c| c.truncated || c.child.as_deref().is_some_and(any_truncated))
}

pub fn mc_trial(cfg: &SampleConfig, trial: u64) -> TrialOutcome {
    let curve = trial_curve(cfg, trial);
    let model = make_truncated_model(&curve, cfg.depth_guard).expect("budget covers the guard");
    TrialOutcome {
        trial,
        total_smooth: model.total_smooth,
        max_depth: model.max_depth_reached,
        guard_hit: any_truncated(&model.root),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MCResult {
    pub trials: u64,
    pub mean: BigRational,
    pub stderr: f64,
    pub histogram: BTreeMap<u64, u64>,
    pub depth_histogram: BTreeMap<u32, u64>,
    pub guard_hits: u64,
}

fn mean_and_stderr(values: impl Iterator<Item = u64> + Clone, n: u64) -> (BigRational, f64) {
    let sum: u128 = values.clone().map(u128::from).sum();
    let sumsq: u128 = values.map(|v| u128::from(v) * u128::from(v)).sum();
    let mean = Ratio::new(BigInt::from(sum), BigInt::from(n));
    let nf = n as f64;
    let m = sum as f64 / nf;
    let var = if n > 1 { (sumsq as f64 - nf * m * m) / (nf - 1.0) } else { 0.0 };
    (mean, libm::sqrt(var.max(0.0) / nf))
}

impl MCResult {
    pub fn from_outcomes(outcomes: &[TrialOutcome]) -> Result<Self> {
        let n = outcomes.len() as u64;
        if n == 0 {
            return Err(Error::Precondition("trials must be at least 1".into()));
        }
        let (mean, stderr) = mean_and_stderr(outcomes.iter().map(|o| o.total_smooth), n);
        let mut histogram = BTreeMap::new();
        let mut depth_histogram = BTreeMap::new();
        for o in outcomes {
            *histogram.entry(o.total_smooth).or_insert(0) += 1;
            *depth_histogram.entry(o.max_depth).or_insert(0) += 1;
        }
        let guard_hits = outcomes.iter().filter(|o| o.guard_hit).count() as u64;
        Ok(MCResult { trials: n, mean, stderr, histogram, depth_histogram, guard_hits })
    }

    pub fn mean_f64(&self) -> f64 {
        ratio_to_f64(&self.mean)
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Sequential Monte Carlo estimate of `E #D^smooth(F_p)`.
pub fn mc_average_smooth(cfg: &SampleConfig) -> Result<MCResult> {
    cfg.validate()?;
    let outcomes: Vec<TrialOutcome> = (0..cfg.trials).map(|t| mc_trial(cfg, t)).collect();
    MCResult::from_outcomes(&outcomes)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumResult {
    pub value: BigRational,
    pub k: u32,
    pub per_column: BigRational,
}

/// Expected smooth count of one column when recursion from depth `k` on is
/// dropped: enumerate `h(c) mod p³`, `h'(c) mod p²`, `h''(c)/2 mod p`.
pub fn per_column_truncated(p: u64, k: u32) -> BigRational {
    let mut leaf_sum = 0u64;
    let mut recurse = 0u64;
    for a in 0..p * p * p {
        for b in 0..p * p {
            for c2 in 0..p {
                let h = ZpPoly::new(p, [a, b, c2].map(BigInt::from).to_vec(), Some(3));
                let rec = classify_column(&h, 0).expect("precision 3 suffices");
                if rec.case == ColumnCase::Recurse {
                    recurse += 1;
                } else {
                    leaf_sum += rec.smooth_count;
                }
            }
        }
    }
    let total = BigInt::from(p).pow(6);
    let leaf = Ratio::new(BigInt::from(leaf_sum), total.clone());
    let rec_prob = Ratio::new(BigInt::from(recurse), total);
    let mut t = leaf.clone();
    for _ in 0..k {
        t = &leaf + &rec_prob * BigInt::from(p) * &t;
    }
    t
}

/// `E #D^smooth(F_p)` with recursion beyond depth `k` counted as zero.
pub fn exact_truncated_average(p: u64, g: usize, k: u32) -> Result<EnumResult> {
    if !is_prime(p) {
        return Err(Error::NonPrime(p));
    }
    if g == 0 {
        return Err(Error::Precondition("genus must be at least 1".into()));
    }
    let per_column = per_column_truncated(p, k);
    let value = BigRational::one() + &per_column * BigInt::from(p);
    Ok(EnumResult { value, k, per_column })
}

/// `1 + p·(1 − p^{−2(k+1)})`.
pub fn closed_form_truncated(p: u64, k: u32) -> BigRational {
    let q = BigInt::from(p).pow(2 * (k + 1));
    BigRational::one() + (BigRational::one() - Ratio::new(BigInt::one(), q)) * BigInt::from(p)
}

/// Brute force over all `f = x³ + a₁x² + a₂x + a₃` modulo `p^{2k+4}`.
pub fn enumerate_genus_one(p: u64, k: u32) -> BigRational {
    let digits = 2 * k + 4;
    let m = p.pow(digits);
    let mut sum = BigInt::zero();
    for a1 in 0..m {
        for a2 in 0..m {
            for a3 in 0..m {
                let a = [a1, a2, a3].map(BigInt::from);
                let c = CurveInput::new(p, &a, Some(digits)).expect("shape");
                sum += make_truncated_model(&c, k).expect("precision").total_smooth;
            }
        }
    }
    Ratio::new(sum, BigInt::from(m).pow(3))
}

/// `X₀` of a patch: smooth points over column 0, recursion cut at `guard`.
fn column_value(h: &ZpPoly, c: u64, depth: u32, guard: u32) -> (u64, bool) {
    let rec = classify_column(h, c).expect("budget covers the guard");
    if rec.case != ColumnCase::Recurse {
        return (rec.smooth_count, false);
    }
    if depth >= guard {
        return (0, true);
    }
    let child = child_patch(h, c);
    (0..h.prime()).fold((0, false), |(s, hit), c| {
        let (v, h2) = column_value(&child, c, depth + 1, guard);
        (s + v, hit || h2)
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TailRow {
    pub threshold: u64,
    pub frequency: BigRational,
    /// `16/B²`.
    pub bound: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct X0Report {
    pub trials: u64,
    pub mean: BigRational,
    pub stderr: f64,
    pub histogram: BTreeMap<u64, u64>,
    pub tails: Vec<TailRow>,
    pub guard_hits: u64,
}

pub fn x0_trial(cfg: &SampleConfig, trial: u64) -> (u64, bool) {
    let curve = trial_curve(cfg, trial);
    column_value(curve.f(), 0, 0, cfg.depth_guard)
}

impl X0Report {
    pub fn from_values(p: u64, values: &[(u64, bool)]) -> Result<Self> {
        let n = values.len() as u64;
        if n == 0 {
            return Err(Error::Precondition("trials must be at least 1".into()));
        }
        let (mean, stderr) = mean_and_stderr(values.iter().map(|v| v.0), n);
        let mut histogram = BTreeMap::new();
        for v in values {
            *histogram.entry(v.0).or_insert(0u64) += 1;
        }
        let mut tails = Vec::new();
        let mut b = 4 * p;
        for _ in 0..3 {
            let hits = values.iter().filter(|v| v.0 >= b).count() as i64;
            tails.push(TailRow {
                threshold: b,
                frequency: rat(hits, n as i64),
                bound: rat(16, (b * b) as i64),
            });
            b *= p;
        }
        let guard_hits = values.iter().filter(|v| v.1).count() as u64;
        Ok(X0Report { trials: n, mean, stderr, histogram, tails, guard_hits })
    }
}

/// Empirical distribution of the column count `X₀`.
pub fn x0_statistics(cfg: &SampleConfig) -> Result<X0Report> {
    cfg.validate()?;
    let values: Vec<(u64, bool)> = (0..cfg.trials).map(|t| x0_trial(cfg, t)).collect();
    X0Report::from_values(cfg.p, &values)
}

/// Root-level case of the column `x ≡ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RootCase {
    UnitDerivative,
    UnitValue,
    SimpleZero,
    Recurse,
}

impl RootCase {
    pub const ALL: [RootCase; 4] = [RootCase::UnitDerivative, RootCase::UnitValue, RootCase::SimpleZero, RootCase::Recurse];

    pub fn label(&self) -> &'static str {
        match self {
            RootCase::UnitDerivative => "(1)",
            RootCase::UnitValue => "(2)(a)",
            RootCase::SimpleZero => "(2)(b)",
            RootCase::Recurse => "(2)(c)",
        }
    }

    /// `1 − p⁻¹`, `p⁻¹ − p⁻²`, `p⁻² − p⁻³`, `p⁻³`.
    pub fn probability(&self, p: u64) -> BigRational {
        let p = p as i64;
        match self {
            RootCase::UnitDerivative => rat(p - 1, p),
            RootCase::UnitValue => rat(p - 1, p * p),
            RootCase::SimpleZero => rat(p - 1, p * p * p),
            RootCase::Recurse => rat(1, p * p * p),
        }
    }
}

pub fn root_case(case: ColumnCase) -> RootCase {
    match case {
        ColumnCase::UnitDerivative => RootCase::UnitDerivative,
        ColumnCase::UnitValue(UnitValueKind::Odd)
        | ColumnCase::UnitValue(UnitValueKind::RegularNotSmooth)
        | ColumnCase::UnitValue(UnitValueKind::BlownUpSmooth { .. }) => RootCase::UnitValue,
        ColumnCase::SimpleZero => RootCase::SimpleZero,
        ColumnCase::Recurse => RootCase::Recurse,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseRow {
    pub case: RootCase,
    pub count: u64,
    pub frequency: BigRational,
    pub expected: BigRational,
    /// `|freq − expected| / sqrt(expected(1 − expected)/n)`.
    pub z: f64,
}

pub fn case_trial(cfg: &SampleConfig, trial: u64) -> RootCase {
    // Only the three lowest coefficients matter for the column at 0.
    let a: Vec<BigInt> = (0..3).map(|i| coefficient_digits(cfg.seed, trial, 2 * cfg.g - i, cfg.p, 3)).collect();
    let h = ZpPoly::new(cfg.p, a.into_iter().rev().collect(), Some(3));
    root_case(classify_column(&h, 0).expect("precision 3").case)
}

pub fn case_table(p: u64, cases: &[RootCase]) -> Result<Vec<CaseRow>> {
    let n = cases.len() as u64;
    if n == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    Ok(RootCase::ALL
        .iter()
        .map(|&case| {
            let count = cases.iter().filter(|&&c| c == case).count() as u64;
            let expected = case.probability(p);
            let e = ratio_to_f64(&expected);
            let f = count as f64 / n as f64;
            let z = libm::fabs(f - e) / libm::sqrt(e * (1.0 - e) / n as f64);
            CaseRow { case, count, frequency: rat(count as i64, n as i64), expected, z }
        })
        .collect())
}

/// Empirical root-level case frequencies against the exact probabilities.
pub fn case_frequencies(cfg: &SampleConfig) -> Result<Vec<CaseRow>> {
    cfg.validate()?;
    let cases: Vec<RootCase> = (0..cfg.trials).map(|t| case_trial(cfg, t)).collect();
    case_table(cfg.p, &cases)
}
