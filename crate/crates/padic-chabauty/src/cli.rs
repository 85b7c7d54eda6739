//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::{One, Zero};

use padic_chabauty_core::bounds::{avg_rholog_bound, curve_image_bound, density_bounds, exact_delta};
use padic_chabauty_core::chabauty::{
    analyze_disk, assemble, residue_disks, verify_hypotheses, AnalysisOptions, CheckStatus, GoodReductionCurve,
};
use padic_chabauty_core::expectation::{
    case_table, case_trial, closed_form_truncated, exact_truncated_average, mc_trial, x0_trial, MCResult,
    SampleConfig, X0Report,
};
use padic_chabauty_core::model::{height, make_decent_model, make_truncated_model, default_depth_guard, CurveInput};
use padic_chabauty_core::projred::{image_of_poly_map, image_of_series_on_pzp, Domain};
use padic_chabauty_core::series::{formal_integrate, SeriesVector, Tail, TruncatedSeries};
use padic_chabauty_core::weierstrass::weierstrass_prepare;
use padic_chabauty_core::zpoly::ZpPoly;
use padic_chabauty_core::{Error, Padic};

use crate::parallel;
use crate::parse::{self, format_poly, parse_curve, parse_int_list, parse_poly, parse_rational_list, to_padic, ParseError};
use crate::report::*;

pub const THREADS_ENV: &str = "PADIC_CHABAUTY_THREADS";

#[derive(Parser, Debug)]
#[command(name = "padic-chabauty", version, about = "Decent models, expected smooth point counts and ρ∘log images")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; 1 forces serial execution. Falls back to PADIC_CHABAUTY_THREADS.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decent model of y² = f(x) and its smooth F_p-point count.
    Model(ModelArgs),
    /// Expected number of smooth points.
    Expect {
        #[command(subcommand)]
        mode: ExpectMode,
    },
    /// ρ∘log image for a curve whose only F_2-point is ∞.
    Rholog(CurveArgs),
    /// Per-disk expansions, n_D, bounds and local images.
    Disks(CurveArgs),
    /// Image of a polynomial map on P¹, Z_p or pZ_p.
    P1image(PolyImageArgs),
    /// Image of a vector of power series on pZ_p.
    Seriesimage(SeriesImageArgs),
    /// Certified Newton polygon of a vector of series.
    Newton(SeriesArgs),
    /// Weierstrass preparation of one series.
    Wprep(WprepArgs),
    /// Closed-form bounds and densities.
    Bounds {
        #[command(subcommand)]
        kind: BoundsKind,
    },
    /// Height max |a_m|^{1/m} of a monic f.
    Height {
        /// Coefficients of f, highest degree first, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        f: String,
    },
}

#[derive(Args, Debug)]
pub struct ModelArgs {
    #[arg(long)]
    pub p: u64,
    /// Genus; checked against deg f when given.
    #[arg(long)]
    pub g: Option<usize>,
    /// Coefficients of monic f, highest degree first, comma separated; fractions allowed.
    #[arg(long, allow_hyphen_values = true)]
    pub f: String,
    /// Coefficients known modulo p^prec (default: exact integers).
    #[arg(long)]
    pub prec: Option<u32>,
    #[arg(long)]
    pub depth_guard: Option<u32>,
    /// Stop subdividing at this depth and report the truncated model.
    #[arg(long)]
    pub truncate: Option<u32>,
}

#[derive(Args, Debug, Clone)]
pub struct SampleArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 2)]
    pub g: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub depth_guard: u32,
    /// Base-p digits drawn per coefficient (default max(24, 2·guard + 4)).
    #[arg(long)]
    pub digit_budget: Option<u32>,
}

impl SampleArgs {
    fn config(&self) -> SampleConfig {
        let mut c = SampleConfig::new(self.p, self.g, self.trials, self.seed);
        c.depth_guard = self.depth_guard;
        c.digit_budget = self.digit_budget.unwrap_or((2 * self.depth_guard + 4).max(24));
        c
    }
}

#[derive(Subcommand, Debug)]
pub enum ExpectMode {
    /// Monte Carlo over random monic f with Z_p coefficients.
    Mc(SampleArgs),
    /// Exact average of the depth-k truncated count.
    Exact {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        g: usize,
        #[arg(long)]
        k: u32,
    },
    /// Root-level case frequencies of the column x ≡ 0.
    Cases(SampleArgs),
    /// Distribution of the column count X₀.
    X0(SampleArgs),
}

#[derive(Args, Debug)]
pub struct CurveArgs {
    /// Curve shorthand, e.g. "y2+y=x7+x+1" or "y^2 = x^5 + 1".
    #[arg(long, allow_hyphen_values = true)]
    pub curve: String,
    #[arg(long, default_value_t = 2)]
    pub p: u64,
    /// Genus; checked against the curve when given.
    #[arg(long)]
    pub g: Option<usize>,
    /// Starting truncation order (default 4g + 6).
    #[arg(long)]
    pub truncation: Option<usize>,
    /// Modulus exponent for the preparation step.
    #[arg(long, default_value_t = 8)]
    pub modulus: u32,
    /// Integration constants, one `;`-separated group per disk in disk order,
    /// each a comma-separated list of g rationals.
    #[arg(long, allow_hyphen_values = true)]
    pub constants: Option<String>,
    /// Precision of the integration constants.
    #[arg(long, default_value_t = 40)]
    pub prec: i64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum DomainArg {
    P1,
    Zp,
    Pzp,
}

#[derive(Args, Debug)]
pub struct PolyImageArgs {
    #[arg(long)]
    pub p: u64,
    /// One component polynomial in t, e.g. "1+t^2"; repeat for each component.
    #[arg(long = "component", required = true, allow_hyphen_values = true)]
    pub components: Vec<String>,
    #[arg(long, value_enum, default_value_t = DomainArg::P1)]
    pub domain: DomainArg,
    #[arg(long)]
    pub max_depth: Option<u32>,
    /// Coefficients known modulo p^prec (default: exact).
    #[arg(long)]
    pub prec: Option<u32>,
}

#[derive(Args, Debug)]
pub struct SeriesArgs {
    #[arg(long)]
    pub p: u64,
    /// Coefficients c_0, c_1, … of one series, comma separated; repeat per component.
    #[arg(long = "component", required = true, allow_hyphen_values = true)]
    pub components: Vec<String>,
    /// Absolute precision of the coefficients.
    #[arg(long, default_value_t = 40)]
    pub prec: i64,
    /// v(c_n) ≥ TAIL beyond the truncation; omit for polynomials.
    #[arg(long, allow_hyphen_values = true)]
    pub tail: Option<i64>,
}

#[derive(Args, Debug)]
pub struct SeriesImageArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    /// Treat the components as 1-form coefficients w and integrate first.
    #[arg(long)]
    pub integrate: bool,
    #[arg(long, default_value_t = 8)]
    pub modulus: u32,
    #[arg(long)]
    pub max_depth: Option<u32>,
}

#[derive(Args, Debug)]
pub struct WprepArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    #[arg(long, default_value_t = 8)]
    pub m: u32,
    /// Truncation used (default: the series length).
    #[arg(long)]
    pub t: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum BoundsKind {
    /// Whole-curve bound for d residue disks.
    Curve {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        g: u64,
    },
    /// Average ρ∘log image bound.
    Avg {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        g: u64,
        #[arg(long)]
        refined: bool,
    },
    /// Density lower bounds.
    Density {
        #[arg(long)]
        g: u64,
        #[arg(long, default_value_t = 2)]
        p: u64,
        /// Size of a known common image, for the excluded-density bound.
        #[arg(long)]
        image_size: Option<u64>,
    },
    /// Δ_p(d, N) by dynamic programming.
    Delta {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
    },
}

/// Everything a run produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(ParseError),
    Core(Error),
    Io(std::io::Error),
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_certification_failure() => 2,
            _ => 1,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Parse(e) => format!("invalid input: {e}"),
            CliError::Core(e) => format!("error: {e}"),
            CliError::Io(e) => format!("io error: {e}"),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn thread_count(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| usage(format!("{THREADS_ENV}={v}: expected a non-negative integer"))),
        Err(_) => Ok(0),
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli) {
        Ok(body) => match &cli.out {
            Some(path) => match std::fs::write(path, &body) {
                Ok(()) => Outcome { code: 0, stdout: String::new(), stderr: String::new() },
                Err(e) => {
                    let e = CliError::Io(e);
                    Outcome { code: e.exit_code(), stdout: String::new(), stderr: e.message() + "\n" }
                }
            },
            None => Outcome { code: 0, stdout: body, stderr: String::new() },
        },
        Err(e) => Outcome { code: e.exit_code(), stdout: String::new(), stderr: e.message() + "\n" },
    }
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let pool = parallel::pool(thread_count(cli.threads)?)?;
    pool.install(|| dispatch(cli))
}

fn render(out: Output, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&Document::new(out)).expect("reports serialize");
            s.push('\n');
            Ok(s)
        }
        Format::Text => Ok(render_text(&out)),
        Format::Csv => Err(usage("--format csv is only available for `expect mc`, `expect cases` and `expect x0`")),
    }
}

fn check_genus(given: Option<usize>, actual: usize) -> Result<(), CliError> {
    match given {
        Some(g) if g != actual => Err(usage(format!("--g {g} does not match the genus {actual} of the input"))),
        _ => Ok(()),
    }
}

fn model_curve(a: &ModelArgs) -> Result<CurveInput, CliError> {
    let coeffs = parse_rational_list(&a.f)?;
    if coeffs.first().is_none_or(|c| !c.is_one()) {
        return Err(usage("--f: expected a monic polynomial, leading coefficient 1 first"));
    }
    let rest = &coeffs[1..];
    let curve = if rest.iter().all(|c| c.is_integer()) {
        let ints: Vec<BigInt> = rest.iter().map(|c| c.to_integer()).collect();
        CurveInput::new(a.p, &ints, a.prec)?
    } else {
        let prec = i64::from(a.prec.unwrap_or(64));
        let vals = rest.iter().map(|c| to_padic(a.p, c, prec)).collect::<Result<Vec<_>, _>>()?;
        CurveInput::from_padic(a.p, &vals)?
    };
    check_genus(a.g, curve.genus())?;
    Ok(curve)
}

fn series_vector(a: &SeriesArgs) -> Result<SeriesVector, CliError> {
    let tail = match a.tail {
        Some(b) => Tail::at_least(b),
        None => Tail::Exact,
    };
    let mut entries = Vec::new();
    for c in &a.components {
        let coeffs = parse_rational_list(c)?
            .iter()
            .map(|r| {
                if r.is_zero() && a.tail.is_none() {
                    Ok(Padic::exact_zero(a.p))
                } else {
                    to_padic(a.p, r, a.prec)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        entries.push(TruncatedSeries::new(a.p, coeffs, tail)?);
    }
    let len = entries.iter().map(TruncatedSeries::len).max().unwrap_or(0);
    let entries = entries
        .into_iter()
        .map(|s| {
            if s.len() == len {
                return s;
            }
            let mut c = s.coeffs().to_vec();
            let pad = if a.tail.is_none() { Padic::exact_zero(a.p) } else { Padic::zero(a.p, a.prec) };
            c.resize(len, pad);
            TruncatedSeries::new(a.p, c, tail).expect("same prime")
        })
        .collect();
    Ok(SeriesVector::new(entries)?)
}

fn good_curve(a: &CurveArgs) -> Result<GoodReductionCurve, CliError> {
    let (q, r) = parse_curve(&a.curve)?;
    let c = GoodReductionCurve::new(a.p, q, r)?;
    check_genus(a.g, c.genus())?;
    Ok(c)
}

fn constants(a: &CurveArgs, g: usize) -> Result<Option<Vec<Vec<Padic>>>, CliError> {
    let Some(s) = &a.constants else {
        return Ok(None);
    };
    let groups = s
        .split(';')
        .map(|grp| {
            let v = parse_rational_list(grp)?;
            if v.len() != g {
                return Err(usage(format!("--constants: each disk needs {g} values, got {}", v.len())));
            }
            v.iter().map(|r| to_padic(a.p, r, a.prec).map_err(CliError::from)).collect()
        })
        .collect::<Result<Vec<Vec<Padic>>, CliError>>()?;
    Ok(Some(groups))
}

fn curve_label(c: &GoodReductionCurve) -> String {
    if c.q().is_empty() {
        format!("y^2 = {}", format_poly(c.r(), 'x'))
    } else if c.q().len() == 1 && c.q()[0].is_one() {
        format!("y^2 + y = {}", format_poly(c.r(), 'x'))
    } else {
        format!("y^2 + ({})*y = {}", format_poly(c.q(), 'x'), format_poly(c.r(), 'x'))
    }
}

fn rholog(a: &CurveArgs, single: bool) -> Result<RhoLogReport, CliError> {
    let curve = good_curve(a)?;
    let opts = AnalysisOptions { truncation: a.truncation, modulus: a.modulus, ..AnalysisOptions::default() };
    let disks = residue_disks(&curve);
    let consts = constants(a, curve.genus())?;
    if let Some(c) = &consts {
        if c.len() != disks.len() {
            return Err(usage(format!("--constants: the curve has {} disks, got {} groups", disks.len(), c.len())));
        }
    }
    if single {
        if curve.prime() != 2 {
            return Err(usage("rholog works at p = 2; use `disks` for other primes"));
        }
        let report = verify_hypotheses(&curve);
        if let Some(c) = report.checks.iter().find(|c| c.status == CheckStatus::Fail) {
            return Err(CliError::Core(Error::HypothesisFailed(c.id.name().to_string())));
        }
    }
    let analyses = parallel::map_ordered(&disks, |i, d| {
        analyze_disk(&curve, d, consts.as_ref().map(|c| c[i].as_slice()), &opts)
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let result = assemble(&curve, analyses, consts.is_some());
    let bound = match result.union {
        Some(_) => Some(curve_image_bound(curve.prime(), disks.len() as u64, curve.genus() as u64)?),
        None => None,
    };
    Ok(RhoLogReport::new(curve_label(&curve), &result, bound.as_ref()))
}

fn dispatch(cli: &Cli) -> Result<String, CliError> {
    let fmt = cli.format;
    let out = match &cli.command {
        Command::Model(a) => {
            let curve = model_curve(a)?;
            let guard = match a.depth_guard {
                Some(g) => g,
                None => default_depth_guard(&curve)?,
            };
            let model = match a.truncate {
                Some(k) => make_truncated_model(&curve, k)?,
                None => make_decent_model(&curve, Some(guard))?,
            };
            Output::Model(ModelReport::new(curve.genus(), guard, a.truncate, &model))
        }
        Command::Expect { mode } => return expect(mode, fmt),
        Command::Rholog(a) => Output::RhoLog(rholog(a, true)?),
        Command::Disks(a) => Output::Disks(rholog(a, false)?),
        Command::P1image(a) => {
            let polys = a
                .components
                .iter()
                .map(|c| Ok(ZpPoly::new(a.p, parse_poly(c, 't')?, a.prec)))
                .collect::<Result<Vec<_>, CliError>>()?;
            let (domain, name) = match a.domain {
                DomainArg::P1 => (Domain::P1, "P1"),
                DomainArg::Zp => (Domain::Zp, "Zp"),
                DomainArg::Pzp => (Domain::PZp, "pZp"),
            };
            match image_of_poly_map(a.p, &polys, domain, a.max_depth) {
                Ok(img) => Output::P1Image(ImageReport::new(a.p, name, &img, false)),
                Err(e) => return Err(e.into()),
            }
        }
        Command::Seriesimage(a) => {
            let mut l = series_vector(&a.series)?;
            if a.integrate {
                l = formal_integrate(&l);
            }
            let img = image_of_series_on_pzp(&l, a.modulus, l.truncation(), a.max_depth)?;
            Output::SeriesImage(ImageReport::new(a.series.p, "pZp", &img, false))
        }
        Command::Newton(a) => {
            let w = series_vector(a)?;
            let np = w.newton_polygon()?;
            let (n, big_n) = np.n_and_big_n()?;
            Output::Newton(NewtonReport::new(a.p, &np, n, big_n))
        }
        Command::Wprep(a) => {
            if a.series.components.len() != 1 {
                return Err(usage("wprep takes exactly one --component"));
            }
            let s = series_vector(&a.series)?.into_entries().remove(0);
            let t = a.t.unwrap_or(s.len());
            let w = weierstrass_prepare(&s, a.m, t)?;
            Output::Wprep(WprepReport::new(a.series.p, &w))
        }
        Command::Bounds { kind } => Output::Bounds(bounds(kind)?),
        Command::Height { f } => {
            let c = parse_int_list(f)?;
            if c.first().is_none_or(|x| !x.is_one()) {
                return Err(usage("--f: expected a monic polynomial, leading coefficient 1 first"));
            }
            let a = &c[1..];
            Output::Height(HeightReport { a: a.iter().map(BigInt::to_string).collect(), height: height(a) })
        }
    };
    render(out, fmt)
}

fn bounds(kind: &BoundsKind) -> Result<BoundsOut, CliError> {
    let row = |formula: &str, p, g, d, value: &padic_chabauty_core::expectation::BigRational| BoundRow {
        formula: formula.to_string(),
        p,
        g,
        d,
        image_size: None,
        value: rational(value),
        value_f64: padic_chabauty_core::expectation::ratio_to_f64(value),
    };
    let rows = match *kind {
        BoundsKind::Curve { p, d, g } => vec![row("curve_image", p, g, Some(d), &curve_image_bound(p, d, g)?)],
        BoundsKind::Avg { p, g, refined } => {
            let name = if refined { "avg_rholog_refined" } else { "avg_rholog" };
            vec![row(name, p, g, None, &avg_rholog_bound(p, g, refined)?)]
        }
        BoundsKind::Density { g, p, image_size } => {
            density_bounds(g, p, image_size)?.iter().map(BoundRow::from).collect()
        }
        BoundsKind::Delta { p, d, n } => {
            let v = exact_delta(p, d, n)?;
            let r = padic_chabauty_core::expectation::BigRational::from_integer(BigInt::from(v));
            let mut b = row("delta", p, 0, Some(d as u64), &r);
            b.image_size = Some(n as u64);
            vec![b]
        }
    };
    Ok(BoundsOut { rows })
}

fn expect(mode: &ExpectMode, fmt: Format) -> Result<String, CliError> {
    match mode {
        ExpectMode::Exact { p, g, k } => {
            let r = exact_truncated_average(*p, *g, *k)?;
            let closed = closed_form_truncated(*p, *k);
            render(Output::ExpectExact(ExactReport::new(*p, *g, &r, &closed)), fmt)
        }
        ExpectMode::Mc(a) => {
            let cfg = a.config();
            cfg.validate()?;
            let outcomes = parallel::trials(cfg.trials, |t| mc_trial(&cfg, t));
            if fmt == Format::Csv {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["trial", "total_smooth", "max_depth"]).map_err(csv_err)?;
                for o in &outcomes {
                    w.serialize((o.trial, o.total_smooth, o.max_depth)).map_err(csv_err)?;
                }
                return csv_string(w);
            }
            let r = MCResult::from_outcomes(&outcomes)?;
            render(Output::ExpectMc(McReport::new(&cfg, &r)), fmt)
        }
        ExpectMode::Cases(a) => {
            let cfg = a.config();
            cfg.validate()?;
            let cases = parallel::trials(cfg.trials, |t| case_trial(&cfg, t));
            if fmt == Format::Csv {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["trial", "case"]).map_err(csv_err)?;
                for (t, c) in cases.iter().enumerate() {
                    w.serialize((t, c.label())).map_err(csv_err)?;
                }
                return csv_string(w);
            }
            let rows = case_table(cfg.p, &cases)?;
            render(Output::ExpectCases(CasesReport::new(&cfg, &rows)), fmt)
        }
        ExpectMode::X0(a) => {
            let cfg = a.config();
            cfg.validate()?;
            let values = parallel::trials(cfg.trials, |t| x0_trial(&cfg, t));
            if fmt == Format::Csv {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["trial", "x0", "guard_hit"]).map_err(csv_err)?;
                for (t, (v, hit)) in values.iter().enumerate() {
                    w.serialize((t, v, hit)).map_err(csv_err)?;
                }
                return csv_string(w);
            }
            let r = X0Report::from_values(cfg.p, &values)?;
            render(Output::ExpectX0(X0Out::new(&cfg, &r)), fmt)
        }
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn render_text(out: &Output) -> String {
    let mut s = String::new();
    match out {
        Output::Model(m) => {
            let _ = writeln!(s, "p = {}, g = {}, f = {}", m.p, m.g, parse::format_poly(&ints(&m.f), 'x'));
            let _ = writeln!(s, "smooth points: {} (infinity {})", m.total_smooth, m.infinity_count);
            let _ = writeln!(s, "max depth: {} (guard {})", m.max_depth_reached, m.depth_guard);
            text_patch(&mut s, &m.tree, 0);
        }
        Output::ExpectMc(r) => {
            let _ = writeln!(
                s,
                "mean {:.6} ± {:.6} over {} trials (target {}), guard hits {}",
                r.mean_f64, r.stderr, r.settings.trials, r.target, r.guard_hits
            );
            for b in &r.histogram {
                let _ = writeln!(s, "  {:>4}: {}", b.value, b.count);
            }
        }
        Output::ExpectExact(r) => {
            let _ = writeln!(s, "E = {} ≈ {:.6} (p = {}, g = {}, k = {})", r.value, r.value_f64, r.p, r.g, r.k);
            let _ = writeln!(s, "closed form {}", r.closed_form);
        }
        Output::ExpectCases(r) => {
            for row in &r.rows {
                let _ = writeln!(s, "{:<7} {:>8} {:>12} {:>12} z={:.3}", row.case, row.count, row.frequency, row.expected, row.z);
            }
        }
        Output::ExpectX0(r) => {
            let _ = writeln!(s, "mean X0 = {} ± {:.6}, guard hits {}", r.mean, r.stderr, r.guard_hits);
            for t in &r.tails {
                let _ = writeln!(s, "  P(X0 ≥ {}) = {} (bound {})", t.threshold, t.frequency, t.bound);
            }
        }
        Output::RhoLog(r) | Output::Disks(r) => {
            let _ = writeln!(s, "{} over Q_{} (g = {})", r.curve, r.p, r.g);
            for d in &r.disks {
                let c = d.center.map_or_else(|| "∞".to_string(), |[x, y]| format!("({x},{y})"));
                let _ = writeln!(s, "  disk {c}: n_D = {}, bound {}, image {{{}}}", d.n_d, d.bound, d.image.join(", "));
            }
            let _ = writeln!(s, "Σ n_D = {} ≤ {}", r.sum_n_d, r.sum_n_d_bound);
            if let Some(u) = &r.union {
                let _ = writeln!(s, "ρ log image: {{{}}}", u.join(", "));
            }
            if let Some(h) = &r.hypotheses {
                for c in &h.checks {
                    let _ = writeln!(s, "  {}: {}", c.name, c.status);
                }
            }
        }
        Output::P1Image(r) | Output::SeriesImage(r) => {
            let _ = writeln!(s, "image on {} ({} points): {{{}}}", r.domain, r.size, r.points.join(", "));
        }
        Output::Newton(r) => {
            let v: Vec<String> = r.vertices.iter().map(|v| format!("({},{})", v.n, v.v)).collect();
            let big = r.big_n.map_or_else(|| "unbounded".to_string(), |n| n.to_string());
            let _ = writeln!(s, "vertices {}; n = {}, N = {}", v.join(" "), r.n, big);
        }
        Output::Wprep(r) => {
            let _ = writeln!(s, "content p^{}, degree {}", r.content, r.degree);
            let _ = writeln!(s, "f = {} mod p^{}", parse::format_poly(&ints(&r.poly_part), 't'), r.modulus_p);
            let _ = writeln!(s, "u = {} mod t^{}", parse::format_poly(&ints(&r.unit_part), 't'), r.modulus_t);
        }
        Output::Bounds(b) => {
            for r in &b.rows {
                let _ = writeln!(s, "{}: {} ≈ {:.6}", r.formula, r.value, r.value_f64);
            }
        }
        Output::Height(h) => {
            let _ = writeln!(s, "{:.6}", h.height);
        }
    }
    s
}

fn ints(v: &[String]) -> Vec<BigInt> {
    v.iter().map(|x| x.parse().unwrap_or_default()).collect()
}

fn text_patch(s: &mut String, n: &PatchReport, indent: usize) {
    for c in &n.columns {
        let _ = writeln!(s, "{:w$}x ≡ {}: {} ({})", "", c.c, c.case, c.smooth_count, w = 2 * indent + 2);
        if let Some(child) = &c.child {
            text_patch(s, child, indent + 1);
        }
    }
}
