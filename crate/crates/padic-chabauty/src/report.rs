//! Serializable reports. Every JSON document carries `"schema": "padic-chabauty/1"`
//! and a `"command"` tag naming the shape of `"result"`.
//!
//! Exact rationals are strings such as `"23/8"`; points of `P^{g-1}(F_p)`
//! are strings such as `"(1:0:1)"`; p-adic numbers use `u*p^v + O(p^N)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use padic_chabauty_core::bounds::BoundReport;
use padic_chabauty_core::chabauty::{
    CheckStatus, DiskAnalysis, DiskCenter, HypothesesReport, RhoLogResult, Uniformizer,
};
use padic_chabauty_core::expectation::{
    ratio_to_f64, BigRational, CaseRow, EnumResult, MCResult, SampleConfig, X0Report,
};
use padic_chabauty_core::model::{ColumnCase, ColumnRecord, DecentModel, PatchNode, UnitValueKind};
use padic_chabauty_core::projred::{Chart, ReductionImage};
use padic_chabauty_core::series::{NewtonPolygon, UpperEnd};
use padic_chabauty_core::weierstrass::WeierstrassFactorization;
use padic_chabauty_core::zpoly::ZpPoly;

pub const SCHEMA: &str = "padic-chabauty/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub schema: String,
    #[serde(flatten)]
    pub output: Output,
}

impl Document {
    pub fn new(output: Output) -> Self {
        Document { schema: SCHEMA.to_string(), output }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "result")]
pub enum Output {
    #[serde(rename = "model")]
    Model(ModelReport),
    #[serde(rename = "expect mc")]
    ExpectMc(McReport),
    #[serde(rename = "expect exact")]
    ExpectExact(ExactReport),
    #[serde(rename = "expect cases")]
    ExpectCases(CasesReport),
    #[serde(rename = "expect x0")]
    ExpectX0(X0Out),
    #[serde(rename = "rholog")]
    RhoLog(RhoLogReport),
    #[serde(rename = "disks")]
    Disks(RhoLogReport),
    #[serde(rename = "p1image")]
    P1Image(ImageReport),
    #[serde(rename = "seriesimage")]
    SeriesImage(ImageReport),
    #[serde(rename = "newton")]
    Newton(NewtonReport),
    #[serde(rename = "wprep")]
    Wprep(WprepReport),
    #[serde(rename = "bounds")]
    Bounds(BoundsOut),
    #[serde(rename = "height")]
    Height(HeightReport),
}

pub fn rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn poly_strings(f: &ZpPoly) -> Vec<String> {
    f.coeffs().iter().map(BigInt::to_string).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnReport {
    pub c: u64,
    pub case: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blow_up_rhs: Option<[u8; 3]>,
    pub smooth_count: u64,
    pub truncated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub child: Option<Box<PatchReport>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatchReport {
    pub depth: u32,
    pub parent_column: Option<u64>,
    /// Coefficients of the patch polynomial, increasing degree.
    pub h: Vec<String>,
    pub h_precision: Option<u32>,
    pub smooth_count: u64,
    pub columns: Vec<ColumnReport>,
}

impl From<&ColumnRecord> for ColumnReport {
    fn from(c: &ColumnRecord) -> Self {
        let blow_up_rhs = match c.case {
            ColumnCase::UnitValue(UnitValueKind::BlownUpSmooth { rhs }) => Some(rhs),
            _ => None,
        };
        ColumnReport {
            c: c.c,
            case: c.case.tag().to_string(),
            blow_up_rhs,
            smooth_count: c.smooth_count,
            truncated: c.truncated,
            child: c.child.as_deref().map(|n| Box::new(PatchReport::from(n))),
        }
    }
}

impl From<&PatchNode> for PatchReport {
    fn from(n: &PatchNode) -> Self {
        PatchReport {
            depth: n.depth,
            parent_column: n.parent_column,
            h: poly_strings(&n.h),
            h_precision: n.h.prec(),
            smooth_count: n.smooth_count(),
            columns: n.columns.iter().map(ColumnReport::from).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub p: u64,
    pub g: usize,
    /// `f`, increasing degree.
    pub f: Vec<String>,
    pub precision: Option<u32>,
    pub depth_guard: u32,
    pub truncated_at: Option<u32>,
    pub total_smooth: u64,
    pub infinity_count: u64,
    pub max_depth_reached: u32,
    pub tree: PatchReport,
}

impl ModelReport {
    pub fn new(g: usize, depth_guard: u32, truncated_at: Option<u32>, m: &DecentModel) -> Self {
        ModelReport {
            p: m.p,
            g,
            f: poly_strings(&m.root.h),
            precision: m.root.h.prec(),
            depth_guard,
            truncated_at,
            total_smooth: m.total_smooth,
            infinity_count: m.infinity_count,
            max_depth_reached: m.max_depth_reached,
            tree: PatchReport::from(&m.root),
        }
    }
}

/// One histogram bar; maps with integer keys do not survive the tagged envelope.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bin {
    pub value: u64,
    pub count: u64,
}

fn bins<K: Copy + Into<u64>>(h: &BTreeMap<K, u64>) -> Vec<Bin> {
    h.iter().map(|(&k, &count)| Bin { value: k.into(), count }).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSettings {
    pub p: u64,
    pub g: usize,
    pub trials: u64,
    pub seed: u64,
    pub depth_guard: u32,
    pub digit_budget: u32,
}

impl From<&SampleConfig> for SampleSettings {
    fn from(c: &SampleConfig) -> Self {
        SampleSettings {
            p: c.p,
            g: c.g,
            trials: c.trials,
            seed: c.seed,
            depth_guard: c.depth_guard,
            digit_budget: c.digit_budget,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub settings: SampleSettings,
    pub mean: String,
    pub mean_f64: f64,
    pub stderr: f64,
    pub target: u64,
    pub histogram: Vec<Bin>,
    pub depth_histogram: Vec<Bin>,
    pub guard_hits: u64,
}

impl McReport {
    pub fn new(cfg: &SampleConfig, r: &MCResult) -> Self {
        McReport {
            settings: cfg.into(),
            mean: rational(&r.mean),
            mean_f64: r.mean_f64(),
            stderr: r.stderr,
            target: cfg.p + 1,
            histogram: bins(&r.histogram),
            depth_histogram: bins(&r.depth_histogram),
            guard_hits: r.guard_hits,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactReport {
    pub p: u64,
    pub g: usize,
    pub k: u32,
    pub value: String,
    pub value_f64: f64,
    pub per_column: String,
    pub closed_form: String,
}

impl ExactReport {
    pub fn new(p: u64, g: usize, r: &EnumResult, closed: &BigRational) -> Self {
        ExactReport {
            p,
            g,
            k: r.k,
            value: rational(&r.value),
            value_f64: ratio_to_f64(&r.value),
            per_column: rational(&r.per_column),
            closed_form: rational(closed),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReportRow {
    pub case: String,
    pub count: u64,
    pub frequency: String,
    pub expected: String,
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CasesReport {
    pub settings: SampleSettings,
    pub rows: Vec<CaseReportRow>,
}

impl CasesReport {
    pub fn new(cfg: &SampleConfig, rows: &[CaseRow]) -> Self {
        CasesReport {
            settings: cfg.into(),
            rows: rows
                .iter()
                .map(|r| CaseReportRow {
                    case: r.case.label().to_string(),
                    count: r.count,
                    frequency: rational(&r.frequency),
                    expected: rational(&r.expected),
                    z: r.z,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub threshold: u64,
    pub frequency: String,
    pub bound: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct X0Out {
    pub settings: SampleSettings,
    pub mean: String,
    pub stderr: f64,
    pub histogram: Vec<Bin>,
    pub tails: Vec<TailReport>,
    pub guard_hits: u64,
}

impl X0Out {
    pub fn new(cfg: &SampleConfig, r: &X0Report) -> Self {
        X0Out {
            settings: cfg.into(),
            mean: rational(&r.mean),
            stderr: r.stderr,
            histogram: bins(&r.histogram),
            tails: r
                .tails
                .iter()
                .map(|t| TailReport {
                    threshold: t.threshold,
                    frequency: rational(&t.frequency),
                    bound: rational(&t.bound),
                })
                .collect(),
            guard_hits: r.guard_hits,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertDiskReport {
    pub chart: String,
    pub center: String,
    pub radius: u32,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageReport {
    pub p: u64,
    pub domain: String,
    pub points: Vec<String>,
    pub size: usize,
    pub max_depth_used: u32,
    pub certificate: Vec<CertDiskReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codomain_change: Option<Vec<Vec<i64>>>,
    /// Set when subdivision stopped at the depth limit; the points are then a partial image.
    #[serde(default)]
    pub partial: bool,
}

impl ImageReport {
    pub fn new(p: u64, domain: &str, img: &ReductionImage, partial: bool) -> Self {
        ImageReport {
            p,
            domain: domain.to_string(),
            points: img.points.iter().map(ToString::to_string).collect(),
            size: img.len(),
            max_depth_used: img.max_depth_used,
            certificate: img
                .certificate
                .iter()
                .map(|d| CertDiskReport {
                    chart: match d.chart {
                        Chart::Finite => "finite",
                        Chart::Infinity => "infinity",
                    }
                    .to_string(),
                    center: d.center.to_string(),
                    radius: d.radius,
                    value: d.value.to_string(),
                })
                .collect(),
            codomain_change: img.codomain_change.clone(),
            partial,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub status: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesesOut {
    pub checks: Vec<CheckReport>,
    pub newton_segment: Option<[(usize, i64); 2]>,
}

impl From<&HypothesesReport> for HypothesesOut {
    fn from(h: &HypothesesReport) -> Self {
        HypothesesOut {
            checks: h
                .checks
                .iter()
                .map(|c| CheckReport {
                    name: c.id.name().to_string(),
                    status: match c.status {
                        CheckStatus::Pass => "pass",
                        CheckStatus::Fail => "fail",
                        CheckStatus::Inconclusive => "inconclusive",
                    }
                    .to_string(),
                    detail: c.detail.clone(),
                })
                .collect(),
            newton_segment: h.segment.map(|(a, b)| [a, b]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskReport {
    pub chart: String,
    pub center: Option<[u64; 2]>,
    pub uniformizer: String,
    pub n_d: usize,
    pub bound: u64,
    pub image: Vec<String>,
    pub image_size: usize,
    pub constants_supplied: bool,
    pub truncation: usize,
    /// Leading coefficients of each `ℓ_j`, up to the first nonzero one.
    pub log_leading: Vec<String>,
}

impl From<&DiskAnalysis> for DiskReport {
    fn from(a: &DiskAnalysis) -> Self {
        let d = a.expansion.disk;
        let (chart, center) = match d.center {
            DiskCenter::Infinity => ("infinity", None),
            DiskCenter::Affine { x, y } => ("affine", Some([x, y])),
        };
        let log_leading = a
            .log
            .entries()
            .iter()
            .map(|l| {
                (1..l.len())
                    .find(|&n| !l.coeff(n).is_zero())
                    .map_or_else(|| "0".to_string(), |n| format!("({})*t^{n}", l.coeff(n)))
            })
            .collect();
        DiskReport {
            chart: chart.to_string(),
            center,
            uniformizer: match d.uniformizer {
                Uniformizer::InfinityT => "y/x^(g+1)",
                Uniformizer::XMinusX0 => "x - x0",
                Uniformizer::YMinusY0 => "y - y0",
            }
            .to_string(),
            n_d: a.n_d,
            bound: a.bound,
            image: a.image.points.iter().map(ToString::to_string).collect(),
            image_size: a.image.len(),
            constants_supplied: a.constants_supplied,
            truncation: a.expansion.truncation,
            log_leading,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoLogReport {
    pub p: u64,
    pub g: usize,
    pub curve: String,
    pub disks: Vec<DiskReport>,
    pub union: Option<Vec<String>>,
    pub sum_n_d: usize,
    pub sum_n_d_bound: usize,
    pub curve_image_bound: Option<String>,
    pub hypotheses: Option<HypothesesOut>,
}

impl RhoLogReport {
    pub fn new(curve: String, r: &RhoLogResult, curve_bound: Option<&BigRational>) -> Self {
        RhoLogReport {
            p: r.p,
            g: r.g,
            curve,
            disks: r.disks.iter().map(DiskReport::from).collect(),
            union: r.union.as_ref().map(|u| u.iter().map(ToString::to_string).collect()),
            sum_n_d: r.sum_n_d,
            sum_n_d_bound: 2 * r.g - 2,
            curve_image_bound: curve_bound.map(rational),
            hypotheses: r.hypotheses.as_ref().map(HypothesesOut::from),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexReport {
    pub n: usize,
    pub v: i64,
    pub stable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonReport {
    pub p: u64,
    pub truncation: usize,
    pub vertices: Vec<VertexReport>,
    pub slopes: Vec<String>,
    pub min_height: i64,
    pub tail_bound: Option<i64>,
    pub n: usize,
    /// `None` when the last minimal vertex is not certified within the truncation.
    pub big_n: Option<usize>,
}

impl NewtonReport {
    pub fn new(p: u64, np: &NewtonPolygon, n: usize, big_n: UpperEnd) -> Self {
        NewtonReport {
            p,
            truncation: np.truncation(),
            vertices: np.vertices().iter().map(|v| VertexReport { n: v.n, v: v.v, stable: v.stable }).collect(),
            slopes: np
                .slopes()
                .iter()
                .map(|s| if s.is_integer() { s.numer().to_string() } else { format!("{}/{}", s.numer(), s.denom()) })
                .collect(),
            min_height: np.min_height(),
            tail_bound: np.tail_bound(),
            n,
            big_n: match big_n {
                UpperEnd::Bounded(b) => Some(b),
                UpperEnd::UnboundedWithinTruncation => None,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WprepReport {
    pub p: u64,
    pub content: i64,
    pub degree: usize,
    /// Increasing degree, modulo `p^modulus_p`.
    pub poly_part: Vec<String>,
    pub unit_part: Vec<String>,
    pub modulus_p: u32,
    pub modulus_t: usize,
}

impl WprepReport {
    pub fn new(p: u64, w: &WeierstrassFactorization) -> Self {
        WprepReport {
            p,
            content: w.content,
            degree: w.degree,
            poly_part: poly_strings(&w.poly_part),
            unit_part: poly_strings(&w.unit_part),
            modulus_p: w.modulus_p,
            modulus_t: w.modulus_t,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub formula: String,
    pub p: u64,
    pub g: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_size: Option<u64>,
    pub value: String,
    pub value_f64: f64,
}

impl From<&BoundReport> for BoundRow {
    fn from(b: &BoundReport) -> Self {
        BoundRow {
            formula: b.formula.name().to_string(),
            p: b.p,
            g: b.g,
            d: None,
            image_size: b.image_size,
            value: rational(&b.value),
            value_f64: ratio_to_f64(&b.value),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsOut {
    pub rows: Vec<BoundRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightReport {
    pub a: Vec<String>,
    pub height: f64,
}
