//! The JSON run report. Layout is pinned by `schema/report.schema.json`.

use std::collections::BTreeMap;

use heatcert_core::certificates::CertificateReport;
use heatcert_core::constants::{ConstantsBundle, NonexistenceSlopes, ScanRow, Thresholds};
use heatcert_core::field::Subdomain;
use heatcert_core::solver::{Localization, Region, RegionRadii, SolutionChecks, SolveConfig, Status};
use serde::Serialize;

use crate::config::FileConfig;

pub const TOOL: &str = "heatcert";

#[derive(Debug, Clone, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for ToolInfo {
    fn default() -> Self {
        ToolInfo {
            name: TOOL,
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub tool: ToolInfo,
    pub command: String,
    pub problem: ProblemEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantsReport>,
    pub certificates: Vec<CertificateEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanReport>,
    /// CSV files written, relative to the `--csv` directory.
    pub files: Vec<String>,
    /// Wall-clock seconds per phase.
    pub timings: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn failed_certificates(&self) -> impl Iterator<Item = &CertificateEntry> {
        self.certificates.iter().filter(|c| !c.report.holds)
    }
}

/// The problem as run, after command-line overrides.
#[derive(Debug, Clone, Serialize)]
pub struct ProblemEcho {
    /// Loadable problem file reproducing this run.
    pub config: String,
    pub settings: FileConfig,
    pub grid: GridInfo,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridInfo {
    pub nx: usize,
    pub nt: usize,
    pub modes: usize,
    pub dx: f64,
    pub dt: f64,
    /// `D` moved to the nearest grid nodes.
    pub subdomain: Subdomain,
    /// Time nodes covering `[t0, t1]`.
    pub time_window: (usize, usize),
    pub snapped_times: SnappedTimes,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SnappedTimes {
    pub alpha: Vec<SnappedTime>,
    pub beta: Vec<SnappedTime>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SnappedTime {
    pub time: f64,
    pub distance: f64,
}

/// A value with its two-decimal rendering.
#[derive(Debug, Clone, Serialize)]
pub struct Scalar {
    pub value: f64,
    pub display: String,
}

impl Scalar {
    pub fn new(value: f64) -> Self {
        Scalar {
            value,
            display: format!("{value:.2}"),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PerComponent<T> {
    pub u: T,
    pub v: T,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantsReport {
    pub bundle: ConstantsBundle,
    /// `m, c1, c2, C1, C2`.
    pub summary: BTreeMap<String, Scalar>,
    /// Present for integral-kind conditions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<PerComponent<Thresholds>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold_display: Option<PerComponent<(Scalar, Scalar)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slopes: Option<PerComponent<NonexistenceSlopes>>,
}

impl ConstantsReport {
    pub fn summary_of(bundle: &ConstantsBundle) -> BTreeMap<String, Scalar> {
        [
            ("m", bundle.m),
            ("c1", bundle.c1),
            ("c2", bundle.c2),
            ("C1", bundle.cap_c1),
            ("C2", bundle.cap_c2),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), Scalar::new(v)))
        .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateEntry {
    #[serde(flatten)]
    pub report: CertificateReport,
    /// Per-pair reports of a nested scan.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<CertificateReport>,
}

/// Asserted box `boxes[index]` of `certificates[certificate]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoxLink {
    pub certificate: usize,
    #[serde(rename = "box")]
    pub index: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunEntry {
    pub label: String,
    pub status: Status,
    /// Sup residual under `M`.
    pub residual: f64,
    pub iterations: usize,
    pub localization: Localization,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checks: Option<SolutionChecks>,
    /// Index of the earlier run this one duplicates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub same_as: Option<usize>,
    /// Asserted boxes of holding certificates that contain this solution.
    pub asserted_in: Vec<BoxLink>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub config: SolveConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radii: Option<RegionRadii>,
    pub runs: Vec<RunEntry>,
    /// Indices of the distinct converged runs.
    pub distinct: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub b_min: f64,
    pub b_max: f64,
    pub steps: usize,
    pub rows: Vec<ScanRow>,
    pub argmin: usize,
}
