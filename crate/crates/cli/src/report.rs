//! JSON report schema. Residues are decimal strings; rationals are
//! `"n/d"` strings.

use serde::{Deserialize, Serialize};
use tadic_core::fredholm::{FredholmSeries, LFunctionSeries};
use tadic_core::slopes::{NewtonPolygon, SlopeReport, Q};
use tadic_core::{PrecisionProfile, ZpTSeries};

use crate::config::JobConfig;
use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Agree,
    Mismatch,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok | Status::Agree => 0,
            Status::Mismatch => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileEcho {
    pub p: u64,
    pub a: u32,
    pub b: usize,
    pub x_degree: usize,
    pub smax: usize,
    pub dmax: usize,
    pub guard: u32,
    pub working_digits: u32,
    /// Basis weight actually used; absent for the unweighted basis.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<u64>,
}

impl ProfileEcho {
    pub fn new(prof: &PrecisionProfile, weight: Option<u64>) -> Self {
        ProfileEcho {
            p: prof.p,
            a: prof.a,
            b: prof.b,
            x_degree: prof.x_degree,
            smax: prof.smax,
            dmax: prof.dmax,
            guard: prof.guard,
            working_digits: prof.working_digits(),
            weight,
        }
    }
}

/// A series in `s` with coefficients in `Z_p[[T]]`, as residues
/// `coefficients[s-index][T-index]` modulo `p^digits`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesBlock {
    pub name: String,
    pub route: String,
    pub digits: u32,
    pub coefficients: Vec<Vec<String>>,
}

fn strings(rows: Vec<Vec<u64>>) -> Vec<Vec<String>> {
    rows.into_iter().map(|r| r.into_iter().map(|x| x.to_string()).collect()).collect()
}

impl SeriesBlock {
    pub fn from_lfun(name: &str, l: &LFunctionSeries, digits: u32) -> Self {
        SeriesBlock {
            name: name.into(),
            route: l.route().name().into(),
            digits,
            coefficients: strings(l.residues(digits)),
        }
    }

    pub fn from_fredholm(name: &str, c: &FredholmSeries, digits: u32) -> Self {
        SeriesBlock {
            name: name.into(),
            route: "trace-formula".into(),
            digits,
            coefficients: strings(c.series().coeffs().iter().map(|x| x.residues_mod(digits)).collect()),
        }
    }

    /// `sums[d-1]` placed at s-index `d`, with a zero row at index 0.
    pub fn from_sums(name: &str, route: &str, sums: &[ZpTSeries], digits: u32) -> Self {
        let t_len = sums.first().map_or(0, |s| s.len());
        let mut rows = vec![vec![0; t_len]];
        rows.extend(sums.iter().map(|s| s.residues_mod(digits)));
        SeriesBlock { name: name.into(), route: route.into(), digits, coefficients: strings(rows) }
    }

    /// The residues as integers.
    pub fn parse(&self) -> Result<Vec<Vec<u64>>, CliError> {
        self.coefficients
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| s.parse::<u64>().map_err(|_| CliError::Internal(format!("bad residue string '{s}'"))))
                    .collect()
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Difference {
    pub s_index: usize,
    pub t_index: usize,
    pub left: String,
    pub right: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub left: String,
    pub right: String,
    /// `"agree"` or `"mismatch"`.
    pub verdict: String,
    /// Comparison modulus `(p^digits, T^t_len, s^{smax+1})`.
    pub digits: u32,
    pub t_len: usize,
    pub smax: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_difference: Option<Difference>,
}

impl Comparison {
    pub fn new(left: &LFunctionSeries, right: &LFunctionSeries, digits: u32) -> Self {
        let first = left.first_difference(right, digits).map(|(s, t)| Difference {
            s_index: s,
            t_index: t,
            left: left.coeff(s).coeff(t).residue_mod(digits).to_string(),
            right: right.coeff(s).coeff(t).residue_mod(digits).to_string(),
        });
        Comparison {
            left: left.route().name().into(),
            right: right.route().name().into(),
            verdict: if first.is_none() { "agree" } else { "mismatch" }.into(),
            digits,
            t_len: left.t_len().min(right.t_len()),
            smax: left.smax().min(right.smax()),
            first_difference: first,
        }
    }

    pub fn agree(&self) -> bool {
        self.first_difference.is_none()
    }
}

pub fn q_string(q: &Q) -> String {
    q.to_string()
}

pub fn parse_q(s: &str) -> Result<Q, CliError> {
    s.parse().map_err(|_| CliError::Internal(format!("bad rational '{s}'")))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointEcho {
    pub index: usize,
    pub value: i64,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentEcho {
    pub start: usize,
    pub end: usize,
    pub slope: String,
    pub provisional: bool,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolygonBlock {
    pub series: String,
    pub points: Vec<PointEcho>,
    pub vertices: Vec<usize>,
    pub segments: Vec<SegmentEcho>,
}

impl PolygonBlock {
    pub fn new(series: &str, poly: &NewtonPolygon) -> Self {
        PolygonBlock {
            series: series.into(),
            points: poly.points().iter().map(|p| PointEcho { index: p.index, value: p.value, exact: p.exact }).collect(),
            vertices: poly.hull().to_vec(),
            segments: poly
                .segments()
                .iter()
                .map(|s| SegmentEcho {
                    start: s.start,
                    end: s.end,
                    slope: q_string(&s.slope),
                    provisional: s.provisional,
                    certified: s.certified(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifiedEcho {
    pub position: usize,
    pub block: i64,
    pub slope: String,
    pub quality: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub block_degree: usize,
    pub increment_r: String,
    pub residues: Vec<String>,
    pub position_residues: Vec<String>,
    pub first_block: i64,
    pub classified: Vec<ClassifiedEcho>,
    pub block_increments: Vec<String>,
    pub increment_consistent: bool,
}

impl Decomposition {
    pub fn new(r: &SlopeReport) -> Self {
        Decomposition {
            block_degree: r.block_degree,
            increment_r: q_string(&r.increment_r),
            residues: r.residues.iter().map(q_string).collect(),
            position_residues: r.position_residues.iter().map(q_string).collect(),
            first_block: r.first_block,
            classified: r
                .classified
                .iter()
                .map(|c| ClassifiedEcho {
                    position: c.position,
                    block: c.block,
                    slope: q_string(&c.slope),
                    quality: c.quality.name().into(),
                })
                .collect(),
            block_increments: r.block_increments.iter().map(q_string).collect(),
            increment_consistent: r.increment_consistent(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopesBlock {
    pub polygons: Vec<PolygonBlock>,
    pub block_degree: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<Decomposition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition_error: Option<String>,
    /// Indices where the polygon of `C(psi_0, s)` lies below
    /// `(p-1) k (k-1) / (2d)`.
    pub hodge_violations: Vec<usize>,
    pub valuations_nondecreasing: bool,
    pub below_hodge: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub config: JobConfig,
    pub warnings: Vec<String>,
    pub profile: ProfileEcho,
    /// p-adic digits to which every reported series is correct.
    pub effective_digits: u32,
    pub series: Vec<SeriesBlock>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub point_counts: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Comparison>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slopes: Option<SlopesBlock>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckResult>,
    pub status: Status,
    pub timing_ms: u64,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Internal(format!("unreadable report: {e}")))
    }

    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    pub fn series_named(&self, name: &str) -> Option<&SeriesBlock> {
        self.series.iter().find(|s| s.name == name)
    }

    /// The same report with the timing field zeroed.
    pub fn without_timing(&self) -> Self {
        RunReport { timing_ms: 0, ..self.clone() }
    }
}
