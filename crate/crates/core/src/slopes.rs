//! T-adic Newton polygons of Fredholm series and the block decomposition
//! of their slopes.

use std::collections::BTreeMap;

use num_rational::Ratio;
use num_traits::Signed;

use crate::dwork::FormDegree;
use crate::error::{Error, Result};
use crate::fredholm::FredholmSeries;
use crate::padic::Valuation;
use crate::series::Geometry;

pub type Q = Ratio<i64>;

/// A coefficient's T-adic valuation; `exact == false` means the
/// coefficient vanished at the retained precision and `value` is the
/// truncation bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PolygonPoint {
    pub index: usize,
    pub value: i64,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub slope: Q,
    /// An endpoint is only a lower bound.
    pub provisional: bool,
    /// Coefficients past the computed range cannot lie below the line of
    /// this segment. `None` until a tail bound is supplied.
    pub tail_certified: Option<bool>,
}

impl Segment {
    pub fn multiplicity(&self) -> usize {
        self.end - self.start
    }

    pub fn certified(&self) -> bool {
        !self.provisional && self.tail_certified == Some(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    points: Vec<PolygonPoint>,
    hull: Vec<usize>,
    segments: Vec<Segment>,
}

impl NewtonPolygon {
    /// Lower convex hull of `points`, which must be indexed `0..n` in order.
    pub fn from_points(points: Vec<PolygonPoint>) -> Self {
        assert!(points.iter().enumerate().all(|(i, p)| p.index == i));
        let hull = lower_hull(&points);
        let segments = hull
            .windows(2)
            .map(|w| {
                let (a, b) = (points[w[0]], points[w[1]]);
                Segment {
                    start: a.index,
                    end: b.index,
                    slope: Q::new(b.value - a.value, (b.index - a.index) as i64),
                    provisional: !(a.exact && b.exact),
                    tail_certified: None,
                }
            })
            .collect();
        NewtonPolygon { points, hull, segments }
    }

    pub fn points(&self) -> &[PolygonPoint] {
        &self.points
    }

    /// Indices of the hull vertices.
    pub fn hull(&self) -> &[usize] {
        &self.hull
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Whether hull vertex `k` comes from an inexact valuation.
    pub fn vertex_provisional(&self, k: usize) -> bool {
        !self.points[k].exact
    }

    /// Height of the hull above index `k`.
    pub fn height(&self, k: usize) -> Q {
        for s in &self.segments {
            if s.start <= k && k <= s.end {
                let a = self.points[s.start];
                return Q::from_integer(a.value) + s.slope * Q::from_integer((k - s.start) as i64);
            }
        }
        Q::from_integer(self.points[k].value)
    }

    /// All slopes with multiplicity, in order.
    pub fn slopes(&self) -> Vec<Q> {
        self.segments.iter().flat_map(|s| std::iter::repeat(s.slope).take(s.multiplicity())).collect()
    }

    /// Slopes, with multiplicity, of the initial run of certified segments.
    pub fn certified_slopes(&self) -> Vec<Q> {
        self.segments
            .iter()
            .take_while(|s| s.certified())
            .flat_map(|s| std::iter::repeat(s.slope).take(s.multiplicity()))
            .collect()
    }

    /// Applies a convex lower bound `bound(k)` on the valuation of every
    /// coefficient: inexact points are raised to it (they stay provisional),
    /// the hull is rebuilt, and each segment is marked by whether every
    /// coefficient past the computed range stays on or above its line.
    pub fn apply_lower_bound(&mut self, bound: impl Fn(usize) -> Q) {
        let mut points = self.points.clone();
        for pt in points.iter_mut().filter(|pt| !pt.exact) {
            pt.value = pt.value.max(bound(pt.index).ceil().to_integer());
        }
        *self = Self::from_points(points);
        let last = self.points.len() - 1;
        for s in &mut self.segments {
            let base = Q::from_integer(self.points[s.start].value);
            let line = |k: usize| base + s.slope * Q::from_integer((k - s.start) as i64);
            let mut ok = true;
            let mut k = last + 1;
            loop {
                if bound(k) < line(k) {
                    ok = false;
                    break;
                }
                // once the bound grows faster than the line it stays above
                if bound(k + 1) - bound(k) >= s.slope {
                    break;
                }
                k += 1;
                if k > last + 100_000 {
                    ok = false;
                    break;
                }
            }
            s.tail_certified = Some(ok);
        }
    }
}

fn lower_hull(points: &[PolygonPoint]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        while hull.len() >= 2 {
            let a = points[hull[hull.len() - 2]];
            let b = points[hull[hull.len() - 1]];
            // drop b if it lies on or above the segment a-p
            let cross = (b.index as i64 - a.index as i64) * (p.value - a.value)
                - (b.value - a.value) * (p.index as i64 - a.index as i64);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// T-adic Newton polygon of a Fredholm series.
pub fn newton_polygon(c: &FredholmSeries) -> NewtonPolygon {
    let points = c
        .series()
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, x)| match x.t_valuation() {
            Valuation::Exact(v) => PolygonPoint { index: k, value: v as i64, exact: true },
            Valuation::AtLeast(v) => PolygonPoint { index: k, value: v as i64, exact: false },
        })
        .collect();
    NewtonPolygon::from_points(points)
}

/// `(p-1)/d * (sum of the k smallest |u|)` over the basis of the operator:
/// a lower bound for `v_T` of the `s^k` coefficient of its Fredholm series.
pub fn fredholm_lower_bound(geometry: Geometry, form: FormDegree, p: u64, d: u64, k: usize) -> Option<Q> {
    if d == 0 {
        return None;
    }
    let k = k as i64;
    let sum = match (geometry, form) {
        (Geometry::AffineLine, FormDegree::Zero) => k * (k - 1) / 2,
        (Geometry::AffineLine, FormDegree::One) => k * (k + 1) / 2,
        // |u| runs 0, 1, 1, 2, 2, ...
        (Geometry::Torus, _) => {
            let m = (k - 1) / 2;
            let mut s = m * (m + 1);
            if k > 0 && (k - 1) % 2 == 1 {
                s += m + 1;
            }
            s
        }
    };
    Some(Q::new((p as i64 - 1) * sum, d as i64))
}

/// The Hodge-type polygon height `(p-1) k (k-1) / (2d)`.
pub fn hodge_bound(p: u64, d: u64, k: usize) -> Q {
    let k = k as i64;
    Q::new((p as i64 - 1) * k * (k - 1), 2 * d as i64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MatchQuality {
    /// `slope = r (n + beta_j)`.
    Exact,
    /// `slope` lies in `r [n, n+1)` but off the progression.
    WithinWindow,
    Violation,
}

impl MatchQuality {
    pub fn name(self) -> &'static str {
        match self {
            MatchQuality::Exact => "exact",
            MatchQuality::WithinWindow => "within-window",
            MatchQuality::Violation => "violation",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassifiedSlope {
    pub position: usize,
    pub block: i64,
    pub slope: Q,
    pub quality: MatchQuality,
}

/// Block structure of a list of slopes, normalized with `v_T(T) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeReport {
    pub block_degree: usize,
    pub increment_r: Q,
    /// `beta_j` for block position `j`.
    pub position_residues: Vec<Q>,
    /// The same residues, sorted.
    pub residues: Vec<Q>,
    pub first_block: i64,
    pub classified: Vec<ClassifiedSlope>,
    /// `r` recomputed from each pair of consecutive full blocks.
    pub block_increments: Vec<Q>,
}

impl SlopeReport {
    pub fn count(&self, q: MatchQuality) -> usize {
        self.classified.iter().filter(|c| c.quality == q).count()
    }

    /// Every per-block increment equals `r` exactly.
    pub fn increment_consistent(&self) -> bool {
        self.block_increments.iter().all(|r| *r == self.increment_r)
    }
}

fn frac(x: Q) -> Q {
    x - x.floor()
}

fn mode(values: impl IntoIterator<Item = Q>) -> Option<Q> {
    let mut counts: BTreeMap<Q, usize> = BTreeMap::new();
    for v in values {
        *counts.entry(v).or_default() += 1;
    }
    let best = counts.values().copied().max()?;
    counts.into_iter().find(|(_, c)| *c == best).map(|(v, _)| v)
}

/// Fits `slope_i = r (n + beta_{i mod d})` to slopes grouped in blocks of
/// `d`, then classifies every slope against the fit.
pub fn decompose_slopes(slopes: &[Q], d: usize) -> Result<SlopeReport> {
    if d == 0 {
        return Err(Error::Slopes("block degree must be positive".into()));
    }
    if slopes.len() < 2 * d {
        return Err(Error::Slopes(format!(
            "{} certified slopes, at least {} needed; increase precision b or smax",
            slopes.len(),
            2 * d
        )));
    }
    let r = mode((0..slopes.len() - d).map(|i| slopes[i + d] - slopes[i])).expect("nonempty");
    if !r.is_positive() {
        return Err(Error::Slopes(format!("slopes do not grow from block to block (increment {r})")));
    }
    let first_block = (slopes[0] / r).floor().to_integer();
    let position_residues: Vec<Q> = (0..d)
        .map(|j| mode(slopes.iter().skip(j).step_by(d).map(|&s| frac(s / r))).expect("nonempty"))
        .collect();
    let mut residues = position_residues.clone();
    residues.sort();
    let classified = slopes
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let block = first_block + (i / d) as i64;
            let n = Q::from_integer(block);
            let quality = if s == r * (n + position_residues[i % d]) {
                MatchQuality::Exact
            } else if r * n <= s && s < r * (n + Q::from_integer(1)) {
                MatchQuality::WithinWindow
            } else {
                MatchQuality::Violation
            };
            ClassifiedSlope { position: i, block, slope: s, quality }
        })
        .collect();
    let full_blocks = slopes.len() / d;
    let block_increments = (0..full_blocks.saturating_sub(1))
        .flat_map(|b| (0..d).map(move |j| (b, j)))
        .map(|(b, j)| slopes[(b + 1) * d + j] - slopes[b * d + j])
        .collect();
    Ok(SlopeReport {
        block_degree: d,
        increment_r: r,
        position_residues,
        residues,
        first_block,
        classified,
        block_increments,
    })
}

/// [`decompose_slopes`] on the certified slopes of a polygon.
pub fn slope_decomposition(npoly: &NewtonPolygon, d: usize) -> Result<SlopeReport> {
    decompose_slopes(&npoly.certified_slopes(), d)
}

/// Indices `k` where the polygon dips below `bound(k)`.
pub fn bound_violations(npoly: &NewtonPolygon, bound: impl Fn(usize) -> Q) -> Vec<usize> {
    (0..npoly.points().len()).filter(|&k| npoly.height(k) < bound(k)).collect()
}

/// Evidence for entireness: whether the exact coefficient valuations are
/// nondecreasing in `k`, and where they fall below the Hodge-type bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntirenessEvidence {
    pub nondecreasing: bool,
    pub below_hodge: Vec<usize>,
}

pub fn entireness_evidence(npoly: &NewtonPolygon, p: u64, d: u64) -> EntirenessEvidence {
    let exact: Vec<&PolygonPoint> = npoly.points().iter().filter(|p| p.exact).collect();
    let nondecreasing = exact.windows(2).all(|w| w[0].value <= w[1].value);
    let below_hodge = if d == 0 {
        vec![]
    } else {
        exact.iter().filter(|pt| Q::from_integer(pt.value) < hodge_bound(p, d, pt.index)).map(|pt| pt.index).collect()
    };
    EntirenessEvidence { nondecreasing, below_hodge }
}
