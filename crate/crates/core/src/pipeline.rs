//! End-to-end trace-formula computation for a tower at a precision profile.

use crate::dwork::{assemble_matrix, default_weight, FormDegree, NuclearMatrix};
use crate::error::Result;
use crate::fredholm::{
    char_series, l_from_traces, l_trace_formula, power_traces, trace_differences, FredholmSeries, LFunctionSeries,
    Route,
};
use crate::padic::{PrecisionProfile, ZpTSeries};
use crate::slopes::{
    bound_violations, entireness_evidence, fredholm_lower_bound, hodge_bound, newton_polygon, slope_decomposition,
    EntirenessEvidence, NewtonPolygon, SlopeReport,
};
use crate::splitting::{SplittingContext, SplittingFunction, TowerInput};

/// Options for [`run_trace_formula`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceOptions {
    /// Basis weight `c`; `None` picks `deg f`.
    pub weight_c: Option<u64>,
    /// Use the unweighted monomial basis.
    pub unweighted: bool,
    /// Also compute power traces and the L-series they give.
    pub with_traces: bool,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { weight_c: None, unweighted: false, with_traces: true }
    }
}

#[derive(Clone, Debug)]
pub struct TraceFormulaRun {
    pub profile: PrecisionProfile,
    pub x_degree: usize,
    pub m0: NuclearMatrix,
    pub m1: NuclearMatrix,
    pub c0: FredholmSeries,
    pub c1: FredholmSeries,
    pub lfun: LFunctionSeries,
    /// `Tr(psi_0^d)`, `Tr(psi_1^d)` and the L-series built from their
    /// differences, when requested.
    pub traces: Option<(Vec<ZpTSeries>, Vec<ZpTSeries>, LFunctionSeries)>,
}

impl TraceFormulaRun {
    /// p-adic digits every reported coefficient is known to, capped at `a`.
    pub fn effective_digits(&self) -> u32 {
        let mut d = self.lfun.effective_digits();
        if let Some((_, _, l)) = &self.traces {
            d = d.min(l.effective_digits());
        }
        d.min(self.profile.a)
    }
}

/// Both matrices of the tower at the profile's `x`-degree bound.
pub fn matrices(tower: &TowerInput, prof: &PrecisionProfile, opts: &TraceOptions) -> Result<(NuclearMatrix, NuclearMatrix)> {
    let weight = if opts.unweighted { None } else { opts.weight_c.or_else(|| default_weight(tower.degree())) };
    let shift = weight.map_or(0, |c| prof.x_degree / c as usize);
    let ctx = SplittingContext::new(prof.ring()?, prof.b + shift)?;
    let ef = SplittingFunction::build(tower, &ctx)?;
    let m0 = assemble_matrix(&ef, FormDegree::Zero, prof.x_degree, weight, prof.b)?;
    let m1 = assemble_matrix(&ef, FormDegree::One, prof.x_degree, weight, prof.b)?;
    Ok((m0, m1))
}

pub fn run_trace_formula(tower: &TowerInput, prof: &PrecisionProfile, opts: &TraceOptions) -> Result<TraceFormulaRun> {
    prof.validate()?;
    let (m0, m1) = matrices(tower, prof, opts)?;
    let c0 = char_series(m0.matrix(), prof.smax);
    let c1 = char_series(m1.matrix(), prof.smax);
    let lfun = l_trace_formula(&c0, &c1)?;
    let traces = if opts.with_traces {
        let n = prof.smax.max(1);
        let t0 = power_traces(m0.matrix(), n);
        let t1 = power_traces(m1.matrix(), n);
        let l = l_from_traces(&trace_differences(&t0, &t1), prof.smax, Route::PowerTraces)?;
        Some((t0, t1, l))
    } else {
        None
    };
    Ok(TraceFormulaRun { profile: *prof, x_degree: prof.x_degree, m0, m1, c0, c1, lfun, traces })
}

/// Result of recomputing at twice the `x`-degree bound.
#[derive(Clone, Debug)]
pub struct DoublingCheck {
    pub base: TraceFormulaRun,
    pub doubled: TraceFormulaRun,
    /// First `(s-index, T-index)` where the two L-series differ.
    pub l_difference: Option<(usize, usize)>,
    /// Whether the Fredholm series of `psi_0` and `psi_1` agree as well.
    pub fredholm_agree: bool,
    pub digits: u32,
}

impl DoublingCheck {
    pub fn stable(&self) -> bool {
        self.l_difference.is_none() && self.fredholm_agree
    }
}

pub fn doubling_check(tower: &TowerInput, prof: &PrecisionProfile, opts: &TraceOptions) -> Result<DoublingCheck> {
    let opts = TraceOptions { with_traces: false, ..*opts };
    let base = run_trace_formula(tower, prof, &opts)?;
    let doubled = run_trace_formula(tower, &prof.with_x_degree(2 * prof.x_degree), &opts)?;
    let digits = base.effective_digits().min(doubled.effective_digits());
    let l_difference = base.lfun.first_difference(&doubled.lfun, digits);
    let same = |a: &FredholmSeries, b: &FredholmSeries| {
        a.series().coeffs().iter().zip(b.series().coeffs()).all(|(x, y)| x.congruent(y, digits))
    };
    let fredholm_agree = same(&base.c0, &doubled.c0) && same(&base.c1, &doubled.c1);
    Ok(DoublingCheck { base, doubled, l_difference, fredholm_agree, digits })
}

/// Newton polygons of both Fredholm series and the block decomposition of
/// the certified slopes of `C(psi_0, s)`.
#[derive(Clone, Debug)]
pub struct SlopeAnalysis {
    pub run: TraceFormulaRun,
    pub polygon0: NewtonPolygon,
    pub polygon1: NewtonPolygon,
    pub block_degree: usize,
    pub report: std::result::Result<SlopeReport, crate::error::Error>,
    /// Indices where the polygon of `C(psi_0, s)` lies below
    /// `(p-1) k (k-1) / (2d)`.
    pub hodge_violations: Vec<usize>,
    pub entireness: EntirenessEvidence,
}

pub fn run_slopes(
    tower: &TowerInput,
    prof: &PrecisionProfile,
    block_degree: Option<usize>,
    opts: &TraceOptions,
) -> Result<SlopeAnalysis> {
    let opts = TraceOptions { with_traces: false, ..*opts };
    let run = run_trace_formula(tower, prof, &opts)?;
    let (p, d, g) = (prof.p, tower.degree(), tower.geometry());
    let mut polygon0 = newton_polygon(&run.c0);
    let mut polygon1 = newton_polygon(&run.c1);
    if d > 0 {
        polygon0.apply_lower_bound(|k| fredholm_lower_bound(g, FormDegree::Zero, p, d, k).expect("d > 0"));
        polygon1.apply_lower_bound(|k| fredholm_lower_bound(g, FormDegree::One, p, d, k).expect("d > 0"));
    }
    let block_degree = block_degree.unwrap_or(d as usize);
    let report = slope_decomposition(&polygon0, block_degree);
    let hodge_violations = if d > 0 { bound_violations(&polygon0, |k| hodge_bound(p, d, k)) } else { vec![] };
    let entireness = entireness_evidence(&polygon0, p, d);
    Ok(SlopeAnalysis { run, polygon0, polygon1, block_degree, report, hodge_violations, entireness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{Geometry, TSeriesPoly};

    #[test]
    fn zero_tower_gives_zeta() {
        let prof = PrecisionProfile::auto(2, 6, 3, 3, 3, 0).unwrap();
        let r = prof.ring().unwrap();
        let aff = run_trace_formula(&TowerInput::zero(2, Geometry::AffineLine).unwrap(), &prof, &Default::default())
            .unwrap();
        assert_eq!(aff.lfun.series(), &TSeriesPoly::from_i64s(r, 3, 3, &[1, -2]));
        let tor =
            run_trace_formula(&TowerInput::zero(2, Geometry::Torus).unwrap(), &prof, &Default::default()).unwrap();
        assert_eq!(tor.lfun.series(), &TSeriesPoly::from_i64s(r, 3, 3, &[1, -1, -1, -1]));
        assert_eq!(tor.c1.series(), &TSeriesPoly::from_i64s(r, 3, 3, &[1, -1]));
        let (t0, t1, _) = aff.traces.unwrap();
        assert_eq!(t0, (1..=3).map(|d| ZpTSeries::from_i64s(r, 3, &[1 << d])).collect::<Vec<_>>());
        assert!(t1.iter().all(|t| t.is_zero()));
    }

    #[test]
    fn routes_agree_small() {
        let tower = TowerInput::new(3, Geometry::AffineLine, [(1, 1), (2, 1)]).unwrap();
        let prof = PrecisionProfile::auto(3, 4, 5, 3, 3, tower.degree()).unwrap();
        let run = run_trace_formula(&tower, &prof, &Default::default()).unwrap();
        let (_, _, l) = run.traces.as_ref().unwrap();
        assert_eq!(run.lfun.first_difference(l, run.effective_digits()), None);
        assert!(doubling_check(&tower, &prof, &Default::default()).unwrap().stable());
    }

    #[test]
    fn weighted_matches_unweighted() {
        let tower = TowerInput::new(2, Geometry::Torus, [(1, 1), (-1, 1)]).unwrap();
        let prof = PrecisionProfile::auto(2, 5, 6, 3, 3, tower.degree()).unwrap();
        let w = run_trace_formula(&tower, &prof, &Default::default()).unwrap();
        let u = run_trace_formula(&tower, &prof, &TraceOptions { unweighted: true, ..Default::default() }).unwrap();
        assert_eq!(w.lfun.first_difference(&u.lfun, prof.a), None);
        assert_eq!(w.c0, u.c0);
    }
}
