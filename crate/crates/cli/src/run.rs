//! Command dispatch.

use std::time::Instant;

use tadic_core::dwork::default_weight;
use tadic_core::fredholm::LFunctionSeries;
use tadic_core::oracle::{exp_sums, oracle_lfun, ENUMERATION_LIMIT};
use tadic_core::pipeline::{doubling_check, run_slopes, run_trace_formula, TraceOptions};
use tadic_core::series::{artin_hasse, pi_from_t};
use tadic_core::splitting::{build_ef, fiber_character, teichmuller_points};
use tadic_core::{Geometry, PrecisionProfile, TowerInput, ZpTSeries};

use crate::config::{Command, JobConfig};
use crate::error::CliError;
use crate::report::{
    CheckResult, Comparison, Decomposition, PolygonBlock, ProfileEcho, RunReport, SeriesBlock, SlopesBlock, Status,
};

/// Largest closed-point degree used by the fiber identity check.
const FIBER_DEGREE: usize = 3;

struct Job {
    config: JobConfig,
    tower: TowerInput,
    prof: PrecisionProfile,
    opts: TraceOptions,
}

impl Job {
    fn new(config: &JobConfig) -> Result<Self, CliError> {
        let tower = config.tower()?;
        let prof = config.profile()?;
        let opts = TraceOptions { weight_c: config.weight, unweighted: config.unweighted, with_traces: true };
        Ok(Job { config: config.clone(), tower, prof, opts })
    }

    fn weight(&self) -> Option<u64> {
        if self.opts.unweighted {
            None
        } else {
            self.opts.weight_c.or_else(|| default_weight(self.tower.degree()))
        }
    }

    fn report(&self, command: Command, digits: u32, status: Status) -> RunReport {
        RunReport {
            command: command.name().into(),
            config: self.config.clone(),
            warnings: self.tower.warnings(),
            profile: ProfileEcho::new(&self.prof, self.weight()),
            effective_digits: digits,
            series: vec![],
            point_counts: vec![],
            comparison: None,
            slopes: None,
            checks: vec![],
            status,
            timing_ms: 0,
        }
    }

    fn oracle(&self) -> Result<(LFunctionSeries, Vec<ZpTSeries>, Vec<u64>), CliError> {
        let l = oracle_lfun(&self.tower, &self.prof)?;
        let sums = exp_sums(&self.tower, &self.prof)?;
        Ok((l, sums.sums, sums.point_counts))
    }
}

/// Runs the configured command. The command comes from `config.command`.
pub fn run(config: &JobConfig) -> Result<RunReport, CliError> {
    let command = config.command.ok_or_else(|| CliError::Usage("no command given".into()))?;
    let start = Instant::now();
    let job = Job::new(config)?;
    let mut report = match command {
        Command::Lfun => lfun(&job)?,
        Command::Oracle => oracle(&job)?,
        Command::Compare => compare(&job)?,
        Command::Slopes => slopes(&job)?,
        Command::Selfcheck => selfcheck(&job)?,
    };
    report.timing_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

fn lfun(job: &Job) -> Result<RunReport, CliError> {
    let run = run_trace_formula(&job.tower, &job.prof, &job.opts)?;
    let digits = run.effective_digits();
    let mut r = job.report(Command::Lfun, digits, Status::Ok);
    r.series.push(SeriesBlock::from_lfun("L", &run.lfun, digits));
    r.series.push(SeriesBlock::from_fredholm("C(psi_0)", &run.c0, digits));
    r.series.push(SeriesBlock::from_fredholm("C(psi_1)", &run.c1, digits));
    Ok(r)
}

fn oracle(job: &Job) -> Result<RunReport, CliError> {
    let (l, sums, counts) = job.oracle()?;
    let digits = l.effective_digits().min(job.prof.a);
    let mut r = job.report(Command::Oracle, digits, Status::Ok);
    r.series.push(SeriesBlock::from_lfun("L", &l, digits));
    r.series.push(SeriesBlock::from_sums("S", "oracle", &sums, digits));
    r.point_counts = counts;
    Ok(r)
}

fn compare(job: &Job) -> Result<RunReport, CliError> {
    let run = run_trace_formula(&job.tower, &job.prof, &job.opts)?;
    let (l, _, _) = job.oracle()?;
    let digits = run.effective_digits().min(l.effective_digits());
    let cmp = Comparison::new(&run.lfun, &l, digits);
    let status = if cmp.agree() { Status::Agree } else { Status::Mismatch };
    let mut r = job.report(Command::Compare, digits, status);
    r.series.push(SeriesBlock::from_lfun("L", &run.lfun, digits));
    r.series.push(SeriesBlock::from_lfun("L", &l, digits));
    r.comparison = Some(cmp);
    Ok(r)
}

fn slopes(job: &Job) -> Result<RunReport, CliError> {
    let analysis = run_slopes(&job.tower, &job.prof, job.config.block_degree, &job.opts)?;
    let digits = analysis.run.effective_digits();
    let mut r = job.report(Command::Slopes, digits, Status::Ok);
    r.series.push(SeriesBlock::from_fredholm("C(psi_0)", &analysis.run.c0, digits));
    r.series.push(SeriesBlock::from_fredholm("C(psi_1)", &analysis.run.c1, digits));
    let (decomposition, decomposition_error) = match &analysis.report {
        Ok(rep) => (Some(Decomposition::new(rep)), None),
        Err(e) => (None, Some(e.to_string())),
    };
    r.slopes = Some(SlopesBlock {
        polygons: vec![
            PolygonBlock::new("C(psi_0)", &analysis.polygon0),
            PolygonBlock::new("C(psi_1)", &analysis.polygon1),
        ],
        block_degree: analysis.block_degree,
        decomposition,
        decomposition_error,
        hodge_violations: analysis.hodge_violations.clone(),
        valuations_nondecreasing: analysis.entireness.nondecreasing,
        below_hodge: analysis.entireness.below_hodge.clone(),
    });
    Ok(r)
}

/// `1 - p s` on the affine line, `(1 - p s) / (1 - s)` on the torus, as
/// residues mod `p^digits`.
pub fn zeta_at_t_zero(p: u64, geometry: Geometry, smax: usize, digits: u32) -> Vec<u64> {
    let m = (p as u128).pow(digits);
    let reduce = |x: i128| x.rem_euclid(m as i128) as u64;
    (0..=smax)
        .map(|k| match (k, geometry) {
            (0, _) => 1,
            (1, Geometry::AffineLine) => reduce(-(p as i128)),
            (_, Geometry::AffineLine) => 0,
            (_, Geometry::Torus) => reduce(1 - p as i128),
        })
        .collect()
}

fn check(name: &str, passed: bool, detail: impl Into<String>) -> CheckResult {
    CheckResult { name: name.into(), passed, detail: detail.into() }
}

fn selfcheck(job: &Job) -> Result<RunReport, CliError> {
    let (tower, prof) = (&job.tower, &job.prof);
    let mut checks = vec![];

    let doubling = doubling_check(tower, prof, &job.opts)?;
    checks.push(check(
        "doubling-stability",
        doubling.stable(),
        match doubling.l_difference {
            None if doubling.fredholm_agree => format!(
                "x-degree {} and {} agree mod p^{}",
                doubling.base.x_degree, doubling.doubled.x_degree, doubling.digits
            ),
            None => "Fredholm series differ".into(),
            Some((s, t)) => format!("L differs at s^{s} T^{t}"),
        },
    ));

    let run = run_trace_formula(tower, prof, &job.opts)?;
    let mut digits = run.effective_digits();
    let (_, _, lt) = run.traces.as_ref().expect("traces requested");
    let diff = run.lfun.first_difference(lt, digits);
    checks.push(check(
        "route-agreement:power-traces",
        diff.is_none(),
        diff.map_or(format!("agree mod p^{digits}"), |(s, t)| format!("differ at s^{s} T^{t}")),
    ));

    let q = (prof.p as u128).checked_pow(prof.smax as u32).unwrap_or(u128::MAX);
    if prof.dmax >= prof.smax && q <= ENUMERATION_LIMIT as u128 {
        let l = oracle_lfun(tower, prof)?;
        let d = digits.min(l.effective_digits());
        let cmp = Comparison::new(&run.lfun, &l, d);
        checks.push(check(
            "route-agreement:oracle",
            cmp.agree(),
            cmp.first_difference.as_ref().map_or(format!("agree mod p^{d}"), |f| {
                format!("differ at s^{} T^{}: {} vs {}", f.s_index, f.t_index, f.left, f.right)
            }),
        ));
        digits = d;
    } else {
        checks.push(check("route-agreement:oracle", true, "skipped: enumeration out of range"));
    }

    let ef = build_ef(tower, prof)?;
    checks.push(check("splitting-invariants", ef.satisfies_invariants(), "E_f(0) = 1 mod T, v_T(coeff x^k) >= |k|/d"));

    let at0 = run.lfun.series().coeffs().iter().map(|c| c.coeff(0).residue_mod(digits)).collect::<Vec<_>>();
    let expected = zeta_at_t_zero(prof.p, tower.geometry(), prof.smax, digits);
    checks.push(check("zeta-at-T=0", at0 == expected, format!("{at0:?}")));

    let integral = run.c0.is_integral_to(prof.a) && run.c1.is_integral_to(prof.a);
    checks.push(check("fredholm-integrality", integral, format!("constant term 1, known to p^{}", prof.a)));

    let mut fiber_ok = true;
    let mut count = 0usize;
    let zp = prof.ring()?;
    for e in 1..=FIBER_DEGREE {
        if (prof.p as u128).pow(e as u32) > 20_000 {
            break;
        }
        for x in teichmuller_points(zp, tower.geometry(), e)? {
            let lhs = ef.fiber_norm(&x)?;
            let rhs = fiber_character(tower, &x, prof.b)?;
            fiber_ok &= lhs.congruent(&rhs, digits);
            count += 1;
        }
    }
    checks.push(check("fiber-identity", fiber_ok, format!("{count} points")));

    let pi = pi_from_t(zp, prof.b)?;
    let e_pi = artin_hasse(zp, prof.b, prof.b.max(2) - 1)?.evaluate(&pi)?;
    checks.push(check("artin-hasse-at-pi", e_pi == ZpTSeries::from_i64s(zp, prof.b, &[1, 1]), "E(pi) = 1 + T"));

    let all = checks.iter().all(|c| c.passed);
    let mut r = job.report(Command::Selfcheck, digits, if all { Status::Ok } else { Status::Mismatch });
    r.series.push(SeriesBlock::from_lfun("L", &run.lfun, digits));
    r.checks = checks;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_residues() {
        assert_eq!(zeta_at_t_zero(2, Geometry::AffineLine, 3, 4), vec![1, 14, 0, 0]);
        assert_eq!(zeta_at_t_zero(3, Geometry::Torus, 2, 2), vec![1, 7, 7]);
    }
}
