//! Acceptance suite. Prints one `[PASS]` or `[FAIL]` line per criterion and
//! exits nonzero if any criterion fails.

use std::time::Instant;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tadic_cli::config::parse_terms;
use tadic_cli::run::zeta_at_t_zero;
use tadic_cli::{run, Command, JobConfig};
use tadic_core::dwork::{theta_apply, theta_matrix, FormDegree};
use tadic_core::fredholm::power_traces;
use tadic_core::pipeline::{doubling_check, run_slopes, run_trace_formula, TraceFormulaRun};
use tadic_core::series::{artin_hasse, pi_from_t};
use tadic_core::slopes::{hodge_bound, MatchQuality, Q};
use tadic_core::splitting::{build_ef, fiber_character, teichmuller_points};
use tadic_core::{FormKind, Geometry, PrecisionProfile, TowerInput, XSeries, ZpRing, ZpTSeries};

const SEED: u64 = 0x7a_d1c5;

struct Case {
    p: u64,
    geometry: &'static str,
    f: &'static str,
}

const CASES: [Case; 5] = [
    Case { p: 2, geometry: "affine-line", f: "1:1" },
    Case { p: 2, geometry: "affine-line", f: "3:1" },
    Case { p: 3, geometry: "affine-line", f: "1:1,2:1" },
    Case { p: 2, geometry: "torus", f: "1:1,-1:1" },
    Case { p: 5, geometry: "affine-line", f: "4:1" },
];

fn config(command: Command, c: &Case, a: u32, b: usize, smax: usize, dmax: usize) -> JobConfig {
    JobConfig {
        command: Some(command),
        p: c.p,
        geometry: c.geometry.parse().unwrap(),
        f: parse_terms(c.f).unwrap(),
        a,
        b,
        x_degree: None,
        smax,
        dmax,
        guard: None,
        block_degree: None,
        weight: None,
        unweighted: false,
        out: None,
    }
}

fn case_config(c: &Case) -> JobConfig {
    config(Command::Compare, c, 6, 8, 4, 4)
}

fn case_run(c: &Case) -> (TowerInput, PrecisionProfile, TraceFormulaRun) {
    let cfg = case_config(c);
    let (tower, prof) = (cfg.tower().unwrap(), cfg.profile().unwrap());
    let run = run_trace_formula(&tower, &prof, &Default::default()).unwrap();
    (tower, prof, run)
}

fn label(c: &Case) -> String {
    format!("p={} {} f={}", c.p, c.geometry, c.f)
}

type Outcome = Result<String, String>;

fn criterion_1() -> Outcome {
    let mut notes = vec![];
    for c in &CASES {
        let start = Instant::now();
        let r = run(&case_config(c)).map_err(|e| format!("{}: {e}", label(c)))?;
        let cmp = r.comparison.as_ref().unwrap();
        if cmp.verdict != "agree" || r.effective_digits < 4 || cmp.t_len != 8 || cmp.smax != 4 {
            return Err(format!("{}: verdict {} at p^{}", label(c), cmp.verdict, r.effective_digits));
        }
        notes.push(format!("{} agree mod p^{} ({:.2}s)", label(c), r.effective_digits, start.elapsed().as_secs_f64()));
    }
    Ok(notes.join("; "))
}

fn criterion_2() -> Outcome {
    for c in &CASES {
        let (tower, prof, run) = case_run(c);
        let digits = run.effective_digits();
        let at0: Vec<u64> = run.lfun.series().coeffs().iter().map(|x| x.coeff(0).residue_mod(digits)).collect();
        let expected = zeta_at_t_zero(prof.p, tower.geometry(), prof.smax, digits);
        if at0 != expected {
            return Err(format!("{}: L(0, s) = {at0:?}, expected {expected:?}", label(c)));
        }
        // Also the unreduced residues: nothing beyond the known digits.
        let full: Vec<u64> = run.lfun.at_t_zero().iter().map(|x| x % prof.p.pow(digits)).collect();
        if full != expected {
            return Err(format!("{}: constant-term residues disagree", label(c)));
        }
    }
    Ok("L(0, s) equals the zeta function in all five cases".into())
}

fn criterion_3() -> Outcome {
    for c in &CASES {
        let (_, prof, run) = case_run(c);
        for (name, f) in [("C(psi_0)", &run.c0), ("C(psi_1)", &run.c1)] {
            if !f.is_integral_to(prof.a) {
                return Err(format!("{}: {name} not integral to p^{}", label(c), prof.a));
            }
        }
    }
    Ok("every Fredholm coefficient is a p-adic integer known to p^6".into())
}

fn criterion_4() -> Outcome {
    for c in &CASES {
        let cfg = case_config(c);
        let check = doubling_check(&cfg.tower().unwrap(), &cfg.profile().unwrap(), &Default::default()).unwrap();
        if !check.stable() {
            return Err(format!("{}: x-degree {} vs {} differ at {:?}", label(c), check.base.x_degree,
                check.doubled.x_degree, check.l_difference));
        }
    }
    Ok("doubling the x-degree bound changes no retained coefficient".into())
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut min_digits = u32::MAX;
    for i in 0..20 {
        let p = [2u64, 3][rng.gen_range(0..2)];
        let geometry = if rng.gen_bool(0.5) { Geometry::AffineLine } else { Geometry::Torus };
        let degree = rng.gen_range(1..=4i64);
        let mut terms = vec![];
        for u in 1..=degree {
            terms.push((u, rng.gen_range(0..p as i64)));
            if geometry == Geometry::Torus {
                terms.push((-u, rng.gen_range(0..p as i64)));
            }
        }
        let tower = TowerInput::new(p, geometry, terms.clone()).unwrap();
        let prof = PrecisionProfile::auto(p, 5, 6, 4, 4, tower.degree()).unwrap();
        let run = run_trace_formula(&tower, &prof, &Default::default()).unwrap();
        let digits = run.effective_digits();
        let (_, _, l) = run.traces.as_ref().unwrap();
        if let Some(at) = run.lfun.first_difference(l, digits) {
            return Err(format!("tower {i} (p={p}, {geometry:?}, {terms:?}): routes differ at {at:?}"));
        }
        min_digits = min_digits.min(digits);
    }
    Ok(format!("20 random towers agree, effective precision >= p^{min_digits}"))
}

fn criterion_6() -> Outcome {
    let mut total = 0;
    for c in &CASES {
        let (tower, prof, run) = case_run(c);
        let digits = run.effective_digits();
        let ef = build_ef(&tower, &prof).unwrap();
        for e in 1..=3 {
            for x in teichmuller_points(prof.ring().unwrap(), tower.geometry(), e).unwrap() {
                let lhs = ef.fiber_norm(&x).unwrap();
                let rhs = fiber_character(&tower, &x, 8).unwrap();
                if lhs.len() != 8 || !lhs.congruent(&rhs, digits) {
                    return Err(format!("{}: fiber identity fails at a degree-{e} point", label(c)));
                }
                total += 1;
            }
        }
    }
    Ok(format!("{total} Teichmüller points"))
}

fn random_series(rng: &mut ChaCha8Rng, ring: ZpRing, t_len: usize) -> ZpTSeries {
    let c: Vec<_> = (0..t_len).map(|_| ring.from_u64(rng.gen_range(0..ring.modulus()))).collect();
    ZpTSeries::from_coeffs(ring, &c)
}

fn random_xseries(rng: &mut ChaCha8Rng, g: Geometry, kind: FormKind, bound: usize, reach: i64, ring: ZpRing) -> XSeries {
    let mut s = XSeries::zero(g, kind, bound, ring, 3);
    let lo = if g == Geometry::Torus { -reach } else { 0 };
    for u in lo..=reach {
        if rng.gen_bool(0.6) {
            s.set(u, random_series(rng, ring, 3));
        }
    }
    s
}

/// Image of a monomial under the Dwork operator, written out by hand.
fn theta_oracle(p: i64, g: Geometry, form: FormDegree, u: i64) -> Option<(i64, i64)> {
    match (form, g) {
        (FormDegree::Zero, _) => (u.rem_euclid(p) == 0).then_some((u / p, p)),
        (FormDegree::One, Geometry::AffineLine) => ((u + 1) % p == 0).then_some(((u + 1) / p - 1, 1)),
        (FormDegree::One, Geometry::Torus) => (u.rem_euclid(p) == 0).then_some((u / p, 1)),
    }
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    for g in [Geometry::AffineLine, Geometry::Torus] {
        for i in 0..100 {
            let p = [2u64, 3, 5, 7][i % 4];
            let ring = ZpRing::new(p, 6).unwrap();
            let kind = if i % 2 == 0 { FormKind::Function } else { FormKind::Differential };
            let bound = 12 * p as usize;
            let a = random_xseries(&mut rng, g, FormKind::Function, bound, 3, ring);
            let m = random_xseries(&mut rng, g, kind, bound, 4 * p as i64, ring);
            let lhs = theta_apply(&a.sigma().unwrap().mul(&m).unwrap()).unwrap();
            let rhs = a.mul(&theta_apply(&m).unwrap()).unwrap();
            if lhs != rhs {
                return Err(format!("semilinearity fails: {g:?}, p={p}, {kind:?}, pair {i}"));
            }
        }
    }
    for p in [2u64, 3, 5, 7] {
        let ring = ZpRing::new(p, 8).unwrap();
        let reach = 3 * p as i64;
        for g in [Geometry::AffineLine, Geometry::Torus] {
            for form in [FormDegree::Zero, FormDegree::One] {
                let lo = if g == Geometry::Torus { -reach } else { 0 };
                for u in lo..=reach {
                    let m = XSeries::monomial(g, form.kind(), reach as usize, u, ZpTSeries::one(ring, 1)).unwrap();
                    let image = theta_apply(&m).unwrap();
                    let mut expected = XSeries::zero(g, form.kind(), reach as usize, ring, 1);
                    if let Some((v, c)) = theta_oracle(p as i64, g, form, u) {
                        expected.set(v, ZpTSeries::from_i64s(ring, 1, &[c]));
                    }
                    if image != expected {
                        return Err(format!("theta on x^{u}: p={p}, {g:?}, {form:?}"));
                    }
                }
                // Tr(theta_0^d) = p^d; Tr(theta_1^d) = 0 on the line, 1 on the torus.
                let traces = power_traces(&theta_matrix(ring, g, form, 3 * p as usize, 1), 3);
                for (d, t) in traces.iter().enumerate() {
                    let want = match (form, g) {
                        (FormDegree::Zero, _) => p.pow(d as u32 + 1) as i64,
                        (FormDegree::One, Geometry::AffineLine) => 0,
                        (FormDegree::One, Geometry::Torus) => 1,
                    };
                    if t != &ZpTSeries::from_i64s(ring, 1, &[want]) {
                        return Err(format!("Tr theta^{}: p={p}, {g:?}, {form:?}", d + 1));
                    }
                }
            }
        }
    }
    Ok("200 semilinearity pairs; monomial images and traces match for u <= 3p".into())
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let c = Case { p: 7, geometry: "affine-line", f: "3:1" };
    let cfg = config(Command::Slopes, &c, 4, 64, 9, 9);
    let (tower, prof) = (cfg.tower().unwrap(), cfg.profile().unwrap());
    let analysis = run_slopes(&tower, &prof, None, &Default::default()).unwrap();
    let report = analysis.report.as_ref().map_err(|e| e.to_string())?;
    if report.block_degree != 3 {
        return Err(format!("block degree {}", report.block_degree));
    }
    if report.count(MatchQuality::Violation) > 0 {
        return Err(format!("{} slopes violate the fit", report.count(MatchQuality::Violation)));
    }
    if report.block_increments.is_empty() || !report.increment_consistent() {
        return Err(format!("increments {:?} vs r = {}", report.block_increments, report.increment_r));
    }
    if !analysis.hodge_violations.is_empty() {
        return Err(format!("polygon below the Hodge bound at {:?}", analysis.hodge_violations));
    }
    // Direct check of the bound against every hull vertex.
    for &k in analysis.polygon0.hull() {
        if analysis.polygon0.height(k) < hodge_bound(7, 3, k) {
            return Err(format!("vertex {k} below the Hodge bound"));
        }
    }
    let residues: Vec<String> = report.residues.iter().map(Q::to_string).collect();
    Ok(format!(
        "{} certified slopes, r = {}, beta = [{}], {} exact, {} within-window ({:.1}s)",
        report.classified.len(),
        report.increment_r,
        residues.join(", "),
        report.count(MatchQuality::Exact),
        report.count(MatchQuality::WithinWindow),
        start.elapsed().as_secs_f64()
    ))
}

/// `n! E_n` for the Artin-Hasse series, from `n E_n = sum_{p^i <= n} E_{n-p^i}`.
fn artin_hasse_scaled(p: u64, order: usize) -> Vec<BigUint> {
    let mut b = vec![BigUint::from(1u32)];
    for n in 1..=order {
        let mut acc = BigUint::from(0u32);
        let mut pk = 1usize;
        while pk <= n {
            let falling: BigUint = ((n - pk + 1)..n).map(|j| BigUint::from(j as u64)).product();
            acc += falling * &b[n - pk];
            pk *= p as usize;
        }
        b.push(acc);
    }
    b
}

fn inverse_mod(a: u64, m: u64) -> u64 {
    let (mut r0, mut r1, mut s0, mut s1) = (m as i128, a as i128, 0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    assert_eq!(r0, 1);
    s0.rem_euclid(m as i128) as u64
}

fn criterion_9() -> Outcome {
    const ORDER: usize = 32;
    const DIGITS: u32 = 10;
    for p in [2u64, 3, 5, 7] {
        let ring = ZpRing::new(p, DIGITS).unwrap();
        let m = ring.modulus();
        let computed = artin_hasse(ring, 1, ORDER).map_err(|e| format!("p={p}: {e}"))?;
        let scaled = artin_hasse_scaled(p, ORDER);
        for (n, bn) in scaled.iter().enumerate() {
            let mut fact: BigUint = (1..=n as u64).map(BigUint::from).product();
            let mut num = bn.clone();
            let pb = BigUint::from(p);
            while (&fact % &pb) == BigUint::from(0u32) {
                if (&num % &pb) != BigUint::from(0u32) {
                    return Err(format!("p={p}: coefficient {n} is not p-integral"));
                }
                fact /= &pb;
                num /= &pb;
            }
            let unit = u64::try_from(&fact % BigUint::from(m)).unwrap();
            let numr = u64::try_from(&num % BigUint::from(m)).unwrap();
            let want = ((numr as u128 * inverse_mod(unit, m) as u128) % m as u128) as u64;
            if computed.coeff(n).coeff(0).residue() != want {
                return Err(format!("p={p}: coefficient {n} differs from the rational oracle"));
            }
        }
    }
    let mut profiles: Vec<PrecisionProfile> = CASES.iter().map(|c| case_config(c).profile().unwrap()).collect();
    profiles.push(config(Command::Slopes, &Case { p: 7, geometry: "affine-line", f: "3:1" }, 4, 64, 9, 9).profile().unwrap());
    for p in [2, 3] {
        profiles.push(PrecisionProfile::auto(p, 5, 6, 4, 4, 4).unwrap());
    }
    for prof in &profiles {
        let ring = prof.ring().unwrap();
        let pi = pi_from_t(ring, prof.b).unwrap();
        let e = artin_hasse(ring, prof.b, prof.b.max(2) - 1).unwrap().evaluate(&pi).unwrap();
        if e != ZpTSeries::from_i64s(ring, prof.b, &[1, 1]) {
            return Err(format!("E(pi) != 1 + T at p={}, b={}", prof.p, prof.b));
        }
    }
    Ok(format!("orders 0..={ORDER} integral and matching; E(pi) = 1 + T at {} profiles", profiles.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("trace formula agrees with enumeration", criterion_1),
        ("zeta degeneration at T = 0", criterion_2),
        ("Fredholm integrality", criterion_3),
        ("truncation stability", criterion_4),
        ("route consistency on random towers", criterion_5),
        ("splitting fiber identity", criterion_6),
        ("Dwork operator properties", criterion_7),
        ("slope structure for x^3, p = 7", criterion_8),
        ("Artin-Hasse integrality", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("[PASS] criterion {}: {name} ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] criterion {}: {name} ({detail})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
