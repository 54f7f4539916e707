use tadic_core::oracle::oracle_lfun;
use tadic_core::pipeline::{doubling_check, run_trace_formula, TraceOptions};
use tadic_core::{Geometry, PrecisionProfile, TowerInput};

fn cases() -> Vec<(u64, Geometry, Vec<(i64, i64)>)> {
    vec![
        (2, Geometry::AffineLine, vec![(1, 1)]),
        (2, Geometry::AffineLine, vec![(3, 1)]),
        (3, Geometry::AffineLine, vec![(2, 1), (1, 1)]),
        (2, Geometry::Torus, vec![(1, 1), (-1, 1)]),
        (5, Geometry::AffineLine, vec![(4, 1)]),
    ]
}

#[test]
fn trace_formula_matches_enumeration() {
    for (p, g, terms) in cases() {
        let tower = TowerInput::new(p, g, terms.clone()).unwrap();
        let prof = PrecisionProfile::auto(p, 6, 8, 4, 4, tower.degree()).unwrap();
        let run = run_trace_formula(&tower, &prof, &TraceOptions::default()).unwrap();
        let oracle = oracle_lfun(&tower, &prof).unwrap();
        let digits = run.effective_digits().min(oracle.effective_digits()).min(prof.a);
        assert!(digits >= 4, "p={p} {terms:?}: only {digits} digits");
        assert_eq!(run.lfun.first_difference(&oracle, digits), None, "p={p} {g:?} {terms:?}");
    }
}

#[test]
fn doubling_is_stable() {
    for (p, g, terms) in cases() {
        let tower = TowerInput::new(p, g, terms.clone()).unwrap();
        let prof = PrecisionProfile::auto(p, 6, 8, 4, 4, tower.degree()).unwrap();
        let check = doubling_check(&tower, &prof, &TraceOptions::default()).unwrap();
        assert!(check.stable(), "p={p} {terms:?}: {:?}", check.l_difference);
    }
}
