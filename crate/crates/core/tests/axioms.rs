use tailmean::axioms::{check_axiom, residual, two_point_coincidence, AxiomId, SampleStatistic, Witness, AXIOM_TOL};

const TRIALS: usize = 2_000;

fn passes(stat: SampleStatistic, axioms: &[AxiomId]) {
    for &ax in axioms {
        let r = check_axiom(&stat, ax, TRIALS, 11).unwrap();
        assert!(r.passed, "{stat} should satisfy {}: {:?}", ax.code(), r.counterexample);
        assert!(r.max_residual <= AXIOM_TOL);
    }
}

fn fails(stat: SampleStatistic, axioms: &[AxiomId]) {
    for &ax in axioms {
        let r = check_axiom(&stat, ax, TRIALS, 11).unwrap();
        let cx = r.counterexample.expect("failing report carries a counterexample");
        assert!(!r.passed);
        // the stored witness reproduces the violation on its own
        let again = residual(&stat, ax, &cx.witness).unwrap();
        assert_eq!(again, cx.residual);
        assert!(again > AXIOM_TOL, "{stat} {}: {again}", ax.code());
    }
}

#[test]
fn mean_satisfies_everything() {
    passes(SampleStatistic::Mean, &AxiomId::ALL);
}

#[test]
fn median_separates_on_condensation_and_additivity() {
    use AxiomId::*;
    passes(SampleStatistic::Median, &[H, S, T, Ph, Nn]);
    fails(SampleStatistic::Median, &[Cond, Add]);
}

#[test]
fn convex_combinations_keep_the_order_axioms() {
    use AxiomId::*;
    for t in [0.1, 0.5, 0.9] {
        passes(SampleStatistic::convex(t).unwrap(), &[H, S, T, Nn, P, Sp]);
    }
}

#[test]
fn extremes_fail_homogeneity_for_negative_scales() {
    fails(SampleStatistic::Min, &[AxiomId::H]);
    fails(SampleStatistic::Max, &[AxiomId::H]);
    passes(SampleStatistic::Midrange, &[AxiomId::H, AxiomId::S, AxiomId::T]);
}

#[test]
fn hst_statistics_fix_constants() {
    let stats = [
        SampleStatistic::Mean,
        SampleStatistic::Median,
        SampleStatistic::convex(0.3).unwrap(),
        SampleStatistic::Midrange,
    ];
    for s in stats {
        for n in 1..=8 {
            assert_eq!(s.evaluate(&vec![0.0; n]).unwrap(), 0.0);
            for c in [-2.5, 0.1, 7.0] {
                assert_eq!(s.evaluate(&vec![c; n]).unwrap(), c, "{s} on {n} copies of {c}");
            }
        }
    }
}

#[test]
fn mean_and_median_agree_on_one_and_two_values() {
    let r = two_point_coincidence(&SampleStatistic::Mean, &SampleStatistic::Median, 1000, 5).unwrap();
    assert!(r.both_satisfy_hst);
    assert_eq!(r.max_residual_n1, 0.0);
    assert!(r.max_residual_n2 <= AXIOM_TOL);
    assert_eq!(r.residual_n3, 1.0);
}

#[test]
fn reports_are_deterministic() {
    let a = check_axiom(&SampleStatistic::Median, AxiomId::Cond, 500, 3).unwrap();
    let b = check_axiom(&SampleStatistic::Median, AxiomId::Cond, 500, 3).unwrap();
    assert_eq!(a, b);
}

#[test]
fn hand_witnesses() {
    let w = Witness::Condense {
        xs: vec![0.0, 1.0, 5.0],
        m: 2,
    };
    // median(0.5, 0.5, 5) = 0.5 but median(0, 1, 5) = 1
    assert_eq!(residual(&SampleStatistic::Median, AxiomId::Cond, &w).unwrap(), 0.5);
    assert_eq!(residual(&SampleStatistic::Mean, AxiomId::Cond, &w).unwrap(), 0.0);
    let bad = Witness::Condense {
        xs: vec![1.0, 2.0],
        m: 2,
    };
    assert!(residual(&SampleStatistic::Mean, AxiomId::Cond, &bad).is_err());
}
