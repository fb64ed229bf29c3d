use num_rational::BigRational;

use smtlab_core::algebra::{parse_homog, HomogPoly};
use smtlab_core::analytic::Curve;
use smtlab_core::groebner::Variety;
use smtlab_core::nevanlinna::{geometric, GrowthModel, RadialGrid};
use smtlab_core::position::HypersurfaceFamily;
use smtlab_core::scenario::parse_scenario;
use smtlab_core::smt::{defect_relation_report, spot_check_nondegenerate, verify_main_inequality, Problem, RunOptions};
use smtlab_core::Error;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn forms(nv: usize, src: &[&str]) -> Vec<HomogPoly> {
    src.iter().map(|s| parse_homog(s, nv).unwrap()).collect()
}

fn line_problem(points: &[&str], eps: BigRational) -> Problem {
    Problem {
        variety: Variety::projective_space(1),
        family: HypersurfaceFamily::fixed(2, &forms(2, points)).unwrap(),
        curve: Curve::parse(&["poly: 1", "poly: z"], f64::INFINITY).unwrap(),
        epsilon_prime: &eps / rat(10, 1),
        epsilon: eps,
        grid: RadialGrid::new(0.5, geometric(2.0, 1e3, 20), f64::INFINITY).unwrap(),
        growth: None,
        truncation_override: None,
    }
}

#[test]
fn vacuous_regime_is_flagged() {
    let p = line_problem(&["x0", "x1 - x0"], rat(1, 2));
    let r = verify_main_inequality(&p, &RunOptions::default()).unwrap();
    assert!(r.flags.iter().any(|f| f.starts_with("vacuous_regime")));
    assert!(r.rows.iter().all(|row| row.lhs <= 0.0 && row.margin >= 0.0));
}

#[test]
fn identically_vanishing_form_is_degenerate() {
    let mut p = line_problem(&["x0", "x1 - x0"], rat(1, 2));
    p.curve = Curve::parse(&["poly: 1", "poly: 1"], f64::INFINITY).unwrap();
    assert!(matches!(verify_main_inequality(&p, &RunOptions::default()), Err(Error::Degenerate(_))));
}

#[test]
fn curve_off_variety_is_rejected() {
    let p = Problem {
        variety: Variety::from_generators(3, forms(3, &["x0*x2 - x1^2"])).unwrap(),
        family: HypersurfaceFamily::fixed(3, &forms(3, &["x0", "x2"])).unwrap(),
        curve: Curve::parse(&["poly: 1", "poly: z", "poly: z^3"], f64::INFINITY).unwrap(),
        epsilon: rat(1, 1),
        epsilon_prime: rat(1, 10),
        grid: RadialGrid::default_for(f64::INFINITY, 1.0).unwrap(),
        growth: None,
        truncation_override: None,
    };
    assert!(matches!(verify_main_inequality(&p, &RunOptions::default()), Err(Error::Precondition(_))));
}

#[test]
fn spot_check_finds_hidden_conic() {
    let curve = Curve::parse(&["poly: 1", "poly: z", "poly: z^2"], f64::INFINITY).unwrap();
    assert_eq!(spot_check_nondegenerate(&curve, &Variety::projective_space(2)).unwrap(), Some(2));
    let conic = Variety::from_generators(3, forms(3, &["x0*x2 - x1^2"])).unwrap();
    assert_eq!(spot_check_nondegenerate(&curve, &conic).unwrap(), None);
    let flat = Curve::parse(&["poly: 1", "poly: z", "poly: 2*z"], f64::INFINITY).unwrap();
    assert_eq!(spot_check_nondegenerate(&flat, &Variety::projective_space(2)).unwrap(), Some(1));
}

#[test]
fn omitted_hyperplane_has_full_defect() {
    let p = line_problem(&["x0", "x1 - 2*x0", "x1 + 3*x0", "x1 - x0"], rat(1, 2));
    let r = defect_relation_report(&p, &RunOptions::default()).unwrap();
    assert!((r.rows[0].defect.value - 1.0).abs() < 1e-12);
    // N(r) = log(r/|a|) and T(r) ≈ log r, so the defect at r is about log|a| / log r
    let r_max = 1e3f64;
    for (row, a) in r.rows[1..].iter().zip([2.0f64, 3.0, 1.0]) {
        let expect = a.ln() / r_max.ln();
        assert!((row.defect.value - expect).abs() < 0.01, "{} vs {expect}", row.defect.value);
    }
    assert!(r.holds);
    assert_eq!(r.bound, 2.5);
}

#[test]
fn single_form_is_trivial() {
    let p = line_problem(&["x1 - x0"], rat(1, 2));
    let r = defect_relation_report(&p, &RunOptions::default()).unwrap();
    assert!(r.sum <= 1.0 && r.holds);
}

#[test]
fn finite_disc_keeps_terms_apart() {
    let p = Problem {
        curve: Curve::parse(&["poly: 1", "poly: z"], 4.0).unwrap(),
        grid: RadialGrid::new(0.5, vec![2.0, 3.0, 3.5], 4.0).unwrap(),
        growth: Some(GrowthModel::Logarithmic { lambda: 2.0 }),
        ..line_problem(&["x0", "x1 - x0", "x1 + x0", "x1 - 2*x0"], rat(1, 2))
    };
    let r = verify_main_inequality(&p, &RunOptions::default()).unwrap();
    assert_eq!(r.growth.value, 0.5);
    assert!(r.correction_log10.is_finite() && r.correction_log10 > 0.0);
    for row in &r.rows {
        assert!(row.correction > 0.0);
        assert!((row.rhs - (row.counting_sum + row.correction)).abs() <= 1e-9 * row.rhs.max(1.0));
    }
    let d = defect_relation_report(&p, &RunOptions::default()).unwrap();
    assert!(d.bound > 2.5 && d.bound_printed_u < d.bound);
}

#[test]
fn scenario_round_trips_to_problem() {
    let s = parse_scenario(
        r#"{
        "ambient_N": 1,
        "curve": {"components": ["poly: 1", "poly: z"], "domain_R": "inf"},
        "hypersurfaces": [
            {"degree": 1, "coefficients": {"x0": "1"}},
            {"degree": 1, "coefficients": {"x1": "1", "x0": "-1"}},
            {"degree": 1, "coefficients": {"x1": "1", "x0": "1"}}
        ],
        "epsilon": "1/2",
        "r0": 0.5
    }"#,
    )
    .unwrap();
    let r = verify_main_inequality(&s.to_problem(), &RunOptions::default()).unwrap();
    assert!(!r.falsified());
    assert_eq!(r.constants.l.unwrap().to_string(), "95");
}
