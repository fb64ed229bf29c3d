use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;

use smtlab_core::algebra::{parse_homog, GaussianRational, HomogPoly, Hypersurface, WeightVector};
use smtlab_core::analytic::{polynomial_zeros, Curve, Divisor, UPoly};
use smtlab_core::groebner::Variety;
use smtlab_core::interval::{e_interval, ln_rational};
use smtlab_core::nevanlinna::{counting_at, fmt_residual, geometric, QuadConfig, RadialGrid};
use smtlab_core::position::{distributive_constant, HypersurfaceFamily, SamplingConfig};
use smtlab_core::smt::{constants_fixed, constants_moving, constants_baseline, ConstantInputs};
use smtlab_core::weights::hilbert_weight;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn twisted_cubic() -> Variety {
    let g = ["x0*x2 - x1^2", "x0*x3 - x1*x2", "x1*x3 - x2^2"];
    Variety::from_generators(4, g.iter().map(|s| parse_homog(s, 4).unwrap()).collect()).unwrap()
}

fn conic() -> Variety {
    Variety::from_generators(3, vec![parse_homog("x0*x2 - x1^2", 3).unwrap()]).unwrap()
}

fn unitriangular(entries: &[i64], n: usize) -> Vec<Vec<GaussianRational>> {
    let mut it = entries.iter();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match j.cmp(&i) {
                    std::cmp::Ordering::Less => GaussianRational::from_int(0),
                    std::cmp::Ordering::Equal => GaussianRational::from_int(1),
                    std::cmp::Ordering::Greater => GaussianRational::from_int(*it.next().unwrap()),
                })
                .collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn hilbert_function_is_coordinate_invariant(entries in prop::collection::vec(-3i64..=3, 6)) {
        let x = twisted_cubic();
        let y = x.linear_substitute(&unitriangular(&entries, 4)).unwrap();
        prop_assert_eq!((y.dim(), y.degree()), (1, 3));
        for u in 1..=5 {
            prop_assert_eq!(x.hilbert_function(u), y.hilbert_function(u));
        }
    }

    #[test]
    fn hilbert_weight_is_linear(c in prop::collection::vec(0i64..=9, 3), lambda in 1i64..=5, t in 0i64..=4, u in 1u32..=4) {
        let x = conic();
        let w = WeightVector::from_ints(&c).unwrap();
        let s = hilbert_weight(&x, u, &w).unwrap().value;
        let scaled = hilbert_weight(&x, u, &w.scale(&rat(lambda, 1)).unwrap()).unwrap().value;
        prop_assert_eq!(scaled, &s * rat(lambda, 1));
        let shift = WeightVector::from_ints(&[t, t, t]).unwrap();
        let shifted = hilbert_weight(&x, u, &w.plus(&shift).unwrap()).unwrap().value;
        let h = x.hilbert_function(u) as i64;
        prop_assert_eq!(shifted, s + rat(t * u as i64 * h, 1));
    }

    #[test]
    fn distributive_constant_ignores_order(perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle()) {
        let forms: Vec<HomogPoly> =
            ["x0", "x1", "x0 + x1", "x2"].iter().map(|s| parse_homog(s, 3).unwrap()).collect();
        let v = Variety::projective_space(2);
        let cfg = SamplingConfig::default();
        let a = distributive_constant(&v, &HypersurfaceFamily::fixed(3, &forms).unwrap(), &cfg).unwrap().value;
        let shuffled: Vec<HomogPoly> = perm.iter().map(|&i| forms[i].clone()).collect();
        let b = distributive_constant(&v, &HypersurfaceFamily::fixed(3, &shuffled).unwrap(), &cfg).unwrap().value;
        prop_assert_eq!(a.clone(), b);
        prop_assert_eq!(a, rat(3, 2));
    }

    #[test]
    fn constants_are_monotone_in_epsilon(num in 1i64..=20, q in 2u32..=5, n in 1u32..=2) {
        let inp = |e: BigRational| ConstantInputs::new(n, 1, 1, q, rat(1, 1), e);
        let (a, b) = (rat(num, 10), rat(num + 1, 10));
        let fa = constants_fixed(&inp(a.clone())).unwrap();
        let fb = constants_fixed(&inp(b.clone())).unwrap();
        prop_assert!(fa.u >= fb.u);
        prop_assert!(fa.l >= fb.l);
        let ba = constants_baseline(&inp(a.clone())).unwrap();
        let bb = constants_baseline(&inp(b.clone())).unwrap();
        prop_assert!(ba.l >= bb.l);
        if n == 1 && b < rat(2, 1) {
            let ma = constants_moving(&inp(a)).unwrap();
            let mb = constants_moving(&inp(b)).unwrap();
            prop_assert!(ma.u >= mb.u);
            prop_assert!(ma.verify_u() && mb.verify_u());
        }
    }

    #[test]
    fn logarithm_enclosures_contain_f64(num in 1i64..=10_000, den in 1i64..=100, p in 64u64..=256) {
        let x = rat(num, den);
        let iv = ln_rational(&x, p).unwrap();
        let approx = (num as f64 / den as f64).ln();
        let lo = smtlab_core::interval::to_f64(&iv.lo);
        let hi = smtlab_core::interval::to_f64(&iv.hi);
        prop_assert!(lo <= approx + 1e-12 && approx - 1e-12 <= hi);
        prop_assert!(hi - lo < 1e-15);
    }

    #[test]
    fn truncated_counting_is_monotone(mults in prop::collection::vec(1u32..=5, 1..6), r in 2.0f64..50.0) {
        let pts: Vec<(Complex64, u32)> = mults
            .iter()
            .enumerate()
            .map(|(i, &m)| (Complex64::from_polar(1.1 + 0.15 * i as f64, i as f64), m))
            .collect();
        let div = Divisor::from_points(pts, 60.0);
        let full = counting_at(&div, 1.0, &[r], None, false)[0];
        let mut prev = 0.0;
        for k in 1..=6 {
            let nk = counting_at(&div, 1.0, &[r], Some(k), false)[0];
            prop_assert!(nk >= prev - 1e-12 && nk <= full + 1e-12);
            prev = nk;
        }
        prop_assert!((prev - full).abs() < 1e-12);
    }

    #[test]
    fn first_main_theorem_holds_for_random_points(a in -9i64..=9, b in 1i64..=9, im in -9i64..=9) {
        let curve = Curve::parse(&["poly: 1", "poly: z"], f64::INFINITY).unwrap();
        let coeff = GaussianRational::from_parts((a, b), (im, b));
        prop_assume!(coeff.to_complex().norm() > 0.2);
        let q = Hypersurface::fixed(&HomogPoly::linear(&[coeff, GaussianRational::from_int(1)])).unwrap();
        let grid = RadialGrid::new(0.1, geometric(2.0, 40.0, 8), f64::INFINITY).unwrap();
        let res = fmt_residual(&curve, &q, &grid, &QuadConfig::default()).unwrap();
        prop_assert!(res.spread < 1e-6, "spread {}", res.spread);
    }

    #[test]
    fn polynomial_roots_are_recovered(roots in prop::collection::vec((-6i64..=6, -6i64..=6), 1..6)) {
        let gs: Vec<GaussianRational> = roots.iter().map(|&(re, im)| GaussianRational::from_parts((re, 2), (im, 2))).collect();
        let div = polynomial_zeros(&UPoly::from_roots(&gs), 10.0).unwrap();
        prop_assert_eq!(div.total() as usize, gs.len());
        for g in &gs {
            let z = g.to_complex();
            let near = div.points.iter().any(|p| (p.location - z).norm() < 1e-5);
            prop_assert!(near);
        }
    }
}

#[test]
fn euler_number_enclosure_narrows() {
    let below = rat(2_718_281_828_459_045, 1_000_000_000_000_000);
    let above = rat(2_718_281_828_459_046, 1_000_000_000_000_000);
    let mut prev: Option<BigRational> = None;
    for p in [64u64, 128, 256, 512] {
        let iv = e_interval(p);
        assert!(iv.lo < above && iv.hi > below);
        let w = iv.width();
        if let Some(pw) = &prev {
            assert!(&w < pw);
        }
        prev = Some(w);
    }
}
