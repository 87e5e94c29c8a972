use proptest::prelude::*;

use maxlab::ergodic::kernel::{dirichlet, dirichlet_abs, eta_hat_abs, eta_mass};
use maxlab::ergodic::mollifier::{MollifierSpec, Spline1d};
use maxlab::experiment::packing::{packing_check, PackingConclusion};
use maxlab::params::{freq_centers, torus_distance, ExperimentParams, TorusPoint};
use maxlab::propagator::{phase_decompose_space, phase_decompose_time};

fn coords() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn torus_metric(a in coords(), b in coords(), c in coords(), shift in prop::collection::vec(-3i32..3, 3)) {
        let (pa, pb, pc) = (TorusPoint::new(&a), TorusPoint::new(&b), TorusPoint::new(&c));
        let ab = torus_distance(&pa, &pb);
        prop_assert!(ab <= torus_distance(&pa, &pc) + torus_distance(&pc, &pb) + 1e-12);
        prop_assert!((ab - torus_distance(&pb, &pa)).abs() < 1e-15);
        prop_assert!(ab <= 3f64.sqrt() / 2.0 + 1e-12);
        // integer shifts do not move a point
        let moved: Vec<f64> = a.iter().zip(&shift).map(|(x, s)| x + *s as f64).collect();
        prop_assert!(torus_distance(&pa, &TorusPoint::new(&moved)) < 1e-12);
    }

    #[test]
    fn packing_matches_sign(sigma in 0.001f64..0.999) {
        let rep = packing_check(3, sigma, &[256.0, 4096.0]).unwrap();
        let e = 1.0 - 5.0 * sigma;
        let want = if e > 0.0 { PackingConclusion::Survives } else { PackingConclusion::Vanishes };
        prop_assert_eq!(rep.conclusion, want);
        let ratio = rep.rows[1].neighborhood_volume_bound / rep.rows[0].neighborhood_volume_bound;
        prop_assert!((ratio.ln() / 16f64.ln() - e).abs() < 1e-9);
    }

    #[test]
    fn dirichlet_is_bounded_and_periodic(count in 1usize..500, x in -10.0f64..10.0) {
        let d = dirichlet(count, x);
        prop_assert!(d.norm() <= count as f64 * (1.0 + 1e-12));
        prop_assert!((dirichlet_abs(count, x) - d.norm()).abs() < 1e-9);
        prop_assert!((dirichlet(count, x + 3.0) - d).norm() < 1e-7 * count as f64);
    }

    #[test]
    fn eta_is_bounded_by_its_mass(tau in -1e3f64..1e3, sigma in 0.05f64..0.199) {
        let p = ExperimentParams::new(3, sigma, 512.0).unwrap();
        let spec = MollifierSpec::new(&p, None).unwrap();
        prop_assert!(eta_hat_abs(tau, &p, &spec) <= eta_mass(&p) * (1.0 + 1e-12));
    }

    #[test]
    fn spline_is_a_partition_of_unity(order in 1usize..7, x in -1.0f64..1.0) {
        // integer translates of the unit-knot spline sum to one
        let s = Spline1d::with_width(order, order as f64);
        let total: f64 = (-10..=10).map(|j| s.eval(x + j as f64)).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(s.eval(x) >= 0.0);
    }

    #[test]
    fn phase_terms_reassemble(
        mi in prop::collection::vec(-30i64..30, 3),
        u in prop::collection::vec(-1.0f64..1.0, 3),
        v in prop::collection::vec(-1.0f64..1.0, 3),
        pick in 0usize..1000,
        k in 1u64..40,
    ) {
        let p = ExperimentParams::new(3, 0.15, 256.0).unwrap();
        let centers = freq_centers(&p).unwrap();
        let l = &centers[pick % centers.len()];
        let u: Vec<f64> = u.iter().map(|c| c * p.eps / p.r / 2.0).collect();
        let v: Vec<f64> = v.iter().map(|c| c * p.rho / 2.0).collect();
        let h = p.r.powf(2.0 * p.sigma - 1.0);
        let x: Vec<f64> = mi.iter().zip(&u).map(|(&m, &a)| p.r.powf(p.sigma - 1.0) * m as f64 + a).collect();
        let xi: Vec<f64> = l.iter().zip(&v).map(|(&c, &b)| p.r.powf(1.0 - p.sigma) * c as f64 + b).collect();
        let sp = phase_decompose_space(&mi, &u, l, &v, &p).unwrap();
        let direct: f64 = x.iter().zip(&xi).map(|(a, b)| a * b).sum();
        prop_assert!((sp.total() - direct).abs() < 1e-9 * (1.0 + direct.abs()));
        let t = h * k as f64;
        let tp = phase_decompose_time(t, l, &v, &p).unwrap();
        let quad = t / p.r * xi.iter().map(|c| c * c).sum::<f64>();
        prop_assert!((tp.total() - quad).abs() < 1e-9 * (1.0 + quad.abs()));
        prop_assert!(sp.within_bounds(&p) && tp.within_bounds(&p));
    }
}
