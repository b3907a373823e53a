mod common;

use common::{dense_d2, matvec};
use ieq_nls::dirk::{conservative_defect, registry, step, tableau_from_b, SolverConfig};
use ieq_nls::ieq::{energy_modified, init_state, kinetic_term, lemma1_defect, mass, rhs_f, rhs_g, IeqState, NlsParams};
use ieq_nls::spectral::{apply_d1, apply_laplacian, dense_d1, inner, Grid1D};
use num_complex::Complex64;
use proptest::prelude::*;

fn field(n: usize, amp: f64) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-amp..amp, -amp..amp).prop_map(|(a, b)| Complex64::new(a, b)), n)
}

fn real_field(n: usize, amp: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-amp..amp, n)
}

fn sizes() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![4usize, 6, 8, 16, 32])
}

proptest! {
    #[test]
    fn dense_d1_is_skew(n in sizes(), a in -10.0..0.0f64, len in 0.5..50.0f64) {
        let d = dense_d1(&Grid1D::new(a, a + len, n).unwrap());
        prop_assert_eq!((&d + d.transpose()).amax(), 0.0);
    }

    #[test]
    fn transform_and_dense_d1_agree(v in field(16, 3.0), len in 1.0..40.0f64) {
        let g = Grid1D::new(-len / 2.0, len / 2.0, 16).unwrap();
        let dense = matvec(&dense_d1(&g), &v);
        let fft = apply_d1(&g, &v).unwrap();
        let scale = dense.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for (x, y) in dense.iter().zip(&fft) {
            prop_assert!((x - y).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn laplacian_is_negative_semidefinite(v in field(32, 2.0)) {
        let g = Grid1D::new(-20.0, 20.0, 32).unwrap();
        let lv = apply_laplacian(&g, &v).unwrap();
        let q = inner(&g, &lv, &v).unwrap();
        prop_assert!(q.re <= 1e-12 * (1.0 + q.norm()));
        prop_assert!(q.im.abs() <= 1e-12 * (1.0 + q.norm()));
    }

    #[test]
    fn lemma1_holds_for_arbitrary_pairs(u in field(64, 2.0), r in real_field(64, 4.0), beta in -3.0..3.0f64) {
        let p = NlsParams::new(beta, Grid1D::new(-20.0, 20.0, 64).unwrap());
        let umax = u.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let rmax = r.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let d = lemma1_defect(&u, &r, &p).unwrap();
        prop_assert!(d <= 1e-12 * (1.0 + umax.powi(4) + rmax.powi(2)), "defect {d}");
    }

    #[test]
    fn mass_rate_vanishes(u in field(32, 2.0), r in real_field(32, 4.0), beta in -3.0..3.0f64) {
        let p = NlsParams::new(beta, Grid1D::new(-20.0, 20.0, 32).unwrap());
        let f = rhs_f(&p, &u, &r).unwrap();
        let rate = inner(&p.grid, &f, &u).unwrap().re;
        let scale = f.iter().zip(&u).map(|(a, b)| a.norm() * b.norm()).sum::<f64>() * p.grid.h();
        prop_assert!(rate.abs() <= 1e-13 * (1.0 + scale));
        // g integrates to the same rate
        let g = rhs_g(&u, &f).unwrap();
        prop_assert!((g.iter().sum::<f64>() * p.grid.h() - 2.0 * rate).abs() <= 1e-12 * (1.0 + scale));
    }

    #[test]
    fn g_is_real_part_of_product(u in field(16, 2.0), f in field(16, 5.0)) {
        let g = rhs_g(&u, &f).unwrap();
        for ((gj, uj), fj) in g.iter().zip(&u).zip(&f) {
            let full = 2.0 * uj.conj() * fj;
            prop_assert!((gj - full.re).abs() <= 1e-14 * (1.0 + full.norm()));
        }
    }

    #[test]
    fn energy_matches_dense_quadratic_form(u in field(16, 2.0), r in real_field(16, 4.0), beta in -3.0..3.0f64) {
        let g = Grid1D::new(-5.0, 5.0, 16).unwrap();
        let d = dense_d1(&g);
        let du = matvec(&d, &u);
        let grad = g.h() * du.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let rr = g.h() * r.iter().map(|x| x * x).sum::<f64>();
        let want = -0.5 * grad + 0.25 * beta * rr;
        let d2u = matvec(&dense_d2(&g), &u);
        let p = NlsParams::new(beta, g);
        let s = IeqState { u: u.clone(), r, t: 0.0 };
        let e = energy_modified(&s, &p).unwrap();
        prop_assert!((e - want).abs() <= 1e-12 * (1.0 + want.abs() + grad));
        // -‖D₁u‖² = Re(D₁²u, u) by skew symmetry
        let via_d2: f64 = d2u.iter().zip(&u).map(|(a, b)| (a * b.conj()).re).sum::<f64>() * p.grid.h();
        prop_assert!((2.0 * kinetic_term(&p, &u).unwrap() - via_d2).abs() <= 1e-12 * (1.0 + grad));
    }

    #[test]
    fn tableaux_from_weights_are_exactly_conservative(b in prop::collection::vec(0.05..2.0f64, 1..7)) {
        let t = tableau_from_b(&b, 2, "random").unwrap();
        prop_assert_eq!(conservative_defect(&t), 0.0);
    }

    #[test]
    fn one_step_preserves_quadratic_invariants(
        u in field(32, 0.8),
        dt in 0.001..0.05f64,
        which in prop::sample::select(vec!["dirk12", "dirk22", "dirk33", "dirk54", "dirk65"]),
    ) {
        let g = Grid1D::new(-10.0, 10.0, 32).unwrap();
        let s0 = init_state(&g, u, 0.0).unwrap();
        let p = NlsParams::new(2.0, g);
        let (s1, _) = step(&s0, dt, &registry(which).unwrap(), &p, &SolverConfig::default()).unwrap();
        let (m0, m1) = (mass(&s0, &p).unwrap(), mass(&s1, &p).unwrap());
        let (e0, e1) = (energy_modified(&s0, &p).unwrap(), energy_modified(&s1, &p).unwrap());
        prop_assert!((m1 - m0).abs() <= 1e-11 * (1.0 + m0));
        prop_assert!((e1 - e0).abs() <= 1e-10 * (1.0 + e0.abs()));
    }
}
