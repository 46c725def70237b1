use misoic::channel::{gen_iid, Channel};
use misoic::heuristic::heuristic_choice;
use misoic::linalg::{inner, proj, proj_orth, rank2_herm_eig, unit, CVec};
use misoic::mrt::{dd_mrt_check, nd_mrt_check, MrtVerdict};
use misoic::pareto::{pareto_filter, LambdaFamily, FamilyKind};
use misoic::rates::{gains, zdd_terms, DecodingStructure, Gains, RatePoint, TxStrategy};
use misoic::sumrate::{max_sum_rate, structure_max, w2_balance_nd, W2Balance};
use misoic::User;
use num_complex::Complex64;
use proptest::prelude::*;

fn cvec(n: usize) -> impl Strategy<Value = CVec> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), n).prop_map(|v| CVec::from_pairs(&v))
}

fn nonzero(n: usize) -> impl Strategy<Value = CVec> {
    cvec(n).prop_filter("nonzero", |v| v.norm() > 1e-3)
}

fn channel() -> impl Strategy<Value = Channel> {
    (2usize..=4, any::<u64>()).prop_map(|(n, s)| gen_iid(n, s).unwrap())
}

fn gains_strategy() -> impl Strategy<Value = Gains> {
    (0.0..1e4f64, 0.0..1e4f64, 0.0..1e4f64, 0.0..1e4f64).prop_map(|(g11, g21, g22, g12)| Gains { g11, g21, g22, g12 })
}

fn rotate(v: &CVec, phi: f64) -> CVec {
    v.scale(Complex64::from_polar(1.0, phi))
}

fn apply(alpha: f64, x: &CVec, beta: f64, y: &CVec, v: &CVec) -> CVec {
    // S v computed entrywise from the definition.
    let xv: Complex64 = x.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
    let yv: Complex64 = y.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
    CVec::new(x.iter().zip(y.iter()).map(|(a, b)| a * xv * alpha - b * yv * beta).collect())
}

fn random_unit(v: &CVec) -> CVec {
    unit(v).unwrap()
}

fn chain_values(v: &MrtVerdict) -> Vec<f64> {
    v.chains.iter().flat_map(|c| [c.lhs, c.mid, c.rhs]).collect()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a == b) || (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn z_terms_identity(g in gains_strategy()) {
        let z = zdd_terms(&g);
        let l = z[3] * z[0];
        let r = z[1] * z[2];
        prop_assert!((l - r).abs() <= 1e-12 * l.abs().max(r.abs()));
    }

    #[test]
    fn dd_sum_rate_is_log_of_min_term(g in gains_strategy()) {
        let z = zdd_terms(&g);
        let m = z.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert!((g.sum_rate(DecodingStructure::DD) - m.log2()).abs() <= 1e-10);
    }

    #[test]
    fn unit_has_unit_norm(x in nonzero(5)) {
        prop_assert!((unit(&x).unwrap().norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn projections_reconstruct(x in cvec(4), y in nonzero(4)) {
        let p = proj(&y, &x).unwrap();
        let q = proj_orth(&y, &x).unwrap();
        let back = &p + &q;
        let err = (&back - &x).norm();
        prop_assert!(err <= 1e-12 * x.norm().max(1.0));
        prop_assert!(inner(&y, &q).unwrap().norm() <= 1e-12 * y.norm() * x.norm().max(1.0));
    }

    #[test]
    fn rank2_eigenpairs(x in nonzero(4), y in nonzero(4), alpha in 0.01..10.0f64, beta in 0.01..10.0f64) {
        prop_assume!(misoic::linalg::cos_angle(&x, &y).unwrap() < 0.999);
        let e = rank2_herm_eig(alpha, &x, beta, &y).unwrap();
        let scale = alpha * x.norm_sqr() + beta * y.norm_sqr();
        let ra = &apply(alpha, &x, beta, &y, &e.v_a) - &e.v_a.scale_real(e.a);
        let rb = &apply(alpha, &x, beta, &y, &e.v_b) - &e.v_b.scale_real(-e.b);
        prop_assert!(ra.norm() <= 1e-9 * scale);
        prop_assert!(rb.norm() <= 1e-9 * scale);
        prop_assert!(e.a > 0.0 && e.b > 0.0);
        prop_assert!(inner(&e.v_a, &e.v_b).unwrap().norm() <= 1e-9);
    }

    #[test]
    fn noise_rate_below_clean_rate(ch in channel(), s1 in any::<u64>(), p1 in 0.0..10.0f64, p2 in 0.0..10.0f64) {
        let a = gen_iid(ch.n(), s1).unwrap();
        let tx = TxStrategy::new(random_unit(&a.h11), random_unit(&a.h22), p1, p2, 10.0).unwrap();
        let g = gains(&ch, &tx);
        prop_assert!(g.d1() <= g.c1() + 1e-15);
        prop_assert!(g.d2() <= g.c2() + 1e-15);
    }

    #[test]
    fn matched_filter_member_of_w_family(ch in channel()) {
        for user in [User::One, User::Two] {
            let fam = LambdaFamily::new(&ch, user, FamilyKind::W).unwrap();
            let w = fam.w(fam.lambda_mrt(&ch)).unwrap();
            let u = unit(ch.direct(user)).unwrap();
            prop_assert!(1.0 - inner(&u, &w).unwrap().norm() <= 1e-10);
        }
    }

    #[test]
    fn interference_filter_member_of_v_family(ch in channel()) {
        for user in [User::One, User::Two] {
            let fam = LambdaFamily::new(&ch, user, FamilyKind::V).unwrap();
            let w = fam.w(fam.lambda_mrt(&ch)).unwrap();
            let u = unit(ch.cross(user)).unwrap();
            prop_assert!(1.0 - inner(&u, &w).unwrap().norm() <= 1e-10);
        }
    }

    #[test]
    fn filter_output_is_nondominated_cover(pts in prop::collection::vec((0.0..5.0f64, 0.0..5.0f64), 0..60)) {
        let pts: Vec<RatePoint> = pts.into_iter().map(|(r1, r2)| RatePoint { r1, r2 }).collect();
        let f = pareto_filter(&pts);
        for p in &f {
            prop_assert!(pts.contains(p));
        }
        for (i, a) in f.iter().enumerate() {
            for (j, b) in f.iter().enumerate() {
                if i != j {
                    prop_assert!(!(a.r1 >= b.r1 && a.r2 >= b.r2));
                }
            }
        }
        for p in &pts {
            prop_assert!(f.iter().any(|q| q.r1 >= p.r1 && q.r2 >= p.r2));
        }
        for w in f.windows(2) {
            prop_assert!(w[0].r1 < w[1].r1 && w[0].r2 > w[1].r2);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn w2_balance_meets_constraint(ch in channel(), db in -10.0..30.0f64, s1 in any::<u64>()) {
        let p = 10f64.powf(db / 10.0);
        let w1 = random_unit(&gen_iid(ch.n(), s1).unwrap().h11);
        if let W2Balance::Balanced { w2, .. } = w2_balance_nd(&ch, &w1, p).unwrap() {
            let g = inner(&ch.h21, &w1).unwrap().norm_sqr() / inner(&ch.h11, &w1).unwrap().norm_sqr();
            let d = inner(&ch.h22, &w2).unwrap().norm_sqr() * p;
            let c = inner(&ch.h12, &w2).unwrap().norm_sqr() * p;
            let rhs = (g - 1.0) + g * c;
            prop_assert!((d - rhs).abs() <= 1e-8 * d.abs().max(rhs.abs()).max(1.0));
            prop_assert!((w2.norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn swapping_users_swaps_nd_and_dn(ch in channel(), db in -5.0..25.0f64) {
        let p = 10f64.powf(db / 10.0);
        let sw = ch.swap();
        let nd = structure_max(DecodingStructure::ND, &ch, p, 41).unwrap().rate;
        let dn = structure_max(DecodingStructure::DN, &sw, p, 41).unwrap().rate;
        prop_assert!((nd - dn).abs() <= 1e-12 * nd.max(1.0));
        let nn = structure_max(DecodingStructure::NN, &ch, p, 41).unwrap().rate;
        let nn_sw = structure_max(DecodingStructure::NN, &sw, p, 41).unwrap().rate;
        prop_assert!((nn - nn_sw).abs() <= 1e-12 * nn.max(1.0));
    }

    #[test]
    fn verdicts_ignore_channel_phases(ch in channel(), db in -5.0..35.0f64, phis in prop::array::uniform4(0.0..6.3f64)) {
        let p = 10f64.powf(db / 10.0);
        let rot = Channel::new(rotate(&ch.h11, phis[0]), rotate(&ch.h12, phis[1]), rotate(&ch.h21, phis[2]), rotate(&ch.h22, phis[3])).unwrap();
        let a = nd_mrt_check(&ch, p);
        let b = nd_mrt_check(&rot, p);
        let c = dd_mrt_check(&ch, p);
        let d = dd_mrt_check(&rot, p);
        let pairs = [
            (&a.selfish, &b.selfish),
            (&a.interference, &b.interference),
            (&c.selfish_pair, &d.selfish_pair),
            (&c.interference_pair, &d.interference_pair),
        ];
        for (x, y) in pairs {
            for (u, v) in chain_values(x).into_iter().zip(chain_values(y)) {
                prop_assert!(close(u, v, 1e-9), "{u} vs {v}");
            }
            if !x.boundary && !y.boundary {
                prop_assert_eq!(x.holds, y.holds);
            }
        }
    }

    #[test]
    fn heuristic_beams_never_beat_candidates(ch in channel(), db in -5.0..30.0f64) {
        let p = 10f64.powf(db / 10.0);
        let m = max_sum_rate(&ch, p, 41).unwrap();
        let h = heuristic_choice(&ch, p).unwrap();
        for e in h.table.iter().filter(|e| e.structure.is_some()) {
            prop_assert!(e.rate <= m.best.rate + 1e-9, "{} {} > {}", e.label, e.rate, m.best.rate);
        }
    }

    #[test]
    fn zero_forcing_pair_is_interference_free(ch in channel(), db in -5.0..30.0f64) {
        let p = 10f64.powf(db / 10.0);
        let zf1 = LambdaFamily::new(&ch, User::One, FamilyKind::W).unwrap().w(0.0).unwrap();
        let zf2 = LambdaFamily::new(&ch, User::Two, FamilyKind::W).unwrap().w(0.0).unwrap();
        let g = gains(&ch, &TxStrategy::new(zf1, zf2, p, p, p).unwrap());
        prop_assert!((g.d1() - g.c1()).abs() <= 1e-12 * g.c1().max(1.0));
        prop_assert!((g.d2() - g.c2()).abs() <= 1e-12 * g.c2().max(1.0));
    }
}
