use misoic::channel::{self, angle, gen_iid, gen_symmetric, Channel, ChannelError};
use misoic::linalg::{inner, proj, proj_orth, rank2_herm_eig, unit, CVec, LinalgError};
use misoic::pareto::{
    candidate_grid, pareto_filter, power_region_boundary, region_sweep, FamilyKind, GridSizes, LambdaFamily,
};
use misoic::rates::{gains, rate_pair, sum_rate, tdma_sum_rate, zdd_terms, DecodingStructure, Gains, RatePoint, TxStrategy};
use misoic::User;
use num_complex::Complex64;
use std::f64::consts::PI;

const NN: DecodingStructure = DecodingStructure::NN;
const ND: DecodingStructure = DecodingStructure::ND;
const DN: DecodingStructure = DecodingStructure::DN;
const DD: DecodingStructure = DecodingStructure::DD;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn e(n: usize, k: usize) -> CVec {
    let mut v = CVec::zeros(n);
    v.0[k] = c(1.0, 0.0);
    v
}

fn assert_vec(a: &CVec, b: &CVec, tol: f64) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b.iter()) {
        assert!((x - y).norm() <= tol, "{a:?} vs {b:?}");
    }
}

// Independent evaluator: rates straight from the definitions.
fn abs2(h: &CVec, w: &CVec) -> f64 {
    h.iter().zip(w.iter()).map(|(a, b)| a.conj() * b).sum::<Complex64>().norm_sqr()
}

fn reference_rates(s: DecodingStructure, ch: &Channel, tx: &TxStrategy) -> (f64, f64) {
    let g11 = abs2(&ch.h11, &tx.w1) * tx.p1;
    let g21 = abs2(&ch.h21, &tx.w1) * tx.p1;
    let g22 = abs2(&ch.h22, &tx.w2) * tx.p2;
    let g12 = abs2(&ch.h12, &tx.w2) * tx.p2;
    let l = |x: f64| (1.0 + x).log2();
    let (c1, c2) = (l(g11), l(g22));
    let (d1, d2) = (l(g11 / (1.0 + g12)), l(g22 / (1.0 + g21)));
    let (t1, t2) = (l(g21 / (1.0 + g22)), l(g12 / (1.0 + g11)));
    match s {
        DecodingStructure::NN => (d1, d2),
        DecodingStructure::ND => (d1.min(t1), c2),
        DecodingStructure::DN => (c1, d2.min(t2)),
        DecodingStructure::DD => (c1.min(t1), c2.min(t2)),
    }
}

#[test]
fn inner_product_examples() {
    assert_eq!(inner(&e(2, 0), &e(2, 0)).unwrap(), c(1.0, 0.0));
    assert_eq!(inner(&e(2, 0), &e(2, 1)).unwrap(), c(0.0, 0.0));
    let x = CVec::new(vec![c(1.0, 1.0), c(0.0, 0.0)]);
    let y = CVec::from_real(&[2.0, 0.0]);
    assert_eq!(inner(&x, &y).unwrap(), c(2.0, -2.0));
}

#[test]
fn projection_examples() {
    assert_vec(&proj(&e(2, 0), &e(2, 0)).unwrap(), &e(2, 0), 0.0);
    assert_vec(&proj(&e(2, 1), &e(2, 0)).unwrap(), &CVec::zeros(2), 0.0);
    assert_vec(&proj(&CVec::from_real(&[1.0, 0.0]), &CVec::from_real(&[1.0, 1.0])).unwrap(), &e(2, 0), 0.0);
    assert_vec(&proj_orth(&e(2, 0), &e(2, 0)).unwrap(), &CVec::zeros(2), 0.0);
    assert_vec(&proj_orth(&e(2, 1), &e(2, 0)).unwrap(), &e(2, 0), 0.0);
    let x = CVec::from_real(&[1.0, 1.0, 0.0]);
    assert_vec(&proj_orth(&CVec::from_real(&[1.0, 0.0, 0.0]), &x).unwrap(), &e(3, 1), 0.0);
}

#[test]
fn unit_examples() {
    assert_vec(&unit(&CVec::from_real(&[3.0, 4.0, 0.0])).unwrap(), &CVec::from_real(&[0.6, 0.8, 0.0]), 1e-15);
    assert_vec(&unit(&e(2, 1)).unwrap(), &e(2, 1), 0.0);
    let r = 1.0 / 2f64.sqrt();
    assert_vec(&unit(&CVec::new(vec![c(1.0, 1.0), c(0.0, 0.0)])).unwrap(), &CVec::new(vec![c(r, r), c(0.0, 0.0)]), 1e-15);
    assert_eq!(unit(&CVec::zeros(3)), Err(LinalgError::DegenerateDirection));
}

#[test]
fn rank2_diagonal_and_parallel() {
    let r = rank2_herm_eig(2.0, &e(2, 0), 3.0, &e(2, 1)).unwrap();
    assert_eq!((r.a, r.b), (2.0, 3.0));
    assert!(1.0 - inner(&r.v_a, &e(2, 0)).unwrap().norm() < 1e-15);
    assert!(1.0 - inner(&r.v_b, &e(2, 1)).unwrap().norm() < 1e-15);
    assert_eq!(rank2_herm_eig(1.0, &e(2, 0), 1.0, &e(2, 0)), Err(LinalgError::ParallelChannels));
}

// Dense N x N reference: build S, then power iteration on S + sigma I and
// on sigma I - S picks out the two extreme eigenvalues.
#[test]
fn rank2_matches_dense_power_iteration() {
    let ch = gen_iid(3, 11).unwrap();
    let (u, v) = (&ch.h11, &ch.h21);
    let (alpha, beta) = (1.0, 0.5);
    let n = 3;
    let mut s = vec![vec![c(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            s[i][j] = u.0[i] * u.0[j].conj() * alpha - v.0[i] * v.0[j].conj() * beta;
        }
    }
    let sigma = alpha * u.norm_sqr() + beta * v.norm_sqr();
    let iterate = |sign: f64| -> (f64, CVec) {
        let mut x = CVec::from_real(&[1.0, 0.7, -0.3]);
        for _ in 0..20000 {
            let y: Vec<Complex64> =
                (0..n).map(|i| (0..n).map(|j| s[i][j] * x.0[j] * sign).sum::<Complex64>() + x.0[i] * sigma).collect();
            x = unit(&CVec::new(y)).unwrap();
        }
        let sx: Vec<Complex64> = (0..n).map(|i| (0..n).map(|j| s[i][j] * x.0[j]).sum()).collect();
        (inner(&x, &CVec::new(sx)).unwrap().re, x)
    };
    let (top, vt) = iterate(1.0);
    let (bottom, vb) = iterate(-1.0);
    let r = rank2_herm_eig(alpha, u, beta, v).unwrap();
    assert!((r.a - top).abs() <= 1e-9, "{} vs {top}", r.a);
    assert!((-r.b - bottom).abs() <= 1e-9, "{} vs {bottom}", r.b);
    assert!(1.0 - inner(&r.v_a, &vt).unwrap().norm() <= 1e-9);
    assert!(1.0 - inner(&r.v_b, &vb).unwrap().norm() <= 1e-9);
}

#[test]
fn iid_generator() {
    assert_eq!(gen_iid(3, 5).unwrap(), gen_iid(3, 5).unwrap());
    assert!(matches!(gen_iid(1, 0), Err(ChannelError::TooFewAntennas(1))));
    let trials = 10_000;
    let mut acc = [[0.0f64; 3]; 4];
    for k in 0..trials {
        let ch = gen_iid(3, k).unwrap();
        for (a, h) in acc.iter_mut().zip([&ch.h11, &ch.h12, &ch.h21, &ch.h22]) {
            for (x, z) in a.iter_mut().zip(h.iter()) {
                *x += z.norm_sqr() / trials as f64;
            }
        }
    }
    for v in acc.iter().flatten() {
        assert!((0.95..=1.05).contains(v), "{v}");
    }
}

#[test]
fn symmetric_generator() {
    let ch = gen_symmetric(3, 1.0, 0.0, 4).unwrap();
    assert!(angle(&ch.h21, &ch.h11).unwrap() < 1e-7);
    assert!(angle(&ch.h12, &ch.h22).unwrap() < 1e-7);
    let ch = gen_symmetric(3, 1.0, PI / 2.0, 4).unwrap();
    assert!(inner(&ch.h21, &ch.h11).unwrap().norm() <= 1e-10);
    assert!(inner(&ch.h12, &ch.h22).unwrap().norm() <= 1e-10);
    let ch = gen_symmetric(4, 4.0, 0.3, 9).unwrap();
    assert!((ch.h11.norm_sqr() / ch.h21.norm_sqr() - 4.0).abs() <= 1e-10);
    assert!((ch.h22.norm_sqr() / ch.h12.norm_sqr() - 4.0).abs() <= 1e-10);
    assert!((angle(&ch.h21, &ch.h11).unwrap() - 0.3).abs() <= 1e-10);
}

#[test]
fn angle_examples() {
    let a = CVec::from_real(&[1.0, 0.0]);
    assert_eq!(angle(&a, &a).unwrap(), 0.0);
    assert!((angle(&a, &e(2, 1)).unwrap() - PI / 2.0).abs() < 1e-15);
    let r = 1.0 / 2f64.sqrt();
    assert!((angle(&a, &CVec::from_real(&[r, r])).unwrap() - PI / 4.0).abs() < 1e-12);
}

#[test]
fn channel_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ch.json");
    let ch = gen_iid(4, 21).unwrap();
    channel::save(&ch, &path).unwrap();
    assert_eq!(channel::load(&path).unwrap(), ch);
}

#[test]
fn channel_file_errors() {
    let ch = gen_iid(2, 1).unwrap();
    let good = channel::to_json(&ch);
    let short = good.replacen("\"n\": 2", "\"n\": 3", 1);
    assert!(matches!(channel::from_json(&short), Err(ChannelError::BadField { .. })));
    let v: serde_json::Value = serde_json::from_str(&good).unwrap();
    let mut obj = v.as_object().unwrap().clone();
    obj.remove("h21");
    let err = channel::from_json(&serde_json::Value::Object(obj).to_string()).unwrap_err();
    assert!(matches!(&err, ChannelError::MissingField(f) if f == "h21"));
    assert!(err.to_string().contains("h21"));
}

#[test]
fn received_power_examples() {
    let ch = gen_iid(3, 2).unwrap();
    let p = 2.5;
    let w1 = unit(&ch.h11).unwrap();
    let w2 = LambdaFamily::new(&ch, User::Two, FamilyKind::W).unwrap().w(0.0).unwrap();
    let g = gains(&ch, &TxStrategy::new(w1, w2, p, p, p).unwrap());
    assert!((g.g11 - ch.h11.norm_sqr() * p).abs() <= 1e-12 * g.g11);
    assert!(g.g12 <= 1e-24);
    assert!((g.d1() - g.c1()).abs() <= 1e-12);
}

#[test]
fn rates_match_reference_evaluator() {
    for seed in 0..20 {
        let ch = gen_iid(3, seed).unwrap();
        let z = gen_iid(3, seed + 1000).unwrap();
        let tx = TxStrategy::new(unit(&z.h11).unwrap(), unit(&z.h22).unwrap(), 0.7, 1.9, 2.0).unwrap();
        for s in DecodingStructure::ALL {
            let r = rate_pair(s, &ch, &tx);
            let (r1, r2) = reference_rates(s, &ch, &tx);
            assert!((r.r1 - r1).abs() <= 1e-14 && (r.r2 - r2).abs() <= 1e-14, "{s} seed {seed}");
        }
    }
}

#[test]
fn zero_cross_gains() {
    let g = Gains { g11: 3.0, g21: 0.0, g22: 1.0, g12: 0.0 };
    let r = g.rates(NN);
    assert_eq!((r.r1, r.r2), (2.0, 1.0));
    // Nothing reaches the other receiver, so DD cannot decode anything.
    let r = g.rates(DD);
    assert_eq!((r.r1, r.r2), (0.0, 0.0));
}

#[test]
fn zero_powers_give_unit_terms() {
    let z = zdd_terms(&Gains::default());
    assert_eq!(z, [1.0; 4]);
    assert_eq!(Gains::default().sum_rate(DD), 0.0);
}

#[test]
fn tdma_examples() {
    let ch = gen_iid(3, 8).unwrap();
    let hand = 0.5 * (1.0 + ch.h11.norm_sqr()).log2() + 0.5 * (1.0 + ch.h22.norm_sqr()).log2();
    assert!((tdma_sum_rate(&ch, 1.0) - hand).abs() <= 1e-15);
    assert_eq!(tdma_sum_rate(&ch, 0.0), 0.0);
    let sym = Channel::new(ch.h11.clone(), ch.h12.clone(), ch.h21.clone(), ch.h11.scale(c(0.0, 1.0))).unwrap();
    let single = (1.0 + ch.h11.norm_sqr() * 3.0).log2();
    assert!((tdma_sum_rate(&sym, 3.0) - single).abs() <= 1e-12);
}

#[test]
fn family_endpoints() {
    let ch = gen_iid(3, 3).unwrap();
    for kind in [FamilyKind::W, FamilyKind::V] {
        let f = LambdaFamily::new(&ch, User::One, kind).unwrap();
        assert_eq!(f.w(1.0).unwrap(), f.basis_a);
        assert_eq!(&f.w(0.0).unwrap(), f.basis_b.as_ref().unwrap());
    }
    let zf = LambdaFamily::new(&ch, User::One, FamilyKind::W).unwrap().w(0.0).unwrap();
    assert!(inner(&ch.h21, &zf).unwrap().norm() <= 1e-12);
}

#[test]
fn lambda_mrt_examples() {
    let h11 = CVec::from_real(&[1.0, 0.0]);
    let r = 1.0 / 2f64.sqrt();
    let ch = Channel::new(h11.clone(), CVec::from_real(&[1.0, 0.0]), CVec::from_real(&[r, r]), CVec::from_real(&[0.0, 1.0])).unwrap();
    let f = LambdaFamily::new(&ch, User::One, FamilyKind::W).unwrap();
    assert!((f.lambda_mrt(&ch) - 0.5).abs() < 1e-15);
    let ch = Channel::new(h11.clone(), h11.clone(), h11.scale_real(2.0), h11.clone()).unwrap();
    assert_eq!(LambdaFamily::new(&ch, User::One, FamilyKind::W).unwrap().lambda_mrt(&ch), 1.0);
}

#[test]
fn candidate_grid_examples() {
    let ch = gen_iid(3, 5).unwrap();
    let p = 4.0;
    let nn = candidate_grid(NN, &ch, p, GridSizes { n_lambda: 2, n_power: 7 }).unwrap();
    assert_eq!(nn.len(), 4);
    assert!(nn.iter().all(|t| t.p1 == p && t.p2 == p));
    let nd = candidate_grid(ND, &ch, p, GridSizes { n_lambda: 5, n_power: 3 }).unwrap();
    assert_eq!(nd.len(), 5 * 5 * 3);
    assert!(nd.iter().all(|t| t.p1 == p));
    let dn = candidate_grid(DN, &ch, p, GridSizes { n_lambda: 5, n_power: 3 }).unwrap();
    assert!(dn.iter().all(|t| t.p2 == p));
}

#[test]
fn region_sweep_counts_and_zero_power() {
    let ch = gen_iid(3, 6).unwrap();
    let g = GridSizes { n_lambda: 7, n_power: 4 };
    let factor = [(NN, 1), (ND, 4), (DN, 4), (DD, 16)];
    for (s, f) in factor {
        assert_eq!(region_sweep(s, &ch, 1.0, g).unwrap().len(), 49 * f, "{s}");
    }
    let zero = region_sweep(DD, &ch, 0.0, g).unwrap();
    assert!(zero.iter().all(|p| *p == RatePoint { r1: 0.0, r2: 0.0 }));
}

#[test]
fn orthogonal_cross_channels_reach_clean_rates() {
    let ch = Channel::new(
        CVec::from_real(&[1.0, 0.0]),
        CVec::from_real(&[2.0, 0.0]),
        CVec::from_real(&[0.0, 1.5]),
        CVec::from_real(&[0.0, 0.8]),
    )
    .unwrap();
    let p = 2.0;
    let pts = region_sweep(NN, &ch, p, GridSizes { n_lambda: 11, n_power: 1 }).unwrap();
    let best = pts.iter().map(|r| r.sum()).fold(f64::NEG_INFINITY, f64::max);
    let clean = (1.0 + p).log2() + (1.0 + 0.64 * p).log2();
    assert!((best - clean).abs() <= 1e-12);
}

#[test]
fn pareto_filter_examples() {
    let rp = |r1, r2| RatePoint { r1, r2 };
    assert_eq!(pareto_filter(&[rp(1.0, 1.0), rp(2.0, 0.0), rp(0.0, 2.0)]), vec![rp(0.0, 2.0), rp(1.0, 1.0), rp(2.0, 0.0)]);
    assert_eq!(pareto_filter(&[rp(1.0, 1.0), rp(2.0, 2.0)]), vec![rp(2.0, 2.0)]);
    assert_eq!(pareto_filter(&[rp(1.0, 2.0), rp(1.0, 1.0)]), vec![rp(1.0, 2.0)]);
}

#[test]
fn power_region_corner_points() {
    let ch = gen_iid(3, 12).unwrap();
    let p = 3.0;
    let g = GridSizes { n_lambda: 3, n_power: 2 };
    let pts = power_region_boundary(&ch, User::One, p, g).unwrap();
    // Outer loop lambda in {0, 0.5, 1}, inner power in {0, P}.
    let zf = pts[1];
    assert!(zf.1 <= 1e-24);
    let perp = proj_orth(&ch.h21, &ch.h11).unwrap().norm_sqr() * p;
    assert!((zf.0 - perp).abs() <= 1e-12 * perp);
    let top = pts[5];
    assert!((top.1 - ch.h21.norm_sqr() * p).abs() <= 1e-12 * top.1);

    let fam = LambdaFamily::new(&ch, User::One, FamilyKind::W).unwrap();
    let w = fam.w(fam.lambda_mrt(&ch)).unwrap();
    let g = gains(&ch, &TxStrategy::new(w, unit(&ch.h22).unwrap(), p, p, p).unwrap());
    assert!((g.g11 - ch.h11.norm_sqr() * p).abs() <= 1e-10 * g.g11);
}

// A dense cloud of random unit beamformers and powers never beats the DD
// region frontier by more than the grid tolerance in both coordinates.
#[test]
fn dd_frontier_covers_random_cloud() {
    use rand::{Rng, SeedableRng};
    let ch = gen_iid(3, 17).unwrap();
    let p = 1.0;
    let front = pareto_filter(&region_sweep(DD, &ch, p, GridSizes { n_lambda: 41, n_power: 11 }).unwrap());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| {
        let v: Vec<(f64, f64)> = (0..3).map(|_| (rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
        unit(&CVec::from_pairs(&v)).unwrap()
    };
    for _ in 0..20_000 {
        let tx = TxStrategy::new(draw(&mut rng), draw(&mut rng), rng.gen::<f64>() * p, rng.gen::<f64>() * p, p).unwrap();
        let (r1, r2) = reference_rates(DD, &ch, &tx);
        let dominated = front.iter().any(|q| q.r1 >= r1 - 0.02 && q.r2 >= r2 - 0.02);
        assert!(dominated, "({r1}, {r2}) escapes the frontier");
        let _ = sum_rate(DD, &ch, &tx);
    }
}
