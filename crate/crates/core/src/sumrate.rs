//! Reduced candidate sets for the maximum sum rate of each decoding
//! structure, the balancing beamformers they rely on, and the combined
//! maximizer.
//!
//! All candidates transmit at full power. ND keeps three kinds of
//! beamformer for Tx 1 (selfish MRT, interference MRT and the vector that
//! balances `D_1 = T_1`) and a restricted slice of `W_2`; DN is ND with the
//! users exchanged; DD restricts each `V_i` to `[lambda_i^A, lambda_i^mrt]`
//! plus the selfish MRT and the balancing member `w_i(lambda_i^A)`.

use crate::channel::{Channel, User};
use crate::linalg::{inner_unchecked, rank2_herm_eig, CVec, LinalgError};
use crate::pareto::{linspace, CandidateTuple, FamilyKind, LambdaFamily, ParetoError};
use crate::rates::{DecodingStructure, Gains};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SumRateError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Pareto(#[from] ParetoError),
    #[error("balancing equation has a vanishing denominator")]
    DegenerateBalance,
    #[error("the two balanced powers never cross inside the family")]
    NoCrossing,
    #[error("direct and cross channels are parallel")]
    ParallelChannels,
    #[error("maximum power must be positive and finite (got {0})")]
    BadPower(f64),
    #[error("grid size must be at least 1")]
    EmptyGrid,
}

/// Where a candidate beamformer comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BeamKind {
    /// `unit(h_ii)`.
    SelfishMrt,
    /// `unit(h_ji)`.
    InterferenceMrt,
    /// Solves a rate-balancing equation.
    Balance,
    /// Grid member of a lambda family.
    Family,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Beam {
    pub w: CVec,
    /// Coordinate in the structure's family (`W` for ND/DN, `V` for DD).
    pub lambda: f64,
    pub kind: BeamKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PairBlock {
    /// Every `(i, j)` with `i` in the first range and `j` in the second.
    Product(std::ops::Range<usize>, std::ops::Range<usize>),
    List(Vec<(usize, usize)>),
}

/// Beam lists for both users plus the pairs that are actually candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub structure: DecodingStructure,
    pub beams1: Vec<Beam>,
    pub beams2: Vec<Beam>,
    pub blocks: Vec<PairBlock>,
    pub p1: f64,
    pub p2: f64,
}

/// Best pair of a candidate set.
#[derive(Debug, Clone, PartialEq)]
pub struct BestPair {
    pub i1: usize,
    pub i2: usize,
    pub rate: f64,
}

impl CandidateSet {
    fn new(structure: DecodingStructure, pmax: f64) -> Self {
        CandidateSet { structure, beams1: Vec::new(), beams2: Vec::new(), blocks: Vec::new(), p1: pmax, p2: pmax }
    }

    fn push1(&mut self, b: Beam) -> usize {
        self.beams1.push(b);
        self.beams1.len() - 1
    }

    fn push2(&mut self, b: Beam) -> usize {
        self.beams2.push(b);
        self.beams2.len() - 1
    }

    /// Number of candidate pairs (with repetition across blocks).
    pub fn len(&self) -> usize {
        self.blocks
            .iter()
            .map(|b| match b {
                PairBlock::Product(a, c) => a.len() * c.len(),
                PairBlock::List(v) => v.len(),
            })
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All pairs in evaluation order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.len());
        for b in &self.blocks {
            match b {
                PairBlock::Product(a, c) => {
                    for i in a.clone() {
                        for j in c.clone() {
                            out.push((i, j));
                        }
                    }
                }
                PairBlock::List(v) => out.extend_from_slice(v),
            }
        }
        out
    }

    pub fn tuple(&self, i1: usize, i2: usize) -> CandidateTuple {
        let (b1, b2) = (&self.beams1[i1], &self.beams2[i2]);
        CandidateTuple {
            structure: self.structure,
            w1: b1.w.clone(),
            w2: b2.w.clone(),
            p1: self.p1,
            p2: self.p2,
            lambda1: b1.lambda,
            lambda2: b2.lambda,
        }
    }

    pub fn tuples(&self) -> Vec<CandidateTuple> {
        self.pairs().into_iter().map(|(i, j)| self.tuple(i, j)).collect()
    }

    /// Highest sum rate; ties go to the earliest pair in evaluation order.
    pub fn best(&self, ch: &Channel) -> Option<BestPair> {
        let u1: Vec<(f64, f64)> = self.beams1.iter().map(|b| unit_gains(ch, User::One, &b.w)).collect();
        let u2: Vec<(f64, f64)> = self.beams2.iter().map(|b| unit_gains(ch, User::Two, &b.w)).collect();
        let s = self.structure;
        let mut best: Option<(usize, usize, f64)> = None;
        let mut visit = |i: usize, j: usize| {
            let g = Gains {
                g11: u1[i].0 * self.p1,
                g21: u1[i].1 * self.p1,
                g22: u2[j].0 * self.p2,
                g12: u2[j].1 * self.p2,
            };
            let z = g.sum_exponent(s);
            if best.map_or(true, |(_, _, b)| z > b) {
                best = Some((i, j, z));
            }
        };
        for b in &self.blocks {
            match b {
                PairBlock::Product(a, c) => {
                    for i in a.clone() {
                        for j in c.clone() {
                            visit(i, j);
                        }
                    }
                }
                PairBlock::List(v) => v.iter().for_each(|&(i, j)| visit(i, j)),
            }
        }
        best.map(|(i1, i2, _)| {
            let g = Gains {
                g11: u1[i1].0 * self.p1,
                g21: u1[i1].1 * self.p1,
                g22: u2[i2].0 * self.p2,
                g12: u2[i2].1 * self.p2,
            };
            BestPair { i1, i2, rate: g.sum_rate(s) }
        })
    }

    /// The same set with user labels exchanged.
    pub fn swapped(&self) -> CandidateSet {
        let blocks = self
            .blocks
            .iter()
            .map(|b| match b {
                PairBlock::Product(a, c) => PairBlock::Product(c.clone(), a.clone()),
                PairBlock::List(v) => PairBlock::List(v.iter().map(|&(i, j)| (j, i)).collect()),
            })
            .collect();
        CandidateSet {
            structure: self.structure.swapped(),
            beams1: self.beams2.clone(),
            beams2: self.beams1.clone(),
            blocks,
            p1: self.p2,
            p2: self.p1,
        }
    }
}

/// Unit-power `(|h_ii^H w|^2, |h_ji^H w|^2)`.
pub fn unit_gains(ch: &Channel, user: User, w: &CVec) -> (f64, f64) {
    (
        inner_unchecked(&ch.direct(user).0, &w.0).norm_sqr(),
        inner_unchecked(&ch.cross(user).0, &w.0).norm_sqr(),
    )
}

fn check_pmax(pmax: f64) -> Result<(), SumRateError> {
    if !(pmax > 0.0) || !pmax.is_finite() {
        return Err(SumRateError::BadPower(pmax));
    }
    Ok(())
}

/// `cos^2` of the angle between `h_ii` and `h_ji`: the `W_i` member equal
/// to `unit(h_ii)`, and the `V_i` member equal to `unit(h_ji)`.
pub fn lambda_mrt(ch: &Channel, user: User) -> Result<f64, SumRateError> {
    Ok(ch.cos2(user)?)
}

/// Solve `lw |lin^H w(lambda)|^2 = cw |conc^H w(lambda)|^2` along the
/// family whose leading basis vector is parallel to `lin` (so the left side
/// is linear in `lambda` and the right side concave).
///
/// Closed form:
/// `lambda = cw ||Pi_lin^perp conc||^2 /
///           (lw ||lin||^2 - 2 sqrt(lw cw) |lin^H conc| + cw ||conc||^2)`.
///
/// The root is only meaningful when
/// `sqrt(lw) ||lin|| >= sqrt(cw) ||conc|| cos(angle)`; otherwise the right
/// side dominates on the whole family and `NoCrossing` is returned.
pub fn balance_lambda(lin: &CVec, lw: f64, conc: &CVec, cw: f64) -> Result<f64, SumRateError> {
    let nl = lin.norm();
    let nc = conc.norm();
    let ip = inner_unchecked(&lin.0, &conc.0).norm();
    if nl == 0.0 || nc == 0.0 {
        return Err(SumRateError::Linalg(LinalgError::DegenerateDirection));
    }
    let cos = (ip / (nl * nc)).min(1.0);
    let sin2 = (1.0 - cos * cos).max(0.0);
    let a = lw.sqrt() * nl - cw.sqrt() * nc * cos;
    let b2 = cw * nc * nc * sin2;
    let den = a * a + b2;
    let scale = lw * nl * nl + cw * nc * nc;
    if den <= 1e-12 * scale {
        return Err(SumRateError::DegenerateBalance);
    }
    if sin2.sqrt() <= crate::linalg::TOL_DEG {
        return Err(SumRateError::ParallelChannels);
    }
    if a < 0.0 {
        return Err(SumRateError::NoCrossing);
    }
    Ok((b2 / den).clamp(0.0, 1.0))
}

/// `W_1` coordinate of the Tx-1 beamformer that equalizes `D_1` and `T_1`
/// for a fixed `w2` at full power.
pub fn lambda_b_nd(ch: &Channel, w2: &CVec, pmax: f64) -> Result<f64, SumRateError> {
    check_pmax(pmax)?;
    let g12 = inner_unchecked(&ch.h12.0, &w2.0).norm_sqr() * pmax;
    let g22 = inner_unchecked(&ch.h22.0, &w2.0).norm_sqr() * pmax;
    let c1 = pmax / (g12 + 1.0);
    let c2 = pmax / (g22 + 1.0);
    balance_lambda(&ch.h21, c2, &ch.h11, c1)
}

/// `V_i` coordinate where `(1 + g_jj) |h_ii^H w|^2 = |h_ji^H w|^2`.
pub fn lambda_a(ch: &Channel, user: User, g_jj: f64) -> Result<f64, SumRateError> {
    balance_lambda(ch.direct(user), 1.0 + g_jj, ch.cross(user), 1.0)
}

/// Outcome of the Tx-2 balancing problem in ND.
#[derive(Debug, Clone, PartialEq)]
pub enum W2Balance {
    /// A direction with `D_1 = T_1` and the largest desired power.
    Balanced { w2: CVec, lambda: f64 },
    /// `D_1 <= T_1` for every Tx-2 direction.
    DLimited,
    /// `T_1 <= D_1` for every Tx-2 direction.
    TLimited,
    /// `h22` and `h12` are parallel.
    Collapsed,
}

/// For fixed `w1` at full power, the `w2` (full power) satisfying
/// `|h22^H w2|^2 P = (g - 1) + g |h12^H w2|^2 P` with `g = g21 / g11` and the
/// largest `|h22^H w2|^2`.
///
/// With `S = P h22 h22^H - g P h12 h12^H = a v_a v_a^H - b v_b v_b^H`, the
/// solutions in `span{h22, h12}` are, up to scale,
/// `v_a / sqrt(a - (g-1)) + e^{i phi} v_b / sqrt(b + (g-1))`; the phase
/// `phi = arg(h22^H v_a) - arg(h22^H v_b)` maximizes the desired power.
pub fn w2_balance_nd(ch: &Channel, w1: &CVec, pmax: f64) -> Result<W2Balance, SumRateError> {
    check_pmax(pmax)?;
    let d = inner_unchecked(&ch.h11.0, &w1.0).norm_sqr();
    let c = inner_unchecked(&ch.h21.0, &w1.0).norm_sqr();
    if d <= 1e-300 {
        return Ok(W2Balance::DLimited);
    }
    let g = c / d;
    let eig = match rank2_herm_eig(pmax, &ch.h22, g * pmax, &ch.h12) {
        Ok(e) => e,
        Err(LinalgError::ParallelChannels) => return Ok(W2Balance::Collapsed),
        Err(LinalgError::DegenerateDirection) if g == 0.0 => return Ok(W2Balance::TLimited),
        Err(e) => return Err(e.into()),
    };
    let at = eig.a - (g - 1.0);
    let bt = eig.b + (g - 1.0);
    if at <= 0.0 {
        return Ok(W2Balance::DLimited);
    }
    if bt <= 0.0 {
        return Ok(W2Balance::TLimited);
    }
    let pa = inner_unchecked(&ch.h22.0, &eig.v_a.0);
    let pb = inner_unchecked(&ch.h22.0, &eig.v_b.0);
    let phi = pa.arg() - pb.arg();
    let raw = eig.v_a.scale_real(1.0 / at.sqrt()).axpy(Complex64::from_polar(1.0 / bt.sqrt(), phi), &eig.v_b);
    let w2 = crate::linalg::unit(&raw)?;
    let fam2 = LambdaFamily::new(ch, User::Two, FamilyKind::W)?;
    let lambda = fam2.lambda_of(&w2);
    Ok(W2Balance::Balanced { w2, lambda })
}

/// Diagnostics that accompany the ND candidate set.
#[derive(Debug, Clone, PartialEq)]
pub struct NdCandidates {
    pub set: CandidateSet,
    pub lambda1_mrt: f64,
    pub lambda2_mrt: f64,
    /// Tx-2 balancing outcome for `w1 = unit(h11)` and `w1 = unit(h21)`.
    pub balance: [W2Balance; 2],
}

/// Candidate set for the ND sum rate (at most `3 (n_lambda + 1)` pairs).
///
/// Three branches, one per kind of Tx-1 beamformer:
/// * `w1 = unit(h11)` and `w1 = unit(h21)`: `w2` ranges over `unit(h22)`
///   and `n_lambda` members of `W_2` between the balancing coordinate for
///   that `w1` and `lambda_2^mrt`;
/// * `w1 = w1(lambda_1^b(w2))`: `w2` ranges over `unit(h22)` and `n_lambda`
///   members of `W_2` on `[0, lambda_2^mrt]`.
pub fn nd_candidates(ch: &Channel, pmax: f64, n_lambda: usize) -> Result<NdCandidates, SumRateError> {
    check_pmax(pmax)?;
    if n_lambda == 0 {
        return Err(SumRateError::EmptyGrid);
    }
    let fam1 = LambdaFamily::new(ch, User::One, FamilyKind::W)?;
    let fam2 = LambdaFamily::new(ch, User::Two, FamilyKind::W)?;
    let mrt1 = fam1.lambda_mrt(ch);
    let mrt2 = fam2.lambda_mrt(ch);
    let selfish2 = Beam { w: crate::linalg::unit(&ch.h22)?, lambda: mrt2, kind: BeamKind::SelfishMrt };
    let mut set = CandidateSet::new(DecodingStructure::ND, pmax);

    let anchors = [
        Beam { w: crate::linalg::unit(&ch.h11)?, lambda: mrt1, kind: BeamKind::SelfishMrt },
        Beam { w: fam1.w(1.0)?, lambda: 1.0, kind: BeamKind::InterferenceMrt },
    ];
    let mut balance = Vec::with_capacity(2);
    for anchor in anchors {
        let bal = if fam2.is_collapsed() { W2Balance::Collapsed } else { w2_balance_nd(ch, &anchor.w, pmax)? };
        let i1 = set.push1(anchor);
        let mut pairs = vec![(i1, set.push2(selfish2.clone()))];
        let range = match &bal {
            W2Balance::Balanced { lambda, .. } if *lambda <= mrt2 => Some(linspace(*lambda, mrt2, n_lambda)),
            W2Balance::Balanced { lambda, .. } => Some(vec![*lambda]),
            W2Balance::DLimited => Some(linspace(0.0, mrt2, n_lambda)),
            W2Balance::TLimited | W2Balance::Collapsed => None,
        };
        for l in range.into_iter().flatten() {
            let i2 = set.push2(Beam { w: fam2.w(l)?, lambda: l, kind: BeamKind::Family });
            pairs.push((i1, i2));
        }
        set.blocks.push(PairBlock::List(pairs));
        balance.push(bal);
    }

    // Coupled branch: Tx 1 balances D_1 = T_1 against each w2.
    let mut w2s = vec![selfish2.clone()];
    if !fam2.is_collapsed() {
        for l in linspace(0.0, mrt2, n_lambda) {
            w2s.push(Beam { w: fam2.w(l)?, lambda: l, kind: BeamKind::Family });
        }
    }
    let mut pairs = Vec::new();
    for b2 in w2s {
        match lambda_b_nd(ch, &b2.w, pmax) {
            Ok(l1) => {
                let i1 = set.push1(Beam { w: fam1.w(l1)?, lambda: l1, kind: BeamKind::Balance });
                let i2 = set.push2(b2);
                pairs.push((i1, i2));
            }
            Err(SumRateError::NoCrossing | SumRateError::DegenerateBalance | SumRateError::ParallelChannels) => {}
            Err(e) => return Err(e),
        }
    }
    set.blocks.push(PairBlock::List(pairs));

    let balance: [W2Balance; 2] = balance.try_into().expect("two anchors");
    Ok(NdCandidates { set, lambda1_mrt: mrt1, lambda2_mrt: mrt2, balance })
}

/// Candidate set for the DN sum rate: ND with the users exchanged.
pub fn dn_candidates(ch: &Channel, pmax: f64, n_lambda: usize) -> Result<CandidateSet, SumRateError> {
    Ok(nd_candidates(&ch.swap(), pmax, n_lambda)?.set.swapped())
}

/// Diagnostics that accompany the DD candidate set.
#[derive(Debug, Clone, PartialEq)]
pub struct DdCandidates {
    pub set: CandidateSet,
    pub lambda_mrt: [f64; 2],
    /// `lambda_i^A` with the partner at full power along `h_jj`, the
    /// smallest value the balancing coordinate can take.
    pub lambda_lo: [Option<f64>; 2],
}

/// Candidate set for the DD sum rate.
///
/// `lambda_i^A` depends on the partner's desired power `g_jj` and is
/// decreasing in it where it exists, so `[lambda_i^A(g_jj^max),
/// lambda_i^mrt]` contains the restricted family for every partner. The set
/// is the product of `{unit(h_ii)} U grid` over both users, plus each grid
/// member paired with the partner's exact balancing beamformer, plus a
/// jointly balanced pair found by fixed-point iteration.
pub fn dd_candidates(ch: &Channel, pmax: f64, n_lambda: usize) -> Result<DdCandidates, SumRateError> {
    check_pmax(pmax)?;
    if n_lambda == 0 {
        return Err(SumRateError::EmptyGrid);
    }
    let fams = [
        LambdaFamily::new(ch, User::One, FamilyKind::V)?,
        LambdaFamily::new(ch, User::Two, FamilyKind::V)?,
    ];
    let users = [User::One, User::Two];
    let mut set = CandidateSet::new(DecodingStructure::DD, pmax);
    let mut lambda_mrt = [1.0; 2];
    let mut lambda_lo = [None; 2];
    let mut ranges = Vec::with_capacity(2);
    for k in 0..2 {
        let user = users[k];
        let fam = &fams[k];
        lambda_mrt[k] = fam.lambda_mrt(ch);
        let selfish = Beam { w: crate::linalg::unit(ch.direct(user))?, lambda: 1.0, kind: BeamKind::SelfishMrt };
        let g_max = ch.direct(user.other()).norm_sqr() * pmax;
        let lo = if fam.is_collapsed() {
            None
        } else {
            match lambda_a(ch, user, g_max) {
                Ok(l) => Some(l),
                Err(SumRateError::NoCrossing | SumRateError::DegenerateBalance | SumRateError::ParallelChannels) => None,
                Err(e) => return Err(e),
            }
        };
        lambda_lo[k] = lo;
        let mut beams = vec![selfish];
        if let Some(lo) = lo.filter(|&l| l <= lambda_mrt[k]) {
            for l in linspace(lo, lambda_mrt[k], n_lambda) {
                beams.push(Beam { w: fam.w(l)?, lambda: l, kind: BeamKind::Family });
            }
        }
        let start = match user {
            User::One => set.beams1.len(),
            User::Two => set.beams2.len(),
        };
        for b in beams {
            match user {
                User::One => set.push1(b),
                User::Two => set.push2(b),
            };
        }
        let end = match user {
            User::One => set.beams1.len(),
            User::Two => set.beams2.len(),
        };
        ranges.push(start..end);
    }
    set.blocks.push(PairBlock::Product(ranges[0].clone(), ranges[1].clone()));

    // Exact balancing partner for every static member.
    let balanced = |user: User, partner: &CVec| -> Result<Option<Beam>, SumRateError> {
        let k = if user == User::One { 0 } else { 1 };
        let g = inner_unchecked(&ch.direct(user.other()).0, &partner.0).norm_sqr() * pmax;
        if fams[k].is_collapsed() {
            return Ok(None);
        }
        match lambda_a(ch, user, g) {
            Ok(l) => Ok(Some(Beam { w: fams[k].w(l)?, lambda: l, kind: BeamKind::Balance })),
            Err(SumRateError::NoCrossing | SumRateError::DegenerateBalance | SumRateError::ParallelChannels) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let mut pairs = Vec::new();
    for i2 in ranges[1].clone() {
        let w2 = set.beams2[i2].w.clone();
        if let Some(b) = balanced(User::One, &w2)? {
            let i1 = set.push1(b);
            pairs.push((i1, i2));
        }
    }
    for i1 in ranges[0].clone() {
        let w1 = set.beams1[i1].w.clone();
        if let Some(b) = balanced(User::Two, &w1)? {
            let i2 = set.push2(b);
            pairs.push((i1, i2));
        }
    }

    // Both users on their balancing members at once.
    let mut w1 = set.beams1[ranges[0].start].w.clone();
    let mut w2 = set.beams2[ranges[1].start].w.clone();
    let mut joint = None;
    for _ in 0..50 {
        let (Some(b1), Some(b2)) = (balanced(User::One, &w2)?, balanced(User::Two, &w1)?) else {
            break;
        };
        let moved = (&b1.w - &w1).norm() + (&b2.w - &w2).norm();
        w1 = b1.w.clone();
        w2 = b2.w.clone();
        joint = Some((b1, b2));
        if moved < 1e-12 {
            break;
        }
    }
    if let Some((b1, b2)) = joint {
        let i1 = set.push1(b1);
        let i2 = set.push2(b2);
        pairs.push((i1, i2));
    }
    set.blocks.push(PairBlock::List(pairs));
    Ok(DdCandidates { set, lambda_mrt, lambda_lo })
}

/// NN candidates: the full `W_1 x W_2` grid at full power, with each
/// user's matched filter added so the selfish pair is always present.
pub fn nn_candidates(ch: &Channel, pmax: f64, n_lambda: usize) -> Result<CandidateSet, SumRateError> {
    check_pmax(pmax)?;
    if n_lambda == 0 {
        return Err(SumRateError::EmptyGrid);
    }
    let mut set = CandidateSet::new(DecodingStructure::NN, pmax);
    for (user, kind) in [(User::One, FamilyKind::W), (User::Two, FamilyKind::W)] {
        let fam = LambdaFamily::new(ch, user, kind)?;
        let mut beams = Vec::new();
        if !fam.is_collapsed() {
            for l in linspace(0.0, 1.0, n_lambda) {
                beams.push(Beam { w: fam.w(l)?, lambda: l, kind: BeamKind::Family });
            }
        }
        beams.push(Beam { w: crate::linalg::unit(ch.direct(user))?, lambda: fam.lambda_mrt(ch), kind: BeamKind::SelfishMrt });
        for b in beams {
            match user {
                User::One => set.push1(b),
                User::Two => set.push2(b),
            };
        }
    }
    set.blocks.push(PairBlock::Product(0..set.beams1.len(), 0..set.beams2.len()));
    Ok(set)
}

/// Candidate set of one structure.
pub fn candidates(s: DecodingStructure, ch: &Channel, pmax: f64, n_lambda: usize) -> Result<CandidateSet, SumRateError> {
    match s {
        DecodingStructure::NN => nn_candidates(ch, pmax, n_lambda),
        DecodingStructure::ND => Ok(nd_candidates(ch, pmax, n_lambda)?.set),
        DecodingStructure::DN => dn_candidates(ch, pmax, n_lambda),
        DecodingStructure::DD => Ok(dd_candidates(ch, pmax, n_lambda)?.set),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureBest {
    pub structure: DecodingStructure,
    pub tuple: CandidateTuple,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxSumRate {
    /// Overall best; ties go to the earlier structure in NN, ND, DN, DD.
    pub best: StructureBest,
    pub per_structure: Vec<StructureBest>,
}

/// Best candidate of each structure and the overall maximum.
pub fn max_sum_rate(ch: &Channel, pmax: f64, n_lambda: usize) -> Result<MaxSumRate, SumRateError> {
    let mut per = Vec::with_capacity(4);
    for s in DecodingStructure::ALL {
        per.push(structure_max(s, ch, pmax, n_lambda)?);
    }
    let mut best = per[0].clone();
    for p in &per[1..] {
        if p.rate > best.rate {
            best = p.clone();
        }
    }
    Ok(MaxSumRate { best, per_structure: per })
}

/// Best candidate of a single structure.
pub fn structure_max(s: DecodingStructure, ch: &Channel, pmax: f64, n_lambda: usize) -> Result<StructureBest, SumRateError> {
    let set = candidates(s, ch, pmax, n_lambda)?;
    let b = set.best(ch).expect("candidate sets always contain the selfish pair");
    Ok(StructureBest { structure: s, tuple: set.tuple(b.i1, b.i2), rate: b.rate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::gen_iid;

    #[test]
    fn balance_rejects_parallel() {
        let x = CVec::from_real(&[1.0, 0.0]);
        let y = CVec::from_real(&[2.0, 0.0]);
        assert_eq!(balance_lambda(&x, 1.0, &y, 1.0), Err(SumRateError::ParallelChannels));
    }

    #[test]
    fn nd_set_size_bound() {
        for seed in 0..20 {
            let ch = gen_iid(3, seed).unwrap();
            let c = nd_candidates(&ch, 1.0, 11).unwrap();
            assert!(c.set.len() <= 3 * 12, "{}", c.set.len());
        }
    }

    #[test]
    fn dn_is_mirrored_nd() {
        let ch = gen_iid(3, 5).unwrap();
        let dn = structure_max(DecodingStructure::DN, &ch, 2.0, 31).unwrap();
        let nd = structure_max(DecodingStructure::ND, &ch.swap(), 2.0, 31).unwrap();
        assert!((dn.rate - nd.rate).abs() < 1e-12);
    }
}
