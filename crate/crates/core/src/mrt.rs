//! Closed-form optimality checks for matched-filter (MRT) strategies under
//! ND and DD, and the grid-argmax tests they are compared against.
//!
//! Every verdict carries the evaluated inequality chains. A chain
//! `lhs (<|<=) mid (<|<=) rhs` with `rhs = +inf` is a one-sided condition.

use crate::channel::{Channel, User};
use crate::linalg::{inner_unchecked, proj, CVec};
use crate::pareto::{linspace, FamilyKind, LambdaFamily};
use crate::rates::{DecodingStructure, Gains};
use crate::sumrate::unit_gains;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MrtStrategy {
    /// `(unit(h11), unit(h22))`.
    SelfishPair,
    /// Each transmitter beamforms toward the other receiver; for ND this is
    /// `(unit(h21), unit(h22))`, for DD `(unit(h21), unit(h12))`.
    InterferencePair,
    /// `w_i = unit(h_ii)` with the partner on `unit(h_jj)`.
    Selfish(User),
    /// `w_i = unit(h_ji)` with the partner on `unit(h_ij)`.
    Interference(User),
}

impl MrtStrategy {
    pub fn name(&self) -> String {
        match self {
            MrtStrategy::SelfishPair => "selfish_pair".into(),
            MrtStrategy::InterferencePair => "interference_pair".into(),
            MrtStrategy::Selfish(u) => format!("selfish_{}", user_no(*u)),
            MrtStrategy::Interference(u) => format!("interference_{}", user_no(*u)),
        }
    }
}

fn user_no(u: User) -> u8 {
    match u {
        User::One => 1,
        User::Two => 2,
    }
}

/// `lhs (<|<=) mid (<|<=) rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chain {
    pub lhs: f64,
    pub mid: f64,
    pub rhs: f64,
    pub lower_strict: bool,
    pub upper_strict: bool,
}

const BOUNDARY_TOL: f64 = 1e-12;

fn near(a: f64, b: f64) -> bool {
    a.is_finite() && b.is_finite() && (a - b).abs() <= BOUNDARY_TOL * a.abs().max(b.abs()).max(1.0)
}

impl Chain {
    fn le(a: f64, b: f64) -> Chain {
        Chain { lhs: a, mid: b, rhs: f64::INFINITY, lower_strict: false, upper_strict: false }
    }

    fn holds(&self) -> bool {
        let lower = if self.lower_strict { self.lhs < self.mid } else { self.lhs <= self.mid };
        let upper = if self.upper_strict { self.mid < self.rhs } else { self.mid <= self.rhs };
        lower && upper
    }

    fn boundary(&self) -> bool {
        near(self.lhs, self.mid) || near(self.mid, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MrtVerdict {
    pub structure: DecodingStructure,
    pub strategy: MrtStrategy,
    pub holds: bool,
    /// Some inequality is met with equality to within `1e-12` (relative).
    pub boundary: bool,
    pub chains: Vec<Chain>,
    /// Why the verdict was forced to `false`, if it was.
    pub note: Option<String>,
}

impl MrtVerdict {
    fn from_chains(structure: DecodingStructure, strategy: MrtStrategy, chains: Vec<Chain>) -> Self {
        let finite = chains.iter().all(|c| !c.lhs.is_nan() && !c.mid.is_nan() && !c.rhs.is_nan());
        let holds = finite && chains.iter().all(Chain::holds);
        let boundary = chains.iter().any(Chain::boundary);
        let note = if finite { None } else { Some("condition not defined for this channel".into()) };
        MrtVerdict { structure, strategy, holds, boundary, chains, note }
    }

    fn degenerate(structure: DecodingStructure, strategy: MrtStrategy, chains: Vec<Chain>, why: &str) -> Self {
        let boundary = chains.iter().any(Chain::boundary);
        MrtVerdict { structure, strategy, holds: false, boundary, chains, note: Some(why.into()) }
    }

    pub fn lhs(&self) -> f64 {
        self.chains.first().map_or(f64::NAN, |c| c.lhs)
    }
    pub fn mid(&self) -> f64 {
        self.chains.first().map_or(f64::NAN, |c| c.mid)
    }
    pub fn rhs(&self) -> f64 {
        self.chains.first().map_or(f64::NAN, |c| c.rhs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NdVerdicts {
    pub selfish: MrtVerdict,
    pub interference: MrtVerdict,
}

fn cos2(a: &CVec, b: &CVec) -> f64 {
    let na = a.norm_sqr();
    let nb = b.norm_sqr();
    if na == 0.0 || nb == 0.0 {
        return f64::NAN;
    }
    (inner_unchecked(&a.0, &b.0).norm_sqr() / (na * nb)).min(1.0)
}

/// ND checks for `(unit(h11), unit(h22))` and `(unit(h21), unit(h22))`.
///
/// With `c1 = P / (||h12||^2 cos^2(t2) P + 1)`, `c2 = P / (||h22||^2 P + 1)`:
///
/// * selfish: `c1 ||Pi21^perp h11||^2 / (c2 ||h21||^2 - 2 sqrt(c1 c2) |h21^H h11|
///   + c1 ||h11||^2) < cos^2(t1) <= (1 + ||h22||^2 P) ||h11||^2 /
///   ((1 + ||h12||^2 cos^2(t2) P) ||h21||^2)`;
/// * interference: `||h21||^2 <= (1 + ||h22||^2 P) ||Pi21 h11||^2 /
///   (1 + ||h12||^2 cos^2(t2) P)`.
///
/// The left end of the selfish chain is the `D_1 = T_1` crossing along
/// `W_1`. When `sqrt(c2) ||h21|| < sqrt(c1) ||h11|| cos(t1)` there is no
/// crossing (`D_1 > T_1` on all of `W_1`), the expression is not a root of
/// the balance equation, and the selfish verdict is `false`.
pub fn nd_mrt_check(ch: &Channel, pmax: f64) -> NdVerdicts {
    let s = DecodingStructure::ND;
    let (h11, h21, h22, h12) = (&ch.h11, &ch.h21, &ch.h22, &ch.h12);
    let c2t1 = cos2(h11, h21);
    let c2t2 = cos2(h22, h12);
    let n11 = h11.norm_sqr();
    let n21 = h21.norm_sqr();
    let n22 = h22.norm_sqr();
    let n12 = h12.norm_sqr();
    let c1 = pmax / (n12 * c2t2 * pmax + 1.0);
    let c2 = pmax / (n22 * pmax + 1.0);
    let ip = inner_unchecked(&h21.0, &h11.0).norm();
    let perp = (n11 * (1.0 - c2t1)).max(0.0);
    let lam_b = c1 * perp / (c2 * n21 - 2.0 * (c1 * c2).sqrt() * ip + c1 * n11);
    let upper = (1.0 + n22 * pmax) * n11 / ((1.0 + n12 * c2t2 * pmax) * n21);
    let selfish_chain = Chain { lhs: lam_b, mid: c2t1, rhs: upper, lower_strict: true, upper_strict: false };
    let crossing = c2.sqrt() * n21.sqrt() - c1.sqrt() * n11.sqrt() * c2t1.sqrt();
    let selfish = if n21 == 0.0 || n11 == 0.0 || c2t1.is_nan() {
        MrtVerdict::degenerate(s, MrtStrategy::SelfishPair, vec![selfish_chain], "zero channel vector")
    } else if crossing < 0.0 {
        MrtVerdict::degenerate(s, MrtStrategy::SelfishPair, vec![selfish_chain], "D1 and T1 do not cross along W1")
    } else {
        MrtVerdict::from_chains(s, MrtStrategy::SelfishPair, vec![selfish_chain])
    };

    let par = match proj(h21, h11) {
        Ok(p) => p.norm_sqr(),
        Err(_) => f64::NAN,
    };
    let rhs = (1.0 + n22 * pmax) * par / (1.0 + n12 * c2t2 * pmax);
    let chain = Chain::le(n21, rhs);
    let interference = if par.is_nan() {
        // A vanishing cross link leaves nothing to decode: the condition
        // degenerates to 0 <= positive.
        if n21 == 0.0 && n11 > 0.0 {
            MrtVerdict::from_chains(s, MrtStrategy::InterferencePair, vec![Chain::le(0.0, (1.0 + n22 * pmax) * n11)])
        } else {
            MrtVerdict::degenerate(s, MrtStrategy::InterferencePair, vec![chain], "zero channel vector")
        }
    } else {
        MrtVerdict::from_chains(s, MrtStrategy::InterferencePair, vec![chain])
    };
    NdVerdicts { selfish, interference }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DdVerdicts {
    pub selfish_pair: MrtVerdict,
    pub interference_pair: MrtVerdict,
    /// Interference(1), Interference(2), Selfish(1), Selfish(2).
    pub per_user: [MrtVerdict; 4],
}

/// DD checks, evaluated on the effective channels `sqrt(P) h`.
///
/// Per user, with `c_i = cos^2(t_i)` and `g` the partner-dependent received
/// powers:
///
/// * `w_i = unit(h_ji)` (partner on `unit(h_ij)`) is optimal if
///   `||h_ji||^2 / (1 + g_jj) <= ||h_ii||^2 c_i <= g_ij / g_jj - 1`;
/// * `w_i = unit(h_ii)` (partner on `unit(h_jj)`) is optimal if
///   `(1 + g_jj) ||h_ii||^2 <= ||h_ji||^2 c_i`.
///
/// The pair conditions are the two per-user conditions written out:
/// selfish `c1 >= (1 + ||h22||^2) ||h11||^2 / ||h21||^2` and
/// `c2 >= (1 + ||h11||^2) ||h22||^2 / ||h12||^2`; interference
/// `||h12||^2 - ||h22||^2 c2 <= ||h11||^2 ||h22||^2 c1 c2 <=
/// ||h21||^2 ||h22||^2 c2 / (1 + ||h22||^2 c2)` and its mirror.
pub fn dd_mrt_check(ch: &Channel, pmax: f64) -> DdVerdicts {
    let s = DecodingStructure::DD;
    let e = ch.scaled(pmax);
    let n11 = e.h11.norm_sqr();
    let n21 = e.h21.norm_sqr();
    let n22 = e.h22.norm_sqr();
    let n12 = e.h12.norm_sqr();
    let c1 = cos2(&e.h11, &e.h21);
    let c2 = cos2(&e.h22, &e.h12);

    let selfish_pair = MrtVerdict::from_chains(
        s,
        MrtStrategy::SelfishPair,
        vec![Chain::le((1.0 + n22) * n11 / n21, c1), Chain::le((1.0 + n11) * n22 / n12, c2)],
    );
    let two = |l: f64, m: f64, r: f64| Chain { lhs: l, mid: m, rhs: r, lower_strict: false, upper_strict: false };
    let prod = n11 * n22 * c1 * c2;
    let interference_pair = MrtVerdict::from_chains(
        s,
        MrtStrategy::InterferencePair,
        vec![
            two(n12 - n22 * c2, prod, n21 * n22 * c2 / (1.0 + n22 * c2)),
            two(n21 - n11 * c1, prod, n12 * n11 * c1 / (1.0 + n11 * c1)),
        ],
    );

    let per_user_interference = |i: User| {
        let j = i.other();
        let (nii, nji, ci) = match i {
            User::One => (n11, n21, c1),
            User::Two => (n22, n12, c2),
        };
        // Partner beams toward this user's receiver: w_j = unit(h_ij).
        let (njj, nij, cj) = match j {
            User::One => (n11, n21, c1),
            User::Two => (n22, n12, c2),
        };
        let g_jj = njj * cj;
        let g_ij = nij;
        two(nji / (1.0 + g_jj), nii * ci, g_ij / g_jj - 1.0)
    };
    let per_user_selfish = |i: User| {
        let (nii, nji, ci, njj) = match i {
            User::One => (n11, n21, c1, n22),
            User::Two => (n22, n12, c2, n11),
        };
        Chain::le((1.0 + njj) * nii, nji * ci)
    };
    let per_user = [
        MrtVerdict::from_chains(s, MrtStrategy::Interference(User::One), vec![per_user_interference(User::One)]),
        MrtVerdict::from_chains(s, MrtStrategy::Interference(User::Two), vec![per_user_interference(User::Two)]),
        MrtVerdict::from_chains(s, MrtStrategy::Selfish(User::One), vec![per_user_selfish(User::One)]),
        MrtVerdict::from_chains(s, MrtStrategy::Selfish(User::Two), vec![per_user_selfish(User::Two)]),
    ];
    DdVerdicts { selfish_pair, interference_pair, per_user }
}

/// Argmax of a structure's sum rate over its Pareto-family lambda grid at
/// full power, with the family endpoints that identify the MRT strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct GridArgmax {
    pub structure: DecodingStructure,
    pub lambda: [f64; 2],
    pub rate: f64,
    pub step: f64,
    /// Family coordinates of `unit(h11)`, `unit(h22)`.
    pub selfish: [f64; 2],
    /// Family coordinates of `unit(h21)`, and of `unit(h22)` (ND) or
    /// `unit(h12)` (DD).
    pub interference: [f64; 2],
}

impl GridArgmax {
    /// Closer than one grid step in both coordinates: the grid node itself
    /// for an endpoint on the grid, one of the two bracketing nodes otherwise.
    fn within(&self, target: [f64; 2]) -> bool {
        let tol = self.step * (1.0 - 1e-9);
        (self.lambda[0] - target[0]).abs() < tol && (self.lambda[1] - target[1]).abs() < tol
    }

    /// Argmax within one grid step of the selfish pair.
    pub fn is_selfish(&self) -> bool {
        self.within(self.selfish)
    }

    /// Argmax within one grid step of the interference pair.
    pub fn is_interference(&self) -> bool {
        self.within(self.interference)
    }
}

/// Grid argmax for ND (`W_1 x W_2`) or DD (`V_1 x V_2`) at `(P, P)`.
/// Ties go to the first grid point in lambda-major order.
pub fn grid_argmax(s: DecodingStructure, ch: &Channel, pmax: f64, n_lambda: usize) -> Option<GridArgmax> {
    let kind = match s {
        DecodingStructure::ND => FamilyKind::W,
        DecodingStructure::DD => FamilyKind::V,
        _ => return None,
    };
    let f1 = LambdaFamily::new(ch, User::One, kind).ok()?;
    let f2 = LambdaFamily::new(ch, User::Two, kind).ok()?;
    let lams = linspace(0.0, 1.0, n_lambda.max(2));
    let g = |f: &LambdaFamily, u: User| -> Option<Vec<(f64, f64)>> {
        lams.iter().map(|&l| f.w(l).ok().map(|w| unit_gains(ch, u, &w))).collect()
    };
    let u1 = g(&f1, User::One)?;
    let u2 = g(&f2, User::Two)?;
    let mut best = (0usize, 0usize, f64::NEG_INFINITY);
    for (i, a) in u1.iter().enumerate() {
        for (j, b) in u2.iter().enumerate() {
            let z = Gains { g11: a.0 * pmax, g21: a.1 * pmax, g22: b.0 * pmax, g12: b.1 * pmax }.sum_exponent(s);
            if z > best.2 {
                best = (i, j, z);
            }
        }
    }
    let (i, j, _) = best;
    let rate = Gains {
        g11: u1[i].0 * pmax,
        g21: u1[i].1 * pmax,
        g22: u2[j].0 * pmax,
        g12: u2[j].1 * pmax,
    }
    .sum_rate(s);
    let m1 = f1.lambda_mrt(ch);
    let m2 = f2.lambda_mrt(ch);
    let (selfish, interference) = match s {
        DecodingStructure::ND => ([m1, m2], [1.0, m2]),
        _ => ([1.0, 1.0], [m1, m2]),
    };
    Some(GridArgmax {
        structure: s,
        lambda: [lams[i], lams[j]],
        rate,
        step: 1.0 / (lams.len() - 1) as f64,
        selfish,
        interference,
    })
}
