//! Brute-force grid oracle, independent of the reduced candidate sets.
//!
//! Each transmitter searches a grid of unit vectors, either the whole
//! two-dimensional subspace `{sqrt(l) a + e^{i phi} sqrt(1 - l) b}` spanned
//! by its direct and cross channels, or (for two antennas) the entire
//! sphere `(cos t, e^{i s} sin t)`, and a power grid on `[0, P]`. Every
//! combination of the two users' grid points is accounted for.
//!
//! Enumerating all pairs directly is far too slow for the default grid, so
//! the search is organized per user as a cloud of `(g_ii, g_ji)` points:
//!
//! * a coordinate that every rate expression treats monotonically lets a
//!   cloud be reduced to its dominance frontier without losing the optimum;
//! * within a subspace grid one coordinate is shared by all phases of a
//!   `(lambda, power)` cell, which permits a second exact reduction;
//! * what remains is searched by branch and bound over boxes of the two
//!   clouds (bounds use the corner of each box that is best for every term).
//!
//! Maximizer ties go to the lowest pair of flat grid indices among the
//! points that survive the reductions.

use crate::channel::{Channel, User};
use crate::linalg::{inner_unchecked, CVec, LinalgError};
use crate::pareto::{linspace, pareto_family_kind, pareto_filter_by, FamilyKind, LambdaFamily, ParetoError};
use crate::rates::{zdd_terms, DecodingStructure, Gains, RatePoint};
use num_complex::Complex64;
use rayon::prelude::*;
use std::cmp::Ordering;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Pareto(#[from] ParetoError),
    #[error("full-sphere search is only implemented for two antennas (got {0})")]
    FullSphereDimension(usize),
    #[error("grid sizes must be at least 1")]
    EmptyGrid,
    #[error("maximum power must be non-negative and finite (got {0})")]
    BadPower(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleScope {
    /// `lambda x phase` grid in `span{h_ii, h_ji}`.
    Subspace,
    /// `theta x phase` grid over the whole unit sphere, two antennas only.
    FullSphere,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    /// Lambda points (subspace) or polar-angle points (full sphere).
    pub n_lambda: usize,
    pub n_phase: usize,
    pub n_power: usize,
    pub scope: OracleScope,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { n_lambda: 201, n_phase: 64, n_power: 21, scope: OracleScope::Subspace }
    }
}

impl GridSpec {
    pub fn subspace(n_lambda: usize, n_phase: usize, n_power: usize) -> Self {
        GridSpec { n_lambda, n_phase, n_power, scope: OracleScope::Subspace }
    }

    pub fn full_sphere(n_theta: usize, n_phase: usize, n_power: usize) -> Self {
        GridSpec { n_lambda: n_theta, n_phase, n_power, scope: OracleScope::FullSphere }
    }

    fn check(&self) -> Result<(), OracleError> {
        if self.n_lambda == 0 || self.n_phase == 0 || self.n_power == 0 {
            return Err(OracleError::EmptyGrid);
        }
        Ok(())
    }
}

/// `k 2 pi / n` for `k = 0..n`; starts at exactly zero.
pub fn phase_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
}

/// One user's direction grid.
#[derive(Debug, Clone)]
pub struct DirectionGrid {
    pub scope: OracleScope,
    /// First coordinate values (lambda or polar angle).
    pub first: Vec<f64>,
    pub phases: Vec<f64>,
    /// Present for `Subspace`.
    pub family: Option<LambdaFamily>,
    pub dirs: Vec<CVec>,
}

impl DirectionGrid {
    /// `(first index, phase index)` of a flat direction index.
    pub fn coords(&self, dir: usize) -> (usize, usize) {
        (dir / self.phases.len(), dir % self.phases.len())
    }
}

/// Subspace grid for `user` in the given basis family, lambda-major.
/// A collapsed family yields a single direction.
pub fn subspace_grid(
    ch: &Channel,
    user: User,
    kind: FamilyKind,
    n_lambda: usize,
    n_phase: usize,
) -> Result<DirectionGrid, OracleError> {
    let fam = LambdaFamily::new(ch, user, kind)?;
    let (first, phases) = if fam.is_collapsed() {
        (vec![1.0], vec![0.0])
    } else {
        (linspace(0.0, 1.0, n_lambda), phase_grid(n_phase))
    };
    let mut dirs = Vec::with_capacity(first.len() * phases.len());
    for &l in &first {
        for &p in &phases {
            dirs.push(fam.w_phase(l, p)?);
        }
    }
    Ok(DirectionGrid { scope: OracleScope::Subspace, first, phases, family: Some(fam), dirs })
}

/// `(cos t, e^{i s} sin t)` for `t` on `[0, pi/2]` and `s` on the phase grid.
pub fn full_sphere_grid(n: usize, n_theta: usize, n_phase: usize) -> Result<DirectionGrid, OracleError> {
    if n != 2 {
        return Err(OracleError::FullSphereDimension(n));
    }
    let first = linspace(0.0, PI / 2.0, n_theta);
    let phases = phase_grid(n_phase);
    let mut dirs = Vec::with_capacity(first.len() * phases.len());
    for &t in &first {
        for &s in &phases {
            dirs.push(CVec(vec![Complex64::new(t.cos(), 0.0), Complex64::from_polar(t.sin(), s)]));
        }
    }
    Ok(DirectionGrid { scope: OracleScope::FullSphere, first, phases, family: None, dirs })
}

/// One grid point of one user: desired power, cross power, flat index
/// `dir * n_power + power`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudPt {
    pub d: f64,
    pub c: f64,
    pub idx: u32,
}

fn build_cloud(ch: &Channel, user: User, grid: &DirectionGrid, powers: &[f64]) -> Vec<CloudPt> {
    let hd = &ch.direct(user).0;
    let hc = &ch.cross(user).0;
    let np = powers.len();
    let mut out = Vec::with_capacity(grid.dirs.len() * np);
    for (k, w) in grid.dirs.iter().enumerate() {
        let d = inner_unchecked(hd, &w.0).norm_sqr();
        let c = inner_unchecked(hc, &w.0).norm_sqr();
        for (j, &p) in powers.iter().enumerate() {
            out.push(CloudPt { d: d * p, c: c * p, idx: (k * np + j) as u32 });
        }
    }
    out
}

/// How an objective responds to one coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotone {
    Inc,
    Dec,
    Mixed,
}

/// One factor of a min-of-terms objective with its monotonicity in
/// `(g11, g21, g22, g12)`.
struct Term {
    f: fn(&Gains) -> f64,
    sign: [i8; 4],
}

fn t_nn(g: &Gains) -> f64 {
    (1.0 + g.g11 / (1.0 + g.g12)) * (1.0 + g.g22 / (1.0 + g.g21))
}
fn t_nd_a(g: &Gains) -> f64 {
    (1.0 + g.g22) * (1.0 + g.g11 / (1.0 + g.g12))
}
fn t_nd_b(g: &Gains) -> f64 {
    1.0 + g.g22 + g.g21
}
fn t_dn_a(g: &Gains) -> f64 {
    (1.0 + g.g11) * (1.0 + g.g22 / (1.0 + g.g21))
}
fn t_dn_b(g: &Gains) -> f64 {
    1.0 + g.g11 + g.g12
}
fn t_dd_1(g: &Gains) -> f64 {
    zdd_terms(g)[0]
}
fn t_dd_2(g: &Gains) -> f64 {
    zdd_terms(g)[1]
}
fn t_dd_3(g: &Gains) -> f64 {
    zdd_terms(g)[2]
}
fn t_dd_4(g: &Gains) -> f64 {
    zdd_terms(g)[3]
}

/// `2^(R1 + R2)` as a minimum of monotone terms.
fn sum_terms(s: DecodingStructure) -> &'static [Term] {
    const NN: [Term; 1] = [Term { f: t_nn, sign: [1, -1, 1, -1] }];
    const ND: [Term; 2] = [Term { f: t_nd_a, sign: [1, 0, 1, -1] }, Term { f: t_nd_b, sign: [0, 1, 1, 0] }];
    const DN: [Term; 2] = [Term { f: t_dn_a, sign: [1, -1, 1, 0] }, Term { f: t_dn_b, sign: [1, 0, 0, 1] }];
    const DD: [Term; 4] = [
        Term { f: t_dd_1, sign: [1, 0, 1, 0] },
        Term { f: t_dd_2, sign: [1, 0, 0, 1] },
        Term { f: t_dd_3, sign: [0, 1, 1, 0] },
        Term { f: t_dd_4, sign: [-1, 1, -1, 1] },
    ];
    match s {
        DecodingStructure::NN => &NN,
        DecodingStructure::ND => &ND,
        DecodingStructure::DN => &DN,
        DecodingStructure::DD => &DD,
    }
}

fn combine(signs: impl Iterator<Item = i8>) -> Monotone {
    let (mut pos, mut neg) = (false, false);
    for s in signs {
        pos |= s > 0;
        neg |= s < 0;
    }
    match (pos, neg) {
        (true, true) => Monotone::Mixed,
        (false, true) => Monotone::Dec,
        _ => Monotone::Inc,
    }
}

/// Monotonicity of the structure's sum rate in `(g_ii, g_ji)` of `user`.
pub fn sum_rate_monotonicity(s: DecodingStructure, user: User) -> (Monotone, Monotone) {
    let (id, ic) = match user {
        User::One => (0, 1),
        User::Two => (2, 3),
    };
    let t = sum_terms(s);
    (combine(t.iter().map(|x| x.sign[id])), combine(t.iter().map(|x| x.sign[ic])))
}

fn oriented(v: f64, m: Monotone) -> f64 {
    if m == Monotone::Dec {
        -v
    } else {
        v
    }
}

/// Keep only points not weakly dominated under the given orientations
/// (both must be monotone). Equal points keep the lowest index.
pub fn dominance_frontier(cloud: &[CloudPt], md: Monotone, mc: Monotone) -> Vec<CloudPt> {
    debug_assert!(md != Monotone::Mixed && mc != Monotone::Mixed);
    let mut pts: Vec<CloudPt> = cloud.to_vec();
    pts.sort_by(|a, b| {
        let (xa, xb) = (oriented(a.d, md), oriented(b.d, md));
        let (ya, yb) = (oriented(a.c, mc), oriented(b.c, mc));
        xb.partial_cmp(&xa)
            .unwrap_or(Ordering::Equal)
            .then(yb.partial_cmp(&ya).unwrap_or(Ordering::Equal))
            .then(a.idx.cmp(&b.idx))
    });
    let mut out = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for p in pts {
        let y = oriented(p.c, mc);
        if y > best {
            best = y;
            out.push(p);
        }
    }
    out
}

/// Within each `(first, power)` cell the phases share `shared` exactly; keep
/// the phase that is best for the other coordinate.
fn cell_reduce(cloud: &[CloudPt], n_phase: usize, n_power: usize, keep_c: Monotone) -> Vec<CloudPt> {
    let cell = |p: &CloudPt| {
        let idx = p.idx as usize;
        let dir = idx / n_power;
        ((dir / n_phase) * n_power + idx % n_power, idx)
    };
    let mut best: std::collections::BTreeMap<usize, CloudPt> = std::collections::BTreeMap::new();
    for p in cloud {
        let (k, _) = cell(p);
        match best.get(&k) {
            Some(q) if !(oriented(p.c, keep_c) > oriented(q.c, keep_c)) => {}
            _ => {
                best.insert(k, *p);
            }
        }
    }
    best.into_values().collect()
}

/// Reduce a user's cloud for an objective with the given monotonicity.
/// `shared` names the coordinate that is constant across phases within a
/// subspace cell, if any.
fn reduce(
    cloud: &[CloudPt],
    mono: (Monotone, Monotone),
    shared: Option<SharedCoord>,
    n_phase: usize,
    n_power: usize,
) -> Vec<CloudPt> {
    match (mono, shared) {
        ((md, mc), _) if md != Monotone::Mixed && mc != Monotone::Mixed => dominance_frontier(cloud, md, mc),
        ((Monotone::Mixed, mc), Some(SharedCoord::Desired)) if mc != Monotone::Mixed => {
            cell_reduce(cloud, n_phase, n_power, mc)
        }
        _ => cloud.to_vec(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SharedCoord {
    /// `V` basis: desired power depends on lambda and power only.
    Desired,
    /// `W` basis: cross power depends on lambda and power only.
    Cross,
}

fn shared_coord(grid: &DirectionGrid) -> Option<SharedCoord> {
    match (&grid.family, grid.scope) {
        (Some(f), OracleScope::Subspace) if !f.is_collapsed() => Some(match f.kind {
            FamilyKind::V => SharedCoord::Desired,
            FamilyKind::W => SharedCoord::Cross,
        }),
        _ => None,
    }
}

#[inline]
fn gains_of(a: &CloudPt, b: &CloudPt) -> Gains {
    Gains { g11: a.d, g21: a.c, g22: b.d, g12: b.c }
}

#[inline]
fn eval(terms: &[Term], g: &Gains) -> f64 {
    let mut z = f64::INFINITY;
    for t in terms {
        z = z.min((t.f)(g));
    }
    z
}

#[derive(Debug, Clone, Copy)]
struct Best {
    z: f64,
    ia: u32,
    ib: u32,
    pa: usize,
    pb: usize,
}

impl Best {
    fn none() -> Self {
        Best { z: f64::NEG_INFINITY, ia: u32::MAX, ib: u32::MAX, pa: usize::MAX, pb: usize::MAX }
    }
    #[inline]
    fn better(&self, z: f64, ia: u32, ib: u32) -> bool {
        z > self.z || (z == self.z && (ia, ib) < (self.ia, self.ib))
    }
    fn merge(self, o: Best) -> Best {
        if self.better(o.z, o.ia, o.ib) {
            o
        } else {
            self
        }
    }
}

fn brute(terms: &[Term], a: &[CloudPt], ai: &[usize], b: &[CloudPt], bi: &[usize], mut best: Best) -> Best {
    for &i in ai {
        let pa = &a[i];
        for &j in bi {
            let pb = &b[j];
            let z = eval(terms, &gains_of(pa, pb));
            if best.better(z, pa.idx, pb.idx) {
                best = Best { z, ia: pa.idx, ib: pb.idx, pa: i, pb: j };
            }
        }
    }
    best
}

#[derive(Debug, Clone)]
struct Tile {
    dlo: f64,
    dhi: f64,
    clo: f64,
    chi: f64,
    members: Vec<usize>,
}

/// Partition a cloud into roughly `k * k` boxes: `k` strips by `d`, each
/// split into `k` boxes by `c`.
fn tiles(cloud: &[CloudPt], k: usize) -> Vec<Tile> {
    let mut order: Vec<usize> = (0..cloud.len()).collect();
    order.sort_by(|&x, &y| cloud[x].d.partial_cmp(&cloud[y].d).unwrap_or(Ordering::Equal));
    let strip = cloud.len().div_ceil(k).max(1);
    let mut out = Vec::new();
    for s in order.chunks(strip) {
        let mut s = s.to_vec();
        s.sort_by(|&x, &y| cloud[x].c.partial_cmp(&cloud[y].c).unwrap_or(Ordering::Equal));
        let bx = s.len().div_ceil(k).max(1);
        for m in s.chunks(bx) {
            let mut t = Tile {
                dlo: f64::INFINITY,
                dhi: f64::NEG_INFINITY,
                clo: f64::INFINITY,
                chi: f64::NEG_INFINITY,
                members: m.to_vec(),
            };
            for &i in m {
                t.dlo = t.dlo.min(cloud[i].d);
                t.dhi = t.dhi.max(cloud[i].d);
                t.clo = t.clo.min(cloud[i].c);
                t.chi = t.chi.max(cloud[i].c);
            }
            out.push(t);
        }
    }
    out
}

fn corner(lo: f64, hi: f64, sign: i8) -> f64 {
    if sign < 0 {
        lo
    } else {
        hi
    }
}

fn upper_bound(terms: &[Term], ta: &Tile, tb: &Tile) -> f64 {
    let mut z = f64::INFINITY;
    for t in terms {
        let g = Gains {
            g11: corner(ta.dlo, ta.dhi, t.sign[0]),
            g21: corner(ta.clo, ta.chi, t.sign[1]),
            g22: corner(tb.dlo, tb.dhi, t.sign[2]),
            g12: corner(tb.clo, tb.chi, t.sign[3]),
        };
        z = z.min((t.f)(&g));
    }
    z
}

const BRUTE_LIMIT: usize = 1 << 21;

/// Exact maximizer of a min-of-monotone-terms objective over `a x b`.
fn maximize(terms: &[Term], a: &[CloudPt], b: &[CloudPt]) -> Best {
    if a.is_empty() || b.is_empty() {
        return Best::none();
    }
    let all_a: Vec<usize> = (0..a.len()).collect();
    if a.len() * b.len() <= BRUTE_LIMIT {
        let all_b: Vec<usize> = (0..b.len()).collect();
        return all_a
            .par_chunks(64)
            .map(|ch| brute(terms, a, ch, b, &all_b, Best::none()))
            .reduce(Best::none, Best::merge);
    }
    let k = |n: usize| ((n as f64).sqrt().sqrt().ceil() as usize).clamp(1, 48);
    let ta = tiles(a, k(a.len()));
    let tb = tiles(b, k(b.len()));
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(ta.len() * tb.len());
    for (i, x) in ta.iter().enumerate() {
        for (j, y) in tb.iter().enumerate() {
            pairs.push((upper_bound(terms, x, y), i, j));
        }
    }
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(Ordering::Equal).then((x.1, x.2).cmp(&(y.1, y.2))));
    let mut best = Best::none();
    let mut cursor = 0;
    while cursor < pairs.len() {
        if pairs[cursor].0 < best.z {
            break;
        }
        // Evaluate a batch of boxes whose bound still beats the incumbent.
        let end = (cursor + rayon::current_num_threads().max(1)).min(pairs.len());
        let found = pairs[cursor..end]
            .par_iter()
            .filter(|p| p.0 >= best.z)
            .map(|&(_, i, j)| brute(terms, a, &ta[i].members, b, &tb[j].members, Best::none()))
            .reduce(Best::none, Best::merge);
        best = best.merge(found);
        cursor = end;
    }
    best
}

/// Location of the oracle maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleArg {
    pub w1: CVec,
    pub w2: CVec,
    pub p1: f64,
    pub p2: f64,
    /// Index into the first grid coordinate (lambda or polar angle).
    pub first_idx: [usize; 2],
    pub phase_idx: [usize; 2],
    pub power_idx: [usize; 2],
    pub first: [f64; 2],
    pub phase: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleMax {
    pub structure: DecodingStructure,
    pub rate: f64,
    pub arg: OracleArg,
}

fn check_pmax(pmax: f64) -> Result<(), OracleError> {
    if !(pmax >= 0.0) || !pmax.is_finite() {
        return Err(OracleError::BadPower(pmax));
    }
    Ok(())
}

/// Direction grids of both users for a structure.
pub fn grids_for(s: DecodingStructure, ch: &Channel, spec: &GridSpec) -> Result<[DirectionGrid; 2], OracleError> {
    spec.check()?;
    Ok(match spec.scope {
        OracleScope::Subspace => {
            let kind = pareto_family_kind(s);
            [
                subspace_grid(ch, User::One, kind, spec.n_lambda, spec.n_phase)?,
                subspace_grid(ch, User::Two, kind, spec.n_lambda, spec.n_phase)?,
            ]
        }
        OracleScope::FullSphere => [
            full_sphere_grid(ch.n(), spec.n_lambda, spec.n_phase)?,
            full_sphere_grid(ch.n(), spec.n_lambda, spec.n_phase)?,
        ],
    })
}

/// Maximum sum rate of one structure over the full grid, powers free on
/// `[0, pmax]` for both users.
pub fn oracle_max(s: DecodingStructure, ch: &Channel, spec: &GridSpec, pmax: f64) -> Result<OracleMax, OracleError> {
    check_pmax(pmax)?;
    let grids = grids_for(s, ch, spec)?;
    let powers = linspace(0.0, pmax, spec.n_power);
    let terms = sum_terms(s);
    let mut clouds = Vec::with_capacity(2);
    for (k, user) in [User::One, User::Two].into_iter().enumerate() {
        let g = &grids[k];
        let cloud = build_cloud(ch, user, g, &powers);
        let mono = sum_rate_monotonicity(s, user);
        clouds.push(reduce(&cloud, mono, shared_coord(g), g.phases.len(), powers.len()));
    }
    let best = maximize(terms, &clouds[0], &clouds[1]);
    let a = clouds[0][best.pa];
    let b = clouds[1][best.pb];
    let rate = gains_of(&a, &b).sum_rate(s);
    let np = powers.len();
    let locate = |g: &DirectionGrid, idx: u32| {
        let idx = idx as usize;
        let dir = idx / np;
        let (fi, pi) = g.coords(dir);
        (g.dirs[dir].clone(), idx % np, fi, pi, g.first[fi], g.phases[pi])
    };
    let (w1, q1, f1, ph1, fv1, pv1) = locate(&grids[0], a.idx);
    let (w2, q2, f2, ph2, fv2, pv2) = locate(&grids[1], b.idx);
    Ok(OracleMax {
        structure: s,
        rate,
        arg: OracleArg {
            w1,
            w2,
            p1: powers[q1],
            p2: powers[q2],
            first_idx: [f1, f2],
            phase_idx: [ph1, ph2],
            power_idx: [q1, q2],
            first: [fv1, fv2],
            phase: [pv1, pv2],
        },
    })
}

/// Exhaustive evaluation of every grid pair without any reduction. Only
/// usable for small grids; exists to cross-check [`oracle_max`].
pub fn oracle_max_naive(s: DecodingStructure, ch: &Channel, spec: &GridSpec, pmax: f64) -> Result<f64, OracleError> {
    check_pmax(pmax)?;
    let grids = grids_for(s, ch, spec)?;
    let powers = linspace(0.0, pmax, spec.n_power);
    let a = build_cloud(ch, User::One, &grids[0], &powers);
    let b = build_cloud(ch, User::Two, &grids[1], &powers);
    let mut best = f64::NEG_INFINITY;
    for x in &a {
        for y in &b {
            best = best.max(gains_of(x, y).sum_rate(s));
        }
    }
    Ok(best)
}

/// Pareto frontier of the rate pairs reachable on the oracle grid.
pub fn oracle_pareto(s: DecodingStructure, ch: &Channel, spec: &GridSpec, pmax: f64) -> Result<Vec<RatePoint>, OracleError> {
    check_pmax(pmax)?;
    match s {
        DecodingStructure::DN => {
            let mut v = oracle_pareto(DecodingStructure::ND, &ch.swap(), spec, pmax)?;
            for p in v.iter_mut() {
                std::mem::swap(&mut p.r1, &mut p.r2);
            }
            Ok(pareto_filter_by(v, |p| *p))
        }
        _ => {
            let grids = grids_for(s, ch, spec)?;
            let powers = linspace(0.0, pmax, spec.n_power);
            let np = powers.len();
            let a = build_cloud(ch, User::One, &grids[0], &powers);
            let b = build_cloud(ch, User::Two, &grids[1], &powers);
            match s {
                DecodingStructure::NN => {
                    // R1 grows with g11 and falls with g12; R2 likewise.
                    let fa = dominance_frontier(&a, Monotone::Inc, Monotone::Dec);
                    let fb = dominance_frontier(&b, Monotone::Inc, Monotone::Dec);
                    Ok(product_frontier(s, &fa, &fb))
                }
                DecodingStructure::ND => {
                    // Tx 1 only helps R1 through both of its powers; for each
                    // Tx-2 point only the best R1 matters.
                    let fa = dominance_frontier(&a, Monotone::Inc, Monotone::Inc);
                    let pts: Vec<RatePoint> = b
                        .par_iter()
                        .map(|y| {
                            let mut r = RatePoint { r1: f64::NEG_INFINITY, r2: 0.0 };
                            for x in &fa {
                                let q = gains_of(x, y).rates(s);
                                if q.r1 > r.r1 {
                                    r = q;
                                }
                            }
                            r
                        })
                        .collect();
                    Ok(pareto_filter_by(pts, |p| *p))
                }
                _ => {
                    // DD: with a shared desired power per cell, the larger
                    // cross power can only help.
                    let reduce_dd = |cloud: &[CloudPt], g: &DirectionGrid| match shared_coord(g) {
                        Some(SharedCoord::Desired) => cell_reduce(cloud, g.phases.len(), np, Monotone::Inc),
                        _ => cloud.to_vec(),
                    };
                    let fa = reduce_dd(&a, &grids[0]);
                    let fb = reduce_dd(&b, &grids[1]);
                    Ok(product_frontier(s, &fa, &fb))
                }
            }
        }
    }
}

fn merge_frontiers(x: Vec<RatePoint>, mut y: Vec<RatePoint>) -> Vec<RatePoint> {
    y.extend(x);
    pareto_filter_by(y, |p| *p)
}

fn product_frontier(s: DecodingStructure, a: &[CloudPt], b: &[CloudPt]) -> Vec<RatePoint> {
    a.par_chunks(32)
        .map(|chunk| {
            let mut front = Vec::new();
            for x in chunk {
                let row: Vec<RatePoint> = b.iter().map(|y| gains_of(x, y).rates(s)).collect();
                front = merge_frontiers(front, pareto_filter_by(row, |p| *p));
            }
            front
        })
        .reduce(Vec::new, merge_frontiers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::gen_iid;

    #[test]
    fn monotonicity_table() {
        use Monotone::*;
        assert_eq!(sum_rate_monotonicity(DecodingStructure::NN, User::One), (Inc, Dec));
        assert_eq!(sum_rate_monotonicity(DecodingStructure::ND, User::One), (Inc, Inc));
        assert_eq!(sum_rate_monotonicity(DecodingStructure::ND, User::Two), (Inc, Dec));
        assert_eq!(sum_rate_monotonicity(DecodingStructure::DD, User::Two), (Mixed, Inc));
    }

    #[test]
    fn reduced_search_matches_exhaustive() {
        let spec = GridSpec::subspace(9, 6, 4);
        for seed in 0..6 {
            let ch = gen_iid(3, seed).unwrap();
            for s in DecodingStructure::ALL {
                let fast = oracle_max(s, &ch, &spec, 2.0).unwrap().rate;
                let slow = oracle_max_naive(s, &ch, &spec, 2.0).unwrap();
                assert!((fast - slow).abs() < 1e-12, "{s} seed {seed}: {fast} vs {slow}");
            }
        }
    }

    #[test]
    fn branch_and_bound_matches_brute_force() {
        // Large enough to take the tiled path.
        let spec = GridSpec::full_sphere(41, 24, 6);
        let ch = gen_iid(2, 11).unwrap();
        for s in DecodingStructure::ALL {
            let fast = oracle_max(s, &ch, &spec, 1.0).unwrap().rate;
            let slow = oracle_max_naive(s, &ch, &spec, 1.0).unwrap();
            assert!((fast - slow).abs() < 1e-12, "{s}: {fast} vs {slow}");
        }
    }

    #[test]
    fn full_sphere_rejects_three_antennas() {
        assert_eq!(full_sphere_grid(3, 4, 4).unwrap_err(), OracleError::FullSphereDimension(3));
    }
}
