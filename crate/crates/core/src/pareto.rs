//! Real-combination beamformer families, candidate grids and rate-region
//! sweeps.
//!
//! Each transmitter `i` has two one-parameter families in `span{h_ii, h_ji}`:
//!
//! * `W_i`: basis `(unit(Pi_ji h_ii), unit(Pi_ji^perp h_ii))`. The
//!   interference power along `W_i` is exactly `lambda ||h_ji||^2 p`.
//! * `V_i`: basis `(unit(Pi_ii h_ji), unit(Pi_ii^perp h_ji))`. The desired
//!   power along `V_i` is exactly `lambda ||h_ii||^2 p`.
//!
//! A member is `w(lambda) = sqrt(lambda) a + sqrt(1 - lambda) b`.

use crate::channel::{Channel, User};
use crate::linalg::{inner_unchecked, proj_orth, unit, unit_rel, CVec, LinalgError, TOL_DEG};
use crate::rates::{DecodingStructure, Gains, RatePoint, TxStrategy};
use num_complex::Complex64;
use std::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// Basis aligned with the cross channel `h_ji`.
    W,
    /// Basis aligned with the direct channel `h_ii`.
    V,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaFamily {
    pub kind: FamilyKind,
    pub user: User,
    pub basis_a: CVec,
    /// `None` when `h_ii` and `h_ji` are parallel: the family collapses to
    /// the single direction `basis_a`.
    pub basis_b: Option<CVec>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParetoError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("lambda {0} outside [0, 1]")]
    LambdaOutOfRange(f64),
    #[error("grid sizes must be at least 1")]
    EmptyGrid,
    #[error("maximum power must be non-negative and finite (got {0})")]
    BadPower(f64),
}

/// Unit vector along `along`, rotated so that its inner product with
/// `target` is real and non-negative (`unit(Pi_along target)` when that
/// projection is non-zero).
fn aligned_unit(along: &CVec, target: &CVec) -> Result<CVec, LinalgError> {
    let e = unit(along)?;
    let ip = inner_unchecked(&e.0, &target.0);
    if ip.norm() <= TOL_DEG * target.norm() {
        return Ok(e);
    }
    Ok(e.scale(ip / ip.norm()))
}

impl LambdaFamily {
    /// Build `W_i` or `V_i` for transmitter `user`.
    pub fn new(ch: &Channel, user: User, kind: FamilyKind) -> Result<Self, LinalgError> {
        let hd = ch.direct(user);
        let hc = ch.cross(user);
        let (lead, other) = match kind {
            FamilyKind::W => (hc, hd),
            FamilyKind::V => (hd, hc),
        };
        let a = aligned_unit(lead, other)?;
        let rest = proj_orth(&a, other)?;
        let basis_b = match unit_rel(&rest, other.norm()) {
            Ok(b) => Some(b),
            Err(_) => {
                log::warn!("parallel direct and cross channels for {user:?}; family collapses to one direction");
                None
            }
        };
        let basis_a = match (kind, &basis_b) {
            // W collapses onto the direct channel itself.
            (FamilyKind::W, None) => unit(hd)?,
            _ => a,
        };
        Ok(LambdaFamily { kind, user, basis_a, basis_b })
    }

    pub fn is_collapsed(&self) -> bool {
        self.basis_b.is_none()
    }

    /// `sqrt(lambda) a + sqrt(1 - lambda) b`.
    pub fn w(&self, lambda: f64) -> Result<CVec, ParetoError> {
        self.w_phase(lambda, 0.0)
    }

    /// `sqrt(lambda) a + e^{i phi} sqrt(1 - lambda) b`.
    pub fn w_phase(&self, lambda: f64, phi: f64) -> Result<CVec, ParetoError> {
        if !(-1e-12..=1.0 + 1e-12).contains(&lambda) || lambda.is_nan() {
            return Err(ParetoError::LambdaOutOfRange(lambda));
        }
        let l = lambda.clamp(0.0, 1.0);
        Ok(match &self.basis_b {
            None => self.basis_a.clone(),
            Some(b) => self
                .basis_a
                .scale_real(l.sqrt())
                .axpy(Complex64::from_polar((1.0 - l).sqrt(), phi), b),
        })
    }

    /// `|a^H w|^2`, the family coordinate of an arbitrary direction.
    pub fn lambda_of(&self, w: &CVec) -> f64 {
        inner_unchecked(&self.basis_a.0, &w.0).norm_sqr() / w.norm_sqr()
    }

    /// The member that matches the family's non-leading channel: `h_ii`
    /// for `W`, `h_ji` for `V`. Equals `cos^2` of the channel angle.
    pub fn lambda_mrt(&self, ch: &Channel) -> f64 {
        if self.is_collapsed() {
            return 1.0;
        }
        let target = match self.kind {
            FamilyKind::W => ch.direct(self.user),
            FamilyKind::V => ch.cross(self.user),
        };
        self.lambda_of(target).clamp(0.0, 1.0)
    }
}

/// Build family `kind` for transmitter `user`; convenience wrapper.
pub fn family(ch: &Channel, user: User, kind: FamilyKind) -> Result<LambdaFamily, LinalgError> {
    LambdaFamily::new(ch, user, kind)
}

pub fn w_from_lambda(fam: &LambdaFamily, lambda: f64) -> Result<CVec, ParetoError> {
    fam.w(lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSizes {
    pub n_lambda: usize,
    pub n_power: usize,
}

impl Default for GridSizes {
    fn default() -> Self {
        GridSizes { n_lambda: 201, n_power: 21 }
    }
}

/// `n` equally spaced points on `[lo, hi]`, endpoints included. A single
/// point sits at `hi`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![hi],
        _ => (0..n)
            .map(|k| if k == n - 1 { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 })
            .collect(),
    }
}

/// A fully specified strategy together with where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateTuple {
    pub structure: DecodingStructure,
    pub w1: CVec,
    pub w2: CVec,
    pub p1: f64,
    pub p2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl CandidateTuple {
    pub fn tx(&self) -> TxStrategy {
        TxStrategy { w1: self.w1.clone(), w2: self.w2.clone(), p1: self.p1, p2: self.p2 }
    }
}

/// One evaluated region-sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub lambda1: f64,
    pub lambda2: f64,
    pub p1: f64,
    pub p2: f64,
    pub rate: RatePoint,
}

/// Family kind whose real combinations trace the Pareto boundary of a
/// structure's region.
pub fn pareto_family_kind(s: DecodingStructure) -> FamilyKind {
    match s {
        DecodingStructure::DD => FamilyKind::V,
        _ => FamilyKind::W,
    }
}

/// Grid description of a structure's candidate set.
#[derive(Debug, Clone)]
pub struct RegionGrid {
    pub structure: DecodingStructure,
    pub fam1: LambdaFamily,
    pub fam2: LambdaFamily,
    pub lambdas1: Vec<f64>,
    pub lambdas2: Vec<f64>,
    pub powers1: Vec<f64>,
    pub powers2: Vec<f64>,
}

fn check_inputs(pmax: f64, grids: GridSizes) -> Result<(), ParetoError> {
    if !(pmax >= 0.0) || !pmax.is_finite() {
        return Err(ParetoError::BadPower(pmax));
    }
    if grids.n_lambda == 0 || grids.n_power == 0 {
        return Err(ParetoError::EmptyGrid);
    }
    Ok(())
}

impl RegionGrid {
    pub fn new(s: DecodingStructure, ch: &Channel, pmax: f64, grids: GridSizes) -> Result<Self, ParetoError> {
        check_inputs(pmax, grids)?;
        let kind = pareto_family_kind(s);
        let fam1 = LambdaFamily::new(ch, User::One, kind)?;
        let fam2 = LambdaFamily::new(ch, User::Two, kind)?;
        let lam = |f: &LambdaFamily| if f.is_collapsed() { vec![1.0] } else { linspace(0.0, 1.0, grids.n_lambda) };
        let full = vec![pmax];
        let grid = linspace(0.0, pmax, grids.n_power);
        let (powers1, powers2) = match s {
            DecodingStructure::NN => (full.clone(), full),
            DecodingStructure::ND => (full, grid),
            DecodingStructure::DN => (grid, full),
            DecodingStructure::DD => (grid.clone(), grid),
        };
        Ok(RegionGrid { structure: s, lambdas1: lam(&fam1), lambdas2: lam(&fam2), fam1, fam2, powers1, powers2 })
    }

    pub fn len(&self) -> usize {
        self.lambdas1.len() * self.lambdas2.len() * self.powers1.len() * self.powers2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unit-power `(|h_ii^H w|^2, |h_ji^H w|^2)` for each grid member of a user.
    fn unit_gains(&self, ch: &Channel, user: User) -> Result<Vec<(f64, f64)>, ParetoError> {
        let (fam, lams) = match user {
            User::One => (&self.fam1, &self.lambdas1),
            User::Two => (&self.fam2, &self.lambdas2),
        };
        lams.iter()
            .map(|&l| {
                let w = fam.w(l)?;
                Ok((
                    inner_unchecked(&ch.direct(user).0, &w.0).norm_sqr(),
                    inner_unchecked(&ch.cross(user).0, &w.0).norm_sqr(),
                ))
            })
            .collect()
    }

    /// Visit every grid point in order (`lambda1`, `lambda2`, `p1`, `p2`
    /// nested, first outermost). The callback receives the index of
    /// `lambda1` so callers can chunk.
    pub fn for_each<F: FnMut(usize, SweepPoint)>(&self, ch: &Channel, mut f: F) -> Result<(), ParetoError> {
        let u1 = self.unit_gains(ch, User::One)?;
        let u2 = self.unit_gains(ch, User::Two)?;
        for (i1, (&l1, &(d1, c1))) in self.lambdas1.iter().zip(&u1).enumerate() {
            for (&l2, &(d2, c2)) in self.lambdas2.iter().zip(&u2) {
                for &p1 in &self.powers1 {
                    for &p2 in &self.powers2 {
                        let g = Gains { g11: d1 * p1, g21: c1 * p1, g22: d2 * p2, g12: c2 * p2 };
                        f(i1, SweepPoint { lambda1: l1, lambda2: l2, p1, p2, rate: g.rates(self.structure) });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Materialize the candidate grid of a structure (same order as the sweep).
pub fn candidate_grid(
    s: DecodingStructure,
    ch: &Channel,
    pmax: f64,
    grids: GridSizes,
) -> Result<Vec<CandidateTuple>, ParetoError> {
    let g = RegionGrid::new(s, ch, pmax, grids)?;
    let w1s: Vec<CVec> = g.lambdas1.iter().map(|&l| g.fam1.w(l)).collect::<Result<_, _>>()?;
    let w2s: Vec<CVec> = g.lambdas2.iter().map(|&l| g.fam2.w(l)).collect::<Result<_, _>>()?;
    let mut out = Vec::with_capacity(g.len());
    for (w1, &l1) in w1s.iter().zip(&g.lambdas1) {
        for (w2, &l2) in w2s.iter().zip(&g.lambdas2) {
            for &p1 in &g.powers1 {
                for &p2 in &g.powers2 {
                    out.push(CandidateTuple {
                        structure: s,
                        w1: w1.clone(),
                        w2: w2.clone(),
                        p1,
                        p2,
                        lambda1: l1,
                        lambda2: l2,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Every evaluated grid point with its provenance.
pub fn region_sweep_detailed(
    s: DecodingStructure,
    ch: &Channel,
    pmax: f64,
    grids: GridSizes,
) -> Result<Vec<SweepPoint>, ParetoError> {
    let g = RegionGrid::new(s, ch, pmax, grids)?;
    let mut out = Vec::with_capacity(g.len());
    g.for_each(ch, |_, p| out.push(p))?;
    Ok(out)
}

/// Rate pairs of every grid point, in grid order.
pub fn region_sweep(
    s: DecodingStructure,
    ch: &Channel,
    pmax: f64,
    grids: GridSizes,
) -> Result<Vec<RatePoint>, ParetoError> {
    Ok(region_sweep_detailed(s, ch, pmax, grids)?.into_iter().map(|p| p.rate).collect())
}

/// Pareto frontier of the region sweep, computed without holding every
/// point in memory.
pub fn region_frontier(
    s: DecodingStructure,
    ch: &Channel,
    pmax: f64,
    grids: GridSizes,
) -> Result<Vec<SweepPoint>, ParetoError> {
    let g = RegionGrid::new(s, ch, pmax, grids)?;
    let mut front: Vec<SweepPoint> = Vec::new();
    let mut chunk: Vec<SweepPoint> = Vec::new();
    let mut current = 0usize;
    g.for_each(ch, |i1, p| {
        if i1 != current {
            chunk.append(&mut front);
            front = pareto_filter_by(std::mem::take(&mut chunk), |q| q.rate);
            current = i1;
        }
        chunk.push(p);
    })?;
    chunk.append(&mut front);
    Ok(pareto_filter_by(chunk, |q| q.rate))
}

fn cmp_desc(a: f64, b: f64) -> Ordering {
    b.partial_cmp(&a).unwrap_or(Ordering::Equal)
}

/// Non-dominated subset, sorted by ascending `r1`. A point is dropped when
/// another one is at least as good in both coordinates; of several equal
/// points the earliest survives. NaN points are discarded.
pub fn pareto_filter_by<T, F: Fn(&T) -> RatePoint>(points: Vec<T>, key: F) -> Vec<T> {
    let mut idx: Vec<(usize, T)> =
        points.into_iter().enumerate().filter(|(_, p)| !key(p).r1.is_nan() && !key(p).r2.is_nan()).collect();
    idx.sort_by(|(ia, a), (ib, b)| {
        let (ka, kb) = (key(a), key(b));
        cmp_desc(ka.r1, kb.r1).then(cmp_desc(ka.r2, kb.r2)).then(ia.cmp(ib))
    });
    let mut out = Vec::new();
    let mut best_r2 = f64::NEG_INFINITY;
    for (_, p) in idx {
        let r2 = key(&p).r2;
        if r2 > best_r2 {
            best_r2 = r2;
            out.push(p);
        }
    }
    out.reverse();
    out
}

pub fn pareto_filter(points: &[RatePoint]) -> Vec<RatePoint> {
    pareto_filter_by(points.to_vec(), |p| *p)
}

/// Points `(g_ii, g_ji)` of user `user` along its `W` family over the
/// lambda and power grids, outer loop over lambda.
pub fn power_region_boundary(
    ch: &Channel,
    user: User,
    pmax: f64,
    grids: GridSizes,
) -> Result<Vec<(f64, f64)>, ParetoError> {
    check_inputs(pmax, grids)?;
    let fam = LambdaFamily::new(ch, user, FamilyKind::W)?;
    let mut out = Vec::new();
    for l in linspace(0.0, 1.0, grids.n_lambda) {
        let w = fam.w(l)?;
        let d = inner_unchecked(&ch.direct(user).0, &w.0).norm_sqr();
        let c = inner_unchecked(&ch.cross(user).0, &w.0).norm_sqr();
        for p in linspace(0.0, pmax, grids.n_power) {
            out.push((d * p, c * p));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_drops_dominated_duplicates() {
        let pts = [RatePoint { r1: 1.0, r2: 2.0 }, RatePoint { r1: 1.0, r2: 1.0 }];
        assert_eq!(pareto_filter(&pts), vec![RatePoint { r1: 1.0, r2: 2.0 }]);
    }

    #[test]
    fn filter_keeps_incomparable() {
        let pts = [RatePoint { r1: 1.0, r2: 1.0 }, RatePoint { r1: 2.0, r2: 0.0 }, RatePoint { r1: 0.0, r2: 2.0 }];
        assert_eq!(pareto_filter(&pts).len(), 3);
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(0.0, 1.0, 5);
        assert_eq!(v, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(linspace(0.0, 2.0, 1), vec![2.0]);
    }
}
