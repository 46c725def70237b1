//! Small complex vector toolkit: inner products, projections and a
//! closed-form eigensolver for rank-2 Hermitian matrices.
//!
//! Inner products follow the `a^H b` convention: the first argument is
//! conjugated.

use num_complex::Complex64;
use std::ops::{Add, Index, Mul, Sub};

/// Relative threshold below which a vector is treated as zero.
pub const TOL_DEG: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("vectors must have at least two entries (got {0})")]
    TooShort(usize),
    #[error("degenerate direction: vector norm is (numerically) zero")]
    DegenerateDirection,
    #[error("the two spanning vectors are parallel")]
    ParallelChannels,
}

/// Complex column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CVec(pub Vec<Complex64>);

impl CVec {
    pub fn new(entries: Vec<Complex64>) -> Self {
        CVec(entries)
    }

    pub fn zeros(n: usize) -> Self {
        CVec(vec![Complex64::new(0.0, 0.0); n])
    }

    /// Build from `(re, im)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Self {
        CVec(pairs.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
    }

    /// Real vector with zero imaginary parts.
    pub fn from_real(xs: &[f64]) -> Self {
        CVec(xs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: Complex64) -> CVec {
        CVec(self.0.iter().map(|z| z * s).collect())
    }

    pub fn scale_real(&self, s: f64) -> CVec {
        CVec(self.0.iter().map(|z| z * s).collect())
    }

    /// `self + s * other`, dimensions assumed equal.
    pub fn axpy(&self, s: Complex64, other: &CVec) -> CVec {
        CVec(self.0.iter().zip(&other.0).map(|(a, b)| a + s * b).collect())
    }

    pub fn conj(&self) -> CVec {
        CVec(self.0.iter().map(|z| z.conj()).collect())
    }
}

impl Index<usize> for CVec {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl Add for &CVec {
    type Output = CVec;
    fn add(self, rhs: &CVec) -> CVec {
        CVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &CVec {
    type Output = CVec;
    fn sub(self, rhs: &CVec) -> CVec {
        CVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &CVec {
    type Output = CVec;
    fn mul(self, rhs: f64) -> CVec {
        self.scale_real(rhs)
    }
}

fn check_dims(a: &CVec, b: &CVec) -> Result<(), LinalgError> {
    if a.len() != b.len() {
        return Err(LinalgError::DimensionMismatch { left: a.len(), right: b.len() });
    }
    Ok(())
}

/// `a^H b` without a dimension check. Hot loops use this directly.
#[inline]
pub fn inner_unchecked(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        acc += x.conj() * y;
    }
    acc
}

/// `a^H b`.
pub fn inner(a: &CVec, b: &CVec) -> Result<Complex64, LinalgError> {
    check_dims(a, b)?;
    Ok(inner_unchecked(&a.0, &b.0))
}

/// `|a^H b|^2`.
pub fn abs2_inner(a: &CVec, b: &CVec) -> Result<f64, LinalgError> {
    inner(a, b).map(|z| z.norm_sqr())
}

/// Projection of `x` onto the line spanned by `y`.
pub fn proj(y: &CVec, x: &CVec) -> Result<CVec, LinalgError> {
    check_dims(x, y)?;
    let ny = y.norm_sqr();
    if ny.sqrt() <= TOL_DEG {
        return Err(LinalgError::DegenerateDirection);
    }
    let coef = inner_unchecked(&y.0, &x.0) / ny;
    Ok(y.scale(coef))
}

/// Projection of `x` onto the orthogonal complement of `y`.
pub fn proj_orth(y: &CVec, x: &CVec) -> Result<CVec, LinalgError> {
    let p = proj(y, x)?;
    Ok(x - &p)
}

/// `x / ||x||`. Fails when `||x|| <= TOL_DEG * scale`, where `scale` is a
/// reference magnitude (pass 1.0 for an absolute test).
pub fn unit_rel(x: &CVec, scale: f64) -> Result<CVec, LinalgError> {
    let n = x.norm();
    if !(n > TOL_DEG * scale.max(f64::MIN_POSITIVE)) || !n.is_finite() {
        return Err(LinalgError::DegenerateDirection);
    }
    Ok(x.scale_real(1.0 / n))
}

/// `x / ||x||` with an absolute degeneracy threshold.
pub fn unit(x: &CVec) -> Result<CVec, LinalgError> {
    unit_rel(x, 1.0)
}

/// Cosine of the angle between two vectors, `|a^H b| / (||a|| ||b||)`,
/// clamped to `[0, 1]`.
pub fn cos_angle(a: &CVec, b: &CVec) -> Result<f64, LinalgError> {
    check_dims(a, b)?;
    let na = a.norm();
    let nb = b.norm();
    if na <= TOL_DEG || nb <= TOL_DEG {
        return Err(LinalgError::DegenerateDirection);
    }
    Ok((inner_unchecked(&a.0, &b.0).norm() / (na * nb)).min(1.0))
}

/// Eigen-decomposition of `S = alpha x x^H - beta y y^H` restricted to
/// `span{x, y}`. `a` is the positive eigenvalue, `b` the magnitude of the
/// negative one.
#[derive(Debug, Clone, PartialEq)]
pub struct Rank2Eig {
    pub a: f64,
    pub b: f64,
    pub v_a: CVec,
    pub v_b: CVec,
}

/// Closed-form eigenpairs of `alpha x x^H - beta y y^H` for `alpha, beta > 0`
/// and linearly independent `x, y`.
///
/// Works in the orthonormal basis `e1 = x/||x||`, `e2 = unit(y - proj_x y)`,
/// where the operator is a 2x2 Hermitian matrix.
pub fn rank2_herm_eig(alpha: f64, x: &CVec, beta: f64, y: &CVec) -> Result<Rank2Eig, LinalgError> {
    check_dims(x, y)?;
    if x.len() < 2 {
        return Err(LinalgError::TooShort(x.len()));
    }
    let nx = x.norm();
    let ny = y.norm();
    if nx <= TOL_DEG || ny <= TOL_DEG {
        return Err(LinalgError::DegenerateDirection);
    }
    let e1 = x.scale_real(1.0 / nx);
    let yo = proj_orth(&e1, y)?;
    let nyo = yo.norm();
    if nyo <= TOL_DEG * ny {
        return Err(LinalgError::ParallelChannels);
    }
    let e2 = yo.scale_real(1.0 / nyo);

    // Coordinates of x and y in (e1, e2).
    let x1 = nx;
    let y1 = inner_unchecked(&e1.0, &y.0);
    let y2 = nyo;

    // M = alpha [x1^2 0; 0 0] - beta [|y1|^2, y1 y2; conj(y1) y2, y2^2]
    let m11 = alpha * x1 * x1 - beta * y1.norm_sqr();
    let m22 = -beta * y2 * y2;
    let m12 = -beta * y1 * y2; // M[0][1]; M[1][0] = conj

    let tr = m11 + m22;
    let half_diff = 0.5 * (m11 - m22);
    let disc = (half_diff * half_diff + m12.norm_sqr()).sqrt();
    let lam_plus = 0.5 * tr + disc;
    let lam_minus = 0.5 * tr - disc;

    let vec_for = |lam: f64| -> CVec {
        // Pick the better conditioned of the two null-vector forms of M - lam I.
        let (c1, c2) = if (m11 - lam).abs() >= (m22 - lam).abs() {
            (-m12, Complex64::new(m11 - lam, 0.0))
        } else {
            (Complex64::new(m22 - lam, 0.0), -m12.conj())
        };
        let (c1, c2) = if c1.norm_sqr() + c2.norm_sqr() == 0.0 {
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
        } else {
            (c1, c2)
        };
        let nrm = (c1.norm_sqr() + c2.norm_sqr()).sqrt();
        e1.scale(c1 / nrm).axpy(c2 / nrm, &e2)
    };

    // When m12 == 0 the matrix is diagonal: pick eigenvectors directly.
    let (v_a, v_b) = if m12.norm() == 0.0 {
        if m11 >= m22 {
            (e1.clone(), e2.clone())
        } else {
            (e2.clone(), e1.clone())
        }
    } else {
        (vec_for(lam_plus), vec_for(lam_minus))
    };

    Ok(Rank2Eig { a: lam_plus, b: -lam_minus, v_a, v_b })
}

/// Apply `alpha x x^H - beta y y^H` to `v`.
pub fn apply_rank2(alpha: f64, x: &CVec, beta: f64, y: &CVec, v: &CVec) -> CVec {
    let cx = inner_unchecked(&x.0, &v.0) * alpha;
    let cy = inner_unchecked(&y.0, &v.0) * (-beta);
    x.scale(cx).axpy(cy, y)
}
