use super::{check_points, scaled_tol, Point};
use crate::error::Result;
use crate::math;
use alloc::vec::Vec;

/// Affine subspace spanned by a point set, with an orthonormal basis.
///
/// Hull coordinates `y` map to ambient coordinates `base + sum y_i basis_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineHull {
    base: Point,
    basis: Vec<Vec<f64>>,
    identity: bool,
}

fn is_identity_frame(base: &[f64], basis: &[Vec<f64>]) -> bool {
    basis.len() == base.len()
        && base.iter().all(|&x| x == 0.0)
        && basis
            .iter()
            .enumerate()
            .all(|(i, b)| b.iter().enumerate().all(|(j, &x)| x == if i == j { 1.0 } else { 0.0 }))
}

impl AffineHull {
    /// The whole of `R^d` with the identity frame.
    pub fn ambient(d: usize) -> Self {
        let basis = (0..d)
            .map(|i| {
                let mut e = alloc::vec![0.0; d];
                e[i] = 1.0;
                e
            })
            .collect();
        Self {
            base: alloc::vec![0.0; d],
            basis,
            identity: true,
        }
    }

    pub fn from_parts(base: Point, basis: Vec<Vec<f64>>) -> Self {
        let identity = is_identity_frame(&base, &basis);
        Self { base, basis, identity }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// True when the hull is `R^d` in the identity frame (coordinates coincide).
    pub fn is_identity(&self) -> bool {
        self.identity
    }

    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        if self.is_identity() {
            return x.to_vec();
        }
        let c = math::sub(x, &self.base);
        self.basis.iter().map(|b| math::dot(b, &c)).collect()
    }

    pub fn embed(&self, y: &[f64]) -> Vec<f64> {
        if self.is_identity() {
            return y.to_vec();
        }
        let mut x = self.base.clone();
        for (b, &yi) in self.basis.iter().zip(y) {
            math::axpy(&mut x, yi, b);
        }
        x
    }

    /// Maps an ambient direction into hull coordinates (drops the normal part).
    pub fn project_direction(&self, v: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|b| math::dot(b, v)).collect()
    }

    pub fn embed_direction(&self, w: &[f64]) -> Vec<f64> {
        let mut x = alloc::vec![0.0; self.ambient_dim()];
        for (b, &wi) in self.basis.iter().zip(w) {
            math::axpy(&mut x, wi, b);
        }
        x
    }

    /// Euclidean distance from `x` to the hull.
    pub fn residual(&self, x: &[f64]) -> f64 {
        math::dist(x, &self.embed(&self.project(x)))
    }

    /// Hull of `lambda * S` given this is the hull of `S`.
    pub fn scaled(&self, lambda: f64) -> Self {
        if self.is_identity() {
            return self.clone();
        }
        Self::from_parts(math::scaled(&self.base, lambda), self.basis.clone())
    }
}

/// Affine hull of a nonempty point set. Full-rank sets get the identity frame.
pub fn affine_hull(points: &[Point], tol: f64) -> Result<AffineHull> {
    let d = check_points(points)?;
    let base = points[0].clone();
    let centered: Vec<Vec<f64>> = points.iter().map(|p| math::sub(p, &base)).collect();
    let eps = scaled_tol(tol, math::max_abs(points));
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut residuals = centered.clone();
    while basis.len() < d {
        let (idx, best) = residuals
            .iter()
            .enumerate()
            .map(|(i, r)| (i, math::norm(r)))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= eps {
            break;
        }
        let mut v = residuals[idx].clone();
        // re-orthogonalize against the full basis for stability
        for b in &basis {
            let c = math::dot(&v, b);
            math::axpy(&mut v, -c, b);
        }
        let n = math::norm(&v);
        if n <= eps {
            break;
        }
        let v = math::scaled(&v, 1.0 / n);
        for r in residuals.iter_mut() {
            let c = math::dot(r, &v);
            math::axpy(r, -c, &v);
        }
        basis.push(v);
    }
    if basis.len() == d {
        return Ok(AffineHull::ambient(d));
    }
    Ok(AffineHull::from_parts(base, basis))
}
