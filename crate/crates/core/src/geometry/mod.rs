//! Convex-geometry kernel: affine hulls, dual-representation polytopes,
//! hyperplane cuts, intersections, scaling, enclosing balls and sphere nets.

mod ball;
mod dd;
mod hull;
mod minkowski;
pub(crate) mod net;
pub(crate) mod polytope;

pub use ball::{min_enclosing_ball, EnclosingBall};
pub use hull::{affine_hull, AffineHull};
pub use minkowski::{minkowski_scaled_sum, MinkowskiReport};
pub use net::{
    net_covering_witness, sandwich_halfspaces, sandwich_polytope, sphere_net, covering_angle,
};
pub use polytope::{cut, intersect, scale, Polytope};

use crate::error::{Error, Result};
use crate::math;
use alloc::vec::Vec;

/// A point in ambient (or hull) coordinates.
pub type Point = Vec<f64>;

/// `{x : normal . x <= offset}` with a unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    /// Builds a halfspace, rescaling so the normal has unit length.
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let n = math::norm(&normal);
        if !(n.is_finite() && offset.is_finite()) {
            return Err(Error::NonFinite);
        }
        if n < 1e-300 {
            return Err(Error::InvalidParameter("zero halfspace normal".into()));
        }
        Ok(Self {
            normal: math::scaled(&normal, 1.0 / n),
            offset: offset / n,
        })
    }

    /// `offset - normal . x`; nonnegative inside.
    #[inline]
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.offset - math::dot(&self.normal, x)
    }

    pub fn flipped(&self) -> Self {
        Self {
            normal: self.normal.iter().map(|x| -x).collect(),
            offset: -self.offset,
        }
    }
}

/// `{x : normal . x = offset}` with a unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Hyperplane {
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let h = Halfspace::new(normal, offset)?;
        Ok(Self {
            normal: h.normal,
            offset: h.offset,
        })
    }

    /// The side `normal . x <= offset`.
    pub fn lower(&self) -> Halfspace {
        Halfspace {
            normal: self.normal.clone(),
            offset: self.offset,
        }
    }

    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        math::dot(&self.normal, x) - self.offset
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter("ball radius must be >= 0".into()));
        }
        check_finite(&center)?;
        Ok(Self { center, radius })
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        math::dist(&self.center, x) <= self.radius + tol
    }
}

pub(crate) fn check_finite(p: &[f64]) -> Result<()> {
    if p.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Validates a nonempty point list with one shared dimension >= 1.
pub(crate) fn check_points(points: &[Point]) -> Result<usize> {
    let first = points.first().ok_or(Error::EmptyInput)?;
    let d = first.len();
    if d == 0 {
        return Err(Error::InvalidParameter("points must have dimension >= 1".into()));
    }
    for p in points {
        if p.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: p.len(),
            });
        }
        check_finite(p)?;
    }
    Ok(d)
}

/// Tolerance scaled to the magnitude of the coordinates involved.
#[inline]
pub(crate) fn scaled_tol(tol: f64, magnitude: f64) -> f64 {
    tol * magnitude.max(1.0)
}
