use super::{check_points, Ball, Point};
use crate::error::Result;
use crate::math;
use alloc::vec::Vec;

/// Smallest enclosing ball together with the indices of the input points
/// on its boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct EnclosingBall {
    pub ball: Ball,
    pub support: Vec<usize>,
}

/// Ball through the support points with center in their affine span.
fn circumball(points: &[Point], support: &[usize]) -> Option<(Point, f64)> {
    let p0 = &points[*support.first()?];
    if support.len() == 1 {
        return Some((p0.clone(), 0.0));
    }
    let vs: Vec<Vec<f64>> = support[1..].iter().map(|&i| math::sub(&points[i], p0)).collect();
    let m = vs.len();
    let mut gram = alloc::vec![alloc::vec![0.0; m]; m];
    let mut rhs = alloc::vec![0.0; m];
    for i in 0..m {
        for j in 0..m {
            gram[i][j] = 2.0 * math::dot(&vs[i], &vs[j]);
        }
        rhs[i] = math::dot(&vs[i], &vs[i]);
    }
    let scale = rhs.iter().fold(0.0f64, |a, &b| a.max(b)).max(1e-300);
    let lam = math::solve(gram, rhs, 1e-12 * scale)?;
    let mut c = p0.clone();
    for (l, v) in lam.iter().zip(&vs) {
        math::axpy(&mut c, *l, v);
    }
    let r2 = math::dot(&math::sub(&c, p0), &math::sub(&c, p0));
    Some((c, r2))
}

struct Welzl<'a> {
    points: &'a [Point],
    order: Vec<usize>,
    support: Vec<usize>,
    limit: usize,
    slack: f64,
}

impl Welzl<'_> {
    fn outside(&self, c: &[f64], r2: f64, i: usize) -> bool {
        let d = math::sub(&self.points[i], c);
        math::dot(&d, &d) > r2 + self.slack
    }

    /// Move-to-front recursion over the first `end` entries of `order`.
    fn run(&mut self, end: usize) -> (Point, f64) {
        let (mut c, mut r2) = match circumball(self.points, &self.support) {
            Some(b) => b,
            None => (self.points[self.order[0]].clone(), 0.0),
        };
        if self.support.len() == self.limit {
            return (c, r2);
        }
        for idx in 0..end {
            let i = self.order[idx];
            if !self.outside(&c, r2, i) {
                continue;
            }
            self.support.push(i);
            let trial = if circumball(self.points, &self.support).is_some() {
                Some(self.run(idx))
            } else {
                None
            };
            self.support.pop();
            match trial {
                Some((nc, nr2)) => {
                    c = nc;
                    r2 = nr2;
                }
                // degenerate support: keep the center, grow to reach the point
                None => r2 = math::dot(&math::sub(&self.points[i], &c), &math::sub(&self.points[i], &c)),
            }
            self.order.remove(idx);
            self.order.insert(0, i);
        }
        (c, r2)
    }
}

/// Smallest ball containing `points`, inflated by `tol`.
pub fn min_enclosing_ball(points: &[Point], tol: f64) -> Result<EnclosingBall> {
    let d = check_points(points)?;
    let mag = math::max_abs(points).max(1.0);
    let mut w = Welzl {
        points,
        order: (0..points.len()).collect(),
        support: Vec::new(),
        limit: d + 1,
        slack: 1e-14 * mag * mag,
    };
    let (c, _) = w.run(points.len());
    let r = points.iter().map(|p| math::dist(p, &c)).fold(0.0, f64::max);
    let support = (0..points.len())
        .filter(|&i| math::dist(&points[i], &c) >= r - tol.max(1e-12 * mag))
        .collect();
    Ok(EnclosingBall {
        ball: Ball { center: c, radius: r + tol },
        support,
    })
}
