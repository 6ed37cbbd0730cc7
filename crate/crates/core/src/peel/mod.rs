//! Staged cap peeling.
//!
//! With `O`, `R` the smallest enclosing ball of `P` and
//! `gamma = rho^2 / (16 R^2)`, stage `s` intersects the remainder with the
//! tangent polytope `D_s` sandwiched between the balls of radii
//! `(1 - (s+1) gamma) R` and `(1 - s gamma) R`, one halfspace at a time, and
//! emits every non-empty cut-off as a piece. The remainder entering stage `s`
//! lies in the ball of radius `(1 - (s-1) gamma) R`, so each cap has height at
//! most `2 gamma R` and chord radius at most `sqrt(4 gamma R^2) = rho / 2`.

mod certify;
pub(crate) mod index;

pub use certify::{certify_peel, distance_diameter_check, DiameterReport, PeelCertificate, PieceReport};

use crate::error::{Error, Result};
use crate::geometry::net::DirectionIndex;
use crate::geometry::polytope::split;
use crate::geometry::{min_enclosing_ball, sandwich_halfspaces, Halfspace, Hyperplane, Point, Polytope};
use crate::math;
use crate::DEFAULT_TOL;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq)]
pub struct PeelParams {
    /// Target radius of every piece.
    pub rho: f64,
    pub tol: f64,
    pub max_stages: usize,
    /// Seed for certification sampling.
    pub seed: u64,
    pub coverage_samples: usize,
    /// Samples drawn from each suffix body during certification.
    pub suffix_samples: usize,
}

impl Default for PeelParams {
    fn default() -> Self {
        Self {
            rho: 1.0,
            tol: DEFAULT_TOL,
            max_stages: 1_000_000,
            seed: 0,
            coverage_samples: 10_000,
            suffix_samples: 1_000,
        }
    }
}

impl PeelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::InvalidParameter("rho must be positive".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter("tol must be positive".into()));
        }
        if self.max_stages == 0 {
            return Err(Error::InvalidParameter("max_stages must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeelPiece {
    pub body: Polytope,
    pub stage: usize,
    /// Ambient cutting hyperplane; the piece is its far side. `None` for the
    /// final remainder.
    pub cut_plane: Option<Hyperplane>,
    pub order_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageRecord {
    pub stage: usize,
    pub inner_radius: f64,
    pub outer_radius: f64,
    /// Halfspaces of the stage's tangent polytope.
    pub halfspaces: usize,
    pub cuts: usize,
}

impl StageRecord {
    /// Distance from the outer sphere of the previous stage to this stage's planes.
    pub fn cap_height(&self, gamma: f64, radius: f64) -> f64 {
        self.outer_radius + gamma * radius - self.inner_radius
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeelDecomposition {
    pub params: PeelParams,
    /// Enclosing-ball center (ambient) and radius of the input.
    pub center: Point,
    pub radius: f64,
    /// Zero when no peeling was needed.
    pub gamma: f64,
    /// `stage_radii[s] = (1 - s gamma) R` for `s = 0..=S`.
    pub stage_radii: Vec<f64>,
    pub stages: Vec<StageRecord>,
    pub pieces: Vec<PeelPiece>,
    /// `remainders[0]` is the input; `remainders[i]` is what is left after
    /// cutting off `pieces[i - 1]`. The last one is the final piece.
    pub remainders: Vec<Polytope>,
}

/// `gamma = rho^2 / (16 R^2)`: cutting the sphere of radius `R` about `O` by a
/// sphere of radius `rho/2` centered on it gives a plane at distance
/// `(1 - 2 gamma) R` from `O`.
pub fn cap_gamma(radius: f64, rho: f64) -> Result<f64> {
    if !(rho > 0.0 && radius > 0.0) || rho > radius {
        return Err(Error::InvalidParameter("need 0 < rho <= R".into()));
    }
    Ok(rho * rho / (16.0 * radius * radius))
}

fn to_ambient(p: &Polytope, h: &Halfspace) -> Hyperplane {
    let normal = p.hull().embed_direction(&h.normal);
    let offset = h.offset + math::dot(&normal, p.hull().base());
    Hyperplane { normal, offset }
}

fn check_radius(body: &Polytope, index: usize, params: &PeelParams) -> Result<()> {
    let r = min_enclosing_ball(&body.ambient_vertices(), 0.0)?.ball.radius;
    let bound = params.rho * (1.0 + params.tol);
    if r > bound {
        return Err(Error::PieceRadius { index, radius: r, bound });
    }
    Ok(())
}

/// Peels `p` into pieces of enclosing radius at most `rho`, each suffix
/// union being one of the recorded remainders.
pub fn peel(p: &Polytope, params: &PeelParams) -> Result<PeelDecomposition> {
    params.validate()?;
    let hull_pts = p.vertices().to_vec();
    let (center_h, radius) = if p.dim() == 0 {
        (Vec::new(), 0.0)
    } else {
        let eb = min_enclosing_ball(&hull_pts, params.tol)?;
        (eb.ball.center, eb.ball.radius)
    };
    let center = p.hull().embed(&center_h);
    let k = p.dim();
    let single = |gamma: f64| PeelDecomposition {
        params: params.clone(),
        center: center.clone(),
        radius,
        gamma,
        stage_radii: alloc::vec![radius],
        stages: Vec::new(),
        pieces: alloc::vec![PeelPiece {
            body: p.clone(),
            stage: 1,
            cut_plane: None,
            order_index: 0,
        }],
        remainders: alloc::vec![p.clone()],
    };
    if radius <= params.rho || k == 0 {
        return Ok(single(0.0));
    }
    let gamma = cap_gamma(radius, params.rho)?;
    let mut pieces = Vec::new();
    let mut remainders = alloc::vec![p.clone()];
    let mut stages = Vec::new();
    let mut stage_radii = alloc::vec![radius];
    let mut rem = p.clone();
    let mut s = 1usize;
    loop {
        if s > params.max_stages {
            return Err(Error::TooManyStages {
                max_stages: params.max_stages,
                gamma,
                radius,
            });
        }
        let sf = s as f64;
        let r_prev = (1.0 - (sf - 1.0) * gamma) * radius;
        let r_out = (1.0 - sf * gamma) * radius;
        let r_in = (1.0 - (sf + 1.0) * gamma) * radius;
        let hs = sandwich_halfspaces(&center_h, r_in, r_out, k)?;
        let dirs: Vec<Point> = hs.iter().map(|h| h.normal.clone()).collect();
        let eps = crate::geometry::scaled_tol(params.tol, rem.magnitude().max(radius));
        // directions that can cut a point at distance t have angle below acos(r_in / t)
        let t_max = r_prev * (1.0 + 1e-9) + eps;
        let reach = libm::acos((r_in / t_max).min(1.0));
        let index = DirectionIndex::new(&dirs, 2.0 * libm::sin(reach / 2.0) + 1e-12);
        let mut todo: BTreeSet<u32> = BTreeSet::new();
        let enqueue = |todo: &mut BTreeSet<u32>, v: &[f64], after: Option<u32>| {
            let y = math::sub(v, &center_h);
            let t = math::norm(&y);
            if t <= r_in - eps {
                return;
            }
            let ids: Vec<u32> = if t > t_max {
                (0..dirs.len() as u32).collect()
            } else {
                let u: Vec<f64> = y.iter().map(|x| x / t).collect();
                index.candidates(&u)
            };
            for g in ids {
                if after.is_some_and(|a| g <= a) {
                    continue;
                }
                if math::dot(&dirs[g as usize], &y) > r_in - eps {
                    todo.insert(g);
                }
            }
        };
        for v in rem.vertices() {
            enqueue(&mut todo, v, None);
        }
        let mut cuts = 0;
        while let Some(g) = todo.pop_first() {
            let h = &hs[g as usize];
            let worst = rem
                .vertices()
                .iter()
                .map(|v| -h.slack(v))
                .fold(f64::NEG_INFINITY, f64::max);
            if worst <= eps {
                continue;
            }
            let (near, far) = split(&rem, h, params.tol);
            let (Some(near), Some(far)) = (near, far) else {
                continue;
            };
            let order_index = pieces.len();
            check_radius(&far, order_index, params)?;
            pieces.push(PeelPiece {
                body: far,
                stage: s,
                cut_plane: Some(to_ambient(p, h)),
                order_index,
            });
            cuts += 1;
            for v in near.vertices() {
                if h.slack(v).abs() <= eps {
                    enqueue(&mut todo, v, Some(g));
                }
            }
            rem = near;
            remainders.push(rem.clone());
        }
        stages.push(StageRecord {
            stage: s,
            inner_radius: r_in,
            outer_radius: r_out,
            halfspaces: hs.len(),
            cuts,
        });
        stage_radii.push(r_out);
        if r_out < params.rho {
            break;
        }
        s += 1;
    }
    let order_index = pieces.len();
    check_radius(&rem, order_index, params)?;
    pieces.push(PeelPiece {
        body: rem,
        stage: s,
        cut_plane: None,
        order_index,
    });
    Ok(PeelDecomposition {
        params: params.clone(),
        center,
        radius,
        gamma,
        stage_radii,
        stages,
        pieces,
        remainders,
    })
}

/// Hex digest of a decomposition (piece geometry, stages and order), stable
/// across runs and platforms.
pub fn decomposition_ref(dec: &PeelDecomposition) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |x: u64| {
        for b in x.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    };
    eat(dec.pieces.len() as u64);
    eat(dec.gamma.to_bits());
    eat(dec.radius.to_bits());
    for piece in &dec.pieces {
        eat(piece.stage as u64);
        eat(piece.order_index as u64);
        if let Some(c) = &piece.cut_plane {
            c.normal.iter().for_each(|x| eat(x.to_bits()));
            eat(c.offset.to_bits());
        }
        for v in piece.body.ambient_vertices() {
            v.iter().for_each(|x| eat(x.to_bits()));
        }
    }
    alloc::format!("{:016x}", crate::rng::splitmix64(h))
}
