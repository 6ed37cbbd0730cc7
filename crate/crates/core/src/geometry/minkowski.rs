use super::polytope::scale;
use super::{scaled_tol, Point, Polytope};
use crate::error::{Error, Result};
use crate::math;
use crate::rng;

/// Evidence that `mu P + lambda P = (mu + lambda) P` on sampled data.
#[derive(Debug, Clone, PartialEq)]
pub struct MinkowskiReport {
    /// Every vertex of the result equals `mu v + lambda v` for a vertex `v` of `P`.
    pub vertices_decompose: bool,
    pub samples: usize,
    pub samples_inside: usize,
    /// First sampled sum found outside the result, if any.
    pub witness: Option<Point>,
    /// Largest `|h_{mu P}(u) + h_{lambda P}(u) - h_{(mu+lambda) P}(u)|` over sampled directions.
    pub support_gap: f64,
}

impl MinkowskiReport {
    pub fn passed(&self) -> bool {
        self.vertices_decompose && self.samples_inside == self.samples
    }
}

fn random_point(vertices: &[Point], r: &mut rng::SeededRng) -> Point {
    let w = rng::simplex_weights(r, vertices.len());
    let mut x = alloc::vec![0.0; vertices[0].len()];
    for (wi, v) in w.iter().zip(vertices) {
        math::axpy(&mut x, *wi, v);
    }
    x
}

/// Returns `(mu + lambda) P` and a report checking the identity on
/// `samples` random sums and directions.
pub fn minkowski_scaled_sum(
    p: &Polytope,
    mu: u64,
    lambda: u64,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<(Polytope, MinkowskiReport)> {
    if mu == 0 || lambda == 0 {
        return Err(Error::InvalidParameter("mu and lambda must be positive".into()));
    }
    let total = (mu + lambda) as f64;
    let sum = scale(p, total)?;
    let verts = p.ambient_vertices();
    let out_verts = sum.ambient_vertices();
    let eps = scaled_tol(tol, math::max_abs(&out_verts));
    let vertices_decompose = out_verts.iter().zip(&verts).all(|(w, v)| {
        let expect = math::add(&math::scaled(v, mu as f64), &math::scaled(v, lambda as f64));
        math::dist(w, &expect) <= eps
    });
    let mu_p = scale(p, mu as f64)?;
    let la_p = scale(p, lambda as f64)?;
    let (mu_v, la_v) = (mu_p.ambient_vertices(), la_p.ambient_vertices());
    let mut r = rng::seeded(seed, 0x6d696e);
    let mut inside = 0;
    let mut witness = None;
    let mut gap = 0.0f64;
    for _ in 0..samples {
        let x = math::add(&random_point(&mu_v, &mut r), &random_point(&la_v, &mut r));
        if sum.contains_point(&x, eps) {
            inside += 1;
        } else if witness.is_none() {
            witness = Some(x);
        }
        let u = rng::unit_vector(&mut r, p.ambient_dim());
        gap = gap.max((mu_p.support(&u) + la_p.support(&u) - sum.support(&u)).abs());
    }
    Ok((
        sum,
        MinkowskiReport {
            vertices_decompose,
            samples,
            samples_inside: inside,
            witness,
            support_gap: gap,
        },
    ))
}
