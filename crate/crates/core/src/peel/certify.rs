use super::index::PieceIndex;
use super::{PeelDecomposition, PeelParams, PeelPiece};
use crate::error::{Error, Result};
use crate::geometry::{min_enclosing_ball, scale, scaled_tol, Point, Polytope};
use crate::math;
use crate::rng::{self, SeededRng};
use alloc::collections::BTreeSet;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq)]
pub struct PieceReport {
    pub index: usize,
    pub stage: usize,
    pub radius: f64,
    pub radius_ok: bool,
    /// The suffix starting at this piece passed both convexity checks.
    pub suffix_ok: bool,
    pub witness: Option<Point>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeelCertificate {
    pub covers: bool,
    pub samples: usize,
    pub covered: usize,
    pub coverage_witness: Option<Point>,
    pub piece_radii_ok: bool,
    pub max_radius: f64,
    pub suffix_convex_ok: bool,
    /// Suffix index and offending point of the first convexity failure.
    pub suffix_witness: Option<(usize, Point)>,
    pub per_piece: Vec<PieceReport>,
}

impl PeelCertificate {
    pub fn passed(&self) -> bool {
        self.covers && self.piece_radii_ok && self.suffix_convex_ok
    }
}

/// Grid cell for the piece index: pieces are at most `2 rho` across, finer
/// cells in low dimension keep buckets short without exploding cell counts.
fn grid_cell(rho: f64, dim: usize) -> f64 {
    match dim {
        0..=3 => rho / 8.0,
        4 => rho / 4.0,
        _ => rho / 2.0,
    }
}

/// Uniform point of `p` by rejection in its hull bounding box (ambient
/// coordinates). Falls back to a random convex combination of vertices when
/// the acceptance rate is hopeless.
pub(crate) fn sample_in(p: &Polytope, r: &mut SeededRng) -> Point {
    if p.dim() == 0 {
        return p.hull().base().to_vec();
    }
    let (lo, hi) = p.hull_bounds();
    for _ in 0..10_000 {
        let y: Vec<f64> = lo.iter().zip(&hi).map(|(&a, &b)| rng::uniform(r, a, b)).collect();
        if p.contains_hull_point(&y, 0.0) {
            return p.hull().embed(&y);
        }
    }
    let verts = p.ambient_vertices();
    let w = rng::simplex_weights(r, verts.len());
    let mut x = alloc::vec![0.0; p.ambient_dim()];
    for (wi, v) in w.iter().zip(&verts) {
        math::axpy(&mut x, *wi, v);
    }
    x
}

fn first_outside(inner: &Polytope, outer: &Polytope, tol: f64) -> Option<Point> {
    inner.ambient_vertices().into_iter().find(|v| !outer.contains_point(v, tol))
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

/// Like [`first_outside`], but vertices shared verbatim with `outer` count as
/// members without a facet test.
fn first_new_outside(inner: &Polytope, outer: &Polytope, tol: f64) -> Option<Point> {
    let known: BTreeSet<Vec<u64>> = outer.ambient_vertices().iter().map(|v| bits(v)).collect();
    inner
        .ambient_vertices()
        .into_iter()
        .find(|v| !known.contains(&bits(v)) && !outer.contains_point(v, tol))
}

/// Draws `samples` uniform points of `s` and returns one that no piece of
/// index `>= nu` contains. When `chain` holds, every such piece lies in `s`,
/// so a box sample caught by a piece is a valid member and needs no facet test.
fn sample_suffix(
    s: &Polytope,
    nu: usize,
    chain: bool,
    samples: usize,
    r: &mut SeededRng,
    find: &dyn Fn(&[f64], usize) -> Option<usize>,
) -> Option<Point> {
    if s.dim() == 0 || !chain {
        for _ in 0..samples {
            let x = sample_in(s, r);
            if find(&x, nu).is_none() {
                return Some(x);
            }
        }
        return None;
    }
    let (lo, hi) = s.hull_bounds();
    // draw from the enclosing ball (clipped to the box) instead of the box
    let ball = min_enclosing_ball(s.vertices(), 0.0).ok()?.ball;
    let k = lo.len();
    let identity = s.hull().is_identity();
    let mut y = alloc::vec![0.0; lo.len()];
    let mut accepted = 0;
    let mut tries = 0usize;
    while accepted < samples {
        tries += 1;
        if tries > samples * 10_000 {
            break;
        }
        let u = rng::unit_vector(r, k);
        let t = ball.radius * libm::pow(rng::uniform(r, 0.0, 1.0), 1.0 / k as f64);
        for i in 0..k {
            y[i] = ball.center[i] + t * u[i];
        }
        if y.iter().zip(lo.iter().zip(&hi)).any(|(v, (a, b))| v < a || v > b) {
            continue;
        }
        let hit = if identity {
            find(&y, nu).is_some()
        } else {
            find(&s.hull().embed(&y), nu).is_some()
        };
        if hit {
            accepted += 1;
        } else if s.contains_hull_point(&y, 0.0) {
            return Some(s.hull().embed(&y));
        }
    }
    None
}

/// Independent check of a decomposition: sampled coverage of `p`, piece
/// radii, and convexity of every suffix union.
///
/// The suffix union from piece `nu` on is certified against the recorded
/// remainder `S_nu`: the piece and the next remainder must lie in `S_nu`
/// (which by induction puts every later piece inside it), and sampled points
/// of `S_nu` must each fall in some piece of index at least `nu`.
pub fn certify_peel(p: &Polytope, dec: &PeelDecomposition, params: &PeelParams) -> Result<PeelCertificate> {
    params.validate()?;
    if dec.pieces.is_empty() || dec.remainders.is_empty() {
        return Err(Error::Mismatch("decomposition has no pieces".into()));
    }
    if dec.remainders[0].ambient_dim() != p.ambient_dim() {
        return Err(Error::Mismatch("ambient dimensions differ".into()));
    }
    let eps = scaled_tol(params.tol, math::max_abs(&p.ambient_vertices()));
    if !dec.remainders[0].same_vertices(p, eps) {
        return Err(Error::Mismatch("first remainder is not the input polytope".into()));
    }
    let bodies: Vec<&Polytope> = dec.pieces.iter().map(|pc| &pc.body).collect();
    let index = PieceIndex::new(&bodies, grid_cell(params.rho, p.ambient_dim()), eps);
    let find = |x: &[f64], from: usize| index.first(x, from, |i| bodies[i].contains_point(x, eps));

    let mut r = rng::seeded(params.seed, 1);
    let mut covered = 0;
    let mut coverage_witness = None;
    for _ in 0..params.coverage_samples {
        let x = sample_in(p, &mut r);
        if find(&x, 0).is_some() {
            covered += 1;
        } else if coverage_witness.is_none() {
            coverage_witness = Some(x);
        }
    }

    let bound = params.rho * (1.0 + params.tol);
    let mu = dec.pieces.len();
    // vertex containment: K_nu and S_{nu+1} inside S_nu
    let mut witnesses: Vec<Option<Point>> = Vec::with_capacity(mu);
    for (nu, piece) in dec.pieces.iter().enumerate() {
        let w = match dec.remainders.get(nu) {
            None => Some(piece.body.ambient_vertices()[0].clone()),
            Some(s) => first_outside(&piece.body, s, eps).or_else(|| {
                dec.remainders
                    .get(nu + 1)
                    .and_then(|next| first_new_outside(next, s, eps))
            }),
        };
        witnesses.push(w);
    }
    // chain_ok[nu]: every later piece is known to lie in S_nu
    let mut chain_ok = alloc::vec![false; mu + 1];
    chain_ok[mu] = true;
    for nu in (0..mu).rev() {
        chain_ok[nu] = chain_ok[nu + 1] && witnesses[nu].is_none();
    }
    let mut per_piece = Vec::with_capacity(mu);
    let mut max_radius = 0.0f64;
    let mut suffix_witness = None;
    let mut r = rng::seeded(params.seed, 2);
    for (nu, piece) in dec.pieces.iter().enumerate() {
        let radius = min_enclosing_ball(&piece.body.ambient_vertices(), 0.0)?.ball.radius;
        max_radius = max_radius.max(radius);
        let mut witness = witnesses[nu].take();
        if witness.is_none() {
            let s = &dec.remainders[nu];
            witness = sample_suffix(s, nu, chain_ok[nu], params.suffix_samples, &mut r, &find);
        }
        if suffix_witness.is_none() {
            if let Some(w) = &witness {
                suffix_witness = Some((nu, w.clone()));
            }
        }
        per_piece.push(PieceReport {
            index: nu,
            stage: piece.stage,
            radius,
            radius_ok: radius <= bound,
            suffix_ok: witness.is_none(),
            witness,
        });
    }
    Ok(PeelCertificate {
        covers: covered == params.coverage_samples,
        samples: params.coverage_samples,
        covered,
        coverage_witness,
        piece_radii_ok: per_piece.iter().all(|p| p.radius_ok),
        max_radius,
        suffix_convex_ok: suffix_witness.is_none(),
        suffix_witness,
        per_piece,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiameterReport {
    pub max_l2: f64,
    pub max_l1: f64,
    pub bound_l2: f64,
    pub bound_l1: f64,
}

impl DiameterReport {
    pub fn passed(&self) -> bool {
        self.max_l2 <= self.bound_l2 && self.max_l1 <= self.bound_l1
    }
}

/// Pairwise vertex distances of `ell * piece` against `2 ell rho` (l2) and
/// `2 n ell rho` (l1), both relaxed by `1 + tol`.
pub fn distance_diameter_check(piece: &PeelPiece, ell: u64, n: usize, rho: f64, tol: f64) -> Result<DiameterReport> {
    if ell == 0 {
        return Err(Error::InvalidParameter("ell must be at least 1".into()));
    }
    let verts = scale(&piece.body, ell as f64)?.ambient_vertices();
    let (mut l2, mut l1) = (0.0f64, 0.0f64);
    for (i, v) in verts.iter().enumerate() {
        for w in &verts[i + 1..] {
            l2 = l2.max(math::dist(v, w));
            l1 = l1.max(math::dist_l1(v, w));
        }
    }
    let l = ell as f64;
    Ok(DiameterReport {
        max_l2: l2,
        max_l1: l1,
        bound_l2: 2.0 * l * rho * (1.0 + tol),
        bound_l1: 2.0 * n as f64 * l * rho * (1.0 + tol),
    })
}
