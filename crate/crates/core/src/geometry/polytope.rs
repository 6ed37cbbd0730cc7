use super::dd::{adjacent_pairs, insert_sorted, Cone};
use super::hull::{affine_hull, AffineHull};
use super::{check_points, scaled_tol, Ball, Halfspace, Hyperplane, Point};
use crate::error::{Error, Result};
use crate::math;
use alloc::vec::Vec;

/// Bounded convex polytope kept in both representations.
///
/// Vertices and facets live in the coordinates of `hull`, in which the
/// polytope is full-dimensional. `incidence[f]` lists the vertices on facet
/// `f` in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    hull: AffineHull,
    vertices: Vec<Point>,
    facets: Vec<Halfspace>,
    incidence: Vec<Vec<usize>>,
}

impl Polytope {
    /// Convex hull of a finite point set. Interior and duplicate points are dropped.
    pub fn from_vertices(points: &[Point], tol: f64) -> Result<Self> {
        check_points(points)?;
        let hull = affine_hull(points, tol)?;
        let projected: Vec<Point> = points.iter().map(|p| hull.project(p)).collect();
        Ok(from_hull_points(hull, projected, tol))
    }

    /// Vertex enumeration of the bounded system `halfspaces` (given in `hull`
    /// coordinates). The result may live in a smaller hull when the system
    /// forces equalities.
    pub fn from_halfspaces(halfspaces: &[Halfspace], hull: AffineHull, tol: f64) -> Result<Self> {
        let k = hull.dim();
        if halfspaces.is_empty() {
            return Err(Error::EmptySystem);
        }
        for h in halfspaces {
            if h.normal.len() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    found: h.normal.len(),
                });
            }
            super::check_finite(&h.normal)?;
            if !h.offset.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        let magnitude = halfspaces.iter().fold(0.0f64, |m, h| m.max(h.offset.abs()));
        let eps = scaled_tol(tol, magnitude);
        let mut constraints = Vec::with_capacity(halfspaces.len() + 1);
        let mut t_row = alloc::vec![0.0; k + 1];
        t_row[0] = 1.0;
        constraints.push(t_row);
        for h in halfspaces {
            let mut row = Vec::with_capacity(k + 1);
            row.push(h.offset);
            row.extend(h.normal.iter().map(|x| -x));
            constraints.push(row);
        }
        let cone = Cone::build(constraints, eps).map_err(|_| Error::Unbounded)?;
        let mut points = Vec::new();
        let mut tight = Vec::new();
        let mut has_direction = false;
        for (r, t) in cone.rays.iter().zip(&cone.tight) {
            if r[0] == 1.0 {
                points.push(r[1..].to_vec());
                tight.push(t.iter().filter(|&&c| c > 0).map(|&c| c - 1).collect::<Vec<u32>>());
            } else {
                has_direction = true;
            }
        }
        if points.is_empty() {
            return Err(Error::EmptySystem);
        }
        if has_direction {
            return Err(Error::Unbounded);
        }
        let rank = affine_rank(&points, 1e-9);
        if rank < k {
            let ambient: Vec<Point> = points.iter().map(|p| hull.embed(p)).collect();
            return Self::from_vertices(&ambient, tol);
        }
        let facets = halfspaces.to_vec();
        let check = alloc::vec![true; facets.len()];
        Ok(assemble(hull, points, facets, tight, &check, true))
    }

    /// Reassembles a polytope from stored parts without recomputation.
    pub fn from_parts(
        hull: AffineHull,
        vertices: Vec<Point>,
        facets: Vec<Halfspace>,
        incidence: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let k = hull.dim();
        if vertices.is_empty() {
            return Err(Error::EmptyInput);
        }
        if vertices.iter().any(|v| v.len() != k) || facets.iter().any(|f| f.normal.len() != k) {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: vertices[0].len(),
            });
        }
        if incidence.len() != facets.len()
            || incidence.iter().flatten().any(|&i| i >= vertices.len())
        {
            return Err(Error::InvalidParameter("incidence out of range".into()));
        }
        Ok(Self {
            hull,
            vertices,
            facets,
            incidence,
        })
    }

    pub fn hull(&self) -> &AffineHull {
        &self.hull
    }

    /// Dimension of the polytope (of its affine hull).
    pub fn dim(&self) -> usize {
        self.hull.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.hull.ambient_dim()
    }

    /// Vertices in hull coordinates.
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn ambient_vertices(&self) -> Vec<Point> {
        self.vertices.iter().map(|v| self.hull.embed(v)).collect()
    }

    /// Facet halfspaces in hull coordinates.
    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    pub fn incidence(&self) -> &[Vec<usize>] {
        &self.incidence
    }

    /// Facet halfspaces mapped to ambient coordinates. Together with the hull
    /// they describe the polytope.
    pub fn ambient_halfspaces(&self) -> Vec<Halfspace> {
        self.facets
            .iter()
            .map(|f| {
                let normal = self.hull.embed_direction(&f.normal);
                let offset = f.offset + math::dot(&normal, self.hull.base());
                Halfspace { normal, offset }
            })
            .collect()
    }

    /// Sorted facet ids tight at each vertex.
    pub fn vertex_facets(&self) -> Vec<Vec<u32>> {
        let mut out = alloc::vec![Vec::new(); self.vertices.len()];
        for (f, vs) in self.incidence.iter().enumerate() {
            for &v in vs {
                out[v].push(f as u32);
            }
        }
        out
    }

    /// Largest absolute hull coordinate; sets the scale for tolerances.
    pub fn magnitude(&self) -> f64 {
        math::max_abs(&self.vertices)
    }

    pub fn contains_hull_point(&self, y: &[f64], tol: f64) -> bool {
        // the newest facet is the cutting plane of a piece: the most selective test
        match self.facets.split_last() {
            None => true,
            Some((last, rest)) => last.slack(y) >= -tol && rest.iter().all(|f| f.slack(y) >= -tol),
        }
    }

    /// Membership of an ambient point: within `tol` of the hull and of every facet.
    pub fn contains_point(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.ambient_dim() {
            return false;
        }
        if self.dim() == 0 {
            return math::dist(x, self.hull.base()) <= tol;
        }
        if self.hull.is_identity() {
            return self.contains_hull_point(x, tol);
        }
        let y = self.hull.project(x);
        if math::dist(x, &self.hull.embed(&y)) > tol {
            return false;
        }
        self.contains_hull_point(&y, tol)
    }

    /// Ball containment via the facet test `normal . center + radius <= offset + tol`.
    pub fn contains_ball(&self, ball: &Ball, tol: f64) -> bool {
        if self.dim() < self.ambient_dim() {
            return ball.radius <= tol && self.contains_point(&ball.center, tol);
        }
        let c = self.hull.project(&ball.center);
        self.facets
            .iter()
            .all(|f| math::dot(&f.normal, &c) + ball.radius <= f.offset + tol)
    }

    /// Every vertex within `radius + tol` of the ball center.
    pub fn inside_ball(&self, ball: &Ball, tol: f64) -> bool {
        self.vertices
            .iter()
            .all(|v| math::dist(&self.hull.embed(v), &ball.center) <= ball.radius + tol)
    }

    /// Support function `max_{x in P} u . x` for an ambient direction.
    pub fn support(&self, u: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| math::dot(u, &self.hull.embed(v)))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Axis-aligned bounding box in hull coordinates.
    pub fn hull_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let k = self.dim();
        let mut lo = alloc::vec![f64::INFINITY; k];
        let mut hi = alloc::vec![f64::NEG_INFINITY; k];
        for v in &self.vertices {
            for i in 0..k {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        (lo, hi)
    }

    /// Axis-aligned bounding box in ambient coordinates.
    pub fn ambient_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.ambient_dim();
        let mut lo = alloc::vec![f64::INFINITY; d];
        let mut hi = alloc::vec![f64::NEG_INFINITY; d];
        for v in self.ambient_vertices() {
            for i in 0..d {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        (lo, hi)
    }

    pub fn centroid(&self) -> Point {
        let k = self.dim();
        let mut c = alloc::vec![0.0; k];
        for v in &self.vertices {
            math::axpy(&mut c, 1.0, v);
        }
        math::scaled(&c, 1.0 / self.vertices.len() as f64)
    }

    /// Same vertex set (ambient coordinates) up to `tol`, ignoring order.
    pub fn same_vertices(&self, other: &Polytope, tol: f64) -> bool {
        if self.vertices.len() != other.vertices.len() {
            return false;
        }
        let a = self.ambient_vertices();
        let b = other.ambient_vertices();
        a.iter().all(|p| b.iter().any(|q| math::dist(p, q) <= tol))
            && b.iter().all(|q| a.iter().any(|p| math::dist(p, q) <= tol))
    }

    /// Expresses an ambient halfspace in hull coordinates. `Ok(None)` means the
    /// constraint is satisfied by the whole hull.
    pub fn halfspace_to_hull(&self, h: &Halfspace, tol: f64) -> Result<Option<Halfspace>> {
        let n = self.hull.project_direction(&h.normal);
        let b = h.offset - math::dot(&h.normal, self.hull.base());
        let nn = math::norm(&n);
        if nn < 1e-12 {
            return if b >= -tol { Ok(None) } else { Err(Error::EmptySystem) };
        }
        Ok(Some(Halfspace::new(n, b)?))
    }
}

/// Affine rank of a point set (rank of differences to the first point).
pub(crate) fn affine_rank(points: &[Point], eps: f64) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let diffs: Vec<Vec<f64>> = points[1..].iter().map(|p| math::sub(p, &points[0])).collect();
    let rows: Vec<&[f64]> = diffs.iter().map(|d| d.as_slice()).collect();
    math::rank(&rows, eps)
}

fn dedupe(points: Vec<Point>, eps: f64) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|q| math::dist(&p, q) <= eps) {
            out.push(p);
        }
    }
    out
}

/// Builds a polytope from points that are full-dimensional in `hull`.
pub(crate) fn from_hull_points(hull: AffineHull, points: Vec<Point>, tol: f64) -> Polytope {
    let k = hull.dim();
    let eps = scaled_tol(tol, math::max_abs(&points));
    let pts = dedupe(points, eps);
    match k {
        0 => Polytope {
            hull,
            vertices: alloc::vec![Vec::new()],
            facets: Vec::new(),
            incidence: Vec::new(),
        },
        1 => {
            let (mut lo, mut hi) = (0, 0);
            for (i, p) in pts.iter().enumerate() {
                if p[0] < pts[lo][0] {
                    lo = i;
                }
                if p[0] > pts[hi][0] {
                    hi = i;
                }
            }
            let a = pts[lo][0];
            let b = pts[hi][0];
            Polytope {
                hull,
                vertices: alloc::vec![alloc::vec![a], alloc::vec![b]],
                facets: alloc::vec![
                    Halfspace { normal: alloc::vec![-1.0], offset: -a },
                    Halfspace { normal: alloc::vec![1.0], offset: b },
                ],
                incidence: alloc::vec![alloc::vec![0], alloc::vec![1]],
            }
        }
        _ => polar_hull(hull, pts, eps),
    }
}

/// Facets of `conv(points)` as the vertices of the polar body about the centroid.
fn polar_hull(hull: AffineHull, pts: Vec<Point>, eps: f64) -> Polytope {
    let k = hull.dim();
    let mut c = alloc::vec![0.0; k];
    for p in &pts {
        math::axpy(&mut c, 1.0, p);
    }
    let c = math::scaled(&c, 1.0 / pts.len() as f64);
    let centered: Vec<Vec<f64>> = pts.iter().map(|p| math::sub(p, &c)).collect();
    let scale = centered.iter().map(|q| math::norm(q)).fold(0.0, f64::max).max(1e-300);
    let mut constraints = Vec::with_capacity(pts.len() + 1);
    let mut t_row = alloc::vec![0.0; k + 1];
    t_row[0] = 1.0;
    constraints.push(t_row);
    for q in &centered {
        let nq = math::norm(q);
        if nq <= eps {
            continue;
        }
        let mut row = Vec::with_capacity(k + 1);
        row.push(1.0 / nq);
        row.extend(q.iter().map(|x| -x / nq));
        constraints.push(row);
    }
    let polar_eps = (eps / (scale * scale)).min(1e-7);
    let cone = Cone::build(constraints, polar_eps).expect("centroid is interior, polar is bounded");
    let mut facets: Vec<Halfspace> = Vec::new();
    for r in &cone.rays {
        if r[0] != 1.0 {
            continue;
        }
        let a = &r[1..];
        let na = math::norm(a);
        let normal = math::scaled(a, 1.0 / na);
        let offset = 1.0 / na + math::dot(&normal, &c);
        facets.push(Halfspace { normal, offset });
    }
    // numerical incidence against the primal tolerance
    let mut tight: Vec<Vec<u32>> = alloc::vec![Vec::new(); pts.len()];
    for (f, h) in facets.iter().enumerate() {
        for (i, p) in pts.iter().enumerate() {
            if h.slack(p).abs() <= eps {
                tight[i].push(f as u32);
            }
        }
    }
    // extreme points: tight facet normals of full rank
    let mut vertices = Vec::new();
    let mut vtight = Vec::new();
    for (p, t) in pts.into_iter().zip(tight) {
        let rows: Vec<&[f64]> = t.iter().map(|&f| facets[f as usize].normal.as_slice()).collect();
        if math::rank(&rows, 1e-9) == k {
            vertices.push(p);
            vtight.push(t);
        }
    }
    let check = alloc::vec![true; facets.len()];
    assemble(hull, vertices, facets, vtight, &check, true)
}

/// Builds incidence from per-vertex tight sets, drops facets that are no longer
/// facet-defining (only those flagged in `check` are re-examined) and, when
/// `dedupe_facets`, merges facets with identical vertex sets.
pub(crate) fn assemble(
    hull: AffineHull,
    vertices: Vec<Point>,
    facets: Vec<Halfspace>,
    vertex_tight: Vec<Vec<u32>>,
    check: &[bool],
    dedupe_facets: bool,
) -> Polytope {
    let k = hull.dim();
    let mut incidence: Vec<Vec<usize>> = alloc::vec![Vec::new(); facets.len()];
    for (v, t) in vertex_tight.iter().enumerate() {
        for &f in t {
            incidence[f as usize].push(v);
        }
    }
    let mut keep = alloc::vec![true; facets.len()];
    for f in 0..facets.len() {
        if !check[f] {
            continue;
        }
        let vs = &incidence[f];
        if vs.len() < k {
            keep[f] = false;
            continue;
        }
        let pts: Vec<Point> = vs.iter().map(|&v| vertices[v].clone()).collect();
        if affine_rank(&pts, 1e-9) != k - 1 {
            keep[f] = false;
        }
    }
    if dedupe_facets {
        let mut order: Vec<usize> = (0..facets.len()).filter(|&f| keep[f]).collect();
        order.sort_by(|&a, &b| incidence[a].cmp(&incidence[b]).then(a.cmp(&b)));
        for w in order.windows(2) {
            if incidence[w[0]] == incidence[w[1]] {
                keep[w[1]] = false;
            }
        }
    }
    let mut out_facets = Vec::new();
    let mut out_inc = Vec::new();
    for (f, (h, inc)) in facets.into_iter().zip(incidence).enumerate() {
        if keep[f] {
            out_facets.push(h);
            out_inc.push(inc);
        }
    }
    Polytope {
        hull,
        vertices,
        facets: out_facets,
        incidence: out_inc,
    }
}

fn face(p: &Polytope, ids: &[usize], tol: f64) -> Option<Polytope> {
    if ids.is_empty() {
        return None;
    }
    let pts: Vec<Point> = ids.iter().map(|&i| p.hull.embed(&p.vertices[i])).collect();
    Polytope::from_vertices(&pts, tol).ok()
}

/// Splits `p` by a halfspace in hull coordinates into
/// `(p ∩ {n.x <= b}, p ∩ {n.x >= b})`. Empty sides are `None`; a side that
/// only touches the plane comes back as the lower-dimensional face.
pub(crate) fn split(p: &Polytope, h: &Halfspace, tol: f64) -> (Option<Polytope>, Option<Polytope>) {
    let k = p.dim();
    let eps = scaled_tol(tol, p.magnitude().max(h.offset.abs()));
    let vals: Vec<f64> = p.vertices.iter().map(|v| h.slack(v)).collect();
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut zero = Vec::new();
    for (i, &v) in vals.iter().enumerate() {
        if v > eps {
            pos.push(i);
        } else if v < -eps {
            neg.push(i);
        } else {
            zero.push(i);
        }
    }
    if neg.is_empty() {
        return (Some(p.clone()), face(p, &zero, tol));
    }
    if pos.is_empty() {
        return (face(p, &zero, tol), Some(p.clone()));
    }
    // k >= 1 here: a single point cannot be on both sides.
    let vt = p.vertex_facets();
    let rows: Vec<Vec<f64>> = p.facets.iter().map(|f| f.normal.clone()).collect();
    let pairs = adjacent_pairs(&vt, &pos, &neg, &rows, k - 1);
    let new_id = p.facets.len() as u32;
    let mut new_pts = Vec::with_capacity(pairs.len());
    let mut new_tight = Vec::with_capacity(pairs.len());
    for (a, b, mut common) in pairs {
        let fa = vals[a];
        let fb = vals[b];
        let s = fa / (fa - fb);
        let pa = &p.vertices[a];
        let pb = &p.vertices[b];
        let x: Vec<f64> = pa.iter().zip(pb).map(|(u, w)| u + s * (w - u)).collect();
        insert_sorted(&mut common, new_id);
        new_pts.push(x);
        new_tight.push(common);
    }
    let side = |keep: &[usize], flipped: bool| -> Polytope {
        let mut verts = Vec::new();
        let mut tight = Vec::new();
        let mut check = alloc::vec![false; p.facets.len() + 1];
        check[new_id as usize] = true;
        for &i in keep {
            verts.push(p.vertices[i].clone());
            tight.push(vt[i].clone());
        }
        for &i in &zero {
            verts.push(p.vertices[i].clone());
            let mut t = vt[i].clone();
            insert_sorted(&mut t, new_id);
            tight.push(t);
        }
        verts.extend(new_pts.iter().cloned());
        tight.extend(new_tight.iter().cloned());
        // facets that lost a vertex need re-examination
        let dropped = if flipped { &pos } else { &neg };
        for &i in dropped {
            for &f in &vt[i] {
                check[f as usize] = true;
            }
        }
        let mut facets = p.facets.clone();
        facets.push(if flipped { h.flipped() } else { h.clone() });
        assemble(p.hull.clone(), verts, facets, tight, &check, false)
    };
    (Some(side(&pos, false)), Some(side(&neg, true)))
}

/// Cuts `p` by a hyperplane given in `p`'s hull coordinates.
///
/// Returns `(near, far)` with `near = p ∩ {n.x <= b}` and
/// `far = p ∩ {n.x >= b}`; either may be empty (`None`) or lower-dimensional.
pub fn cut(p: &Polytope, h: &Hyperplane, tol: f64) -> (Option<Polytope>, Option<Polytope>) {
    split(p, &h.lower(), tol)
}

/// Intersection of two polytopes in the same ambient space.
pub fn intersect(p: &Polytope, q: &Polytope, tol: f64) -> Result<Option<Polytope>> {
    if p.ambient_dim() != q.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: p.ambient_dim(),
            found: q.ambient_dim(),
        });
    }
    let mut constraints = q.ambient_halfspaces();
    // q's hull equalities as pairs of opposite halfspaces
    if q.dim() < q.ambient_dim() {
        for n in hull_complement(q.hull()) {
            let b = math::dot(&n, q.hull().base());
            constraints.push(Halfspace {
                normal: n.clone(),
                offset: b,
            });
            constraints.push(Halfspace {
                normal: n.iter().map(|x| -x).collect(),
                offset: -b,
            });
        }
    }
    let mut cur = p.clone();
    for h in &constraints {
        let hh = match cur.halfspace_to_hull(h, scaled_tol(tol, cur.magnitude())) {
            Ok(Some(hh)) => hh,
            Ok(None) => continue,
            Err(_) => return Ok(None),
        };
        match split(&cur, &hh, tol).0 {
            Some(next) => cur = next,
            None => return Ok(None),
        }
    }
    Ok(Some(cur))
}

fn hull_complement(hull: &AffineHull) -> Vec<Vec<f64>> {
    let d = hull.ambient_dim();
    let mut basis: Vec<Vec<f64>> = hull.basis().to_vec();
    let mut out = Vec::new();
    for ax in 0..d {
        let mut e = alloc::vec![0.0; d];
        e[ax] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let c = math::dot(&e, b);
                math::axpy(&mut e, -c, b);
            }
        }
        let n = math::norm(&e);
        if n > 1e-8 {
            let e = math::scaled(&e, 1.0 / n);
            basis.push(e.clone());
            out.push(e);
        }
    }
    out
}

/// `lambda * P`, scaling about the ambient origin.
pub fn scale(p: &Polytope, lambda: f64) -> Result<Polytope> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter("scale factor must be positive".into()));
    }
    Ok(Polytope {
        hull: p.hull.scaled(lambda),
        vertices: p.vertices.iter().map(|v| math::scaled(v, lambda)).collect(),
        facets: p
            .facets
            .iter()
            .map(|f| Halfspace {
                normal: f.normal.clone(),
                offset: f.offset * lambda,
            })
            .collect(),
        incidence: p.incidence.clone(),
    })
}
