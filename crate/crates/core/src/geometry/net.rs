use super::dd::Cone;
use super::hull::AffineHull;
use super::polytope::assemble;
use super::{check_finite, Halfspace, Point, Polytope};
use crate::error::{Error, Result};
use crate::math;
use crate::rng;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::PI;

/// Angle such that a net of that covering angle yields tangent halfspaces
/// (at radius `r_inner`) whose intersection fits in radius `r_outer`.
pub fn covering_angle(r_inner: f64, r_outer: f64) -> f64 {
    libm::acos(r_inner / r_outer)
}

fn chord(angle: f64) -> f64 {
    2.0 * libm::sin(angle / 2.0)
}

/// Unit directions in `R^dim` such that every unit vector lies within angle
/// `theta` of one of them.
///
/// In the plane the directions are equally spaced. In higher dimensions they
/// are the normalized points of a regular grid on the faces of the cube
/// `[-1, 1]^dim`; radial projection onto the sphere is 1-Lipschitz, so a grid
/// with per-face spacing `2/seg` covers within chord `sqrt(dim-1)/seg`.
pub fn sphere_net(dim: usize, theta: f64) -> Result<Vec<Point>> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    if !(theta > 0.0 && theta < PI / 2.0) {
        return Err(Error::InvalidParameter("covering angle must lie in (0, pi/2)".into()));
    }
    let snap = |x: f64| if x.abs() < 1e-15 { 0.0 } else { x };
    match dim {
        1 => Ok(alloc::vec![alloc::vec![1.0], alloc::vec![-1.0]]),
        2 => {
            let n = libm::ceil(PI / theta - 1e-9) as usize;
            Ok((0..n)
                .map(|i| {
                    let a = 2.0 * PI * i as f64 / n as f64;
                    alloc::vec![snap(libm::cos(a)), snap(libm::sin(a))]
                })
                .collect())
        }
        _ => {
            let need = math::sqrt((dim - 1) as f64) / chord(theta);
            let seg = (libm::ceil(need - 1e-9) as usize).max(1);
            let ticks: Vec<f64> = (0..=seg)
                .map(|j| if j == seg { 1.0 } else { -1.0 + 2.0 * j as f64 / seg as f64 })
                .collect();
            let mut out = Vec::new();
            let mut idx = alloc::vec![0usize; dim - 1];
            for axis in 0..dim {
                for &sign in &[1.0, -1.0] {
                    idx.iter_mut().for_each(|i| *i = 0);
                    loop {
                        let mut c = Vec::with_capacity(dim);
                        let mut it = idx.iter();
                        for b in 0..dim {
                            if b == axis {
                                c.push(sign);
                            } else {
                                c.push(ticks[*it.next().unwrap()]);
                            }
                        }
                        // shared boundary points belong to the lowest axis
                        if !(0..axis).any(|b| c[b].abs() == 1.0) {
                            let n = math::norm(&c);
                            out.push(c.iter().map(|x| x / n).collect());
                        }
                        let mut carry = 0;
                        while carry < idx.len() {
                            idx[carry] += 1;
                            if idx[carry] <= seg {
                                break;
                            }
                            idx[carry] = 0;
                            carry += 1;
                        }
                        if carry == idx.len() {
                            break;
                        }
                    }
                }
            }
            Ok(out)
        }
    }
}

/// Grid hash over unit directions answering "all directions within chord
/// distance `cell` of a query" exactly.
pub(crate) struct DirectionIndex {
    cell: f64,
    dim: usize,
    buckets: BTreeMap<Vec<i64>, Vec<u32>>,
}

impl DirectionIndex {
    pub fn new(dirs: &[Point], cell: f64) -> Self {
        let dim = dirs.first().map_or(0, |d| d.len());
        let mut buckets: BTreeMap<Vec<i64>, Vec<u32>> = BTreeMap::new();
        for (i, d) in dirs.iter().enumerate() {
            buckets.entry(key(d, cell)).or_default().push(i as u32);
        }
        Self { cell, dim, buckets }
    }

    /// Candidate ids whose cell neighbors the query cell (superset of all
    /// directions within chord `cell`), in increasing order.
    pub fn candidates(&self, q: &[f64]) -> Vec<u32> {
        let base = key(q, self.cell);
        let mut out = Vec::new();
        let mut off = alloc::vec![-1i64; self.dim];
        loop {
            let k: Vec<i64> = base.iter().zip(&off).map(|(a, b)| a + b).collect();
            if let Some(v) = self.buckets.get(&k) {
                out.extend_from_slice(v);
            }
            let mut c = 0;
            while c < self.dim {
                off[c] += 1;
                if off[c] <= 1 {
                    break;
                }
                off[c] = -1;
                c += 1;
            }
            if c == self.dim {
                break;
            }
        }
        out.sort_unstable();
        out
    }
}

fn key(x: &[f64], cell: f64) -> Vec<i64> {
    x.iter().map(|v| libm::floor(v / cell) as i64).collect()
}

/// Samples `samples` random unit directions and returns the first one not
/// within `theta` of the net, if any.
pub fn net_covering_witness(net: &[Point], theta: f64, samples: usize, seed: u64) -> Option<Point> {
    let dim = net.first()?.len();
    let cell = chord(theta);
    let index = DirectionIndex::new(net, cell);
    let cos_t = libm::cos(theta);
    let mut r = rng::seeded(seed, 0x6e6574);
    for _ in 0..samples {
        let u = rng::unit_vector(&mut r, dim);
        let covered = index
            .candidates(&u)
            .iter()
            .any(|&i| math::dot(&u, &net[i as usize]) >= cos_t - 1e-12);
        if !covered {
            return Some(u);
        }
    }
    None
}

fn validate(center: &[f64], r_inner: f64, r_outer: f64, dim: usize) -> Result<()> {
    if center.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: center.len(),
        });
    }
    check_finite(center)?;
    if !(r_inner > 0.0 && r_inner < r_outer && r_outer.is_finite()) {
        return Err(Error::InvalidParameter("need 0 < r_inner < r_outer".into()));
    }
    Ok(())
}

/// Halfspaces tangent to the inner ball at the net directions, sorted by
/// lexicographic normal.
pub fn sandwich_halfspaces(center: &[f64], r_inner: f64, r_outer: f64, dim: usize) -> Result<Vec<Halfspace>> {
    validate(center, r_inner, r_outer, dim)?;
    let theta = covering_angle(r_inner, r_outer);
    let mut net = sphere_net(dim, theta).map_err(|_| Error::NetFailure { theta })?;
    net.sort_by(|a, b| math::lex_cmp(a, b));
    Ok(net
        .into_iter()
        .map(|u| {
            let offset = math::dot(&u, center) + r_inner;
            Halfspace { normal: u, offset }
        })
        .collect())
}

/// Polytope `D` with `B(center, r_inner) ⊆ D ⊆ B(center, r_outer)`, built
/// from the tangent halfspaces of [`sandwich_halfspaces`].
pub fn sandwich_polytope(center: &[f64], r_inner: f64, r_outer: f64, dim: usize) -> Result<Polytope> {
    let hs = sandwich_halfspaces(center, r_inner, r_outer, dim)?;
    let theta = covering_angle(r_inner, r_outer);
    let dirs: Vec<Point> = hs.iter().map(|h| h.normal.clone()).collect();
    let hull = AffineHull::ambient(dim);
    if dim == 1 {
        let verts = alloc::vec![
            alloc::vec![center[0] + r_inner],
            alloc::vec![center[0] - r_inner]
        ];
        // sorted normals: [-1] first
        let tight = alloc::vec![alloc::vec![1u32], alloc::vec![0u32]];
        return Ok(assemble(hull, verts, hs, tight, &[true, true], false));
    }
    // A constraint tight at a vertex of facet f (which lies within r_outer)
    // has its normal within theta of that vertex, hence within 2 theta of f.
    // Local vertices farther than r_outer are spurious and get dropped.
    let reach = (2.1 * theta).min(PI);
    let index = DirectionIndex::new(&dirs, chord(reach));
    let cos_reach = libm::cos(reach);
    let eps = 1e-10 * r_outer.max(1.0);
    let keep_radius = r_outer * (1.0 + 1e-9) + 1e-9;
    let mut found: Vec<(Point, Vec<u32>)> = Vec::new();
    let mut grid: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    let merge_cell = 1e-6 * r_outer.max(1.0);
    let merge_tol = 1e-7 * r_outer.max(1.0);
    for (f, uf) in dirs.iter().enumerate() {
        let frame = math::orthogonal_complement(uf);
        let mut local: Vec<(f64, u32)> = index
            .candidates(uf)
            .into_iter()
            .filter(|&g| g as usize != f)
            .map(|g| (math::dot(&dirs[g as usize], uf), g))
            .filter(|&(c, _)| c >= cos_reach)
            .collect();
        // nearest neighbours first keeps the intermediate cones small
        local.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let local: Vec<u32> = local.into_iter().map(|(_, g)| g).collect();
        // rows [b, -a] for a . z <= b on the facet plane, plus a bounding box
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(local.len() + 2 * dim);
        let mut t_row = alloc::vec![0.0; dim];
        t_row[0] = 1.0;
        rows.push(t_row);
        for &g in &local {
            let ug = &dirs[g as usize];
            let a: Vec<f64> = frame.iter().map(|e| math::dot(e, ug)).collect();
            let b = r_inner * (1.0 - math::dot(ug, uf));
            let na = math::norm(&a);
            let mut row = Vec::with_capacity(dim);
            row.push(b / na);
            row.extend(a.iter().map(|x| -x / na));
            rows.push(row);
        }
        let n_local = rows.len();
        for j in 0..dim - 1 {
            for s in [1.0, -1.0] {
                let mut row = alloc::vec![0.0; dim];
                row[0] = 4.0 * r_outer;
                row[1 + j] = -s;
                rows.push(row);
            }
        }
        let cone = Cone::build(rows, eps).map_err(|_| Error::NetFailure { theta })?;
        for (r, t) in cone.rays.iter().zip(&cone.tight) {
            if r[0] != 1.0 {
                return Err(Error::NetFailure { theta });
            }
            let mut y: Vec<f64> = uf.iter().map(|x| x * r_inner).collect();
            for (e, z) in frame.iter().zip(&r[1..]) {
                math::axpy(&mut y, *z, e);
            }
            if math::norm(&y) > keep_radius || t.iter().any(|&c| c as usize >= n_local) {
                continue;
            }
            let mut tight: Vec<u32> = t
                .iter()
                .filter(|&&c| c > 0)
                .map(|&c| local[c as usize - 1])
                .collect();
            tight.push(f as u32);
            tight.sort_unstable();
            let x = math::add(&y, center);
            let k = key(&x, merge_cell);
            let mut hit = None;
            let mut off = alloc::vec![-1i64; dim];
            'outer: loop {
                let kk: Vec<i64> = k.iter().zip(&off).map(|(a, b)| a + b).collect();
                if let Some(ids) = grid.get(&kk) {
                    for &id in ids {
                        if math::dist(&found[id].0, &x) <= merge_tol {
                            hit = Some(id);
                            break 'outer;
                        }
                    }
                }
                let mut c = 0;
                while c < dim {
                    off[c] += 1;
                    if off[c] <= 1 {
                        break;
                    }
                    off[c] = -1;
                    c += 1;
                }
                if c == dim {
                    break;
                }
            }
            match hit {
                Some(id) => {
                    let merged = &mut found[id].1;
                    for c in tight {
                        super::dd::insert_sorted(merged, c);
                    }
                }
                None => {
                    grid.entry(k).or_default().push(found.len());
                    found.push((x, tight));
                }
            }
        }
    }
    let (verts, tight): (Vec<Point>, Vec<Vec<u32>>) = found.into_iter().unzip();
    let check = alloc::vec![true; hs.len()];
    let nfacets = hs.len();
    let d = assemble(hull, verts, hs, tight, &check, false);
    if d.facets().len() != nfacets {
        return Err(Error::NetFailure { theta });
    }
    Ok(d)
}
