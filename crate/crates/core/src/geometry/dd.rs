//! Incremental double description on homogenized cones.
//!
//! A polyhedron `{x : A x <= b}` is lifted to the cone
//! `{(t, x) : t >= 0, b t - A x >= 0}`; its extreme rays with `t > 0` are the
//! vertices, rays with `t = 0` are recession directions. Constraints are
//! stored in the form `a . r >= 0`.

use crate::math;
use alloc::vec::Vec;

#[derive(Debug)]
pub(crate) struct Lineality;

pub(crate) struct Cone {
    pub dim: usize,
    pub constraints: Vec<Vec<f64>>,
    pub rays: Vec<Vec<f64>>,
    /// Sorted ids of constraints tight on each ray.
    pub tight: Vec<Vec<u32>>,
    eps: f64,
}

/// Scales a ray to `t = 1` when it is a point, otherwise to unit length.
pub(crate) fn normalize_ray(v: &mut [f64]) {
    let n = math::norm(v);
    if n == 0.0 {
        return;
    }
    if v[0] > 1e-12 * n {
        let t = v[0];
        for x in v.iter_mut() {
            *x /= t;
        }
        v[0] = 1.0;
    } else {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
}

pub(crate) fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

pub(crate) fn insert_sorted(v: &mut Vec<u32>, x: u32) {
    if let Err(pos) = v.binary_search(&x) {
        v.insert(pos, x);
    }
}

/// Pairs `(p, q)` with `p` in `pos`, `q` in `neg` that span an edge: the
/// constraints tight on both have rank exactly `edge_rank`.
pub(crate) fn adjacent_pairs(
    tight: &[Vec<u32>],
    pos: &[usize],
    neg: &[usize],
    rows: &[Vec<f64>],
    edge_rank: usize,
) -> Vec<(usize, usize, Vec<u32>)> {
    let mut out = Vec::new();
    if edge_rank == 0 {
        for &q in neg {
            for &p in pos {
                out.push((p, q, intersect_sorted(&tight[p], &tight[q])));
            }
        }
        return out;
    }
    let mut by_constraint: Vec<Vec<u32>> = alloc::vec![Vec::new(); rows.len()];
    for &p in pos {
        for &c in &tight[p] {
            by_constraint[c as usize].push(p as u32);
        }
    }
    let mut counts: Vec<u32> = alloc::vec![0; tight.len()];
    let mut touched: Vec<usize> = Vec::new();
    for &q in neg {
        for &c in &tight[q] {
            for &p in &by_constraint[c as usize] {
                let p = p as usize;
                if counts[p] == 0 {
                    touched.push(p);
                }
                counts[p] += 1;
            }
        }
        touched.sort_unstable();
        for &p in &touched {
            if counts[p] as usize >= edge_rank {
                let common = intersect_sorted(&tight[p], &tight[q]);
                let sel: Vec<&[f64]> = common.iter().map(|&c| rows[c as usize].as_slice()).collect();
                if math::rank(&sel, 1e-9) == edge_rank {
                    out.push((p, q, common));
                }
            }
            counts[p] = 0;
        }
        touched.clear();
    }
    out
}

impl Cone {
    /// Builds the cone cut out by `constraints` (all `a . r >= 0`), inserting
    /// them in order after an initial simplicial basis.
    pub fn build(constraints: Vec<Vec<f64>>, eps: f64) -> Result<Self, Lineality> {
        let dim = constraints.first().map(|c| c.len()).unwrap_or(0);
        // Greedy selection of `dim` independent rows.
        let mut chosen: Vec<usize> = Vec::new();
        for (i, _) in constraints.iter().enumerate() {
            let mut rows: Vec<&[f64]> = chosen.iter().map(|&c| constraints[c].as_slice()).collect();
            rows.push(&constraints[i]);
            if math::rank(&rows, 1e-10) == rows.len() {
                chosen.push(i);
                if chosen.len() == dim {
                    break;
                }
            }
        }
        if chosen.len() < dim {
            return Err(Lineality);
        }
        let mut rays = Vec::with_capacity(dim);
        let mut tight = Vec::with_capacity(dim);
        for j in 0..dim {
            let a: Vec<Vec<f64>> = chosen.iter().map(|&c| constraints[c].clone()).collect();
            let mut e = alloc::vec![0.0; dim];
            e[j] = 1.0;
            let mut r = math::solve(a, e, 1e-14).ok_or(Lineality)?;
            normalize_ray(&mut r);
            let mut t: Vec<u32> = chosen
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, &c)| c as u32)
                .collect();
            t.sort_unstable();
            rays.push(r);
            tight.push(t);
        }
        let mut cone = Cone {
            dim,
            constraints,
            rays,
            tight,
            eps,
        };
        for i in 0..cone.constraints.len() {
            if !chosen.contains(&i) {
                cone.insert(i);
            }
        }
        Ok(cone)
    }

    fn insert(&mut self, idx: usize) {
        let a = &self.constraints[idx];
        let vals: Vec<f64> = self.rays.iter().map(|r| math::dot(a, r)).collect();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut zero = Vec::new();
        for (i, &v) in vals.iter().enumerate() {
            if v > self.eps {
                pos.push(i);
            } else if v < -self.eps {
                neg.push(i);
            } else {
                zero.push(i);
            }
        }
        for &z in &zero {
            insert_sorted(&mut self.tight[z], idx as u32);
        }
        if neg.is_empty() {
            return;
        }
        let pairs = adjacent_pairs(&self.tight, &pos, &neg, &self.constraints, self.dim - 2);
        let mut new_rays = Vec::with_capacity(pairs.len());
        let mut new_tight = Vec::with_capacity(pairs.len());
        for (p, q, mut common) in pairs {
            let fp = vals[p];
            let fq = vals[q];
            let mut r: Vec<f64> = self.rays[q]
                .iter()
                .zip(&self.rays[p])
                .map(|(rq, rp)| fp * rq - fq * rp)
                .collect();
            normalize_ray(&mut r);
            insert_sorted(&mut common, idx as u32);
            new_rays.push(r);
            new_tight.push(common);
        }
        let mut keep = alloc::vec![true; self.rays.len()];
        for &q in &neg {
            keep[q] = false;
        }
        let mut rays = Vec::with_capacity(self.rays.len() + new_rays.len());
        let mut tight = Vec::with_capacity(rays.capacity());
        for (i, (r, t)) in self.rays.drain(..).zip(self.tight.drain(..)).enumerate() {
            if keep[i] {
                rays.push(r);
                tight.push(t);
            }
        }
        rays.extend(new_rays);
        tight.extend(new_tight);
        self.rays = rays;
        self.tight = tight;
    }
}
