#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(r: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = r.random::<f64>().max(1e-300);
    let u2: f64 = r.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn unit(r: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| gaussian(r)).collect();
        let n = norm(&v);
        if n > 1e-9 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// `count` points in a ball of radius `radius` about `center`.
pub fn points_in_ball(r: &mut ChaCha8Rng, d: usize, count: usize, radius: f64) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| {
            let u = unit(r, d);
            let s = radius * r.random::<f64>().powf(1.0 / d as f64);
            u.iter().map(|x| x * s).collect()
        })
        .collect()
}

/// Random convex combination of `pts` (lies in their hull by construction).
pub fn convex_combo(r: &mut ChaCha8Rng, pts: &[Vec<f64>]) -> Vec<f64> {
    let w: Vec<f64> = (0..pts.len()).map(|_| -r.random::<f64>().max(1e-300).ln()).collect();
    let s: f64 = w.iter().sum();
    let mut x = vec![0.0; pts[0].len()];
    for (wi, p) in w.iter().zip(pts) {
        for (xi, pi) in x.iter_mut().zip(p) {
            *xi += wi / s * pi;
        }
    }
    x
}

/// Gaussian elimination rank, written independently of the library.
pub fn rank(mut m: Vec<Vec<f64>>, eps: f64) -> usize {
    let mut rank = 0;
    let cols = m.first().map_or(0, |r| r.len());
    for c in 0..cols {
        let piv = (rank..m.len()).max_by(|&a, &b| m[a][c].abs().partial_cmp(&m[b][c].abs()).unwrap());
        let Some(p) = piv else { break };
        if m[p][c].abs() <= eps {
            continue;
        }
        m.swap(rank, p);
        for i in 0..m.len() {
            if i != rank {
                let f = m[i][c] / m[rank][c];
                let row = m[rank].clone();
                for (x, y) in m[i].iter_mut().zip(row) {
                    *x -= f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Extremality oracle by Caratheodory: `v` is not extreme iff it lies in a
/// simplex spanned by `d + 1` of the other points (general position assumed).
pub fn is_extreme(v: &[f64], pts: &[Vec<f64>]) -> bool {
    let d = v.len();
    let others: Vec<&Vec<f64>> = pts.iter().filter(|p| dist(p, v) > 1e-12).collect();
    let mut idx: Vec<usize> = (0..=d).collect();
    if others.len() <= d {
        return true;
    }
    loop {
        if in_simplex(v, &idx.iter().map(|&i| others[i]).collect::<Vec<_>>()) {
            return false;
        }
        // next combination
        let mut k = d as isize;
        while k >= 0 && idx[k as usize] == others.len() - 1 - (d - k as usize) {
            k -= 1;
        }
        if k < 0 {
            return true;
        }
        idx[k as usize] += 1;
        for j in k as usize + 1..=d {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn in_simplex(v: &[f64], s: &[&Vec<f64>]) -> bool {
    let d = v.len();
    // solve sum_j w_j (s_j - s_0) = v - s_0 by Cramer-free elimination
    let mut m: Vec<Vec<f64>> = (0..d)
        .map(|r| {
            let mut row: Vec<f64> = (1..=d).map(|j| s[j][r] - s[0][r]).collect();
            row.push(v[r] - s[0][r]);
            row
        })
        .collect();
    for c in 0..d {
        let p = (c..d).max_by(|&a, &b| m[a][c].abs().partial_cmp(&m[b][c].abs()).unwrap()).unwrap();
        if m[p][c].abs() < 1e-12 {
            return false;
        }
        m.swap(c, p);
        for r in 0..d {
            if r != c {
                let f = m[r][c] / m[c][c];
                for k in c..=d {
                    let t = m[c][k];
                    m[r][k] -= f * t;
                }
            }
        }
    }
    let w: Vec<f64> = (0..d).map(|r| m[r][d] / m[r][r]).collect();
    let w0 = 1.0 - w.iter().sum::<f64>();
    w0 >= -1e-12 && w.iter().all(|&x| x >= -1e-12)
}
