//! Small dense linear-algebra helpers on `f64` slices.

use alloc::vec::Vec;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    sqrt(dot(a, a))
}

#[inline]
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[inline]
pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

#[inline]
pub fn scaled(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

#[inline]
pub fn dist_l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| libm::fabs(x - y)).sum()
}

/// `y += s * x`
#[inline]
pub fn axpy(y: &mut [f64], s: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

pub fn max_abs(points: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .flat_map(|p| p.iter())
        .fold(0.0f64, |m, x| m.max(libm::fabs(*x)))
}

/// Numerical rank of a set of row vectors (Gaussian elimination, full pivoting
/// over rows). `eps` is relative to the largest row norm.
pub fn rank(rows: &[&[f64]], eps: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut m: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    let scale = m.iter().map(|r| norm(r)).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let thresh = eps * scale;
    let mut rank = 0;
    for c in 0..cols {
        let mut best = rank;
        let mut best_val = 0.0;
        for (r, row) in m.iter().enumerate().skip(rank) {
            let v = libm::fabs(row[c]);
            if v > best_val {
                best_val = v;
                best = r;
            }
        }
        if best_val <= thresh {
            continue;
        }
        m.swap(rank, best);
        let pivot = m[rank][c];
        for r in rank + 1..m.len() {
            let f = m[r][c] / pivot;
            if f != 0.0 {
                for cc in c..cols {
                    let v = m[rank][cc];
                    m[r][cc] -= f * v;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Solve the square system `a x = b` with partial pivoting. Returns `None` if
/// a pivot falls below `eps` (relative to the matrix scale).
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>, eps: f64) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, x| m.max(libm::fabs(*x)));
    if scale == 0.0 {
        return if n == 0 { Some(Vec::new()) } else { None };
    }
    for c in 0..n {
        let mut best = c;
        for r in c + 1..n {
            if libm::fabs(a[r][c]) > libm::fabs(a[best][c]) {
                best = r;
            }
        }
        if libm::fabs(a[best][c]) <= eps * scale {
            return None;
        }
        a.swap(c, best);
        b.swap(c, best);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            if f != 0.0 {
                for cc in c..n {
                    let v = a[c][cc];
                    a[r][cc] -= f * v;
                }
                b[r] -= f * b[c];
            }
        }
    }
    let mut x = alloc::vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s -= a[r][c] * x[c];
        }
        x[r] = s / a[r][r];
    }
    Some(x)
}

/// Orthonormal basis of the complement of `v` (unit) in its ambient space.
pub fn orthogonal_complement(v: &[f64]) -> Vec<Vec<f64>> {
    let d = v.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d.saturating_sub(1));
    // Seed axes in order of increasing |v_i| so the projection stays well conditioned.
    let mut axes: Vec<usize> = (0..d).collect();
    axes.sort_by(|&a, &b| libm::fabs(v[a]).total_cmp(&libm::fabs(v[b])));
    for &ax in &axes {
        if basis.len() + 1 == d {
            break;
        }
        let mut e = alloc::vec![0.0; d];
        e[ax] = 1.0;
        for _ in 0..2 {
            let c = dot(&e, v);
            axpy(&mut e, -c, v);
            for b in &basis {
                let c = dot(&e, b);
                axpy(&mut e, -c, b);
            }
        }
        let n = norm(&e);
        if n > 1e-8 {
            basis.push(scaled(&e, 1.0 / n));
        }
    }
    basis
}

pub fn lex_cmp(a: &[f64], b: &[f64]) -> core::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            core::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}
