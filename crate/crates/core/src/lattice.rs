//! Exponent vectors, coefficient tags and the depth-counting rewrite calculus.
//!
//! A coefficient's depth `d` models membership in the `d`-th power of a base
//! ideal. Moving one unit of exponent from one variable to another spends one
//! unit of depth, so reaching `beta` from `alpha` costs `|alpha - beta|_1 / 2`.

use crate::error::{Error, Result};
use crate::geometry::{scaled_tol, Point, Polytope};
use crate::peel::index::PieceIndex;
use crate::peel::PeelDecomposition;
use crate::{math, rng};
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

/// A multi-index `alpha` with `n >= 1` nonnegative entries.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExpVec(Vec<u64>);

impl ExpVec {
    pub fn new(exponents: Vec<u64>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::InvalidParameter("exponent vector needs n >= 1".into()));
        }
        Ok(Self(exponents))
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// `|alpha|`, the sum of the entries.
    pub fn degree(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u64] {
        &self.0
    }

    pub fn l1_distance(&self, other: &ExpVec) -> u64 {
        self.0.iter().zip(&other.0).map(|(&a, &b)| a.abs_diff(b)).sum()
    }

    pub fn to_point(&self) -> Point {
        self.0.iter().map(|&a| a as f64).collect()
    }
}

/// Opaque coefficient label with its known ideal depth and parent ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffTag {
    pub id: u64,
    pub depth: u64,
    pub lineage: Vec<u64>,
}

/// Hands out tag ids in creation order.
#[derive(Debug, Clone, Default)]
pub struct TagArena {
    next: u64,
}

impl TagArena {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh(&mut self, depth: u64, lineage: Vec<u64>) -> CoeffTag {
        let id = self.next;
        self.next += 1;
        CoeffTag { id, depth, lineage }
    }

    pub fn issued(&self) -> u64 {
        self.next
    }
}

pub type Term = (ExpVec, CoeffTag);

/// A formal sum of tagged monomials, one tag per exponent vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialRep {
    n: usize,
    terms: BTreeMap<ExpVec, CoeffTag>,
}

impl MonomialRep {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        Ok(Self { n, terms: BTreeMap::new() })
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = Term>) -> Result<Self> {
        let mut rep = Self::new(n)?;
        for (a, t) in terms {
            if rep.insert(a, t)?.is_some() {
                return Err(Error::InvalidParameter("duplicate exponent vector".into()));
            }
        }
        Ok(rep)
    }

    /// Inserts a term, returning the tag it replaced.
    pub fn insert(&mut self, alpha: ExpVec, tag: CoeffTag) -> Result<Option<CoeffTag>> {
        if alpha.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: alpha.n(),
            });
        }
        Ok(self.terms.insert(alpha, tag))
    }

    pub fn remove(&mut self, alpha: &ExpVec) -> Option<CoeffTag> {
        self.terms.remove(alpha)
    }

    pub fn get(&self, alpha: &ExpVec) -> Option<&CoeffTag> {
        self.terms.get(alpha)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExpVec, &CoeffTag)> {
        self.terms.iter()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u64> {
        self.terms.keys().map(ExpVec::degree).max()
    }

    pub fn min_degree(&self) -> Option<u64> {
        self.terms.keys().map(ExpVec::degree).min()
    }

    /// `deg - min + 1`.
    pub fn length(&self) -> Option<u64> {
        Some(self.degree()? - self.min_degree()? + 1)
    }
}

/// Assigns each collapsed coefficient a nilpotency index `k >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NilOracle {
    Constant(u64),
    /// Indices drawn uniformly from `1..=max`, keyed by tag id.
    Seeded { max: u64, seed: u64 },
}

impl Default for NilOracle {
    fn default() -> Self {
        NilOracle::Constant(2)
    }
}

impl NilOracle {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NilOracle::Constant(0) | NilOracle::Seeded { max: 0, .. } => {
                Err(Error::InvalidParameter("nilpotency index must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn index(&self, tag: &CoeffTag) -> u64 {
        match *self {
            NilOracle::Constant(k) => k.max(1),
            NilOracle::Seeded { max, seed } => 1 + rng::splitmix64(seed ^ rng::splitmix64(tag.id)) % max.max(1),
        }
    }
}

/// Number of degree-`m` multi-indices in `n` variables, `C(m + n - 1, n - 1)`.
pub fn lattice_count(n: u64, m: u64) -> u128 {
    if n == 0 {
        return 0;
    }
    let k = (n - 1).min(m);
    let mut c: u128 = 1;
    for i in 0..k as u128 {
        let top = m as u128 + n as u128 - 1 - i;
        c = match c.checked_mul(top) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    c
}

/// All multi-indices of degree `m` in `n` variables, in decreasing
/// lexicographic order.
pub fn simplex_lattice(n: usize, m: u64) -> Result<Vec<ExpVec>> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("simplex lattice needs n >= 1 and m >= 1".into()));
    }
    let mut out = Vec::new();
    let mut cur = vec![0u64; n];
    fill(&mut cur, 0, m, &mut out);
    Ok(out)
}

fn fill(cur: &mut Vec<u64>, i: usize, left: u64, out: &mut Vec<ExpVec>) {
    if i + 1 == cur.len() {
        cur[i] = left;
        out.push(ExpVec(cur.clone()));
        return;
    }
    for a in (0..=left).rev() {
        cur[i] = a;
        fill(cur, i + 1, left - a, out);
    }
}

/// `conv{m e_j}`, living in the hyperplane `sum x = m`.
pub fn simplex_polytope(n: usize, m: u64) -> Result<Polytope> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("simplex needs n >= 1 and m >= 1".into()));
    }
    let verts: Vec<Point> = (0..n)
        .map(|j| {
            let mut v = vec![0.0; n];
            v[j] = m as f64;
            v
        })
        .collect();
    Polytope::from_vertices(&verts, crate::DEFAULT_TOL)
}

/// First piece index `>= from` whose body contains `x / scale`, for each
/// point. Fails if some point has no piece.
pub(crate) fn assign_scaled(points: &[ExpVec], bodies: &[&Polytope], from: usize, scale: f64, tol: f64) -> Result<Vec<usize>> {
    let Some(first) = bodies.first() else {
        return Err(Error::EmptyInput);
    };
    let mag = math::max_abs(&first.ambient_vertices()).max(1.0);
    let eps = scaled_tol(tol, mag);
    // cells about a quarter of the mean piece extent
    let widths: f64 = bodies
        .iter()
        .map(|b| {
            let (lo, hi) = b.ambient_bounds();
            lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0, f64::max)
        })
        .sum();
    let cell = widths / bodies.len() as f64 / 4.0;
    let cell = if cell > 0.0 { cell } else { mag };
    let index = PieceIndex::new(bodies, cell, eps);
    points
        .iter()
        .map(|a| {
            let x: Point = a.0.iter().map(|&v| v as f64 / scale).collect();
            index
                .first(&x, from, |i| bodies[i].contains_point(&x, eps))
                .ok_or(Error::Unassigned)
        })
        .collect()
}

/// Maps each point to the first piece of `dec` containing it.
pub fn assign_pieces(points: &[ExpVec], dec: &PeelDecomposition, tol: f64) -> Result<BTreeMap<ExpVec, usize>> {
    let bodies: Vec<&Polytope> = dec.pieces.iter().map(|p| &p.body).collect();
    let idx = assign_scaled(points, &bodies, 0, 1.0, tol)?;
    Ok(points.iter().cloned().zip(idx).collect())
}

/// Moves one unit of exponent from coordinate `i` to coordinate `j`,
/// spending one unit of depth.
pub fn rewrite_step(arena: &mut TagArena, term: &Term, i: usize, j: usize) -> Result<Term> {
    let (alpha, tag) = term;
    let n = alpha.n();
    if i >= n || j >= n || i == j {
        return Err(Error::InvalidParameter(format!("bad rewrite coordinates ({i}, {j}) for n = {n}")));
    }
    if alpha.0[i] == 0 {
        return Err(Error::ZeroExponent { index: i });
    }
    if tag.depth == 0 {
        return Err(Error::DepthShortfall {
            at: alpha.0.clone(),
            needed: 1,
            available: 0,
        });
    }
    let mut e = alpha.0.clone();
    e[i] -= 1;
    e[j] += 1;
    Ok((ExpVec(e), arena.fresh(tag.depth - 1, vec![tag.id])))
}

/// A shortest sequence of `(from, to)` unit moves turning `alpha` into `beta`.
pub fn rewrite_path(alpha: &ExpVec, beta: &ExpVec) -> Result<Vec<(usize, usize)>> {
    check_same_shape(alpha, beta)?;
    let mut surplus = Vec::new();
    let mut deficit = Vec::new();
    for (i, (&a, &b)) in alpha.0.iter().zip(&beta.0).enumerate() {
        surplus.extend(core::iter::repeat_n(i, a.saturating_sub(b) as usize));
        deficit.extend(core::iter::repeat_n(i, b.saturating_sub(a) as usize));
    }
    Ok(surplus.into_iter().zip(deficit).collect())
}

fn check_same_shape(alpha: &ExpVec, beta: &ExpVec) -> Result<()> {
    if alpha.n() != beta.n() {
        return Err(Error::DimensionMismatch {
            expected: alpha.n(),
            found: beta.n(),
        });
    }
    if alpha.degree() != beta.degree() {
        return Err(Error::DegreeMismatch {
            from: alpha.degree(),
            to: beta.degree(),
        });
    }
    Ok(())
}

/// Outcome of [`rewrite_to`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RewriteReport {
    pub steps: u64,
    /// Whether the starting depth met the coarse bound `2 n ell`.
    pub bound_sufficient: bool,
}

/// Rewrites a term to exponent `target` in `|alpha - beta|_1 / 2` unit moves.
/// `ell` only feeds the coarse sufficiency flag of the report.
pub fn rewrite_to(arena: &mut TagArena, term: &Term, target: &ExpVec, ell: u64) -> Result<(Term, RewriteReport)> {
    let (alpha, tag) = term;
    check_same_shape(alpha, target)?;
    let steps = alpha.l1_distance(target) / 2;
    let report = RewriteReport {
        steps,
        bound_sufficient: tag.depth as u128 >= 2 * alpha.n() as u128 * ell as u128,
    };
    if steps == 0 {
        return Ok((term.clone(), report));
    }
    if tag.depth < steps {
        return Err(Error::DepthShortfall {
            at: alpha.0.clone(),
            needed: steps,
            available: tag.depth,
        });
    }
    Ok(((target.clone(), arena.fresh(tag.depth - steps, vec![tag.id])), report))
}

/// A piece region rewritten onto one monomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collapse {
    pub term: Term,
    pub nil_index: u64,
    pub max_steps: u64,
}

/// Rewrites every region term onto `anchor` and sums the coefficients into a
/// single fresh tag of minimal rewritten depth.
pub fn collapse_piece(
    arena: &mut TagArena,
    rep: &MonomialRep,
    region: &[ExpVec],
    anchor: &ExpVec,
    oracle: &NilOracle,
) -> Result<Collapse> {
    oracle.validate()?;
    if !region.contains(anchor) {
        return Err(Error::InvalidParameter("anchor is not in the region".into()));
    }
    let mut rewritten = Vec::with_capacity(region.len());
    let mut max_steps = 0;
    for a in region {
        let tag = rep
            .get(a)
            .ok_or_else(|| Error::InvalidParameter(format!("region point {:?} has no term", a.0)))?;
        let ((_, t), rep) = rewrite_to(arena, &(a.clone(), tag.clone()), anchor, 1)?;
        max_steps = max_steps.max(rep.steps);
        rewritten.push(t);
    }
    let tag = if let [only] = rewritten.as_slice() {
        only.clone()
    } else {
        let depth = rewritten.iter().map(|t| t.depth).min().unwrap_or(0);
        arena.fresh(depth, rewritten.iter().map(|t| t.id).collect())
    };
    let nil_index = oracle.index(&tag);
    Ok(Collapse {
        term: (anchor.clone(), tag),
        nil_index,
        max_steps,
    })
}

/// Lifts every term to the top degree `D` by raising its first exponent,
/// spending `D - |alpha|` depth. Terms landing on the same vector merge.
pub fn homogenize(arena: &mut TagArena, rep: &MonomialRep, d: u64) -> Result<MonomialRep> {
    let Some(top) = rep.degree() else {
        return Ok(rep.clone());
    };
    let mut out: BTreeMap<ExpVec, CoeffTag> = BTreeMap::new();
    for (alpha, tag) in rep.terms() {
        let j = top - alpha.degree();
        if j > d {
            return Err(Error::InvalidParameter(format!(
                "term {:?} is {j} below the top degree, more than {d}",
                alpha.0
            )));
        }
        if tag.depth < j {
            return Err(Error::DepthShortfall {
                at: alpha.0.clone(),
                needed: j,
                available: tag.depth,
            });
        }
        let (beta, t) = if j == 0 {
            (alpha.clone(), tag.clone())
        } else {
            let mut e = alpha.0.clone();
            e[0] += j;
            (ExpVec(e), arena.fresh(tag.depth - j, vec![tag.id]))
        };
        let merged = match out.remove(&beta) {
            Some(prev) => arena.fresh(prev.depth.min(t.depth), vec![prev.id, t.id]),
            None => t,
        };
        out.insert(beta, merged);
    }
    Ok(MonomialRep { n: rep.n, terms: out })
}

/// Integer points of `scale * body`, found by scanning its bounding box.
pub fn lattice_points_in(body: &Polytope, scale: u64, tol: f64) -> Result<Vec<Vec<i64>>> {
    if scale == 0 {
        return Err(Error::InvalidParameter("scale must be at least 1".into()));
    }
    let s = scale as f64;
    let (lo, hi) = body.ambient_bounds();
    let eps = scaled_tol(tol, math::max_abs(&body.ambient_vertices()));
    let lo: Vec<i64> = lo.iter().map(|&v| libm::ceil(v * s - eps * s) as i64).collect();
    let hi: Vec<i64> = hi.iter().map(|&v| libm::floor(v * s + eps * s) as i64).collect();
    if lo.iter().zip(&hi).any(|(a, b)| a > b) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut cur = lo.clone();
    loop {
        let x: Point = cur.iter().map(|&v| v as f64 / s).collect();
        if body.contains_point(&x, eps) {
            out.push(cur.clone());
        }
        let mut i = 0;
        loop {
            if i == cur.len() {
                return Ok(out);
            }
            if cur[i] < hi[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = lo[i];
            i += 1;
        }
    }
}

/// Pairwise distances among the lattice points of a scaled piece, measured
/// against the chain `|.|_1 <= sqrt(n) |.|_2 <= sqrt(n) 2 ell rho <= 2 n ell rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub points: usize,
    /// Exact maximum pairwise l1 distance.
    pub max_l1: u64,
    pub max_l2: f64,
    pub n: usize,
    pub ell: u64,
    pub rho: f64,
}

impl ChainReport {
    pub fn l1_within_l2(&self) -> bool {
        self.max_l1 as f64 <= math::sqrt(self.n as f64) * self.max_l2 * (1.0 + 1e-12)
    }

    pub fn l2_within_diameter(&self, tol: f64) -> bool {
        self.max_l2 <= 2.0 * self.ell as f64 * self.rho * (1.0 + tol)
    }

    /// `max_l1 <= 2 n ell`, in integers. Only meaningful for `rho = 1`.
    pub fn l1_within_bound(&self) -> bool {
        self.max_l1 as u128 <= 2 * self.n as u128 * self.ell as u128
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.l1_within_l2() && self.l2_within_diameter(tol) && self.l1_within_bound()
    }
}

/// Checks the distance chain on the integer points of `ell * body`.
pub fn inequality_chain(body: &Polytope, ell: u64, rho: f64, tol: f64) -> Result<ChainReport> {
    let pts = lattice_points_in(body, ell, tol)?;
    let n = body.ambient_dim();
    // max l1 distance is the largest spread of sign-vector projections
    let mut max_l1 = 0u64;
    for mask in 0u32..(1 << n.saturating_sub(1)) {
        let proj = |p: &Vec<i64>| -> i64 {
            p.iter()
                .enumerate()
                .map(|(i, &v)| if i > 0 && mask >> (i - 1) & 1 == 1 { -v } else { v })
                .sum()
        };
        if let (Some(a), Some(b)) = (pts.iter().map(proj).max(), pts.iter().map(proj).min()) {
            max_l1 = max_l1.max(a.abs_diff(b));
        }
    }
    let mut max_l2 = 0.0f64;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            let d2: i64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
            max_l2 = max_l2.max(d2 as f64);
        }
    }
    Ok(ChainReport {
        points: pts.len(),
        max_l1,
        max_l2: math::sqrt(max_l2),
        n,
        ell,
        rho,
    })
}
