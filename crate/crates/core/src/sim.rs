//! Graded supports, exact bookkeeping for huge exponents, and the staged
//! collapse replay over a peeled simplex.

use crate::error::{Error, Result};
use crate::geometry::{minkowski_scaled_sum, scaled_tol, Point, Polytope};
use crate::lattice::{
    assign_scaled, collapse_piece, lattice_count, simplex_lattice, simplex_polytope, CoeffTag, ExpVec, MonomialRep,
    NilOracle, TagArena,
};
use crate::peel::{certify_peel, decomposition_ref, distance_diameter_check, peel, PeelDecomposition, PeelParams};
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Degrees of a polynomial representation, each with the ideal power its
/// homogeneous part's coefficients are known to lie in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSupport {
    grades: BTreeMap<u64, u64>,
}

impl GradedSupport {
    pub fn new(grades: BTreeMap<u64, u64>) -> Result<Self> {
        if grades.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(Self { grades })
    }

    /// Every degree in `lo..=hi` with the same class.
    pub fn uniform(lo: u64, hi: u64, class: u64) -> Result<Self> {
        Self::new((lo..=hi).map(|d| (d, class)).collect())
    }

    pub fn grades(&self) -> &BTreeMap<u64, u64> {
        &self.grades
    }

    pub fn min_degree(&self) -> u64 {
        *self.grades.keys().next().expect("nonempty")
    }

    pub fn degree(&self) -> u64 {
        *self.grades.keys().next_back().expect("nonempty")
    }

    pub fn length(&self) -> u64 {
        self.degree() - self.min_degree() + 1
    }

    pub fn class(&self, degree: u64) -> Option<u64> {
        self.grades.get(&degree).copied()
    }
}

/// Replaces the lowest grade `s_g` of `s` by `w s_g`. Class markers add under
/// products and take the minimum when grades meet.
pub fn star_op(s: &GradedSupport, w: &GradedSupport) -> Result<GradedSupport> {
    if w.min_degree() == 0 {
        return Err(Error::InvalidParameter("w must have min degree >= 1".into()));
    }
    let g = s.min_degree();
    let cg = s.grades[&g];
    let mut out = s.grades.clone();
    out.remove(&g);
    for (&d, &c) in &w.grades {
        let e = out.entry(g + d).or_insert(c + cg);
        *e = (*e).min(c + cg);
    }
    GradedSupport::new(out)
}

/// Result of [`lemma1_reduce`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub result: GradedSupport,
    pub iterations: usize,
}

/// Applies [`star_op`] until the length is at most `deg(w)`.
pub fn lemma1_reduce(s: &GradedSupport, w: &GradedSupport) -> Result<Reduction> {
    let d = w.degree();
    if w.min_degree() == 0 {
        return Err(Error::InvalidParameter("w must have min degree >= 1".into()));
    }
    if s.min_degree() < d {
        return Err(Error::InvalidParameter(format!(
            "s must start at degree >= deg(w) = {d}, found {}",
            s.min_degree()
        )));
    }
    let guard = s.length() as usize;
    let mut cur = s.clone();
    let mut iterations = 0;
    while cur.length() > d {
        if iterations >= guard {
            return Err(Error::LoopGuard(iterations));
        }
        cur = star_op(&cur, w)?;
        iterations += 1;
    }
    Ok(Reduction { result: cur, iterations })
}

/// A nonnegative integer stored as prime exponents, so that doubly
/// exponential stage quantities stay exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factored {
    zero: bool,
    factors: BTreeMap<u64, BigUint>,
}

/// Bit budget for materializing a [`Factored`] value.
const MAX_BITS: f64 = 65536.0;

impl Factored {
    pub fn zero() -> Self {
        Self {
            zero: true,
            factors: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self {
            zero: false,
            factors: BTreeMap::new(),
        }
    }

    pub fn from_u64(mut v: u64) -> Self {
        if v == 0 {
            return Self::zero();
        }
        let mut factors = BTreeMap::new();
        let mut p = 2u64;
        while p * p <= v {
            while v % p == 0 {
                *factors.entry(p).or_insert_with(BigUint::zero) += 1u32;
                v /= p;
            }
            p += 1;
        }
        if v > 1 {
            *factors.entry(v).or_insert_with(BigUint::zero) += 1u32;
        }
        Self { zero: false, factors }
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn factors(&self) -> &BTreeMap<u64, BigUint> {
        &self.factors
    }

    pub fn mul(&self, other: &Factored) -> Factored {
        if self.zero || other.zero {
            return Self::zero();
        }
        let mut factors = self.factors.clone();
        for (p, e) in &other.factors {
            *factors.entry(*p).or_insert_with(BigUint::zero) += e;
        }
        Self { zero: false, factors }
    }

    pub fn log2(&self) -> f64 {
        if self.zero {
            return f64::NEG_INFINITY;
        }
        self.factors
            .iter()
            .map(|(&p, e)| e.to_f64().unwrap_or(f64::INFINITY) * libm::log2(p as f64))
            .sum()
    }

    /// The value itself when it has at most `max_bits` bits.
    pub fn to_biguint(&self, max_bits: f64) -> Option<BigUint> {
        if self.zero {
            return Some(BigUint::zero());
        }
        if self.log2() > max_bits {
            return None;
        }
        let mut v = BigUint::one();
        for (&p, e) in &self.factors {
            v *= BigUint::from(p).pow(e.to_u32()?);
        }
        Some(v)
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.to_biguint(64.0)?.to_u64()
    }

    /// Exact comparison. Common factors cancel first; `None` only if the
    /// remaining cofactors are too large to materialize and too close to
    /// separate by logarithms.
    pub fn cmp_exact(&self, other: &Factored) -> Option<Ordering> {
        match (self.zero, other.zero) {
            (true, true) => return Some(Ordering::Equal),
            (true, false) => return Some(Ordering::Less),
            (false, true) => return Some(Ordering::Greater),
            _ => {}
        }
        let (a, b) = self.cancel(other);
        match (a.to_biguint(MAX_BITS), b.to_biguint(MAX_BITS)) {
            (Some(x), Some(y)) => Some(x.cmp(&y)),
            _ => {
                let (la, lb) = (a.log2(), b.log2());
                let gap = (la - lb).abs();
                (gap.is_finite() && gap > 1e-6 * la.abs().max(lb.abs())).then(|| la.partial_cmp(&lb).unwrap())
            }
        }
    }

    fn cancel(&self, other: &Factored) -> (Factored, Factored) {
        let mut a = self.factors.clone();
        let mut b = other.factors.clone();
        for (p, ea) in a.iter_mut() {
            if let Some(eb) = b.get_mut(p) {
                let m = ea.clone().min(eb.clone());
                *ea -= &m;
                *eb -= &m;
            }
        }
        a.retain(|_, e| !e.is_zero());
        b.retain(|_, e| !e.is_zero());
        (
            Factored {
                zero: false,
                factors: a,
            },
            Factored {
                zero: false,
                factors: b,
            },
        )
    }
}

impl fmt::Display for Factored {
    /// Decimal when short, otherwise `p^e*q^f`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = self.to_biguint(200.0) {
            return write!(f, "{v}");
        }
        let parts: Vec<String> = self.factors.iter().map(|(p, e)| format!("{p}^{e}")).collect();
        f.write_str(&parts.join("*"))
    }
}

/// One checked statement in a trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Claim {
    pub text: String,
    pub pass: bool,
    pub witness: Option<String>,
}

impl Claim {
    fn new(text: impl Into<String>, pass: bool, witness: Option<String>) -> Self {
        Self {
            text: text.into(),
            pass,
            witness: if pass { None } else { witness },
        }
    }
}

/// One collapse stage. The final record has `i` equal to the piece count and
/// no power step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageTrace {
    pub i: usize,
    /// Zero-based index of the collapsed piece.
    pub piece: usize,
    pub skipped: bool,
    /// Whether the region was enumerated term by term.
    pub concrete: bool,
    /// Product of earlier powers; the region is this multiple of the piece.
    pub scale: Factored,
    pub region_terms: Option<usize>,
    pub collapsed_tag: Option<u64>,
    pub collapsed_depth: Option<u64>,
    pub nil_index: Option<u64>,
    /// Power taken at this stage (one when skipped or final).
    pub l_i: Factored,
    /// Monomial degree after the stage.
    pub lambda: Factored,
    pub j_exp: Factored,
    /// `L_exp = J_exp + epsilon`.
    pub epsilon: u64,
    /// Vertex count of the remaining suffix polytope.
    pub suffix_vertices: usize,
    pub claims: Vec<Claim>,
}

impl StageTrace {
    pub fn l_exp(&self) -> String {
        match self.j_exp.to_biguint(200.0) {
            Some(j) => (j + self.epsilon).to_string(),
            None => format!("{}+{}", self.j_exp, self.epsilon),
        }
    }

    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTrace {
    pub n: usize,
    pub m: u64,
    pub oracle: NilOracle,
    pub initial_depth: u64,
    pub peel_ref: String,
    pub pieces: usize,
    /// Claims about the decomposition itself.
    pub setup: Vec<Claim>,
    pub stages: Vec<StageTrace>,
    pub final_stage: Option<StageTrace>,
    pub contradiction: bool,
}

impl ProofTrace {
    fn all_claims(&self) -> impl Iterator<Item = &Claim> {
        self.setup
            .iter()
            .chain(self.stages.iter().flat_map(|s| &s.claims))
            .chain(self.final_stage.iter().flat_map(|s| &s.claims))
    }

    pub fn failed_claim(&self) -> Option<&Claim> {
        self.all_claims().find(|c| !c.pass)
    }

    pub fn claim_count(&self) -> usize {
        self.all_claims().count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProofOptions {
    /// Starting coefficient depth; `2n + 1` when unset.
    pub initial_depth: Option<u64>,
    /// Largest lattice enumerated term by term.
    pub concrete_cap: u128,
    pub certify: bool,
}

impl Default for ProofOptions {
    fn default() -> Self {
        Self {
            initial_depth: None,
            concrete_cap: 20_000,
            certify: true,
        }
    }
}

struct Concrete {
    rep: MonomialRep,
    owner: BTreeMap<ExpVec, usize>,
}

fn scaled_point(a: &ExpVec, scale: f64) -> Point {
    a.exponents().iter().map(|&v| v as f64 / scale).collect()
}

/// Builds the term set of a concrete stage: lattice points of degree
/// `lambda` inside `scale * suffix`, each with a fresh tag of depth `depth`.
fn enumerate_stage(
    n: usize,
    lambda: u64,
    scale: f64,
    dec: &PeelDecomposition,
    from: usize,
    depth: u64,
    arena: &mut TagArena,
    eps: f64,
) -> Result<Concrete> {
    let suffix = &dec.remainders[from];
    let pts: Vec<ExpVec> = simplex_lattice(n, lambda)?
        .into_iter()
        .filter(|a| suffix.contains_point(&scaled_point(a, scale), eps))
        .collect();
    let bodies: Vec<&Polytope> = dec.pieces.iter().map(|p| &p.body).collect();
    let owners = assign_scaled(&pts, &bodies, from, scale, dec.params.tol)?;
    let mut rep = MonomialRep::new(n)?;
    for a in &pts {
        rep.insert(a.clone(), arena.fresh(depth, vec![]))?;
    }
    Ok(Concrete {
        rep,
        owner: pts.into_iter().zip(owners).collect(),
    })
}

fn fail_text(e: &Error) -> Option<String> {
    Some(e.to_string())
}

pub fn run_main_proof(n: usize, m: u64, oracle: &NilOracle, params: &PeelParams) -> Result<ProofTrace> {
    run_main_proof_with(n, m, oracle, params, &ProofOptions::default())
}

/// Replays the staged collapse on the peeled simplex `conv{m e_j}`.
///
/// Terms start at depth `2n + 1`. Stage `i` rewrites the terms over the
/// scaled piece `K_i` onto one monomial, asks the oracle for its nilpotency
/// index `k`, and raises everything to the power `l_i = k * lambda`, where
/// `lambda` is the current monomial degree. Regions are enumerated while the
/// lattice stays under `concrete_cap` points; beyond that the same claims are
/// checked from the piece geometry and exact budget arithmetic.
pub fn run_main_proof_with(
    n: usize,
    m: u64,
    oracle: &NilOracle,
    params: &PeelParams,
    opts: &ProofOptions,
) -> Result<ProofTrace> {
    if n < 2 {
        return Err(Error::InvalidParameter("the staged replay needs n >= 2".into()));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    oracle.validate()?;
    params.validate()?;
    let d0 = opts.initial_depth.unwrap_or(2 * n as u64 + 1);
    if d0 == 0 {
        return Err(Error::InvalidParameter("initial depth must be at least 1".into()));
    }
    let p = simplex_polytope(n, m)?;
    let dec = peel(&p, params)?;
    let mu = dec.pieces.len();
    let eps = scaled_tol(params.tol, m as f64);
    let mut trace = ProofTrace {
        n,
        m,
        oracle: *oracle,
        initial_depth: d0,
        peel_ref: decomposition_ref(&dec),
        pieces: mu,
        setup: Vec::new(),
        stages: Vec::new(),
        final_stage: None,
        contradiction: false,
    };
    if opts.certify {
        let c = certify_peel(&p, &dec, params)?;
        let witness = format!(
            "covers={} radii_ok={} suffix_ok={}",
            c.covers, c.piece_radii_ok, c.suffix_convex_ok
        );
        trace.setup.push(Claim::new(
            "peel certified: coverage, piece radii, suffix convexity",
            c.passed(),
            Some(witness),
        ));
    }
    let mut arena = TagArena::new();
    let mut state = match enumerate_stage(n, m, 1.0, &dec, 0, d0, &mut arena, eps) {
        Ok(c) => {
            trace.setup.push(Claim::new(
                "every lattice point lies in some piece",
                c.rep.len() as u128 == lattice_count(n as u64, m),
                Some(format!("{} of {} points", c.rep.len(), lattice_count(n as u64, m))),
            ));
            Some(c)
        }
        Err(e @ Error::Unassigned) => {
            trace.setup.push(Claim::new("every lattice point lies in some piece", false, fail_text(&e)));
            None
        }
        Err(e) => return Err(e),
    };
    if trace.setup.iter().any(|c| !c.pass) {
        return Ok(trace);
    }

    let two_n = Factored::from_u64(2 * n as u64);
    let mut scale = Factored::one();
    let mut lambda = Factored::from_u64(m);
    let mut j = Factored::from_u64(d0 - 1);
    let epsilon = 1u64;
    for i in 1..=mu {
        let idx = i - 1;
        let last = i == mu;
        let mut st = StageTrace {
            i,
            piece: idx,
            skipped: false,
            concrete: state.is_some(),
            scale: scale.clone(),
            region_terms: None,
            collapsed_tag: None,
            collapsed_depth: None,
            nil_index: None,
            l_i: Factored::one(),
            lambda: lambda.clone(),
            j_exp: j.clone(),
            epsilon,
            suffix_vertices: dec.remainders[idx].vertices().len(),
            claims: Vec::new(),
        };
        let need = two_n.mul(&scale);
        let budget_ok = matches!(j.cmp_exact(&need), Some(Ordering::Greater | Ordering::Equal));
        let tag: CoeffTag;
        match &state {
            Some(conc) => {
                let region: Vec<ExpVec> = conc.owner.iter().filter(|(_, &o)| o == idx).map(|(a, _)| a.clone()).collect();
                st.region_terms = Some(region.len());
                if last {
                    let stray = conc.owner.iter().find(|(_, &o)| o != idx);
                    st.claims.push(Claim::new(
                        "all remaining terms lie in the last piece",
                        stray.is_none(),
                        stray.map(|(a, o)| format!("{:?} in piece {o}", a.exponents())),
                    ));
                }
                if region.is_empty() {
                    st.skipped = true;
                    let scale_f = st.scale.to_u64().map(|s| s as f64).unwrap_or(f64::INFINITY);
                    let outside = conc
                        .rep
                        .terms()
                        .map(|(a, _)| a)
                        .find(|a| !dec.remainders[i.min(mu - 1)].contains_point(&scaled_point(a, scale_f), eps));
                    st.claims.push(Claim::new(
                        "empty region: support already lies in the next suffix",
                        last || outside.is_none(),
                        outside.map(|a| format!("{:?}", a.exponents())),
                    ));
                    let done = !st.passed();
                    if last {
                        trace.final_stage = Some(st);
                    } else {
                        trace.stages.push(st);
                    }
                    if done {
                        return Ok(trace);
                    }
                    continue;
                }
                // the coarse sufficiency bound first, then the exact rewrites
                let need_depth = need.to_u64().and_then(|v| v.checked_add(1));
                let shallow = region
                    .iter()
                    .filter_map(|a| conc.rep.get(a).map(|t| (a, t.depth)))
                    .find(|&(_, d)| !budget_ok || need_depth.is_none_or(|nd| d < nd));
                let collapsed = match shallow {
                    None => collapse_piece(&mut arena, &conc.rep, &region, &region[0], oracle),
                    Some((a, d)) => Err(Error::DepthShortfall {
                        at: a.exponents().to_vec(),
                        needed: need_depth.unwrap_or(u64::MAX),
                        available: d,
                    }),
                };
                match collapsed {
                    Ok(c) => {
                        st.claims.push(Claim::new("collapse depth: region rewrites onto one monomial", true, None));
                        tag = c.term.1;
                    }
                    Err(e) => {
                        st.claims.push(Claim::new(
                            "collapse depth: region rewrites onto one monomial",
                            false,
                            fail_text(&e),
                        ));
                        push_stage(&mut trace, st, last);
                        return Ok(trace);
                    }
                }
            }
            None => {
                let rep = distance_diameter_check(&dec.pieces[idx], 1, n, params.rho, params.tol)?;
                let ok = budget_ok && rep.max_l1 <= rep.bound_l1;
                st.claims.push(Claim::new(
                    "collapse depth: piece l1 diameter <= 2n rho and J_exp >= 2n * scale",
                    ok,
                    Some(format!(
                        "l1 diameter {} vs {}; J_exp {} vs {}",
                        rep.max_l1, rep.bound_l1, j, need
                    )),
                ));
                if !ok {
                    push_stage(&mut trace, st, last);
                    return Ok(trace);
                }
                tag = arena.fresh(0, Vec::new());
            }
        }
        let k = oracle.index(&tag);
        st.collapsed_tag = Some(tag.id);
        st.collapsed_depth = Some(tag.depth);
        st.nil_index = Some(k);
        if last {
            trace.final_stage = Some(st);
            break;
        }

        let l_i = Factored::from_u64(k).mul(&lambda);
        let low = Factored::from_u64(k - 1).mul(&lambda);
        st.claims.push(Claim::new(
            "power trade: (k - 1) * lambda < l_i",
            low.cmp_exact(&l_i) == Some(Ordering::Less),
            Some(format!("{low} vs {l_i}")),
        ));
        let prev_scale = scale.clone();
        lambda = lambda.mul(&l_i);
        scale = scale.mul(&l_i);
        j = j.mul(&l_i);
        st.claims.push(Claim::new(
            "degree identity: lambda = m * scale",
            lambda.cmp_exact(&Factored::from_u64(m).mul(&scale)) == Some(Ordering::Equal),
            Some(format!("{lambda} vs {m}*{scale}")),
        ));
        st.claims.push(Claim::new(
            "budget identity: J_exp = 2n * scale",
            j.cmp_exact(&two_n.mul(&scale)) == Some(Ordering::Equal),
            Some(format!("{j} vs {two_n}*{scale}")),
        ));
        // tP + sP = (t + s)P for the largest w-power t < k
        let t = (k - 1).max(1);
        let s = l_i.to_u64().filter(|&v| v > t && v <= 1 << 20).map_or(1, |v| v - t);
        let (_, mk) = minkowski_scaled_sum(&dec.remainders[i], t, s, 64, params.seed, params.tol)?;
        st.claims.push(Claim::new(
            format!("support scaling: {t}P + {s}P = {}P on the suffix", t + s),
            mk.passed(),
            mk.witness.map(|w| format!("{w:?}")),
        ));
        let nested = math_nested(&dec.remainders[i], &dec.remainders[idx], eps);
        let support = match &state {
            Some(conc) => {
                let sc = prev_scale.to_u64().unwrap_or(u64::MAX) as f64;
                conc.rep
                    .terms()
                    .map(|(a, _)| a)
                    .filter(|a| conc.owner[*a] != idx)
                    .find(|a| !dec.remainders[i].contains_point(&scaled_point(a, sc), eps))
                    .map(|a| format!("{:?}", a.exponents()))
            }
            None => nested,
        };
        st.claims.push(Claim::new(
            "remaining support lies in the scaled next suffix",
            support.is_none(),
            support,
        ));
        st.l_i = l_i;
        st.lambda = lambda.clone();
        st.j_exp = j.clone();

        state = None;
        if let (Some(lam), Some(sc), Some(jv)) = (lambda.to_u64(), scale.to_u64(), j.to_u64()) {
            if lattice_count(n as u64, lam) <= opts.concrete_cap {
                match enumerate_stage(n, lam, sc as f64, &dec, i, jv + epsilon, &mut arena, eps) {
                    Ok(c) => state = Some(c),
                    Err(e @ Error::Unassigned) => {
                        st.claims.push(Claim::new("scaled suffix lattice is covered", false, fail_text(&e)));
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        let done = !st.passed();
        trace.stages.push(st);
        if done {
            return Ok(trace);
        }
    }
    trace.contradiction = trace.failed_claim().is_none() && trace.final_stage.as_ref().is_some_and(|f| f.nil_index.is_some());
    Ok(trace)
}

fn push_stage(trace: &mut ProofTrace, st: StageTrace, last: bool) {
    if last {
        trace.final_stage = Some(st);
    } else {
        trace.stages.push(st);
    }
}

/// First vertex of `inner` outside `outer`, formatted.
fn math_nested(inner: &Polytope, outer: &Polytope, eps: f64) -> Option<String> {
    inner
        .ambient_vertices()
        .into_iter()
        .find(|v| !outer.contains_point(v, eps))
        .map(|v| format!("{v:?}"))
}

/// One explicitly expanded stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteStage {
    pub stage: usize,
    pub skipped: bool,
    pub power: u64,
    /// Scale after the stage.
    pub scale: u64,
    /// Distinct `(q-part, w-part, w-count)` keys in the expansion.
    pub terms: usize,
    pub support: Vec<ExpVec>,
    pub support_ok: bool,
    pub support_witness: Option<Vec<u64>>,
    pub min_depth: u64,
    /// `2n * scale + 1`.
    pub depth_budget: u64,
    pub depth_ok: bool,
    /// Factor indices of a minimal-depth term.
    pub witness_word: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteReport {
    pub n: usize,
    pub m: u64,
    pub k: u64,
    pub peel_ref: String,
    pub stages: Vec<BruteStage>,
}

impl BruteReport {
    pub fn passed(&self) -> bool {
        self.stages.iter().all(|s| s.support_ok && s.depth_ok)
    }
}

pub const DEFAULT_TERM_CAP: usize = 1_000_000;

type Key = (Vec<u64>, Vec<u64>, u64);
type Expansion = BTreeMap<Key, (u64, Vec<u32>)>;

fn add_vec(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn multiply(a: &Expansion, b: &Expansion, k: u64, cap: usize) -> Result<Expansion> {
    if a.len().saturating_mul(b.len()) > cap.saturating_mul(64) {
        return Err(Error::TooLarge { cap });
    }
    let mut out = Expansion::new();
    for ((ba, aa, ta), (da, wa)) in a {
        for ((bb, ab, tb), (db, wb)) in b {
            let t = ta + tb;
            if t >= k {
                continue;
            }
            let key = (add_vec(ba, bb), add_vec(aa, ab), t);
            let d = da + db;
            match out.get_mut(&key) {
                Some(v) if v.0 <= d => {}
                Some(v) => *v = (d, [wa.as_slice(), wb].concat()),
                None => {
                    out.insert(key, (d, [wa.as_slice(), wb].concat()));
                    if out.len() > cap {
                        return Err(Error::TooLarge { cap });
                    }
                }
            }
        }
    }
    Ok(out)
}

fn power(base: &Expansion, mut e: u64, k: u64, n: usize, cap: usize) -> Result<Expansion> {
    let mut acc = Expansion::new();
    acc.insert((vec![0; n], vec![0; n], 0), (0, Vec::new()));
    let mut b = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = multiply(&acc, &b, k, cap)?;
        }
        e >>= 1;
        if e > 0 {
            b = multiply(&b, &b, k, cap)?;
        }
    }
    Ok(acc)
}

pub fn brute_force_expand(n: usize, m: u64, k: u64, stage_limit: usize, params: &PeelParams) -> Result<BruteReport> {
    brute_force_expand_with(n, m, k, stage_limit, params, DEFAULT_TERM_CAP)
}

/// Expands `(q + w)^l` factor by factor with `w^k = 0`, tracking for each
/// `(q-part, w-part, w-count)` the smallest summed depth and a word of factor
/// indices realizing it. The w-part of degree `t * lambda` is then rewritten
/// onto `t * gamma` for the first q-exponent `gamma`, and every result is
/// checked against the scaled suffix and the depth budget `2n * scale + 1`.
pub fn brute_force_expand_with(
    n: usize,
    m: u64,
    k: u64,
    stage_limit: usize,
    params: &PeelParams,
    cap: usize,
) -> Result<BruteReport> {
    if n < 2 || m == 0 || k == 0 {
        return Err(Error::InvalidParameter("need n >= 2, m >= 1, k >= 1".into()));
    }
    let p = simplex_polytope(n, m)?;
    let dec = peel(&p, params)?;
    let mu = dec.pieces.len();
    let bodies: Vec<&Polytope> = dec.pieces.iter().map(|pc| &pc.body).collect();
    let eps = scaled_tol(params.tol, m as f64);
    let mut terms: BTreeMap<ExpVec, u64> = simplex_lattice(n, m)?.into_iter().map(|a| (a, 2 * n as u64 + 1)).collect();
    let (mut scale, mut lambda) = (1u64, m);
    let mut stages = Vec::new();
    for s in 1..=stage_limit.min(mu.saturating_sub(1)) {
        let idx = s - 1;
        let pts: Vec<ExpVec> = terms.keys().cloned().collect();
        let owners = assign_scaled(&pts, &bodies, idx, scale as f64, params.tol)?;
        let (w, q): (Vec<_>, Vec<_>) = pts.iter().zip(&owners).partition(|(_, &o)| o == idx);
        if w.is_empty() {
            stages.push(BruteStage {
                stage: s,
                skipped: true,
                power: 1,
                scale,
                terms: terms.len(),
                support: pts.clone(),
                support_ok: true,
                support_witness: None,
                min_depth: terms.values().copied().min().unwrap_or(0),
                depth_budget: 2 * n as u64 * scale + 1,
                depth_ok: true,
                witness_word: Vec::new(),
            });
            continue;
        }
        let l = k.checked_mul(lambda).ok_or(Error::TooLarge { cap })?;
        let zero = vec![0u64; n];
        let mut base = Expansion::new();
        for (f, (a, _)) in pts.iter().zip(&owners).enumerate() {
            let d = terms[a];
            let key = if owners[f] == idx {
                (zero.clone(), a.exponents().to_vec(), 1)
            } else {
                (a.exponents().to_vec(), zero.clone(), 0)
            };
            base.insert(key, (d, vec![f as u32]));
        }
        let exp = power(&base, l, k, n, cap)?;
        let new_scale = scale.checked_mul(l).ok_or(Error::TooLarge { cap })?;
        let budget = 2 * n as u64 * new_scale + 1;
        let gamma = q.first().map(|(a, _)| a.exponents().to_vec());
        let mut next: BTreeMap<ExpVec, u64> = BTreeMap::new();
        let (mut support_ok, mut support_witness) = (true, None);
        let (mut min_depth, mut witness_word) = (u64::MAX, Vec::new());
        let mut depth_ok = true;
        for ((beta, alpha, t), (d, word)) in &exp {
            let (target, d) = match (&gamma, *t) {
                (_, 0) => (beta.clone(), *d),
                (Some(g), t) => {
                    let tg: Vec<u64> = g.iter().map(|x| x * t).collect();
                    let steps = ExpVec::new(alpha.clone())?.l1_distance(&ExpVec::new(tg.clone())?) / 2;
                    if *d < steps {
                        depth_ok = false;
                    }
                    (add_vec(&tg, beta), d.saturating_sub(steps))
                }
                (None, _) => unreachable!("terms with t < k need a q factor once l >= k"),
            };
            let x: Point = target.iter().map(|&v| v as f64 / new_scale as f64).collect();
            if !dec.remainders[s].contains_point(&x, eps) && support_ok {
                support_ok = false;
                support_witness = Some(target.clone());
            }
            if d < min_depth {
                min_depth = d;
                witness_word = word.clone();
            }
            let e = next.entry(ExpVec::new(target)?).or_insert(d);
            *e = (*e).min(d);
        }
        depth_ok &= min_depth >= budget;
        stages.push(BruteStage {
            stage: s,
            skipped: false,
            power: l,
            scale: new_scale,
            terms: exp.len(),
            support: next.keys().cloned().collect(),
            support_ok,
            support_witness,
            min_depth,
            depth_budget: budget,
            depth_ok,
            witness_word,
        });
        terms = next;
        scale = new_scale;
        lambda = lambda.checked_mul(l).ok_or(Error::TooLarge { cap })?;
    }
    Ok(BruteReport {
        n,
        m,
        k,
        peel_ref: decomposition_ref(&dec),
        stages,
    })
}
