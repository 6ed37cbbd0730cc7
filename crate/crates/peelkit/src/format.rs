//! JSON file formats and their conversions to and from core types.

use anyhow::{bail, Context, Result};
use peelkit_core::geometry::{AffineHull, Halfspace, Hyperplane, Point, Polytope};
use peelkit_core::lattice::NilOracle;
use peelkit_core::peel::{PeelCertificate, PeelDecomposition, PeelParams, PeelPiece, StageRecord};
use peelkit_core::sim::{BruteReport, Claim, ProofTrace, StageTrace};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

fn default_tol() -> f64 {
    peelkit_core::DEFAULT_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfspaceJson {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// A polytope given by ambient vertices, by halfspaces, or both. Halfspaces
/// are only read when no vertices are given; for lower-dimensional bodies the
/// emitted halfspaces describe the body within its affine hull.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeJson {
    pub dim: usize,
    #[serde(default)]
    pub vertices: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halfspaces: Option<Vec<HalfspaceJson>>,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

impl PolytopeJson {
    pub fn from_polytope(p: &Polytope, tol: f64) -> Self {
        Self {
            dim: p.ambient_dim(),
            vertices: p.ambient_vertices(),
            halfspaces: Some(
                p.ambient_halfspaces()
                    .into_iter()
                    .map(|h| HalfspaceJson {
                        normal: h.normal,
                        offset: h.offset,
                    })
                    .collect(),
            ),
            tol,
        }
    }

    /// Checks shapes and finiteness, naming the offending field.
    pub fn validate(&self, field: &str) -> Result<()> {
        if self.dim == 0 {
            bail!("{field}.dim: must be at least 1");
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            bail!("{field}.tol: must be positive and finite");
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if v.len() != self.dim {
                bail!("{field}.vertices[{i}]: expected {} coordinates, found {}", self.dim, v.len());
            }
            if v.iter().any(|x| !x.is_finite()) {
                bail!("{field}.vertices[{i}]: non-finite coordinate");
            }
        }
        for (i, h) in self.halfspaces.iter().flatten().enumerate() {
            if h.normal.len() != self.dim {
                bail!(
                    "{field}.halfspaces[{i}].normal: expected {} coordinates, found {}",
                    self.dim,
                    h.normal.len()
                );
            }
            if h.normal.iter().chain([&h.offset]).any(|x| !x.is_finite()) {
                bail!("{field}.halfspaces[{i}]: non-finite value");
            }
        }
        if self.vertices.is_empty() && self.halfspaces.as_ref().is_none_or(|h| h.is_empty()) {
            bail!("{field}: needs vertices or halfspaces");
        }
        Ok(())
    }

    pub fn to_polytope(&self, field: &str) -> Result<Polytope> {
        self.validate(field)?;
        if !self.vertices.is_empty() {
            return Polytope::from_vertices(&self.vertices, self.tol).with_context(|| format!("{field}.vertices"));
        }
        let hs: Vec<Halfspace> = self
            .halfspaces
            .iter()
            .flatten()
            .enumerate()
            .map(|(i, h)| Halfspace::new(h.normal.clone(), h.offset).with_context(|| format!("{field}.halfspaces[{i}]")))
            .collect::<Result<_>>()?;
        Polytope::from_halfspaces(&hs, AffineHull::ambient(self.dim), self.tol).with_context(|| format!("{field}.halfspaces"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsJson {
    pub rho: f64,
    pub tol: f64,
    pub max_stages: usize,
    pub seed: u64,
    pub coverage_samples: usize,
    pub suffix_samples: usize,
}

impl From<&PeelParams> for ParamsJson {
    fn from(p: &PeelParams) -> Self {
        Self {
            rho: p.rho,
            tol: p.tol,
            max_stages: p.max_stages,
            seed: p.seed,
            coverage_samples: p.coverage_samples,
            suffix_samples: p.suffix_samples,
        }
    }
}

impl From<&ParamsJson> for PeelParams {
    fn from(p: &ParamsJson) -> Self {
        Self {
            rho: p.rho,
            tol: p.tol,
            max_stages: p.max_stages,
            seed: p.seed,
            coverage_samples: p.coverage_samples,
            suffix_samples: p.suffix_samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageJson {
    pub stage: usize,
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub halfspaces: usize,
    pub cuts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceJson {
    pub stage: usize,
    pub order: usize,
    pub cut_plane: Option<HalfspaceJson>,
    pub polytope: PolytopeJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionJson {
    pub input: PolytopeJson,
    /// SHA-256 of the input polytope's canonical JSON.
    pub input_sha256: String,
    pub decomposition_ref: String,
    pub params: ParamsJson,
    pub center: Vec<f64>,
    pub radius: f64,
    pub gamma: f64,
    pub stage_radii: Vec<f64>,
    pub stages: Vec<StageJson>,
    pub pieces: Vec<PieceJson>,
    pub remainders: Vec<PolytopeJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateJson>,
}

pub fn sha256_json<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("serializable");
    hex::encode(Sha256::digest(bytes))
}

impl DecompositionJson {
    pub fn from_decomposition(input: &PolytopeJson, dec: &PeelDecomposition) -> Self {
        let tol = dec.params.tol;
        Self {
            input: input.clone(),
            input_sha256: sha256_json(input),
            decomposition_ref: peelkit_core::peel::decomposition_ref(dec),
            params: (&dec.params).into(),
            center: dec.center.clone(),
            radius: dec.radius,
            gamma: dec.gamma,
            stage_radii: dec.stage_radii.clone(),
            stages: dec
                .stages
                .iter()
                .map(|s| StageJson {
                    stage: s.stage,
                    inner_radius: s.inner_radius,
                    outer_radius: s.outer_radius,
                    halfspaces: s.halfspaces,
                    cuts: s.cuts,
                })
                .collect(),
            pieces: dec
                .pieces
                .iter()
                .map(|p| PieceJson {
                    stage: p.stage,
                    order: p.order_index,
                    cut_plane: p.cut_plane.as_ref().map(|h| HalfspaceJson {
                        normal: h.normal.clone(),
                        offset: h.offset,
                    }),
                    polytope: PolytopeJson::from_polytope(&p.body, tol),
                })
                .collect(),
            remainders: dec
                .remainders
                .iter()
                .map(|r| PolytopeJson {
                    halfspaces: None,
                    ..PolytopeJson::from_polytope(r, tol)
                })
                .collect(),
            certificate: None,
        }
    }

    /// Rebuilds the decomposition; bodies are recomputed from their vertices.
    pub fn to_decomposition(&self) -> Result<(Polytope, PeelDecomposition)> {
        let input = self.input.to_polytope("input")?;
        self.decomposition_of(input)
    }

    /// Like [`Self::to_decomposition`] with the input body already built.
    pub fn decomposition_of(&self, input: Polytope) -> Result<(Polytope, PeelDecomposition)> {
        if self.pieces.is_empty() {
            bail!("pieces: must not be empty");
        }
        let pieces = self
            .pieces
            .iter()
            .enumerate()
            .map(|(i, p)| {
                Ok(PeelPiece {
                    body: p.polytope.to_polytope(&format!("pieces[{i}].polytope"))?,
                    stage: p.stage,
                    cut_plane: p
                        .cut_plane
                        .as_ref()
                        .map(|h| Hyperplane::new(h.normal.clone(), h.offset))
                        .transpose()
                        .with_context(|| format!("pieces[{i}].cut_plane"))?,
                    order_index: p.order,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let remainders = self
            .remainders
            .iter()
            .enumerate()
            .map(|(i, r)| r.to_polytope(&format!("remainders[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let dec = PeelDecomposition {
            params: (&self.params).into(),
            center: self.center.clone(),
            radius: self.radius,
            gamma: self.gamma,
            stage_radii: self.stage_radii.clone(),
            stages: self
                .stages
                .iter()
                .map(|s| StageRecord {
                    stage: s.stage,
                    inner_radius: s.inner_radius,
                    outer_radius: s.outer_radius,
                    halfspaces: s.halfspaces,
                    cuts: s.cuts,
                })
                .collect(),
            pieces,
            remainders,
        };
        dec.params.validate().context("params")?;
        Ok((input, dec))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceReportJson {
    pub index: usize,
    pub stage: usize,
    pub radius: f64,
    pub radius_ok: bool,
    pub suffix_ok: bool,
    pub witness: Option<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuffixWitnessJson {
    pub index: usize,
    pub point: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateJson {
    pub passed: bool,
    pub covers: bool,
    pub samples: usize,
    pub covered: usize,
    pub coverage_witness: Option<Point>,
    pub piece_radii_ok: bool,
    pub max_radius: f64,
    pub suffix_convex_ok: bool,
    pub suffix_witness: Option<SuffixWitnessJson>,
    pub per_piece: Vec<PieceReportJson>,
}

impl From<&PeelCertificate> for CertificateJson {
    fn from(c: &PeelCertificate) -> Self {
        Self {
            passed: c.passed(),
            covers: c.covers,
            samples: c.samples,
            covered: c.covered,
            coverage_witness: c.coverage_witness.clone(),
            piece_radii_ok: c.piece_radii_ok,
            max_radius: c.max_radius,
            suffix_convex_ok: c.suffix_convex_ok,
            suffix_witness: c
                .suffix_witness
                .as_ref()
                .map(|(index, point)| SuffixWitnessJson {
                    index: *index,
                    point: point.clone(),
                }),
            per_piece: c
                .per_piece
                .iter()
                .map(|r| PieceReportJson {
                    index: r.index,
                    stage: r.stage,
                    radius: r.radius,
                    radius_ok: r.radius_ok,
                    suffix_ok: r.suffix_ok,
                    witness: r.witness.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum OracleJson {
    Constant { k: u64 },
    Random { max: u64, seed: u64 },
}

impl From<&NilOracle> for OracleJson {
    fn from(o: &NilOracle) -> Self {
        match *o {
            NilOracle::Constant(k) => OracleJson::Constant { k },
            NilOracle::Seeded { max, seed } => OracleJson::Random { max, seed },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClaimJson {
    pub text: String,
    pub pass: bool,
    pub witness: Option<String>,
}

impl From<&Claim> for ClaimJson {
    fn from(c: &Claim) -> Self {
        Self {
            text: c.text.clone(),
            pass: c.pass,
            witness: c.witness.clone(),
        }
    }
}

/// Stage record. Large integers are decimal strings, or `p^e*q^f` products
/// once they outgrow a few hundred bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageTraceJson {
    pub i: usize,
    pub piece: usize,
    pub skipped: bool,
    pub concrete: bool,
    pub scale: String,
    pub region_terms: Option<usize>,
    pub collapsed_tag: Option<u64>,
    pub collapsed_depth: Option<u64>,
    pub nil_index: Option<u64>,
    pub l_i: String,
    pub lambda: String,
    #[serde(rename = "J_exp")]
    pub j_exp: String,
    #[serde(rename = "L_exp")]
    pub l_exp: String,
    pub epsilon: u64,
    pub suffix_vertices: usize,
    pub claims: Vec<ClaimJson>,
}

impl From<&StageTrace> for StageTraceJson {
    fn from(s: &StageTrace) -> Self {
        Self {
            i: s.i,
            piece: s.piece,
            skipped: s.skipped,
            concrete: s.concrete,
            scale: s.scale.to_string(),
            region_terms: s.region_terms,
            collapsed_tag: s.collapsed_tag,
            collapsed_depth: s.collapsed_depth,
            nil_index: s.nil_index,
            l_i: s.l_i.to_string(),
            lambda: s.lambda.to_string(),
            j_exp: s.j_exp.to_string(),
            l_exp: s.l_exp(),
            epsilon: s.epsilon,
            suffix_vertices: s.suffix_vertices,
            claims: s.claims.iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceJson {
    pub n: usize,
    pub m: u64,
    pub oracle: OracleJson,
    pub initial_depth: u64,
    pub peel_ref: String,
    pub pieces: usize,
    pub setup: Vec<ClaimJson>,
    pub stages: Vec<StageTraceJson>,
    #[serde(rename = "final")]
    pub final_stage: Option<StageTraceJson>,
    pub contradiction: bool,
}

impl From<&ProofTrace> for TraceJson {
    fn from(t: &ProofTrace) -> Self {
        Self {
            n: t.n,
            m: t.m,
            oracle: (&t.oracle).into(),
            initial_depth: t.initial_depth,
            peel_ref: t.peel_ref.clone(),
            pieces: t.pieces,
            setup: t.setup.iter().map(Into::into).collect(),
            stages: t.stages.iter().map(Into::into).collect(),
            final_stage: t.final_stage.as_ref().map(Into::into),
            contradiction: t.contradiction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BruteStageJson {
    pub stage: usize,
    pub skipped: bool,
    pub power: u64,
    pub scale: u64,
    pub terms: usize,
    pub support: Vec<Vec<u64>>,
    pub support_ok: bool,
    pub support_witness: Option<Vec<u64>>,
    pub min_depth: u64,
    pub depth_budget: u64,
    pub depth_ok: bool,
    pub witness_word: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BruteJson {
    pub n: usize,
    pub m: u64,
    pub k: u64,
    pub peel_ref: String,
    pub passed: bool,
    pub stages: Vec<BruteStageJson>,
}

impl From<&BruteReport> for BruteJson {
    fn from(b: &BruteReport) -> Self {
        Self {
            n: b.n,
            m: b.m,
            k: b.k,
            peel_ref: b.peel_ref.clone(),
            passed: b.passed(),
            stages: b
                .stages
                .iter()
                .map(|s| BruteStageJson {
                    stage: s.stage,
                    skipped: s.skipped,
                    power: s.power,
                    scale: s.scale,
                    terms: s.terms,
                    support: s.support.iter().map(|a| a.exponents().to_vec()).collect(),
                    support_ok: s.support_ok,
                    support_witness: s.support_witness.clone(),
                    min_depth: s.min_depth,
                    depth_budget: s.depth_budget,
                    depth_ok: s.depth_ok,
                    witness_word: s.witness_word.clone(),
                })
                .collect(),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}
