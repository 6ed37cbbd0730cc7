//! Argument parsing and subcommand dispatch.
//!
//! Exit codes: 0 success, 1 input or usage error, 2 certification breach,
//! 3 failed proof claim.

use crate::format::{to_json, BruteJson, CertificateJson, DecompositionJson, PolytopeJson, TraceJson};
use crate::svg::{render, RenderOptions};
use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use peelkit_core::lattice::NilOracle;
use peelkit_core::peel::{certify_peel, peel, PeelParams};
use peelkit_core::sim::{brute_force_expand, run_main_proof};
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_CERT: i32 = 2;
pub const EXIT_CLAIM: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "peelkit", version, about = "Peel convex polytopes into small pieces and certify the result")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Peel a polytope and certify the decomposition.
    Peel(PeelArgs),
    /// Re-certify a decomposition file.
    Certify(CertifyArgs),
    /// Replay the staged lattice argument.
    Simulate(SimulateArgs),
    /// Expand powers of 1 explicitly and compare against the peel.
    Expand(ExpandArgs),
    /// Render a planar decomposition as SVG.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Svg,
}

#[derive(Debug, Args)]
pub struct IoArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Written atomically; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PeelFlags {
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    #[arg(long, default_value_t = peelkit_core::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, env = "PEELKIT_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Coverage samples drawn by the certifier.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_stages: usize,
}

impl PeelFlags {
    fn params(&self) -> PeelParams {
        PeelParams {
            rho: self.rho,
            tol: self.tol,
            max_stages: self.max_stages,
            seed: self.seed,
            coverage_samples: self.samples,
            ..PeelParams::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct RenderFlags {
    #[arg(long, default_value_t = 800.0)]
    pub width: f64,
    #[arg(long, default_value_t = 800.0)]
    pub height: f64,
    #[arg(long, default_value_t = 1.0)]
    pub stroke_scale: f64,
}

impl RenderFlags {
    fn options(&self) -> RenderOptions {
        RenderOptions {
            width: self.width,
            height: self.height,
            stroke_scale: self.stroke_scale,
        }
    }
}

#[derive(Debug, Args)]
pub struct PeelArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub peel: PeelFlags,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    #[command(flatten)]
    pub render: RenderFlags,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Overrides the seed stored in the decomposition.
    #[arg(long, env = "PEELKIT_SEED")]
    pub seed: Option<u64>,
    /// Overrides the coverage sample count stored in the decomposition.
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OracleFlags {
    /// Every coefficient is nilpotent of this index.
    #[arg(long, conflicts_with = "nil_random")]
    pub nil_const: Option<u64>,
    /// Nilpotency indices drawn from 1..=K, seeded by --seed.
    #[arg(long)]
    pub nil_random: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: u64,
    #[command(flatten)]
    pub oracle: OracleFlags,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    #[arg(long, default_value_t = peelkit_core::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, env = "PEELKIT_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: u64,
    #[arg(long, default_value_t = 2)]
    pub nil_const: u64,
    /// Number of stages to expand.
    #[arg(long, default_value_t = 1)]
    pub stages: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = peelkit_core::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub render: RenderFlags,
}

/// A failure together with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure {
            code: EXIT_INPUT,
            error: e.into(),
        }
    }
}

fn fail(code: i32, msg: String) -> Failure {
    Failure {
        code,
        error: anyhow::anyhow!(msg),
    }
}

/// Writes through a sibling temporary file and a rename, or to stdout.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<()> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        out.write_all(contents.as_bytes())?;
        return Ok(out.flush()?);
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path.file_name().context("output path has no file name")?.to_string_lossy();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = std::fs::write(&tmp, contents).and_then(|_| std::fs::rename(&tmp, path));
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result.with_context(|| format!("writing {}", path.display()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn cmd_peel(a: &PeelArgs) -> Result<(), Failure> {
    let input: PolytopeJson = read_json(&a.io.input)?;
    let p = input.to_polytope("input")?;
    let params = a.peel.params();
    let dec = peel(&p, &params)?;
    let cert = certify_peel(&p, &dec, &params)?;
    let body = match a.format {
        OutputFormat::Json => {
            let mut doc = DecompositionJson::from_decomposition(&input, &dec);
            doc.certificate = Some((&cert).into());
            to_json(&doc)
        }
        OutputFormat::Svg => render(&p, &dec, &a.render.options())?,
    };
    emit(a.io.output.as_deref(), &body)?;
    eprintln!(
        "pieces: {}  stages: {}  max radius: {:.6}",
        dec.pieces.len(),
        dec.stages.len(),
        cert.max_radius
    );
    if !cert.passed() {
        return Err(fail(EXIT_CERT, breach(&(&cert).into())));
    }
    Ok(())
}

fn breach(c: &CertificateJson) -> String {
    let mut why = Vec::new();
    if !c.covers {
        why.push(format!("coverage failed at {:?}", c.coverage_witness));
    }
    if !c.piece_radii_ok {
        why.push(format!("piece radius {} exceeds the target", c.max_radius));
    }
    if !c.suffix_convex_ok {
        why.push(format!("suffix not convex: {:?}", c.suffix_witness));
    }
    format!("certification failed: {}", why.join("; "))
}

fn cmd_certify(a: &CertifyArgs) -> Result<(), Failure> {
    let doc: DecompositionJson = read_json(&a.io.input)?;
    let (p, dec) = doc.to_decomposition()?;
    let mut params = dec.params.clone();
    if let Some(seed) = a.seed {
        params.seed = seed;
    }
    if let Some(samples) = a.samples {
        params.coverage_samples = samples;
    }
    let cert: CertificateJson = (&certify_peel(&p, &dec, &params)?).into();
    emit(a.io.output.as_deref(), &to_json(&cert))?;
    if !cert.passed {
        return Err(fail(EXIT_CERT, breach(&cert)));
    }
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs) -> Result<(), Failure> {
    if a.n < 2 {
        return Err(anyhow::anyhow!("--n must be at least 2, got {}", a.n).into());
    }
    if a.m < 1 {
        return Err(anyhow::anyhow!("--m must be at least 1").into());
    }
    let oracle = match (a.oracle.nil_const, a.oracle.nil_random) {
        (_, Some(max)) => NilOracle::Seeded { max, seed: a.seed },
        (Some(k), None) => NilOracle::Constant(k),
        (None, None) => NilOracle::default(),
    };
    oracle.validate()?;
    let params = PeelParams {
        rho: a.rho,
        tol: a.tol,
        seed: a.seed,
        ..PeelParams::default()
    };
    let trace = run_main_proof(a.n, a.m, &oracle, &params)?;
    emit(a.output.as_deref(), &to_json(&TraceJson::from(&trace)))?;
    if let Some(c) = trace.failed_claim() {
        return Err(fail(
            EXIT_CLAIM,
            format!("claim failed: {}{}", c.text, c.witness.as_ref().map(|w| format!(" ({w})")).unwrap_or_default()),
        ));
    }
    if !trace.contradiction {
        return Err(fail(EXIT_CLAIM, "claim failed: trace ended without a contradiction".into()));
    }
    eprintln!("contradiction reached after {} claims", trace.claim_count());
    Ok(())
}

fn cmd_expand(a: &ExpandArgs) -> Result<(), Failure> {
    if a.n < 2 {
        return Err(anyhow::anyhow!("--n must be at least 2, got {}", a.n).into());
    }
    let params = PeelParams {
        tol: a.tol,
        ..PeelParams::default()
    };
    let report = brute_force_expand(a.n, a.m, a.nil_const, a.stages, &params)?;
    let doc = BruteJson::from(&report);
    emit(a.output.as_deref(), &to_json(&doc))?;
    if let Some(s) = doc.stages.iter().find(|s| !(s.support_ok && s.depth_ok)) {
        return Err(fail(
            EXIT_CLAIM,
            format!(
                "claim failed: stage {} support_ok={} min depth {} against budget {}",
                s.stage, s.support_ok, s.min_depth, s.depth_budget
            ),
        ));
    }
    Ok(())
}

fn cmd_render(a: &RenderArgs) -> Result<(), Failure> {
    let doc: DecompositionJson = read_json(&a.io.input)?;
    let input = doc.input.to_polytope("input")?;
    if input.dim() != 2 {
        return Err(anyhow::anyhow!("render needs a 2-dimensional hull, input hull has dimension {}", input.dim()).into());
    }
    let (p, dec) = doc.decomposition_of(input)?;
    let svg = render(&p, &dec, &a.render.options())?;
    emit(a.io.output.as_deref(), &svg)?;
    Ok(())
}

pub fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Peel(a) => cmd_peel(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Expand(a) => cmd_expand(a),
        Command::Render(a) => cmd_render(a),
    }
}

/// Parses `args` and runs the subcommand, reporting errors on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match dispatch(&cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            f.code
        }
    }
}
