//! `jordanlab`: build zoo algebras and kits, run verification suites and
//! decompose maps given as JSON files.

use clap::{Args, Parser, Subcommand, ValueEnum};
use jordanlab::algebra::JordanAlgebra;
use jordanlab::decompose::{decompose_linear, decompose_preserver, decompose_trace, BilinearMap, DecomposeError, PreserverMode};
use jordanlab::genverify::{
    make_adversarial, make_associating_map, make_associating_trace, make_standard_preserver, run_suite_with, Adversarial, AdversarialKind, GenConfig,
    GenError, SUITES,
};
use jordanlab::json::to_canonical_string;
use jordanlab::kit::{build_kit_variant, verify_kit, ElementaryKit, KitError, Variant};
use jordanlab::report::{Record, Report};
use jordanlab::zoo::{by_name, ZooError, REGISTRY};
use jordanlab::{CMatrix, CVector, LinOp, Tolerance};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Unknown(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Frame(String),
    #[error("{0}")]
    Residual(String),
    #[error("{0}")]
    Rejected(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Unknown(_) => 2,
            CliError::Io(_) => 3,
            CliError::Frame(_) => 4,
            CliError::Residual(_) => 5,
            CliError::Rejected(_) => 6,
            CliError::Numerical(_) => 7,
        }
    }
}

impl From<ZooError> for CliError {
    fn from(e: ZooError) -> Self {
        CliError::Unknown(e.to_string())
    }
}

impl From<KitError> for CliError {
    fn from(e: KitError) -> Self {
        match e {
            KitError::Zoo(z) => z.into(),
            other => CliError::Frame(other.to_string()),
        }
    }
}

impl From<GenError> for CliError {
    fn from(e: GenError) -> Self {
        match e {
            GenError::Zoo(z) => z.into(),
            GenError::Kit(k) => k.into(),
            GenError::UnknownSuite(_) | GenError::UnknownKind(_) | GenError::CatalogEmpty(_) => CliError::Unknown(e.to_string()),
            GenError::RetriesExhausted(_) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<&DecomposeError> for CliError {
    fn from(e: &DecomposeError) -> Self {
        let msg = e.to_string();
        match e {
            DecomposeError::NotAssociating(_) | DecomposeError::NotBijective => CliError::Rejected(msg),
            DecomposeError::KitMissing(_) => CliError::Frame(msg),
            DecomposeError::DimensionMismatch(_) => CliError::Io(msg),
            DecomposeError::ResidualExceeded { .. } | DecomposeError::JNotMultiplicative(_) | DecomposeError::LambdaNotInvertible => {
                CliError::Numerical(msg)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Md,
}

#[derive(Debug, Parser)]
#[command(name = "jordanlab", version, about = "Numerical laboratory for associating maps and preservers on Jordan algebras")]
struct Cli {
    /// Absolute tolerance for every residual check.
    #[arg(long = "tol", global = true, default_value_t = 1e-9)]
    tol_abs: f64,
    /// Master seed; defaults to $JORDANLAB_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Samples per suite cell.
    #[arg(long, global = true, default_value_t = 256)]
    trials: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List or export zoo algebras.
    #[command(subcommand)]
    Zoo(ZooCmd),
    /// Build elementary kits.
    #[command(subcommand)]
    Kit(KitCmd),
    /// Run a verification suite, or `all`.
    Verify { suite: String },
    /// Decompose a map or trace read from a JSON file.
    #[command(subcommand)]
    Decompose(DecomposeCmd),
    /// Generate inputs for `decompose`.
    #[command(subcommand)]
    Gen(GenCmd),
}

#[derive(Debug, Subcommand)]
enum ZooCmd {
    List,
    Export { name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Primary,
    Alternative,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Primary => Variant::Primary,
            VariantArg::Alternative => Variant::Alternative,
        }
    }
}

#[derive(Debug, Subcommand)]
enum KitCmd {
    Build {
        #[arg(long)]
        algebra: String,
        #[arg(long, value_enum, default_value_t = VariantArg::Primary)]
        variant: VariantArg,
    },
}

#[derive(Debug, Args)]
struct DecomposeArgs {
    /// Algebra name; defaults to the `algebra` field of the input.
    #[arg(long)]
    algebra: Option<String>,
    #[arg(long)]
    input: PathBuf,
    /// Kit JSON; built automatically when absent.
    #[arg(long)]
    kit: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Guarded,
    SpinBypass,
}

#[derive(Debug, Subcommand)]
enum DecomposeCmd {
    Linear(DecomposeArgs),
    Trace(DecomposeArgs),
    Preserver {
        #[command(flatten)]
        args: DecomposeArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Guarded)]
        mode: ModeArg,
    },
}

#[derive(Debug, Subcommand)]
enum GenCmd {
    Map {
        #[arg(long)]
        algebra: String,
    },
    Trace {
        #[arg(long)]
        algebra: String,
    },
    Preserver {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        symmetric: bool,
    },
    Adversarial {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        algebra: String,
    },
}

struct Ctx {
    tol: Tolerance,
    seed: u64,
    trials: usize,
    format: Format,
    out: Option<PathBuf>,
}

impl Ctx {
    fn emit(&self, text: &str) -> Result<(), CliError> {
        let mut text = text.to_string();
        if !text.ends_with('\n') {
            text.push('\n');
        }
        match &self.out {
            Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
            None => {
                use std::io::Write;
                std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
            }
        }
    }

    fn emit_json<T: Serialize>(&self, value: &T) -> Result<(), CliError> {
        self.emit(&to_canonical_string(value).map_err(|e| CliError::Io(e.to_string()))?)
    }

    fn emit_report(&self, report: &Report) -> Result<(), CliError> {
        match self.format {
            Format::Json => self.emit_json(report),
            Format::Md => self.emit(&report.to_markdown()),
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn cmd_zoo(ctx: &Ctx, cmd: ZooCmd) -> Result<(), CliError> {
    match cmd {
        ZooCmd::List => match ctx.format {
            Format::Json => ctx.emit_json(&serde_json::json!({ "registry": REGISTRY })),
            Format::Md => ctx.emit(&REGISTRY.iter().map(|n| format!("- `{n}`\n")).collect::<String>()),
        },
        ZooCmd::Export { name } => ctx.emit_json(&by_name(&name)?.to_json()),
    }
}

fn cmd_kit(ctx: &Ctx, cmd: KitCmd) -> Result<(), CliError> {
    let KitCmd::Build { algebra, variant } = cmd;
    let alg = by_name(&algebra)?;
    let kit = build_kit_variant(&alg, variant.into(), &ctx.tol)?;
    let report = Report::new("kit", serde_json::json!({ "tol_abs": ctx.tol.abs_eps, "seed": ctx.seed }), verify_kit(&alg, &kit, &ctx.tol, ctx.seed));
    match ctx.format {
        Format::Json => ctx.emit_json(&serde_json::json!({ "kit": kit, "report": report }))?,
        Format::Md => ctx.emit(&report.to_markdown())?,
    }
    if report.all_pass() {
        Ok(())
    } else {
        Err(CliError::Residual(format!("{} kit checks failed", report.failures().count())))
    }
}

fn cmd_verify(ctx: &Ctx, suite: &str) -> Result<(), CliError> {
    let config = GenConfig { master_seed: ctx.seed, samples: ctx.trials, ..GenConfig::default() };
    let report = if suite == "all" {
        let mut records: Vec<Record> = Vec::new();
        for name in SUITES {
            let mut cfg = config;
            if name == "negative_controls" {
                cfg.adversarial_rate = 1.0;
            }
            let r = run_suite_with(name, &cfg, &ctx.tol)?;
            records.extend(r.records.into_iter().map(|mut rec| {
                rec.check_name = format!("{name}/{}", rec.check_name);
                rec
            }));
        }
        let mut cfg = serde_json::to_value(config).expect("config serializes");
        cfg["tol_abs"] = serde_json::json!(ctx.tol.abs_eps);
        Report::new("all", cfg, records)
    } else {
        let mut cfg = config;
        if suite == "negative_controls" {
            cfg.adversarial_rate = 1.0;
        }
        run_suite_with(suite, &cfg, &ctx.tol)?
    };
    ctx.emit_report(&report)?;
    if report.all_pass() {
        Ok(())
    } else {
        Err(CliError::Residual(format!("{} records failed", report.failures().count())))
    }
}

fn algebra_for(name: Option<&str>, input_algebra: &str) -> Result<JordanAlgebra, CliError> {
    Ok(by_name(name.unwrap_or(input_algebra))?)
}

fn load_kit(ctx: &Ctx, alg: &JordanAlgebra, path: Option<&Path>) -> Result<ElementaryKit, CliError> {
    match path {
        Some(p) => read_json(p),
        None => Ok(build_kit_variant(alg, Variant::Primary, &ctx.tol)?),
    }
}

fn finish<T: Serialize>(ctx: &Ctx, alg: &JordanAlgebra, kind: &str, result: Result<T, DecomposeError>) -> Result<(), CliError> {
    match result {
        Ok(v) => ctx.emit_json(&serde_json::json!({ "algebra": alg.name(), "kind": kind, "decomposition": v })),
        Err(e) => {
            ctx.emit_json(&serde_json::json!({ "algebra": alg.name(), "kind": kind, "error": e.kind(), "detail": e.to_string() }))?;
            Err((&e).into())
        }
    }
}

fn cmd_decompose(ctx: &Ctx, cmd: DecomposeCmd) -> Result<(), CliError> {
    match cmd {
        DecomposeCmd::Linear(args) => {
            let op: LinOp = read_json(&args.input)?;
            let alg = algebra_for(args.algebra.as_deref(), &op.algebra)?;
            let kit = load_kit(ctx, &alg, args.kit.as_deref())?;
            finish(ctx, &alg, "linear", decompose_linear(&alg, &op.matrix, &kit, &ctx.tol))
        }
        DecomposeCmd::Trace(args) => {
            let b: BilinearMap = read_json(&args.input)?;
            let alg = algebra_for(args.algebra.as_deref(), &b.algebra)?;
            let kit = load_kit(ctx, &alg, args.kit.as_deref())?;
            finish(ctx, &alg, "trace", decompose_trace(&alg, &b, &kit, &ctx.tol))
        }
        DecomposeCmd::Preserver { args, mode } => {
            let op: LinOp = read_json(&args.input)?;
            let alg = algebra_for(args.algebra.as_deref(), &op.algebra)?;
            let mode = match mode {
                ModeArg::Guarded => PreserverMode::Guarded,
                ModeArg::SpinBypass => PreserverMode::SpinBypass,
            };
            let kit = load_kit(ctx, &alg, args.kit.as_deref())?;
            finish(ctx, &alg, "preserver", decompose_preserver(&alg, &alg, &op.matrix, &kit, mode, &ctx.tol))
        }
    }
}

#[derive(Serialize)]
struct MapParams<'a> {
    #[serde(with = "jordanlab::json::vector")]
    lambda: &'a CVector,
    #[serde(with = "jordanlab::json::matrix")]
    mu: &'a CMatrix,
}

#[derive(Serialize)]
struct PreserverParams<'a> {
    #[serde(with = "jordanlab::json::vector")]
    z0: &'a CVector,
    #[serde(rename = "J", with = "jordanlab::json::matrix")]
    j: &'a CMatrix,
    #[serde(with = "jordanlab::json::matrix")]
    beta: &'a CMatrix,
}

fn with_extra<T: Serialize>(base: &T, key: &str, extra: serde_json::Value) -> serde_json::Value {
    let mut v = serde_json::to_value(base).expect("serializable");
    v[key] = extra;
    v
}

fn cmd_gen(ctx: &Ctx, cmd: GenCmd) -> Result<(), CliError> {
    let tol = &ctx.tol;
    let value = match cmd {
        GenCmd::Map { algebra } => {
            let alg = by_name(&algebra)?;
            let g = make_associating_map(&alg, ctx.seed, 1.0);
            let params = serde_json::to_value(MapParams { lambda: &g.lambda, mu: &g.mu }).expect("serializable");
            with_extra(&alg.to_linop(g.t), "params", params)
        }
        GenCmd::Trace { algebra } => {
            let alg = by_name(&algebra)?;
            let g = make_associating_trace(&alg, ctx.seed, 1.0);
            let mut params = serde_json::to_value(MapParams { lambda: &g.lambda, mu: &g.mu }).expect("serializable");
            params["nu"] = serde_json::to_value(&g.nu).expect("serializable");
            with_extra(&g.b, "params", params)
        }
        GenCmd::Preserver { algebra, symmetric } => {
            let alg = by_name(&algebra)?;
            let g = make_standard_preserver(&alg, ctx.seed, symmetric, tol)?;
            let params = serde_json::to_value(PreserverParams { z0: &g.z0, j: &g.j, beta: &g.beta }).expect("serializable");
            with_extra(&alg.to_linop(g.phi), "params", params)
        }
        GenCmd::Adversarial { kind, algebra } => {
            let alg = by_name(&algebra)?;
            let kind: AdversarialKind = kind.parse()?;
            match make_adversarial(kind, &alg, ctx.seed, tol)? {
                Adversarial::Map(t) | Adversarial::Bijection(t) => serde_json::to_value(alg.to_linop(t)).expect("serializable"),
                Adversarial::ClaimedForm { t, lambda, mu } => {
                    let claimed = serde_json::to_value(MapParams { lambda: &lambda, mu: &mu }).expect("serializable");
                    with_extra(&alg.to_linop(t), "claimed", claimed)
                }
                Adversarial::Preserver(g) => {
                    let params = serde_json::to_value(PreserverParams { z0: &g.z0, j: &g.j, beta: &g.beta }).expect("serializable");
                    with_extra(&alg.to_linop(g.phi), "params", params)
                }
            }
        }
    };
    ctx.emit_json(&value)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let tol = Tolerance::new(cli.tol_abs).map_err(|e| CliError::Unknown(e.to_string()))?;
    if cli.trials == 0 {
        return Err(CliError::Unknown("--trials must be at least 1".into()));
    }
    let seed = match cli.seed {
        Some(s) => s,
        None => match std::env::var("JORDANLAB_SEED") {
            Ok(v) => v.trim().parse().map_err(|_| CliError::Unknown(format!("JORDANLAB_SEED is not an integer: {v}")))?,
            Err(_) => 0,
        },
    };
    let ctx = Ctx { tol, seed, trials: cli.trials, format: cli.format, out: cli.out };
    match cli.command {
        Command::Zoo(cmd) => cmd_zoo(&ctx, cmd),
        Command::Kit(cmd) => cmd_kit(&ctx, cmd),
        Command::Verify { suite } => cmd_verify(&ctx, &suite),
        Command::Decompose(cmd) => cmd_decompose(&ctx, cmd),
        Command::Gen(cmd) => cmd_gen(&ctx, cmd),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
