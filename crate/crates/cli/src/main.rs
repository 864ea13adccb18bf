use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mvdecomp::decomp::{decompose, jennrich_decompose, verify_terms, DecompConfig, DecompError};
use mvdecomp::instancegen::{gen_instance, gen_minrank_basis, InstanceSpec};
use mvdecomp::json::{self as wire, JsonError};
use mvdecomp::linalg::{DEFAULT_TAU_EIG, DEFAULT_TAU_PROP, DEFAULT_TAU_RANK, DEFAULT_TAU_RESID};
use mvdecomp::minrank::{minrank, MinrankError};
use mvdecomp::{Field, Mode, Rational, ScalarError, Tolerances};

/// Minimum-rank matrix-vector decompositions of order-3 tensors.
#[derive(Debug, Parser)]
#[command(name = "mvdecomp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decompose a tensor and report the verification of the result.
    Decompose(Common),
    /// Find the minimum-rank matrices of the span of a basis.
    Minrank(Common),
    /// Rank-one decomposition by simultaneous diagonalization (float mode).
    Jennrich(Common),
    /// Generate a random instance with known hidden structure.
    Generate(Generate),
    /// Check a claimed decomposition of a tensor.
    Verify(Verify),
}

#[derive(Debug, Args)]
struct Common {
    /// Scalar field; defaults to the `mode` field of the input file.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random slice coefficients are drawn from [-bound, bound].
    #[arg(long, default_value_t = mvdecomp::decomp::DEFAULT_BOUND,
          value_parser = clap::value_parser!(i64).range(1..))]
    bound: i64,
    #[arg(long, default_value_t = mvdecomp::decomp::DEFAULT_MAX_RETRIES)]
    max_retries: usize,
    #[arg(long, default_value_t = DEFAULT_TAU_RANK)]
    tol_rank: f64,
    #[arg(long, default_value_t = DEFAULT_TAU_EIG)]
    tol_eig: f64,
    #[arg(long, default_value_t = DEFAULT_TAU_PROP)]
    tol_prop: f64,
    #[arg(long, default_value_t = DEFAULT_TAU_RESID)]
    tol_resid: f64,
    /// Input JSON file; `-` reads standard input.
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Output JSON file; standard output when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Tensor,
    Basis,
}

#[derive(Debug, Args)]
struct Generate {
    #[arg(long, value_enum, default_value_t = Kind::Tensor)]
    kind: Kind,
    /// InstanceSpec JSON; replaces the dimension flags below.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    /// Comma-separated hidden term ranks.
    #[arg(long, value_delimiter = ',')]
    ranks: Vec<usize>,
    #[arg(long)]
    entry_bound: Option<i64>,
    /// Where to write the hidden ground truth.
    #[arg(long)]
    hidden: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Verify {
    /// The claimed decomposition.
    #[arg(long, short)]
    decomposition: PathBuf,
    #[command(flatten)]
    common: Common,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

/// A mathematical failure: reported, exit code 2.
struct Failure {
    message: String,
    report: Option<Value>,
}

type Outcome = Result<Value, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let (common, outcome) = match &cli.command {
        Command::Decompose(c) => (c, dispatch(c, Op::Decompose)?),
        Command::Minrank(c) => (c, dispatch(c, Op::Minrank)?),
        Command::Jennrich(c) => (c, dispatch(c, Op::Jennrich)?),
        Command::Verify(v) => (&v.common, dispatch(&v.common, Op::Verify(&v.decomposition))?),
        Command::Generate(g) => {
            generate(g)?;
            return Ok(true);
        }
    };
    match outcome {
        Ok(value) => {
            write_json(common.output.as_deref(), &value)?;
            Ok(true)
        }
        Err(failure) => {
            eprintln!("failure: {}", failure.message);
            if let Some(report) = failure.report {
                write_json(common.output.as_deref(), &report)?;
            }
            Ok(false)
        }
    }
}

#[derive(Clone, Copy)]
enum Op<'a> {
    Decompose,
    Minrank,
    Jennrich,
    Verify(&'a Path),
}

fn config(c: &Common) -> Result<DecompConfig> {
    let tol = Tolerances {
        rank: c.tol_rank,
        eig: c.tol_eig,
        prop: c.tol_prop,
        resid: c.tol_resid,
    };
    for (name, v) in [
        ("--tol-rank", tol.rank),
        ("--tol-eig", tol.eig),
        ("--tol-prop", tol.prop),
        ("--tol-resid", tol.resid),
    ] {
        if !(v.is_finite() && v > 0.0) {
            bail!("{name} must be a positive number, got {v}");
        }
    }
    Ok(DecompConfig {
        bound: c.bound,
        max_retries: c.max_retries,
        tol,
    })
}

fn dispatch(c: &Common, op: Op<'_>) -> Result<Outcome> {
    let config = config(c)?;
    let doc = read_json(c.input.as_deref())?;
    let mode = match c.mode {
        Some(m) => m,
        None => wire::mode_of(&doc)?.unwrap_or(Mode::Exact),
    };
    match mode {
        Mode::Exact => execute::<Rational>(&doc, c.seed, &config, op),
        Mode::Float => execute::<f64>(&doc, c.seed, &config, op),
    }
}

fn execute<F: Field>(doc: &Value, seed: u64, config: &DecompConfig, op: Op<'_>) -> Result<Outcome> {
    match op {
        Op::Decompose => run_decompose::<F>(doc, seed, config),
        Op::Minrank => run_minrank::<F>(doc, seed, config),
        Op::Jennrich => run_jennrich::<F>(doc, seed, config),
        Op::Verify(path) => run_verify::<F>(doc, &read_json(Some(path))?, config),
    }
}

fn decomp_failure(e: DecompError) -> Result<Outcome> {
    match e {
        DecompError::Linalg(mvdecomp::LinalgError::Scalar(s)) => usage(s),
        e => Ok(Err(Failure {
            message: e.to_string(),
            report: None,
        })),
    }
}

fn usage(e: ScalarError) -> Result<Outcome> {
    match e {
        ScalarError::NotFloatMode => bail!("this command needs a float-mode input (use --mode float)"),
        ScalarError::NotExactMode => bail!("this command needs an exact-mode input (use --mode exact)"),
        e => bail!(e),
    }
}

fn run_decompose<F: Field>(doc: &Value, seed: u64, config: &DecompConfig) -> Result<Outcome> {
    let t = wire::tensor_from_value::<F>(doc).context("reading tensor")?;
    let d = match decompose(&t, seed, config) {
        Ok(d) => mvdecomp::canonicalize(&d),
        Err(e) => return decomp_failure(e),
    };
    let report = verify_terms(&t, d.terms(), &config.tol)?;
    let mut out = wire::decomposition_to_value(&d);
    out["mode"] = json!(F::MODE);
    out["rank"] = json!(d.rank());
    out["verification"] = verification_value(&report);
    Ok(Ok(out))
}

fn verification_value(v: &mvdecomp::Verification) -> Value {
    json!({
        "residual": v.residual,
        "reconstructs": v.reconstructs,
        "images_direct_sum": v.images_direct_sum,
        "transpose_images_direct_sum": v.transpose_images_direct_sum,
        "w_pairwise_independent": v.w_pairwise_independent,
        "term_ranks": v.term_ranks,
        "passed": v.passed(),
    })
}

fn run_minrank<F: Field>(doc: &Value, seed: u64, config: &DecompConfig) -> Result<Outcome> {
    let basis = wire::basis_from_value::<F>(doc).context("reading basis")?;
    match minrank(&basis, seed, config) {
        Ok(result) => Ok(Ok(wire::minrank_to_value(&result))),
        Err(MinrankError::Tensor(e)) => Err(e).context("reading basis"),
        Err(MinrankError::Decomp(e)) => decomp_failure(e),
        Err(e) => {
            let report = e
                .certificate()
                .map(|c| json!({ "error": e.to_string(), "certificate": wire::certificate_to_value(c) }));
            Ok(Err(Failure {
                message: e.to_string(),
                report,
            }))
        }
    }
}

fn run_jennrich<F: Field>(doc: &Value, seed: u64, config: &DecompConfig) -> Result<Outcome> {
    let t = wire::tensor_from_value::<F>(doc).context("reading tensor")?;
    match jennrich_decompose(&t, seed, config) {
        Ok(out) => Ok(Ok(wire::jennrich_to_value(&out))),
        Err(e) => decomp_failure(e),
    }
}

fn run_verify<F: Field>(doc: &Value, claim: &Value, config: &DecompConfig) -> Result<Outcome> {
    let t = wire::tensor_from_value::<F>(doc).context("reading tensor")?;
    let terms = wire::terms_from_value::<F>(claim).context("reading decomposition")?;
    let (m, n, p) = t.dims();
    if let Some(bad) = terms.iter().find(|x| x.matrix.shape() != (m, n) || x.w.len() != p) {
        bail!(
            "term of shape {:?} with |w| = {} does not fit a {m}x{n}x{p} tensor",
            bad.matrix.shape(),
            bad.w.len()
        );
    }
    let report = verify_terms(&t, &terms, &config.tol)?;
    let value = verification_value(&report);
    if report.passed() {
        Ok(Ok(value))
    } else {
        Ok(Err(Failure {
            message: "decomposition failed verification".into(),
            report: Some(value),
        }))
    }
}

fn generate(g: &Generate) -> Result<()> {
    let mut spec = match &g.spec {
        Some(path) => serde_json::from_value::<InstanceSpec>(read_json(Some(path))?)
            .with_context(|| format!("reading instance spec {}", path.display()))?,
        None => {
            let dim = |v: Option<usize>, name: &str| v.with_context(|| format!("--{name} is required"));
            let mut spec = InstanceSpec::new(
                dim(g.m, "m")?,
                dim(g.n, "n")?,
                dim(g.p, "p")?,
                g.ranks.clone(),
                g.common.seed,
                g.common.mode.unwrap_or(Mode::Exact),
            );
            if let Some(b) = g.entry_bound {
                spec.entry_bound = b;
            }
            spec
        }
    };
    if let (Some(_), Some(mode)) = (&g.spec, g.common.mode) {
        spec.mode = mode;
    }
    spec.validate()?;
    let (instance, hidden) = match spec.mode {
        Mode::Exact => generated::<Rational>(&spec, g.kind)?,
        Mode::Float => generated::<f64>(&spec, g.kind)?,
    };
    write_json(g.common.output.as_deref(), &instance)?;
    if let Some(path) = &g.hidden {
        write_json(Some(path), &hidden)?;
    }
    Ok(())
}

fn generated<F: Field>(spec: &InstanceSpec, kind: Kind) -> Result<(Value, Value)> {
    Ok(match kind {
        Kind::Tensor => {
            let (t, hidden) = gen_instance::<F>(spec)?;
            (wire::tensor_to_value(&t), wire::decomposition_to_value(&hidden))
        }
        Kind::Basis => {
            let (basis, hidden) = gen_minrank_basis::<F>(spec)?;
            (wire::basis_to_value(&basis), wire::basis_to_value(&hidden))
        }
    })
}

fn read_json(path: Option<&Path>) -> Result<Value> {
    let text = match path {
        None => bail!("--input is required"),
        Some(p) if p == Path::new("-") => io::read_to_string(io::stdin()).context("reading standard input")?,
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
    };
    let value = serde_json::from_str(&text)
        .map_err(JsonError::from)
        .with_context(|| format!("parsing {}", path.map_or("input".into(), |p| p.display().to_string())))?;
    Ok(value)
}

fn write_json(path: Option<&Path>, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match path {
        None => io::stdout().write_all(text.as_bytes()).context("writing standard output"),
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
    }
}
