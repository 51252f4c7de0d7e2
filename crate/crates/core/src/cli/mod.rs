//! Command-line front end.
//!
//! Every subcommand resolves a model (built-in name, operator file or
//! substitution file), runs at the requested precision and writes JSON or
//! CSV. Real values are always written as decimal strings.

mod bench;
mod grid;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

pub use bench::{run_bench, BenchConfig, BenchRecord, BenchReport, Method};
pub use grid::{parse_eps_list, parse_scalar, Grid, Spacing};

use crate::coverset::{build_cover_capped, check_trace_map, default_trace_samples, CoverFamily};
use crate::error::{Error, Result};
use crate::fractal::{
    box_dim_curve, box_count, default_root_tol, fibonacci_dimension_bounds, hausdorff_from_covers, largest_gap,
    min_band_width,
};
use crate::monodromy::{classify_trace, default_slack, monodromy_at, Membership};
use crate::operator::{spectrum, OperatorJson, PeriodicJacobi};
use crate::realnum::{DoubleDouble, Precision, Real};
use crate::substitution::{
    Model, ModelKind, Rotation, SubstitutionJson, SubstitutionRule, DEFAULT_MAX_WORD_LENGTH,
};

#[derive(Debug, Parser)]
#[command(name = "jacobi-spectra", version, about = "Spectra, covers and fractal statistics of periodic Jacobi operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Band spectrum of one periodic operator.
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        /// Substitution level, or the period for rotation models.
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Level-k spectral cover, one per coupling on the grid.
    Cover {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Two-level Hausdorff-dimension estimate from covers k and k2.
    Dim {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        k: usize,
        /// Second level (default k + 1).
        #[arg(long)]
        k2: Option<usize>,
        /// Bisection tolerance on f(alpha).
        #[arg(long)]
        root_tol: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Box-counting ratios log N / log(1/eps) of a cover.
    Boxdim {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        k: usize,
        /// Comma-separated box sizes; `2^-4..2^-40` expands over integer exponents.
        #[arg(long, default_value = "2^-4..2^-20")]
        eps_list: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Largest gap of the cover over a coupling grid.
    Gaps {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Cover summed with itself (spectrum of the square Hamiltonian).
    Sum {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Discriminant classification of energies, and optional trace-map check.
    Trace {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        k: Option<usize>,
        /// Comma-separated energies.
        #[arg(long)]
        energies: Option<String>,
        /// Uniform energy grid: MIN..MAX STEPS.
        #[arg(long, num_args = 2, value_names = ["MIN..MAX", "STEPS"])]
        energy_grid: Option<Vec<String>>,
        /// Also check the trace map at level k (period doubling, Thue-Morse).
        #[arg(long)]
        check_map: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Banded vs dense eigensolver timing over K = 2^kmin..2^kmax.
    Bench {
        #[arg(long, default_value_t = 9)]
        k_min_exp: u32,
        #[arg(long, default_value_t = 13)]
        k_max_exp: u32,
        /// Largest K timed with the dense path.
        #[arg(long, default_value_t = 4096)]
        dense_cap: usize,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        /// Precisions to time; repeat the flag for both.
        #[arg(long = "precision", value_enum, default_values_t = [PrecisionArg::Double, PrecisionArg::Extended])]
        precisions: Vec<PrecisionArg>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        out: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// fibonacci, period-doubling, thue-morse, rudin-shapiro, almost-mathieu, sturmian.
    #[arg(long)]
    pub model: Option<String>,
    /// Operator JSON file {"K", "a", "b"}.
    #[arg(long, conflicts_with_all = ["model", "substitution"])]
    pub file: Option<PathBuf>,
    /// Substitution JSON file {"alphabet", "rules", "seed"}.
    #[arg(long, conflicts_with = "model")]
    pub substitution: Option<PathBuf>,
    /// Coupling constant.
    #[arg(long, conflicts_with = "lambda_grid")]
    pub lambda: Option<String>,
    /// Coupling grid: MIN..MAX {lin|log} STEPS.
    #[arg(long, num_args = 3, value_names = ["MIN..MAX", "SPACING", "STEPS"])]
    pub lambda_grid: Option<Vec<String>>,
    /// File with an explicit list of couplings, separated by commas or whitespace.
    #[arg(long, conflicts_with_all = ["lambda", "lambda_grid"])]
    pub lambda_file: Option<PathBuf>,
    /// Rotation number p/q for almost-mathieu and sturmian.
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long, default_value = "0")]
    pub theta: String,
    /// Symbol values a,b,c,d for rudin-shapiro.
    #[arg(long)]
    pub values: Option<String>,
    #[arg(long)]
    pub seed_symbol: Option<char>,
    #[arg(long, default_value_t = DEFAULT_MAX_WORD_LENGTH)]
    pub max_word_length: usize,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = PrecisionArg::Double)]
    pub precision: PrecisionArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub out: Format,
    /// Output file (default: standard output).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    Double,
    Extended,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Double => Precision::Double,
            PrecisionArg::Extended => Precision::Extended,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Parses `args` and runs the command; returns the process exit code.
///
/// 0 on success, 1 for usage or input errors, 2 for numerical failures.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    }
    let (doc, format, path) = match cli.command {
        Command::Bench { k_min_exp, k_max_exp, dense_cap, reps, precisions, out, output } => {
            let cfg = BenchConfig {
                k_exps: (k_min_exp..=k_max_exp).collect(),
                dense_cap,
                reps,
                precisions: precisions.into_iter().map(Precision::from).collect(),
                lambdas: vec![1.0, 2.0, 3.0, 4.0],
            };
            let report = run_bench(&cfg)?;
            (report.to_document(), out, output)
        }
        command => {
            let output = command_output(&command).clone();
            let doc = match output.precision {
                PrecisionArg::Double => dispatch::<f64>(&command)?,
                PrecisionArg::Extended => dispatch::<DoubleDouble>(&command)?,
            };
            (doc, output.out, output.output)
        }
    };
    write_document(&doc, format, path.as_ref())
}

fn command_output(command: &Command) -> &OutputArgs {
    match command {
        Command::Spectrum { output, .. }
        | Command::Cover { output, .. }
        | Command::Dim { output, .. }
        | Command::Boxdim { output, .. }
        | Command::Gaps { output, .. }
        | Command::Sum { output, .. }
        | Command::Trace { output, .. } => output,
        Command::Bench { .. } => unreachable!("bench has its own output flags"),
    }
}

/// Output produced by a command: a JSON value plus the equivalent CSV table.
pub struct Document {
    pub json: Value,
    pub csv_header: &'static str,
    pub csv_rows: Vec<Vec<String>>,
}

impl Document {
    fn curve(json: Value, rows: Vec<Vec<String>>) -> Self {
        Document { json, csv_header: "lambda,k,quantity,value", csv_rows: rows }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json)?;
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = String::from(self.csv_header);
                s.push('\n');
                for row in &self.csv_rows {
                    s.push_str(&row.join(","));
                    s.push('\n');
                }
                s
            }
        })
    }
}

fn write_document(doc: &Document, format: Format, path: Option<&PathBuf>) -> Result<()> {
    let text = doc.render(format)?;
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Where the operator comes from.
enum Source<R> {
    Builtin(Model<R>),
    Rule(SubstitutionRule, u8, R),
    Operator(PeriodicJacobi<R>),
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn lambdas<R: Real>(args: &ModelArgs) -> Result<Vec<R>> {
    if let Some(path) = &args.lambda_file {
        let text = std::fs::read_to_string(path)?;
        let ls = text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(parse_scalar)
            .collect::<Result<Vec<R>>>()?;
        if ls.is_empty() {
            return Err(Error::invalid("coupling file is empty"));
        }
        return Ok(ls);
    }
    match (&args.lambda, &args.lambda_grid) {
        (Some(l), None) => Ok(vec![parse_scalar(l)?]),
        (None, Some(g)) => Ok(Grid::parse(g)?.values()),
        (None, None) => Ok(vec![R::one()]),
        (Some(_), Some(_)) => Err(Error::invalid("give either --lambda or --lambda-grid")),
    }
}

fn parse_rotation(text: &str) -> Result<Rotation> {
    let (p, q) = text
        .split_once('/')
        .ok_or_else(|| Error::invalid(format!("rotation {text:?} must be p/q")))?;
    let p = p.trim().parse::<u64>().map_err(|e| Error::invalid(format!("numerator: {e}")))?;
    let q = q.trim().parse::<u64>().map_err(|e| Error::invalid(format!("denominator: {e}")))?;
    Rotation::new(p, q)
}

fn model_kind<R: Real>(args: &ModelArgs, name: &str) -> Result<ModelKind<R>> {
    let rotation = || {
        args.alpha
            .as_deref()
            .ok_or_else(|| Error::invalid(format!("{name} needs --alpha p/q")))
            .and_then(parse_rotation)
    };
    Ok(match name.to_ascii_lowercase().replace('_', "-").as_str() {
        "fibonacci" | "fib" => ModelKind::Fibonacci,
        "period-doubling" | "pd" => ModelKind::PeriodDoubling,
        "thue-morse" | "tm" => ModelKind::ThueMorse,
        "rudin-shapiro" | "rs" => {
            let text = args
                .values
                .as_deref()
                .ok_or_else(|| Error::invalid("rudin-shapiro needs --values a,b,c,d"))?;
            let v = text.split(',').map(|s| parse_scalar::<R>(s.trim())).collect::<Result<Vec<R>>>()?;
            let v: [R; 4] = v
                .try_into()
                .map_err(|_| Error::invalid("rudin-shapiro needs exactly four values"))?;
            ModelKind::RudinShapiro(v)
        }
        "almost-mathieu" | "am" => ModelKind::AlmostMathieu { alpha: rotation()?, theta: parse_scalar(&args.theta)? },
        "sturmian" => ModelKind::Sturmian { alpha: rotation()?, theta: parse_scalar(&args.theta)? },
        other => return Err(Error::invalid(format!("unknown model {other:?}"))),
    })
}

fn source<R: Real>(args: &ModelArgs, lambda: R) -> Result<Source<R>> {
    if let Some(path) = &args.file {
        return Ok(Source::Operator(PeriodicJacobi::from_json(&read_json::<OperatorJson>(path)?)?));
    }
    if let Some(path) = &args.substitution {
        let (rule, mut seed) = SubstitutionRule::from_json(&read_json::<SubstitutionJson>(path)?)?;
        if let Some(c) = args.seed_symbol {
            seed = rule.symbol_index(c)?;
        }
        return Ok(Source::Rule(rule, seed, lambda));
    }
    let name = args
        .model
        .as_deref()
        .ok_or_else(|| Error::invalid("choose a model with --model, --file or --substitution"))?;
    Ok(Source::Builtin(Model::new(model_kind(args, name)?, lambda)?))
}

fn builtin<R: Real>(args: &ModelArgs, lambda: R) -> Result<Model<R>> {
    match source(args, lambda)? {
        Source::Builtin(m) => Ok(m),
        _ => Err(Error::invalid("this command needs a built-in substitution model (--model)")),
    }
}

fn operator_for<R: Real>(args: &ModelArgs, lambda: R, k: Option<usize>) -> Result<PeriodicJacobi<R>> {
    let need_k = || k.ok_or_else(|| Error::invalid("--k is required for this model"));
    match source(args, lambda)? {
        Source::Operator(op) => Ok(op),
        Source::Rule(rule, seed, lambda) => {
            let w = rule.iterate_capped(seed, need_k()?, args.max_word_length)?;
            rule.word_to_operator(&w, lambda)
        }
        Source::Builtin(model) => match model.kind {
            ModelKind::AlmostMathieu { .. } | ModelKind::Sturmian { .. } => model.sample_potential(need_k()?),
            _ => model.level_operator(args.seed_symbol.unwrap_or('a'), need_k()?, args.max_word_length),
        },
    }
}

fn dec<R: Real>(x: R) -> Value {
    Value::String(x.to_decimal())
}

fn cover<R: Real>(args: &ModelArgs, lambda: R, k: usize) -> Result<CoverFamily<R>> {
    build_cover_capped(&builtin(args, lambda)?, k, args.max_word_length)
}

fn row<R: Real>(lambda: R, k: usize, quantity: &str, value: String) -> Vec<String> {
    vec![lambda.to_decimal(), k.to_string(), quantity.to_string(), value]
}

fn dispatch<R: Real>(command: &Command) -> Result<Document> {
    match command {
        Command::Spectrum { model, k, .. } => cmd_spectrum::<R>(model, *k),
        Command::Cover { model, k, .. } => cmd_cover::<R>(model, *k),
        Command::Dim { model, k, k2, root_tol, .. } => cmd_dim::<R>(model, *k, k2.unwrap_or(k + 1), root_tol.as_deref()),
        Command::Boxdim { model, k, eps_list, .. } => cmd_boxdim::<R>(model, *k, eps_list),
        Command::Gaps { model, k, .. } => cmd_gaps::<R>(model, *k),
        Command::Sum { model, k, .. } => cmd_sum::<R>(model, *k),
        Command::Trace { model, k, energies, energy_grid, check_map, .. } => {
            cmd_trace::<R>(model, *k, energies.as_deref(), energy_grid.as_deref(), *check_map)
        }
        Command::Bench { .. } => unreachable!("bench is dispatched separately"),
    }
}

pub fn cmd_spectrum<R: Real>(args: &ModelArgs, k: Option<usize>) -> Result<Document> {
    let mut docs = Vec::new();
    let mut rows = Vec::new();
    let ls: Vec<R> = lambdas(args)?;
    for &lambda in &ls {
        let op = operator_for(args, lambda, k)?;
        let s = spectrum(&op)?;
        let level = k.unwrap_or(op.period());
        for v in &s.eigs_plus {
            rows.push(row(lambda, level, "eig_plus", v.to_decimal()));
        }
        for v in &s.eigs_minus {
            rows.push(row(lambda, level, "eig_minus", v.to_decimal()));
        }
        for b in &s.bands {
            rows.push(row(lambda, level, "band_lo", b.lo.to_decimal()));
            rows.push(row(lambda, level, "band_hi", b.hi.to_decimal()));
        }
        rows.push(row(lambda, level, "repaired", s.repaired.to_string()));
        docs.push(json!({
            "lambda": dec(lambda),
            "K": op.period(),
            "precision": R::PRECISION.name(),
            "eigs_plus": s.eigs_plus.iter().map(|&v| dec(v)).collect::<Vec<_>>(),
            "eigs_minus": s.eigs_minus.iter().map(|&v| dec(v)).collect::<Vec<_>>(),
            "bands": s.bands.iter().map(|b| json!([b.lo.to_decimal(), b.hi.to_decimal()])).collect::<Vec<_>>(),
            "merged": s.merged.to_json(),
            "repaired": s.repaired,
            "diagnostics": s.diagnostics,
        }));
    }
    let json = if docs.len() == 1 { docs.pop().expect("one document") } else { Value::Array(docs) };
    Ok(Document::curve(json, rows))
}

pub fn cmd_cover<R: Real>(args: &ModelArgs, k: usize) -> Result<Document> {
    let mut docs = Vec::new();
    let mut rows = Vec::new();
    for lambda in lambdas::<R>(args)? {
        let c = cover(args, lambda, k)?;
        for &(lo, hi) in c.cover.intervals() {
            rows.push(row(lambda, k, "interval_lo", lo.to_decimal()));
            rows.push(row(lambda, k, "interval_hi", hi.to_decimal()));
        }
        docs.push(json!({
            "lambda": dec(lambda),
            "k": k,
            "cover": c.cover.to_json(),
            "raw_band_count": c.raw_bands().count(),
            "repaired": c.repaired(),
        }));
    }
    Ok(Document::curve(Value::Array(docs), rows))
}

pub fn cmd_dim<R: Real>(args: &ModelArgs, k: usize, k2: usize, root_tol: Option<&str>) -> Result<Document> {
    if k2 != k + 1 {
        return Err(Error::invalid(format!("the dimension estimate needs consecutive levels, got {k} and {k2}")));
    }
    let tol: R = match root_tol {
        Some(t) => parse_scalar(t)?,
        None => default_root_tol(),
    };
    let mut docs = Vec::new();
    let mut rows = Vec::new();
    for lambda in lambdas::<R>(args)? {
        let model = builtin(args, lambda)?;
        let c1 = build_cover_capped(&model, k, args.max_word_length)?;
        let c2 = build_cover_capped(&model, k2, args.max_word_length)?;
        let est = hausdorff_from_covers(&c1, &c2, tol)?;
        rows.push(row(lambda, k, "alpha", est.alpha.to_decimal()));
        rows.push(row(lambda, k, "residual", est.residual.to_decimal()));
        let mut doc = json!({
            "lambda": dec(lambda),
            "k": k,
            "k2": k2,
            "alpha": dec(est.alpha),
            "residual": dec(est.residual),
            "iterations": est.iterations,
            "status": format!("{:?}", est.status),
            "monotone": est.monotone,
        });
        if model.kind == ModelKind::Fibonacci {
            if let Some((lo, hi)) = fibonacci_dimension_bounds(lambda.to_f64()) {
                doc["lower_bound"] = Value::String(lo.to_decimal());
                doc["upper_bound"] = Value::String(hi.to_decimal());
                rows.push(row(lambda, k, "lower_bound", lo.to_decimal()));
                rows.push(row(lambda, k, "upper_bound", hi.to_decimal()));
            }
        }
        docs.push(doc);
    }
    Ok(Document::curve(Value::Array(docs), rows))
}

pub fn cmd_boxdim<R: Real>(args: &ModelArgs, k: usize, eps_list: &str) -> Result<Document> {
    let eps: Vec<R> = parse_eps_list(eps_list)?;
    let mut docs = Vec::new();
    let mut rows = Vec::new();
    for lambda in lambdas::<R>(args)? {
        let c = cover(args, lambda, k)?;
        let curve = box_dim_curve(&c.cover, &eps)?;
        let mut points = Vec::new();
        for &(e, ratio) in &curve {
            let n = box_count(&c.cover, e)?.count;
            rows.push(row(lambda, k, &format!("ratio@{}", e.to_decimal()), ratio.to_decimal()));
            points.push(json!({"eps": dec(e), "count": n, "ratio": dec(ratio)}));
        }
        docs.push(json!({"lambda": dec(lambda), "k": k, "curve": points}));
    }
    Ok(Document::curve(Value::Array(docs), rows))
}

pub fn cmd_gaps<R: Real>(args: &ModelArgs, k: usize) -> Result<Document> {
    let ls: Vec<R> = lambdas(args)?;
    use rayon::prelude::*;
    let results = ls
        .par_iter()
        .map(|&lambda| {
            let c = cover(args, lambda, k)?;
            Ok((lambda, largest_gap(&c), min_band_width(&c)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut docs = Vec::new();
    let mut rows = Vec::new();
    for (lambda, gap, (width, repaired)) in results {
        rows.push(row(lambda, k, "largest_gap", gap.to_decimal()));
        docs.push(json!({
            "lambda": dec(lambda),
            "k": k,
            "largest_gap": dec(gap),
            "min_band_width": dec(width),
            "repaired": repaired,
        }));
    }
    Ok(Document::curve(Value::Array(docs), rows))
}

pub fn cmd_sum<R: Real>(args: &ModelArgs, k: usize) -> Result<Document> {
    let mut docs = Vec::new();
    let mut rows = Vec::new();
    for lambda in lambdas::<R>(args)? {
        let c = cover(args, lambda, k)?;
        let sum = c.cover.minkowski_sum(&c.cover)?;
        for &(lo, hi) in sum.intervals() {
            rows.push(row(lambda, k, "interval_lo", lo.to_decimal()));
            rows.push(row(lambda, k, "interval_hi", hi.to_decimal()));
        }
        docs.push(json!({
            "lambda": dec(lambda),
            "k": k,
            "sum": sum.to_json(),
            "components": sum.len(),
            "largest_gap": dec(sum.largest_gap()),
        }));
    }
    let json = if docs.len() == 1 { docs.pop().expect("one document") } else { Value::Array(docs) };
    Ok(Document::curve(json, rows))
}

pub fn cmd_trace<R: Real>(
    args: &ModelArgs,
    k: Option<usize>,
    energies: Option<&str>,
    energy_grid: Option<&[String]>,
    check_map: bool,
) -> Result<Document> {
    let lambda = *lambdas::<R>(args)?
        .first()
        .ok_or_else(|| Error::invalid("trace takes a single coupling"))?;
    let op = operator_for(args, lambda, k)?;
    let es: Vec<R> = match (energies, energy_grid) {
        (Some(list), None) => list.split(',').map(|s| parse_scalar(s.trim())).collect::<Result<_>>()?,
        (None, Some(g)) => {
            let mut parts = g.to_vec();
            parts.insert(1, "lin".into());
            Grid::parse(&parts)?.values()
        }
        (None, None) => default_trace_samples(&spectrum(&op)?.merged),
        (Some(_), Some(_)) => return Err(Error::invalid("give either --energies or --energy-grid")),
    };
    let slack = default_slack(&op);
    let level = k.unwrap_or(op.period());
    let mut points = Vec::new();
    let mut rows = Vec::new();
    for &e in &es {
        let t = monodromy_at(&op, e)?.trace();
        let class = classify_trace(t, slack);
        let label = match class {
            Membership::Inside => "inside",
            Membership::Outside => "outside",
            Membership::Boundary => "boundary",
        };
        rows.push(vec![lambda.to_decimal(), level.to_string(), format!("trace@{}", e.to_decimal()), t.to_decimal()]);
        points.push(json!({"energy": dec(e), "trace": dec(t), "membership": label}));
    }
    let mut doc = json!({"lambda": dec(lambda), "K": op.period(), "slack": dec(slack), "points": points});
    if check_map {
        let model = builtin(args, lambda)?;
        let level = k.ok_or_else(|| Error::invalid("--check-map needs --k"))?;
        let report = check_trace_map(&model, level, &es)?;
        rows.push(row(lambda, level, "trace_map_residual", report.trace_residual.to_decimal()));
        doc["trace_map"] = json!({
            "trace_residual": dec(report.trace_residual),
            "matrix_residual": dec(report.matrix_residual),
            "evaluated": report.evaluated,
            "skipped": report.skipped,
        });
    }
    Ok(Document::curve(doc, rows))
}
