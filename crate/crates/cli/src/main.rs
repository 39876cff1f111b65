use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use chasm_core::abp::{abp_stats, emit_abp, parse_abp, Abp};
use chasm_core::circuit::{binarize_multiplications, circuit_stats, emit_circuit, parse_circuit};
use chasm_core::corpus::{boolean_corpus, gen_corpus, standard_corpus, CorpusSpec};
use chasm_core::passes::{
    circuit_to_abp, collapse_additions, eliminate_subtractions, homogenize, run_pipeline, to_weakly_skew,
    HomogenizeMode, PipelineConfig, Target, Verify,
};
use chasm_core::poly::{equiv_exact, equiv_random, monomial_cap, Verdict};
use chasm_core::report::{bound_report, pipeline_json, PassReport};
use chasm_core::Circuit;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Depth reduction for arithmetic circuits.
///
/// Exit status is 0 on success, 2 when a bound or equivalence check fails
/// and 1 on any other error. CHASM_MONOMIAL_CAP overrides the monomial cap
/// of the exact polynomial oracle.
#[derive(Parser)]
#[command(name = "chasm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a circuit from a named family.
    Gen(GenArgs),
    /// Print size, depth and degree statistics of a circuit or branching program.
    Stats {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run a single transformation pass.
    Pass {
        pass: PassName,
        file: PathBuf,
        /// Keep constants out of the output (homogenize only).
        #[arg(long)]
        constant_free: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run a full reduction pipeline.
    Pipeline {
        target: PipelineName,
        file: PathBuf,
        #[command(flatten)]
        opts: PipelineArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check that two circuits or programs compute the same polynomials.
    Verify {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, value_enum, default_value_t = VerifyMode::Exact)]
        mode: VerifyMode,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Run a pipeline over many circuits and tabulate every bound check.
    Report {
        target: PipelineName,
        /// Circuit files; may be empty when --corpus is given.
        files: Vec<PathBuf>,
        /// Add a built-in corpus.
        #[arg(long, value_enum)]
        corpus: Option<CorpusName>,
        #[command(flatten)]
        opts: PipelineArgs,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    vars: Option<usize>,
    #[arg(long)]
    size: Option<usize>,
    #[arg(long)]
    max_degree: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the result here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write the JSON pass report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Print the JSON report instead of the bound table.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long, value_enum, default_value_t = Depth4Kind::Circuit)]
    mode: Depth4Kind,
    /// Stage count for depth2delta (default 3) and boolean (default 2).
    #[arg(long)]
    delta: Option<usize>,
    /// Verify at this many random points instead of by exact expansion.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Ryser,
    Imm,
    Power,
    Random,
    BoolReach,
}

#[derive(Clone, Copy, ValueEnum)]
enum PassName {
    EliminateSub,
    CollapseAdd,
    Homogenize,
    ToWeaklySkew,
    ToAbp,
}

#[derive(Clone, Copy, ValueEnum)]
enum PipelineName {
    Depth4,
    Depth2delta,
    Polylog,
    Boolean,
}

#[derive(Clone, Copy, ValueEnum)]
enum Depth4Kind {
    Circuit,
    Formula,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyMode {
    Exact,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum CorpusName {
    Standard,
    Boolean,
}

/// A parsed input file.
enum Object {
    Circuit(Circuit),
    Abp(Abp),
}

/// Applies a generic two-argument oracle to whichever kinds `a` and `b` hold.
macro_rules! on_pair {
    ($a:expr, $b:expr, |$x:ident, $y:ident| $body:expr) => {
        match ($a, $b) {
            (Object::Circuit($x), Object::Circuit($y)) => $body,
            (Object::Circuit($x), Object::Abp($y)) => $body,
            (Object::Abp($x), Object::Circuit($y)) => $body,
            (Object::Abp($x), Object::Abp($y)) => $body,
        }
    };
}

/// Whether the run's checks held.
enum Outcome {
    Ok,
    CheckFailed,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Gen(args) => {
            let c = gen_corpus(&corpus_spec(&args)?)?;
            write_or_print(args.output.as_deref(), &emit_circuit(&c))?;
            Ok(Outcome::Ok)
        }
        Command::Stats { file, json } => {
            let value = match read_object(&file)? {
                Object::Circuit(c) => serde_json::to_value(circuit_stats(&c))?,
                Object::Abp(g) => serde_json::to_value(abp_stats(&g))?,
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&value)?);
            } else if let serde_json::Value::Object(map) = value {
                for (k, v) in map {
                    println!("{k}: {v}");
                }
            }
            Ok(Outcome::Ok)
        }
        Command::Pass { pass, file, constant_free, out } => {
            let c = read_circuit(&file)?;
            let (text, report) = match pass {
                PassName::EliminateSub => circuit_result(eliminate_subtractions(&c)?),
                PassName::CollapseAdd => circuit_result(collapse_additions(&c)?),
                PassName::Homogenize => {
                    let mode = if constant_free { HomogenizeMode::Vp0 } else { HomogenizeMode::Vp };
                    circuit_result(homogenize(&c, mode)?)
                }
                // Both passes need binary products; wide ones are split first.
                PassName::ToWeaklySkew => circuit_result(to_weakly_skew(&binarize_multiplications(&c))?),
                PassName::ToAbp => {
                    let (g, report) = circuit_to_abp(&binarize_multiplications(&c))?;
                    (emit_abp(&g), report)
                }
            };
            finish(&file, &text, &report, &out)
        }
        Command::Pipeline { target, file, opts, out } => {
            let c = read_circuit(&file)?;
            let (result, report) = run_pipeline(&c, &pipeline_config(target, &opts))?;
            finish(&file, &emit_circuit(&result), &report, &out)
        }
        Command::Verify { left, right, mode, trials, seed, json } => {
            let (a, b) = (read_object(&left)?, read_object(&right)?);
            let verdict = match mode {
                VerifyMode::Exact => {
                    let same = on_pair!(&a, &b, |x, y| equiv_exact(x, y, monomial_cap()))?;
                    serde_json::json!({ "verdict": if same { "equivalent" } else { "distinct" } })
                }
                VerifyMode::Random => {
                    let v: Verdict = on_pair!(&a, &b, |x, y| equiv_random(x, y, trials, seed))?;
                    serde_json::to_value(v)?
                }
            };
            let equal = verdict["verdict"] == "equivalent";
            if json {
                println!("{}", serde_json::to_string_pretty(&verdict)?);
            } else {
                println!("{}", if equal { "equivalent" } else { "distinct" });
            }
            Ok(if equal { Outcome::Ok } else { Outcome::CheckFailed })
        }
        Command::Report { target, files, corpus, opts, report, json } => {
            let mut inputs: Vec<(String, Circuit)> = Vec::new();
            for f in &files {
                inputs.push((f.display().to_string(), read_circuit(f)?));
            }
            let specs = match corpus {
                Some(CorpusName::Standard) => standard_corpus(),
                Some(CorpusName::Boolean) => boolean_corpus(),
                None => Vec::new(),
            };
            for spec in specs {
                inputs.push((spec.to_string(), gen_corpus(&spec)?));
            }
            let cfg = pipeline_config(target, &opts);
            let mut reports: Vec<(String, PassReport)> = Vec::with_capacity(inputs.len());
            for (name, c) in inputs {
                let (_, r) = run_pipeline(&c, &cfg).with_context(|| format!("pipeline failed on {name}"))?;
                reports.push((name, r));
            }
            let summary = bound_report(&reports)?;
            let value = serde_json::to_value(&summary)?;
            if let Some(path) = report {
                write_file(&path, &serde_json::to_string_pretty(&value)?)?;
            }
            if json {
                println!("{}", serde_json::to_string_pretty(&value)?);
            } else {
                print!("{}", summary.table());
            }
            Ok(if summary.all_bounds_ok { Outcome::Ok } else { Outcome::CheckFailed })
        }
    }
}

fn corpus_spec(a: &GenArgs) -> Result<CorpusSpec> {
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| anyhow!("--{flag} is required for this family"));
    Ok(match a.family {
        Family::Ryser => CorpusSpec::Ryser { n: need(a.n, "n")? },
        Family::Imm => CorpusSpec::Imm { n: need(a.n, "n")?, k: need(a.k, "k")? },
        Family::Power => CorpusSpec::Power { k: need(a.k, "k")? },
        Family::Random => CorpusSpec::Random {
            vars: need(a.vars, "vars")?,
            size: need(a.size, "size")?,
            max_degree: a.max_degree.ok_or_else(|| anyhow!("--max-degree is required for this family"))?,
            seed: a.seed,
        },
        Family::BoolReach => CorpusSpec::BoolReach { nodes: need(a.nodes, "nodes")?, seed: a.seed },
    })
}

fn pipeline_config(target: PipelineName, opts: &PipelineArgs) -> PipelineConfig {
    let target = match target {
        PipelineName::Depth4 => match opts.mode {
            Depth4Kind::Circuit => Target::Depth4Circuit,
            Depth4Kind::Formula => Target::Depth4Formula,
        },
        PipelineName::Depth2delta => Target::Depth2Delta(opts.delta.unwrap_or(3)),
        PipelineName::Polylog => Target::Polylog,
        PipelineName::Boolean => Target::BooleanConstantDepth(opts.delta.unwrap_or(2)),
    };
    let verify = match opts.trials {
        Some(trials) => Verify::Random { trials, seed: opts.seed },
        None => Verify::Exact,
    };
    PipelineConfig::new(target).with_verify(verify)
}

fn circuit_result((c, report): (Circuit, PassReport)) -> (String, PassReport) {
    (emit_circuit(&c), report)
}

/// Writes the result and report, prints a summary and maps the bound
/// checks to an outcome.
fn finish(input: &Path, text: &str, report: &PassReport, out: &OutputArgs) -> Result<Outcome> {
    let json = serde_json::to_string_pretty(&pipeline_json(report))?;
    if let Some(path) = &out.report {
        write_file(path, &json)?;
    }
    match &out.output {
        Some(path) => write_file(path, text)?,
        None if !out.json => print!("{text}"),
        None => {}
    }
    if out.json {
        println!("{json}");
    } else if out.output.is_some() {
        let summary = bound_report(&[(input.display().to_string(), report.clone())])?;
        print!("{}", summary.table());
    }
    Ok(if report.all_ok() { Outcome::Ok } else { Outcome::CheckFailed })
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => anyhow!("file not found: {}", path.display()),
        _ => anyhow!("cannot read {}: {e}", path.display()),
    })
}

fn read_circuit(path: &Path) -> Result<Circuit> {
    match read_object(path)? {
        Object::Circuit(c) => Ok(c),
        Object::Abp(_) => bail!("{} holds a branching program, expected a circuit", path.display()),
    }
}

/// Branching programs start with an `abp` header; anything else is read as
/// a circuit.
fn read_object(path: &Path) -> Result<Object> {
    let text = read_text(path)?;
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .unwrap_or("");
    let context = || format!("cannot parse {}", path.display());
    if first.split_whitespace().next() == Some("abp") {
        Ok(Object::Abp(parse_abp(&text).with_context(context)?))
    } else {
        Ok(Object::Circuit(parse_circuit(&text).with_context(context)?))
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
