use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clannish::functor::{f_dim, f_dim_at, multiplicities, SearchOptions};
use clannish::oracle::{oracle_check, DEFAULT_LIMIT};
use clannish::presentation::{bundled, check, Presentation, RawPresentation};
use clannish::scalars::{make_field, Aut};
use clannish::skewquad::{classify_quadratic, SkewQuadratic};
use clannish::walkmod::{build_module, parameter_library, Parameter, Representation};
use clannish::wordcore::{enumerate_bands, enumerate_strings, Descriptor};
use clannish::Error;
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

/// Strings, bands and module decompositions over semilinear clannish algebras.
#[derive(Parser)]
#[command(name = "clannish", version)]
struct Cli {
    /// Indented JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a presentation against the clannish axioms.
    Validate { file: String },
    /// Classify the skew quadratic x² − βx + γ in K[x; σ].
    Quadratic {
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 0)]
        sigma: i64,
        #[arg(long)]
        beta: u64,
        #[arg(long)]
        gamma: u64,
    },
    /// Canonical strings up to a length.
    Strings {
        file: String,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
    },
    /// Canonical primitive bands up to a period.
    Bands {
        file: String,
        #[arg(long, default_value_t = 4)]
        max_period: usize,
    },
    /// Build the module of a string or band with a parameter.
    Build {
        file: String,
        #[arg(long)]
        word: String,
        /// Parameter file, or inline JSON such as '{"dim":1}' or '{"lambda":[[1]]}'.
        #[arg(long)]
        param: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Admissible paths grouped by source and target.
    Basis {
        file: String,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
    },
    /// Dimension of the functor of a word on a module.
    Fdim {
        module: PathBuf,
        #[arg(long)]
        word: String,
        /// Index in J_w; the least one by default.
        #[arg(long)]
        index: Option<i64>,
        #[arg(long)]
        presentation: Option<String>,
    },
    /// Multiplicities of all strings and bands in a module.
    Decompose {
        module: PathBuf,
        #[arg(long)]
        max_len: Option<usize>,
        #[arg(long)]
        max_period: Option<usize>,
        /// Worker threads for the descriptor search.
        #[arg(long)]
        jobs: Option<usize>,
        /// Verify the relation laws during the search.
        #[arg(long)]
        check_laws: bool,
        #[arg(long)]
        presentation: Option<String>,
    },
    /// Compare a brute-force decomposition with the multiplicities.
    OracleCheck {
        module: PathBuf,
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: usize,
        #[arg(long)]
        max_len: Option<usize>,
        #[arg(long)]
        max_period: Option<usize>,
        #[arg(long)]
        presentation: Option<String>,
    },
}

enum Failure {
    One(Error),
    Many(Vec<Error>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::One(e)
    }
}

fn error_json(e: &Error) -> Value {
    json!({"kind": e.kind(), "message": e.to_string()})
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn parse_json(text: &str, what: &str) -> Result<Value, Error> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

/// A presentation file, or one of the bundled names.
fn raw_presentation(source: &str) -> Result<RawPresentation, Error> {
    let path = Path::new(source);
    if path.exists() {
        serde_json::from_str(&read(path)?).map_err(|e| Error::Parse(format!("{source}: {e}")))
    } else {
        Ok(bundled(source)?.raw().clone())
    }
}

fn presentation(source: &str) -> Result<Presentation, Failure> {
    check(&raw_presentation(source)?).map_err(Failure::Many)
}

fn load_module(path: &Path, source: Option<&str>) -> Result<(Presentation, Representation), Failure> {
    let v = parse_json(&read(path)?, &path.display().to_string())?;
    let p = match (source, v.get("presentation")) {
        (Some(s), _) => presentation(s)?,
        (None, Some(Value::String(s))) => presentation(s)?,
        (None, Some(raw)) => {
            let raw: RawPresentation =
                serde_json::from_value(raw.clone()).map_err(|e| Error::Parse(format!("presentation: {e}")))?;
            check(&raw).map_err(Failure::Many)?
        }
        (None, None) => {
            return Err(Error::Parse("module has no embedded presentation; pass --presentation".into()).into())
        }
    };
    let m = Representation::from_json(&p, &v)?;
    m.check(&p)?;
    Ok((p, m))
}

/// The parameter file or inline JSON, else the first one-dimensional
/// parameter available for `d`.
fn parameter(p: &Presentation, d: &Descriptor, arg: Option<&str>) -> Result<Parameter, Error> {
    let Some(arg) = arg else {
        return parameter_library(p, d, 1)?
            .into_iter()
            .next()
            .ok_or_else(|| Error::InvalidParameterMatrix("no one-dimensional parameter; pass --param".into()));
    };
    let path = Path::new(arg);
    let text = if path.exists() { read(path)? } else { arg.to_string() };
    Parameter::from_json(&p.field, &parse_json(&text, "parameter")?)
}

fn search_options(max_len: Option<usize>, max_period: Option<usize>, check_laws: bool) -> SearchOptions {
    SearchOptions { max_len, max_period, check_laws }
}

fn run(command: Command) -> Result<Value, Failure> {
    match command {
        Command::Validate { file } => Ok(presentation(&file)?.to_json()),
        Command::Quadratic { p, n, sigma, beta, gamma } => {
            let f = make_field(p, n, None)?;
            let q = SkewQuadratic::new(&f, Aut::new(sigma, n), f.check(beta)?, f.check(gamma)?)?;
            Ok(classify_quadratic(&q).to_json())
        }
        Command::Strings { file, max_len } => {
            let p = presentation(&file)?;
            let ds: Vec<Value> = enumerate_strings(&p, max_len).iter().map(|d| d.to_json(&p)).collect();
            Ok(json!({"count": ds.len(), "strings": ds}))
        }
        Command::Bands { file, max_period } => {
            let p = presentation(&file)?;
            let ds: Vec<Value> = enumerate_bands(&p, max_period).iter().map(|d| d.to_json(&p)).collect();
            Ok(json!({"count": ds.len(), "bands": ds}))
        }
        Command::Build { file, word, param, output } => {
            let p = presentation(&file)?;
            let d = Descriptor::parse(&p, &word)?;
            let v = parameter(&p, &d, param.as_deref())?;
            let m = build_module(&p, &d, &v)?;
            let mut out = m.to_json();
            out["presentation"] = serde_json::to_value(p.raw()).expect("presentation serializes");
            out["word"] = json!(d.display(&p));
            out["parameter"] = v.to_json();
            match output {
                Some(path) => {
                    let text = serde_json::to_string_pretty(&out).expect("json");
                    fs::write(&path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                    Ok(json!({"written": path.display().to_string(), "dims": m.dims, "total_dim": m.total_dim()}))
                }
                None => Ok(out),
            }
        }
        Command::Basis { file, max_len } => {
            let p = presentation(&file)?;
            let paths = p.enumerate_admissible_paths(max_len);
            let mut groups: Vec<Value> = Vec::new();
            for s in 0..p.vertices.len() {
                for t in 0..p.vertices.len() {
                    let names: Vec<String> =
                        paths.iter().filter(|q| q.tail == s && q.head == t).map(|q| p.path_name(q)).collect();
                    if !names.is_empty() {
                        groups.push(json!({"source": p.vertices[s], "target": p.vertices[t], "paths": names}));
                    }
                }
            }
            Ok(json!({"count": paths.len(), "groups": groups}))
        }
        Command::Fdim { module, word, index, presentation } => {
            let (p, m) = load_module(&module, presentation.as_deref())?;
            let d = Descriptor::parse(&p, &word)?;
            let r = match index {
                Some(i) => f_dim_at(&p, &m, &d, i)?,
                None => f_dim(&p, &m, &d)?,
            };
            let mut out = r.to_json();
            out["word"] = json!(d.display(&p));
            out["Jw"] = json!(d.jw_len());
            Ok(out)
        }
        Command::Decompose { module, max_len, max_period, jobs, check_laws, presentation } => {
            let (p, m) = load_module(&module, presentation.as_deref())?;
            let opts = search_options(max_len, max_period, check_laws);
            let result = match jobs {
                Some(j) => rayon::ThreadPoolBuilder::new()
                    .num_threads(j.max(1))
                    .build()
                    .map_err(|e| Error::PreconditionViolated(e.to_string()))?
                    .install(|| multiplicities(&p, &m, &opts))?,
                None => multiplicities(&p, &m, &opts)?,
            };
            let mut out = result.to_json(&p);
            if check_laws {
                out["laws_checked"] = json!(result.laws_checked);
            }
            Ok(out)
        }
        Command::OracleCheck { module, limit, max_len, max_period, presentation } => {
            let (p, m) = load_module(&module, presentation.as_deref())?;
            let report = oracle_check(&p, &m, &search_options(max_len, max_period, false), limit)?;
            Ok(report.to_json(&p))
        }
    }
}

fn emit(v: &Value, pretty: bool) {
    let text = if pretty { serde_json::to_string_pretty(v) } else { serde_json::to_string(v) };
    println!("{}", text.expect("json"));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(v) => {
            emit(&v, cli.pretty);
            ExitCode::SUCCESS
        }
        Err(f) => {
            let errors = match f {
                Failure::One(e) => vec![e],
                Failure::Many(es) => es,
            };
            let mut v = error_json(&errors[0]);
            if errors.len() > 1 {
                v["all"] = Value::Array(errors.iter().map(error_json).collect());
            }
            emit(&json!({"error": v}), cli.pretty);
            ExitCode::FAILURE
        }
    }
}
