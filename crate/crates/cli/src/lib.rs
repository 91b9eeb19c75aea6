//! Command-line front end of `stable-rd`: every command maps onto library
//! calls and writes a CSV or JSON table headed by its resolved configuration.

pub mod args;
pub mod defaults;
pub mod figures;
pub mod output;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use stable_rd::quantizer::QuantizerDocument;
use stable_rd::rd::{rd_scalar, rd_vector_subgaussian, reverse_waterfill};
use stable_rd::stable::{pdf, pdf_by_inversion};
use stable_rd::strength::{solve_strength, strength_of_uniform, SourceSpec};
use stable_rd::uniform::{high_rate_prediction, uniform_error_strength, uniform_output_entropy, UniformSpec};
use stable_rd::{design, ReferenceLaw, StableParams};

use args::{Cli, Command, Format, PdfMethod};
use output::{render_table, Header, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] stable_rd::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0} curve(s) failed")]
    Curves(usize),
}

impl CliError {
    /// 2 for usage errors, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }
}

/// One rendered output.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub stem: String,
    pub text: String,
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    /// Curves that could not be computed, by name.
    pub failures: Vec<(String, CliError)>,
}

pub fn format_of(cli: &Cli) -> Format {
    cli.global.format.unwrap_or(match cli.command {
        Command::Design(_) => Format::Json,
        _ => Format::Csv,
    })
}

/// The resolved configuration echoed in every output header. Output paths
/// are left out so that identical runs give identical bytes.
pub fn resolved_config(cli: &Cli) -> Result<Map<String, Value>, CliError> {
    let mut map = Map::new();
    map.insert("command".into(), json!(cli.command.name()));
    let inner = match serde_json::to_value(&cli.command).expect("serializable") {
        Value::Object(mut o) => o.remove(cli.command.name()).unwrap_or(Value::Null),
        _ => Value::Null,
    };
    if let Value::Object(fields) = inner {
        for (k, v) in fields {
            if k != "out_dir" {
                map.insert(k, v);
            }
        }
    }
    match &cli.command {
        Command::Design(a) => {
            map.insert("alpha".into(), json!(a.source.resolve_alpha(a.alpha)?));
        }
        Command::UniformSweep(a) => {
            map.insert("alpha".into(), json!(a.source.resolve_alpha(a.alpha)?));
        }
        _ => {}
    }
    map.insert("format".into(), json!(format_of(cli)));
    map.insert("units".into(), json!(cli.global.units));
    map.insert("seed".into(), json!(cli.global.seed));
    Ok(map)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn check_grid(lo: f64, hi: f64, steps: usize, what: &str) -> Result<(), CliError> {
    if steps == 0 || !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(CliError::Usage(format!("{what} grid needs finite min <= max and steps >= 1")));
    }
    Ok(())
}

fn read_samples(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    text.split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| CliError::Usage(format!("{}: not a number: {t}", path.display()))))
        .collect()
}

/// Computes everything a command produces without touching the file system
/// (apart from reading sample files).
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let format = format_of(cli);
    let units = cli.global.units;
    let seed = cli.global.seed;
    let header = Header::new(resolved_config(cli)?);
    let single = |table: Table| Outcome {
        artifacts: vec![Artifact { stem: table.name.clone(), text: render_table(&header, &table, format) }],
        failures: vec![],
    };
    Ok(match &cli.command {
        Command::Pdf(a) => {
            check_grid(a.xmin, a.xmax, a.steps, "x")?;
            let p = StableParams::new(a.alpha, a.beta, a.gamma, a.delta)?;
            let mut t = Table::new("pdf", &["x", "pdf"]);
            t.rows = linspace(a.xmin, a.xmax, a.steps)
                .into_par_iter()
                .map(|x| {
                    let f = match a.method {
                        PdfMethod::Auto => pdf(&p, x)?,
                        PdfMethod::Inversion => pdf_by_inversion(&p, x)?,
                    };
                    Ok(vec![x, f])
                })
                .collect::<Result<_, CliError>>()?;
            single(t)
        }
        Command::Entropy(a) => {
            let h = ReferenceLaw::new(a.alpha, a.dim)?.entropy()?;
            let mut t = Table::new("entropy", &["alpha", "dim", "entropy"]);
            t.rows.push(vec![a.alpha, a.dim as f64, units.from_nats(h)]);
            single(t)
        }
        Command::Strength(a) => {
            let s = if a.uniform {
                strength_of_uniform(a.alpha)?
            } else {
                let src = match &a.samples {
                    Some(path) => SourceSpec::empirical(read_samples(path)?)?,
                    None => a.source.build()?.0,
                };
                solve_strength(&src, a.alpha, a.tol)?.value
            };
            let mut t = Table::new("strength", &["alpha", "strength"]);
            t.rows.push(vec![a.alpha, s]);
            single(t)
        }
        Command::Rd(a) => {
            check_grid(a.dmin, a.dmax, a.steps, "distortion")?;
            if a.dmin <= 0.0 {
                return Err(CliError::Usage("--dmin must be positive".into()));
            }
            let mut t = Table::new("rd", &["D", "R"]);
            t.rows = linspace(a.dmin, a.dmax, a.steps)
                .into_iter()
                .map(|d| {
                    let p = if a.dim == 1 {
                        rd_scalar(a.alpha, a.gamma, d)?
                    } else {
                        rd_vector_subgaussian(a.alpha, a.gamma, a.dim, d)?
                    };
                    Ok(vec![d, units.from_nats(p.rate)])
                })
                .collect::<Result<_, CliError>>()?;
            single(t)
        }
        Command::Waterfill(a) => {
            let w = reverse_waterfill(a.alpha, &a.strengths, a.distortion)?;
            let mut t = Table::new("waterfill", &["component", "strength", "distortion", "level", "rate"]);
            for (i, (s, d)) in a.strengths.iter().zip(&w.distortions).enumerate() {
                t.rows.push(vec![i as f64, *s, *d, w.level, units.from_nats(w.rate)]);
            }
            single(t)
        }
        Command::Design(a) => {
            let (src, _) = a.source.build()?;
            let alpha = a.source.resolve_alpha(a.alpha)?;
            let report = design::design_optimal(&src, alpha, a.levels, a.tol, seed)?;
            match format {
                Format::Json => {
                    let doc = QuantizerDocument {
                        alpha,
                        quantizer: report.quantizer.clone(),
                        error_strength: report.error_strength,
                    };
                    let result: Value = serde_json::from_str(&doc.to_json()).expect("valid document");
                    let text = output::render_document(
                        &header,
                        result,
                        json!({
                            "iterations": report.iterations,
                            "strength_trace": report.strength_trace,
                            "seed": report.seed,
                        }),
                    );
                    Outcome { artifacts: vec![Artifact { stem: "design".into(), text }], failures: vec![] }
                }
                Format::Csv => {
                    let mut t = Table::new("design", &["index", "point", "lower", "upper", "error_strength"]);
                    for (i, (lo, hi, x)) in report.quantizer.regions().enumerate() {
                        t.rows.push(vec![i as f64, x, lo, hi, report.error_strength]);
                    }
                    single(t)
                }
            }
        }
        Command::UniformSweep(a) => {
            let (src, _) = a.source.build()?;
            let alpha = a.source.resolve_alpha(a.alpha)?;
            let mut t = Table::new("uniform-sweep", &["delta", "error_strength", "ratio", "high_rate", "entropy"]);
            t.rows = a
                .deltas
                .par_iter()
                .map(|&delta| {
                    let spec = UniformSpec::new(delta, &src)?;
                    let s = uniform_error_strength(&spec, &src, alpha)?.value;
                    let h = uniform_output_entropy(&spec, &src)?;
                    Ok(vec![delta, s, s / delta, high_rate_prediction(alpha, delta)?, units.from_nats(h)])
                })
                .collect::<Result<_, CliError>>()?;
            single(t)
        }
        Command::Reproduce(a) => {
            let header = header.with("defaults_version", json!(defaults::DEFAULTS_VERSION));
            let mut outcome = Outcome::default();
            for (stem, table) in figures::curves(a.figure, units, seed, a.max_designed_levels) {
                match table {
                    Ok(t) => {
                        let h = header.clone().with("curve", json!(stem));
                        outcome.artifacts.push(Artifact { stem, text: render_table(&h, &t, format) });
                    }
                    Err(e) => outcome.failures.push((stem, e)),
                }
            }
            outcome
        }
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Executes `cli` and writes its outputs. `env_dir` is the value of
/// `STABLE_RD_OUT_DIR`, if set. Returns the files written.
pub fn run(cli: &Cli, env_dir: Option<PathBuf>) -> Result<Vec<PathBuf>, CliError> {
    let outcome = execute(cli)?;
    let ext = format_of(cli).extension();
    let mut written = Vec::new();
    match &cli.command {
        Command::Reproduce(a) => {
            let dir = a.out_dir.clone().or(env_dir).unwrap_or_else(|| PathBuf::from("figures"));
            for art in &outcome.artifacts {
                let path = dir.join(format!("{}.{ext}", art.stem));
                write_file(&path, &art.text)?;
                written.push(path);
            }
        }
        _ => {
            let art = &outcome.artifacts[0];
            let target = cli.global.output.clone().or_else(|| env_dir.map(|d| d.join(format!("{}.{ext}", art.stem))));
            match target {
                Some(path) => {
                    write_file(&path, &art.text)?;
                    written.push(path);
                }
                None => {
                    let mut out = std::io::stdout().lock();
                    out.write_all(art.text.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
                }
            }
        }
    }
    for (stem, e) in &outcome.failures {
        eprintln!("{stem}: {e}");
    }
    if !outcome.failures.is_empty() {
        return Err(CliError::Curves(outcome.failures.len()));
    }
    Ok(written)
}
