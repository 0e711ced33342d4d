//! `moebius`: certification front end for finite extended metric spaces and
//! the model space `Rⁿ ∪ {∞}`.
//!
//! Exit codes: 0 pass, 1 violation, 2 input error.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use moebius_core::cross_ratio::{crt_exact, is_ptolemy_with, Arithmetic, PtolemyReport};
use moebius_core::harness::{coordinatize, run_suite, run_suites, verify_map_word, Mode, Status, SuiteReport, SUITES};
use moebius_core::io::{
    load_space, read_circles, read_map_word, read_space, read_text, space_to_csv, space_to_json, LoadError,
};
use moebius_core::metric::{validate_with, TriangleScan, ValidationReport};
use moebius_core::{crt, metric_inversion, moebius_equivalent, Config, ExtendedMetricSpace, Quadruple};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "moebius", version, about = "Cross-ratio, Ptolemy and Möbius-geometry certification")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Relative tolerance.
    #[arg(long, global = true, env = "MOEBIUS_TOLERANCE", default_value_t = 1e-9)]
    tolerance: f64,
    /// Absolute tolerance floor.
    #[arg(long, global = true, env = "MOEBIUS_TOLERANCE_ABS", default_value_t = 1e-15)]
    tolerance_abs: f64,
    /// `exhaustive` or `sample:<count>`.
    #[arg(long, global = true, env = "MOEBIUS_MODE", default_value = "exhaustive", value_parser = parse_mode)]
    mode: Mode,
    #[arg(long, global = true, env = "MOEBIUS_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, env = "MOEBIUS_OUTPUT", value_enum, default_value_t = Output::Text)]
    output: Output,
    #[arg(long, global = true, env = "MOEBIUS_ARITHMETIC", value_enum, default_value_t = ArithmeticArg::Float)]
    arithmetic: ArithmeticArg,
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true, env = "MOEBIUS_REPORT")]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ArithmeticArg {
    Float,
    Exact,
}

#[derive(Subcommand)]
enum Command {
    /// Check the extended-metric axioms of a distance table.
    Validate { file: PathBuf },
    /// Cross-ratio triple of four points.
    Crt {
        file: PathBuf,
        #[arg(required = true)]
        ids: Vec<String>,
    },
    /// Metric inversion at a point; prints the inverted table.
    Invert {
        file: PathBuf,
        #[arg(long)]
        at: String,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
    },
    /// Certify the Ptolemy inequality on every scanned quadruple.
    CheckPtolemy { file: PathBuf },
    /// Compare the cross-ratios of two spaces through a point correspondence.
    Equivalence {
        a: PathBuf,
        b: PathBuf,
        /// JSON object mapping ids of `a` to ids of `b`; identity by default.
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Run certification suites on the model space.
    ModelVerify {
        /// Suite name, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, env = "MOEBIUS_DIM", default_value_t = 3)]
        dim: usize,
        /// Distance table for `metric-axioms` or `ptolemy`.
        #[arg(long)]
        space: Option<PathBuf>,
        /// Map word JSON to check instead of running suites.
        #[arg(long, conflicts_with = "space")]
        map: Option<PathBuf>,
        /// Circles to push through the map word.
        #[arg(long, requires = "map")]
        circles: Option<PathBuf>,
    },
    /// Build a coordinate chart of `Rⁿ` and check it.
    Coordinatize {
        #[arg(long, env = "MOEBIUS_DIM", default_value_t = 3)]
        dim: usize,
    },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: moebius_core::Error| e.to_string())
}

/// What a command prints, and how it ends.
struct Outcome {
    json: Value,
    text: String,
    code: u8,
}

struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type CmdResult = Result<Outcome, InputError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let body = match cli.global.output {
        Output::Json => serde_json::to_string_pretty(&outcome.json).expect("serializable") + "\n",
        Output::Text => outcome.text,
    };
    match &cli.global.report {
        Some(path) => {
            if let Err(e) = fs::write(path, body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{body}"),
    }
    ExitCode::from(outcome.code)
}

fn config(g: &Global, dimension: usize) -> Config {
    Config {
        tolerance_rel: g.tolerance,
        tolerance_abs: g.tolerance_abs,
        seed: g.seed,
        dimension,
        mode: g.mode,
        arithmetic: match g.arithmetic {
            ArithmeticArg::Float => Arithmetic::Float,
            ArithmeticArg::Exact => Arithmetic::ExactRational,
        },
        ..Config::default()
    }
}

fn run(cli: &Cli) -> CmdResult {
    let g = &cli.global;
    let cfg = config(g, 3);
    cfg.validate()?;
    match &cli.command {
        Command::Validate { file } => validate_cmd(file, &cfg),
        Command::Crt { file, ids } => crt_cmd(file, ids, &cfg),
        Command::Invert { file, at, radius } => invert_cmd(file, at, *radius, &cfg, g.output),
        Command::CheckPtolemy { file } => ptolemy_cmd(file, &cfg),
        Command::Equivalence { a, b, map } => equivalence_cmd(a, b, map.as_deref(), &cfg),
        Command::ModelVerify { suite, dim, space, map, circles } => {
            let cfg = config(g, *dim);
            match map {
                Some(word) => map_word_cmd(word, circles.as_deref(), &cfg),
                None => model_verify_cmd(suite, space.as_deref(), &cfg),
            }
        }
        Command::Coordinatize { dim } => coordinatize_cmd(&config(g, *dim)),
    }
}

/// Parsed and validated; a table that violates the axioms is an input error.
fn load(path: &Path, cfg: &Config) -> Result<ExtendedMetricSpace, InputError> {
    load_space(path, cfg.tolerance()).map_err(|e| match e {
        LoadError::Parse(e) => InputError(format!("{}: {e}", path.display())),
        LoadError::Invalid(r) => InputError(format!(
            "{}: not an extended metric space ({} violation(s)); run `moebius validate` for details",
            path.display(),
            r.violations.len()
        )),
    })
}

fn triangle_scan(cfg: &Config) -> TriangleScan {
    match cfg.mode {
        Mode::Exhaustive => TriangleScan::Exhaustive,
        Mode::Sample { count } => TriangleScan::Sampled { count, seed: cfg.seed },
    }
}

fn code(pass: bool) -> u8 {
    if pass {
        0
    } else {
        1
    }
}

fn validate_cmd(file: &Path, cfg: &Config) -> CmdResult {
    let space = read_space(file)?;
    let report: ValidationReport = validate_with(&space, cfg.tolerance(), triangle_scan(cfg));
    let valid = report.is_valid();
    let mut text = format!(
        "{}: {} points, infinite point {}, {} triangles checked: {}\n",
        file.display(),
        space.len(),
        space.infinite_point().unwrap_or("none"),
        report.triangles_checked,
        if valid { "valid" } else { "INVALID" }
    );
    for v in &report.violations {
        let _ = writeln!(text, "  {}", serde_json::to_string(v).expect("serializable"));
    }
    Ok(Outcome {
        json: json!({
            "file": file.display().to_string(),
            "points": space.len(),
            "infinite_point": space.infinite_point(),
            "valid": valid,
            "report": report,
        }),
        text,
        code: code(valid),
    })
}

fn crt_cmd(file: &Path, ids: &[String], cfg: &Config) -> CmdResult {
    let [a, b, c, d] = ids else {
        return Err(InputError(format!("crt takes exactly four point ids, got {}", ids.len())));
    };
    let space = load(file, cfg)?;
    let q = Quadruple([a.as_str(), b.as_str(), c.as_str(), d.as_str()]);
    let triple = crt(&space, &q)?;
    let mut json = json!({
        "quadruple": ids,
        "triple": triple,
        "ptolemy_defect": triple.ptolemy_defect(),
    });
    let mut text = format!("crt({a}, {b}, {c}, {d}) = {triple}\nPtolemy defect {:.6e}\n", triple.ptolemy_defect());
    if cfg.arithmetic == Arithmetic::ExactRational {
        let exact = crt_exact(&space, &q)?;
        let entries: Vec<String> = exact.entries().iter().map(|e| e.to_string()).collect();
        let defect = exact.ptolemy_defect().to_string();
        let _ = writeln!(text, "exact ({}), defect {defect}", entries.join(" : "));
        json["exact"] = json!({"triple": entries, "ptolemy_defect": defect});
    }
    Ok(Outcome { json, text, code: 0 })
}

fn invert_cmd(file: &Path, at: &str, radius: f64, cfg: &Config, output: Output) -> CmdResult {
    let space = load(file, cfg)?;
    let inverted = metric_inversion(&space, at, radius)?;
    let json = serde_json::from_str(&space_to_json(&inverted)).expect("own output parses");
    let text = match output {
        Output::Json => String::new(),
        Output::Text => space_to_csv(&inverted),
    };
    Ok(Outcome { json, text, code: 0 })
}

fn ptolemy_text(r: &PtolemyReport) -> String {
    let mut text = format!(
        "ptolemy: {} (max defect {:.6e} over {} quadruples, {}, tolerance {:e})\n",
        r.status, r.max_defect, r.scanned, r.mode, r.tolerance
    );
    if !r.witness.is_empty() {
        let _ = writeln!(text, "  witness: {}", r.witness.join(" "));
    }
    if let Some(exact) = &r.exact_max_defect {
        let _ = writeln!(text, "  exact max defect: {exact}");
    }
    text
}

fn ptolemy_cmd(file: &Path, cfg: &Config) -> CmdResult {
    let space = load(file, cfg)?;
    let report = is_ptolemy_with(&space, cfg.scan_mode(), cfg.tolerance_rel, cfg.arithmetic)?;
    Ok(Outcome {
        text: ptolemy_text(&report),
        code: code(report.passed()),
        json: serde_json::to_value(&report).expect("serializable"),
    })
}

fn equivalence_cmd(a: &Path, b: &Path, map: Option<&Path>, cfg: &Config) -> CmdResult {
    let sa = load(a, cfg)?;
    let sb = load(b, cfg)?;
    let correspondence: HashMap<String, String> = match map {
        Some(path) => serde_json::from_str(&read_text(path)?)
            .map_err(|e| InputError(format!("{}: expected a JSON object of id pairs: {e}", path.display())))?,
        None => sa.ids().iter().map(|id| (id.clone(), id.clone())).collect(),
    };
    let report = moebius_equivalent(&sa, &sb, &correspondence, cfg.scan_mode(), cfg.tolerance_rel)?;
    let mut text = format!(
        "{}: discrepancy {:.6e} over {} quadruples ({}, tolerance {:e})\n",
        if report.equivalent { "equivalent" } else { "NOT equivalent" },
        report.discrepancy,
        report.scanned,
        report.mode,
        report.tolerance
    );
    if !report.witness.is_empty() {
        let _ = writeln!(text, "  witness: {}", report.witness.join(" "));
    }
    Ok(Outcome { text, code: code(report.equivalent), json: serde_json::to_value(&report).expect("serializable") })
}

fn suites_outcome(reports: Vec<SuiteReport>, cfg: &Config) -> Outcome {
    let pass = reports.iter().all(|r| r.status == Status::Pass);
    let text: String = reports.iter().map(SuiteReport::to_text).collect();
    let suites: serde_json::Map<String, Value> =
        reports.iter().map(|r| (r.suite.clone(), serde_json::to_value(r).expect("serializable"))).collect();
    Outcome {
        json: json!({
            "status": if pass { "pass" } else { "fail" },
            "seed": cfg.seed,
            "dimension": cfg.dimension,
            "suites": suites,
        }),
        text,
        code: code(pass),
    }
}

fn model_verify_cmd(suite: &str, space: Option<&Path>, cfg: &Config) -> CmdResult {
    let reports = if suite == "all" {
        if space.is_some() {
            return Err(InputError("--space needs a single suite (metric-axioms or ptolemy)".into()));
        }
        run_suites(&SUITES, cfg)?
    } else {
        let space = space.map(read_space).transpose()?;
        vec![run_suite(suite, cfg, space.as_ref())?]
    };
    Ok(suites_outcome(reports, cfg))
}

fn map_word_cmd(word: &Path, circles: Option<&Path>, cfg: &Config) -> CmdResult {
    let word = read_map_word(word)?;
    let circles = circles.map(read_circles).transpose()?.unwrap_or_default();
    let cfg = Config { dimension: word.dim(), ..cfg.clone() };
    let v = verify_map_word(&word, &circles, &cfg)?;
    let mut out = suites_outcome(vec![v.report], &cfg);
    out.json["normal_form"] = serde_json::to_value(&v.normal_form).expect("serializable");
    out.json["circle_images"] = serde_json::to_value(&v.circle_images).expect("serializable");
    if let Some(nf) = &v.normal_form {
        let _ = writeln!(out.text, "normal form: {}", serde_json::to_string(nf).expect("serializable"));
    }
    for c in &v.circle_images {
        let _ = writeln!(out.text, "circle image: {}", serde_json::to_string(c).expect("serializable"));
    }
    Ok(out)
}

fn coordinatize_cmd(cfg: &Config) -> CmdResult {
    let (chart, report) = coordinatize(cfg)?;
    let mut out = suites_outcome(vec![report], cfg);
    out.json["chart"] = serde_json::to_value(&chart).expect("serializable");
    let _ = writeln!(out.text, "chart: {}", serde_json::to_string(&chart).expect("serializable"));
    Ok(out)
}
