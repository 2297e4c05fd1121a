//! Command-line runner. Every command writes `<out>/<command>.json` and
//! `<out>/<command>.csv` and maps its outcome to an exit code: 0 when every
//! row passes, 2 for a verified negative result, 1 for errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{rational_to_string, Ratio};
use crate::fusion::{self, FusionElement};
use crate::hopf_image::{
    inner_faithfulness_report, FaithfulnessVerdict, FixMethod, ReportConfig, DEFAULT_TRANSFER_CAP,
};
use crate::invariants::{
    aggregate_label, all_words, reflection_sweep, topgen_sweep, Certificate, FixConfig, Verdict,
};
use crate::latin::{complete_rectangle, swap_corner_square, LatinRectangle, LatinSquare};
use crate::models::{self, Model, DEFAULT_MODEL_TOL};
use crate::partitions::ColoredWord;
use crate::tensor_calc::{DEFAULT_RANK_TOL, DEFAULT_TENSOR_CAP};
use crate::weingarten;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable overriding the tensor-size cap.
pub const CAP_ENV: &str = "QPERM_CAP";

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_NEGATIVE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "qperm", version, about = "Verification engine for quantum permutation and reflection groups")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct Common {
    /// Directory receiving the JSON and CSV reports.
    #[arg(long, global = true, default_value = "qperm-reports")]
    pub out: PathBuf,
    /// Record wall-clock seconds in the CSV (always recorded in the JSON).
    #[arg(long, global = true)]
    pub timings: bool,
    /// Numerical tolerance, in (0, 1e-2).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Largest tensor dimension N^k; overrides QPERM_CAP.
    #[arg(long, global = true)]
    pub cap: Option<u128>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Degreewise certificates that S_N^+ is generated by S_N and S_M^+.
    Topgen {
        #[arg(long = "N")]
        n: usize,
        #[arg(long = "M")]
        m: usize,
        #[arg(long = "kmax", default_value_t = 4)]
        k_max: usize,
    },
    /// Certificates that H_N^{s+} is generated by S_N and H_{N-1}^{s+}.
    ReflTopgen {
        #[arg(long = "N")]
        n: usize,
        /// Finite modulus s.
        #[arg(long)]
        s: String,
        /// Check every word of length 1..=maxlen.
        #[arg(long = "maxlen", default_value_t = 3)]
        max_len: usize,
        /// Explicit words such as "1,1;0,1"; replaces --maxlen.
        #[arg(long)]
        words: Option<String>,
    },
    /// Weingarten table and optional Haar moment (1-based indices).
    Haar {
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        rows: Option<String>,
        #[arg(long)]
        cols: Option<String>,
    },
    /// Build a model file.
    BuildModel {
        /// circulant | swap-latin | deformed | symmetric | glued | mixed | latin
        #[arg(long)]
        kind: String,
        #[arg(long = "N")]
        n: usize,
        /// Corner size for `glued`.
        #[arg(long = "M")]
        m: Option<usize>,
        /// JSON rectangle (1-based rows) completed for `latin`.
        #[arg(long)]
        rectangle: Option<PathBuf>,
        /// Model file to write.
        #[arg(long)]
        model: PathBuf,
    },
    /// Validate a model file and test whether it is classical.
    CheckModel {
        #[arg(long)]
        model: PathBuf,
    },
    /// Row and column overlap summary of a model file.
    Describe {
        #[arg(long)]
        model: PathBuf,
    },
    /// Compare the Hopf image of a model with S_N^+ level by level.
    InnerFaithful {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "rmax", default_value_t = 4)]
        r_max: usize,
        #[arg(long, default_value = "eigen")]
        method: String,
        /// Permit levels above 4.
        #[arg(long)]
        allow_large: bool,
    },
    /// Fusion ring computations.
    Fusion {
        #[command(subcommand)]
        op: FusionOp,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FusionOp {
    /// Expand x_f x_g.
    Multiply {
        #[arg(long)]
        s: String,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        g: String,
    },
    /// Dimension of x_f.
    Dimension {
        #[arg(long)]
        s: String,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long = "N")]
        n: usize,
    },
    /// Image of x_f under R_{s} -> R_{to}.
    Restrict {
        #[arg(long)]
        s: String,
        #[arg(long)]
        to: u32,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Topgen { .. } => "topgen",
            Command::ReflTopgen { .. } => "refl-topgen",
            Command::Haar { .. } => "haar",
            Command::BuildModel { .. } => "build-model",
            Command::CheckModel { .. } => "check-model",
            Command::Describe { .. } => "describe",
            Command::InnerFaithful { .. } => "inner-faithful",
            Command::Fusion { .. } => "fusion",
        }
    }
}

/// One CSV line.
#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub statement: String,
    pub params: String,
    pub dim_lhs: Option<usize>,
    pub dim_rhs: Option<usize>,
    pub verdict: String,
    pub tol: f64,
    pub backend: String,
    pub seconds: f64,
}

impl From<&Certificate> for Row {
    fn from(c: &Certificate) -> Self {
        Row {
            statement: c.statement.clone(),
            params: c.params.to_string(),
            dim_lhs: Some(c.dim_lhs),
            dim_rhs: Some(c.dim_rhs),
            verdict: c.verdict.to_string(),
            tol: c.tol,
            backend: c.backend.clone(),
            seconds: c.seconds,
        }
    }
}

struct Outcome {
    rows: Vec<Row>,
    details: Value,
    summary: String,
    exit: u8,
}

/// Resolved settings recorded in every report.
#[derive(Debug, Serialize)]
struct Resolved<'a> {
    command: &'a Command,
    out: &'a Path,
    timings: bool,
    tol: f64,
    tensor_cap: u128,
    transfer_cap: u128,
}

/// Parses `args` (including the program name) and runs the command, printing
/// to stdout and stderr. Returns the process exit code.
pub fn run_from_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn env_cap() -> Result<Option<u128>> {
    match std::env::var(CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Usage(format!("{CAP_ENV}={v:?} is not a positive integer"))),
        Err(_) => Ok(None),
    }
}

pub fn run(cli: &Cli) -> Result<u8> {
    let common = &cli.common;
    let tensor_cap = match common.cap {
        Some(c) => c,
        None => env_cap()?.unwrap_or(DEFAULT_TENSOR_CAP),
    };
    if tensor_cap == 0 {
        return Err(Error::Usage("cap: must be positive".into()));
    }
    let default_tol = match cli.command {
        Command::CheckModel { .. } | Command::Describe { .. } => DEFAULT_MODEL_TOL,
        _ => DEFAULT_RANK_TOL,
    };
    let tol = common.tol.unwrap_or(default_tol);
    if !(tol > 0.0 && tol < 1e-2) {
        return Err(Error::Usage(format!("tol: {tol} is outside (0, 1e-2)")));
    }
    let resolved = Resolved {
        command: &cli.command,
        out: &common.out,
        timings: common.timings,
        tol,
        tensor_cap,
        transfer_cap: DEFAULT_TRANSFER_CAP,
    };
    let cfg = FixConfig {
        tol,
        tensor_cap,
    };
    let outcome = match &cli.command {
        Command::Topgen { n, m, k_max } => topgen(*n, *m, *k_max, &cfg)?,
        Command::ReflTopgen {
            n,
            s,
            max_len,
            words,
        } => refl_topgen(*n, s, *max_len, words.as_deref(), &cfg)?,
        Command::Haar { n, k, rows, cols } => haar(*n, *k, rows.as_deref(), cols.as_deref())?,
        Command::BuildModel {
            kind,
            n,
            m,
            rectangle,
            model,
        } => build_model(kind, *n, *m, rectangle.as_deref(), model)?,
        Command::CheckModel { model } => check_model(model, tol)?,
        Command::Describe { model } => describe(model, tol)?,
        Command::InnerFaithful {
            model,
            r_max,
            method,
            allow_large,
        } => inner_faithful(model, *r_max, method, *allow_large, tol)?,
        Command::Fusion { op } => fusion_op(op)?,
    };
    write_reports(cli.command.name(), &resolved, &outcome)?;
    for row in &outcome.rows {
        println!(
            "{:<16} {:<28} {:>6} {:>6}  {}",
            row.statement,
            row.params,
            row.dim_lhs.map_or(String::new(), |d| d.to_string()),
            row.dim_rhs.map_or(String::new(), |d| d.to_string()),
            row.verdict
        );
    }
    println!("{}", outcome.summary);
    Ok(outcome.exit)
}

fn write_reports(name: &str, resolved: &Resolved, outcome: &Outcome) -> Result<()> {
    std::fs::create_dir_all(resolved.out)?;
    let report = json!({
        "tool": "qperm",
        "version": VERSION,
        "config": resolved,
        "summary": outcome.summary,
        "exit_code": outcome.exit,
        "rows": outcome.rows,
        "details": outcome.details,
    });
    std::fs::write(
        resolved.out.join(format!("{name}.json")),
        serde_json::to_string_pretty(&report)? + "\n",
    )?;
    let mut w = csv::Writer::from_path(resolved.out.join(format!("{name}.csv")))?;
    w.write_record(["statement", "params", "dim_lhs", "dim_rhs", "verdict", "tol", "backend", "seconds"])?;
    let opt = |d: Option<usize>| d.map_or(String::new(), |d| d.to_string());
    for row in &outcome.rows {
        let seconds = if resolved.timings {
            format!("{:.3}", row.seconds)
        } else {
            String::new()
        };
        w.write_record([
            row.statement.clone(),
            row.params.clone(),
            opt(row.dim_lhs),
            opt(row.dim_rhs),
            row.verdict.clone(),
            format!("{:e}", row.tol),
            row.backend.clone(),
            seconds,
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn certificate_outcome(certs: Vec<Certificate>) -> Result<Outcome> {
    let exit = if certs.iter().any(|c| c.verdict == Verdict::Inconclusive) {
        EXIT_ERROR
    } else if certs.iter().any(|c| c.verdict == Verdict::StrictlyLarger) {
        EXIT_NEGATIVE
    } else {
        EXIT_OK
    };
    Ok(Outcome {
        rows: certs.iter().map(Row::from).collect(),
        summary: aggregate_label(&certs),
        details: serde_json::to_value(&certs)?,
        exit,
    })
}

fn topgen(n: usize, m: usize, k_max: usize, cfg: &FixConfig) -> Result<Outcome> {
    if k_max == 0 {
        return Err(Error::Usage("kmax: must be at least 1".into()));
    }
    certificate_outcome(topgen_sweep(n, m, k_max, cfg)?)
}

fn parse_modulus(s: &str) -> Result<u32> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf") || t == "∞" {
        return Err(Error::Usage(
            "s: s = inf is not computable directly; probe finite moduli s (for example s = 2, 3, 4)"
                .into(),
        ));
    }
    match t.parse::<u32>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(Error::Usage(format!("s: {s:?} is not a positive integer"))),
    }
}

fn refl_topgen(
    n: usize,
    s: &str,
    max_len: usize,
    words: Option<&str>,
    cfg: &FixConfig,
) -> Result<Outcome> {
    let s = parse_modulus(s)?;
    let words: Vec<ColoredWord> = match words {
        Some(list) => list
            .split(';')
            .map(|w| fusion::parse_word(s, w))
            .collect::<Result<_>>()?,
        None => all_words(s, max_len),
    };
    if words.is_empty() {
        return Err(Error::Usage("words: nothing to check".into()));
    }
    certificate_outcome(reflection_sweep(n, &words, cfg)?)
}

fn parse_indices(text: &str, n: usize, key: &str) -> Result<Vec<usize>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|t| match t.trim().parse::<usize>() {
            Ok(i) if (1..=n).contains(&i) => Ok(i - 1),
            _ => Err(Error::Usage(format!("{key}: {t:?} is not an index in 1..={n}"))),
        })
        .collect()
}

fn haar(n: usize, k: usize, rows: Option<&str>, cols: Option<&str>) -> Result<Outcome> {
    let start = Instant::now();
    let fix_dim = weingarten::haar_fix_dimension(k, n)?;
    let table = weingarten::weingarten_table(k, n);
    let mut details = json!({ "fix_dimension": fix_dim });
    let mut verdict = "OK".to_string();
    match &table {
        Ok(t) => details["table"] = serde_json::to_value(t.to_json())?,
        Err(Error::Singular { rank, size, .. }) => {
            verdict = "SINGULAR".into();
            details["singular"] = json!({ "rank": rank, "size": size });
        }
        Err(e) => return Err(Error::Domain(e.to_string())),
    }
    let mut summary = format!("dim Fix(u^(x){k}) = {fix_dim} for S_{n}^+");
    match (rows, cols) {
        (Some(r), Some(c)) => {
            let r = parse_indices(r, n, "rows")?;
            let c = parse_indices(c, n, "cols")?;
            if r.len() != k || c.len() != k {
                return Err(Error::Usage(format!("rows/cols: expected {k} indices each")));
            }
            let value = weingarten::haar_moment(n, &r, &c)?;
            summary.push_str(&format!("; moment = {}", rational_to_string(&value)));
            details["moment"] = json!({
                "rows": r.iter().map(|i| i + 1).collect::<Vec<_>>(),
                "cols": c.iter().map(|i| i + 1).collect::<Vec<_>>(),
                "value": Ratio(value),
            });
        }
        (None, None) => {}
        _ => return Err(Error::Usage("rows/cols: give both or neither".into())),
    }
    let row = Row {
        statement: "haar-fix".into(),
        params: format!("N={n};k={k}"),
        dim_lhs: Some(fix_dim),
        dim_rhs: table.as_ref().ok().map(|t| t.partitions().len()),
        verdict,
        tol: 0.0,
        backend: "exact".into(),
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok(Outcome {
        rows: vec![row],
        details,
        summary,
        exit: EXIT_OK,
    })
}

fn load_model(path: &Path) -> Result<Model> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))?;
    Model::from_json(&text).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
}

fn build_model(
    kind: &str,
    n: usize,
    m: Option<usize>,
    rectangle: Option<&Path>,
    path: &Path,
) -> Result<Outcome> {
    let start = Instant::now();
    let model = match kind {
        "circulant" => Model::Flat(models::from_latin_standard(&LatinSquare::circulant(n))),
        "swap-latin" => Model::Flat(models::from_latin_standard(&swap_corner_square(n)?)),
        "deformed" => Model::Flat(models::deformed_swap_model(n)?),
        "symmetric" => Model::Flat(models::symmetric_generating_model(n)?),
        "glued" => {
            let m = m.ok_or_else(|| Error::Usage("M: required for kind glued".into()))?;
            Model::Flat(models::glue_corner(&models::deformed_swap_model(m)?, n)?)
        }
        "mixed" => Model::General(models::direct_sum(&[
            models::deformed_swap_model(n)?.to_magic(),
            models::symmetric_generating_model(n)?.to_magic(),
        ])?),
        "latin" => {
            let file = rectangle
                .ok_or_else(|| Error::Usage("rectangle: required for kind latin".into()))?;
            let rows: Vec<Vec<usize>> = serde_json::from_str(&std::fs::read_to_string(file)?)?;
            let rect = LatinRectangle::from_one_based(rows)?;
            if rect.n() != n {
                return Err(Error::Usage(format!("N: rectangle has {} columns", rect.n())));
            }
            Model::Flat(models::from_latin_standard(&complete_rectangle(&rect)?))
        }
        other => {
            return Err(Error::Usage(format!(
                "kind: unknown kind {other:?}; use circulant, swap-latin, deformed, symmetric, glued, mixed or latin"
            )))
        }
    };
    let report = model.validate(DEFAULT_MODEL_TOL);
    if !report.passed {
        return Err(Error::Validation(report.failures().join("; ")));
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, model.to_json()? + "\n")?;
    let magic = model.to_magic();
    Ok(Outcome {
        rows: vec![Row {
            statement: "build-model".into(),
            params: format!("kind={kind};N={n}"),
            dim_lhs: None,
            dim_rhs: None,
            verdict: "PASS".into(),
            tol: DEFAULT_MODEL_TOL,
            backend: if model.is_flat() { "flat".into() } else { "general".into() },
            seconds: start.elapsed().as_secs_f64(),
        }],
        details: json!({ "model": path, "N": magic.n(), "d": magic.d(), "validation": report }),
        summary: format!("wrote {}", path.display()),
        exit: EXIT_OK,
    })
}

fn check_model(path: &Path, tol: f64) -> Result<Outcome> {
    let start = Instant::now();
    let model = load_model(path)?;
    let report = model.validate(tol);
    if !report.passed {
        return Err(Error::Validation(format!(
            "{}: {}",
            path.display(),
            report.failures().join("; ")
        )));
    }
    let magic = model.to_magic();
    let commutator = models::max_commutator_norm(&magic);
    let classical = commutator <= tol;
    let mut rows: Vec<Row> = report
        .checks
        .iter()
        .map(|c| Row {
            statement: "check-model".into(),
            params: format!("check={}", c.name),
            dim_lhs: None,
            dim_rhs: None,
            verdict: if c.passed { "PASS".into() } else { "FAIL".into() },
            tol,
            backend: "frobenius".into(),
            seconds: 0.0,
        })
        .collect();
    rows.push(Row {
        statement: "is-classical".into(),
        params: format!("N={};d={}", magic.n(), magic.d()),
        dim_lhs: None,
        dim_rhs: None,
        verdict: if classical { "CLASSICAL".into() } else { "NON_CLASSICAL".into() },
        tol,
        backend: "operator-norm".into(),
        seconds: start.elapsed().as_secs_f64(),
    });
    Ok(Outcome {
        rows,
        details: json!({ "validation": report, "max_commutator": commutator, "classical": classical }),
        summary: format!(
            "valid {} model, {}",
            if model.is_flat() { "flat" } else { "general" },
            if classical { "classical" } else { "non-classical" }
        ),
        exit: EXIT_OK,
    })
}

fn describe(path: &Path, tol: f64) -> Result<Outcome> {
    let model = load_model(path)?;
    let desc = models::describe(&model.to_magic(), model.is_flat(), tol);
    let summary = format!(
        "N={} d={} flat={} max row overlap {:.3e}, max column overlap {:.3e}, max commutator {:.3e}",
        desc.n,
        desc.d,
        desc.flat,
        desc.row_overlap.iter().cloned().fold(0.0, f64::max),
        desc.column_overlap.iter().cloned().fold(0.0, f64::max),
        desc.max_commutator
    );
    Ok(Outcome {
        rows: Vec::new(),
        details: serde_json::to_value(&desc)?,
        summary,
        exit: EXIT_OK,
    })
}

fn inner_faithful(
    path: &Path,
    r_max: usize,
    method: &str,
    allow_large: bool,
    tol: f64,
) -> Result<Outcome> {
    if r_max == 0 {
        return Err(Error::Usage("rmax: must be at least 1".into()));
    }
    if r_max > 4 && !allow_large {
        return Err(Error::Usage(
            "rmax: levels above 4 need --allow-large (dense eigensolves grow as N^(2r))".into(),
        ));
    }
    let model = load_model(path)?;
    let report = model.validate(DEFAULT_MODEL_TOL);
    if !report.passed {
        return Err(Error::Validation(report.failures().join("; ")));
    }
    let cfg = ReportConfig {
        tol,
        cap: DEFAULT_TRANSFER_CAP,
        method: method.parse::<FixMethod>()?,
    };
    let id = path.file_stem().map_or("model".into(), |s| s.to_string_lossy().into_owned());
    let rep = inner_faithfulness_report(&model, &id, r_max, &cfg)?;
    let rows = rep
        .levels
        .iter()
        .map(|l| Row {
            statement: "inner-faithful".into(),
            params: format!("model={id};N={};r={}", rep.n, l.r),
            dim_lhs: Some(l.fixed_dim),
            dim_rhs: Some(l.target_dim),
            verdict: if l.defect == 0 { "MATCH".into() } else { format!("DEFECT({})", l.defect) },
            tol,
            backend: method.to_string(),
            seconds: l.seconds,
        })
        .collect();
    let exit = match rep.verdict {
        FaithfulnessVerdict::MatchesUpTo(_) => EXIT_OK,
        FaithfulnessVerdict::FailsAt(_) => EXIT_NEGATIVE,
    };
    Ok(Outcome {
        rows,
        summary: format!("{}: {}", rep.verdict, rep.note),
        details: serde_json::to_value(&rep)?,
        exit,
    })
}

fn fusion_op(op: &FusionOp) -> Result<Outcome> {
    let (summary, details) = match op {
        FusionOp::Multiply { s, f, g } => {
            let s = parse_modulus(s)?;
            let (f, g) = (fusion::parse_word(s, f)?, fusion::parse_word(s, g)?);
            let p = fusion::multiply(&f, &g)?;
            (
                format!("x_{f} x_{g} = {p}"),
                json!({ "s": s, "f": f.to_string(), "g": g.to_string(), "product": p }),
            )
        }
        FusionOp::Dimension { s, f, n } => {
            let s = parse_modulus(s)?;
            let f = fusion::parse_word(s, f)?;
            let d = fusion::dimension(&f, *n)?;
            (
                format!("d(x_{f}) = {d} at N = {n}"),
                json!({ "s": s, "f": f.to_string(), "N": n, "dimension": d.to_string() }),
            )
        }
        FusionOp::Restrict { s, to, f } => {
            let s = parse_modulus(s)?;
            let f = fusion::parse_word(s, f)?;
            let image: FusionElement = fusion::restrict_basis(&f, *to)?;
            (
                format!("x_{f} restricts to {image}"),
                json!({ "from": s, "to": to, "f": f.to_string(), "image": image }),
            )
        }
    };
    Ok(Outcome {
        rows: Vec::new(),
        details,
        summary,
        exit: EXIT_OK,
    })
}
