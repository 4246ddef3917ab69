//! Command-line front end: charts, descent verification and golden files.
//!
//! Every computation is described by a [`JobSpec`] and produces a
//! [`ChartFile`]; golden files are chart files that carry their own spec,
//! so `golden check` only needs the path.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{valuation, ArithError, PGroup, Zpr};
use crate::chart::Chart;
use crate::cobar::{compare, dim0_complex, multivar_e2, symbolic_e2, CobarError, Page};
use crate::oracle::{
    build_chart, e3alg_chart, e3alg_order_by_relations, filtration_chart_labeled, tr_chart_labeled, ChartKind,
};
use crate::reps::{w_mackey, RepError};
use crate::witt::PRational;

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: not a chart file: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Cobar(#[from] CobarError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Parse { .. } => EXIT_USAGE,
            _ => EXIT_FAIL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Tr,
    Filtration,
    Gr,
    Mackey,
    E3alg,
    WittRow,
    Descent,
}

/// Everything needed to recompute a chart file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub target: Target,
    pub p: u64,
    pub r: u32,
    pub vars: usize,
    pub max_weight: u64,
    pub max_dim: i64,
    pub i: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deg: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kmax: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub denom: Option<u32>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub full: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellRecord {
    pub deg: Vec<u64>,
    pub dim: i64,
    pub exps: Vec<u32>,
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartFile {
    pub version: u32,
    pub spec: JobSpec,
    pub engine: String,
    pub cells: Vec<CellRecord>,
}

impl ChartFile {
    pub fn new(spec: JobSpec, engine: &str, mut cells: Vec<CellRecord>) -> Self {
        cells.sort_by(|a, b| (&a.deg, a.dim).cmp(&(&b.deg, b.dim)));
        Self { version: SCHEMA_VERSION, spec, engine: engine.to_string(), cells }
    }

    fn from_chart(spec: JobSpec, engine: &str, chart: &Chart) -> Self {
        let cells = chart
            .iter()
            .map(|((deg, dim), e)| CellRecord {
                deg: deg.clone(),
                dim: *dim,
                exps: e.group.exponents().to_vec(),
                labels: e.labels.clone(),
            })
            .collect();
        Self::new(spec, engine, cells)
    }

    /// Canonical serialization: pretty JSON, cells sorted, trailing newline.
    pub fn to_json(&self) -> String {
        let mut sorted = self.clone();
        sorted.cells.sort_by(|a, b| (&a.deg, a.dim).cmp(&(&b.deg, b.dim)));
        let mut s = serde_json::to_string_pretty(&sorted).expect("chart files always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_csv(&self) -> String {
        let join = |v: Vec<String>| v.join(";");
        let mut out = String::from("deg,dim,exps,labels\n");
        for c in &self.cells {
            let labels = join(c.labels.clone()).replace('"', "\"\"");
            let _ = writeln!(
                out,
                "{},{},{},\"{labels}\"",
                join(c.deg.iter().map(u64::to_string).collect()),
                c.dim,
                join(c.exps.iter().map(u32::to_string).collect()),
            );
        }
        out
    }

    pub fn to_table(&self) -> String {
        let rows: Vec<[String; 4]> = self
            .cells
            .iter()
            .map(|c| {
                let deg: Vec<String> = c.deg.iter().map(u64::to_string).collect();
                [
                    format!("({})", deg.join(",")),
                    c.dim.to_string(),
                    PGroup::from_exponents(self.spec.p, c.exps.iter().copied()).to_string(),
                    c.labels.join(", "),
                ]
            })
            .collect();
        let head = ["deg", "dim", "group", "labels"];
        let mut width = head.map(str::len);
        for row in &rows {
            for (w, cell) in width.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: [&str; 4]| {
            let padded: Vec<String> = cells.iter().zip(width).map(|(c, w)| format!("{c:<w$}")).collect();
            padded.join(" | ").trim_end().to_string() + "\n"
        };
        let mut out = line(head);
        out += &(width.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>().join("-+-") + "\n");
        for row in &rows {
            out += &line([&row[0], &row[1], &row[2], &row[3]]);
        }
        out
    }
}

/// A computed chart file with its verification verdict.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub file: ChartFile,
    pub pass: bool,
    pub report: Vec<String>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Checks the invariants of a spec that clap cannot express.
pub fn validate(spec: &JobSpec) -> Result<(), CliError> {
    Zpr::new(spec.p, spec.r).map_err(|e| usage(e.to_string()))?;
    if spec.vars == 0 {
        return Err(usage("--vars must be at least 1"));
    }
    if spec.max_dim < 0 {
        return Err(usage("--max-dim must be non-negative"));
    }
    if spec.kmax == Some(0) {
        return Err(usage("--kmax must be positive"));
    }
    if let Some(n) = spec.denom {
        if n + 1 < spec.r && matches!(spec.target, Target::WittRow | Target::Descent) {
            return Err(usage(format!("--denom must be at least r - 1 = {}", spec.r - 1)));
        }
    }
    if matches!(spec.target, Target::WittRow | Target::Descent) {
        match &spec.deg {
            None => return Err(usage("a weight or multidegree is required")),
            Some(d) if d.is_empty() => return Err(usage("empty multidegree")),
            Some(d) if spec.target == Target::WittRow && d.len() != 1 => {
                return Err(usage("the Witt row is computed for one variable"))
            }
            _ => {}
        }
    }
    Ok(())
}

/// Runs a job. Verification failures are reported through
/// [`Outcome::pass`]; errors mean the job could not run.
pub fn compute(spec: &JobSpec) -> Result<Outcome, CliError> {
    validate(spec)?;
    let (p, r) = (spec.p, spec.r);
    match spec.target {
        Target::Tr | Target::Filtration | Target::Gr => {
            let kind = match spec.target {
                Target::Tr => ChartKind::Tr,
                Target::Filtration => ChartKind::Filtration(spec.i),
                _ => ChartKind::Gr(spec.i),
            };
            let chart = build_chart(kind, p, r, spec.vars, spec.max_weight, spec.max_dim);
            let file = ChartFile::from_chart(spec.clone(), "oracle", &chart);
            Ok(Outcome { file, pass: true, report: Vec::new() })
        }
        Target::Mackey => mackey(spec),
        Target::E3alg => e3alg(spec),
        Target::WittRow => witt_row(spec),
        Target::Descent => descent(spec),
    }
}

fn mackey(spec: &JobSpec) -> Result<Outcome, CliError> {
    let mut cells = Vec::new();
    let mut report = Vec::new();
    let mut pass = true;
    for dim in 0..=spec.max_dim {
        let m = w_mackey(spec.p, spec.r, dim)?;
        if !m.relations_hold() {
            pass = false;
            report.push(format!("dim {dim}: res/tr relations fail"));
        }
        for l in 1..=spec.r {
            let g = m.level(l);
            if g.is_trivial() {
                continue;
            }
            let mut labels = vec![format!("W_{l}")];
            if l < spec.r {
                labels.push(format!("res from level {}: reduction", l + 1));
                labels.push(format!("tr to level {}: 1 -> {}", l + 1, spec.p));
            }
            cells.push(CellRecord { deg: vec![l as u64], dim, exps: g.exponents().to_vec(), labels });
        }
    }
    Ok(Outcome { file: ChartFile::new(spec.clone(), "oracle", cells), pass, report })
}

fn e3alg(spec: &JobSpec) -> Result<Outcome, CliError> {
    let level = spec.denom.unwrap_or(spec.r - 1);
    let cap = spec
        .p
        .checked_pow(level)
        .and_then(|q| q.checked_mul(spec.max_weight.max(1)))
        .filter(|&c| c <= 1 << 20)
        .ok_or_else(|| usage("--denom and --max-weight give too many exponents"))?;
    let mut cells = Vec::new();
    let mut report = Vec::new();
    for ell in 0..=(spec.max_dim / 2) as u64 {
        for num in 0..=cap {
            let s = PRational::new(spec.p, num, level);
            let Some(e) = e3alg_chart(spec.p, spec.r, ell, s) else { break };
            let check = e3alg_order_by_relations(spec.p, spec.r, ell, s);
            if check != Some(e) {
                report.push(format!("z_{ell}^{s}: formula {e}, relations {check:?}"));
            }
            cells.push(CellRecord {
                deg: vec![num],
                dim: 2 * ell as i64,
                exps: vec![e],
                labels: vec![format!("z_{ell}^{s}")],
            });
        }
    }
    let pass = report.is_empty();
    Ok(Outcome { file: ChartFile::new(spec.clone(), "oracle", cells), pass, report })
}

fn expected_row(p: u64, r: u32, d: u64) -> PGroup {
    match valuation(d, p) {
        Some(v) => PGroup::cyclic(p, (v + 1).min(r)),
        None => PGroup::cyclic(p, r),
    }
}

fn witt_row(spec: &JobSpec) -> Result<Outcome, CliError> {
    let (p, r) = (spec.p, spec.r);
    let d = spec.deg.as_ref().expect("validated")[0];
    let level = spec.denom.unwrap_or(r);
    let kmax = spec.kmax.unwrap_or(d as usize + 2);
    let complex = dim0_complex(p, r, d, kmax, level, !spec.full)?;
    let h = complex.homology()?;
    let weight = PRational::new(p, d, r - 1);
    let mut report = Vec::new();
    let mut cells = Vec::new();
    for (k, g) in h.iter().enumerate() {
        let want = if k == 0 { expected_row(p, r, d) } else { PGroup::trivial(p) };
        if *g != want {
            report.push(format!("H^{k}: got {g}, expected {want}"));
        }
        if !g.is_trivial() {
            cells.push(CellRecord {
                deg: vec![d],
                dim: k as i64,
                exps: g.exponents().to_vec(),
                labels: vec![format!("H^{k} of W_{r} at weight {weight}")],
            });
        }
    }
    let pass = report.is_empty();
    Ok(Outcome { file: ChartFile::new(spec.clone(), "witt-row", cells), pass, report })
}

fn descent_page(spec: &JobSpec, deg: &[u64], kmax: usize) -> Result<Page, CobarError> {
    if deg.len() == 1 {
        symbolic_e2(spec.p, spec.r, deg[0], spec.max_dim, kmax)
    } else {
        multivar_e2(spec.p, spec.r, deg, spec.max_dim, kmax)
    }
}

fn descent(spec: &JobSpec) -> Result<Outcome, CliError> {
    let (p, r) = (spec.p, spec.r);
    let deg = spec.deg.clone().expect("validated");
    let lead = deg.iter().copied().find(|&d| d > 0).unwrap_or(0);
    let kmax = spec.kmax.unwrap_or(lead as usize + 2);
    let mut report = vec![format!("window: dims 0..={}, kmax {kmax}", spec.max_dim)];
    let fail = |report: Vec<String>| Outcome {
        file: ChartFile::new(spec.clone(), "compare", Vec::new()),
        pass: false,
        report,
    };
    let page = match descent_page(spec, &deg, kmax) {
        Ok(page) => page,
        Err(e @ (CobarError::CollapseViolation { .. } | CobarError::NotClosed { .. })) => {
            report.push(e.to_string());
            return Ok(fail(report));
        }
        Err(e) => return Err(e.into()),
    };
    let mut pass = true;
    if deg.len() == 1 {
        let level = spec.denom.unwrap_or(r);
        let complex = dim0_complex(p, r, deg[0], kmax, level, !spec.full)?;
        let h = complex.homology()?;
        for (k, g) in h.iter().enumerate() {
            let row = page.group(k, 0);
            let ok = *g == row;
            pass &= ok;
            report.push(format!("row 0 column {k}: witt {g}, page {row}: {}", verdict(ok)));
        }
    }
    let mut oracle = Chart::new(p, r, deg.len());
    for n in 0..=spec.max_dim {
        let (g, labels) = tr_chart_labeled(p, r, &deg, n);
        oracle.insert(deg.clone(), n, g, labels);
    }
    let cmp = compare(&page, &oracle, None);
    for c in &cmp.cells {
        report.push(format!("dim {}: page {}, tr {}: {}", c.dim, c.page, c.oracle, verdict(c.pass)));
    }
    pass &= cmp.pass;
    for i in 1..=spec.i {
        let mut chart = Chart::new(p, r, deg.len());
        for n in 0..=spec.max_dim {
            let (g, labels) = filtration_chart_labeled(p, r, i, &deg, n);
            chart.insert(deg.clone(), n, g, labels);
        }
        let cmp = compare(&page, &chart, Some(i));
        for c in cmp.failures() {
            report.push(format!("F^{i} dim {}: page {}, oracle {}: fail", c.dim, c.page, c.oracle));
        }
        report.push(format!("F^{i}: {}", verdict(cmp.pass)));
        pass &= cmp.pass;
    }
    let cells = cmp
        .cells
        .iter()
        .filter(|c| !c.page.is_trivial())
        .map(|c| CellRecord {
            deg: c.deg.clone(),
            dim: c.dim,
            exps: c.page.exponents().to_vec(),
            labels: c.labels.clone(),
        })
        .collect();
    Ok(Outcome { file: ChartFile::new(spec.clone(), "compare", cells), pass, report })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

#[derive(Debug, Parser)]
#[command(name = "trcalc", version, about = "Exact TR charts of polynomial rings over F_p")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChartTarget {
    Tr,
    Filtration,
    Gr,
    Mackey,
    E3alg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Args)]
pub struct ChartArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    #[arg(long, default_value_t = 1)]
    pub vars: usize,
    #[arg(long, default_value_t = 4)]
    pub max_weight: u64,
    #[arg(long, default_value_t = 8)]
    pub max_dim: i64,
    /// Filtration index.
    #[arg(long, default_value_t = 0)]
    pub i: u32,
    /// Denominator level for e3alg exponents and the Witt row.
    #[arg(long)]
    pub denom: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct DescentArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    /// One-variable weight d.
    #[arg(long, conflicts_with = "deg")]
    pub weight: Option<u64>,
    /// Multidegree, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub deg: Option<Vec<u64>>,
    /// Highest cosimplicial degree; defaults to d + 2.
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Denominator level N of the Witt row; defaults to r.
    #[arg(long)]
    pub denom: Option<u32>,
    /// Abutment dimensions 0..=max-dim; defaults to 2d + 4.
    #[arg(long)]
    pub max_dim: Option<i64>,
    /// Also compare the filtration pieces F^1..F^i.
    #[arg(long, default_value_t = 0)]
    pub i: u32,
    /// Use the full complex instead of the normalized one for the Witt row.
    #[arg(long)]
    pub full: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate a closed-form chart.
    Chart {
        #[arg(value_enum)]
        target: ChartTarget,
        #[command(flatten)]
        args: ChartArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the descent spectral sequence against the closed form.
    Descent {
        #[command(subcommand)]
        action: DescentAction,
    },
    /// Record or check golden chart files.
    Golden {
        #[command(subcommand)]
        action: GoldenAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum DescentAction {
    Verify {
        #[command(flatten)]
        args: DescentArgs,
        /// Write the E_2 abutment as a chart file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum GoldenAction {
    /// Compute a chart and write it as a golden file.
    Record {
        path: PathBuf,
        #[arg(long, value_enum)]
        target: Target,
        #[command(flatten)]
        args: ChartArgs,
        #[arg(long)]
        weight: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        deg: Option<Vec<u64>>,
        #[arg(long)]
        kmax: Option<usize>,
    },
    /// Recompute a golden file from its embedded spec and compare.
    Check {
        path: PathBuf,
        /// Recompute at another denominator level.
        #[arg(long)]
        denom: Option<u32>,
    },
}

fn chart_spec(target: Target, a: &ChartArgs) -> JobSpec {
    JobSpec {
        target,
        p: a.p,
        r: a.r,
        vars: a.vars,
        max_weight: a.max_weight,
        max_dim: a.max_dim,
        i: a.i,
        deg: None,
        kmax: None,
        denom: a.denom,
        full: false,
    }
}

pub fn descent_spec(a: &DescentArgs) -> Result<JobSpec, CliError> {
    let deg = match (&a.deg, a.weight) {
        (Some(d), _) => d.clone(),
        (None, Some(w)) => vec![w],
        (None, None) => return Err(usage("descent verify needs --weight or --deg")),
    };
    let total: u64 = deg.iter().sum();
    Ok(JobSpec {
        target: Target::Descent,
        p: a.p,
        r: a.r,
        vars: deg.len(),
        max_weight: total,
        max_dim: a.max_dim.unwrap_or(2 * total as i64 + 4),
        i: a.i,
        deg: Some(deg),
        kmax: a.kmax,
        denom: a.denom,
        full: a.full,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn read_chart_file(path: &Path) -> Result<ChartFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    ChartFile::from_json(&text).map_err(|source| CliError::Parse { path: path.to_path_buf(), source })
}

/// Cell-level differences between a stored and a recomputed file.
pub fn diff_cells(stored: &ChartFile, fresh: &ChartFile) -> Vec<String> {
    use std::collections::BTreeMap;
    let index = |f: &ChartFile| -> BTreeMap<(Vec<u64>, i64), CellRecord> {
        f.cells.iter().map(|c| ((c.deg.clone(), c.dim), c.clone())).collect()
    };
    let (a, b) = (index(stored), index(fresh));
    let mut out = Vec::new();
    if stored.engine != fresh.engine {
        out.push(format!("engine: {} != {}", stored.engine, fresh.engine));
    }
    let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).cloned().collect();
    for key in keys {
        match (a.get(&key), b.get(&key)) {
            (Some(x), Some(y)) if x == y => {}
            (Some(x), Some(y)) => out.push(format!(
                "{:?} dim {}: stored {:?} {:?}, now {:?} {:?}",
                key.0, key.1, x.exps, x.labels, y.exps, y.labels
            )),
            (Some(x), None) => out.push(format!("{:?} dim {}: stored {:?}, now absent", key.0, key.1, x.exps)),
            (None, Some(y)) => out.push(format!("{:?} dim {}: absent in golden, now {:?}", key.0, key.1, y.exps)),
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Caps rayon's global pool from TRCALC_THREADS.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("TRCALC_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage(format!("TRCALC_THREADS must be a positive integer, got {raw:?}")))?;
    // a pool built earlier in the process stays in place
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn emit(file: &ChartFile, output: &OutputArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let text = match output.format {
        Format::Json => file.to_json(),
        Format::Csv => file.to_csv(),
        Format::Table => file.to_table(),
    };
    match &output.out {
        Some(path) => write_file(path, &text),
        None => out.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    configure_threads()?;
    let say = |out: &mut dyn Write, line: &str| {
        let _ = writeln!(out, "{line}");
    };
    match cli.command {
        Command::Chart { target, args, output } => {
            let target = match target {
                ChartTarget::Tr => Target::Tr,
                ChartTarget::Filtration => Target::Filtration,
                ChartTarget::Gr => Target::Gr,
                ChartTarget::Mackey => Target::Mackey,
                ChartTarget::E3alg => Target::E3alg,
            };
            let outcome = compute(&chart_spec(target, &args))?;
            emit(&outcome.file, &output, out)?;
            for line in &outcome.report {
                say(out, line);
            }
            Ok(if outcome.pass { EXIT_OK } else { EXIT_FAIL })
        }
        Command::Descent { action: DescentAction::Verify { args, out: path } } => {
            let outcome = compute(&descent_spec(&args)?)?;
            for line in &outcome.report {
                say(out, line);
            }
            if let Some(path) = path {
                write_file(&path, &outcome.file.to_json())?;
            }
            say(out, if outcome.pass { "PASS" } else { "FAIL" });
            Ok(if outcome.pass { EXIT_OK } else { EXIT_FAIL })
        }
        Command::Golden { action: GoldenAction::Record { path, target, args, weight, deg, kmax } } => {
            let mut spec = chart_spec(target, &args);
            if let Some(d) = deg.or(weight.map(|w| vec![w])) {
                spec.vars = d.len();
                spec.deg = Some(d);
            }
            spec.kmax = kmax;
            let outcome = compute(&spec)?;
            write_file(&path, &outcome.file.to_json())?;
            say(out, &format!("recorded {} cells to {}", outcome.file.cells.len(), path.display()));
            Ok(if outcome.pass { EXIT_OK } else { EXIT_FAIL })
        }
        Command::Golden { action: GoldenAction::Check { path, denom } } => {
            let stored = read_chart_file(&path)?;
            if stored.version != SCHEMA_VERSION {
                return Err(usage(format!("schema version {} is not {SCHEMA_VERSION}", stored.version)));
            }
            let mut spec = stored.spec.clone();
            if denom.is_some() {
                spec.denom = denom;
            }
            let mut fresh = compute(&spec)?.file;
            fresh.spec = stored.spec.clone();
            if fresh.to_json() == stored.to_json() {
                say(out, &format!("{}: ok ({} cells)", path.display(), stored.cells.len()));
                return Ok(EXIT_OK);
            }
            say(out, &format!("{}: mismatch", path.display()));
            for line in diff_cells(&stored, &fresh) {
                say(out, &format!("  {line}"));
            }
            Ok(EXIT_FAIL)
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
