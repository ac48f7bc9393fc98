//! Stability benchmark over the `t`-scaled saddle families.
//!
//! For each `t`, the unscaled blocks `(A₁, B₁, C₁)` are scaled, the
//! manufactured right-hand side is formed, and every requested method
//! factors, solves, and is scored with the stability metrics. `κ(M)` is
//! estimated once per `t` and shared by all methods.
//!
//! All generator calls in one run use the configured seed unchanged, so
//! `matrix2(m, ·, seed)` and `matrix1(m, n, ·, seed)` share their orthogonal
//! basis.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, ErrorCode, Result};
use crate::linalg::{condition_number, DenseMatrix, Vector, DEFAULT_TOL};
use crate::mtx::format_f64;
use crate::saddle::{assemble, factor, Factorization, Method};
use crate::stability::{metrics_with_kappa, StabilityReport};
use crate::testgen::{scale_problem, GeneratorKind, GeneratorSpec, ScaledProblem};

/// `κ(M)` at or above this is flagged as precision-limited in Markdown output.
pub const KAPPA_FLAG_THRESHOLD: f64 = 1e14;

pub const DEFAULT_T_LIST: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 100.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Example {
    /// `A₁` Hilbert, `B₁ = matrix1(m, n, s_B)`, `C₁ = eeᵀ`.
    One,
    /// `A₁ = matrix2(m, s_A)`, `B₁ = matrix1(m, n, s_B)`, `C₁ = matrix2(n, s_C)`.
    Two,
    /// Same recipe as [`Example::Two`] with a tall-thin default shape.
    Three,
    /// The [`Example::Two`] recipe with user-chosen shape and decades.
    Custom,
}

impl Example {
    /// Default `(m, n, s_A, s_B, s_C)`.
    pub fn defaults(self) -> (usize, usize, f64, f64, f64) {
        match self {
            Example::One => (12, 6, 0.0, 10.0, 0.0),
            Example::Two => (1000, 500, 10.0, 10.0, 10.0),
            Example::Three => (3000, 100, 10.0, 10.0, 10.0),
            Example::Custom => (20, 10, 2.0, 2.0, 2.0),
        }
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Example::One => "1",
            Example::Two => "2",
            Example::Three => "3",
            Example::Custom => "custom",
        })
    }
}

impl FromStr for Example {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(Example::One),
            "2" => Ok(Example::Two),
            "3" => Ok(Example::Three),
            "custom" => Ok(Example::Custom),
            other => Err(Error::Domain(format!(
                "unknown example '{other}' (expected 1, 2, 3 or custom)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "md" | "markdown" => Ok(Format::Markdown),
            other => Err(Error::Domain(format!(
                "unknown format '{other}' (expected csv or md)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub example: Example,
    pub m: usize,
    pub n: usize,
    /// Ignored for [`Example::One`].
    pub s_a: f64,
    pub s_b: f64,
    /// Ignored for [`Example::One`].
    pub s_c: f64,
    pub t_list: Vec<f64>,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub format: Format,
}

impl BenchConfig {
    /// Defaults for `example`: its sizes and decades, the five-point `t`
    /// sweep, seed 0, methods BCGS and BCGS2, CSV output.
    pub fn for_example(example: Example) -> Self {
        let (m, n, s_a, s_b, s_c) = example.defaults();
        BenchConfig {
            example,
            m,
            n,
            s_a,
            s_b,
            s_c,
            t_list: DEFAULT_T_LIST.to_vec(),
            seed: 0,
            methods: vec![Method::Bcgs, Method::Bcgs2],
            format: Format::Csv,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_list.is_empty() {
            return Err(Error::Domain("t list must not be empty".into()));
        }
        if let Some(t) = self.t_list.iter().find(|t| **t == 0.0 || !t.is_finite()) {
            return Err(Error::Domain(format!(
                "t values must be finite and nonzero, got {t}"
            )));
        }
        if self.methods.is_empty() {
            return Err(Error::Domain("at least one method is required".into()));
        }
        if self.n == 0 || self.m < self.n {
            return Err(Error::Domain(format!(
                "need m >= n >= 1, got m = {}, n = {}",
                self.m, self.n
            )));
        }
        for (name, s) in [("sA", self.s_a), ("sB", self.s_b), ("sC", self.s_c)] {
            if !s.is_finite() || s < 0.0 {
                return Err(Error::Domain(format!(
                    "{name} must be finite and >= 0, got {s}"
                )));
            }
        }
        Ok(())
    }

    /// Requested methods in canonical column order, deduplicated.
    pub fn ordered_methods(&self) -> Vec<Method> {
        let mut ms = self.methods.clone();
        ms.sort();
        ms.dedup();
        ms
    }

    /// Generator descriptions for `(A₁, B₁, C₁)`.
    pub fn generator_specs(&self) -> [GeneratorSpec; 3] {
        let spec = |kind, m, n, s| GeneratorSpec {
            kind,
            m,
            n,
            s,
            seed: self.seed,
        };
        let b = spec(GeneratorKind::Matrix1, self.m, self.n, self.s_b);
        match self.example {
            Example::One => [
                spec(GeneratorKind::Hilbert, self.m, self.m, 0.0),
                b,
                spec(GeneratorKind::OnesRankOne, self.n, self.n, 0.0),
            ],
            Example::Two | Example::Three | Example::Custom => [
                spec(GeneratorKind::Matrix2, self.m, self.m, self.s_a),
                b,
                spec(GeneratorKind::Matrix2, self.n, self.n, self.s_c),
            ],
        }
    }
}

/// Unscaled `(A₁, B₁, C₁)` for a configuration.
#[derive(Debug, Clone)]
pub struct BaseBlocks {
    pub a1: DenseMatrix,
    pub b1: DenseMatrix,
    pub c1: DenseMatrix,
    pub specs: [GeneratorSpec; 3],
}

impl BaseBlocks {
    pub fn generate(cfg: &BenchConfig) -> Result<Self> {
        cfg.validate()?;
        let specs = cfg.generator_specs();
        Ok(BaseBlocks {
            a1: specs[0].generate()?,
            b1: specs[1].generate()?,
            c1: specs[2].generate()?,
            specs,
        })
    }

    pub fn scaled(&self, t: f64) -> Result<ScaledProblem> {
        let mut p = scale_problem(&self.a1, &self.b1, &self.c1, t)?;
        p.provenance = self.specs.to_vec();
        Ok(p)
    }
}

/// Everything computed for one `(t, method)` cell.
#[derive(Debug, Clone)]
pub struct CellRun {
    pub factorization: Factorization,
    pub z: Vector,
    pub report: StabilityReport,
}

/// Factors, solves and scores one method on one scaled problem.
/// `kappa` may be NaN when the estimate failed; `stab` is then NaN too.
pub fn run_cell(
    problem: &ScaledProblem,
    system: &DenseMatrix,
    method: Method,
    kappa: f64,
) -> Result<CellRun> {
    let factorization = factor(&problem.blocks, method)?;
    let z = factorization.solve(&problem.f)?;
    let report = metrics_with_kappa(
        system,
        &factorization.q,
        &factorization.r,
        &problem.f,
        &z,
        &problem.z_star,
        kappa,
    )?;
    Ok(CellRun {
        factorization,
        z,
        report,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub t: f64,
    pub kappa: std::result::Result<f64, ErrorCode>,
    pub cells: Vec<(Method, std::result::Result<StabilityReport, ErrorCode>)>,
}

impl BenchRow {
    pub fn cell(&self, method: Method) -> Option<&StabilityReport> {
        self.cells
            .iter()
            .find(|(m, _)| *m == method)
            .and_then(|(_, r)| r.as_ref().ok())
    }

    pub fn has_error(&self) -> bool {
        self.kappa.is_err() || self.cells.iter().any(|(_, c)| c.is_err())
    }
}

/// Runs one row per `t`, in `t_list` order.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    let base = BaseBlocks::generate(cfg)?;
    let methods = cfg.ordered_methods();
    cfg.t_list
        .iter()
        .map(|&t| {
            let problem = base.scaled(t)?;
            let system = assemble(&problem.blocks)?;
            let kappa = condition_number(&system, DEFAULT_TOL)
                .map(|k| k.value)
                .map_err(|e| e.code());
            let kappa_value = *kappa.as_ref().unwrap_or(&f64::NAN);
            let cells = methods
                .iter()
                .map(|&method| {
                    let cell = run_cell(&problem, &system, method, kappa_value)
                        .map(|c| c.report)
                        .map_err(|e| e.code());
                    (method, cell)
                })
                .collect();
            Ok(BenchRow { t, kappa, cells })
        })
        .collect()
}

const METRIC_NAMES: [&str; 4] = ["orth", "dec", "res", "stab"];

fn metric_values(r: &StabilityReport) -> [f64; 4] {
    [r.orth, r.dec, r.res, r.stab]
}

fn err_cell(code: ErrorCode) -> String {
    format!("ERR:{code}")
}

/// Column names: `t`, `kappa_M`, then `<metric>_<method>` for each method in
/// canonical order (bcgs, bcgs2, householder) and metric order
/// (orth, dec, res, stab).
pub fn csv_header(methods: &[Method]) -> Vec<String> {
    let mut h = vec!["t".to_string(), "kappa_M".to_string()];
    for m in methods {
        for name in METRIC_NAMES {
            h.push(format!("{name}_{}", m.as_str()));
        }
    }
    h
}

fn row_cells(row: &BenchRow, methods: &[Method], fmt_num: impl Fn(f64) -> String) -> Vec<String> {
    let mut out = Vec::with_capacity(2 + 4 * methods.len());
    out.push(fmt_num(row.t));
    out.push(match row.kappa {
        Ok(k) => fmt_num(k),
        Err(code) => err_cell(code),
    });
    for &m in methods {
        match row.cells.iter().find(|(cm, _)| *cm == m).map(|(_, c)| c) {
            Some(Ok(rep)) => {
                for (i, v) in metric_values(rep).into_iter().enumerate() {
                    out.push(match (i, row.kappa) {
                        (3, Err(code)) => err_cell(code),
                        _ => fmt_num(v),
                    });
                }
            }
            Some(Err(code)) => out.extend((0..4).map(|_| err_cell(*code))),
            None => out.extend((0..4).map(|_| String::new())),
        }
    }
    out
}

/// CSV with one row per `t`; numbers carry 17 significant digits.
pub fn to_csv(rows: &[BenchRow], methods: &[Method]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::InvalidData(format!("csv: {e}"));
    w.write_record(csv_header(methods)).map_err(io)?;
    for row in rows {
        w.write_record(row_cells(row, methods, format_f64))
            .map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidData(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

/// Markdown table with metrics as rows and `t` as columns.
pub fn to_markdown(rows: &[BenchRow], methods: &[Method]) -> String {
    let short = |v: f64| format!("{v:.4e}");
    let mut out = String::new();
    out.push_str("| t |");
    for r in rows {
        out.push_str(&format!(" {} |", r.t));
    }
    out.push('\n');
    out.push_str("|---|");
    for _ in rows {
        out.push_str("---|");
    }
    out.push('\n');

    out.push_str("| kappa(M) |");
    for r in rows {
        let cell = match r.kappa {
            Ok(k) if k >= KAPPA_FLAG_THRESHOLD => format!("~{}", short(k)),
            Ok(k) => short(k),
            Err(code) => err_cell(code),
        };
        out.push_str(&format!(" {cell} |"));
    }
    out.push('\n');

    for (mi, name) in METRIC_NAMES.iter().enumerate() {
        for &m in methods {
            out.push_str(&format!("| {name}_{} |", m.label()));
            for r in rows {
                let cells = row_cells(r, &[m], short);
                out.push_str(&format!(" {} |", cells[2 + mi]));
            }
            out.push('\n');
        }
    }
    out
}

/// One-row CSV (with header) for a single solve.
pub fn report_to_csv(method: Method, r: &StabilityReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::InvalidData(format!("csv: {e}"));
    w.write_record(["method", "kappa_M", "orth", "dec", "res", "stab"])
        .map_err(io)?;
    let mut rec = vec![method.as_str().to_string()];
    rec.extend([r.kappa, r.orth, r.dec, r.res, r.stab].map(format_f64));
    w.write_record(rec).map_err(io)?;
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidData(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

/// Renders rows in the configured format.
pub fn render(cfg: &BenchConfig, rows: &[BenchRow]) -> Result<String> {
    let methods = cfg.ordered_methods();
    match cfg.format {
        Format::Csv => to_csv(rows, &methods),
        Format::Markdown => Ok(to_markdown(rows, &methods)),
    }
}
