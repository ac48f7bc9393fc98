//! `saddle`: generate test matrices, solve saddle-point systems from Matrix
//! Market files, and run the stability benchmark.
//!
//! Exit codes: 0 on success, 1 when a computation hit a singular or
//! rank-deficient system (or a bench cell failed), 2 on configuration, parse
//! or I/O errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use saddle_core::experiment::{self, BenchConfig, Example, Format};
use saddle_core::linalg::{condition_number, DEFAULT_TOL};
use saddle_core::saddle::{assemble, factor};
use saddle_core::stability::metrics;
use saddle_core::testgen::{GeneratorKind, GeneratorSpec};
use saddle_core::{mtx, DenseMatrix, Error, Method, SaddleBlocks, Vector};

#[derive(Parser)]
#[command(
    name = "saddle",
    version,
    about = "Block Gram-Schmidt QR solvers for symmetric saddle-point systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a test matrix and print its condition number.
    Gen(GenArgs),
    /// Solve [[A, B], [Bᵀ, -C]] z = f.
    Solve(SolveArgs),
    /// Run the t-scaled stability benchmark.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// matrix1 | matrix2 | hilbert | ones_rank_one
    #[arg(long)]
    kind: GeneratorKind,
    /// Rows (matrix1); the square kinds fall back to it when --n is absent.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Singular values span 10^0 .. 10^-s.
    #[arg(long, default_value_t = 0.0)]
    s: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Defaults to `<kind>.mtx`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long)]
    c: PathBuf,
    /// Right-hand side as a one-column matrix.
    #[arg(long)]
    f: PathBuf,
    #[arg(long, default_value = "bcgs2")]
    method: Method,
    /// Solution file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reference solution; enables the stability report.
    #[arg(long)]
    z_star: Option<PathBuf>,
    /// Report CSV; stdout when absent.
    #[arg(long, requires = "z_star")]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// 1 | 2 | 3 | custom
    #[arg(long, default_value = "1")]
    example: Example,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    sa: Option<f64>,
    #[arg(long)]
    sb: Option<f64>,
    #[arg(long)]
    sc: Option<f64>,
    /// Comma-separated t values.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    t: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated subset of bcgs, bcgs2, householder.
    #[arg(long, value_delimiter = ',')]
    methods: Vec<Method>,
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Table file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_singular() { 1 } else { 2 },
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => run_gen(args),
        Command::Solve(args) => run_solve(args),
        Command::Bench(args) => run_bench(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| Error::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_vector(path: &Path) -> Result<Vector, Error> {
    let m = mtx::read_file(path)?;
    if m.cols() != 1 {
        return Err(Error::InvalidData(format!(
            "{}: expected a one-column matrix, got {}x{}",
            path.display(),
            m.rows(),
            m.cols()
        )));
    }
    Vector::new(m.into_vec())
}

fn run_gen(args: GenArgs) -> Result<u8, Failure> {
    let (m, n) = match (args.kind.is_square(), args.m, args.n) {
        (true, m, n) => {
            let n = n
                .or(m)
                .ok_or_else(|| Error::Domain("--n (or --m) is required".into()))?;
            (n, n)
        }
        (false, Some(m), Some(n)) => (m, n),
        (false, _, _) => {
            return Err(Error::Domain(format!("{} needs both --m and --n", args.kind)).into())
        }
    };
    let spec = GeneratorSpec {
        kind: args.kind,
        m,
        n,
        s: args.s,
        seed: args.seed,
    };
    let mat = spec.generate()?;
    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from(format!("{}.mtx", args.kind)));
    mtx::write_file(&mat, &out)?;
    println!("wrote {} ({}x{})", out.display(), mat.rows(), mat.cols());
    match condition_number(&mat, DEFAULT_TOL) {
        Ok(k) => println!("kappa = {}", mtx::format_f64(k.value)),
        Err(e) if e.is_singular() => println!("kappa = inf ({e})"),
        Err(e) => return Err(e.into()),
    }
    Ok(0)
}

fn run_solve(args: SolveArgs) -> Result<u8, Failure> {
    let a = mtx::read_file(&args.a)?;
    let b = mtx::read_file(&args.b)?;
    let c = mtx::read_file(&args.c)?;
    let f = read_vector(&args.f)?;
    let z_star = args.z_star.as_deref().map(read_vector).transpose()?;

    let blocks = SaddleBlocks::new(a, b, c)?;
    if f.len() != blocks.l() {
        return Err(Error::InvalidData(format!(
            "{}: right-hand side has length {}, system has {} unknowns",
            args.f.display(),
            f.len(),
            blocks.l()
        ))
        .into());
    }
    if let Some(zs) = &z_star {
        if zs.len() != blocks.l() {
            return Err(Error::InvalidData(format!(
                "reference solution has length {}, system has {} unknowns",
                zs.len(),
                blocks.l()
            ))
            .into());
        }
    }

    let fact = factor(&blocks, args.method)?;
    let z = fact.solve(&f)?;
    let zcol = DenseMatrix::from_row_major(z.len(), 1, z.as_slice().to_vec())?;
    write_text(args.out.as_deref(), &mtx::write_string(&zcol))?;

    if let Some(zs) = z_star {
        let system = assemble(&blocks)?;
        let report = metrics(&system, &fact.q, &fact.r, &f, &z, &zs)?;
        write_text(
            args.report.as_deref(),
            &experiment::report_to_csv(args.method, &report)?,
        )?;
    }
    Ok(0)
}

fn run_bench(args: BenchArgs) -> Result<u8, Failure> {
    let mut cfg = BenchConfig::for_example(args.example);
    cfg.m = args.m.unwrap_or(cfg.m);
    cfg.n = args.n.unwrap_or(cfg.n);
    cfg.s_a = args.sa.unwrap_or(cfg.s_a);
    cfg.s_b = args.sb.unwrap_or(cfg.s_b);
    cfg.s_c = args.sc.unwrap_or(cfg.s_c);
    if !args.t.is_empty() {
        cfg.t_list = args.t;
    }
    if !args.methods.is_empty() {
        cfg.methods = args.methods;
    }
    cfg.seed = args.seed;
    cfg.format = args.format;

    let config_error = |e: Error| Failure {
        code: 2,
        message: e.to_string(),
    };
    let rows = experiment::run_bench(&cfg).map_err(config_error)?;
    let text = experiment::render(&cfg, &rows).map_err(config_error)?;
    write_text(args.out.as_deref(), &text).map_err(config_error)?;
    Ok(if rows.iter().any(|r| r.has_error()) {
        1
    } else {
        0
    })
}
