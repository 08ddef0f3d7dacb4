use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use qgraph_core::domainscan::{
    parse_axis_name, reality_boundary, scan, ScanAxis, DEFAULT_BOUNDARY_TOL,
};
use qgraph_core::hamiltonian::{
    assemble_amended, assemble_symbolic, to_amended, AmendedCouplingSet, CouplingSet,
    HamiltonianMatrix,
};
use qgraph_core::lattice::{build_graph, GraphFamilySpec};
use qgraph_core::paperdata::{paper_factor, verify_against_paper, FactorBranch};
use qgraph_core::polyring::rational::{format_rational, parse_rational};
use qgraph_core::polyring::{charpoly, charpoly_rational, MultiPoly, Rational, Substitution, Var};
use qgraph_core::secular::split_secular;
use qgraph_core::spectra::{eigenvalues, DEFAULT_TOL};
use qgraph_core::Error;

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

/// Exact and numerical spectra of loop-graph Hamiltonians with non-Hermitian couplings.
#[derive(Parser, Debug)]
#[command(name = "qgraph", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit the Hamiltonian (or with --graph, the graph) as JSON.
    Build(BuildArgs),
    /// Emit the exact secular polynomial.
    Charpoly(MatrixArgs),
    /// Emit the two reflection-parity factors of the secular polynomial.
    Split(Common),
    /// Compare computed factors or spectra with the published results.
    Verify(Common),
    /// Residual-certified numerical eigenvalues.
    Spectrum(MatrixArgs),
    /// Classify spectral reality over a coupling grid.
    Scan(ScanArgs),
    /// Locate a reality boundary by bisection along one coupling.
    Boundary(BoundaryArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Outer sites per side.
    #[arg(long = "K")]
    k: Option<usize>,
    /// Sites per loop branch.
    #[arg(long = "L", default_value_t = 1)]
    l: usize,
    #[command(flatten)]
    couplings: CouplingArgs,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for parallel stages.
    #[arg(long, env = "QGRAPH_JOBS")]
    jobs: Option<usize>,
}

/// Couplings as `p/q` or exact decimals, in either the (gamma, delta, z)
/// or the (g, h, z) family.
#[derive(Args, Debug, Default)]
struct CouplingArgs {
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    gamma: Option<Rational>,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    delta: Option<Rational>,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    g: Option<Rational>,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    h: Option<Rational>,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    z: Option<Rational>,
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[command(flatten)]
    common: Common,
    /// Emit the graph structure instead of the matrix.
    #[arg(long)]
    graph: bool,
}

#[derive(Args, Debug)]
struct MatrixArgs {
    #[command(flatten)]
    common: Common,
    /// Read the matrix from a `build` JSON document instead of --K/--L.
    #[arg(long)]
    from_file: Option<PathBuf>,
    /// Relative residual tolerance for eigenvalues.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[command(flatten)]
    common: Common,
    /// Swept axes, e.g. "gamma=-1.5:1.5:101;delta=-0.5:0.5:101".
    #[arg(long, allow_hyphen_values = true)]
    axes: String,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args, Debug)]
struct BoundaryArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    axis: String,
    /// `lo,hi` with the spectrum real at lo and complex at hi.
    #[arg(long, allow_hyphen_values = true)]
    bracket: String,
    /// Final bracket width.
    #[arg(long, default_value_t = DEFAULT_BOUNDARY_TOL)]
    tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Pretty,
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Error with its exit code attached.
#[derive(Debug)]
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn usage(error: anyhow::Error) -> Failure {
    Failure {
        code: EXIT_USAGE,
        error,
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<Error>() {
            Some(
                Error::Residual { .. }
                | Error::NoConvergence
                | Error::NotBlockDiagonal { .. }
                | Error::NotDivisible { .. },
            ) => EXIT_NUMERICAL,
            _ => EXIT_USAGE,
        };
        Failure { code, error }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Charpoly(a) => cmd_charpoly(a),
        Command::Split(a) => cmd_split(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Boundary(a) => cmd_boundary(a),
    }
}

impl Common {
    fn spec(&self) -> Result<GraphFamilySpec, Failure> {
        let k = self.k.ok_or_else(|| usage(anyhow!("--K is required")))?;
        Ok(build_graph(k, self.l)?)
    }

    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn emit(&self, text: &str) -> Outcome {
        let mut text = text.to_string();
        if !text.ends_with('\n') {
            text.push('\n');
        }
        match &self.out {
            Some(path) => fs::write(path, text)
                .with_context(|| format!("cannot write {}", path.display()))
                .map_err(usage)?,
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .context("cannot write to standard output")
                .map_err(usage)?,
        }
        Ok(0)
    }

    fn init_jobs(&self) -> Result<(), Failure> {
        if let Some(jobs) = self.jobs {
            if jobs == 0 {
                return Err(usage(anyhow!("--jobs must be positive")));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build_global()
                .map_err(|e| usage(anyhow!(e)))?;
        }
        Ok(())
    }
}

impl CouplingArgs {
    fn any(&self) -> bool {
        [&self.gamma, &self.delta, &self.g, &self.h, &self.z]
            .iter()
            .any(|c| c.is_some())
    }

    /// Amended couplings, unspecified ones taken as zero.
    fn amended(&self) -> Result<AmendedCouplingSet, Failure> {
        let amended_family = self.gamma.is_some() || self.delta.is_some();
        let physical_family = self.g.is_some() || self.h.is_some();
        if amended_family && physical_family {
            return Err(usage(anyhow!(
                "--gamma/--delta and --g/--h are alternative parametrizations, use one"
            )));
        }
        let or_zero = |c: &Option<Rational>| c.clone().unwrap_or_default();
        Ok(if physical_family {
            to_amended(&CouplingSet::new(
                or_zero(&self.g),
                or_zero(&self.h),
                or_zero(&self.z),
            ))
        } else {
            AmendedCouplingSet::new(or_zero(&self.gamma), or_zero(&self.delta), or_zero(&self.z))
        })
    }

    fn substitution(&self) -> Result<Substitution, Failure> {
        let a = self.amended()?;
        Ok(Substitution::new()
            .with(Var::Gamma, a.gamma)
            .with(Var::Delta, a.delta)
            .with(Var::Z, a.z))
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map_err(|e| Failure::from(Error::from(e)))
}

/// Symbolic matrix when no coupling is given, exact rational otherwise.
fn matrix_for(common: &Common) -> Result<HamiltonianMatrix, Failure> {
    let spec = common.spec()?;
    Ok(if common.couplings.any() {
        HamiltonianMatrix::Rational(assemble_amended(&spec, &common.couplings.amended()?))
    } else {
        HamiltonianMatrix::Poly(assemble_symbolic(&spec))
    })
}

fn load_matrix(args: &MatrixArgs) -> Result<HamiltonianMatrix, Failure> {
    match &args.from_file {
        Some(path) => {
            if args.common.k.is_some() {
                return Err(usage(anyhow!("--from-file and --K are mutually exclusive")));
            }
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))
                .map_err(usage)?;
            let m = HamiltonianMatrix::from_json(&text)?;
            match m {
                HamiltonianMatrix::Poly(p) if args.common.couplings.any() => {
                    Ok(HamiltonianMatrix::Rational(
                        p.eval_rational(&args.common.couplings.substitution()?)?,
                    ))
                }
                other => Ok(other),
            }
        }
        None => matrix_for(&args.common),
    }
}

fn cmd_build(a: BuildArgs) -> Outcome {
    let c = &a.common;
    if a.graph {
        return c.emit(&to_json(&c.spec()?.to_doc())?);
    }
    let m = matrix_for(c)?;
    match c.format(Format::Json) {
        Format::Json => c.emit(&m.to_json()?),
        Format::Pretty => c.emit(&pretty_matrix(&m)),
        Format::Csv => Err(usage(anyhow!("build has no CSV form"))),
    }
}

fn pretty_matrix(m: &HamiltonianMatrix) -> String {
    let rows: Vec<Vec<String>> = match m {
        HamiltonianMatrix::Rational(m) => m.map(format_rational).to_rows(),
        HamiltonianMatrix::Poly(m) => m.map(|p| p.to_string()).to_rows(),
        HamiltonianMatrix::Float(m) => m.map(|x| x.to_string()).to_rows(),
    };
    let width = rows.iter().flatten().map(String::len).max().unwrap_or(1);
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|s| format!("{s:>width$}"))
                .collect::<Vec<_>>()
                .join("  ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn cmd_charpoly(a: MatrixArgs) -> Outcome {
    let p = match load_matrix(&a)? {
        HamiltonianMatrix::Poly(m) => charpoly(&m)?,
        HamiltonianMatrix::Rational(m) => charpoly_rational(&m)?,
        HamiltonianMatrix::Float(_) => {
            return Err(usage(anyhow!(
                "the exact secular polynomial needs an exact matrix"
            )))
        }
    };
    let c = &a.common;
    match c.format(Format::Json) {
        Format::Pretty => c.emit(&p.to_string()),
        Format::Json => c.emit(&to_json(&serde_json::json!({
            "charpoly": p,
            "text": p.to_string(),
        }))?),
        Format::Csv => Err(usage(anyhow!("charpoly has no CSV form"))),
    }
}

fn matches_paper(
    split_plus: &MultiPoly,
    split_minus: &MultiPoly,
    k: usize,
    l: usize,
) -> Option<bool> {
    if l != 1 {
        return None;
    }
    let plus = paper_factor(k, FactorBranch::Plus).ok()?.sector_factor();
    let minus = paper_factor(k, FactorBranch::Minus).ok()?.sector_factor();
    Some(*split_plus == plus && *split_minus == minus)
}

fn cmd_split(c: Common) -> Outcome {
    c.init_jobs()?;
    let spec = c.spec()?;
    let s = split_secular(&spec)?;
    let report = s.report(matches_paper(&s.f_plus, &s.f_minus, spec.k(), spec.l()));
    match c.format(Format::Json) {
        Format::Json => c.emit(&to_json(&report)?),
        Format::Pretty => c.emit(&format!(
            "f+ = {}\nf- = {}\nseparated: {}",
            report.f_plus, report.f_minus, report.separated
        )),
        Format::Csv => Err(usage(anyhow!("split has no CSV form"))),
    }
}

fn cmd_verify(c: Common) -> Outcome {
    let k = c.k.ok_or_else(|| usage(anyhow!("--K is required")))?;
    if c.l != 1 {
        return Err(usage(anyhow!("published results exist for L = 1 only")));
    }
    let report = verify_against_paper(k)?;
    match c.format(Format::Pretty) {
        Format::Json => c.emit(&to_json(&report)?)?,
        Format::Pretty => {
            let mut text = report.summary();
            for check in report.coefficients.iter().filter(|ch| !ch.matches) {
                text.push_str(&format!(
                    "\n  {:?} {}: published {}, computed {}",
                    check.branch, check.name, check.paper, check.computed
                ));
            }
            c.emit(&text)?
        }
        Format::Csv => return Err(usage(anyhow!("verify has no CSV form"))),
    };
    Ok(if report.passed { 0 } else { EXIT_MISMATCH })
}

fn cmd_spectrum(a: MatrixArgs) -> Outcome {
    let m = match load_matrix(&a)? {
        HamiltonianMatrix::Rational(m) => m.to_f64(),
        HamiltonianMatrix::Float(m) => m,
        HamiltonianMatrix::Poly(m) => m
            .eval_rational(&a.common.couplings.substitution()?)?
            .to_f64(),
    };
    let s = eigenvalues(&m, a.tol)?;
    let c = &a.common;
    match c.format(Format::Json) {
        Format::Json => c.emit(&to_json(&s.to_doc())?),
        Format::Csv => {
            let mut out = String::from("re,im,residual\n");
            for (z, r) in s.eigenvalues.iter().zip(&s.residuals) {
                out.push_str(&format!("{},{},{:e}\n", z.re, z.im, r));
            }
            c.emit(&out)
        }
        Format::Pretty => {
            let mut out = String::new();
            for z in &s.eigenvalues {
                if z.im == 0.0 {
                    out.push_str(&format!("{:.12}\n", z.re));
                } else {
                    out.push_str(&format!("{:.12} {:+.12}i\n", z.re, z.im));
                }
            }
            out.push_str(&format!(
                "all_real: {}  marginal: {}",
                s.all_real, s.marginal
            ));
            c.emit(&out)
        }
    }
}

fn cmd_scan(a: ScanArgs) -> Outcome {
    let c = &a.common;
    c.init_jobs()?;
    let spec = c.spec()?;
    let axes = ScanAxis::parse_list(&a.axes)?;
    let grid = scan(&spec, &axes, &c.couplings.amended()?, a.tol)?;
    match c.format(Format::Csv) {
        Format::Csv | Format::Pretty => c.emit(&grid.to_csv()),
        Format::Json => c.emit(&to_json(&grid)?),
    }
}

fn parse_bracket(s: &str) -> anyhow::Result<(f64, f64)> {
    let (lo, hi) = s.split_once(',').context("--bracket expects lo,hi")?;
    let lo: f64 = lo
        .trim()
        .parse()
        .with_context(|| format!("bad bracket end {lo:?}"))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .with_context(|| format!("bad bracket end {hi:?}"))?;
    if !lo.is_finite() || !hi.is_finite() || lo == hi {
        bail!("bracket ends must be finite and distinct");
    }
    Ok((lo, hi))
}

fn cmd_boundary(a: BoundaryArgs) -> Outcome {
    let c = &a.common;
    c.init_jobs()?;
    let spec = c.spec()?;
    let axis = parse_axis_name(&a.axis)?;
    let bracket = parse_bracket(&a.bracket).map_err(usage)?;
    let r = reality_boundary(&spec, axis, &c.couplings.amended()?, bracket, a.tol)?;
    match c.format(Format::Pretty) {
        Format::Pretty => c.emit(&format!("{:.9}", r.critical)),
        Format::Json => c.emit(&r.to_json()?),
        Format::Csv => c.emit(&format!(
            "axis,critical,bracket_width,iterations\n{},{:.9},{:e},{}",
            axis.name(),
            r.critical,
            r.bracket_width,
            r.iterations
        )),
    }
}
