//! `gaussian-page`: Page curves, level densities, variances and entropy
//! distributions as CSV or JSON tables.

mod table;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gaussian_page::ensembles::Ensemble;
use gaussian_page::formulas::{
    gaussian_average_exact, gaussian_std_limit, gaussian_thermo, gaussian_variance_limit, lrv_density, page_average_exact,
    page_std_thermo, page_thermo,
};
use gaussian_page::rmt::{variance_finite_n, DEFAULT_TAIL_TOL};
use gaussian_page::stats::{histogram, mc_collect, mc_estimate};
use gaussian_page::{Error, JacobiKernelCtx, SystemSplit};

use table::{Cell, Table};

/// Seed used when neither `--seed` nor `GAUSSIAN_PAGE_SEED` is given.
const DEFAULT_SEED: u64 = 20_210_611;

#[derive(Parser, Debug)]
#[command(name = "gaussian-page", version, about = "Entanglement entropy of random fermionic Gaussian states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Average entropy (and spread) for every subsystem size.
    PageCurve(Common),
    /// Level density ρ(x) of the restricted spectrum on an equispaced grid.
    Density {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Finite-N, sampled and limiting variance of the Gaussian ensemble.
    Variance(Common),
    /// Raw entropy samples.
    Sample(Common),
    /// Histogram of sampled entropies.
    Dist {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 50)]
        bins: usize,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Number of fermionic modes.
    #[arg(long = "N")]
    n: u32,
    /// Subsystem size, or `sweep` for 0..=N/2.
    #[arg(long = "NA", default_value = "sweep")]
    n_a: SubsystemSpec,
    #[arg(long, value_enum, default_value_t = EnsembleArg::Gaussian)]
    ensemble: EnsembleArg,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, env = "GAUSSIAN_PAGE_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads; results do not depend on this.
    #[arg(long, default_value_t = 1)]
    workers: u32,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SubsystemSpec {
    Sweep,
    Size(u32),
}

impl FromStr for SubsystemSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "sweep" {
            return Ok(SubsystemSpec::Sweep);
        }
        s.parse().map(SubsystemSpec::Size).map_err(|_| format!("expected a count or 'sweep', got '{s}'"))
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum EnsembleArg {
    Gaussian,
    HaarPure,
    Hamiltonian,
    NumberConserving,
}

impl EnsembleArg {
    fn ensemble(self) -> Ensemble {
        match self {
            EnsembleArg::Gaussian => Ensemble::Gaussian,
            EnsembleArg::HaarPure => Ensemble::HaarPure,
            EnsembleArg::Hamiltonian => Ensemble::Hamiltonian,
            EnsembleArg::NumberConserving => Ensemble::NumberConserving,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Exact,
    Quadrature,
    Mc,
    Limit,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Quadrature => "quadrature",
            Mode::Mc => "mc",
            Mode::Limit => "limit",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

/// Failure with its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_) | Error::ConstraintViolation(_) => 2,
            Error::ResourceLimit(_) => 3,
            Error::InternalConsistency(_) | Error::Accuracy(_) => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

type Outcome<T> = std::result::Result<T, Failure>;

impl Common {
    fn n(&self) -> usize {
        self.n as usize
    }

    fn sizes(&self, from: usize) -> Outcome<Vec<usize>> {
        match self.n_a {
            SubsystemSpec::Sweep => Ok((from..=self.n() / 2).collect()),
            SubsystemSpec::Size(k) if k > self.n => Err(invalid(format!("--NA {k} exceeds --N {}", self.n))),
            SubsystemSpec::Size(k) => Ok(vec![k as usize]),
        }
    }

    fn single_size(&self) -> Outcome<usize> {
        match self.n_a {
            SubsystemSpec::Sweep => Err(invalid("this command needs a single --NA value")),
            SubsystemSpec::Size(_) => Ok(self.sizes(0)?[0]),
        }
    }

    fn workers(&self) -> usize {
        self.workers.max(1) as usize
    }

    fn require_samples(&self) -> Outcome<usize> {
        if self.samples < 2 {
            return Err(invalid("--samples must be at least 2"));
        }
        Ok(self.samples as usize)
    }

    fn require_modes(&self) -> Outcome<()> {
        if self.n == 0 {
            return Err(invalid("--N must be at least 1"));
        }
        Ok(())
    }
}

fn fraction(n: usize, n_a: usize) -> f64 {
    n_a as f64 / n as f64
}

/// Standard deviation from the Jacobi double sum, evaluated on the smaller side.
fn gaussian_std(n: usize, n_a: usize) -> Outcome<f64> {
    let k = n_a.min(n - n_a);
    if k == 0 {
        return Ok(0.0);
    }
    Ok(variance_finite_n(&JacobiKernelCtx::for_split(n, k)?, DEFAULT_TAIL_TOL)?.sqrt())
}

fn page_curve(c: &Common) -> Outcome<Table> {
    c.require_modes()?;
    let ens = c.ensemble;
    let allowed = match c.mode {
        Mode::Exact => matches!(ens, EnsembleArg::Gaussian | EnsembleArg::HaarPure),
        Mode::Quadrature => ens == EnsembleArg::Gaussian,
        Mode::Limit => ens != EnsembleArg::Hamiltonian,
        Mode::Mc => true,
    };
    if !allowed {
        return Err(invalid(format!(
            "mode '{}' is not available for ensemble '{}'",
            c.mode.name(),
            ens.ensemble().name()
        )));
    }
    let n = c.n();
    let mut t = Table::new("page-curve", &["N", "N_A", "f", "value", "std", "std_error", "samples", "mode", "ensemble"]);
    for n_a in c.sizes(0)? {
        let f = fraction(n, n_a);
        let (value, std, std_error, samples) = match c.mode {
            Mode::Exact if ens == EnsembleArg::Gaussian => (gaussian_average_exact(n, n_a)?, Some(gaussian_std(n, n_a)?), None, 0),
            Mode::Exact => (page_average_exact(n, n_a)?, None, None, 0),
            Mode::Quadrature => {
                let k = n_a.min(n - n_a);
                let v = if k == 0 { 0.0 } else { JacobiKernelCtx::for_split(n, k)?.average_entropy_quadrature()? };
                (v, Some(gaussian_std(n, n_a)?), None, 0)
            }
            Mode::Limit => limit_row(ens, n, n_a)?,
            Mode::Mc => {
                let split = SystemSplit::new(n, n_a)?;
                let e = ens.ensemble();
                e.check(split)?;
                let est = mc_estimate(|r| e.sample_entropy(split, r), c.require_samples()?, c.seed, c.workers())?;
                (est.mean, Some(est.std_dev()), Some(est.std_error), est.n as usize)
            }
        };
        t.push(vec![
            n.into(),
            n_a.into(),
            f.into(),
            value.into(),
            std.into(),
            std_error.into(),
            samples.into(),
            Cell::Text(c.mode.name()),
            Cell::Text(ens.ensemble().name()),
        ]);
    }
    Ok(t)
}

fn limit_row(ens: EnsembleArg, n: usize, n_a: usize) -> Outcome<(f64, Option<f64>, Option<f64>, usize)> {
    if n_a == 0 || n_a == n {
        return Ok((0.0, Some(0.0), None, 0));
    }
    let f = fraction(n, n_a);
    let row = match ens {
        EnsembleArg::Gaussian => (gaussian_thermo(n, f)?, Some(gaussian_std_limit(f.min(1.0 - f))?), None, 0),
        EnsembleArg::HaarPure => (page_thermo(n, f)?, Some(page_std_thermo(n, f)?), None, 0),
        EnsembleArg::NumberConserving => (n as f64 * lrv_density(f)?, None, None, 0),
        EnsembleArg::Hamiltonian => unreachable!("rejected before evaluation"),
    };
    Ok(row)
}

fn density(c: &Common, points: usize) -> Outcome<Table> {
    c.require_modes()?;
    if c.ensemble != EnsembleArg::Gaussian || !matches!(c.mode, Mode::Exact | Mode::Quadrature) {
        return Err(invalid("density is the analytic Gaussian level density; use --ensemble gaussian --mode exact"));
    }
    let n_a = c.single_size()?;
    if n_a == 0 || 2 * n_a > c.n() {
        return Err(invalid(format!("density needs 1 <= N_A <= N/2, got N = {}, N_A = {n_a}", c.n)));
    }
    let rho = JacobiKernelCtx::for_split(c.n(), n_a)?.spectral_density(points)?;
    let mut t = Table::new("density", &["x", "rho"]);
    for (x, v) in rho.grid.iter().zip(&rho.values) {
        t.push(vec![(*x).into(), (*v).into()]);
    }
    Ok(t)
}

fn variance(c: &Common) -> Outcome<Table> {
    c.require_modes()?;
    if c.ensemble != EnsembleArg::Gaussian {
        return Err(invalid("variance is available for the gaussian ensemble only"));
    }
    let n = c.n();
    let mut t = Table::new("variance", &["N", "N_A", "f", "finite_n", "mc", "mc_std_error", "samples", "limit"]);
    for n_a in c.sizes(1)? {
        let f = fraction(n, n_a);
        let k = n_a.min(n - n_a);
        let finite = gaussian_std(n, n_a)?.powi(2);
        let (mc, mc_se, samples) = if c.samples == 0 {
            (None, None, 0)
        } else {
            let split = SystemSplit::new(n, n_a)?;
            let est = mc_estimate(|r| Ensemble::Gaussian.sample_entropy(split, r), c.require_samples()?, c.seed, c.workers())?;
            (Some(est.variance), Some(est.variance_std_error), est.n as usize)
        };
        let limit = if k == 0 { Some(0.0) } else { Some(gaussian_variance_limit(fraction(n, k))?) };
        t.push(vec![n.into(), n_a.into(), f.into(), finite.into(), mc.into(), mc_se.into(), samples.into(), limit.into()]);
    }
    Ok(t)
}

fn draw(c: &Common) -> Outcome<(usize, Vec<f64>)> {
    c.require_modes()?;
    let n_a = c.single_size()?;
    let split = SystemSplit::new(c.n(), n_a)?;
    let e = c.ensemble.ensemble();
    e.check(split)?;
    let (_, xs) = mc_collect(|r| e.sample_entropy(split, r), c.require_samples()?, c.seed, c.workers())?;
    Ok((n_a, xs))
}

fn sample(c: &Common) -> Outcome<Table> {
    let (_, xs) = draw(c)?;
    let mut t = Table::new("sample", &["index", "entropy"]);
    for (k, x) in xs.into_iter().enumerate() {
        t.push(vec![k.into(), x.into()]);
    }
    Ok(t)
}

fn dist(c: &Common, bins: usize) -> Outcome<Table> {
    let (n_a, xs) = draw(c)?;
    let top = n_a.min(c.n() - n_a) as f64 * std::f64::consts::LN_2;
    let hist = histogram(&xs, bins, (0.0, top.max(f64::MIN_POSITIVE)))?;
    let dens = hist.density();
    let mut t = Table::new("dist", &["bin_lo", "bin_hi", "count", "density"]);
    for ((edge, count), d) in hist.edges.windows(2).zip(&hist.counts).zip(dens) {
        t.push(vec![edge[0].into(), edge[1].into(), (*count as usize).into(), d.into()]);
    }
    Ok(t)
}

fn emit(c: &Common, t: &Table) -> Outcome<()> {
    let text = match c.format {
        Format::Csv => t.to_csv(),
        Format::Json => t.to_json(),
    };
    let io = |e: std::io::Error| Failure { code: 1, message: format!("cannot write output: {e}") };
    match &c.out {
        Some(path) => fs::write(path, text).map_err(io),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(io),
    }
}

fn run(cli: Cli) -> Outcome<()> {
    let (common, table) = match &cli.command {
        Command::PageCurve(c) => (c, page_curve(c)?),
        Command::Density { common, points } => (common, density(common, *points)?),
        Command::Variance(c) => (c, variance(c)?),
        Command::Sample(c) => (c, sample(c)?),
        Command::Dist { common, bins } => (common, dist(common, *bins)?),
    };
    emit(common, &table)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("gaussian-page: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
