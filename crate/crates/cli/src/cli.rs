//! Argument parsing and command dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use projdyn_core::classification::{classify, classify_pu, Kind};
use projdyn_core::error::Error as CoreError;
use projdyn_core::grassmann::loxodromic_certificate;
use projdyn_core::hermitian::{parabolic_certificate, selfcheck};
use projdyn_core::limit_sets::{lambda_set, limit_set_report, PointSet};
use projdyn_core::linalg::{normalize_to_sl, SLMatrix, C64};
use projdyn_core::orbit::{hausdorff_to_union, orbit_accumulate, OrbitSettings};
use projdyn_core::sampling::random_vector;
use projdyn_core::Tolerances;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::document::{parse_matrix_file, DocumentError, MatrixDocument};
use crate::report::{self, Format, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Parser)]
#[command(name = "projdyn", version, about = "Dynamics of projective transformations: classification, limit sets, certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Elliptic / parabolic / loxodromic classification with eigenvalue evidence.
    Classify {
        file: PathBuf,
        /// Also classify inside PU(k,l) by fixed points, e.g. `--pu 1,2`.
        #[arg(long, value_parser = parse_signature)]
        pu: Option<(usize, usize)>,
        #[command(flatten)]
        common: Common,
    },
    /// Lambda set, equicontinuity complement, Kulkarni limit set and maximal regions.
    Limitset {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Invariant quadric family (parabolic) or attracting Grassmannian ball (loxodromic).
    Certify {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Orbit oracle: accumulation points of random orbits against the computed lambda set.
    Simulate {
        file: PathBuf,
        #[arg(long, default_value_t = 100)]
        seeds: usize,
        #[arg(long, default_value_t = 500)]
        iters: usize,
        /// Each iteration applies g^step.
        #[arg(long, default_value_t = 1)]
        step: u64,
        #[arg(long, default_value_t = 100)]
        burn_in: usize,
        #[arg(long, default_value_t = 1e-3)]
        cluster_radius: f64,
        /// Convergence data as `m,metric_name,value` rows.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Checks on the invariant Hermitian quadric families of Jordan blocks.
    Hermitian {
        #[command(subcommand)]
        command: HermitianCommand,
    },
}

#[derive(Debug, Subcommand)]
enum HermitianCommand {
    /// All five quadric-family properties for one Jordan block size.
    Selfcheck {
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    CsvSummary,
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, default_value_t = 1e-8)]
    unit_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    cluster_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    det_tol: f64,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// RNG seed for sampled checks and orbit seeds.
    #[arg(long, env = "PROJDYN_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
}

fn parse_signature(s: &str) -> Result<(usize, usize), String> {
    let (k, l) = s.split_once(',').ok_or("expected k,l")?;
    let k: usize = k.trim().parse().map_err(|_| format!("bad k in {s:?}"))?;
    let l: usize = l.trim().parse().map_err(|_| format!("bad l in {s:?}"))?;
    if k == 0 || l == 0 {
        return Err("k and l must be positive".into());
    }
    Ok((k, l))
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error("{0}")]
    Core(#[from] CoreError),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("{0}")]
    Failed(String),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            CliError::Failed(_) => EXIT_NUMERICAL,
            _ => EXIT_VALIDATION,
        }
    }
}

impl Common {
    fn tolerances(&self) -> Result<Tolerances, CliError> {
        for (name, v) in [("--unit-tol", self.unit_tol), ("--cluster-tol", self.cluster_tol), ("--det-tol", self.det_tol)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Argument(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(Tolerances { unit_tol: self.unit_tol, cluster_tol: self.cluster_tol, det_tol: self.det_tol, ..Tolerances::default() })
    }

    fn format(&self) -> Format {
        match self.format {
            FormatArg::Json => Format::Json,
            FormatArg::CsvSummary => Format::CsvSummary,
        }
    }
}

fn load(file: &PathBuf, t: &Tolerances) -> Result<(MatrixDocument, SLMatrix), CliError> {
    let doc = parse_matrix_file(file)?;
    let g = normalize_to_sl(&doc.matrix, t.det_tol)?;
    Ok((doc, g))
}

/// What a command produced: the report, plus an error that sets the exit code after the
/// report has been written.
struct Outcome {
    report: Report,
    failure: Option<CliError>,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Outcome { report, failure: None }
    }
}

fn cmd_classify(file: &PathBuf, pu: Option<(usize, usize)>, t: Tolerances) -> Result<Outcome, CliError> {
    let (doc, g) = load(file, &t)?;
    let c = classify(&g, &t)?;
    let mut r = Report::new("classify", Some(doc), t);
    r.section("classification", report::classification(&c));
    r.warnings.extend(report::marginal_warning(&c, &t));
    if let Some((k, l)) = pu {
        if k + l != g.n_plus_1() {
            return Err(CliError::Argument(format!("--pu {k},{l} does not match dimension {}", g.n_plus_1())));
        }
        let p = classify_pu(&g, k, l, &t)?;
        if p.kind != c.kind {
            r.warnings.push(format!(
                "fixed-point kind in PU({k},{l}) is {} but the eigenvalue kind is {}",
                p.kind.as_str(),
                c.kind.as_str()
            ));
        }
        r.section("pu_classification", report::pu_classification(&p));
    }
    Ok(r.into())
}

fn cmd_limitset(file: &PathBuf, t: Tolerances) -> Result<Outcome, CliError> {
    let (doc, g) = load(file, &t)?;
    let ls = limit_set_report(&g, &t)?;
    let mut r = Report::new("limitset", Some(doc), t);
    r.section("classification", report::classification(&ls.classification));
    r.warnings.extend(report::marginal_warning(&ls.classification, &t));
    r.section(
        "decompositions",
        report::unitary_decomposition(&ls.unitary_decomposition, &t)?,
    );
    r.section("limit_sets", report::limit_sets(&ls));
    if ls.classification.kind != Kind::Elliptic {
        r.warnings.push(report::KULKARNI_NOTE.into());
    }
    r.sets.push(("lambda".into(), ls.lambda.clone()));
    r.sets.push(("eq_complement".into(), ls.eq_complement.clone()));
    r.sets.push(("kulkarni".into(), ls.kulkarni.clone()));
    if let Some((a, b)) = &ls.maximal_regions {
        r.sets.push(("omega1_complement".into(), PointSet::Union(a.complement.clone())));
        r.sets.push(("omega2_complement".into(), PointSet::Union(b.complement.clone())));
    }
    Ok(r.into())
}

fn cmd_certify(file: &PathBuf, t: Tolerances) -> Result<Outcome, CliError> {
    let (doc, g) = load(file, &t)?;
    let c = classify(&g, &t)?;
    let mut r = Report::new("certify", Some(doc), t);
    r.section("classification", report::classification(&c));
    r.warnings.extend(report::marginal_warning(&c, &t));
    let result = match c.kind {
        Kind::Elliptic => return Err(CliError::Argument("elliptic elements have no certificate".into())),
        Kind::Parabolic => parabolic_certificate(&g, &t).map(|p| report::parabolic_certificate(&p)),
        Kind::Loxodromic => loxodromic_certificate(&g, &t).map(|l| report::loxodromic_certificate(&l)),
    };
    match result {
        Ok(v) => {
            r.section("certificate", v);
            Ok(r.into())
        }
        Err(e) if e.is_numerical() => {
            r.section("certificate", report::failed_certificate(c.kind.as_str(), &e.to_string()));
            Ok(Outcome { report: r, failure: Some(e.into()) })
        }
        Err(e) => Err(e.into()),
    }
}

struct SimulateArgs<'a> {
    file: &'a PathBuf,
    seeds: usize,
    iters: usize,
    settings: OrbitSettings,
    csv: Option<&'a PathBuf>,
    seed: u64,
}

/// Largest angle from the current iterates to the lambda set, after each application.
fn convergence_rows(g: &SLMatrix, seeds: &[Vec<C64>], a: &SimulateArgs, lambda: &PointSet) -> Result<String, CliError> {
    let mut out = String::from("m,metric_name,value\n");
    let PointSet::Union(target) = lambda else {
        return Ok(out);
    };
    let map = g.matrix().pow_normalized(a.settings.step.max(1), true);
    let mut xs: Vec<Vec<C64>> = seeds.to_vec();
    for t in 1..=a.iters {
        for x in xs.iter_mut() {
            *x = map.mul_vec(x);
            let s = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if s > 0.0 {
                x.iter_mut().for_each(|z| *z /= s);
            }
        }
        let d = hausdorff_to_union(&xs, target)?;
        let m = t as u64 * a.settings.step.max(1);
        out.push_str(&format!("{m},max_angle_to_lambda,{d:.16e}\n"));
    }
    Ok(out)
}

fn cmd_simulate(a: SimulateArgs, t: Tolerances) -> Result<Outcome, CliError> {
    if a.seeds == 0 || a.iters == 0 {
        return Err(CliError::Argument("--seeds and --iters must be positive".into()));
    }
    if !(a.settings.cluster_radius.is_finite() && a.settings.cluster_radius > 0.0) {
        return Err(CliError::Argument("--cluster-radius must be positive".into()));
    }
    let (doc, g) = load(a.file, &t)?;
    let n = g.n_plus_1();
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let seeds: Vec<Vec<C64>> = (0..a.seeds).map(|_| random_vector(n, &mut rng)).collect();
    let c = classify(&g, &t)?;
    let lambda = lambda_set(&g, &t)?;
    let run = orbit_accumulate(&g, &seeds, a.iters, &a.settings)?;
    let hausdorff = match &lambda {
        PointSet::Union(u) => Some(hausdorff_to_union(&run.points(), u)?),
        PointSet::WholeSpace => Some(0.0),
        PointSet::Empty => None,
    };
    let mut r = Report::new("simulate", Some(doc), t);
    r.section("classification", report::classification(&c));
    r.warnings.extend(report::marginal_warning(&c, &t));
    r.section("lambda", crate::json::point_set(&lambda));
    r.section("orbit", report::orbit(&run, hausdorff));
    r.section("seed", serde_json::json!(a.seed));
    if matches!(lambda, PointSet::Empty) {
        r.warnings.push("lambda set is empty (finite order): orbit clusters are not compared".into());
    }
    r.sets.push(("lambda".into(), lambda.clone()));
    if let Some(path) = a.csv {
        let rows = convergence_rows(&g, &seeds, &a, &lambda)?;
        std::fs::write(path, rows).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    }
    Ok(r.into())
}

fn cmd_selfcheck(size: usize, samples: usize, seed: u64, t: Tolerances) -> Result<Outcome, CliError> {
    if samples == 0 {
        return Err(CliError::Argument("--samples must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = selfcheck(size, samples, &mut rng)?;
    let mut r = Report::new("hermitian selfcheck", None, t);
    r.section("selfcheck", report::selfcheck(&s));
    r.section("seed", serde_json::json!(seed));
    let failure = (!s.all_pass()).then(|| CliError::Failed(format!("quadric family checks failed for size {size}")));
    Ok(Outcome { report: r, failure })
}

fn dispatch(cmd: Command) -> (Result<Outcome, CliError>, (Format, Option<PathBuf>)) {
    let out = |c: &Common| (c.format(), c.output.clone());
    match cmd {
        Command::Classify { file, pu, common } => (common.tolerances().and_then(|t| cmd_classify(&file, pu, t)), out(&common)),
        Command::Limitset { file, common } => (common.tolerances().and_then(|t| cmd_limitset(&file, t)), out(&common)),
        Command::Certify { file, common } => (common.tolerances().and_then(|t| cmd_certify(&file, t)), out(&common)),
        Command::Simulate { file, seeds, iters, step, burn_in, cluster_radius, csv, common } => {
            let settings = OrbitSettings { burn_in, cluster_radius, step, ..OrbitSettings::default() };
            let args = SimulateArgs { file: &file, seeds, iters, settings, csv: csv.as_ref(), seed: common.seed };
            (common.tolerances().and_then(|t| cmd_simulate(args, t)), out(&common))
        }
        Command::Hermitian { command: HermitianCommand::Selfcheck { size, samples, common } } => {
            (common.tolerances().and_then(|t| cmd_selfcheck(size, samples, common.seed, t)), out(&common))
        }
    }
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return e.exit_code();
        }
    };
    let (result, output) = dispatch(cli.command);
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    let (format, path) = output;
    let text = outcome.report.emit(format);
    let written = match &path {
        Some(p) => std::fs::write(p, &text).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
        None => stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: "stdout".into(), source }),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return e.exit_code();
    }
    match outcome.failure {
        Some(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
        None => EXIT_OK,
    }
}
