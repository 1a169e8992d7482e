use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use toda_darboux::darboux::{backlund_capacity, moderate_magnitude, DEFAULT_PEEL_TOL};
use toda_darboux::lattice::{write_gamma_csv, write_toda_csv, TrajectoryManifest};
use toda_darboux::{
    assemble_transform, backlund_matrix, darboux_factorize, darboux_factorize_sampled, evolve_kdv, evolve_toda,
    lu_factorize, multiply, multiply_chain, random_darboux_instance, random_hessenberg, residual, table_fill,
    theorem1_diagram, Banded, BandedHessenberg, DarbouxFactors, DiagramConfig, Error, GammaTable, ParamChoice,
    ParameterSet, ResidualReport, SampleMode, SamplingOptions, Scalar, ShiftedProblem, ValidWindow,
};

/// Tolerance of the purely algebraic checks (products and closed forms).
const ALGEBRA_TOL: f64 = 1e-10;
/// Tolerance of the gap between the two routes of the commuting diagram.
const PATH_TOL: f64 = 1e-4;

#[derive(Parser)]
#[command(name = "toda-darboux", version, about = "Darboux factorizations and Toda/KdV lattice checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Factor J - C I and print the factors and gamma table.
    Factorize(Common),
    /// Assemble the transform J^(i) and cross-check it against the closed forms.
    Transform {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        i: usize,
    },
    /// Integrate the Toda and KdV flows and write CSV trajectories.
    Evolve(Common),
    /// Run the commuting-diagram check and report every residual.
    Verify(Common),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Source {
    /// Entries of modulus uniform in [1, 2].
    Random,
    /// Built as C I + L^(1) ... L^(p) U from moderate gammas.
    Factored,
}

#[derive(Args, Clone, Debug)]
struct Common {
    #[arg(long, default_value_t = 2)]
    p: usize,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long = "C-re", default_value_t = 0.0, allow_hyphen_values = true)]
    c_re: f64,
    #[arg(long = "C-im", default_value_t = 0.0, allow_hyphen_values = true)]
    c_im: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    #[arg(long, default_value = "real")]
    mode: SampleMode,
    #[arg(long = "tol-pivot", default_value_t = toda_darboux::lu::DEFAULT_PIVOT_TOL)]
    tol_pivot: f64,
    #[arg(long = "tol-margin", default_value_t = toda_darboux::darboux::DEFAULT_MARGIN)]
    tol_margin: f64,
    #[arg(long = "tol-verify", default_value_t = 1e-5)]
    tol_verify: f64,
    /// Output file (JSON) or, for `evolve`, output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Matrix JSON to use instead of a generated one.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Parameter JSON (nested arrays by stage); sampled from the seed if absent.
    #[arg(long)]
    params: Option<PathBuf>,
    /// How to generate J when no input is given.
    #[arg(long, value_enum)]
    source: Option<Source>,
}

/// Validated run configuration echoed into every output.
#[derive(Debug, Clone, Serialize)]
struct RunConfig {
    p: usize,
    n: usize,
    #[serde(rename = "C", with = "toda_darboux::json::scalar")]
    shift: Scalar,
    seed: u64,
    dt: f64,
    steps: usize,
    mode: SampleMode,
    source: Source,
    tol_pivot: f64,
    tol_margin: f64,
    tol_verify: f64,
}

enum Failure {
    Usage(String),
    Module(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Module(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl Failure {
    fn to_json(&self) -> Value {
        let (kind, message) = match self {
            Failure::Usage(m) => ("usage", m.clone()),
            Failure::Io(m) => ("io", m.clone()),
            Failure::Module(e) => (e.kind(), e.to_string()),
        };
        json!({ "error": { "kind": kind, "message": message } })
    }
}

type Outcome = Result<bool, Failure>;

impl Common {
    fn config(&self, default_source: Source) -> Result<RunConfig, Failure> {
        if self.p == 0 || self.n <= self.p {
            return Err(Failure::Usage(format!("need n > p >= 1 (got p = {}, n = {})", self.p, self.n)));
        }
        for (name, v) in [
            ("tol-pivot", self.tol_pivot),
            ("tol-margin", self.tol_margin),
            ("tol-verify", self.tol_verify),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Failure::Usage(format!("--{name} must be positive, got {v}")));
            }
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Failure::Usage(format!("--dt must be positive, got {}", self.dt)));
        }
        if !(self.c_re.is_finite() && self.c_im.is_finite()) {
            return Err(Failure::Usage("the shift must be finite".into()));
        }
        Ok(RunConfig {
            p: self.p,
            n: self.n,
            shift: Scalar::new(self.c_re, self.c_im),
            seed: self.seed,
            dt: self.dt,
            steps: self.steps,
            mode: self.mode,
            source: self.source.unwrap_or(default_source),
            tol_pivot: self.tol_pivot,
            tol_margin: self.tol_margin,
            tol_verify: self.tol_verify,
        })
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Module(Error::Parse(format!("{}: {e}", path.display()))))
}

fn emit(out: Option<&Path>, value: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    match out {
        Some(path) => fs::write(path, text + "\n")?,
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}")?;
        }
    }
    Ok(())
}

/// The matrix to work on: from a file, or generated from the seed.
fn load_matrix(args: &Common, cfg: &RunConfig, size: usize) -> Result<(BandedHessenberg, Option<ParameterSet>), Failure> {
    if let Some(path) = &args.input {
        let j: BandedHessenberg = read_json(path)?;
        return Ok((j, None));
    }
    match cfg.source {
        Source::Random => Ok((random_hessenberg(cfg.p, size, cfg.seed, cfg.mode)?, None)),
        Source::Factored => {
            let m = moderate_magnitude(cfg.p);
            let inst = random_darboux_instance(cfg.p, size, cfg.shift, (m, 2.0 * m), cfg.seed, cfg.mode)?;
            Ok((inst.j, Some(inst.params)))
        }
    }
}

fn sampling(cfg: &RunConfig) -> SamplingOptions {
    SamplingOptions {
        margin: cfg.tol_margin,
        mode: cfg.mode,
        ..SamplingOptions::default()
    }
}

fn report(check: &str, value: f64, tolerance: f64) -> ResidualReport {
    ResidualReport {
        check: check.into(),
        max_residual: value,
        argmax: None,
        tolerance,
        pass: value <= tolerance,
    }
}

struct Factored {
    j: BandedHessenberg,
    factors: DarbouxFactors,
    params: ParameterSet,
    table: GammaTable,
    reports: Vec<ResidualReport>,
}

fn factor_pipeline(args: &Common, cfg: &RunConfig) -> Result<Factored, Failure> {
    let (j, known) = load_matrix(args, cfg, cfg.n)?;
    let prob = ShiftedProblem::new(j.clone(), cfg.shift);
    let lu = lu_factorize(&prob, cfg.tol_pivot).map_err(|e| e.at_stage("lu"))?;
    info!("LU factorization done (n = {}, p = {})", j.n(), j.p());
    let p = j.p();
    let given = match &args.params {
        Some(path) => Some(read_json::<ParameterSet>(path)?),
        None if p == 1 => Some(ParameterSet::empty()),
        None => known,
    };
    let (lowers, params) = match given {
        Some(ps) => (darboux_factorize(&lu.l, &ps, DEFAULT_PEEL_TOL).map_err(|e| e.at_stage("darboux"))?, ps),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            darboux_factorize_sampled(&lu.l, &mut rng, &sampling(cfg), DEFAULT_PEEL_TOL)
                .map_err(|e| e.at_stage("darboux"))?
        }
    };
    info!("Darboux factorization done");
    let n = j.n();
    let (lu_prod, w) = multiply(&lu.l, &lu.u, ValidWindow(n), ValidWindow(n))?;
    let chain: Vec<&dyn Banded> = lowers.iter().map(|l| l as &dyn Banded).collect();
    let (l_prod, wl) = multiply_chain(&chain)?;
    let factors = DarbouxFactors {
        u: lu.u.clone(),
        lowers,
        shift: cfg.shift,
    };
    let table = factors.table()?;
    let filled = table_fill(&j, lu.u.free(), &params, DEFAULT_PEEL_TOL).map_err(|e| e.at_stage("table"))?;
    let table_gap = table
        .values()
        .iter()
        .zip(filled.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let reports = vec![
        report("lu", residual(&lu_prod, &j.shifted(cfg.shift), w), ALGEBRA_TOL),
        report("darboux", residual(&l_prod, &lu.l, wl), ALGEBRA_TOL),
        report("table_fill", table_gap, ALGEBRA_TOL),
    ];
    Ok(Factored {
        j,
        factors,
        params,
        table,
        reports,
    })
}

fn all_pass(reports: &[ResidualReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

fn cmd_factorize(args: &Common) -> Outcome {
    let cfg = args.config(Source::Random)?;
    let f = factor_pipeline(args, &cfg)?;
    let rows: Vec<Value> = (0..=f.table.p())
        .map(|r| json!(f.table.row(r).iter().map(|v| [v.re, v.im]).collect::<Vec<_>>()))
        .collect();
    let out = json!({
        "config": cfg,
        "J": f.j,
        "params": f.params,
        "factors": f.factors,
        "gamma": f.table,
        "gamma_rows": rows,
        "reports": f.reports,
    });
    emit(args.out.as_deref(), &out)?;
    Ok(all_pass(&f.reports))
}

fn cmd_transform(args: &Common, i: usize) -> Outcome {
    let cfg = args.config(Source::Random)?;
    if i > cfg.p {
        return Err(Failure::Module(Error::InvalidArgument(format!(
            "transform index {i} is outside 0..={}",
            cfg.p
        ))));
    }
    let f = factor_pipeline(args, &cfg)?;
    let (ji, window) = assemble_transform(&f.factors, i)?;
    let size = window.rows().min(backlund_capacity(&f.table));
    let closed = backlund_matrix(&f.table, i, cfg.shift, size)?;
    let mut reports = f.reports;
    reports.push(report("backlund", residual(&closed, &ji, ValidWindow(size)), ALGEBRA_TOL));
    if i == 0 {
        reports.push(report("identity", residual(&ji, &f.j, window), ALGEBRA_TOL));
    }
    let out = json!({
        "config": cfg,
        "i": i,
        "window": window.rows(),
        "J_i": ji,
        "reports": reports,
    });
    emit(args.out.as_deref(), &out)?;
    Ok(all_pass(&reports))
}

fn cmd_evolve(args: &Common) -> Outcome {
    let cfg = args.config(Source::Factored)?;
    let dir = args
        .out
        .as_deref()
        .ok_or_else(|| Failure::Usage("evolve needs --out DIR for its CSV files".into()))?;
    fs::create_dir_all(dir)?;
    let f = factor_pipeline(args, &cfg)?;
    let toda = evolve_toda(&f.j, cfg.dt, cfg.steps).map_err(|e| e.at_stage("toda"))?;
    let kdv = evolve_kdv(&f.table, cfg.dt, cfg.steps).map_err(|e| e.at_stage("kdv"))?;
    let mut w = std::io::BufWriter::new(fs::File::create(dir.join("toda.csv"))?);
    write_toda_csv(&mut w, &toda)?;
    w.flush()?;
    let mut w = std::io::BufWriter::new(fs::File::create(dir.join("kdv.csv"))?);
    write_gamma_csv(&mut w, &kdv)?;
    w.flush()?;
    let manifest = TrajectoryManifest {
        dt: cfg.dt,
        steps: cfg.steps,
        p: cfg.p,
        n: f.j.n(),
        shift: cfg.shift,
        seed: Some(cfg.seed),
    };
    emit(Some(&dir.join("manifest.json")), &serde_json::to_value(&manifest).expect("manifest serializes"))?;
    emit(None, &json!({ "config": cfg, "files": ["toda.csv", "kdv.csv", "manifest.json"], "reports": f.reports }))?;
    Ok(all_pass(&f.reports))
}

fn cmd_verify(args: &Common) -> Outcome {
    let cfg = args.config(Source::Factored)?;
    // The window is n; the flows run on a larger truncation.
    let working = cfg.n + cfg.p + 2;
    let (j, known) = load_matrix(args, &cfg, working)?;
    let window = if args.input.is_some() {
        j.n().saturating_sub(j.p() + 2)
    } else {
        cfg.n
    };
    let choice = match (&args.params, known) {
        (Some(path), _) => ParamChoice::Given(read_json(path)?),
        (None, _) if j.p() == 1 => ParamChoice::Given(ParameterSet::empty()),
        (None, Some(ps)) => ParamChoice::Given(ps),
        (None, None) => ParamChoice::Sampled {
            seed: cfg.seed,
            options: sampling(&cfg),
        },
    };
    let dcfg = DiagramConfig {
        dt: cfg.dt,
        steps: cfg.steps,
        window,
        tol_path: PATH_TOL,
        tol_verify: cfg.tol_verify,
        pivot_tol: cfg.tol_pivot,
        peel_tol: DEFAULT_PEEL_TOL,
    };
    let r = theorem1_diagram(&j, cfg.shift, &choice, &dcfg)?;
    eprintln!("{:<12} {:>12} {:>12}  status", "check", "residual", "tolerance");
    for rep in r.reports() {
        eprintln!(
            "{:<12} {:>12.3e} {:>12.1e}  {}",
            rep.check,
            rep.max_residual,
            rep.tolerance,
            if rep.pass { "pass" } else { "FAIL" }
        );
    }
    let out = json!({
        "config": cfg,
        "window": window,
        "working_size": j.n(),
        "params": r.params,
        "reports": r.reports(),
    });
    emit(args.out.as_deref(), &out)?;
    Ok(r.pass())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TODA_DARBOUX_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Factorize(a) => cmd_factorize(a),
        Command::Transform { common, i } => cmd_transform(common, *i),
        Command::Evolve(a) => cmd_evolve(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            println!("{}", f.to_json());
            ExitCode::from(2)
        }
    }
}
