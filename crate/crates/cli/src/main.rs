use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qmst_cli::{
    append_csv_line, cmd_generate, cmd_solve, cmd_validate, SolveOptions, UbSource,
    CSV_HEADER,
};
use qmst_core::instances::SvMaxima;
use qmst_core::{Family, InstanceSpec, PrsmParams};

/// Lower bounds for the quadratic minimum spanning tree problem.
///
/// Every option can also be set through a `QMST_`-prefixed environment
/// variable; command line flags take precedence.
#[derive(Parser)]
#[command(name = "qmst", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a random benchmark instance.
    Generate(GenerateArgs),
    /// Compute lower bounds and emit one CSV row per instance.
    Solve(Box<SolveArgs>),
    /// Run the built-in consistency checks.
    Validate {
        /// Corrupt an embedded constant to exercise the failure path.
        #[arg(long, hide = true)]
        perturb: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum UbArg {
    None,
    Heuristic,
    Exact,
}

#[derive(Args)]
struct GenerateArgs {
    /// CP1, CP2, CP3, CP4, OPsym, OPvsym, OPesym or SV.
    #[arg(long, env = "QMST_FAMILY")]
    family: Family,
    #[arg(long, env = "QMST_N")]
    n: usize,
    /// Edge density in percent; OP families require 100.
    #[arg(long, env = "QMST_D", default_value_t = 100)]
    d: u32,
    #[arg(long, env = "QMST_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Maximum diagonal cost (SV only).
    #[arg(long, env = "QMST_CMAX_DIAG")]
    cmax_diag: Option<f64>,
    /// Maximum off-diagonal cost (SV only).
    #[arg(long, env = "QMST_CMAX_OFF")]
    cmax_off: Option<f64>,
    /// Upper bound stored in the file.
    #[arg(long, value_enum, env = "QMST_UB_SOURCE", default_value = "none")]
    ub_source: UbArg,
}

#[derive(Args, Clone)]
struct SolveArgs {
    #[arg(required = true)]
    instances: Vec<PathBuf>,
    /// Append rows to this CSV file.
    #[arg(long, env = "QMST_CSV")]
    csv: Option<PathBuf>,
    /// Upper bound used for gaps and early termination.
    #[arg(long, env = "QMST_UB")]
    ub: Option<f64>,
    /// Stop after the first round, without cutting planes.
    #[arg(long, env = "QMST_NO_CUTS")]
    no_cuts: bool,
    /// Solve several instances in this many parallel processes.
    #[arg(long, env = "QMST_JOBS", default_value_t = 1)]
    jobs: usize,
    /// Print only the row; used by batch workers.
    #[arg(long, hide = true)]
    row_only: bool,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args, Clone)]
struct ParamArgs {
    /// Penalty parameter; derived from the costs when absent.
    #[arg(long, env = "QMST_TAU")]
    tau: Option<f64>,
    #[arg(long, env = "QMST_GAMMA1")]
    gamma1: Option<f64>,
    #[arg(long, env = "QMST_GAMMA2")]
    gamma2: Option<f64>,
    /// Inner stopping tolerance on the residuals.
    #[arg(long, env = "QMST_EPS_PRSM")]
    eps_prsm: Option<f64>,
    /// Tolerance of the cyclic projection.
    #[arg(long, env = "QMST_EPS_PROJ")]
    eps_proj: Option<f64>,
    /// Minimum violation of a separated cut.
    #[arg(long, env = "QMST_CUT_EPS")]
    cut_eps: Option<f64>,
    /// Cuts added per round; defaults to the number of edges.
    #[arg(long, env = "QMST_NCUTSMAX")]
    ncutsmax: Option<usize>,
    #[arg(long, env = "QMST_NCUTSMIN")]
    ncutsmin: Option<usize>,
    #[arg(long, env = "QMST_EPSLBIMPROV")]
    epslbimprov: Option<f64>,
    #[arg(long, env = "QMST_NOUTERMAX")]
    noutermax: Option<usize>,
    /// Cap on inner iterations over all rounds.
    #[arg(long, env = "QMST_MAX_ITERS")]
    max_iters: Option<usize>,
    /// Wall-clock limit in seconds.
    #[arg(long, env = "QMST_TIME_LIMIT")]
    time_limit: Option<f64>,
    #[arg(long, env = "QMST_DYKSTRA_MAX_CYCLES")]
    dykstra_max_cycles: Option<usize>,
}

impl ParamArgs {
    fn resolve(&self, no_cuts: bool) -> Result<PrsmParams> {
        let d = PrsmParams::default();
        let p = PrsmParams {
            tau: self.tau.or(d.tau),
            gamma1: self.gamma1.unwrap_or(d.gamma1),
            gamma2: self.gamma2.unwrap_or(d.gamma2),
            eps_prsm: self.eps_prsm.unwrap_or(d.eps_prsm),
            eps_proj: self.eps_proj.unwrap_or(d.eps_proj),
            cut_violation_eps: self.cut_eps.unwrap_or(d.cut_violation_eps),
            ncutsmax: self.ncutsmax.or(d.ncutsmax),
            ncutsmin: self.ncutsmin.unwrap_or(d.ncutsmin),
            epslbimprov: self.epslbimprov.unwrap_or(d.epslbimprov),
            noutermax: self.noutermax.unwrap_or(d.noutermax),
            max_total_iters: self.max_iters.unwrap_or(d.max_total_iters),
            time_limit_secs: self.time_limit.unwrap_or(d.time_limit_secs),
            dykstra_max_cycles: self.dykstra_max_cycles.unwrap_or(d.dykstra_max_cycles),
            use_cuts: !no_cuts,
        };
        p.validate()?;
        Ok(p)
    }

    /// Flags reproducing the resolved values in a worker process.
    fn forward(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut push = |name: &str, v: Option<String>| {
            if let Some(v) = v {
                out.push(format!("--{name}"));
                out.push(v);
            }
        };
        let s = |v: Option<f64>| v.map(|x| format!("{x:e}"));
        let u = |v: Option<usize>| v.map(|x| x.to_string());
        push("tau", s(self.tau));
        push("gamma1", s(self.gamma1));
        push("gamma2", s(self.gamma2));
        push("eps-prsm", s(self.eps_prsm));
        push("eps-proj", s(self.eps_proj));
        push("cut-eps", s(self.cut_eps));
        push("ncutsmax", u(self.ncutsmax));
        push("ncutsmin", u(self.ncutsmin));
        push("epslbimprov", s(self.epslbimprov));
        push("noutermax", u(self.noutermax));
        push("max-iters", u(self.max_iters));
        push("time-limit", s(self.time_limit));
        push("dykstra-max-cycles", u(self.dykstra_max_cycles));
        out
    }
}

fn generate(args: &GenerateArgs) -> Result<()> {
    let mut spec = InstanceSpec::new(args.family, args.n, args.d, args.seed);
    if args.family != Family::Sv && (args.cmax_diag.is_some() || args.cmax_off.is_some()) {
        bail!("--cmax-diag and --cmax-off apply to the SV family only");
    }
    let dflt = SvMaxima::default();
    spec.sv = SvMaxima {
        diag: args.cmax_diag.unwrap_or(dflt.diag),
        off: args.cmax_off.unwrap_or(dflt.off),
    };
    let ub = match args.ub_source {
        UbArg::None => UbSource::None,
        UbArg::Heuristic => UbSource::Heuristic,
        UbArg::Exact => UbSource::Exact,
    };
    cmd_generate(&spec, ub, &args.out)?;
    log::info!("wrote {}", args.out.display());
    Ok(())
}

fn solve(args: &SolveArgs) -> Result<()> {
    let opts = SolveOptions {
        params: args.params.resolve(args.no_cuts)?,
        ub: args.ub,
        csv: args.csv.clone(),
    };
    if args.jobs > 1 && args.instances.len() > 1 {
        return solve_batch(args);
    }
    if !args.row_only {
        println!("{CSV_HEADER}");
    }
    for path in &args.instances {
        let (row, res) = cmd_solve(path, &opts)?;
        log::info!(
            "{}: lb_dnn {:.6} lb_cuts {:.6} after {} iterations ({})",
            path.display(),
            res.lb_dnn,
            res.lb_cuts,
            res.iterations,
            res.termination_reason
        );
        println!("{}", row.render());
    }
    Ok(())
}

/// Runs one worker process per instance, at most `jobs` at a time, and
/// appends the rows in input order once all succeed.
fn solve_batch(args: &SolveArgs) -> Result<()> {
    let exe = std::env::current_exe().context("locating the qmst binary")?;
    let mut common = vec!["solve".to_owned(), "--row-only".to_owned()];
    if let Some(ub) = args.ub {
        common.extend(["--ub".to_owned(), format!("{ub:e}")]);
    }
    if args.no_cuts {
        common.push("--no-cuts".to_owned());
    }
    common.extend(args.params.forward());

    let next = AtomicUsize::new(0);
    let rows: Mutex<Vec<Option<Result<String>>>> =
        Mutex::new((0..args.instances.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..args.jobs.min(args.instances.len()) {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = args.instances.get(k) else { break };
                let out = run_worker(&exe, &common, path);
                rows.lock().unwrap()[k] = Some(out);
            });
        }
    });
    let rows: Vec<String> = rows
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every index is claimed"))
        .collect::<Result<_>>()?;
    println!("{CSV_HEADER}");
    for row in &rows {
        if let Some(csv) = &args.csv {
            append_csv_line(csv, row)?;
        }
        println!("{row}");
    }
    Ok(())
}

fn run_worker(exe: &Path, common: &[String], path: &Path) -> Result<String> {
    let out = Command::new(exe)
        .args(common)
        .arg(path)
        .env_remove("QMST_CSV")
        .env_remove("QMST_JOBS")
        .output()
        .with_context(|| format!("spawning worker for {}", path.display()))?;
    if !out.status.success() {
        return Err(anyhow!(
            "worker for {} failed: {}",
            path.display(),
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    let text = String::from_utf8(out.stdout)?;
    text.lines()
        .last()
        .map(str::to_owned)
        .ok_or_else(|| anyhow!("worker for {} printed no row", path.display()))
}

fn validate(perturb: bool) -> Result<bool> {
    let reports = cmd_validate(perturb)?;
    for r in &reports {
        print!("{r}");
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    println!("{} group(s), {failed} failed", reports.len());
    Ok(failed == 0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Cmd::Generate(a) => generate(a).map(|_| true),
        Cmd::Solve(a) => solve(a).map(|_| true),
        Cmd::Validate { perturb } => validate(*perturb),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
