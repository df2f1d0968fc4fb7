//! Commands behind the `qmst` binary. Each returns data instead of printing
//! so tests can drive them without spawning processes.

use std::fmt::Write as _;
use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use qmst_core::bounds::{brute_force_qmstp, heuristic_upper_bound, MAX_ENUMERATION_N};
use qmst_core::instances::{generate, read_instance, write_instance};
use qmst_core::validation::{
    check_cg_sweep, check_counterexample_misdp_feasible, check_cutset_example, run_all,
    CheckReport, CutsetExample,
};
use qmst_core::{solve_bound, BoundResult, InstanceSpec, PrsmParams};

pub const CSV_HEADER: &str =
    "n,d,m,UB,LB_DNN,gap_dnn,time_dnn,LB_CUTS,gap_cuts,time_total,iterations,cuts,closed";

/// Denominators at or below this leave the gap-closed column blank.
const CLOSED_EPS: f64 = 1e-12;

/// How `generate` attaches an upper bound to the written file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UbSource {
    None,
    Heuristic,
    /// Exhaustive enumeration; only for `n ≤ MAX_ENUMERATION_N`.
    Exact,
}

/// `100 (ub − lb) / ub`.
pub fn gap_percent(ub: f64, lb: f64) -> f64 {
    100.0 * (ub - lb) / ub
}

/// `100 (lb_cuts − lb_dnn) / (ub − lb_dnn)`, `None` when the denominator
/// vanishes.
pub fn closed_percent(ub: f64, lb_dnn: f64, lb_cuts: f64) -> Option<f64> {
    let den = ub - lb_dnn;
    (den > CLOSED_EPS).then(|| 100.0 * (lb_cuts - lb_dnn) / den)
}

/// One line of the results table.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub n: usize,
    pub d: u32,
    pub m: usize,
    pub ub: Option<f64>,
    pub lb_dnn: f64,
    pub time_dnn: f64,
    pub lb_cuts: f64,
    pub time_total: f64,
    pub iterations: usize,
    pub cuts: usize,
}

impl CsvRow {
    pub fn render(&self) -> String {
        let opt = |v: Option<f64>, prec: usize| v.map(|x| format!("{x:.prec$}")).unwrap_or_default();
        let gap = |lb: f64| self.ub.map(|ub| gap_percent(ub, lb));
        let closed = self
            .ub
            .and_then(|ub| closed_percent(ub, self.lb_dnn, self.lb_cuts));
        let mut s = String::new();
        write!(
            s,
            "{},{},{},{},{:.4},{},{:.2},{:.4},{},{:.2},{},{},{}",
            self.n,
            self.d,
            self.m,
            opt(self.ub, 4),
            self.lb_dnn,
            opt(gap(self.lb_dnn), 2),
            self.time_dnn,
            self.lb_cuts,
            opt(gap(self.lb_cuts), 2),
            self.time_total,
            self.iterations,
            self.cuts,
            opt(closed, 2),
        )
        .unwrap();
        s
    }

    /// Fields except the two timing columns.
    pub fn untimed_fields(&self) -> Vec<String> {
        self.render()
            .split(',')
            .enumerate()
            .filter(|&(i, _)| i != 6 && i != 9)
            .map(|(_, f)| f.to_owned())
            .collect()
    }
}

pub fn append_csv(path: &Path, row: &CsvRow) -> Result<()> {
    append_csv_line(path, &row.render())
}

/// Appends one rendered row to `path`, writing the header first when the file
/// is new or empty. Header and row go out in a single write.
pub fn append_csv_line(path: &Path, line: &str) -> Result<()> {
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let mut text = String::new();
    if file.metadata()?.len() == 0 {
        text.push_str(CSV_HEADER);
        text.push('\n');
    }
    text.push_str(line);
    text.push('\n');
    file.write_all(text.as_bytes())?;
    Ok(())
}

pub fn cmd_generate(spec: &InstanceSpec, ub: UbSource, out: &Path) -> Result<()> {
    let mut inst = generate(spec)?;
    inst.ub = match ub {
        UbSource::None => None,
        UbSource::Heuristic => Some(heuristic_upper_bound(&inst, 8)?.0),
        UbSource::Exact => {
            if spec.n > MAX_ENUMERATION_N {
                bail!("exact upper bounds need n <= {MAX_ENUMERATION_N}, got {}", spec.n);
            }
            Some(brute_force_qmstp(&inst)?.0)
        }
    };
    write_instance(&inst, out).with_context(|| format!("writing {}", out.display()))?;
    Ok(())
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub params: PrsmParams,
    /// Overrides the bound stored in the instance file.
    pub ub: Option<f64>,
    pub csv: Option<PathBuf>,
}

/// Solves one instance and appends its row when a CSV path is set. Nothing
/// is written unless the solve succeeds.
pub fn cmd_solve(path: &Path, opts: &SolveOptions) -> Result<(CsvRow, BoundResult)> {
    let mut inst = read_instance(path).with_context(|| format!("reading {}", path.display()))?;
    if opts.ub.is_some() {
        inst.ub = opts.ub;
    }
    let res = solve_bound(&inst, &opts.params)?;
    let row = CsvRow {
        n: inst.graph.n(),
        d: inst.density_percent(),
        m: inst.graph.m(),
        ub: inst.ub,
        lb_dnn: res.lb_dnn,
        time_dnn: res.time_dnn,
        lb_cuts: res.lb_cuts,
        time_total: res.time_total,
        iterations: res.iterations,
        cuts: res.cuts_added,
    };
    if let Some(csv) = &opts.csv {
        append_csv(csv, &row)?;
    }
    Ok((row, res))
}

/// Runs every validation group. `perturb` corrupts one embedded constant of
/// the first counterexample so the failure path can be exercised.
pub fn cmd_validate(perturb: bool) -> Result<Vec<CheckReport>> {
    if !perturb {
        return Ok(run_all()?);
    }
    let mut ex = CutsetExample::standard();
    ex.y[(0, 0)] += 0.25;
    Ok(vec![
        check_cutset_example(&ex)?,
        check_counterexample_misdp_feasible()?,
        check_cg_sweep(3..=8)?,
    ])
}
