//! The `tableau`, `run`, `longtime` and `converge` subcommands.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use num_complex::Complex64;
use rayon::prelude::*;

use super::config::RunConfig;
use super::output::{
    fmt_f64, fmt_opt, peak, write_json, write_profile, CsvWriter, Summary, CONVERGENCE_HEADER, CONVERGENCE_SCHEMA,
    ERROR_HEADER, ERROR_SCHEMA, INVARIANTS_HEADER, INVARIANTS_SCHEMA,
};
use crate::diagnostics::{fit_order, l2_error, linf_error, ConvergenceRow, ConvergenceTable, InvariantRecord};
use crate::dirk::{conservative_defect, integrate, registry, step_count, SolverConfig, REGISTRY_NAMES};
use crate::error::{Error, Result};
use crate::ieq::{init_state, IeqState, NlsParams};
use crate::scenarios::Scenario;
use crate::spectral::{Grid1D, Grid2D, SpectralGrid};

/// Errors below this level are solver noise and are left out of order fits.
pub const FIT_FLOOR: f64 = 1e-12;

/// Human-readable report of one or all registry tableaux.
pub fn tableau_report(name: &str) -> Result<String> {
    let names: Vec<&str> = if name == "all" { REGISTRY_NAMES.to_vec() } else { vec![name] };
    let mut out = String::new();
    for (k, name) in names.iter().enumerate() {
        let t = registry(name)?;
        if k > 0 {
            out.push('\n');
        }
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(", ");
        writeln!(out, "tableau {} (stages {}, claimed order {})", t.name(), t.stages(), t.claimed_order()).unwrap();
        writeln!(out, "  b = [{}]", list(t.b())).unwrap();
        writeln!(out, "  a =").unwrap();
        for i in 0..t.stages() {
            let row: Vec<f64> = (0..t.stages()).map(|j| t.a(i, j)).collect();
            writeln!(out, "    [{}]", list(&row)).unwrap();
        }
        writeln!(out, "  c = [{}]", list(t.c())).unwrap();
        writeln!(out, "  sum b = {:.16e}", t.weight_sum()).unwrap();
        writeln!(out, "  conservative defect = {:.3e}", conservative_defect(&t)).unwrap();
        if !t.is_consistent(1e-6) {
            writeln!(
                out,
                "  warning: weights sum to {:.10}, not 1; the method is inconsistent and kept for reference only",
                t.weight_sum()
            )
            .unwrap();
        }
    }
    Ok(out)
}

#[derive(Default)]
struct Tracker {
    steps_completed: usize,
    t: f64,
    max_mass_drift: f64,
    max_energy_drift: f64,
    max_iters: usize,
    max_residual: f64,
    peak: f64,
    peak_position: Vec<f64>,
    io_error: Option<Error>,
}

fn invariant_row(step: usize, rec: &InvariantRecord, iters: usize, residual: f64) -> Vec<String> {
    vec![
        step.to_string(),
        fmt_f64(rec.t),
        fmt_f64(rec.mass),
        fmt_f64(rec.energy_modified),
        fmt_f64(rec.energy_original),
        fmt_f64(rec.mass_drift),
        fmt_f64(rec.energy_drift),
        iters.to_string(),
        fmt_f64(residual),
    ]
}

fn execute<G: SpectralGrid>(
    cfg: &RunConfig,
    params: &NlsParams<G>,
    u0: Vec<Complex64>,
    exact_at_end: Option<Vec<Complex64>>,
) -> Result<Summary> {
    let scenario = cfg.scenario()?;
    let tableau = registry(&cfg.tableau)?;
    let solver = cfg.solver();
    let steps = cfg.steps()?;
    let snapshots: BTreeSet<usize> = cfg.snapshot_steps()?.into_iter().collect();
    fs::create_dir_all(&cfg.out_dir)?;
    let out = |name: &str| cfg.out_dir.join(name);

    let state0 = init_state(&params.grid, u0, 0.0)?;
    let rec0 = InvariantRecord::initial(&state0, params)?;
    let (peak0, pos0) = peak(&params.grid, &state0);
    let mut inv = CsvWriter::create(&out("invariants.csv"), INVARIANTS_SCHEMA, INVARIANTS_HEADER)?;
    inv.row(&invariant_row(0, &rec0, 0, 0.0))?;
    if snapshots.contains(&0) {
        write_profile(&out("snapshot_0.csv"), &params.grid, &state0)?;
    }

    let mut tr = Tracker { peak: peak0, peak_position: pos0, ..Default::default() };
    let result = integrate(state0, cfg.t_end, cfg.dt, &tableau, params, &solver, |k, state, rec, report| {
        tr.steps_completed = k;
        tr.t = state.t;
        tr.max_mass_drift = tr.max_mass_drift.max(rec.mass_drift.abs());
        tr.max_energy_drift = tr.max_energy_drift.max(rec.energy_drift.abs());
        tr.max_iters = tr.max_iters.max(report.max_iterations());
        tr.max_residual = tr.max_residual.max(report.max_residual);
        (tr.peak, tr.peak_position) = peak(&params.grid, state);
        if tr.io_error.is_some() {
            return;
        }
        let mut io = || -> Result<()> {
            if k % cfg.record_every == 0 || k == steps {
                inv.row(&invariant_row(k, rec, report.max_iterations(), report.max_residual))?;
            }
            if snapshots.contains(&k) {
                write_profile(&out(&format!("snapshot_{k}.csv")), &params.grid, state)?;
            }
            Ok(())
        };
        if let Err(e) = io() {
            tr.io_error = Some(e);
        }
    });
    if let Some(e) = tr.io_error.take() {
        return Err(e);
    }

    let mut summary = Summary {
        status: "ok".into(),
        failure: None,
        scenario: scenario.name.to_string(),
        tableau: cfg.tableau.clone(),
        dims: scenario.dims,
        n: cfg.n,
        domain: cfg.domain()?,
        beta: params.beta,
        dt: cfg.dt,
        t_end: cfg.t_end,
        steps_completed: tr.steps_completed,
        t_reached: tr.t,
        mass_initial: rec0.mass,
        energy_initial: rec0.energy_modified,
        max_abs_mass_drift: tr.max_mass_drift,
        max_abs_energy_drift: tr.max_energy_drift,
        max_stage_iterations: tr.max_iters,
        max_residual: tr.max_residual,
        peak_amplitude_initial: peak0,
        peak_amplitude: tr.peak,
        peak_position: tr.peak_position,
        l2_error: None,
        linf_error: None,
    };

    let last = match result {
        Ok(last) => last,
        Err(e) if e.is_numerical() => {
            inv.comment(&format!("failure: {e}"))?;
            inv.flush()?;
            summary.status = "failed".into();
            summary.failure = Some(e.to_string());
            write_json(&out("summary.json"), &summary)?;
            return Err(e);
        }
        Err(e) => return Err(e),
    };
    inv.flush()?;
    write_profile(&out("final_profile.csv"), &params.grid, &last)?;
    if let Some(exact) = exact_at_end {
        let l2 = l2_error(&last.u, &exact, &params.grid)?;
        let linf = linf_error(&last.u, &exact)?;
        let mut csv = CsvWriter::create(&out("error.csv"), ERROR_SCHEMA, ERROR_HEADER)?;
        csv.row(&[fmt_f64(last.t), fmt_f64(l2), fmt_f64(linf)])?;
        csv.flush()?;
        summary.l2_error = Some(l2);
        summary.linf_error = Some(linf);
    }
    write_json(&out("summary.json"), &summary)?;
    Ok(summary)
}

/// Integrates the configured scenario and writes all output files into `cfg.out_dir`.
///
/// On a solver failure the invariant log ends with a `# failure:` comment row,
/// `summary.json` has status `failed`, and the error is returned.
pub fn run(cfg: &RunConfig) -> Result<Summary> {
    cfg.validate()?;
    let scenario = cfg.scenario()?;
    let (a, b) = cfg.domain()?;
    let beta = cfg.beta()?;
    match scenario.dims {
        1 => {
            let grid = Grid1D::new(a, b, cfg.n)?;
            let u0 = scenario.initial_1d(&grid)?;
            let exact = scenario.exact_1d(&grid, cfg.t_end);
            execute(cfg, &NlsParams::new(beta, grid), u0, exact)
        }
        _ => {
            let grid = Grid2D::square(a, b, cfg.n)?;
            let u0 = scenario.initial_2d(&grid)?;
            execute(cfg, &NlsParams::new(beta, grid), u0, None)
        }
    }
}

/// Settings of a temporal convergence study against an exact solution.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergeConfig {
    pub scenario: String,
    pub tableaux: Vec<String>,
    pub n: usize,
    pub t_end: f64,
    /// Strictly decreasing step sizes.
    pub dts: Vec<f64>,
    pub domain: Option<(f64, f64)>,
    pub beta: Option<f64>,
    pub out_dir: PathBuf,
    pub solver: SolverConfig,
}

impl ConvergeConfig {
    /// Soliton study at 256 nodes, `T = 2⁻⁵`, `dt = 2⁻⁶ … 2⁻⁹`.
    pub fn soliton_default(out_dir: PathBuf) -> Self {
        Self {
            scenario: "soliton".into(),
            tableaux: ["dirk12", "dirk22", "dirk33", "dirk44_corrected", "dirk54", "dirk65"]
                .map(String::from)
                .to_vec(),
            n: 256,
            t_end: 2f64.powi(-5),
            dts: (6..=9).map(|k| 2f64.powi(-k)).collect(),
            domain: None,
            beta: None,
            out_dir,
            solver: SolverConfig::default(),
        }
    }

    fn validate(&self, scenario: &Scenario) -> Result<()> {
        if !scenario.has_exact || scenario.dims != 1 {
            return Err(Error::Config(format!("scenario `{}` has no exact solution", scenario.name)));
        }
        if self.tableaux.is_empty() || self.dts.is_empty() {
            return Err(Error::Config("need at least one tableau and one step size".into()));
        }
        for name in &self.tableaux {
            registry(name)?;
        }
        for &dt in &self.dts {
            step_count(0.0, self.t_end, dt)?;
        }
        if self.dts.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config("step sizes must be strictly decreasing".into()));
        }
        self.solver.validate()
    }
}

/// Errors of one tableau over the step sizes of a study.
#[derive(Clone, Debug)]
pub struct TableauConvergence {
    pub tableau: String,
    pub table: ConvergenceTable,
    pub pairwise: Vec<Option<f64>>,
    /// Least-squares order over the rows above [`FIT_FLOOR`]; `None` with fewer than three.
    pub fitted_order: Option<f64>,
}

/// Runs every `(tableau, dt)` case in parallel; results come back in declared order.
pub fn converge_study(cfg: &ConvergeConfig) -> Result<Vec<TableauConvergence>> {
    let scenario = Scenario::by_name(&cfg.scenario)?;
    cfg.validate(&scenario)?;
    let (a, b) = cfg.domain.or(scenario.study_domain).unwrap_or(scenario.domain);
    let grid = Grid1D::new(a, b, cfg.n)?;
    let params = NlsParams::new(cfg.beta.unwrap_or(scenario.beta), grid);
    let u0 = scenario.initial_1d(&params.grid)?;
    let exact = scenario.exact_1d(&params.grid, cfg.t_end).expect("validated above");
    let state0 = init_state(&params.grid, u0, 0.0)?;

    let cases: Vec<(usize, f64)> = (0..cfg.tableaux.len())
        .flat_map(|i| cfg.dts.iter().map(move |&dt| (i, dt)))
        .collect();
    let errors: Vec<f64> = cases
        .par_iter()
        .map(|&(i, dt)| {
            let tableau = registry(&cfg.tableaux[i])?;
            let last: IeqState =
                integrate(state0.clone(), cfg.t_end, dt, &tableau, &params, &cfg.solver, |_, _, _, _| {})?;
            l2_error(&last.u, &exact, &params.grid)
        })
        .collect::<Result<_>>()?;

    let m = cfg.dts.len();
    cfg.tableaux
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let rows = cfg
                .dts
                .iter()
                .zip(&errors[i * m..(i + 1) * m])
                .map(|(&dt, &l2_error)| ConvergenceRow { dt, l2_error })
                .collect();
            let table = ConvergenceTable::new(rows)?;
            let mut pairwise = vec![None];
            pairwise.extend(table.rows().windows(2).map(|w| {
                let o = (w[0].l2_error / w[1].l2_error).ln() / (w[0].dt / w[1].dt).ln();
                o.is_finite().then_some(o)
            }));
            let fitted_order = fit_order(&table.above_floor(FIT_FLOOR)).ok();
            Ok(TableauConvergence { tableau: name.clone(), table, pairwise, fitted_order })
        })
        .collect()
}

/// Runs [`converge_study`] and writes `convergence.csv`.
pub fn converge(cfg: &ConvergeConfig) -> Result<Vec<TableauConvergence>> {
    let results = converge_study(cfg)?;
    fs::create_dir_all(&cfg.out_dir)?;
    let mut csv = CsvWriter::create(&cfg.out_dir.join("convergence.csv"), CONVERGENCE_SCHEMA, CONVERGENCE_HEADER)?;
    for res in &results {
        for (row, order) in res.table.rows().iter().zip(&res.pairwise) {
            csv.row(&[
                res.tableau.clone(),
                fmt_f64(row.dt),
                fmt_f64(row.l2_error),
                fmt_opt(*order),
                fmt_opt(res.fitted_order),
            ])?;
        }
    }
    csv.flush()?;
    Ok(results)
}
