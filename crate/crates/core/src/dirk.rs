//! Conservative diagonally implicit Runge–Kutta integrators for the quadratized system.
//!
//! A DIRK method built from weights `b` as
//!
//! ```text
//!  c_1 | b_1/2
//!  c_2 | b_1    b_2/2
//!   :  |  :      :     .
//!  c_s | b_1    b_2   ...  b_s/2
//! -----+----------------------------
//!      | b_1    b_2   ...  b_s
//! ```
//!
//! satisfies `b_i a_ij + b_j a_ji - b_i b_j = 0` for all `i, j`, and therefore
//! preserves every quadratic invariant of the system, in particular the
//! discrete mass and the modified energy. Stages are solved one after another,
//! each by a fixed-point iteration in which the stiff dispersive part is
//! inverted exactly in Fourier space.

use num_complex::Complex64;

use crate::diagnostics::{record_invariants, InvariantRecord};
use crate::error::{check_len, Error, Result};
use crate::ieq::{rhs_f, rhs_g, IeqState, NlsParams};
use crate::spectral::{solve_shifted_with_laplacian, SpectralGrid};

/// Tableaux with a larger conservative defect are refused by [`step`] unless overridden.
pub const CONSERVATIVE_DEFECT_LIMIT: f64 = 1e-10;

/// Names accepted by [`registry`].
pub const REGISTRY_NAMES: [&str; 7] = [
    "dirk12",
    "dirk22",
    "dirk33",
    "dirk44_as_printed",
    "dirk44_corrected",
    "dirk54",
    "dirk65",
];

const B_DIRK33: [f64; 3] = [1.351207, 1.351207, -1.702414];
const B_DIRK44_PRINTED: [f64; 4] = [2.70309412, -0.53652708, 2.37893931, 1.8606818856];
const B_DIRK54: [f64; 5] = [
    -2.150611289942181,
    1.452223059167718,
    2.3967764615489258,
    1.452223059167718,
    -2.150611289942181,
];
const B_DIRK65: [f64; 6] = [
    0.5080048194000274,
    1.360107162294827,
    2.0192933591817224,
    0.5685658926458251,
    -1.4598520495864393,
    -1.9961191839359627,
];

/// Butcher coefficients of a diagonally implicit method.
#[derive(Clone, Debug, PartialEq)]
pub struct Tableau {
    name: String,
    b: Vec<f64>,
    /// Row-major `s×s`, zero above the diagonal.
    a: Vec<f64>,
    c: Vec<f64>,
    claimed_order: u32,
}

impl Tableau {
    /// General lower-triangular tableau; `a` is given row by row.
    pub fn new(name: impl Into<String>, b: Vec<f64>, a: Vec<Vec<f64>>, claimed_order: u32) -> Result<Self> {
        let s = b.len();
        if s == 0 {
            return Err(Error::Tableau("empty weight vector".into()));
        }
        if a.len() != s || a.iter().any(|row| row.len() != s) {
            return Err(Error::Tableau(format!("coefficient matrix must be {s}x{s}")));
        }
        for (i, row) in a.iter().enumerate() {
            if row[i + 1..].iter().any(|&x| x != 0.0) {
                return Err(Error::Tableau(format!("row {i} has entries above the diagonal")));
            }
        }
        if b.iter().chain(a.iter().flatten()).any(|x| !x.is_finite()) {
            return Err(Error::Tableau("non-finite coefficient".into()));
        }
        let c = a.iter().map(|row| row.iter().sum()).collect();
        Ok(Self {
            name: name.into(),
            b,
            a: a.into_iter().flatten().collect(),
            c,
            claimed_order,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.stages() + j]
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn claimed_order(&self) -> u32 {
        self.claimed_order
    }

    /// `Σ b_i`; equals one for a consistent method.
    pub fn weight_sum(&self) -> f64 {
        self.b.iter().sum()
    }

    /// `Σ b_i c_i - ½`; zero for second order.
    pub fn second_order_defect(&self) -> f64 {
        self.b.iter().zip(&self.c).map(|(b, c)| b * c).sum::<f64>() - 0.5
    }

    /// Whether `Σ b_i = 1` holds within `tol`.
    pub fn is_consistent(&self, tol: f64) -> bool {
        (self.weight_sum() - 1.0).abs() <= tol
    }
}

/// Builds the quadratic-invariant-preserving DIRK tableau with weights `b`:
/// `a_ii = b_i/2`, `a_ij = b_j` for `j < i`.
pub fn tableau_from_b(b: &[f64], claimed_order: u32, name: &str) -> Result<Tableau> {
    if let Some(i) = b.iter().position(|&x| x == 0.0) {
        return Err(Error::Tableau(format!("weight b_{} is zero", i + 1)));
    }
    let s = b.len();
    let a = (0..s)
        .map(|i| {
            (0..s)
                .map(|j| match j.cmp(&i) {
                    std::cmp::Ordering::Less => b[j],
                    std::cmp::Ordering::Equal => 0.5 * b[i],
                    std::cmp::Ordering::Greater => 0.0,
                })
                .collect()
        })
        .collect();
    Tableau::new(name, b.to_vec(), a, claimed_order)
}

/// `max_ij |b_i a_ij + b_j a_ji - b_i b_j|`
pub fn conservative_defect(t: &Tableau) -> f64 {
    let s = t.stages();
    let b = t.b();
    let mut worst = 0.0_f64;
    for i in 0..s {
        for j in 0..s {
            let m = b[i] * t.a(i, j) + b[j] * t.a(j, i) - b[i] * b[j];
            worst = worst.max(m.abs());
        }
    }
    worst
}

/// Looks up one of the built-in conservative tableaux by name.
///
/// `dirk44_as_printed` carries weights that do not sum to one and is kept for
/// reference only; `dirk44_corrected` replaces its last weight by
/// `1 - (b_1 + b_2 + b_3)`.
pub fn registry(name: &str) -> Result<Tableau> {
    match name {
        "dirk12" => tableau_from_b(&[1.0], 2, name),
        "dirk22" => tableau_from_b(&[0.5, 0.5], 2, name),
        "dirk33" => tableau_from_b(&B_DIRK33, 3, name),
        "dirk44_as_printed" => tableau_from_b(&B_DIRK44_PRINTED, 4, name),
        "dirk44_corrected" => {
            let mut b = B_DIRK44_PRINTED;
            b[3] = 1.0 - (b[0] + b[1] + b[2]);
            tableau_from_b(&b, 4, name)
        }
        "dirk54" => tableau_from_b(&B_DIRK54, 4, name),
        "dirk65" => tableau_from_b(&B_DIRK65, 5, name),
        other => Err(Error::UnknownTableau(other.to_string())),
    }
}

/// Settings of the per-stage nonlinear solver.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Increment tolerance relative to `1 + ‖u^n‖_∞`.
    pub tol: f64,
    pub max_iters: usize,
    /// Invert the dispersive part exactly in every sweep (plain Picard otherwise).
    pub linearized: bool,
    /// Let [`step`] accept tableaux that do not preserve quadratic invariants.
    pub allow_nonconservative: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-13,
            max_iters: 500,
            linearized: true,
            allow_nonconservative: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Config(format!("solver tolerance {} must be positive", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        Ok(())
    }

    /// Absolute increment tolerance for a step starting from `u` with `‖u‖_∞ = u_max`.
    pub fn absolute_tol(&self, u_max: f64) -> f64 {
        self.tol * (1.0 + u_max)
    }
}

/// Per-step solver statistics.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StepReport {
    pub stage_iterations: Vec<usize>,
    /// Worst stage-equation residual, `|τ|·max(‖f_i - f(U_i, R_i)‖_∞, ‖g_i - 2Re(Ū_i f_i)‖_∞)`.
    pub max_residual: f64,
}

impl StepReport {
    pub fn max_iterations(&self) -> usize {
        self.stage_iterations.iter().copied().max().unwrap_or(0)
    }
}

/// Right-hand side data of one stage equation
/// `U = rhs_u + tau·f(U, R)`, `R = rhs_r + tau·g(U, R)`.
#[derive(Clone, Copy, Debug)]
pub struct StageProblem<'a> {
    pub stage: usize,
    pub tau: f64,
    pub rhs_u: &'a [Complex64],
    pub rhs_r: &'a [f64],
}

/// Converged stage values. `f` and `g` are reconstructed from the stage relations.
#[derive(Clone, Debug)]
pub struct StageSolution {
    pub u: Vec<Complex64>,
    pub r: Vec<f64>,
    pub f: Vec<Complex64>,
    pub g: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

fn max_diff_c(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn max_diff_r(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Solves one stage equation to the absolute increment tolerance `abs_tol`.
///
/// Starting from `guess`, each linearized sweep solves
/// `(I - iτL) U⁺ = rhs_u + iτβ R∘U` exactly, then sets `f⁺ = f(U⁺, R)` and
/// `R⁺ = rhs_r + τ·2Re(conj(U⁺) f⁺)`. A zero `tau` is an explicit stage.
pub fn solve_stage<G: SpectralGrid>(
    problem: StageProblem<'_>,
    params: &NlsParams<G>,
    cfg: &SolverConfig,
    abs_tol: f64,
    guess: (&[Complex64], &[f64]),
) -> Result<StageSolution> {
    let StageProblem { stage, tau, rhs_u, rhs_r } = problem;
    let n = params.grid.len();
    check_len(n, rhs_u.len())?;
    check_len(n, rhs_r.len())?;
    check_len(n, guess.0.len())?;
    check_len(n, guess.1.len())?;

    if tau == 0.0 {
        let f = rhs_f(params, rhs_u, rhs_r)?;
        let g = rhs_g(rhs_u, &f)?;
        return Ok(StageSolution {
            u: rhs_u.to_vec(),
            r: rhs_r.to_vec(),
            f,
            g,
            iterations: 0,
            residual: 0.0,
        });
    }

    let beta = params.beta;
    let mut u = guess.0.to_vec();
    let mut r = guess.1.to_vec();
    let mut iterations = 0;
    let mut increment = f64::INFINITY;

    while iterations < cfg.max_iters {
        iterations += 1;
        let (u_next, f) = if cfg.linearized {
            let shifted: Vec<Complex64> = rhs_u
                .iter()
                .zip(&u)
                .zip(&r)
                .map(|((b, uj), rj)| b + Complex64::new(0.0, tau * beta * rj) * uj)
                .collect();
            let (u_next, lap) = solve_shifted_with_laplacian(&params.grid, tau, &shifted)?;
            let f: Vec<Complex64> = lap
                .iter()
                .zip(&u_next)
                .zip(&r)
                .map(|((l, uj), rj)| {
                    let w = l + uj * (beta * rj);
                    Complex64::new(-w.im, w.re)
                })
                .collect();
            (u_next, f)
        } else {
            let f_old = rhs_f(params, &u, &r)?;
            let u_next: Vec<Complex64> = rhs_u.iter().zip(&f_old).map(|(b, fj)| b + fj * tau).collect();
            (u_next, f_old)
        };
        // The plain sweep pairs R⁺ with the previous iterate, like its f.
        let g = if cfg.linearized { rhs_g(&u_next, &f)? } else { rhs_g(&u, &f)? };
        let r_next: Vec<f64> = rhs_r.iter().zip(&g).map(|(b, gj)| b + tau * gj).collect();

        increment = max_diff_c(&u_next, &u).max(max_diff_r(&r_next, &r));
        u = u_next;
        r = r_next;
        if !increment.is_finite() {
            return Err(Error::Divergence { stage, iteration: iterations });
        }
        if increment <= abs_tol {
            break;
        }
    }
    if increment > abs_tol {
        return Err(Error::StageSolver { stage, iterations, increment });
    }

    let f: Vec<Complex64> = u.iter().zip(rhs_u).map(|(x, b)| (x - b) / tau).collect();
    let g: Vec<f64> = r.iter().zip(rhs_r).map(|(x, b)| (x - b) / tau).collect();

    let f_eval = rhs_f(params, &u, &r)?;
    let g_eval = rhs_g(&u, &f)?;
    let residual = tau.abs() * max_diff_c(&f, &f_eval).max(max_diff_r(&g, &g_eval));

    Ok(StageSolution { u, r, f, g, iterations, residual })
}

/// Stage values of one step, kept for inspection.
#[derive(Clone, Debug)]
pub struct StepStages {
    pub u: Vec<Vec<Complex64>>,
    pub r: Vec<Vec<f64>>,
    pub f: Vec<Vec<Complex64>>,
    pub g: Vec<Vec<f64>>,
}

/// Advances `state` by `dt`.
pub fn step<G: SpectralGrid>(
    state: &IeqState,
    dt: f64,
    tableau: &Tableau,
    params: &NlsParams<G>,
    cfg: &SolverConfig,
) -> Result<(IeqState, StepReport)> {
    step_with_stages(state, dt, tableau, params, cfg).map(|(s, rep, _)| (s, rep))
}

/// [`step`], also returning all stage values.
pub fn step_with_stages<G: SpectralGrid>(
    state: &IeqState,
    dt: f64,
    tableau: &Tableau,
    params: &NlsParams<G>,
    cfg: &SolverConfig,
) -> Result<(IeqState, StepReport, StepStages)> {
    cfg.validate()?;
    if dt == 0.0 || !dt.is_finite() {
        return Err(Error::Config(format!("time step {dt} must be finite and non-zero")));
    }
    let defect = conservative_defect(tableau);
    if defect > CONSERVATIVE_DEFECT_LIMIT && !cfg.allow_nonconservative {
        return Err(Error::Tableau(format!(
            "`{}` is not conservative (defect {defect:.3e}); enable allow_nonconservative to use it",
            tableau.name()
        )));
    }
    let n = params.grid.len();
    check_len(n, state.u.len())?;
    check_len(n, state.r.len())?;

    let s = tableau.stages();
    let abs_tol = cfg.absolute_tol(state.max_abs_u());
    let mut stages = StepStages {
        u: Vec::with_capacity(s),
        r: Vec::with_capacity(s),
        f: Vec::with_capacity(s),
        g: Vec::with_capacity(s),
    };
    let mut report = StepReport {
        stage_iterations: Vec::with_capacity(s),
        max_residual: 0.0,
    };

    for i in 0..s {
        let mut rhs_u = state.u.clone();
        let mut rhs_r = state.r.clone();
        for j in 0..i {
            let w = dt * tableau.a(i, j);
            if w == 0.0 {
                continue;
            }
            for (acc, fj) in rhs_u.iter_mut().zip(&stages.f[j]) {
                *acc += fj * w;
            }
            for (acc, gj) in rhs_r.iter_mut().zip(&stages.g[j]) {
                *acc += gj * w;
            }
        }
        let guess = if i == 0 {
            (state.u.as_slice(), state.r.as_slice())
        } else {
            (stages.u[i - 1].as_slice(), stages.r[i - 1].as_slice())
        };
        let problem = StageProblem {
            stage: i + 1,
            tau: dt * tableau.a(i, i),
            rhs_u: &rhs_u,
            rhs_r: &rhs_r,
        };
        let sol = solve_stage(problem, params, cfg, abs_tol, guess)?;
        report.stage_iterations.push(sol.iterations);
        report.max_residual = report.max_residual.max(sol.residual);
        stages.u.push(sol.u);
        stages.r.push(sol.r);
        stages.f.push(sol.f);
        stages.g.push(sol.g);
    }

    let (u, r) = combine_stages(state, dt, tableau.b(), &stages);
    let next = IeqState { u, r, t: state.t + dt };
    Ok((next, report, stages))
}

/// `u^n + dt·Σ b_i f_i` and `r^n + dt·Σ b_i g_i`.
pub fn combine_stages(state: &IeqState, dt: f64, b: &[f64], stages: &StepStages) -> (Vec<Complex64>, Vec<f64>) {
    let n = state.u.len();
    let mut du = vec![Complex64::default(); n];
    let mut dr = vec![0.0; n];
    for (bi, (fi, gi)) in b.iter().zip(stages.f.iter().zip(&stages.g)) {
        for (acc, x) in du.iter_mut().zip(fi) {
            *acc += x * bi;
        }
        for (acc, x) in dr.iter_mut().zip(gi) {
            *acc += x * bi;
        }
    }
    let u = state.u.iter().zip(&du).map(|(a, d)| a + d * dt).collect();
    let r = state.r.iter().zip(&dr).map(|(a, d)| a + d * dt).collect();
    (u, r)
}

/// Number of steps of size `dt` from `t0` to `t_end`; rejects partial steps.
pub fn step_count(t0: f64, t_end: f64, dt: f64) -> Result<usize> {
    if dt <= 0.0 || !dt.is_finite() {
        return Err(Error::Config(format!("time step {dt} must be positive")));
    }
    if !(t_end.is_finite() && t0.is_finite()) || t_end < t0 {
        return Err(Error::Config(format!("end time {t_end} precedes start time {t0}")));
    }
    let ratio = (t_end - t0) / dt;
    let steps = ratio.round();
    if (ratio - steps).abs() > 1e-9 * ratio.max(1.0) {
        return Err(Error::Config(format!(
            "interval {} is not an integer multiple of dt = {dt}",
            t_end - t0
        )));
    }
    Ok(steps as usize)
}

/// Integrates from `state0.t` to `t_end` with fixed step `dt`.
///
/// `observer` is called after every accepted step with the step number
/// (starting at 1), the new state, its invariants relative to `state0`, and
/// the solver report.
#[allow(clippy::too_many_arguments)]
pub fn integrate<G, O>(
    state0: IeqState,
    t_end: f64,
    dt: f64,
    tableau: &Tableau,
    params: &NlsParams<G>,
    cfg: &SolverConfig,
    mut observer: O,
) -> Result<IeqState>
where
    G: SpectralGrid,
    O: FnMut(usize, &IeqState, &InvariantRecord, &StepReport),
{
    let steps = step_count(state0.t, t_end, dt)?;
    if steps == 0 {
        return Ok(state0);
    }
    let t0 = state0.t;
    let reference = InvariantRecord::initial(&state0, params)?;
    let mut state = state0;
    for k in 1..=steps {
        let (mut next, report) =
            step(&state, dt, tableau, params, cfg).map_err(|e| Error::Step { step: k, source: Box::new(e) })?;
        next.t = if k == steps { t_end } else { t0 + k as f64 * dt };
        let record = record_invariants(&next, params, &reference)?;
        observer(k, &next, &record, &report);
        state = next;
    }
    Ok(state)
}
