//! Initial data and exact solutions of the benchmark problems.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{Grid1D, Grid2D};

/// Problem definition with its default discretization.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: &'static str,
    pub beta: f64,
    /// `[a, b]` in 1D, `[a, b]²` in 2D.
    pub domain: (f64, f64),
    pub dims: usize,
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    /// Whether [`Scenario::exact_1d`] returns a closed form.
    pub has_exact: bool,
    /// Domain for short-time convergence studies against the exact solution.
    ///
    /// `[-22, 22]` minimizes the semi-discrete error at 256 nodes: shorter
    /// domains see the periodized sech tails, longer ones under-resolve the
    /// carrier wave.
    pub study_domain: Option<(f64, f64)>,
}

pub const SCENARIO_NAMES: [&str; 3] = ["soliton", "longtime", "blowup2d"];

/// Travelling soliton `sech(x - 4t)·exp(i(2x - 3t))`, `β = 2`.
pub const SOLITON: Scenario = Scenario {
    name: "soliton",
    beta: 2.0,
    domain: (-20.0, 60.0),
    dims: 1,
    n: 256,
    dt: 0.01,
    t_end: 3.0,
    has_exact: true,
    study_domain: Some((-22.0, 22.0)),
};

/// Slow soliton started at `x = 25`, wrapping around `[0, 50]`.
pub const LONGTIME: Scenario = Scenario {
    name: "longtime",
    beta: 2.0,
    domain: (0.0, 50.0),
    dims: 1,
    n: 256,
    dt: 0.01,
    t_end: 1000.0,
    has_exact: false,
    study_domain: None,
};

/// Focusing 2D data `(1 + sin x)(2 + sin y)` that concentrates near `t = 0.108`.
pub const BLOWUP2D: Scenario = Scenario {
    name: "blowup2d",
    beta: 1.0,
    domain: (0.0, 2.0 * PI),
    dims: 2,
    n: 128,
    dt: 1e-4,
    t_end: 0.108,
    has_exact: false,
    study_domain: None,
};

impl Scenario {
    pub fn by_name(name: &str) -> Result<Scenario> {
        match name {
            "soliton" => Ok(SOLITON),
            "longtime" => Ok(LONGTIME),
            "blowup2d" => Ok(BLOWUP2D),
            other => Err(Error::UnknownScenario(other.to_string())),
        }
    }

    pub fn initial_1d(&self, grid: &Grid1D) -> Result<Vec<Complex64>> {
        match self.name {
            "soliton" => Ok(soliton_exact(grid, 0.0)),
            "longtime" => longtime_init(grid),
            _ => Err(Error::Config(format!("scenario `{}` is not one-dimensional", self.name))),
        }
    }

    pub fn initial_2d(&self, grid: &Grid2D) -> Result<Vec<Complex64>> {
        match self.name {
            "blowup2d" => blowup2d_init(grid),
            _ => Err(Error::Config(format!("scenario `{}` is not two-dimensional", self.name))),
        }
    }

    pub fn exact_1d(&self, grid: &Grid1D, t: f64) -> Option<Vec<Complex64>> {
        match self.name {
            "soliton" => Some(soliton_exact(grid, t)),
            _ => None,
        }
    }
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

/// `sech(x - 4t)·exp(i(2x - 3t))` sampled at the grid nodes.
pub fn soliton_exact(grid: &Grid1D, t: f64) -> Vec<Complex64> {
    grid.nodes()
        .iter()
        .map(|&x| Complex64::from_polar(sech(x - 4.0 * t), 2.0 * x - 3.0 * t))
        .collect()
}

/// `(1/√2)·sech((x - 25)/√2)·exp(-i·x/20)`
pub fn longtime_init(grid: &Grid1D) -> Result<Vec<Complex64>> {
    if !(grid.a() <= 25.0 && 25.0 < grid.b()) {
        return Err(Error::Config(format!(
            "long-time soliton starts at x = 25, outside [{}, {}]",
            grid.a(),
            grid.b()
        )));
    }
    Ok(grid
        .nodes()
        .iter()
        .map(|&x| Complex64::from_polar(FRAC_1_SQRT_2 * sech(FRAC_1_SQRT_2 * (x - 25.0)), -x / 20.0))
        .collect())
}

/// `(1 + sin x)(2 + sin y)` on `[0, 2π]²`, row-major.
pub fn blowup2d_init(grid: &Grid2D) -> Result<Vec<Complex64>> {
    for g in [grid.gx(), grid.gy()] {
        if g.a() != 0.0 || (g.b() - 2.0 * PI).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "2D blow-up data is defined on [0, 2π]², got axis [{}, {}]",
                g.a(),
                g.b()
            )));
        }
    }
    let mut u = Vec::with_capacity(grid.gx().n() * grid.gy().n());
    for &x in grid.gx().nodes() {
        for &y in grid.gy().nodes() {
            u.push(Complex64::new((1.0 + x.sin()) * (2.0 + y.sin()), 0.0));
        }
    }
    Ok(u)
}
