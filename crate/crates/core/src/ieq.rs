//! The quadratized NLS system `u_t = f(u, r)`, `r_t = g(u, r)` with `r = |u|²`
//! as auxiliary variable, together with its discrete invariants.
//!
//! `f(u, r) = i·L u + i·β·r∘u` where `L` is the discrete Laplacian of the grid,
//! and `g = 2·Re(conj(u)∘f)`. The modified energy
//! `E(u, r) = -½‖D₁u‖² + (β/4)‖r‖²` is a quadratic form in `(u, r)`, so any
//! integrator that preserves quadratic invariants preserves it.

use num_complex::Complex64;

use crate::error::{check_len, Result};
use crate::spectral::{apply_laplacian, inner, norm_sq, norm_sq_real, SpectralGrid};

/// Wave field, auxiliary field and time.
#[derive(Clone, Debug, PartialEq)]
pub struct IeqState {
    pub u: Vec<Complex64>,
    pub r: Vec<f64>,
    pub t: f64,
}

impl IeqState {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// `max_j |u_j|`
    pub fn max_abs_u(&self) -> f64 {
        self.u.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Coupling constant and spatial grid.
#[derive(Clone, Debug)]
pub struct NlsParams<G> {
    pub beta: f64,
    pub grid: G,
}

impl<G: SpectralGrid> NlsParams<G> {
    pub fn new(beta: f64, grid: G) -> Self {
        Self { beta, grid }
    }
}

/// Builds the state `(u0, |u0|², t0)`.
pub fn init_state<G: SpectralGrid>(grid: &G, u0: Vec<Complex64>, t0: f64) -> Result<IeqState> {
    check_len(grid.len(), u0.len())?;
    let r = u0.iter().map(|z| z.norm_sqr()).collect();
    Ok(IeqState { u: u0, r, t: t0 })
}

/// `i·L u + i·β·r∘u` for raw fields.
pub fn rhs_f<G: SpectralGrid>(params: &NlsParams<G>, u: &[Complex64], r: &[f64]) -> Result<Vec<Complex64>> {
    check_len(u.len(), r.len())?;
    let mut f = apply_laplacian(&params.grid, u)?;
    for ((fj, uj), rj) in f.iter_mut().zip(u).zip(r) {
        let w = *fj + uj * (params.beta * rj);
        *fj = Complex64::new(-w.im, w.re);
    }
    Ok(f)
}

/// `2·Re(conj(u)∘f)`, evaluated in real arithmetic.
pub fn rhs_g(u: &[Complex64], f: &[Complex64]) -> Result<Vec<f64>> {
    check_len(u.len(), f.len())?;
    Ok(u.iter().zip(f).map(|(a, b)| 2.0 * (a.re * b.re + a.im * b.im)).collect())
}

pub fn f_rhs<G: SpectralGrid>(state: &IeqState, params: &NlsParams<G>) -> Result<Vec<Complex64>> {
    rhs_f(params, &state.u, &state.r)
}

pub fn g_rhs(state: &IeqState, f: &[Complex64]) -> Result<Vec<f64>> {
    rhs_g(&state.u, f)
}

/// Discrete mass `‖u‖²`.
pub fn mass<G: SpectralGrid>(state: &IeqState, params: &NlsParams<G>) -> Result<f64> {
    norm_sq(&params.grid, &state.u)
}

/// `-½(‖D₁u‖² [+ ‖uD₁ᵀ‖²])`, computed as `½·Re(Lu, u)` since `D₁` is skew.
pub fn kinetic_term<G: SpectralGrid>(params: &NlsParams<G>, u: &[Complex64]) -> Result<f64> {
    let lu = apply_laplacian(&params.grid, u)?;
    Ok(0.5 * inner(&params.grid, &lu, u)?.re)
}

/// Quadratized energy `-½‖D₁u‖² + (β/4)‖r‖²` using the stored `r`.
pub fn energy_modified<G: SpectralGrid>(state: &IeqState, params: &NlsParams<G>) -> Result<f64> {
    check_len(state.u.len(), state.r.len())?;
    let kinetic = kinetic_term(params, &state.u)?;
    Ok(kinetic + 0.25 * params.beta * norm_sq_real(&params.grid, &state.r)?)
}

/// Non-quadratized energy `-½‖D₁u‖² + (β/4)·Σ vol·|u_j|⁴`, from `u` alone.
pub fn energy_original<G: SpectralGrid>(state: &IeqState, params: &NlsParams<G>) -> Result<f64> {
    let kinetic = kinetic_term(params, &state.u)?;
    let quartic: f64 = state.u.iter().map(|z| z.norm_sqr().powi(2)).sum();
    Ok(kinetic + 0.25 * params.beta * params.grid.cell_volume() * quartic)
}

/// `|½·Re(fᵀ L ū) + (β/4)·gᵀ r|` with `f = f(u, r)` and `g = g(u, f)`.
///
/// Vanishes for every complex `u` and every real `r`; this is the pointwise
/// statement that the modified energy is an invariant of the semi-discrete flow.
pub fn lemma1_defect<G: SpectralGrid>(u: &[Complex64], r: &[f64], params: &NlsParams<G>) -> Result<f64> {
    check_len(params.grid.len(), u.len())?;
    let f = rhs_f(params, u, r)?;
    let g = rhs_g(u, &f)?;
    // L is real, so L ū = conj(L u).
    let lu = apply_laplacian(&params.grid, u)?;
    let first: f64 = f.iter().zip(&lu).map(|(a, b)| (a * b.conj()).re).sum();
    let second: f64 = g.iter().zip(r).map(|(a, b)| a * b).sum();
    Ok((0.5 * first + 0.25 * params.beta * second).abs())
}
