//! Periodic uniform grids and Fourier pseudospectral differentiation.
//!
//! Differentiation is applied by forward transform, multiplication by the
//! spectral multiplier and inverse transform. The odd-derivative multiplier
//! of the Nyquist mode is zero, so the transform operator coincides with the
//! dense cotangent matrix returned by [`dense_d1`], and the second derivative
//! is the square of that operator (multiplier `-κ²`, zero at Nyquist).
//!
//! 2D fields are stored row-major: node `(j, k)` (x index `j`, y index `k`)
//! lives at flat index `j * n + k`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{check_len, Error, Result};

/// Common interface of the 1D and 2D periodic grids.
///
/// The spectral layout used by [`SpectralGrid::forward`] is private to each
/// grid; [`SpectralGrid::laplacian_symbol`] is given in that same layout.
pub trait SpectralGrid: Send + Sync {
    /// Total number of nodes.
    fn len(&self) -> usize;

    /// Node counts per axis.
    fn shape(&self) -> &[usize];

    /// Quadrature weight of a single node: `h` in 1D, `hx * hy` in 2D.
    fn cell_volume(&self) -> f64;

    /// Coordinate of node `index` along `axis`.
    fn coordinate(&self, axis: usize, index: usize) -> f64;

    /// Multiplier of the discrete Laplacian, `-(κx² + κy²)`, in spectral layout.
    fn laplacian_symbol(&self) -> &[f64];

    /// Unnormalized forward DFT, in place.
    fn forward(&self, data: &mut [Complex64]);

    /// Inverse DFT including the `1/len` normalization, in place.
    fn inverse(&self, data: &mut [Complex64]);

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Multiplies `v` in spectral space by `multiplier(symbol_k)` for each mode.
pub fn apply_symbol_fn<G, F>(grid: &G, v: &[Complex64], multiplier: F) -> Result<Vec<Complex64>>
where
    G: SpectralGrid + ?Sized,
    F: Fn(f64) -> Complex64,
{
    check_len(grid.len(), v.len())?;
    let mut work = v.to_vec();
    grid.forward(&mut work);
    for (w, &s) in work.iter_mut().zip(grid.laplacian_symbol()) {
        *w *= multiplier(s);
    }
    grid.inverse(&mut work);
    Ok(work)
}

/// Discrete Laplacian: `D₁²v` in 1D, `D₁²V + V(D₁²)ᵀ` in 2D.
pub fn apply_laplacian<G: SpectralGrid + ?Sized>(grid: &G, v: &[Complex64]) -> Result<Vec<Complex64>> {
    apply_symbol_fn(grid, v, |s| Complex64::new(s, 0.0))
}

/// Solves `(I - i·tau·L) x = rhs` exactly in Fourier space, `L` the discrete Laplacian.
pub fn solve_shifted<G: SpectralGrid + ?Sized>(
    grid: &G,
    tau: f64,
    rhs: &[Complex64],
) -> Result<Vec<Complex64>> {
    apply_symbol_fn(grid, rhs, |s| Complex64::new(1.0, -tau * s).inv())
}

/// Same as [`solve_shifted`], also returning `L x` from the same forward transform.
pub fn solve_shifted_with_laplacian<G: SpectralGrid + ?Sized>(
    grid: &G,
    tau: f64,
    rhs: &[Complex64],
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    check_len(grid.len(), rhs.len())?;
    let mut x = rhs.to_vec();
    grid.forward(&mut x);
    let mut lx = x.clone();
    for ((xk, lk), &s) in x.iter_mut().zip(lx.iter_mut()).zip(grid.laplacian_symbol()) {
        *xk /= Complex64::new(1.0, -tau * s);
        *lk = *xk * s;
    }
    grid.inverse(&mut x);
    grid.inverse(&mut lx);
    Ok((x, lx))
}

/// Grid-weighted inner product `cell_volume · Σ u_i conj(v_i)`.
pub fn inner<G: SpectralGrid + ?Sized>(grid: &G, u: &[Complex64], v: &[Complex64]) -> Result<Complex64> {
    check_len(grid.len(), u.len())?;
    check_len(grid.len(), v.len())?;
    let sum: Complex64 = u.iter().zip(v).map(|(a, b)| a * b.conj()).sum();
    Ok(sum * grid.cell_volume())
}

/// Grid-weighted squared norm of a complex field.
pub fn norm_sq<G: SpectralGrid + ?Sized>(grid: &G, u: &[Complex64]) -> Result<f64> {
    check_len(grid.len(), u.len())?;
    Ok(grid.cell_volume() * u.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

/// Grid-weighted squared norm of a real field.
pub fn norm_sq_real<G: SpectralGrid + ?Sized>(grid: &G, r: &[f64]) -> Result<f64> {
    check_len(grid.len(), r.len())?;
    Ok(grid.cell_volume() * r.iter().map(|x| x * x).sum::<f64>())
}

fn validate_axis(a: f64, b: f64, n: usize) -> Result<()> {
    if !(a.is_finite() && b.is_finite()) || b <= a {
        return Err(Error::Config(format!("domain [{a}, {b}] must satisfy a < b")));
    }
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::Config(format!("node count {n} must be even and >= 4")));
    }
    Ok(())
}

/// Wavenumbers `μ·k` in FFT storage order; the Nyquist entry is zero.
fn fft_wavenumbers(n: usize, mu: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let k = k as i64;
            let n = n as i64;
            let signed = if k < n / 2 {
                k
            } else if k == n / 2 {
                0
            } else {
                k - n
            };
            mu * signed as f64
        })
        .collect()
}

/// Uniform periodic grid on `[a, b)` with an even number of nodes.
#[derive(Clone)]
pub struct Grid1D {
    a: f64,
    b: f64,
    n: usize,
    h: f64,
    mu: f64,
    shape: [usize; 1],
    nodes: Vec<f64>,
    wavenumbers: Vec<f64>,
    symbol: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid1D")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("n", &self.n)
            .field("h", &self.h)
            .finish()
    }
}

impl Grid1D {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        validate_axis(a, b, n)?;
        let length = b - a;
        let h = length / n as f64;
        let mu = 2.0 * PI / length;
        let nodes = (0..n).map(|j| a + j as f64 * h).collect();
        let wavenumbers = fft_wavenumbers(n, mu);
        let symbol = wavenumbers.iter().map(|k| -k * k).collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            a,
            b,
            n,
            h,
            mu,
            shape: [n],
            nodes,
            wavenumbers,
            symbol,
            fft: planner.plan_fft_forward(n),
            ifft: planner.plan_fft_inverse(n),
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Fundamental wavenumber `2π / (b - a)`.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    /// Node coordinates `a + j·h`, `j = 0..n` (the endpoint `b` is identified with `a`).
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// First-derivative multipliers in FFT storage order (Nyquist entry zero).
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    fn transform(&self, plan: &Arc<dyn Fft<f64>>, data: &mut [Complex64]) {
        plan.process(data);
    }
}

/// Shorthand for [`Grid1D::new`].
pub fn build_grid_1d(a: f64, b: f64, n: usize) -> Result<Grid1D> {
    Grid1D::new(a, b, n)
}

impl SpectralGrid for Grid1D {
    fn len(&self) -> usize {
        self.n
    }

    fn shape(&self) -> &[usize] {
        &self.shape
    }

    fn cell_volume(&self) -> f64 {
        self.h
    }

    fn coordinate(&self, _axis: usize, index: usize) -> f64 {
        self.nodes[index]
    }

    fn laplacian_symbol(&self) -> &[f64] {
        &self.symbol
    }

    fn forward(&self, data: &mut [Complex64]) {
        self.transform(&self.fft, data);
    }

    fn inverse(&self, data: &mut [Complex64]) {
        self.transform(&self.ifft, data);
        let scale = 1.0 / self.n as f64;
        data.iter_mut().for_each(|z| *z *= scale);
    }
}

/// Tensor-product periodic grid with equal node counts on both axes.
#[derive(Clone, Debug)]
pub struct Grid2D {
    gx: Grid1D,
    gy: Grid1D,
    shape: [usize; 2],
    /// Laplacian multiplier in spectral layout (y-frequency major).
    symbol: Vec<f64>,
}

impl Grid2D {
    pub fn new(gx: Grid1D, gy: Grid1D) -> Result<Self> {
        if gx.n() != gy.n() {
            return Err(Error::Config(format!(
                "2D grids need equal node counts per axis, got {} and {}",
                gx.n(),
                gy.n()
            )));
        }
        let n = gx.n();
        let mut symbol = Vec::with_capacity(n * n);
        for ky in gy.wavenumbers() {
            for kx in gx.wavenumbers() {
                symbol.push(-(kx * kx + ky * ky));
            }
        }
        Ok(Self {
            shape: [n, n],
            gx,
            gy,
            symbol,
        })
    }

    /// Square grid `[a, b]²` with `n` nodes per axis.
    pub fn square(a: f64, b: f64, n: usize) -> Result<Self> {
        Self::new(Grid1D::new(a, b, n)?, Grid1D::new(a, b, n)?)
    }

    pub fn gx(&self) -> &Grid1D {
        &self.gx
    }

    pub fn gy(&self) -> &Grid1D {
        &self.gy
    }

    /// Nodes per axis.
    pub fn n(&self) -> usize {
        self.gx.n()
    }

    /// Forward transform along contiguous rows followed by a transpose.
    fn rows_then_transpose(&self, plan: &Arc<dyn Fft<f64>>, data: &mut [Complex64]) {
        let n = self.n();
        plan.process(data);
        let mut tmp = vec![Complex64::default(); data.len()];
        transpose_square(data, &mut tmp, n);
        data.copy_from_slice(&tmp);
    }
}

fn transpose_square(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    for j in 0..n {
        for k in 0..n {
            dst[k * n + j] = src[j * n + k];
        }
    }
}

impl SpectralGrid for Grid2D {
    fn len(&self) -> usize {
        self.shape[0] * self.shape[1]
    }

    fn shape(&self) -> &[usize] {
        &self.shape
    }

    fn cell_volume(&self) -> f64 {
        self.gx.h() * self.gy.h()
    }

    fn coordinate(&self, axis: usize, index: usize) -> f64 {
        match axis {
            0 => self.gx.nodes()[index],
            _ => self.gy.nodes()[index],
        }
    }

    fn laplacian_symbol(&self) -> &[f64] {
        &self.symbol
    }

    fn forward(&self, data: &mut [Complex64]) {
        // y-transform on rows, transpose, x-transform on rows
        self.rows_then_transpose(&self.gy.fft, data);
        self.gx.fft.process(data);
    }

    fn inverse(&self, data: &mut [Complex64]) {
        self.rows_then_transpose(&self.gx.ifft, data);
        self.gy.ifft.process(data);
        let scale = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|z| *z *= scale);
    }
}

/// Dense Fourier differentiation matrix built from the cotangent formula.
///
/// Entry `(j, l)` is `½(-1)^{j+l} μ cot(μ(x_j - x_l)/2)` off the diagonal and zero
/// on it. The lower triangle is filled by negation, so the result is exactly
/// skew-symmetric. Intended for small oracle checks; it is `O(N²)` in memory.
pub fn dense_d1(grid: &Grid1D) -> DMatrix<f64> {
    let n = grid.n();
    let mu = grid.mu();
    let mut d = DMatrix::zeros(n, n);
    for j in 0..n {
        for l in (j + 1)..n {
            // μ(x_j - x_l)/2 = π(j - l)/N
            let half_angle = PI * (j as f64 - l as f64) / n as f64;
            let sign = if (j + l) % 2 == 0 { 1.0 } else { -1.0 };
            let entry = 0.5 * sign * mu / half_angle.tan();
            d[(j, l)] = entry;
            d[(l, j)] = -entry;
        }
    }
    d
}

/// First derivative `D₁v` through the transform (Nyquist multiplier zero).
pub fn apply_d1(grid: &Grid1D, v: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(grid.n(), v.len())?;
    let mut work = v.to_vec();
    grid.forward(&mut work);
    for (w, &k) in work.iter_mut().zip(grid.wavenumbers()) {
        *w *= Complex64::new(0.0, k);
    }
    grid.inverse(&mut work);
    Ok(work)
}

/// Second derivative `D₁²v` with multiplier `-κ²`.
pub fn apply_d1sq(grid: &Grid1D, v: &[Complex64]) -> Result<Vec<Complex64>> {
    apply_laplacian(grid, v)
}

/// `D₁²V + V(D₁²)ᵀ` on a row-major `N×N` field.
pub fn apply_d1sq_2d(grid: &Grid2D, v: &[Complex64]) -> Result<Vec<Complex64>> {
    apply_laplacian(grid, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn grid_on_two_pi_with_four_nodes() {
        let g = Grid1D::new(0.0, 2.0 * PI, 4).unwrap();
        assert_eq!(g.nodes(), &[0.0, PI / 2.0, PI, 3.0 * PI / 2.0]);
        assert_eq!(g.h(), PI / 2.0);
        assert!((g.mu() - 1.0).abs() < 1e-15);
        assert_eq!(g.wavenumbers(), &[0.0, 1.0, 0.0, -1.0]);
    }

    #[test]
    fn soliton_grid_spacing() {
        let g = Grid1D::new(-20.0, 20.0, 256).unwrap();
        assert_eq!(g.h(), 40.0 / 256.0);
        assert!((g.mu() - PI / 20.0).abs() < 1e-16);
        assert!((g.h() * 256.0 - 40.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(Grid1D::new(0.0, 2.0 * PI, 3), Err(Error::Config(_))));
        assert!(matches!(Grid1D::new(0.0, 1.0, 2), Err(Error::Config(_))));
        assert!(matches!(Grid1D::new(1.0, 1.0, 8), Err(Error::Config(_))));
        assert!(matches!(Grid1D::new(2.0, 1.0, 8), Err(Error::Config(_))));
        let gx = Grid1D::new(0.0, 1.0, 8).unwrap();
        let gy = Grid1D::new(0.0, 1.0, 16).unwrap();
        assert!(Grid2D::new(gx, gy).is_err());
    }

    #[test]
    fn wavenumbers_antisymmetric_with_zero_nyquist() {
        let g = Grid1D::new(-3.0, 5.0, 16).unwrap();
        let k = g.wavenumbers();
        assert_eq!(k[8], 0.0);
        for j in 1..8 {
            assert_eq!(k[j], -k[16 - j]);
        }
    }

    #[test]
    fn dense_d1_hand_entry_and_diagonal() {
        let g = Grid1D::new(0.0, 2.0 * PI, 4).unwrap();
        let d = dense_d1(&g);
        assert!((d[(0, 1)] - 0.5).abs() < 1e-15);
        for j in 0..4 {
            assert_eq!(d[(j, j)], 0.0);
        }
    }

    #[test]
    fn dense_d1_is_exactly_skew() {
        for n in [4, 6, 8, 16, 32, 64] {
            let g = Grid1D::new(-1.3, 2.9, n).unwrap();
            let d = dense_d1(&g);
            let s = &d + d.transpose();
            assert_eq!(s.amax(), 0.0);
        }
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let g = Grid1D::new(0.0, 2.0 * PI, 16).unwrap();
        let v = vec![c(3.0, -1.0); 16];
        assert!(apply_d1(&g, &v).unwrap().iter().all(|z| z.norm() < 1e-14));
        assert!(apply_d1sq(&g, &v).unwrap().iter().all(|z| z.norm() < 1e-14));
        let g2 = Grid2D::square(0.0, 2.0 * PI, 8).unwrap();
        let v2 = vec![c(2.0, 0.5); 64];
        assert!(apply_d1sq_2d(&g2, &v2).unwrap().iter().all(|z| z.norm() < 1e-13));
    }

    #[test]
    fn plane_wave_derivatives() {
        let g = Grid1D::new(-20.0, 20.0, 64).unwrap();
        let mu = g.mu();
        let v: Vec<_> = g.nodes().iter().map(|&x| Complex64::from_polar(1.0, mu * x)).collect();
        let d1 = apply_d1(&g, &v).unwrap();
        let want: Vec<_> = v.iter().map(|z| z * c(0.0, mu)).collect();
        assert!(max_abs_diff(&d1, &want) < 1e-14);
        let d2 = apply_d1sq(&g, &v).unwrap();
        let want2: Vec<_> = v.iter().map(|z| z * (-mu * mu)).collect();
        assert!(max_abs_diff(&d2, &want2) < 1e-14);
        let twice = apply_d1(&g, &d1).unwrap();
        assert!(max_abs_diff(&d2, &twice) < 1e-14);
    }

    #[test]
    fn plane_wave_2d() {
        let g = Grid2D::square(0.0, 2.0 * PI, 8).unwrap();
        let mu = g.gx().mu();
        let mut v = Vec::new();
        for &x in g.gx().nodes() {
            for &y in g.gy().nodes() {
                v.push(Complex64::from_polar(1.0, mu * (x + y)));
            }
        }
        let lap = apply_d1sq_2d(&g, &v).unwrap();
        let want: Vec<_> = v.iter().map(|z| z * (-2.0 * mu * mu)).collect();
        assert!(max_abs_diff(&lap, &want) < 1e-13);
    }

    #[test]
    fn anisotropic_2d_mode() {
        // Only x varies: the operator must act on the first index.
        let g = Grid2D::square(0.0, 2.0 * PI, 8).unwrap();
        let mut v = Vec::new();
        for &x in g.gx().nodes() {
            for _ in g.gy().nodes() {
                v.push(Complex64::from_polar(1.0, 2.0 * x));
            }
        }
        let lap = apply_d1sq_2d(&g, &v).unwrap();
        let want: Vec<_> = v.iter().map(|z| z * -4.0).collect();
        assert!(max_abs_diff(&lap, &want) < 1e-13);
    }

    #[test]
    fn inner_products() {
        let g = Grid1D::new(0.0, 2.0 * PI, 8).unwrap();
        let ones = vec![c(1.0, 0.0); 8];
        let ip = inner(&g, &ones, &ones).unwrap();
        assert!((ip.re - 2.0 * PI).abs() < 1e-14 && ip.im == 0.0);
        let e1: Vec<_> = g.nodes().iter().map(|&x| Complex64::from_polar(1.0, x)).collect();
        let e3: Vec<_> = g.nodes().iter().map(|&x| Complex64::from_polar(1.0, 3.0 * x)).collect();
        assert!(inner(&g, &e1, &e3).unwrap().norm() < 1e-14);
    }

    #[test]
    fn shifted_solve_inverts_operator() {
        let g = Grid1D::new(0.0, 2.0 * PI, 32).unwrap();
        let rhs: Vec<_> = (0..32).map(|j| c((j as f64).sin(), (j as f64 * 0.3).cos())).collect();
        let tau = -0.37;
        let x = solve_shifted(&g, tau, &rhs).unwrap();
        let lx = apply_laplacian(&g, &x).unwrap();
        let back: Vec<_> = x.iter().zip(&lx).map(|(a, b)| a - c(0.0, tau) * b).collect();
        assert!(max_abs_diff(&back, &rhs) < 1e-12);
    }

    #[test]
    fn length_mismatch_is_dimension_error() {
        let g = Grid1D::new(0.0, 1.0, 8).unwrap();
        let v = vec![c(0.0, 0.0); 7];
        assert!(matches!(apply_d1(&g, &v), Err(Error::Dimension { expected: 8, got: 7 })));
        assert!(matches!(apply_d1sq(&g, &v), Err(Error::Dimension { .. })));
        assert!(inner(&g, &v, &v).is_err());
    }
}
