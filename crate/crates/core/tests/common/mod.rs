//! Dense-matrix and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use ieq_nls::spectral::{dense_d1, Grid1D};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_field(rng: &mut StdRng, n: usize, amp: f64) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-amp..amp), rng.gen_range(-amp..amp)))
        .collect()
}

pub fn random_real(rng: &mut StdRng, n: usize, amp: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-amp..amp)).collect()
}

pub fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Real matrix times complex vector.
pub fn matvec(m: &DMatrix<f64>, v: &[Complex64]) -> Vec<Complex64> {
    let re = m * DVector::from_iterator(v.len(), v.iter().map(|z| z.re));
    let im = m * DVector::from_iterator(v.len(), v.iter().map(|z| z.im));
    re.iter().zip(im.iter()).map(|(&a, &b)| Complex64::new(a, b)).collect()
}

pub fn dense_d2(grid: &Grid1D) -> DMatrix<f64> {
    let d = dense_d1(grid);
    &d * &d
}

/// `D₁²V + V(D₁²)ᵀ` for a row-major `n×n` field, with dense matrices.
pub fn dense_laplacian_2d(d2: &DMatrix<f64>, v: &[Complex64]) -> Vec<Complex64> {
    let n = d2.nrows();
    let part = |f: fn(&Complex64) -> f64| {
        let m = DMatrix::from_fn(n, n, |j, k| f(&v[j * n + k]));
        d2 * &m + &m * d2.transpose()
    };
    let re = part(|z| z.re);
    let im = part(|z| z.im);
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in 0..n {
            out.push(Complex64::new(re[(j, k)], im[(j, k)]));
        }
    }
    out
}

/// `i(D₂u + β r∘u)` with a dense second-derivative matrix.
pub fn dense_f(d2: &DMatrix<f64>, beta: f64, u: &[Complex64], r: &[f64]) -> Vec<Complex64> {
    matvec(d2, u)
        .iter()
        .zip(u.iter().zip(r))
        .map(|(lu, (uj, rj))| Complex64::i() * (lu + uj * (beta * rj)))
        .collect()
}

/// Residual of `U = u0 + τ f(U, R)`, `R = r0 + τ·2Re(Ū f(U, R))` in real unknowns
/// `x = (Re U, Im U, R)`.
fn stage_residual(d2: &DMatrix<f64>, beta: f64, tau: f64, u0: &[Complex64], r0: &[f64], x: &DVector<f64>) -> DVector<f64> {
    let n = u0.len();
    let u: Vec<Complex64> = (0..n).map(|j| Complex64::new(x[j], x[n + j])).collect();
    let r: Vec<f64> = (0..n).map(|j| x[2 * n + j]).collect();
    let f = dense_f(d2, beta, &u, &r);
    let mut out = DVector::zeros(3 * n);
    for j in 0..n {
        let eu = u[j] - u0[j] - f[j] * tau;
        let g = 2.0 * (u[j].conj() * f[j]).re;
        out[j] = eu.re;
        out[n + j] = eu.im;
        out[2 * n + j] = r[j] - r0[j] - tau * g;
    }
    out
}

/// Damped Newton with a central-difference Jacobian and LU solves.
pub fn newton_stage(
    d2: &DMatrix<f64>,
    beta: f64,
    tau: f64,
    u0: &[Complex64],
    r0: &[f64],
) -> (Vec<Complex64>, Vec<f64>, f64) {
    let n = u0.len();
    let m = 3 * n;
    let mut x = DVector::from_iterator(m, u0.iter().map(|z| z.re).chain(u0.iter().map(|z| z.im)).chain(r0.iter().copied()));
    let res = |x: &DVector<f64>| stage_residual(d2, beta, tau, u0, r0, x);
    let mut fx = res(&x);
    for _ in 0..100 {
        if fx.amax() < 1e-15 {
            break;
        }
        let mut jac = DMatrix::zeros(m, m);
        for k in 0..m {
            let h = 1e-6 * (1.0 + x[k].abs());
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            jac.set_column(k, &((res(&xp) - res(&xm)) / (2.0 * h)));
        }
        let dx = jac.lu().solve(&(-&fx)).expect("singular stage Jacobian");
        let mut lambda = 1.0;
        loop {
            let trial = &x + &dx * lambda;
            let ft = res(&trial);
            if ft.norm() < fx.norm() || lambda < 1e-4 {
                x = trial;
                fx = ft;
                break;
            }
            lambda *= 0.5;
        }
    }
    let u = (0..n).map(|j| Complex64::new(x[j], x[n + j])).collect();
    let r = (0..n).map(|j| x[2 * n + j]).collect();
    (u, r, fx.amax())
}
