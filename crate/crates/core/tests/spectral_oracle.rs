mod common;

use std::f64::consts::PI;

use common::{dense_d2, dense_laplacian_2d, matvec, max_abs, max_diff, random_field, rng};
use ieq_nls::spectral::{apply_d1, apply_d1sq, apply_d1sq_2d, dense_d1, Grid1D, Grid2D};

const SIZES: [usize; 5] = [4, 8, 16, 32, 64];

#[test]
fn transform_d1_matches_cotangent_matrix() {
    let mut rng = rng(11);
    for (a, b) in [(0.0, 2.0 * PI), (-20.0, 20.0), (-1.5, 0.25)] {
        for n in SIZES {
            let g = Grid1D::new(a, b, n).unwrap();
            let v = random_field(&mut rng, n, 1.0);
            let dense = matvec(&dense_d1(&g), &v);
            let fft = apply_d1(&g, &v).unwrap();
            assert!(max_diff(&dense, &fft) <= 1e-12 * max_abs(&dense).max(1.0), "n = {n} on [{a}, {b}]");
        }
    }
}

#[test]
fn transform_d2_is_square_of_dense_d1() {
    let mut rng = rng(12);
    for (a, b) in [(0.0, 2.0 * PI), (-20.0, 20.0)] {
        for n in SIZES {
            let g = Grid1D::new(a, b, n).unwrap();
            let v = random_field(&mut rng, n, 1.0);
            let dense = matvec(&dense_d2(&g), &v);
            let fft = apply_d1sq(&g, &v).unwrap();
            assert!(max_diff(&dense, &fft) <= 1e-12 * max_abs(&dense).max(1.0), "n = {n}");
        }
    }
}

#[test]
fn transform_laplacian_2d_matches_dense() {
    let mut rng = rng(13);
    for n in SIZES {
        let g = Grid2D::square(0.0, 2.0 * PI, n).unwrap();
        let v = random_field(&mut rng, n * n, 1.0);
        let dense = dense_laplacian_2d(&dense_d2(g.gx()), &v);
        let fft = apply_d1sq_2d(&g, &v).unwrap();
        assert!(max_diff(&dense, &fft) <= 1e-12 * max_abs(&dense).max(1.0), "n = {n}");
    }
}

#[test]
fn nyquist_mode_has_zero_first_derivative() {
    for n in SIZES {
        let g = Grid1D::new(0.0, 2.0 * PI, n).unwrap();
        let alt: Vec<_> = (0..n).map(|j| num_complex::Complex64::new(if j % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).collect();
        assert!(max_abs(&apply_d1(&g, &alt).unwrap()) < 1e-12);
        assert!(max_abs(&matvec(&dense_d1(&g), &alt)) < 1e-12);
        // zero multiplier at Nyquist, so D₁² annihilates it too
        assert!(max_abs(&apply_d1sq(&g, &alt).unwrap()) < 1e-12);
    }
}
