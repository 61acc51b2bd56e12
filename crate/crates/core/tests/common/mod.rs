//! Shared test helpers: an independent weighted-refit implementation of the
//! regularized two-view problem, used to finite-difference the influence
//! functions.
#![allow(dead_code)]

use kcca_influence::eigsolve;
use kcca_influence::kernels::{self, KernelSpec};
use kcca_influence::synthdata::{self, GenConfig};
use kcca_influence::DataView;
use nalgebra::{DMatrix, DVector};

/// Raw (uncentred) Gram matrices of both views under the default kernels.
pub fn grams(x: &DataView, y: &DataView) -> (DMatrix<f64>, DMatrix<f64>) {
    let kx = KernelSpec::default().resolve(x).unwrap();
    let ky = KernelSpec::default().resolve(y).unwrap();
    (
        kernels::gram(x, &kx).unwrap().values().clone(),
        kernels::gram(y, &ky).unwrap().values().clone(),
    )
}

pub struct WeightedFit {
    pub rho: f64,
    pub gx: DVector<f64>,
    pub gy: DVector<f64>,
}

fn weighted_standardize(f: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
    let m = w.dot(f);
    let c = f.add_scalar(-m);
    let s = w.dot(&c.component_mul(&c)).sqrt();
    c / s
}

/// Top pair of the problem refitted under observation weights `w`
/// (summing to one): weighted centring `C_w = I - 1 w'`, weighted
/// covariances `n M W M`, solved on the full `2n x 2n` generalized system.
pub fn weighted_fit(kx: &DMatrix<f64>, ky: &DMatrix<f64>, w: &DVector<f64>, kappa: f64) -> WeightedFit {
    let n = w.len();
    let nf = n as f64;
    let ones = DVector::from_element(n, 1.0);
    let cw = DMatrix::identity(n, n) - &ones * w.transpose();
    let wd = DMatrix::from_diagonal(w);
    let mx = &cw * kx * cw.transpose();
    let my = &cw * ky * cw.transpose();
    let eye = DMatrix::<f64>::identity(n, n);
    let mut a = DMatrix::zeros(2 * n, 2 * n);
    let mut b = DMatrix::zeros(2 * n, 2 * n);
    let g = &mx * &wd * &my * nf;
    a.view_mut((0, n), (n, n)).copy_from(&g);
    a.view_mut((n, 0), (n, n)).copy_from(&g.transpose());
    let bx = &mx * &wd * &mx * nf + &mx * (2.0 * kappa) + &eye * (kappa * kappa);
    let by = &my * &wd * &my * nf + &my * (2.0 * kappa) + &eye * (kappa * kappa);
    b.view_mut((0, 0), (n, n)).copy_from(&bx);
    b.view_mut((n, n), (n, n)).copy_from(&by);
    let sym = |m: &DMatrix<f64>| (m + m.transpose()) * 0.5;
    let e = eigsolve::gen_eig(&sym(&a), &sym(&b)).unwrap();
    let v = e.vectors.column(0);
    let fx = &mx * v.rows(0, n);
    let fy = &my * v.rows(n, n);
    WeightedFit {
        rho: e.values[0],
        gx: weighted_standardize(&fx, w),
        gy: weighted_standardize(&fy, w),
    }
}

/// Weights `(1 - eps)/n` everywhere plus `eps` on observation `i`.
pub fn perturbed_weights(n: usize, i: usize, eps: f64) -> DVector<f64> {
    let mut w = DVector::from_element(n, (1.0 - eps) / n as f64);
    w[i] += eps;
    w
}

/// Central-difference derivative of `rho^2` along contamination at `i`.
pub fn fd_rho_sq(kx: &DMatrix<f64>, ky: &DMatrix<f64>, i: usize, eps: f64, kappa: f64) -> f64 {
    let n = kx.nrows();
    let up = weighted_fit(kx, ky, &perturbed_weights(n, i, eps), kappa).rho;
    let dn = weighted_fit(kx, ky, &perturbed_weights(n, i, -eps), kappa).rho;
    (up * up - dn * dn) / (2.0 * eps)
}

/// Central-difference derivative of both standardized variate vectors, each
/// refit sign-aligned with the unperturbed variates `base_x`.
pub fn fd_variates(
    kx: &DMatrix<f64>,
    ky: &DMatrix<f64>,
    i: usize,
    eps: f64,
    kappa: f64,
    base_x: &DVector<f64>,
) -> (DVector<f64>, DVector<f64>) {
    let n = kx.nrows();
    let fit = |e: f64| {
        let f = weighted_fit(kx, ky, &perturbed_weights(n, i, e), kappa);
        let s = f.gx.dot(base_x).signum();
        (f.gx * s, f.gy * s)
    };
    let (ux, uy) = fit(eps);
    let (dx, dy) = fit(-eps);
    ((ux - dx) / (2.0 * eps), (uy - dy) / (2.0 * eps))
}

pub fn scsd(n: usize, seed: u64, contaminated: bool) -> synthdata::Synthetic {
    synthdata::gen_scsd(&GenConfig::new(n, seed).contaminated(contaminated)).unwrap()
}

pub fn rel_err(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).norm() / b.norm()
}
