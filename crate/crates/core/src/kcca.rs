//! Two-view kernel CCA.
//!
//! The regularized problem
//!
//! ```text
//! [ 0      M_X M_Y ] [a_X]       [ (M_X + kI)^2        0       ] [a_X]
//! [ M_Y M_X   0    ] [a_Y] = rho [       0       (M_Y + kI)^2  ] [a_Y]
//! ```
//!
//! is whitened by the block square root `diag(M_X + kI, M_Y + kI)` of its
//! right-hand side. With `R = M (M + kI)^-1` the whitened matrix is
//! `[[0, T], [T', 0]]`, `T = R_X R_Y`, whose eigenpairs are `+-s_k` with
//! vectors `(u_k, +-v_k) / sqrt 2` from the SVD of `T`. The spectrum is
//! therefore symmetric about zero by construction.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::DataView;
use crate::eigsolve::{self, EigenPairs};
use crate::error::{Error, Result};
use crate::kernels::{self, CenteredGram, Kernel, KernelSpec};
use crate::stats;

/// Regularization used throughout unless overridden.
pub const DEFAULT_KAPPA: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub struct KccaConfig {
    pub kappa: f64,
    pub kernel_x: KernelSpec,
    pub kernel_y: KernelSpec,
    pub num_components: usize,
    /// Allow `kappa = 0`, i.e. the unregularized problem whose nonzero
    /// eigenvalues are all `+-1`.
    pub degenerate_ok: bool,
}

impl Default for KccaConfig {
    fn default() -> Self {
        KccaConfig {
            kappa: DEFAULT_KAPPA,
            kernel_x: KernelSpec::default(),
            kernel_y: KernelSpec::default(),
            num_components: 1,
            degenerate_ok: false,
        }
    }
}

impl KccaConfig {
    pub fn with_kernels(kernel: KernelSpec) -> Self {
        KccaConfig {
            kernel_x: kernel,
            kernel_y: kernel,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(Error::InvalidData(format!(
                "kappa must be a nonnegative finite number, got {}",
                self.kappa
            )));
        }
        if self.kappa == 0.0 && !self.degenerate_ok {
            return Err(Error::DegenerateRegularization);
        }
        if self.num_components == 0 {
            return Err(Error::InvalidData(
                "num_components must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Every eigenpair of the whitened two-view problem, kept for the
/// canonical-variate influence (which needs the full resolvent).
#[derive(Debug, Clone)]
pub(crate) struct Spectrum {
    /// Singular values of `T`, descending.
    pub sigma: DVector<f64>,
    /// `(M_X + kI)^-1 U`: column `k` is the X block of pair `k`, normalised so
    /// that `a' (M_X + kI)^2 a = 1`.
    pub p_x: DMatrix<f64>,
    pub p_y: DMatrix<f64>,
}

/// A fitted two-view kernel CCA.
#[derive(Debug, Clone)]
pub struct KccaModel {
    config: KccaConfig,
    kernel_x: Kernel,
    kernel_y: Kernel,
    train_x: DataView,
    train_y: DataView,
    row_means_x: Vec<f64>,
    row_means_y: Vec<f64>,
    m_x: CenteredGram,
    m_y: CenteredGram,
    rho: Vec<f64>,
    a_x: DMatrix<f64>,
    a_y: DMatrix<f64>,
    fbar_x: DMatrix<f64>,
    fbar_y: DMatrix<f64>,
    spectrum: Spectrum,
}

/// Canonical variates of one component at the training points.
#[derive(Debug, Clone, PartialEq)]
pub struct Variates {
    /// `(M_X a_X)_i`
    pub f_x: Vec<f64>,
    pub f_y: Vec<f64>,
    /// `f_x` centred and scaled to unit variance (1/n convention).
    pub fbar_x: Vec<f64>,
    pub fbar_y: Vec<f64>,
}

pub(crate) fn check_lengths(views: &[&DataView]) -> Result<usize> {
    let n = views[0].nrows();
    for (idx, view) in views.iter().enumerate().skip(1) {
        if view.nrows() != n {
            return Err(Error::ViewLengthMismatch {
                view: idx,
                expected: n,
                found: view.nrows(),
            });
        }
    }
    Ok(n)
}

/// Eigen-functions of a centred Gram matrix: `R = M (M + kI)^-1` and the
/// (pseudo-)inverse of `M + kI`. With `k = 0` both fall back to the
/// projector / pseudo-inverse on the numerical range of `M`.
pub(crate) struct Resolvents {
    pub ratio: DMatrix<f64>,
    pub inv: DMatrix<f64>,
}

pub(crate) fn resolvents(m: &DMatrix<f64>, kappa: f64) -> Result<Resolvents> {
    let eig = eigsolve::sym_eig(m)?;
    let n = m.nrows();
    let top = eig.values.iter().copied().fold(0.0, f64::max);
    let tol = n as f64 * f64::EPSILON * top;
    let mut r = DVector::zeros(n);
    let mut s = DVector::zeros(n);
    for k in 0..n {
        let lam = eig.values[k].max(0.0);
        if kappa > 0.0 {
            r[k] = lam / (lam + kappa);
            s[k] = 1.0 / (lam + kappa);
        } else if lam > tol {
            r[k] = 1.0;
            s[k] = 1.0 / lam;
        }
    }
    let u = &eig.vectors;
    let scale = |d: &DVector<f64>| {
        let mut ud = u.clone();
        for (k, mut col) in ud.column_iter_mut().enumerate() {
            col *= d[k];
        }
        &ud * u.transpose()
    };
    let mut ratio = scale(&r);
    let mut inv = scale(&s);
    symmetrize(&mut ratio);
    symmetrize(&mut inv);
    Ok(Resolvents { ratio, inv })
}

pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Standardise each column of `f`.
pub(crate) fn standardize_columns(f: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = f.clone();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        let z = stats::standardize(f.column(j).as_slice());
        col.copy_from_slice(&z);
    }
    out
}

/// Fit two-view kernel CCA.
pub fn fit(x: &DataView, y: &DataView, cfg: &KccaConfig) -> Result<KccaModel> {
    cfg.validate()?;
    let n = check_lengths(&[x, y])?;
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    let kernel_x = cfg.kernel_x.resolve(x)?;
    let kernel_y = cfg.kernel_y.resolve(y)?;
    let kx = kernels::gram(x, &kernel_x)?;
    let ky = kernels::gram(y, &kernel_y)?;
    let row_means_x = kernels::row_means(&kx);
    let row_means_y = kernels::row_means(&ky);
    let m_x = kernels::center(&kx);
    let m_y = kernels::center(&ky);

    let rx = resolvents(m_x.values(), cfg.kappa)?;
    let ry = resolvents(m_y.values(), cfg.kappa)?;
    let t = &rx.ratio * &ry.ratio;
    let (u, sigma, v) = eigsolve::svd(&t)?;
    let mut p_x = &rx.inv * &u;
    let mut p_y = &ry.inv * &v;
    for k in 0..n {
        if eigsolve::needs_flip(p_x.column(k).iter().chain(p_y.column(k).iter())) {
            p_x.column_mut(k).neg_mut();
            p_y.column_mut(k).neg_mut();
        }
    }

    let j = cfg.num_components.min(n);
    let rho: Vec<f64> = sigma.iter().take(j).copied().collect();
    let a_x = p_x.columns(0, j).into_owned();
    let a_y = p_y.columns(0, j).into_owned();
    let f_x = m_x.values() * &a_x;
    let f_y = m_y.values() * &a_y;
    let fbar_x = standardize_columns(&f_x);
    let fbar_y = standardize_columns(&f_y);

    Ok(KccaModel {
        config: cfg.clone(),
        kernel_x,
        kernel_y,
        train_x: x.clone(),
        train_y: y.clone(),
        row_means_x,
        row_means_y,
        m_x,
        m_y,
        rho,
        a_x,
        a_y,
        fbar_x,
        fbar_y,
        spectrum: Spectrum { sigma, p_x, p_y },
    })
}

impl KccaModel {
    pub fn n(&self) -> usize {
        self.m_x.n()
    }

    pub fn num_components(&self) -> usize {
        self.rho.len()
    }

    /// Canonical correlations, descending.
    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn kappa(&self) -> f64 {
        self.config.kappa
    }

    pub fn config(&self) -> &KccaConfig {
        &self.config
    }

    pub fn kernels(&self) -> (&Kernel, &Kernel) {
        (&self.kernel_x, &self.kernel_y)
    }

    pub fn m_x(&self) -> &CenteredGram {
        &self.m_x
    }

    pub fn m_y(&self) -> &CenteredGram {
        &self.m_y
    }

    /// `n x J` coefficient matrices, columns normalised to `a'(M + kI)^2 a = 1`.
    pub fn coefficients(&self) -> (&DMatrix<f64>, &DMatrix<f64>) {
        (&self.a_x, &self.a_y)
    }

    /// `n x J` standardized variates.
    pub fn standardized_variates(&self) -> (&DMatrix<f64>, &DMatrix<f64>) {
        (&self.fbar_x, &self.fbar_y)
    }

    pub(crate) fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub(crate) fn check_component(&self, j: usize) -> Result<()> {
        if j >= self.num_components() {
            return Err(Error::BadComponent {
                index: j,
                available: self.num_components(),
            });
        }
        Ok(())
    }

    /// Raw and standardized variates of component `j` (0-based).
    pub fn variates(&self, j: usize) -> Result<Variates> {
        self.check_component(j)?;
        let f_x = self.m_x.values() * self.a_x.column(j);
        let f_y = self.m_y.values() * self.a_y.column(j);
        Ok(Variates {
            f_x: f_x.iter().copied().collect(),
            f_y: f_y.iter().copied().collect(),
            fbar_x: self.fbar_x.column(j).iter().copied().collect(),
            fbar_y: self.fbar_y.column(j).iter().copied().collect(),
        })
    }

    /// Evaluate the fitted functions at new rows, centring with training
    /// kernel means only. Returns `m x J` matrices for X and Y.
    pub fn project(&self, x_new: &DataView, y_new: &DataView) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let m = check_lengths(&[x_new, y_new])?;
        if m == 0 {
            return Err(Error::EmptyInput);
        }
        let cx = kernels::cross_gram(x_new, &self.train_x, &self.kernel_x)?;
        let cy = kernels::cross_gram(y_new, &self.train_y, &self.kernel_y)?;
        let kx = kernels::center_cross(&cx, &self.row_means_x);
        let ky = kernels::center_cross(&cy, &self.row_means_y);
        Ok((kx * &self.a_x, ky * &self.a_y))
    }
}

/// The unwhitened block system `(A, B)` of the regularized problem.
pub fn block_problem(
    m_x: &CenteredGram,
    m_y: &CenteredGram,
    kappa: f64,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = m_x.n();
    let mx = m_x.values();
    let my = m_y.values();
    let cross = mx * my;
    let mut a = DMatrix::zeros(2 * n, 2 * n);
    a.view_mut((0, n), (n, n)).copy_from(&cross);
    a.view_mut((n, 0), (n, n)).copy_from(&cross.transpose());
    let sx = mx + DMatrix::identity(n, n) * kappa;
    let sy = my + DMatrix::identity(n, n) * kappa;
    let mut b = DMatrix::zeros(2 * n, 2 * n);
    b.view_mut((0, 0), (n, n)).copy_from(&(&sx * &sx));
    b.view_mut((n, n), (n, n)).copy_from(&(&sy * &sy));
    symmetrize(&mut a);
    symmetrize(&mut b);
    (a, b)
}

/// Full `2n` spectrum of the block system, solved directly with
/// [`eigsolve::gen_eig`]. Slow; meant for verification at small `n`.
pub fn block_spectrum(m_x: &CenteredGram, m_y: &CenteredGram, kappa: f64) -> Result<EigenPairs> {
    let (a, b) = block_problem(m_x, m_y, kappa);
    eigsolve::gen_eig(&a, &b)
}

/// Train/test correlation gap across folds.
#[derive(Debug, Clone, PartialEq)]
pub struct CvGap {
    pub mean: f64,
    /// Sample standard deviation across folds.
    pub sd: f64,
    /// `|train rho_1 - test rho_1|` per fold, in fold order.
    pub gaps: Vec<f64>,
}

/// `folds`-fold cross-validation of the first canonical correlation. Test
/// correlation is the Pearson correlation of the projected held-out variates.
pub fn cv_gap(x: &DataView, y: &DataView, folds: usize, cfg: &KccaConfig, seed: u64) -> Result<CvGap> {
    let n = check_lengths(&[x, y])?;
    if folds < 2 {
        return Err(Error::InvalidData(format!(
            "need at least 2 folds, got {folds}"
        )));
    }
    if folds > n {
        return Err(Error::TooManyFolds { folds, n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut gaps = Vec::with_capacity(folds);
    for f in 0..folds {
        let lo = f * n / folds;
        let hi = (f + 1) * n / folds;
        let mut test: Vec<usize> = order[lo..hi].to_vec();
        let mut train: Vec<usize> = order[..lo].iter().chain(&order[hi..]).copied().collect();
        if test.len() < 2 {
            return Err(Error::InsufficientData {
                needed: 2 * folds,
                got: n,
            });
        }
        test.sort_unstable();
        train.sort_unstable();
        let model = fit(&x.select_rows(&train), &y.select_rows(&train), cfg)?;
        let (px, py) = model.project(&x.select_rows(&test), &y.select_rows(&test))?;
        let test_rho = stats::pearson(px.column(0).as_slice(), py.column(0).as_slice());
        gaps.push((model.rho()[0] - test_rho).abs());
    }
    let mean = stats::mean(&gaps);
    let sd = (gaps.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / (folds - 1) as f64).sqrt();
    Ok(CvGap { mean, sd, gaps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn random_view(n: usize, d: usize, seed: u64) -> DataView {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DataView::new(DMatrix::from_fn(n, d, |_, _| rng.random_range(-1.0..1.0)))
    }

    #[test]
    fn same_view_twice_reduces_to_eigenvalues_of_m() {
        let x = random_view(25, 3, 1);
        let model = fit(&x, &x, &KccaConfig::default()).unwrap();
        let eig = eigsolve::sym_eig(model.m_x().values()).unwrap();
        let lam = eig.values[0];
        let k = DEFAULT_KAPPA;
        assert_abs_diff_eq!(model.rho()[0], (lam / (lam + k)).powi(2), epsilon = 1e-10);
        let v = model.variates(0).unwrap();
        for i in 0..25 {
            assert_abs_diff_eq!(v.fbar_x[i], v.fbar_y[i], epsilon = 1e-6);
        }
    }

    #[test]
    fn kappa_zero_needs_flag() {
        let x = random_view(10, 2, 2);
        let cfg = KccaConfig {
            kappa: 0.0,
            ..Default::default()
        };
        assert!(matches!(
            fit(&x, &x, &cfg),
            Err(Error::DegenerateRegularization)
        ));
    }

    #[test]
    fn mismatched_views() {
        let x = random_view(10, 2, 2);
        let y = random_view(9, 2, 3);
        assert!(matches!(
            fit(&x, &y, &KccaConfig::default()),
            Err(Error::ViewLengthMismatch { view: 1, expected: 10, found: 9 })
        ));
    }

    #[test]
    fn normalization_and_standardization() {
        let x = random_view(30, 3, 4);
        let y = random_view(30, 2, 5);
        let cfg = KccaConfig {
            num_components: 3,
            ..Default::default()
        };
        let model = fit(&x, &y, &cfg).unwrap();
        let (ax, ay) = model.coefficients();
        let n = model.n();
        let sx = model.m_x().values() + DMatrix::identity(n, n) * cfg.kappa;
        let sy = model.m_y().values() + DMatrix::identity(n, n) * cfg.kappa;
        for j in 0..3 {
            let qa = ax.column(j).transpose() * &sx * &sx * ax.column(j);
            let qb = ay.column(j).transpose() * &sy * &sy * ay.column(j);
            assert_abs_diff_eq!(qa[(0, 0)], 1.0, epsilon = 1e-8);
            assert_abs_diff_eq!(qb[(0, 0)], 1.0, epsilon = 1e-8);
            let v = model.variates(j).unwrap();
            assert!(stats::mean(&v.fbar_x).abs() < 1e-8);
            let var = v.fbar_x.iter().map(|f| f * f).sum::<f64>() / n as f64;
            assert_abs_diff_eq!(var, 1.0, epsilon = 1e-6);
        }
        let rho = model.rho();
        assert!(rho.windows(2).all(|w| w[0] >= w[1]));
        assert!(rho.iter().all(|&r| (0.0..=1.0 + 1e-8).contains(&r)));
    }

    #[test]
    fn bad_component() {
        let x = random_view(10, 2, 6);
        let model = fit(&x, &x, &KccaConfig::default()).unwrap();
        assert!(matches!(
            model.variates(1),
            Err(Error::BadComponent { index: 1, available: 1 })
        ));
    }

    #[test]
    fn projection_of_training_rows_reproduces_variates() {
        let x = random_view(20, 3, 7);
        let y = random_view(20, 3, 8);
        let model = fit(&x, &y, &KccaConfig::default()).unwrap();
        let (px, py) = model.project(&x, &y).unwrap();
        let v = model.variates(0).unwrap();
        for i in 0..20 {
            assert_abs_diff_eq!(px[(i, 0)], v.f_x[i], epsilon = 1e-10);
            assert_abs_diff_eq!(py[(i, 0)], v.f_y[i], epsilon = 1e-10);
        }
    }

    #[test]
    fn projection_is_deterministic_per_row() {
        let x = random_view(20, 3, 9);
        let y = random_view(20, 3, 10);
        let model = fit(&x, &y, &KccaConfig::default()).unwrap();
        let (px, _) = model
            .project(&x.select_rows(&[4, 4]), &y.select_rows(&[4, 4]))
            .unwrap();
        assert_eq!(px[(0, 0)], px[(1, 0)]);
    }

    #[test]
    fn projection_errors() {
        let x = random_view(12, 3, 11);
        let model = fit(&x, &x, &KccaConfig::default()).unwrap();
        let empty = DataView::new(DMatrix::zeros(0, 3));
        assert!(matches!(model.project(&empty, &empty), Err(Error::EmptyInput)));
        let wrong = random_view(2, 4, 12);
        assert!(matches!(
            model.project(&wrong, &wrong),
            Err(Error::InvalidData(_))
        ));
    }

    #[test]
    fn folds_validated() {
        let x = random_view(5, 2, 13);
        assert!(matches!(
            cv_gap(&x, &x, 6, &KccaConfig::default(), 0),
            Err(Error::TooManyFolds { folds: 6, n: 5 })
        ));
    }

    #[test]
    fn block_spectrum_matches_whitened_fit() {
        let x = random_view(12, 2, 14);
        let y = random_view(12, 2, 15);
        let model = fit(&x, &y, &KccaConfig::default()).unwrap();
        let e = block_spectrum(model.m_x(), model.m_y(), DEFAULT_KAPPA).unwrap();
        assert_abs_diff_eq!(e.values[0], model.rho()[0], epsilon = 1e-8);
    }
}
