//! Closed-form empirical influence functions.
//!
//! * [`eif_cc`] — influence of each observation on the squared kernel
//!   canonical correlation `rho_j^2`,
//! * [`eif_cc_at_points`] — the same influence function at arbitrary
//!   contamination points,
//! * [`eif_cv`] — influence on the standardized canonical variates,
//! * [`eif_mkcca_cc`] — the multi-view analogue of [`eif_cc`],
//! * [`eif_cco`] — the kernel cross-covariance operator estimator,
//! * [`eta_rho`] / [`eta_f`] — robustness measures comparing an ideal and a
//!   contaminated run.
//!
//! Every influence function has mean zero under the empirical distribution.
//! The pointwise quadratic form `-rho^2 fx^2 + 2 rho fx fy - rho^2 fy^2`
//! ([`cc_influence_at`]) is exact only when `rho` equals the sample
//! correlation of the standardized variates; under regularization it does
//! not, and the scores returned here are the quadratic form minus its sample
//! mean, which is what a weight-perturbed refit actually measures.

use nalgebra::{DMatrix, DVector};

use crate::data::DataView;
use crate::error::{Error, Result};
use crate::kcca::KccaModel;
use crate::kernels::KernelSpec;
use crate::mkcca::MkccaModel;
use crate::stats;

/// Denominators `rho - rho_k` below this are treated as the deflated direction.
const GAP_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfluenceKind {
    KernelCc,
    MkccaCc,
}

/// Per-observation influence on a canonical correlation.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceScores {
    /// 0-based component index.
    pub component: usize,
    pub values: Vec<f64>,
    pub kind: InfluenceKind,
}

impl InfluenceScores {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Euclidean (Frobenius) norm of the score vector.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Influence on a standardized canonical variate: entry `(i, i')` is the
/// derivative of the variate at sample point `i` under contamination at
/// observation `i'`.
#[derive(Debug, Clone, PartialEq)]
pub struct CvInfluence {
    pub values: DMatrix<f64>,
}

/// The pointwise two-view quadratic form.
pub fn cc_influence_at(rho: f64, fx: f64, fy: f64) -> f64 {
    -rho * rho * fx * fx + 2.0 * rho * fx * fy - rho * rho * fy * fy
}

/// The pointwise p-view quadratic form, with the component eigenvalue in
/// every cross term.
pub fn mkcca_cc_influence_at(rho: f64, fbar: &[f64]) -> f64 {
    let square: f64 = fbar.iter().map(|f| f * f).sum();
    let mut cross = 0.0;
    for j in 0..fbar.len() {
        for k in (j + 1)..fbar.len() {
            cross += fbar[j] * fbar[k];
        }
    }
    -rho * rho * square + 2.0 * rho * cross
}

fn centred(mut values: Vec<f64>) -> Vec<f64> {
    let m = stats::mean(&values);
    for v in values.iter_mut() {
        *v -= m;
    }
    values
}

/// Influence of every observation on `rho_j^2` (component `j`, 0-based).
pub fn eif_cc(model: &KccaModel, j: usize) -> Result<InfluenceScores> {
    model.check_component(j)?;
    let rho = model.rho()[j];
    let (gx, gy) = model.standardized_variates();
    let raw = gx
        .column(j)
        .iter()
        .zip(gy.column(j).iter())
        .map(|(&fx, &fy)| cc_influence_at(rho, fx, fy))
        .collect();
    Ok(InfluenceScores {
        component: j,
        values: centred(raw),
        kind: InfluenceKind::KernelCc,
    })
}

/// Influence on `rho_j^2` of a contamination point `(x', y')` that need not
/// be in the sample: the fitted functions are evaluated at the point through
/// [`KccaModel::project`], standardized with the training mean and 1/n
/// spread, and shifted by the same centring constant as [`eif_cc`]. At the
/// sample points this reproduces [`eif_cc`].
pub fn eif_cc_at_points(model: &KccaModel, j: usize, x_new: &DataView, y_new: &DataView) -> Result<Vec<f64>> {
    model.check_component(j)?;
    let rho = model.rho()[j];
    let v = model.variates(j)?;
    let (mx, sx) = location_scale(&v.f_x);
    let (my, sy) = location_scale(&v.f_y);
    let shift = stats::mean(
        &v.fbar_x
            .iter()
            .zip(&v.fbar_y)
            .map(|(&a, &b)| cc_influence_at(rho, a, b))
            .collect::<Vec<_>>(),
    );
    let (px, py) = model.project(x_new, y_new)?;
    Ok((0..px.nrows())
        .map(|i| {
            let gx = if sx > 0.0 { (px[(i, j)] - mx) / sx } else { 0.0 };
            let gy = if sy > 0.0 { (py[(i, j)] - my) / sy } else { 0.0 };
            cc_influence_at(rho, gx, gy) - shift
        })
        .collect())
}

fn location_scale(f: &[f64]) -> (f64, f64) {
    let m = stats::mean(f);
    let var = f.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / f.len() as f64;
    (m, var.sqrt())
}

/// Influence of every observation on the `l`-th multi-view score.
pub fn eif_mkcca_cc(model: &MkccaModel, l: usize) -> Result<InfluenceScores> {
    model.check_component(l)?;
    let rho = model.rho()[l];
    let p = model.num_views();
    let mut row = vec![0.0; p];
    let raw = (0..model.n())
        .map(|i| {
            for (j, f) in row.iter_mut().enumerate() {
                *f = model.standardized_variates(j)[(i, l)];
            }
            mkcca_cc_influence_at(rho, &row)
        })
        .collect();
    Ok(InfluenceScores {
        component: l,
        values: centred(raw),
        kind: InfluenceKind::MkccaCc,
    })
}

/// Influence of every observation on both standardized variates of
/// component `j`, from the first-order perturbation of the fitted
/// generalized eigenvector (deflated resolvent plus the normalisation term).
pub fn eif_cv(model: &KccaModel, j: usize) -> Result<(CvInfluence, CvInfluence)> {
    model.check_component(j)?;
    if model.kappa() == 0.0 {
        return Err(Error::DegenerateRegularization);
    }
    let n = model.n();
    let nf = n as f64;
    let kappa = model.kappa();
    let rho = model.rho()[j];
    let spec = model.spectrum();
    let mx = model.m_x().values();
    let my = model.m_y().values();
    let (ax, ay) = model.coefficients();
    let fx = mx * ax.column(j);
    let fy = my * ay.column(j);

    // Column i' of top/bot is sqrt 2 times the X/Y block of (dA - rho dB) v.
    let top = rhs_block(mx, &fx, &fy, rho, kappa);
    let bot = rhs_block(my, &fy, &fx, rho, kappa);
    let alpha = spec.p_x.transpose() * &top;
    let beta = spec.p_y.transpose() * &bot;

    let mut c_plus = DMatrix::zeros(n, n);
    let mut c_minus = DMatrix::zeros(n, n);
    for k in 0..n {
        let sk = spec.sigma[k];
        let dp = rho - sk;
        let dm = rho + sk;
        for col in 0..n {
            let (a, b) = (alpha[(k, col)], beta[(k, col)]);
            if k != j && dp.abs() > GAP_TOL {
                c_plus[(k, col)] = 0.5 * (a + b) / dp;
            }
            if dm.abs() > GAP_TOL {
                c_minus[(k, col)] = 0.5 * (a - b) / dm;
            }
        }
    }
    // M P is bounded even where P carries the 1/k constant direction.
    let qx = mx * &spec.p_x;
    let qy = my * &spec.p_y;
    let fx_sq = fx.norm_squared();
    let fy_sq = fy.norm_squared();
    // v' dB v for contamination at i'
    let quad = DVector::from_fn(n, |i, _| {
        0.5 * (nf * (fx[i] * fx[i] + fy[i] * fy[i]) - fx_sq - fy_sq)
    });
    let dfx = variate_derivative(&qx, &(&c_plus + &c_minus), &fx, &quad);
    let dfy = variate_derivative(&qy, &(&c_plus - &c_minus), &fy, &quad);
    Ok((
        CvInfluence {
            values: standardized_derivative(&fx, &dfx),
        },
        CvInfluence {
            values: standardized_derivative(&fy, &dfy),
        },
    ))
}

/// `n M diag(g - rho f) + 1 (rho M f - M g + 2 rho k f)' - (M g - rho M f) 1'`
/// for the view with variate `f` and partner variate `g`.
fn rhs_block(m: &DMatrix<f64>, f: &DVector<f64>, g: &DVector<f64>, rho: f64, kappa: f64) -> DMatrix<f64> {
    let n = m.nrows();
    let nf = n as f64;
    let hf = m * f;
    let hg = m * g;
    let mut out = m.clone();
    for (i, mut col) in out.column_iter_mut().enumerate() {
        col *= nf * (g[i] - rho * f[i]);
        let shift = -hg[i] + rho * hf[i] + 2.0 * rho * kappa * f[i];
        for r in 0..n {
            col[r] += shift - (hg[r] - rho * hf[r]);
        }
    }
    out
}

/// Derivative of the raw variate `M a`, one column per contamination point:
/// `Q c - f (quad / 2)' - 1 f'`.
fn variate_derivative(
    q: &DMatrix<f64>,
    coef: &DMatrix<f64>,
    f: &DVector<f64>,
    quad: &DVector<f64>,
) -> DMatrix<f64> {
    let n = f.len();
    let mut df = q * coef;
    for col in 0..n {
        for r in 0..n {
            // normalisation term of the eigenvector and the dM a = -1 f_i' term
            df[(r, col)] += -0.5 * quad[col] * f[r] - f[col];
        }
    }
    df
}

/// Chain rule through the weighted mean and 1/n standard deviation.
fn standardized_derivative(f: &DVector<f64>, df: &DMatrix<f64>) -> DMatrix<f64> {
    let n = f.len();
    let nf = n as f64;
    let s2 = f.norm_squared() / nf;
    let s = s2.sqrt();
    let mut out = DMatrix::zeros(n, n);
    for col in 0..n {
        let dcol = df.column(col);
        let dmu = f[col] + dcol.sum() / nf;
        let ds2 = f[col] * f[col] - s2 + 2.0 / nf * f.dot(&dcol);
        for r in 0..n {
            out[(r, col)] = (dcol[r] - dmu) / s - f[r] * ds2 / (2.0 * s2 * s);
        }
    }
    out
}

/// Empirical influence of contamination `(x', y')` on the kernel
/// cross-covariance operator, evaluated at observation `i`:
///
/// ```text
/// [k_X(X_i, x') - m_X(X_i)] [k_Y(Y_i, y') - m_Y(Y_i)]
///   - mean_d [k_X(X_i, X_d) - m_X(X_i)] [k_Y(Y_i, Y_d) - m_Y(Y_i)]
/// ```
///
/// with `m(.)` the sample kernel mean.
pub fn eif_cco(
    x: &DataView,
    y: &DataView,
    spec_x: &KernelSpec,
    spec_y: &KernelSpec,
    i: usize,
    zprime: (&[f64], &[f64]),
) -> Result<f64> {
    let n = crate::kcca::check_lengths(&[x, y])?;
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    if i >= n {
        return Err(Error::InvalidData(format!(
            "observation index {i} out of range for {n} rows"
        )));
    }
    x.ensure_finite()?;
    y.ensure_finite()?;
    let (xp, yp) = zprime;
    if xp.len() != x.ncols() || yp.len() != y.ncols() {
        return Err(Error::InvalidData(format!(
            "contamination point has dimensions ({}, {}), views have ({}, {})",
            xp.len(),
            yp.len(),
            x.ncols(),
            y.ncols()
        )));
    }
    if xp.iter().chain(yp).any(|v| !v.is_finite()) {
        return Err(Error::InvalidData("contamination point is not finite".into()));
    }
    let kx = spec_x.resolve(x)?;
    let ky = spec_y.resolve(y)?;
    let xi = x.row(i);
    let yi = y.row(i);
    let kxs: Vec<f64> = x.rows().iter().map(|r| kx.eval(&xi, r)).collect();
    let kys: Vec<f64> = y.rows().iter().map(|r| ky.eval(&yi, r)).collect();
    let mx = stats::mean(&kxs);
    let my = stats::mean(&kys);
    let at_point = (kx.eval(&xi, xp) - mx) * (ky.eval(&yi, yp) - my);
    let average = kxs
        .iter()
        .zip(&kys)
        .map(|(a, b)| (a - mx) * (b - my))
        .sum::<f64>()
        / n as f64;
    Ok(at_point - average)
}

fn ratio_measure(id_norm: f64, cd_norm: f64, what: &'static str) -> Result<f64> {
    if cd_norm == 0.0 {
        return Err(Error::DegenerateDenominator(what));
    }
    Ok((1.0 - id_norm / cd_norm).abs())
}

/// `|1 - |EIF_ID| / |EIF_CD||` for the canonical-correlation scores.
pub fn eta_rho(id: &InfluenceScores, cd: &InfluenceScores) -> Result<f64> {
    check_pair(id.len(), cd.len(), id.component, cd.component)?;
    if id.kind != cd.kind {
        return Err(Error::InvalidData("runs use different influence kinds".into()));
    }
    ratio_measure(id.norm(), cd.norm(), "canonical correlation influence")
}

/// `|1 - |EIF_ID(f_X) - EIF_ID(f_Y)| / |EIF_CD(f_X) - EIF_CD(f_Y)||` with
/// Frobenius norms of the `n x n` variate influence matrices.
pub fn eta_f(id: (&CvInfluence, &CvInfluence), cd: (&CvInfluence, &CvInfluence)) -> Result<f64> {
    if id.0.values.shape() != cd.0.values.shape()
        || id.0.values.shape() != id.1.values.shape()
        || cd.0.values.shape() != cd.1.values.shape()
    {
        return Err(Error::InvalidData("variate influence shapes differ".into()));
    }
    let id_norm = (&id.0.values - &id.1.values).norm();
    let cd_norm = (&cd.0.values - &cd.1.values).norm();
    ratio_measure(id_norm, cd_norm, "canonical variate influence")
}

fn check_pair(n_id: usize, n_cd: usize, c_id: usize, c_cd: usize) -> Result<()> {
    if n_id != n_cd {
        return Err(Error::InvalidData(format!(
            "ideal run has {n_id} observations, contaminated run has {n_cd}"
        )));
    }
    if c_id != c_cd {
        return Err(Error::InvalidData(format!(
            "ideal run scores component {c_id}, contaminated run component {c_cd}"
        )));
    }
    Ok(())
}

/// All influence outputs of one fitted two-view run.
#[derive(Debug, Clone)]
pub struct InfluenceRun {
    pub cc: InfluenceScores,
    pub cv_x: CvInfluence,
    pub cv_y: CvInfluence,
}

impl InfluenceRun {
    pub fn compute(model: &KccaModel, j: usize) -> Result<Self> {
        let cc = eif_cc(model, j)?;
        let (cv_x, cv_y) = eif_cv(model, j)?;
        Ok(InfluenceRun { cc, cv_x, cv_y })
    }
}

/// `(eta_rho, eta_f)` of an ideal run against a contaminated run.
pub fn eta_measures(id: &InfluenceRun, cd: &InfluenceRun) -> Result<(f64, f64)> {
    Ok((
        eta_rho(&id.cc, &cd.cc)?,
        eta_f((&id.cv_x, &id.cv_y), (&cd.cv_x, &cd.cv_y))?,
    ))
}
