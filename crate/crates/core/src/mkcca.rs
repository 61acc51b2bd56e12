//! Multiple kernel CCA over `p >= 2` views.
//!
//! The block system has off-diagonal blocks `M_j M_j'` and right-hand
//! diagonal blocks `(M_j + kI)^2`. As in the two-view fit it is whitened by
//! `diag(M_j + kI)`, which leaves the symmetric `pn x pn` matrix with zero
//! diagonal blocks and off-diagonal blocks `R_j R_j'`, `R = M (M + kI)^-1`.
//!
//! For `p > 2` the eigenvalue `rho_l` is a *sum-correlation score* (a sum of
//! pairwise correlations), bounded by `p - 1`, not a correlation in `[0, 1]`.

use nalgebra::DMatrix;

use crate::data::DataView;
use crate::eigsolve;
use crate::error::{Error, Result};
use crate::kcca::{check_lengths, resolvents, standardize_columns, DEFAULT_KAPPA};
use crate::kernels::{self, CenteredGram, Kernel, KernelSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct MkccaConfig {
    pub kappa: f64,
    /// One spec per view; an empty list means the default kernel for every view.
    pub kernels: Vec<KernelSpec>,
    pub num_components: usize,
}

impl Default for MkccaConfig {
    fn default() -> Self {
        MkccaConfig {
            kappa: DEFAULT_KAPPA,
            kernels: Vec::new(),
            num_components: 1,
        }
    }
}

impl MkccaConfig {
    fn spec(&self, view: usize) -> Result<KernelSpec> {
        match self.kernels.len() {
            0 => Ok(KernelSpec::default()),
            _ => self.kernels.get(view).copied().ok_or_else(|| {
                Error::InvalidData(format!(
                    "{} kernel specs given for more views",
                    self.kernels.len()
                ))
            }),
        }
    }
}

/// A fitted p-view multiple kernel CCA.
#[derive(Debug, Clone)]
pub struct MkccaModel {
    config: MkccaConfig,
    kernels: Vec<Kernel>,
    grams: Vec<CenteredGram>,
    rho: Vec<f64>,
    /// Per view, `n x L` coefficients.
    coeffs: Vec<DMatrix<f64>>,
    /// Per view, `n x L` standardized variates.
    fbar: Vec<DMatrix<f64>>,
}

/// Fit multiple kernel CCA on `p >= 2` views with equal row counts.
pub fn fit_multi(views: &[DataView], cfg: &MkccaConfig) -> Result<MkccaModel> {
    let p = views.len();
    if p < 2 {
        return Err(Error::NeedTwoViews { got: p });
    }
    if !(cfg.kappa.is_finite() && cfg.kappa >= 0.0) {
        return Err(Error::InvalidData(format!(
            "kappa must be a nonnegative finite number, got {}",
            cfg.kappa
        )));
    }
    if cfg.kappa == 0.0 {
        return Err(Error::DegenerateRegularization);
    }
    if cfg.num_components == 0 {
        return Err(Error::InvalidData(
            "num_components must be at least 1".into(),
        ));
    }
    let refs: Vec<&DataView> = views.iter().collect();
    let n = check_lengths(&refs)?;
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }

    let mut kernel_list = Vec::with_capacity(p);
    let mut grams = Vec::with_capacity(p);
    let mut ratios = Vec::with_capacity(p);
    let mut invs = Vec::with_capacity(p);
    for (v, view) in views.iter().enumerate() {
        let kernel = cfg.spec(v)?.resolve(view)?;
        let m = kernels::center(&kernels::gram(view, &kernel)?);
        let r = resolvents(m.values(), cfg.kappa)?;
        kernel_list.push(kernel);
        grams.push(m);
        ratios.push(r.ratio);
        invs.push(r.inv);
    }

    let mut h = DMatrix::zeros(p * n, p * n);
    for j in 0..p {
        for k in (j + 1)..p {
            let block = &ratios[j] * &ratios[k];
            h.view_mut((j * n, k * n), (n, n)).copy_from(&block);
            h.view_mut((k * n, j * n), (n, n)).copy_from(&block.transpose());
        }
    }
    let eig = eigsolve::sym_eig(&h)?;

    let l = cfg.num_components.min(p * n);
    let rho: Vec<f64> = eig.values.iter().take(l).copied().collect();
    let mut coeffs: Vec<DMatrix<f64>> = (0..p).map(|_| DMatrix::zeros(n, l)).collect();
    for c in 0..l {
        let u = eig.vectors.column(c);
        for j in 0..p {
            let uj = u.rows(j * n, n);
            // per-view normalisation a_j'(M_j + kI)^2 a_j = |u_j|^2 = 1
            let norm = uj.norm();
            let scale = if norm > 0.0 { 1.0 / norm } else { 0.0 };
            let a = &invs[j] * uj * scale;
            coeffs[j].column_mut(c).copy_from(&a);
        }
        let flip = eigsolve::needs_flip(coeffs.iter().flat_map(|a| (0..n).map(move |r| &a[(r, c)])));
        if flip {
            for a in coeffs.iter_mut() {
                a.column_mut(c).neg_mut();
            }
        }
    }
    let fbar = grams
        .iter()
        .zip(&coeffs)
        .map(|(m, a)| standardize_columns(&(m.values() * a)))
        .collect();

    Ok(MkccaModel {
        config: cfg.clone(),
        kernels: kernel_list,
        grams,
        rho,
        coeffs,
        fbar,
    })
}

impl MkccaModel {
    pub fn n(&self) -> usize {
        self.grams[0].n()
    }

    pub fn num_views(&self) -> usize {
        self.grams.len()
    }

    pub fn num_components(&self) -> usize {
        self.rho.len()
    }

    /// Sum-correlation scores, descending.
    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn config(&self) -> &MkccaConfig {
        &self.config
    }

    pub fn kernels(&self) -> &[Kernel] {
        &self.kernels
    }

    pub fn grams(&self) -> &[CenteredGram] {
        &self.grams
    }

    /// `n x L` coefficients of view `view`.
    pub fn coefficients(&self, view: usize) -> &DMatrix<f64> {
        &self.coeffs[view]
    }

    /// `n x L` standardized variates of view `view`.
    pub fn standardized_variates(&self, view: usize) -> &DMatrix<f64> {
        &self.fbar[view]
    }

    pub(crate) fn check_component(&self, l: usize) -> Result<()> {
        if l >= self.num_components() {
            return Err(Error::BadComponent {
                index: l,
                available: self.num_components(),
            });
        }
        Ok(())
    }

    /// Standardized variates of component `l` (0-based), one vector per view.
    pub fn variates(&self, l: usize) -> Result<Vec<Vec<f64>>> {
        self.check_component(l)?;
        Ok(self
            .fbar
            .iter()
            .map(|f| f.column(l).iter().copied().collect())
            .collect())
    }
}
