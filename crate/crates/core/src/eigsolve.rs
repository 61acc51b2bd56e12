//! Dense symmetric eigensolver and the symmetric-definite generalized
//! eigensolver `A v = lambda B v`.
//!
//! The heavy lifting is delegated to `faer`; this module fixes the ordering
//! (descending) and a deterministic sign for every eigenvector, so that
//! influence scores and written outputs are reproducible.

use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative asymmetry tolerated by [`sym_eig`] and [`gen_eig`].
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Eigenvalues sorted descending; column `j` of `vectors` pairs with `values[j]`.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl EigenPairs {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub(crate) fn check_symmetric(a: &DMatrix<f64>) -> Result<()> {
    if !a.is_square() {
        return Err(Error::InvalidData(format!(
            "expected a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let scale = a.amax();
    let n = a.nrows();
    let mut asym: f64 = 0.0;
    for j in 0..n {
        for i in (j + 1)..n {
            asym = asym.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    Ok(())
}

pub(crate) fn to_faer(a: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn from_faer(a: faer::MatRef<'_, f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Whether a vector must be negated so that its largest-magnitude entry is
/// positive (the first index wins ties).
pub(crate) fn needs_flip<'a>(entries: impl Iterator<Item = &'a f64>) -> bool {
    let mut best = 0.0f64;
    for &v in entries {
        if v.abs() > best.abs() {
            best = v;
        }
    }
    best < 0.0
}

pub(crate) fn fix_sign(mut v: nalgebra::DVectorViewMut<'_, f64>) {
    if needs_flip(v.iter()) {
        v.neg_mut();
    }
}

/// Full spectrum of a symmetric matrix, descending.
pub fn sym_eig(a: &DMatrix<f64>) -> Result<EigenPairs> {
    check_symmetric(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(EigenPairs {
            values: DVector::zeros(0),
            vectors: DMatrix::zeros(0, 0),
        });
    }
    let sym = Mat::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let evd = sym
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::InvalidData(format!("eigendecomposition failed: {e:?}")))?;
    let s = evd.S();
    let u = evd.U();
    // faer sorts ascending
    let values = DVector::from_fn(n, |k, _| s[n - 1 - k]);
    let mut vectors = DMatrix::from_fn(n, n, |i, k| u[(i, n - 1 - k)]);
    for k in 0..n {
        fix_sign(vectors.column_mut(k));
    }
    Ok(EigenPairs { values, vectors })
}

/// Solve `A v = lambda B v` for symmetric `A` and symmetric positive definite `B`
/// by whitening through the Cholesky factor `B = L L'`. Eigenvectors are
/// `B`-orthonormal.
pub fn gen_eig(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<EigenPairs> {
    check_symmetric(a)?;
    check_symmetric(b)?;
    if a.shape() != b.shape() {
        return Err(Error::InvalidData(format!(
            "A is {}x{} but B is {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let chol = b.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    let la = l
        .solve_lower_triangular(a)
        .ok_or(Error::NotPositiveDefinite)?;
    let mut c = l
        .solve_lower_triangular(&la.transpose())
        .ok_or(Error::NotPositiveDefinite)?;
    let ct = c.transpose();
    c = (c + ct) * 0.5;
    let whitened = sym_eig(&c)?;
    let mut vectors = l
        .transpose()
        .solve_upper_triangular(&whitened.vectors)
        .ok_or(Error::NotPositiveDefinite)?;
    for k in 0..vectors.ncols() {
        fix_sign(vectors.column_mut(k));
    }
    Ok(EigenPairs {
        values: whitened.values,
        vectors,
    })
}

/// Full SVD `T = U diag(s) V'`, singular values descending.
pub(crate) fn svd(t: &DMatrix<f64>) -> Result<(DMatrix<f64>, DVector<f64>, DMatrix<f64>)> {
    let svd = to_faer(t)
        .svd()
        .map_err(|e| Error::InvalidData(format!("svd failed: {e:?}")))?;
    let s = svd.S();
    let k = t.nrows().min(t.ncols());
    let sv = DVector::from_fn(k, |i, _| s[i]);
    Ok((from_faer(svd.U()), sv, from_faer(svd.V())))
}
