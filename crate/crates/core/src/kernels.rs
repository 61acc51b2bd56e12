//! Positive definite kernels, Gram matrices, double centering and the
//! median-heuristic bandwidth.

use nalgebra::DMatrix;

use crate::data::DataView;
use crate::eigsolve;
use crate::error::{Error, Result};

/// How a gaussian bandwidth is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    Explicit(f64),
    /// Median of all pairwise Euclidean distances between rows.
    MedianHeuristic,
}

/// Kernel choice before it is resolved against data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    Gaussian { bandwidth: Bandwidth },
    Linear,
    Polynomial { degree: u32, offset: f64 },
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec::Gaussian {
            bandwidth: Bandwidth::MedianHeuristic,
        }
    }
}

impl KernelSpec {
    pub fn gaussian(sigma: f64) -> Self {
        KernelSpec::Gaussian {
            bandwidth: Bandwidth::Explicit(sigma),
        }
    }

    /// Fix every data-dependent parameter, validating the result.
    pub fn resolve(&self, x: &DataView) -> Result<Kernel> {
        let kernel = match *self {
            KernelSpec::Gaussian {
                bandwidth: Bandwidth::Explicit(sigma),
            } => Kernel::Gaussian { sigma },
            KernelSpec::Gaussian {
                bandwidth: Bandwidth::MedianHeuristic,
            } => Kernel::Gaussian {
                sigma: median_bandwidth(x)?,
            },
            KernelSpec::Linear => Kernel::Linear,
            KernelSpec::Polynomial { degree, offset } => Kernel::Polynomial { degree, offset },
        };
        kernel.validate()?;
        Ok(kernel)
    }
}

/// A fully specified kernel function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// `exp(-|x - y|^2 / (2 sigma^2))`
    Gaussian { sigma: f64 },
    /// `<x, y>`
    Linear,
    /// `(<x, y> + offset)^degree`
    Polynomial { degree: u32, offset: f64 },
}

impl Kernel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Kernel::Gaussian { sigma } if !(sigma > 0.0 && sigma.is_finite()) => Err(
                Error::InvalidData(format!("gaussian bandwidth must be positive, got {sigma}")),
            ),
            Kernel::Polynomial { degree: 0, .. } => Err(Error::InvalidData(
                "polynomial degree must be at least 1".into(),
            )),
            Kernel::Polynomial { offset, .. } if !offset.is_finite() => {
                Err(Error::InvalidData("polynomial offset must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            Kernel::Gaussian { sigma } => {
                let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                (-d2 / (2.0 * sigma * sigma)).exp()
            }
            Kernel::Linear => dot(x, y),
            Kernel::Polynomial { degree, offset } => (dot(x, y) + offset).powi(degree as i32),
        }
    }

    /// Whether `sup |k|` is finite; drives the boundedness of the influence functions.
    pub fn is_bounded(&self) -> bool {
        matches!(self, Kernel::Gaussian { .. })
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Symmetric `n x n` kernel matrix `K_ij = k(x_i, x_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix(DMatrix<f64>);

impl GramMatrix {
    /// Wrap a matrix that is already known to be a symmetric kernel matrix.
    pub fn from_symmetric(values: DMatrix<f64>) -> Result<Self> {
        eigsolve::check_symmetric(&values)?;
        Ok(GramMatrix(values))
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        crate::eigsolve::sym_eig(&self.0)
            .map(|e| e.values[e.values.len() - 1])
            .unwrap_or(f64::NAN)
    }
}

/// Doubly centred kernel matrix `M = C K C`, `C = I - 11'/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredGram(DMatrix<f64>);

impl CenteredGram {
    pub fn values(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }
}

/// Median of the `n(n-1)/2` pairwise Euclidean distances between rows
/// (mean of the two middle values for an even count, zeros included).
pub fn median_bandwidth(x: &DataView) -> Result<f64> {
    let n = x.nrows();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    x.ensure_finite()?;
    let rows = x.rows();
    let mut dists = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            dists.push(euclidean(&rows[i], &rows[j]));
        }
    }
    let m = dists.len();
    let mid = m / 2;
    let (_, &mut upper, _) = dists.select_nth_unstable_by(mid, f64::total_cmp);
    let median = if m % 2 == 1 {
        upper
    } else {
        // the lower middle is the max of the left partition
        let lower = dists[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    };
    if median <= 0.0 {
        return Err(Error::DegenerateBandwidth);
    }
    Ok(median)
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt()
}

/// Kernel matrix of the rows of `x`. Only the upper triangle is evaluated,
/// so the result is exactly symmetric.
pub fn gram(x: &DataView, kernel: &Kernel) -> Result<GramMatrix> {
    kernel.validate()?;
    x.ensure_finite()?;
    let rows = x.rows();
    let n = rows.len();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = kernel.eval(&rows[i], &rows[j]);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(GramMatrix(k))
}

/// `m x n` matrix `k(new_i, train_j)`.
pub fn cross_gram(new: &DataView, train: &DataView, kernel: &Kernel) -> Result<DMatrix<f64>> {
    if new.ncols() != train.ncols() {
        return Err(Error::InvalidData(format!(
            "new rows have {} columns, training rows have {}",
            new.ncols(),
            train.ncols()
        )));
    }
    new.ensure_finite()?;
    let a = new.rows();
    let b = train.rows();
    Ok(DMatrix::from_fn(a.len(), b.len(), |i, j| {
        kernel.eval(&a[i], &b[j])
    }))
}

/// `M_ij = K_ij - rowmean_i - colmean_j + grandmean`.
pub fn center(k: &GramMatrix) -> CenteredGram {
    let g = &k.0;
    let n = g.nrows();
    let row_means: Vec<f64> = (0..n).map(|i| g.row(i).sum() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in j..n {
            // K symmetric, so column means equal row means
            let v = g[(i, j)] - row_means[i] - row_means[j] + grand;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    CenteredGram(m)
}

/// Row means of a Gram matrix, kept for out-of-sample centring.
pub(crate) fn row_means(k: &GramMatrix) -> Vec<f64> {
    let n = k.n();
    (0..n).map(|i| k.0.row(i).sum() / n as f64).collect()
}

/// Centre a cross-kernel block `k(new_i, train_b)` against training statistics:
/// `k~(x*, X_b) = k(x*, X_b) - mean_c k(x*, X_c) - trainmean_b + grand`.
pub(crate) fn center_cross(cross: &DMatrix<f64>, train_row_means: &[f64]) -> DMatrix<f64> {
    let n = train_row_means.len() as f64;
    let grand = train_row_means.iter().sum::<f64>() / n;
    let mut out = cross.clone();
    for i in 0..cross.nrows() {
        let own = cross.row(i).sum() / n;
        for b in 0..cross.ncols() {
            out[(i, b)] -= own + train_row_means[b] - grand;
        }
    }
    out
}
