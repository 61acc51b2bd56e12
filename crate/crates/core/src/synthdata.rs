//! Seeded generators for three synthetic two-view designs, each in an ideal
//! and a contaminated variant.
//!
//! * **MGSD** — multivariate gaussian: `Z ~ N(0, S)` in R^12, `X` the first six
//!   coordinates, `Y = log|last six|`; contaminated rows come from `N(1, S)`.
//! * **SCSD** — sine/cosine: `Z ~ U[-pi, pi]`, `X_ij = sin(j Z_i) + e_i`,
//!   `Y_ij = cos(j Z_i) + e_i`, `j = 1..100`, `e ~ N(0, 0.1^2)`; contaminated
//!   rows draw `e ~ N(1, 0.1^2)`.
//! * **SMSD** — an imaging-genetics latent model: an fMRI-like view and a
//!   SNP-like view coded `{0, 1, 2}`, both loading on one latent factor.
//!
//! Draws happen in a fixed order — base rows, then the contaminated index
//! set, then replacement draws — so an ideal and a contaminated run with the
//! same seed share every uncontaminated row.

use nalgebra::DMatrix;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::data::DataView;
use crate::error::{Error, Result};

/// Standard normal quantile at 2/3: the tertile cut points are `+-` this.
const TERTILE_Z: f64 = 0.430_727_299_295_457_5;

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub n: usize,
    pub contaminated: bool,
    pub contamination_rate: f64,
    pub seed: u64,
}

impl GenConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        GenConfig {
            n,
            contaminated: false,
            contamination_rate: 0.05,
            seed,
        }
    }

    pub fn contaminated(mut self, yes: bool) -> Self {
        self.contaminated = yes;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        if !(0.0..1.0).contains(&self.contamination_rate) {
            return Err(Error::InvalidData(format!(
                "contamination rate must lie in [0, 1), got {}",
                self.contamination_rate
            )));
        }
        Ok(())
    }

    /// Number of contaminated rows, `ceil(rate * n)`.
    pub fn num_contaminated(&self) -> usize {
        if self.contaminated {
            (self.contamination_rate * self.n as f64).ceil() as usize
        } else {
            0
        }
    }
}

/// Two generated views with their ground truth.
#[derive(Debug, Clone)]
pub struct Synthetic {
    pub x: DataView,
    pub y: DataView,
    /// Sorted 0-based indices of the contaminated rows.
    pub contaminated: Vec<usize>,
    /// Latent draws behind the views: `n x 12` pre-transform `Z` (MGSD),
    /// `n x 1` angles (SCSD) or `n x 1` factor scores (SMSD).
    pub latent: DMatrix<f64>,
    /// Per-row noise: the shared offset `e_i` (SCSD) or the noise level (SMSD);
    /// empty for MGSD.
    pub noise: Vec<f64>,
}

fn draw_indices(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> Vec<usize> {
    let k = cfg.num_contaminated();
    if k == 0 {
        return Vec::new();
    }
    let mut idx = index::sample(rng, cfg.n, k).into_vec();
    idx.sort_unstable();
    idx
}

/// `S_ab = r^|a - b|`.
pub fn ar1_covariance(dim: usize, r: f64) -> DMatrix<f64> {
    DMatrix::from_fn(dim, dim, |a, b| r.powi((a as i32 - b as i32).abs()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MgsdOptions {
    /// `12 x 12` covariance of `Z`.
    pub covariance: DMatrix<f64>,
}

impl Default for MgsdOptions {
    fn default() -> Self {
        MgsdOptions {
            covariance: ar1_covariance(12, 0.7),
        }
    }
}

/// MGSD: `X` (`n x 6`) and `Y = log|.|` (`n x 6`).
pub fn gen_mgsd(cfg: &GenConfig, opts: &MgsdOptions) -> Result<Synthetic> {
    cfg.validate()?;
    let cov = &opts.covariance;
    if cov.shape() != (12, 12) {
        return Err(Error::InvalidData(format!(
            "MGSD covariance must be 12x12, got {}x{}",
            cov.nrows(),
            cov.ncols()
        )));
    }
    crate::eigsolve::check_symmetric(cov)?;
    let l = cov.clone().cholesky().ok_or(Error::NotPositiveDefinite)?.unpack();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n;
    let mut z = DMatrix::zeros(n, 12);
    for i in 0..n {
        draw_mgsd_row(&mut rng, &l, 0.0, &mut z, i);
    }
    let contaminated = draw_indices(&mut rng, cfg);
    for &i in &contaminated {
        draw_mgsd_row(&mut rng, &l, 1.0, &mut z, i);
    }
    let x = z.columns(0, 6).into_owned();
    let y = z.columns(6, 6).map(|v| v.abs().ln());
    Ok(Synthetic {
        x: DataView::new(x),
        y: DataView::new(y),
        contaminated,
        latent: z,
        noise: Vec::new(),
    })
}

fn draw_mgsd_row(rng: &mut ChaCha8Rng, l: &DMatrix<f64>, shift: f64, z: &mut DMatrix<f64>, i: usize) {
    loop {
        let e = nalgebra::DVector::from_fn(12, |_, _| StandardNormal.sample(rng));
        let row = l * e;
        // log|.| guard: a probability-zero event, resampled for determinism
        if row.iter().skip(6).all(|v| (v + shift).abs() >= 1e-300) {
            for c in 0..12 {
                z[(i, c)] = row[c] + shift;
            }
            return;
        }
    }
}

/// SCSD: `X`, `Y` each `n x 100`; `latent` holds `Z_i`, `noise` holds `e_i`.
pub fn gen_scsd(cfg: &GenConfig) -> Result<Synthetic> {
    cfg.validate()?;
    let n = cfg.n;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let ideal = Normal::new(0.0, 0.1).expect("valid normal");
    let shifted = Normal::new(1.0, 0.1).expect("valid normal");
    let mut z = Vec::with_capacity(n);
    let mut eta = Vec::with_capacity(n);
    for _ in 0..n {
        z.push(rng.random_range(-std::f64::consts::PI..=std::f64::consts::PI));
        eta.push(ideal.sample(&mut rng));
    }
    let contaminated = draw_indices(&mut rng, cfg);
    for &i in &contaminated {
        eta[i] = shifted.sample(&mut rng);
    }
    let x = DMatrix::from_fn(n, 100, |i, j| ((j + 1) as f64 * z[i]).sin() + eta[i]);
    let y = DMatrix::from_fn(n, 100, |i, j| ((j + 1) as f64 * z[i]).cos() + eta[i]);
    Ok(Synthetic {
        x: DataView::new(x),
        y: DataView::new(y),
        contaminated,
        latent: DMatrix::from_column_slice(n, 1, &z),
        noise: eta,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmsdOptions {
    pub snp_dim: usize,
    pub fmri_dim: usize,
    pub signal: f64,
    /// Noise level of ideal rows; drawn uniformly from `{1, .., 10}` if unset.
    pub noise: Option<f64>,
    /// Noise level of contaminated rows.
    pub contaminated_noise: f64,
    /// Fraction of leading features carrying the latent factor.
    pub support: f64,
}

impl Default for SmsdOptions {
    fn default() -> Self {
        SmsdOptions {
            snp_dim: 1000,
            fmri_dim: 1000,
            signal: 0.5,
            noise: None,
            contaminated_noise: 20.0,
            support: 0.1,
        }
    }
}

/// SMSD: `x` is the SNP view (`n x snp_dim`, values in `{0, 1, 2}`), `y` the
/// fMRI view (`n x fmri_dim`).
///
/// With latent `u_i ~ N(0, 1)` and loadings equal to one on the first
/// `support` fraction of features (zero elsewhere),
/// `fMRI_i = signal u_i w + s e_i` and the SNP liability
/// `signal u_i v + s d_i` is cut at the tertiles of its ideal distribution.
pub fn gen_smsd(cfg: &GenConfig, opts: &SmsdOptions) -> Result<Synthetic> {
    cfg.validate()?;
    if opts.snp_dim == 0 || opts.fmri_dim == 0 {
        return Err(Error::InvalidData("SMSD dimensions must be positive".into()));
    }
    if !(0.0..=1.0).contains(&opts.support) {
        return Err(Error::InvalidData(format!(
            "SMSD support fraction must lie in [0, 1], got {}",
            opts.support
        )));
    }
    let n = cfg.n;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let noise = match opts.noise {
        Some(s) => s,
        None => rng.random_range(1..=10) as f64,
    };
    if !(noise > 0.0 && noise.is_finite()) {
        return Err(Error::InvalidData(format!(
            "SMSD noise level must be positive, got {noise}"
        )));
    }
    let snp_support = (opts.support * opts.snp_dim as f64).ceil() as usize;
    let fmri_support = (opts.support * opts.fmri_dim as f64).ceil() as usize;
    let load = |c: usize, support: usize| if c < support { 1.0 } else { 0.0 };

    let u: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let mut liability = DMatrix::zeros(n, opts.snp_dim);
    let mut fmri = DMatrix::zeros(n, opts.fmri_dim);
    let mut levels = vec![noise; n];
    let draw_row = |rng: &mut ChaCha8Rng, i: usize, s: f64, lia: &mut DMatrix<f64>, fm: &mut DMatrix<f64>| {
        for c in 0..opts.fmri_dim {
            let e: f64 = StandardNormal.sample(rng);
            fm[(i, c)] = opts.signal * u[i] * load(c, fmri_support) + s * e;
        }
        for c in 0..opts.snp_dim {
            let d: f64 = StandardNormal.sample(rng);
            lia[(i, c)] = opts.signal * u[i] * load(c, snp_support) + s * d;
        }
    };
    for i in 0..n {
        draw_row(&mut rng, i, noise, &mut liability, &mut fmri);
    }
    let contaminated = draw_indices(&mut rng, cfg);
    for &i in &contaminated {
        draw_row(&mut rng, i, opts.contaminated_noise, &mut liability, &mut fmri);
        levels[i] = opts.contaminated_noise;
    }
    let snp = DMatrix::from_fn(n, opts.snp_dim, |i, c| {
        let sd = (opts.signal * opts.signal * load(c, snp_support) + noise * noise).sqrt();
        let cut = TERTILE_Z * sd;
        let v = liability[(i, c)];
        if v < -cut {
            0.0
        } else if v <= cut {
            1.0
        } else {
            2.0
        }
    });
    Ok(Synthetic {
        x: DataView::new(snp),
        y: DataView::new(fmri),
        contaminated,
        latent: DMatrix::from_column_slice(n, 1, &u),
        noise: levels,
    })
}
