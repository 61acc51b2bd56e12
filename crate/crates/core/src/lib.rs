//! Kernel canonical correlation analysis (two-view and multi-view) with
//! closed-form empirical influence functions for spotting outlying
//! observations in multi-source data.
//!
//! The pipeline mirrors how the pieces are used in practice:
//!
//! 1. build a [`DataView`] per source (or read one with [`cli::parse_csv`]),
//! 2. fit [`kcca::fit`] (two views) or [`mkcca::fit_multi`] (p views),
//! 3. score observations with [`influence::eif_cc`] / [`influence::eif_mkcca_cc`],
//! 4. display and extract with [`report::stem_leaf`], [`report::index_plot`]
//!    and [`report::detect_outliers`].
//!
//! Synthetic designs with known contamination live in [`synthdata`].

pub mod cli;
pub mod data;
pub mod eigsolve;
pub mod error;
pub mod influence;
pub mod kcca;
pub mod kernels;
pub mod mkcca;
pub mod report;
pub mod synthdata;

mod stats;

pub use data::DataView;
pub use error::{Error, Result};
pub use kcca::{KccaConfig, KccaModel};
pub use kernels::{Bandwidth, Kernel, KernelSpec};
pub use mkcca::{MkccaConfig, MkccaModel};
