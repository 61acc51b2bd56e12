//! k-fold gap between training and held-out canonical correlation, for a
//! few regularization strengths.
//!
//! cargo run --release --example cv_gap

use kcca_influence::kcca::{cv_gap, KccaConfig};
use kcca_influence::synthdata::{gen_mgsd, GenConfig, MgsdOptions};

fn main() -> kcca_influence::Result<()> {
    let data = gen_mgsd(&GenConfig::new(200, 11), &MgsdOptions::default())?;
    for kappa in [1e-5, 1e-3, 1e-1] {
        let cfg = KccaConfig {
            kappa,
            ..Default::default()
        };
        let gap = cv_gap(&data.x, &data.y, 5, &cfg, 0)?;
        println!("kappa {kappa:>7.0e}: gap {:.4} ± {:.4} over {} folds", gap.mean, gap.sd, gap.gaps.len());
    }
    Ok(())
}
