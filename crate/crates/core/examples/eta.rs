//! Contrast an ideal and a contaminated sample with the ratio measures
//! eta_rho (canonical correlation) and eta_f (canonical variates).
//!
//! cargo run --release --example eta

use kcca_influence::influence::InfluenceRun;
use kcca_influence::kcca::{self, KccaConfig};
use kcca_influence::synthdata::{gen_scsd, GenConfig};

fn main() -> kcca_influence::Result<()> {
    let cfg = KccaConfig::default();
    for seed in 0..5 {
        let ideal = gen_scsd(&GenConfig::new(120, seed))?;
        let dirty = gen_scsd(&GenConfig::new(120, seed).contaminated(true))?;
        let a = InfluenceRun::compute(&kcca::fit(&ideal.x, &ideal.y, &cfg)?, 0)?;
        let b = InfluenceRun::compute(&kcca::fit(&dirty.x, &dirty.y, &cfg)?, 0)?;
        let (eta_rho, eta_f) = kcca_influence::influence::eta_measures(&a, &b)?;
        println!("seed {seed}: eta_rho = {eta_rho:.4}, eta_f = {eta_f:.4}");
    }
    Ok(())
}
