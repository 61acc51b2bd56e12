//! Multiple kernel CCA across three views, and the influence of each
//! observation on the leading sum-correlation score.
//!
//! cargo run --release --example mkcca_three_views

use kcca_influence::influence::eif_mkcca_cc;
use kcca_influence::mkcca::{fit_multi, MkccaConfig};
use kcca_influence::report::detect_outliers;
use kcca_influence::synthdata::{gen_scsd, GenConfig};
use kcca_influence::DataView;

fn main() -> kcca_influence::Result<()> {
    let data = gen_scsd(&GenConfig::new(150, 3).contaminated(true))?;
    // a third view: the product of the two harmonics
    let z = DataView::new(data.x.values().component_mul(data.y.values()));
    let model = fit_multi(&[data.x, data.y, z], &MkccaConfig::default())?;
    println!("sum-correlation score {:.4} (at most {})", model.rho()[0], model.num_views() - 1);

    let scores = eif_mkcca_cc(&model, 0)?;
    println!("rms influence {:.3e}", scores.norm() / (scores.len() as f64).sqrt());
    println!("flagged {:?}, planted {:?}", detect_outliers(&scores.values)?, data.contaminated);
    Ok(())
}
