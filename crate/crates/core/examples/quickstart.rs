//! Fit two-view kernel CCA on the sine/cosine design and print the leading
//! canonical correlations.
//!
//! cargo run --example quickstart

use kcca_influence::kcca::{self, KccaConfig};
use kcca_influence::synthdata::{gen_scsd, GenConfig};

fn main() -> kcca_influence::Result<()> {
    let data = gen_scsd(&GenConfig::new(300, 42))?;
    let cfg = KccaConfig {
        num_components: 3,
        ..Default::default()
    };
    let model = kcca::fit(&data.x, &data.y, &cfg)?;
    let (kx, ky) = model.kernels();
    println!("n = {}, kernels {kx:?} / {ky:?}, kappa = {}", model.n(), model.kappa());
    for (j, rho) in model.rho().iter().enumerate() {
        println!("rho_{} = {rho:.6}", j + 1);
    }
    let v = model.variates(0)?;
    println!("first standardized variates: x {:.3?}", &v.fbar_x[..5]);
    println!("                             y {:.3?}", &v.fbar_y[..5]);
    Ok(())
}
