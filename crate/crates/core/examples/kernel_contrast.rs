//! Influence of a point moved further and further out along a ray: growing
//! without bound under the linear kernel, levelling off under the gaussian.
//!
//! cargo run --release --example kernel_contrast

use kcca_influence::influence::eif_cc_at_points;
use kcca_influence::kcca::{self, KccaConfig};
use kcca_influence::kernels::KernelSpec;
use kcca_influence::synthdata::{gen_mgsd, GenConfig, MgsdOptions};
use kcca_influence::DataView;

fn main() -> kcca_influence::Result<()> {
    let data = gen_mgsd(&GenConfig::new(100, 1), &MgsdOptions::default())?;
    let x0 = data.x.values().rows(0, 1).into_owned();
    let y0 = data.y.values().rows(0, 1).into_owned();
    println!("{:>8} {:>14} {:>14}", "t", "linear", "gaussian");
    let lin = kcca::fit(&data.x, &data.y, &KccaConfig::with_kernels(KernelSpec::Linear))?;
    let gau = kcca::fit(&data.x, &data.y, &KccaConfig::default())?;
    for t in [1.0, 10.0, 100.0, 1000.0] {
        let px = DataView::new(&x0 * t);
        let py = DataView::new(&y0 * t);
        let l = eif_cc_at_points(&lin, 0, &px, &py)?[0];
        let g = eif_cc_at_points(&gau, 0, &px, &py)?[0];
        println!("{t:>8} {l:>14.4e} {g:>14.4e}");
    }
    Ok(())
}
