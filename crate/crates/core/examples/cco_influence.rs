//! Influence of a single contaminating point on the cross-covariance operator,
//! evaluated in closed form at one observation.
//!
//! cargo run --example cco_influence

use kcca_influence::influence::eif_cco;
use kcca_influence::kernels::KernelSpec;
use kcca_influence::synthdata::{gen_scsd, GenConfig};

fn main() -> kcca_influence::Result<()> {
    let data = gen_scsd(&GenConfig::new(80, 9))?;
    let spec = KernelSpec::default();
    let near = (data.x.row(1), data.y.row(1));
    let far: (Vec<f64>, Vec<f64>) = (near.0.iter().map(|v| v + 5.0).collect(), near.1.iter().map(|v| v - 5.0).collect());
    for (name, point) in [("near", &near), ("far", &far)] {
        let v = eif_cco(&data.x, &data.y, &spec, &spec, 0, (&point.0, &point.1))?;
        println!("{name}: {v:.6}");
    }
    Ok(())
}
