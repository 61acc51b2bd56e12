//! Write an SVG index plot of influence scores, coloured by group.
//!
//! cargo run --release --example index_plot -- plot.svg

use kcca_influence::influence::eif_cc;
use kcca_influence::kcca::{self, KccaConfig};
use kcca_influence::report::index_plot;
use kcca_influence::synthdata::{gen_scsd, GenConfig};

fn main() -> kcca_influence::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "index_plot.svg".into());
    let data = gen_scsd(&GenConfig::new(200, 5).contaminated(true))?;
    let model = kcca::fit(&data.x, &data.y, &KccaConfig::default())?;
    let scores = eif_cc(&model, 0)?;
    let labels: Vec<String> = (0..200)
        .map(|i| if data.contaminated.contains(&i) { "contaminated" } else { "ideal" }.to_string())
        .collect();
    index_plot(&scores.values, Some(&labels), path.as_ref())?;
    println!("wrote {path}");
    Ok(())
}
