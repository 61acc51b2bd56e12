//! Score every observation by its influence on the first canonical
//! correlation and flag the Tukey-fence outliers of a contaminated sample.
//!
//! cargo run --release --example influence_outliers

use kcca_influence::influence::eif_cc;
use kcca_influence::kcca::{self, KccaConfig};
use kcca_influence::report::{detect_outliers, stem_leaf};
use kcca_influence::synthdata::{gen_scsd, GenConfig};

fn main() -> kcca_influence::Result<()> {
    let data = gen_scsd(&GenConfig::new(200, 7).contaminated(true))?;
    let model = kcca::fit(&data.x, &data.y, &KccaConfig::default())?;
    let scores = eif_cc(&model, 0)?;

    println!("{}", stem_leaf(&scores.values, 8)?);
    let flagged = detect_outliers(&scores.values)?;
    let hits = flagged.iter().filter(|i| data.contaminated.contains(i)).count();
    println!("flagged  {flagged:?}");
    println!("planted  {:?}", data.contaminated);
    println!("recall {}/{}", hits, data.contaminated.len());
    Ok(())
}
