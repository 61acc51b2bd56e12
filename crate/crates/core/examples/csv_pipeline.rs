//! Round-trip views through CSV files and fit from the parsed matrices.
//!
//! cargo run --example csv_pipeline

use kcca_influence::cli::{parse_csv, write_csv};
use kcca_influence::influence::eif_cc;
use kcca_influence::kcca::{self, KccaConfig};
use kcca_influence::synthdata::{gen_mgsd, GenConfig, MgsdOptions};

fn main() -> kcca_influence::Result<()> {
    let dir = std::env::temp_dir().join("kcca-csv-pipeline");
    std::fs::create_dir_all(&dir)?;
    let data = gen_mgsd(&GenConfig::new(100, 2), &MgsdOptions::default())?;
    for (name, view) in [("x.csv", &data.x), ("y.csv", &data.y)] {
        let header: Vec<String> = (0..view.ncols()).map(|j| format!("v{}", j + 1)).collect();
        write_csv(&dir.join(name), &header, &view.rows(), None)?;
    }

    let x = parse_csv(&dir.join("x.csv"))?;
    let y = parse_csv(&dir.join("y.csv"))?;
    let model = kcca::fit(&x, &y, &KccaConfig::default())?;
    let scores = eif_cc(&model, 0)?;
    let rows: Vec<Vec<f64>> = scores.values.iter().map(|&s| vec![s]).collect();
    write_csv(&dir.join("scores.csv"), &["influence".into()], &rows, None)?;
    println!("rho_1 = {:.5}; scores in {}", model.rho()[0], dir.display());
    Ok(())
}
