//! Loads a CSV with missing cells, splits it, and standardizes features
//! using training-rows statistics only.

use std::fs;

use genefront::dataset::{load_csv, preprocess, split, CsvOptions, LabelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("genefront_dataset_pipeline");
    fs::create_dir_all(&dir)?;
    let path = dir.join("sensors.csv");
    fs::write(
        &path,
        "\
temp,pressure,flow,label
20.1,1.00,5.5,0
21.3,,5.1,0
19.8,1.02,NaN,0
25.2,1.10,7.9,1
24.9,1.08,8.3,1
26.0,,8.0,1
20.5,0.99,5.0,0
25.5,1.11,8.1,1
19.9,1.01,5.2,0
24.7,1.09,7.8,1
",
    )?;

    let opts = CsvOptions::new(LabelSpec::Column("label".into()));
    let raw = load_csv(&path, &opts)?;
    println!(
        "loaded {} rows x {} features: {:?}",
        raw.n_rows(),
        raw.n_features(),
        raw.feature_names
    );

    let sp = split(&raw, 0.7, 11)?;
    println!(
        "split: {} train rows, {} test rows",
        sp.train_rows.len(),
        sp.test_rows.len()
    );

    let ds = preprocess(&raw, Some(&sp))?;
    println!("preprocessing steps: {:?}", ds.provenance.steps);
    println!(
        "dropped zero-variance columns: {:?}",
        ds.provenance.zero_variance_features
    );

    let mean: f64 = sp.train_rows.iter().map(|&r| ds.value(r, 0)).sum::<f64>()
        / sp.train_rows.len() as f64;
    println!("first feature mean over training rows after scaling: {mean:.3e}");
    Ok(())
}
