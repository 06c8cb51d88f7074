//! Generating, saving, reloading, splitting and standardising a dataset.

use morphbox::data::{apply_scaler, fit_scaler, inverse_scaler, load_csv, make_blobs, save_csv, train_test_split};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ds = make_blobs(300, 2, 6, 1.0, 3, 11)?;
    println!("{} samples, class counts {:?}", ds.len(), ds.class_counts());

    let dir = tempfile::tempdir()?;
    let path = dir.path().join("blobs.csv");
    save_csv(&ds, &path)?;
    let back = load_csv(&path, "label")?;
    assert_eq!(back.labels(), ds.labels());

    let (train, test) = train_test_split(&back, 0.25, 0, true)?;
    println!("train {:?}, test {:?}", train.class_counts(), test.class_counts());

    let scaler = fit_scaler(&train);
    let scaled = apply_scaler(&train, &scaler)?;
    println!("scaler mean {:?}, std {:?}", scaler.mean, scaler.std);
    println!("scaled bounds {:?}", scaled.bounds());
    let restored = inverse_scaler(&scaled, &scaler)?;
    let drift = restored
        .features()
        .iter()
        .zip(train.features())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("round-trip drift {drift:.2e}");
    Ok(())
}
