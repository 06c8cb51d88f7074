//! Training the hyperbox classifier with convex-concave iterations on blobs.

use morphbox::ccp::{self, TrainConfig};
use morphbox::data::{apply_scaler, fit_scaler, make_blobs, train_test_split};
use morphbox::eval::Metrics;
use morphbox::minimax::predict_batch;

fn main() -> morphbox::Result<()> {
    let ds = make_blobs(600, 2, 9, 1.5, 3, 7)?;
    let (train, test) = train_test_split(&ds, 0.25, 0, true)?;
    let scaler = fit_scaler(&train);
    let (train, test) = (apply_scaler(&train, &scaler)?, apply_scaler(&test, &scaler)?);

    let cfg = TrainConfig {
        boxes_per_class: 3,
        ..TrainConfig::default()
    };
    let (model, traces) = ccp::train(&train, &cfg)?;
    for t in &traces {
        let obj: Vec<String> = t.objectives().iter().map(|o| format!("{o:.3}")).collect();
        println!(
            "class {}: objective {} (converged: {})",
            t.class_id,
            obj.join(" -> "),
            t.converged
        );
    }

    for (name, part) in [("train", &train), ("test", &test)] {
        let pred = predict_batch(part.features(), &model)?;
        let m = Metrics::compute(part.labels(), &pred, part.n_classes(), 0.0)?;
        println!(
            "{name}: macro F1 {:.3}, error {:.1}%",
            m.macro_f1, m.misclassification_rate
        );
    }
    Ok(())
}
