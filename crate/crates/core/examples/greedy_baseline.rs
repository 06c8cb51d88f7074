//! The greedy splitting baseline under strict and majority purity.

use morphbox::baselines::{train_greedy, GreedyConfig, Purity};
use morphbox::data::{make_blobs, train_test_split};
use morphbox::eval::macro_f1;
use morphbox::minimax::predict_batch;

fn main() -> morphbox::Result<()> {
    let ds = make_blobs(600, 2, 9, 1.5, 3, 7)?;
    let (train, test) = train_test_split(&ds, 0.25, 0, true)?;
    for purity in [Purity::Strict, Purity::Majority] {
        let cfg = GreedyConfig {
            purity,
            ..GreedyConfig::default()
        };
        let out = train_greedy(&train, &cfg)?;
        let f1 = |part: &morphbox::data::Dataset| -> morphbox::Result<f64> {
            macro_f1(
                part.labels(),
                &predict_batch(part.features(), &out.model)?,
                part.n_classes(),
            )
        };
        println!(
            "{purity:?}: {} boxes, {} impure, train F1 {:.3}, test F1 {:.3}",
            out.model.box_count(),
            out.impure.len(),
            f1(&train)?,
            f1(&test)?
        );
    }
    Ok(())
}
