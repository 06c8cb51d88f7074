//! A small repeated-run comparison of all three trainers.

use std::path::PathBuf;

use morphbox::ccp::TrainConfig;
use morphbox::cli::{run_experiment, BlobsSpec, DatasetSource, ExperimentSpec, SplitSpec, Trainer};

fn main() -> morphbox::Result<()> {
    let spec = ExperimentSpec {
        dataset: DatasetSource::Blobs(BlobsSpec {
            samples: 400,
            features: 2,
            centers: 8,
            std: 1.5,
            classes: 3,
            seed: 42,
        }),
        split: SplitSpec::default(),
        scale: true,
        trainers: vec![Trainer::Ccp, Trainer::Greedy, Trainer::Adam],
        runs: 5,
        seed_base: 0,
        output_dir: PathBuf::from("experiment-out"),
        alpha: 0.05,
        ccp: TrainConfig {
            boxes_per_class: 3,
            ..TrainConfig::default()
        },
        greedy: Default::default(),
        adam: Default::default(),
    };
    let report = run_experiment(&spec, |t, run, f1| {
        if let Some(f1) = f1 {
            eprintln!("{} run {run}: test F1 {f1:.3}", t.label());
        }
    })?;
    println!("{}", report.table());
    for d in &report.dominance {
        println!("{} dominates {} (p = {:.2e})", d.winner, d.loser, d.p_two_sided);
    }
    Ok(())
}
