//! Gradient training of the same model, with a finite-difference check of
//! the loss gradient.

use morphbox::baselines::{bce_loss, bce_loss_grad, train_adam, AdamConfig, BoxParams};
use morphbox::ccp::ClassProblem;
use morphbox::data::make_blobs;
use morphbox::eval::macro_f1;
use morphbox::minimax::{predict_batch, Hyperbox};

fn main() -> morphbox::Result<()> {
    let ds = make_blobs(400, 2, 6, 1.5, 2, 3)?;

    let cp = ClassProblem::from_dataset(&ds, 1)?;
    let boxes = vec![Hyperbox::new(vec![-3.1, -2.3], vec![1.7, 2.9])?];
    let params = BoxParams::from_boxes(&boxes);
    let (_, grad) = bce_loss_grad(&cp, &params);
    let h = 1e-6;
    for (i, g) in grad.iter().enumerate() {
        let (mut up, mut down) = (params.clone(), params.clone());
        up.values[i] += h;
        down.values[i] -= h;
        let fd = (bce_loss(&cp, &up) - bce_loss(&cp, &down)) / (2.0 * h);
        println!("coordinate {i}: analytic {g:+.6}, central difference {fd:+.6}");
    }

    let cfg = AdamConfig {
        learning_rate: 0.05,
        epochs: 200,
        ..AdamConfig::default()
    };
    let (model, traces) = train_adam(&ds, &cfg, 3, 0)?;
    for t in &traces {
        let first = t.losses.first().copied().unwrap_or(f64::NAN);
        let last = t.losses.last().copied().unwrap_or(f64::NAN);
        println!(
            "class {}: loss {first:.4} -> {last:.4}, largest step {:.4}",
            t.class_id, t.max_step
        );
    }
    let f1 = macro_f1(ds.labels(), &predict_batch(ds.features(), &model)?, ds.n_classes())?;
    println!("train macro F1 {f1:.3}");
    Ok(())
}
