//! Reference trainers used for comparison against the convex-concave trainer.

mod adam;
mod greedy;

pub use adam::{bce_loss, bce_loss_grad, train_adam, train_adam_class_from, AdamConfig, AdamTrace, BoxParams};
pub use greedy::{train_greedy, GreedyConfig, GreedyOutcome, ImpureBox, Purity};
