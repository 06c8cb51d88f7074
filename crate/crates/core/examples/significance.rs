//! Paired t-tests and the dominance order over per-run F1 scores.

use morphbox::eval::{dominance_order, paired_t_test};

fn main() -> morphbox::Result<()> {
    let names = vec!["boxes".to_string(), "splits".to_string(), "gradient".to_string()];
    let scores = vec![
        vec![0.86, 0.85, 0.87, 0.84, 0.86, 0.85, 0.86, 0.87],
        vec![0.78, 0.77, 0.79, 0.78, 0.77, 0.78, 0.79, 0.78],
        vec![0.84, 0.86, 0.83, 0.85, 0.84, 0.86, 0.85, 0.84],
    ];
    let t = paired_t_test(&scores[0], &scores[2])?;
    println!(
        "boxes vs gradient: t = {:.3}, dof {}, p = {:.4}",
        t.t, t.dof, t.p_two_sided
    );

    for d in dominance_order(&names, &scores, 0.01)? {
        println!(
            "{} > {}  (t = {:.2}, p = {:.2e})",
            d.winner, d.loser, d.t, d.p_two_sided
        );
    }
    Ok(())
}
