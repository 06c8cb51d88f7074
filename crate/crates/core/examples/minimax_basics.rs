//! Hyperbox activations, module outputs and classification by hand.

use morphbox::minimax::{block_output, classify, dc_f, dc_g, module_output, psi, ClassModule, Hyperbox, MpclModel};

fn main() -> morphbox::Result<()> {
    let left = ClassModule::new(1, vec![Hyperbox::new(vec![0.0, 0.0], vec![2.0, 2.0])?])?;
    let right = ClassModule::new(
        2,
        vec![
            Hyperbox::new(vec![3.0, 0.0], vec![5.0, 1.0])?,
            Hyperbox::new(vec![3.0, 1.5], vec![4.0, 4.0])?,
        ],
    )?;

    let x = [1.0, 0.5];
    let b = &left.boxes()[0];
    println!("h(x) = {}, psi(x) = {}", block_output(&x, b)?, psi(&x, b)?);

    // The module output is a difference of two convex functions of the boxes.
    let out = module_output(&x, &right)?;
    println!(
        "class 2 output {out} = f {} - g {}",
        dc_f(&x, &right)?,
        dc_g(&x, &right)?
    );

    let model = MpclModel::new(vec![left, right])?;
    for p in [[1.0, 1.0], [4.5, 0.5], [3.5, 3.0], [2.6, 1.2]] {
        println!("{p:?} -> class {}", classify(&p, &model)?);
    }
    Ok(())
}
