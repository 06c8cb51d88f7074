//! Solving a small LP and round-tripping it through the text dump format.

use morphbox::lp::{self, check_solution, read_dump, write_dump, LpOptions, LpProblem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // maximise x + 2y  s.t.  x + y <= 4, x - y <= 2, y <= 3, x, y >= 0
    let p = LpProblem::new(
        vec![-1.0, -2.0],
        vec![1.0, 1.0, 1.0, -1.0, 0.0, 1.0],
        vec![4.0, 2.0, 3.0],
        vec![Some(0.0), Some(0.0)],
    )?;
    let sol = lp::solve(&p, &LpOptions::default())?;
    println!(
        "{:?}: x = {:?}, objective {:?}, {} pivots",
        sol.status, sol.x, sol.objective, sol.iterations
    );
    assert!(check_solution(&p, &sol, 1e-9));

    let mut text = Vec::new();
    write_dump(&p, &mut text)?;
    print!("{}", String::from_utf8_lossy(&text));
    assert_eq!(read_dump(text.as_slice())?, p);
    Ok(())
}
