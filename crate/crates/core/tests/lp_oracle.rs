mod common;

use common::{random_bounded_lp, vertex_oracle};
use morphbox::lp::{self, check_solution, LpOptions, LpStatus};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn random_bounded_lps_match_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let opts = LpOptions::default();
    let mut infeasible = 0;
    for case in 0..300 {
        let p = random_bounded_lp(&mut rng, 6, 10, case % 4 != 0);
        let sol = lp::solve(&p, &opts).unwrap();
        match vertex_oracle(&p) {
            Some((best, _)) => {
                assert_eq!(sol.status, LpStatus::Optimal, "case {case}");
                let obj = sol.objective.unwrap();
                assert!((obj - best).abs() <= 1e-7, "case {case}: {obj} vs {best}");
                assert!(check_solution(&p, &sol, 1e-7), "case {case}");
            }
            None => {
                infeasible += 1;
                assert_eq!(sol.status, LpStatus::Infeasible, "case {case}");
            }
        }
    }
    assert!(infeasible > 0 && infeasible < 150);
}

#[test]
fn no_sampled_feasible_point_beats_the_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let opts = LpOptions::default();
    for case in 0..60 {
        let p = random_bounded_lp(&mut rng, 4, 8, true);
        let sol = lp::solve(&p, &opts).unwrap();
        let obj = sol.objective.unwrap();
        let mut accepted = 0;
        for _ in 0..4000 {
            let x: Vec<f64> = (0..p.n_vars()).map(|_| rng.random_range(-3.0..3.0)).collect();
            if p.max_violation(&x) <= 0.0 {
                accepted += 1;
                assert!(p.evaluate(&x) >= obj - 1e-7, "case {case}");
            }
        }
        assert!(accepted > 0 || p.n_vars() > 3, "case {case}: sampler found nothing");
    }
}

#[test]
fn identical_problems_give_identical_solutions() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let p = random_bounded_lp(&mut rng, 6, 10, true);
        let a = lp::solve(&p, &LpOptions::default()).unwrap();
        let b = lp::solve(&p.clone(), &LpOptions::default()).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }
}
