use morphbox::ccp::{linearized_psi, select_istar};
use morphbox::eval::{error_rate, macro_f1, paired_t_test};
use morphbox::minimax::{
    block_output, classify, dc_f, dc_g, module_output, predict_batch, psi, ClassModule, Hyperbox, MpclModel,
};
use proptest::prelude::*;

fn boxes(n: usize, k: usize) -> impl Strategy<Value = Vec<Hyperbox>> {
    prop::collection::vec(
        (
            prop::collection::vec(-5.0..5.0f64, n),
            prop::collection::vec(0.0..4.0f64, n),
        ),
        k,
    )
    .prop_map(|raw| {
        raw.into_iter()
            .map(|(a, w)| {
                let b = a.iter().zip(&w).map(|(x, y)| x + y).collect();
                Hyperbox::new(a, b).unwrap()
            })
            .collect()
    })
}

fn point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-8.0..8.0f64, n)
}

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=8, 1usize..=6)
}

fn shifted(b: &Hyperbox, t: &[f64]) -> Hyperbox {
    let lo = b.lower().iter().zip(t).map(|(x, y)| x + y).collect();
    let hi = b.upper().iter().zip(t).map(|(x, y)| x + y).collect();
    Hyperbox::new(lo, hi).unwrap()
}

fn blend(p: &Hyperbox, q: &Hyperbox, lam: f64) -> Hyperbox {
    let mix = |u: &[f64], v: &[f64]| {
        u.iter()
            .zip(v)
            .map(|(a, b)| lam * a + (1.0 - lam) * b)
            .collect::<Vec<_>>()
    };
    Hyperbox::new(mix(p.lower(), q.lower()), mix(p.upper(), q.upper())).unwrap()
}

proptest! {
    #[test]
    fn sign_identity_and_membership((x, b) in (1usize..=8).prop_flat_map(|n| (point(n), boxes(n, 1)))) {
        let b = &b[0];
        let h = block_output(&x, b).unwrap();
        prop_assert_eq!(h, -psi(&x, b).unwrap());
        prop_assert_eq!(h >= 0.0, b.contains(&x));
    }

    #[test]
    fn points_inside_boxes_are_members((b, t) in (1usize..=8).prop_flat_map(|n| (boxes(n, 1), prop::collection::vec(0.0..=1.0f64, n)))) {
        let b = &b[0];
        let x: Vec<f64> = (0..b.dim()).map(|i| b.lower()[i] + t[i] * (b.upper()[i] - b.lower()[i])).collect();
        let inside = x.iter().enumerate().all(|(i, v)| b.lower()[i] <= *v && *v <= b.upper()[i]);
        prop_assert_eq!(block_output(&x, b).unwrap() >= 0.0, inside);
    }

    #[test]
    fn dc_identity((x, bs) in dims().prop_flat_map(|(n, k)| (point(n), boxes(n, k)))) {
        let m = ClassModule::new(1, bs).unwrap();
        let lhs = dc_f(&x, &m).unwrap() - dc_g(&x, &m).unwrap();
        prop_assert!((lhs - module_output(&x, &m).unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn psi_dc_parts_are_convex_in_parameters(
        (x, p, q, lam) in dims().prop_flat_map(|(n, k)| (point(n), boxes(n, k), boxes(n, k), 0.0..=1.0f64))
    ) {
        let mixed: Vec<Hyperbox> = p.iter().zip(&q).map(|(a, b)| blend(a, b, lam)).collect();
        for ((a, b), c) in p.iter().zip(&q).zip(&mixed) {
            let rhs = lam * psi(&x, a).unwrap() + (1.0 - lam) * psi(&x, b).unwrap();
            prop_assert!(psi(&x, c).unwrap() <= rhs + 1e-12);
        }
        let (mp, mq, mm) = (
            ClassModule::new(1, p).unwrap(),
            ClassModule::new(1, q).unwrap(),
            ClassModule::new(1, mixed).unwrap(),
        );
        for f in [dc_f, dc_g] {
            let rhs = lam * f(&x, &mp).unwrap() + (1.0 - lam) * f(&x, &mq).unwrap();
            prop_assert!(f(&x, &mm).unwrap() <= rhs + 1e-9);
        }
    }

    #[test]
    fn translation_leaves_outputs_unchanged(
        (x, bs, t) in dims().prop_flat_map(|(n, k)| (point(n), boxes(n, k), prop::collection::vec(-3.0..3.0f64, n)))
    ) {
        let xt: Vec<f64> = x.iter().zip(&t).map(|(a, b)| a + b).collect();
        let moved: Vec<Hyperbox> = bs.iter().map(|b| shifted(b, &t)).collect();
        for (b, m) in bs.iter().zip(&moved) {
            prop_assert!((psi(&x, b).unwrap() - psi(&xt, m).unwrap()).abs() <= 1e-12);
            prop_assert!((block_output(&x, b).unwrap() - block_output(&xt, m).unwrap()).abs() <= 1e-12);
        }
        let before = module_output(&x, &ClassModule::new(1, bs).unwrap()).unwrap();
        let after = module_output(&xt, &ClassModule::new(1, moved).unwrap()).unwrap();
        prop_assert!((before - after).abs() <= 1e-12);
    }

    #[test]
    fn classify_is_invariant_under_common_shift(
        (x, b1, b2, b3, c) in (1usize..=5).prop_flat_map(|n| (point(n), boxes(n, 2), boxes(n, 3), boxes(n, 1), -4i32..=4))
    ) {
        // Shifts can move differences by one rounding step; continuous draws
        // make a tie that this could flip practically impossible.
        let c = c as f64;
        let shift = |bs: &[Hyperbox]| bs.iter().map(|b| shifted(b, &vec![c; b.dim()])).collect::<Vec<_>>();
        let model = |a: Vec<Hyperbox>, b: Vec<Hyperbox>, d: Vec<Hyperbox>| {
            MpclModel::new(vec![
                ClassModule::new(1, a).unwrap(),
                ClassModule::new(2, b).unwrap(),
                ClassModule::new(3, d).unwrap(),
            ])
            .unwrap()
        };
        let xs: Vec<f64> = x.iter().map(|v| v + c).collect();
        let m0 = model(b1.clone(), b2.clone(), b3.clone());
        let m1 = model(shift(&b1), shift(&b2), shift(&b3));
        let y0 = classify(&x, &m0).unwrap();
        prop_assert_eq!(y0, classify(&xs, &m1).unwrap());
        prop_assert_eq!(predict_batch(&x, &m0).unwrap(), vec![y0]);
    }

    #[test]
    fn linearisation_underestimates_psi(
        (x, at, other) in (1usize..=8).prop_flat_map(|n| (point(n), boxes(n, 1), boxes(n, 1)))
    ) {
        let facet = select_istar(&x, &at[0]).unwrap();
        prop_assert!((linearized_psi(&x, &at[0], facet).unwrap() - psi(&x, &at[0]).unwrap()).abs() <= 1e-12);
        prop_assert!(linearized_psi(&x, &other[0], facet).unwrap() <= psi(&x, &other[0]).unwrap() + 1e-12);
    }

    #[test]
    fn metrics_are_permutation_and_relabel_invariant(
        pairs in prop::collection::vec((1usize..=3, 1usize..=3), 1..60),
        rot in 1usize..3,
        seed in any::<u64>(),
    ) {
        let yt: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let yp: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        let f = macro_f1(&yt, &yp, 3).unwrap();
        let e = error_rate(&yt, &yp).unwrap();

        let mut order: Vec<usize> = (0..pairs.len()).collect();
        let mut s = seed;
        for i in (1..order.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        let pt: Vec<usize> = order.iter().map(|&i| yt[i]).collect();
        let pp: Vec<usize> = order.iter().map(|&i| yp[i]).collect();
        prop_assert!((macro_f1(&pt, &pp, 3).unwrap() - f).abs() <= 1e-12);
        prop_assert!((error_rate(&pt, &pp).unwrap() - e).abs() <= 1e-12);

        let relabel = |l: usize| (l - 1 + rot) % 3 + 1;
        let rt: Vec<usize> = yt.iter().map(|&l| relabel(l)).collect();
        let rp: Vec<usize> = yp.iter().map(|&l| relabel(l)).collect();
        prop_assert!((macro_f1(&rt, &rp, 3).unwrap() - f).abs() <= 1e-12);
    }

    #[test]
    fn t_statistic_is_antisymmetric(
        ab in prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 2..30)
    ) {
        let a: Vec<f64> = ab.iter().map(|p| p.0).collect();
        let b: Vec<f64> = ab.iter().map(|p| p.1).collect();
        let x = paired_t_test(&a, &b).unwrap();
        let y = paired_t_test(&b, &a).unwrap();
        prop_assert_eq!(x.t, -y.t);
        prop_assert!((0.0..=1.0).contains(&x.p_two_sided));
    }
}
