//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach stdout; exits non-zero on any gated
//! failure.

mod common;

use std::path::PathBuf;
use std::time::Instant;

use common::{random_bounded_lp, random_box, random_module, random_point, separable_fixtures, vertex_oracle};
use morphbox::baselines::{bce_loss, bce_loss_grad, BoxParams};
use morphbox::ccp::{self, kmeanspp_init, linearized_psi, select_istar, ClassProblem, TrainConfig};
use morphbox::cli::{
    cmd_train, prepare_data, run_experiment, BlobsSpec, DatasetSource, ExperimentReport, ExperimentSpec, PurityArg,
    SplitSpec, TrainArgs, Trainer,
};
use morphbox::data::{self, make_blobs};
use morphbox::lp::{self, LpOptions, LpStatus};
use morphbox::minimax::{dc_f, dc_g, module_output, predict_batch, psi};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Ledger {
    failed: Vec<String>,
}

impl Ledger {
    fn record(&mut self, id: &str, gated: bool, pass: bool, detail: String) {
        let tag = match (gated, pass) {
            (true, true) => "PASS",
            (true, false) => "FAIL",
            (false, true) => "PASS (soft)",
            (false, false) => "FAIL (soft)",
        };
        println!("[{tag}] {id}: {detail}");
        if gated && !pass {
            self.failed.push(id.to_string());
        }
    }
}

fn blobs_spec(runs: usize) -> ExperimentSpec {
    ExperimentSpec {
        dataset: DatasetSource::Blobs(BlobsSpec {
            samples: 1200,
            features: 2,
            centers: 12,
            std: 1.5,
            classes: 3,
            seed: 42,
        }),
        split: SplitSpec::default(),
        scale: true,
        trainers: vec![Trainer::Ccp, Trainer::Greedy, Trainer::Adam],
        runs,
        seed_base: 0,
        output_dir: PathBuf::from("unused"),
        alpha: 0.01,
        ccp: TrainConfig {
            boxes_per_class: 4,
            gamma: 0.01,
            ..TrainConfig::default()
        },
        greedy: Default::default(),
        adam: Default::default(),
    }
}

fn c1_dc_identity(l: &mut Ledger) {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let started = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let n = rng.random_range(1..=8);
        let k = rng.random_range(1..=6);
        let m = random_module(&mut rng, n, k);
        let x = random_point(&mut rng, n);
        let gap = (dc_f(&x, &m).unwrap() - dc_g(&x, &m).unwrap() - module_output(&x, &m).unwrap()).abs();
        worst = worst.max(gap);
    }
    let secs = started.elapsed().as_secs_f64();
    l.record(
        "C1 DC identity",
        true,
        worst <= 1e-9 && secs < 1.0,
        format!("500 instances, max |f - g - output| = {worst:.2e} (tol 1e-9), {secs:.3}s (< 1s)"),
    );
}

fn c2_underestimator(l: &mut Ledger) {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let started = Instant::now();
    let (mut worst_over, mut worst_tight) = (f64::NEG_INFINITY, 0.0f64);
    for _ in 0..1000 {
        let n = rng.random_range(1..=8);
        let x = random_point(&mut rng, n);
        let at = random_box(&mut rng, n);
        let facet = select_istar(&x, &at).unwrap();
        worst_tight = worst_tight.max((linearized_psi(&x, &at, facet).unwrap() - psi(&x, &at).unwrap()).abs());
        let b = random_box(&mut rng, n);
        worst_over = worst_over.max(linearized_psi(&x, &b, facet).unwrap() - psi(&x, &b).unwrap());
    }
    let secs = started.elapsed().as_secs_f64();
    l.record(
        "C2 subgradient under-estimator",
        true,
        worst_over <= 1e-12 && worst_tight <= 1e-12 && secs < 1.0,
        format!(
            "1000 points: max(lin - psi) = {worst_over:.2e}, gap at expansion point {worst_tight:.2e} (tol 1e-12), {secs:.3}s"
        ),
    );
}

fn c3_lp_oracle(l: &mut Ledger) {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let started = Instant::now();
    let (mut checked, mut worst, mut mismatched) = (0, 0.0f64, 0);
    while checked < 200 {
        let p = random_bounded_lp(&mut rng, 6, 10, true);
        let Some((best, _)) = vertex_oracle(&p) else { continue };
        checked += 1;
        let sol = lp::solve(&p, &LpOptions::default()).unwrap();
        match (sol.status, sol.objective) {
            (LpStatus::Optimal, Some(obj)) => worst = worst.max((obj - best).abs()),
            _ => mismatched += 1,
        }
    }
    let secs = started.elapsed().as_secs_f64();
    l.record(
        "C3 LP oracle",
        true,
        mismatched == 0 && worst <= 1e-7 && secs < 10.0,
        format!("200 bounded LPs (V <= 6, R <= 10): max |solver - vertex oracle| = {worst:.2e} (tol 1e-7), {mismatched} status mismatches, {secs:.2}s"),
    );
}

fn c4_descent(l: &mut Ledger) {
    let spec = blobs_spec(1);
    let (train, _) = prepare_data(&spec).unwrap();
    let started = Instant::now();
    let mut worst = f64::NEG_INFINITY;
    let mut traces = 0;
    for seed in 0..10 {
        let cfg = TrainConfig {
            seed,
            ..spec.ccp.clone()
        };
        let (_, ts) = ccp::train(&train, &cfg).unwrap();
        for t in ts {
            traces += 1;
            for w in t.objectives().windows(2) {
                worst = worst.max(w[1] - w[0]);
            }
        }
    }
    let secs = started.elapsed().as_secs_f64();
    l.record(
        "C4 CCP descent",
        true,
        worst <= 1e-6 && secs < 300.0,
        format!("{traces} class traces over 10 seeds, largest increase {worst:.2e} (slack 1e-6), {secs:.1}s (< 300s)"),
    );
}

fn c5_c6_c8_experiment(l: &mut Ledger) {
    let spec = blobs_spec(50);
    let started = Instant::now();
    let report: ExperimentReport = run_experiment(&spec, |_, _, _| {}).unwrap();
    let secs = started.elapsed().as_secs_f64();
    let ccp = report.get(Trainer::Ccp).unwrap();
    let greedy = report.get(Trainer::Greedy).unwrap();
    let adam = report.get(Trainer::Adam).unwrap();
    println!("{}", report.table());

    let failures: usize = report.trainers.iter().map(|r| r.failures.len()).sum();
    let f1 = ccp.test.macro_f1;
    let err = ccp.test.misclassification_rate.mean;
    let ccp_gap = ccp.train.macro_f1.mean - ccp.test.macro_f1.mean;
    let greedy_gap = greedy.train.macro_f1.mean - greedy.test.macro_f1.mean;
    l.record(
        "C5a CCP mean test F1",
        true,
        failures == 0 && f1.mean >= 0.78,
        format!("{:.4} over {} runs (>= 0.78)", f1.mean, ccp.test.runs.len()),
    );
    l.record(
        "C5b CCP mean test error",
        true,
        err <= 22.0,
        format!("{err:.2}% (<= 22%)"),
    );
    l.record(
        "C5c CCP test F1 spread",
        true,
        f1.std <= 0.04,
        format!("std {:.4} (<= 0.04)", f1.std),
    );
    l.record(
        "C5d CCP beats greedy on test F1",
        true,
        f1.mean > greedy.test.macro_f1.mean,
        format!("{:.4} vs {:.4}", f1.mean, greedy.test.macro_f1.mean),
    );
    l.record(
        "C5e greedy overfits more than CCP",
        true,
        greedy_gap > ccp_gap,
        format!("train-test F1 gap greedy {greedy_gap:.4} vs CCP {ccp_gap:.4}"),
    );
    l.record(
        "C5f experiment runtime",
        true,
        secs <= 1800.0,
        format!("3 trainers x 50 runs in {secs:.1}s (<= 1800s)"),
    );
    let a = adam.test.macro_f1.mean;
    l.record(
        "C6a Adam mean test F1 band",
        true,
        (0.74..=0.88).contains(&a),
        format!("{a:.4} (band [0.74, 0.88])"),
    );
    let ratio = ccp.train.wall_time_seconds.mean / greedy.train.wall_time_seconds.mean;
    l.record(
        "C8 relative speed",
        false,
        ratio <= 100.0,
        format!(
            "per run: greedy {:.3}s, CCP {:.3}s, Adam {:.3}s; CCP/greedy = {ratio:.1} (<= 100)",
            greedy.train.wall_time_seconds.mean, ccp.train.wall_time_seconds.mean, adam.train.wall_time_seconds.mean
        ),
    );
}

fn c6_gradient_check(l: &mut Ledger) {
    let ds = make_blobs(1200, 2, 12, 1.5, 3, 42).unwrap();
    let sc = data::fit_scaler(&ds);
    let ds = data::apply_scaler(&ds, &sc).unwrap();
    let mut worst = 0.0f64;
    let mut checked = 0;
    for s in 1..=3 {
        let cp = ClassProblem::from_dataset(&ds, s).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(s as u64);
        let mut init = kmeanspp_init(&cp.positives, 2, 4, &mut rng).unwrap();
        // Spread the point boxes so no sample sits on a kink.
        for b in init.iter_mut() {
            let lo: Vec<f64> = b.lower().iter().map(|v| v - 0.3137).collect();
            let hi: Vec<f64> = b.upper().iter().map(|v| v + 0.2719).collect();
            *b = morphbox::minimax::Hyperbox::new(lo, hi).unwrap();
        }
        let params = BoxParams::from_boxes(&init);
        let (_, grad) = bce_loss_grad(&cp, &params);
        let h = 1e-5;
        for j in 0..params.values.len() {
            let mut up = params.clone();
            up.values[j] += h;
            let mut down = params.clone();
            down.values[j] -= h;
            let fd = (bce_loss(&cp, &up) - bce_loss(&cp, &down)) / (2.0 * h);
            worst = worst.max((fd - grad[j]).abs());
            checked += 1;
        }
    }
    l.record(
        "C6b Adam gradient check",
        true,
        worst <= 1e-4,
        format!("{checked} coordinates, max |analytic - central difference| = {worst:.2e} (tol 1e-4)"),
    );
}

/// Training errors per fixture with `gamma = 0` and the given margin.
fn separable_errors(margin: f64) -> (bool, String) {
    let mut details = Vec::new();
    let mut ok = true;
    for (name, ds, k) in separable_fixtures() {
        let cfg = TrainConfig {
            boxes_per_class: k,
            gamma: 0.0,
            seed: 1,
            margin,
            ..TrainConfig::default()
        };
        let (model, traces) = ccp::train(&ds, &cfg).unwrap();
        let pred = predict_batch(ds.features(), &model).unwrap();
        let wrong = pred.iter().zip(ds.labels()).filter(|(a, b)| a != b).count();
        let iters = traces.iter().map(|t| t.iterations.len()).max().unwrap_or(0);
        ok &= wrong == 0 && iters <= cfg.max_outer_iters;
        details.push(format!("{name}: {wrong} errors, {iters} iterations"));
    }
    (ok, details.join("; "))
}

fn c7_separable(l: &mut Ledger) {
    // With zero margin the LP optimum may park a box face exactly on a
    // negative sample; the resulting output tie is then decided by class
    // index, so exactness is gated on a small positive margin.
    let (ok, detail) = separable_errors(1e-3);
    l.record("C7 separability exactness (margin 1e-3)", true, ok, detail);
    let (ok0, detail0) = separable_errors(0.0);
    l.record("C7' separability with zero margin", false, ok0, detail0);
}

fn c9_determinism(l: &mut Ledger) {
    let dir = tempfile::TempDir::new().unwrap();
    let csv = dir.path().join("blobs.csv");
    data::save_csv(&make_blobs(1200, 2, 12, 1.5, 3, 42).unwrap(), &csv).unwrap();
    let mut files = Vec::new();
    for trial in 0..5 {
        let out = dir.path().join(format!("model{trial}.json"));
        let args = TrainArgs {
            data: csv.clone(),
            trainer: Trainer::Ccp,
            boxes: 4,
            gamma: 0.01,
            seed: 7,
            max_iters: 50,
            tol: 1e-4,
            margin: 0.0,
            max_boxes: 32,
            purity: PurityArg::Strict,
            learning_rate: 0.001,
            epochs: 100,
            test_fraction: 0.25,
            split_seed: 0,
            no_stratify: false,
            no_scale: false,
            label_column: "label".into(),
            output: out.clone(),
            trace: None,
        };
        cmd_train(&args).unwrap();
        files.push(std::fs::read(&out).unwrap());
    }
    let identical = files.windows(2).all(|w| w[0] == w[1]);
    l.record(
        "C9 determinism",
        true,
        identical,
        format!("5 identical train invocations, byte-identical model files: {identical}"),
    );
}

/// CCP test F1 across regularisation weights; logged only.
fn gamma_sweep(l: &mut Ledger) {
    let mut parts = Vec::new();
    for gamma in [0.001, 0.01, 0.1] {
        let mut spec = blobs_spec(10);
        spec.trainers = vec![Trainer::Ccp];
        spec.ccp.gamma = gamma;
        let report = run_experiment(&spec, |_, _, _| {}).unwrap();
        let s = report.get(Trainer::Ccp).unwrap().test.macro_f1;
        parts.push(format!("gamma {gamma}: {:.4}±{:.4}", s.mean, s.std));
    }
    l.record(
        "C5' CCP test F1 over gamma (10 runs each)",
        false,
        true,
        parts.join("; "),
    );
}

fn main() {
    let mut l = Ledger { failed: Vec::new() };
    c1_dc_identity(&mut l);
    c2_underestimator(&mut l);
    c3_lp_oracle(&mut l);
    c4_descent(&mut l);
    c5_c6_c8_experiment(&mut l);
    gamma_sweep(&mut l);
    c6_gradient_check(&mut l);
    c7_separable(&mut l);
    c9_determinism(&mut l);
    if l.failed.is_empty() {
        println!("acceptance: all gated criteria passed");
    } else {
        println!(
            "acceptance: {} gated criteria failed: {}",
            l.failed.len(),
            l.failed.join(", ")
        );
        std::process::exit(1);
    }
}
