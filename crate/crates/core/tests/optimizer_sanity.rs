use bpselect::dataset::{fit_normalizer, train_test_view, Dataset};
use bpselect::harness::derive_run_seed;
use bpselect::network::{init_weights, mse, InitScheme, Topology};
use bpselect::optimizers::problems::{LinearLeastSquares, Quadratic};
use bpselect::optimizers::{train, train_run, AlgorithmId, HyperParams, Objective, StopReason, TrainConfig};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[test]
fn every_algorithm_lowers_mse_on_the_bundled_sample() {
    let (train_set, _) = train_test_view(&Dataset::sample()).unwrap();
    let (samples, _) = fit_normalizer(&train_set).unwrap().samples(&train_set);
    let t = Topology::default_experiment();
    let cfg = TrainConfig::default();
    let hp = HyperParams::default();
    for (index, &algorithm) in AlgorithmId::ALL.iter().enumerate() {
        let changes: Vec<f64> = (0..10)
            .map(|r| {
                let w0 = init_weights(&t, derive_run_seed(1, index, r), InitScheme::NguyenWidrow);
                let before = mse(&w0, &t, &samples).unwrap();
                let rec = train_run(&w0, &t, &samples, algorithm, &cfg, &hp).unwrap();
                assert!(rec.final_mse() <= before, "{algorithm} seed {r}: {before} -> {}", rec.final_mse());
                rec.final_mse() - before
            })
            .collect();
        assert!(median(changes) < 0.0, "{algorithm} did not lower the median MSE");
    }
}

#[test]
fn levenberg_marquardt_solves_a_linear_fit_in_a_few_epochs() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = DMatrix::from_fn(30, 4, |_, _| rng.random_range(-1.0..1.0));
    let w_true = DVector::from_vec(vec![0.5, -1.5, 2.0, 0.25]);
    let obj = LinearLeastSquares::new(x.clone(), &x * &w_true);
    let rec = train(&obj, &[0.0; 4], AlgorithmId::Trainlm, &TrainConfig::default(), &HyperParams::default());
    assert_eq!(rec.stop_reason, StopReason::GoalReached);
    assert!(rec.epochs_used <= 5, "{} epochs", rec.epochs_used);
}

#[test]
fn conjugate_gradients_finish_a_five_dimensional_quadratic() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let b = DMatrix::from_fn(5, 5, |_, _| rng.random_range(-1.0..1.0));
    let a = b.transpose() * &b + DMatrix::identity(5, 5);
    let q = Quadratic::new(a, DVector::from_vec(vec![1.0, -2.0, 0.5, 3.0, -1.0]));
    // tight Wolfe constants make the line search exact to rounding
    let hp = HyperParams { ls_c1: 1e-12, cg_c2: 1e-10, ..HyperParams::default() };
    let cfg = TrainConfig { max_epochs: 6, goal: f64::MIN_POSITIVE, min_gradient: 1e-8, ..TrainConfig::default() };
    for algorithm in [AlgorithmId::Traincgf, AlgorithmId::Traincgp, AlgorithmId::Traincgb] {
        let rec = train(&q, &[0.0; 5], algorithm, &cfg, &hp);
        let (_, g) = q.value_and_gradient(&rec.final_weights);
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(gnorm < 1e-8, "{algorithm}: |g| = {gnorm} after {} epochs ({})", rec.epochs_used, rec.stop_reason);
        assert!(rec.epochs_used <= 6);
    }
}
