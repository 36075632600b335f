mod common;

use ndarray::{Array1, Array2, Axis};
use svm_admm::admm::AdmmConfig;
use svm_admm::exec::Exec;
use svm_admm::kernel::KernelParams;
use svm_admm::nystrom::NystromConfig;
use svm_admm::svm::{self, TrainOptions};

use common::{rng, separable_blobs};

fn fixed_iterations(n: usize) -> AdmmConfig {
    // ε far below the rounding floor: every run performs exactly n iterations.
    AdmmConfig { epsilon: 1e-300, max_iters: n, ..Default::default() }
}

#[test]
fn weights_reproduce_reduced_solution() {
    let params = KernelParams::new(-0.5).unwrap();
    for (seed, n, c, r) in [(0u64, 40, 40, 40), (1, 60, 20, 20), (2, 60, 30, 12), (3, 80, 16, 8)] {
        let (x, y) = separable_blobs(&mut rng(seed), n, 3, 2.0);
        let rep = svm::train_nonlinear(x.view(), y.view(), &params, &NystromConfig { c, r, seed, eig_tol: 1e-10 }, &AdmmConfig::default()).unwrap();
        let alpha_m = rep.model.dense_alpha(n).select(Axis(0), &rep.factor.m);
        let vm = rep.factor.v.select(Axis(0), &rep.factor.m);
        let eta = vm.t().dot(&alpha_m);
        let resid = (&eta - &rep.eta).mapv(f64::abs).fold(0.0f64, |a, &b| a.max(b));
        assert!(resid <= 1e-8, "case {seed}: ‖η − Vᵀα‖ = {resid}");
        assert!(rep.model.nonzero_alpha() <= rep.factor.effective_rank);
        assert!(rep.factor.effective_rank <= r);
    }
}

#[test]
fn support_only_on_sampled_rows() {
    let (x, y) = separable_blobs(&mut rng(4), 50, 2, 3.0);
    let rep = svm::train_nonlinear(x.view(), y.view(), &KernelParams::default(), &NystromConfig::square(10, 4), &AdmmConfig::default()).unwrap();
    for sv in &rep.model.support {
        assert!(rep.factor.m.contains(&sv.index));
        assert_eq!(sv.label, y[sv.index]);
        assert_eq!(sv.features, x.row(sv.index).to_vec());
    }
}

#[test]
fn permutation_invariance() {
    let (x, y) = separable_blobs(&mut rng(5), 30, 3, 1.0);
    let n = x.nrows();
    let perm: Vec<usize> = (0..n).map(|i| (i * 7 + 3) % n).collect();
    let xp = x.select(Axis(0), &perm);
    let yp = y.select(Axis(0), &perm);
    let params = KernelParams::new(-0.4).unwrap();
    // Sampling every column makes M the same set of samples under any ordering.
    let nys = NystromConfig { c: n, r: 12, seed: 0, eig_tol: 1e-10 };
    let cfg = fixed_iterations(200);
    let a = svm::train_nonlinear(x.view(), y.view(), &params, &nys, &cfg).unwrap();
    let b = svm::train_nonlinear(xp.view(), yp.view(), &params, &NystromConfig { seed: 99, ..nys }, &cfg).unwrap();
    let grid = common::gaussian(&mut rng(6), 25, 3);
    let fa = svm::decision_values(&a.model, grid.view(), Exec::Sequential).unwrap();
    let fb = svm::decision_values(&b.model, grid.view(), Exec::Sequential).unwrap();
    for (u, v) in fa.iter().zip(fb.iter()) {
        assert!((u - v).abs() <= 1e-8 * u.abs().max(1.0), "{u} vs {v}");
    }
}

#[test]
fn reported_accuracy_matches_prediction() {
    let (x, y) = separable_blobs(&mut rng(7), 64, 2, 4.0);
    let rep = svm::train_nonlinear(x.view(), y.view(), &KernelParams::default(), &NystromConfig::square(64, 0), &AdmmConfig { max_iters: 5000, ..Default::default() }).unwrap();
    assert!(rep.trace.converged);
    let predicted: Vec<f64> = x.outer_iter().map(|row| svm::predict_nonlinear(&rep.model, row).unwrap()).collect();
    let acc = predicted.iter().zip(y.iter()).filter(|(p, t)| p == t).count() as f64 / y.len() as f64;
    assert_eq!(acc, rep.train_accuracy);
    assert_eq!(acc, 1.0);
    for sv in &rep.model.support {
        assert_eq!(svm::predict_nonlinear(&rep.model, Array1::from(sv.features.clone()).view()).unwrap(), sv.label);
    }
}

#[test]
fn xor_is_learned_exactly() {
    let x = ndarray::array![[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]];
    let y = ndarray::array![1.0, 1.0, -1.0, -1.0];
    let rep = svm::train_nonlinear(x.view(), y.view(), &KernelParams::default(), &NystromConfig::square(4, 0), &AdmmConfig::default()).unwrap();
    assert_eq!(rep.train_accuracy, 1.0);
    assert!(rep.model.nonzero_alpha() <= 4);
}

#[test]
fn execution_policies_agree_bitwise() {
    let (x, y) = separable_blobs(&mut rng(8), 70, 5, 1.5);
    let params = KernelParams::new(-0.2).unwrap();
    let nys = NystromConfig::square(20, 8);
    let run = |exec| {
        svm::train_nonlinear_with(x.view(), y.view(), &params, &nys, &AdmmConfig::default(), TrainOptions { exec, compute_mse: true }).unwrap()
    };
    let (s, p) = (run(Exec::Sequential), run(Exec::Parallel));
    assert_eq!(s.model, p.model);
    assert_eq!(s.eta, p.eta);
    assert_eq!(s.nystrom_mse.map(f64::to_bits), p.nystrom_mse.map(f64::to_bits));
    let grid: Array2<f64> = common::gaussian(&mut rng(9), 33, 5);
    let a = svm::decision_values(&s.model, grid.view(), Exec::Sequential).unwrap();
    let b = svm::decision_values(&s.model, grid.view(), Exec::Parallel).unwrap();
    assert_eq!(a, b);
}
