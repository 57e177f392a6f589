//! The geometric-tail family end to end: growing maximum degree, non-unit
//! walk normalization, and the same convergence and bound checks as the
//! binary family, at reduced scale with margins sized for it.

use planeforest::experiments::{run_experiment, DegreeFamily, ExperimentConfig};

fn config() -> ExperimentConfig {
    ExperimentConfig {
        degree_family: DegreeFamily::Geometric { ratio: 0.5 },
        n_list: vec![2500],
        lambda_target: 1.0,
        replicates: 1500,
        grid_m: 8192,
        seed: 99,
        output_dir: None,
        epsilon: 0.1,
        rho: 0.1,
        significance: 1e-3,
        ks_margin: 0.05,
        height_bias_margin: 0.05,
        sum_check_m: Some(1 << 16),
        sum_check_replicates: Some(50),
    }
}

#[test]
fn geometric_walks_converge() {
    let report = run_experiment("walk_convergence", &config()).unwrap();
    assert!(report.all_pass(), "failed: {:?}", report.failed());
    // the family really does exercise larger degrees
    assert!(report.statistics["n2500:delta_over_sqrt_n"] > 0.1);
    assert!(report.statistics["n2500:sigma_w"] > 1.2);
    let lambda = report.statistics["n2500:lambda"];
    assert!((lambda - 1.0).abs() < 0.05, "realized lambda {lambda}");
}

#[test]
fn geometric_tree_sizes_converge() {
    let report = run_experiment("tree_sizes", &config()).unwrap();
    assert!(report.all_pass(), "failed: {:?}", report.failed());
}

#[test]
fn geometric_bounds_hold() {
    let mut cfg = config();
    cfg.n_list = vec![2500, 10_000];
    cfg.replicates = 3000;
    for name in ["variance_bound", "degree_concentration", "small_tree_heights"] {
        let report = run_experiment(name, &cfg).unwrap();
        assert!(report.all_pass(), "{name} failed: {:?}", report.failed());
    }
}
