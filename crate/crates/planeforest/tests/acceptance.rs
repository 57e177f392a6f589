//! Acceptance suite: one test per criterion, each at its stated scale and
//! tolerance, printing one PASS line on success (visible with
//! `cargo test --test acceptance -- --nocapture`).

use std::time::Instant;

use planeforest::continuum::{excursions, sample_fp_bridge};
use planeforest::degrees::DegreeSequence;
use planeforest::experiments::verify::degree_sequences_up_to;
use planeforest::experiments::{
    exhaustive_variance_tail, run_experiment, DegreeFamily, ExperimentConfig,
};
use planeforest::forests::{decode, verify_marked_maps_capped};
use planeforest::ghp::{
    discrete_coupling_bounds, ghp_coding_bound, rooted_gh_exact, scaled_tree_space,
    FiniteMetricMeasureSpace, PiecewiseLinear,
};
use planeforest::paths::{
    enumerate_bridges_capped, enumerate_fp_bridges_capped, fp_bridge_count, multinomial,
    verify_n_to_one_capped,
};
use planeforest::sampler::{sample_fp_path, SeededRng};
use planeforest::stats::{chi_square, chi_square_quantile};

const MAX_N: u64 = 8;
const MAX_DEGREE: u64 = 5;

fn base_config(family: DegreeFamily, n_list: Vec<u64>, replicates: usize) -> ExperimentConfig {
    ExperimentConfig {
        degree_family: family,
        n_list,
        lambda_target: 1.0,
        replicates,
        grid_m: 1 << 14,
        seed: 0x5ca1ab1e,
        output_dir: None,
        epsilon: 0.1,
        rho: 0.1,
        significance: 1e-3,
        ks_margin: 0.01,
        height_bias_margin: 0.03,
        sum_check_m: Some(1 << 16),
        sum_check_replicates: Some(400),
    }
}

#[test]
fn a01_counting_formulas_exhaustive() {
    let start = Instant::now();
    let family = degree_sequences_up_to(MAX_N, MAX_DEGREE);
    assert!(!family.is_empty());
    for s in &family {
        let bridges = enumerate_bridges_capped(s, MAX_N).unwrap();
        let fp = bridges.iter().filter(|p| p.is_first_passage()).count();
        assert_eq!(
            bridges.len() as u128,
            multinomial(s),
            "bridge count mismatch for {:?}",
            s.counts()
        );
        assert_eq!(
            fp as u128,
            fp_bridge_count(s),
            "first-passage count mismatch for {:?}",
            s.counts()
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 120, "took {elapsed:?}");
    println!(
        "PASS counting formulas: {} sequences with n <= {MAX_N}, delta <= {MAX_DEGREE} ({elapsed:?})",
        family.len()
    );
}

#[test]
fn a02_rotation_is_exactly_n_to_one() {
    let family = degree_sequences_up_to(MAX_N, MAX_DEGREE);
    for s in &family {
        let check = verify_n_to_one_capped(s, MAX_N).unwrap();
        assert!(check.ok, "n-to-1 failed for {:?}", s.counts());
        assert!(check
            .preimage_counts
            .values()
            .all(|&count| count == s.n()));
    }
    println!("PASS rotation n-to-1: {} sequences", family.len());
}

#[test]
fn a03_codec_round_trip() {
    // exhaustive over all first-passage bridges with n <= 8
    let family = degree_sequences_up_to(MAX_N, MAX_DEGREE);
    let mut paths = 0u64;
    for s in &family {
        for p in enumerate_fp_bridges_capped(s, MAX_N).unwrap() {
            let forest = decode(&p).unwrap();
            assert_eq!(forest.encode(), p);
            assert_eq!(decode(&forest.encode()).unwrap(), forest);
            paths += 1;
        }
    }
    // random samples at n = 1000
    let s = DegreeFamily::Binary.build(1000, 1.0).unwrap();
    for rep in 0..10_000u64 {
        let mut rng = SeededRng::new(0xc0dec, rep);
        let path = sample_fp_path(&s, &mut rng);
        let forest = decode(&path).unwrap();
        assert_eq!(forest.encode(), path);
        assert_eq!(forest.degree_sequence(), s);
    }
    println!("PASS codec round-trip: {paths} exhaustive paths + 10^4 random samples at n=10^3");
}

#[test]
fn a04_sampler_uniformity_chi_square() {
    let start = Instant::now();
    // {0:2, 1:2}: 3 forests, 30000 samples, df = 2
    let s = DegreeSequence::from_pairs(&[(0, 2), (1, 2)]).unwrap();
    let support = enumerate_fp_bridges_capped(&s, 8).unwrap();
    assert_eq!(support.len(), 3);
    let mut counts = vec![0u64; 3];
    for rep in 0..30_000u64 {
        let mut rng = SeededRng::new(0x04, rep);
        let path = sample_fp_path(&s, &mut rng);
        let idx = support.iter().position(|p| *p == path).unwrap();
        counts[idx] += 1;
    }
    let expected = vec![10_000.0; 3];
    let stat = chi_square(&counts, &expected).unwrap();
    let threshold = chi_square_quantile(0.999, 2);
    assert!(stat < threshold, "chi2 {stat} >= {threshold}");
    println!("PASS uniformity {{0:2,1:2}}: chi2 = {stat:.3} < {threshold:.3}");

    // {0:3, 1:2, 3:1}: 10 forests, 100000 samples, df = 9
    let s = DegreeSequence::from_pairs(&[(0, 3), (1, 2), (3, 1)]).unwrap();
    let support = enumerate_fp_bridges_capped(&s, 8).unwrap();
    assert_eq!(support.len(), 10);
    let mut counts = vec![0u64; 10];
    for rep in 0..100_000u64 {
        let mut rng = SeededRng::new(0x05, rep);
        let path = sample_fp_path(&s, &mut rng);
        let idx = support.iter().position(|p| *p == path).unwrap();
        counts[idx] += 1;
    }
    let expected = vec![10_000.0; 10];
    let stat = chi_square(&counts, &expected).unwrap();
    let threshold = chi_square_quantile(0.999, 9);
    assert!(stat < threshold, "chi2 {stat} >= {threshold}");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}");
    println!("PASS uniformity {{0:3,1:2,3:1}}: chi2 = {stat:.3} < {threshold:.3} ({elapsed:?})");
}

#[test]
fn a05_marked_maps_are_c_to_one_and_n_to_one() {
    let family = degree_sequences_up_to(MAX_N, MAX_DEGREE);
    for s in &family {
        let check = verify_marked_maps_capped(s, MAX_N).unwrap();
        assert!(
            check.g_c_to_1 && check.h_n_to_1,
            "marked maps failed for {:?}",
            s.counts()
        );
    }
    println!("PASS marked maps: {} sequences", family.len());
}

#[test]
fn a06_walk_convergence_to_first_passage_bridge() {
    let start = Instant::now();
    let cfg = base_config(DegreeFamily::Binary, vec![10_000], 10_000);
    let report = run_experiment("walk_convergence", &cfg).unwrap();
    for t in ["0.25", "0.5", "0.75"] {
        let ks = report.statistics[&format!("n10000:ks2_t{t}")];
        assert!(ks < 0.04, "two-sample KS at t={t}: {ks}");
    }
    let ks1 = report.statistics["n10000:ks1_density_t0.5"];
    assert!(ks1 < 0.03, "one-sample KS against density: {ks1}");
    assert!(report.all_pass(), "failed verdicts: {:?}", report.failed());
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 600, "took {elapsed:?}");
    println!(
        "PASS walk convergence: ks2 = ({:.4}, {:.4}, {:.4}) < 0.04, density ks1 = {:.4} < 0.03 ({elapsed:?})",
        report.statistics["n10000:ks2_t0.25"],
        report.statistics["n10000:ks2_t0.5"],
        report.statistics["n10000:ks2_t0.75"],
        ks1
    );
}

#[test]
fn a07_ranked_tree_sizes_match_excursion_lengths() {
    let start = Instant::now();
    let cfg = base_config(DegreeFamily::Binary, vec![10_000], 5_000);
    let report = run_experiment("tree_sizes", &cfg).unwrap();
    for rank in 1..=3 {
        let ks = report.statistics[&format!("n10000:ks2_rank{rank}")];
        assert!(ks < 0.05, "rank {rank} KS = {ks}");
    }
    // exact partition identity and the high-resolution sum check are
    // verdicts inside the report
    assert!(report.all_pass(), "failed verdicts: {:?}", report.failed());
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 600, "took {elapsed:?}");
    println!(
        "PASS ranked tree sizes: ks = ({:.4}, {:.4}, {:.4}) < 0.05, sums exact, excursion mass ok ({elapsed:?})",
        report.statistics["n10000:ks2_rank1"],
        report.statistics["n10000:ks2_rank2"],
        report.statistics["n10000:ks2_rank3"],
    );
}

#[test]
fn a08_height_tail_bound_never_violated() {
    let cfg = base_config(DegreeFamily::BinaryTree, vec![1_000, 10_000], 10_000);
    let report = run_experiment("height_tail", &cfg).unwrap();
    assert_eq!(report.verdicts.len(), 40, "expected 20-point grid per n");
    assert!(report.all_pass(), "failed verdicts: {:?}", report.failed());
    println!("PASS height-tail bound: 40 grid points, one-sided, no violation");
}

#[test]
fn a09_variance_bound_exhaustive_and_monte_carlo() {
    // exhaustive over every degree sequence with n <= 6 and every prefix
    for s in degree_sequences_up_to(6, MAX_DEGREE) {
        let children = s.child_vector();
        let n = children.len() as u64;
        for k in 1..=n {
            for lambda in [2.0, 3.0, 4.0] {
                let (empirical, bound) = exhaustive_variance_tail(&children, lambda, k);
                assert!(
                    empirical <= bound + 1e-12,
                    "exhaustive violation at {:?}, k={k}, lambda={lambda}",
                    s.counts()
                );
            }
        }
    }
    // raw integer vectors (the bound does not require a forest sequence)
    for children in [vec![1u64, 1, 2, 2], vec![0, 1, 1, 2, 3, 3, 4, 5]] {
        let n = children.len() as u64;
        for k in 1..=n {
            for lambda in [2.0, 3.0, 4.0] {
                let (empirical, bound) = exhaustive_variance_tail(&children, lambda, k);
                assert!(empirical <= bound + 1e-12, "violation at {children:?}");
            }
        }
    }
    // Monte Carlo at n = 10^4 over the 5x5 grid
    let cfg = base_config(DegreeFamily::Binary, vec![10_000], 10_000);
    let report = run_experiment("variance_bound", &cfg).unwrap();
    assert_eq!(report.verdicts.len(), 25);
    assert!(report.all_pass(), "failed verdicts: {:?}", report.failed());
    println!("PASS variance bound: exhaustive n<=6 family + n<=8 vectors + 5x5 Monte Carlo grid");
}

#[test]
fn a10_martingale_bound_on_grid() {
    let cfg = base_config(DegreeFamily::Binary, vec![10_000], 10_000);
    let report = run_experiment("degree_concentration", &cfg).unwrap();
    let martingale: Vec<_> = report
        .verdicts
        .iter()
        .filter(|v| v.name.contains("martingale"))
        .collect();
    assert!(martingale.len() >= 20, "grid too small: {}", martingale.len());
    for v in &martingale {
        assert!(v.pass, "martingale violation: {} = {} > {}", v.name, v.value, v.threshold);
    }
    assert!(report.all_pass(), "failed verdicts: {:?}", report.failed());
    println!(
        "PASS martingale bound: {} informative grid points, empirical <= bound + 3 SE",
        martingale.len()
    );
}

#[test]
fn a11_ghp_machinery() {
    // metric axioms on random <= 5-point spaces, 1000 trials
    let random_space = |seed: u64, n: usize| -> FiniteMetricMeasureSpace {
        let mut rng = SeededRng::new(0x6ED, seed);
        let points: Vec<[f64; 3]> = (0..n)
            .map(|_| [rng.uniform_f64(), rng.uniform_f64(), rng.uniform_f64()])
            .collect();
        let mut d = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                d[i][j] = points[i]
                    .iter()
                    .zip(&points[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
            }
        }
        let masses = vec![1.0 / n as f64; n];
        FiniteMetricMeasureSpace::new(d, 0, masses).unwrap()
    };
    for trial in 0..1000u64 {
        let mut rng = SeededRng::new(0xa11, trial);
        let (na, nb, nc) = (
            1 + rng.uniform_below(5) as usize,
            1 + rng.uniform_below(5) as usize,
            1 + rng.uniform_below(5) as usize,
        );
        let a = random_space(trial * 3, na);
        let b = random_space(trial * 3 + 1, nb);
        let c = random_space(trial * 3 + 2, nc);
        let ab = rooted_gh_exact(&a, &b).unwrap();
        let ba = rooted_gh_exact(&b, &a).unwrap();
        let bc = rooted_gh_exact(&b, &c).unwrap();
        let ac = rooted_gh_exact(&a, &c).unwrap();
        assert!(ab >= 0.0);
        assert!((ab - ba).abs() < 1e-12, "not symmetric");
        assert!(ac <= ab + bc + 1e-12, "triangle inequality fails");
        assert_eq!(rooted_gh_exact(&a, &a).unwrap(), 0.0);
    }

    // coding bound dominates exact rooted GH on all pairs of trees with
    // <= 6 vertices, both scaled with edge length sigma/(2 sqrt(6))
    let mut trees = Vec::new();
    for s in degree_sequences_up_to(6, MAX_DEGREE) {
        if s.c() != 1 {
            continue;
        }
        for p in enumerate_fp_bridges_capped(&s, 6).unwrap() {
            trees.push(decode(&p).unwrap().trees()[0].clone());
        }
    }
    assert_eq!(trees.len(), 65);
    let edge = 1.0 / (2.0 * 6f64.sqrt());
    let mut pairs = 0u64;
    for (i, a) in trees.iter().enumerate() {
        let space_a = scaled_tree_space(a, 6, 1.0);
        let contour_a = PiecewiseLinear::from_contour(a, edge);
        for b in &trees[i..] {
            let space_b = scaled_tree_space(b, 6, 1.0);
            let contour_b = PiecewiseLinear::from_contour(b, edge);
            let gh = rooted_gh_exact(&space_a, &space_b).unwrap();
            let bound = ghp_coding_bound(&contour_a, &contour_b);
            assert!(
                gh <= bound + 1e-12,
                "domination fails: gh {gh} > bound {bound} for {:?} vs {:?}",
                a.children(),
                b.children()
            );
            pairs += 1;
        }
    }
    assert_eq!(pairs, 65 * 66 / 2);

    // coupling-bound arithmetic matches hand values exactly
    let bounds = discrete_coupling_bounds(10_000, 1.2);
    assert_eq!(bounds.d_h, 0.003);
    assert_eq!(bounds.d_p_bound, 0.0061);
    println!("PASS GHP machinery: axioms on 1000 random spaces, domination on {pairs} tree pairs, coupling arithmetic exact");
}

#[test]
fn a12_small_tree_height_frequency() {
    // Full-forest GHP convergence is not certifiable at desk scale; the
    // tail-event frequency stands in for it alongside the suites above.
    let cfg = base_config(DegreeFamily::Binary, vec![10_000], 2_000);
    let report = run_experiment("small_tree_heights", &cfg).unwrap();
    let freq = report.statistics["n10000:freq_beta0.001"];
    assert!(freq < 0.1, "frequency {freq} >= 0.1");
    assert!(report.all_pass());
    println!("PASS small-tree heights: frequency {freq} < 0.1 at beta = 1e-3, n = 10^4");
}

/// Excursion mass at the acceptance grid: >= 0.99 in >= 95% of draws at
/// m = 2^16 (also part of the tree_sizes report; asserted directly here).
#[test]
fn a07b_excursion_mass_at_fine_grid() {
    let draws = 400;
    let mut good = 0usize;
    for rep in 0..draws {
        let mut rng = SeededRng::new(0x7b, rep);
        let p = sample_fp_bridge(1.0, 1 << 16, &mut rng).unwrap();
        if excursions(&p, false).total_length() >= 0.99 {
            good += 1;
        }
    }
    let fraction = good as f64 / draws as f64;
    assert!(fraction >= 0.95, "only {fraction} of draws kept 99% mass");
    println!("PASS excursion mass: {good}/{draws} draws >= 0.99 at m = 2^16");
}
