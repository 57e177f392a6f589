//! Distributional convergence experiments: scaled depth-first walks against
//! the first-passage bridge, ranked tree sizes against ranked excursion
//! lengths, and the largest tree's rescaled height against the Brownian
//! excursion construction.

use rayon::prelude::*;

use crate::continuum::{
    excursions, normal_cdf, sample_brownian_excursion, sample_fp_bridge, FpMarginalCdf,
};
use crate::degrees::DegreeSequence;
use crate::experiments::{
    quantiles, sorted_vec, two_column_csv, ExperimentConfig, ExperimentError, ExperimentReport,
};
use crate::ghp::discrete_coupling_bounds;
use crate::paths::LatticePath;
use crate::stats::{ks_one_sample, ks_one_sample_quantile, ks_two_sample, ks_two_sample_quantile};

const EXP_WALK: u8 = 1;
const EXP_SIZES: u8 = 2;
const EXP_LARGEST: u8 = 7;

const T_GRID: [f64; 3] = [0.25, 0.5, 0.75];

/// A degree sequence together with the walk normalization `sigma_w` and the
/// realized `lambda = c/(sigma_w sqrt(n))` used on the continuum side.
pub(crate) struct Regime {
    pub s: DegreeSequence,
    pub n: u64,
    pub c: u64,
    pub sigma_w: f64,
    pub lambda: f64,
}

pub(crate) fn regime(cfg: &ExperimentConfig, n: u64) -> Result<Regime, ExperimentError> {
    let s = cfg.degree_family.build(n, cfg.lambda_target)?;
    let sigma_w = s.sigma2_walk().sqrt();
    if sigma_w.is_nan() || sigma_w <= 0.0 {
        return Err(ExperimentError::InvalidConfig(
            "degree family has zero walk variance".into(),
        ));
    }
    let n = s.n();
    let c = s.c();
    let lambda = c as f64 / (sigma_w * (n as f64).sqrt());
    Ok(Regime { s, n, c, sigma_w, lambda })
}

fn record_regime(report: &mut ExperimentReport, r: &Regime) {
    let n = r.n;
    report.set_statistic(&format!("n{n}:c"), r.c as f64);
    report.set_statistic(&format!("n{n}:sigma_w"), r.sigma_w);
    report.set_statistic(&format!("n{n}:lambda"), r.lambda);
    if let Ok(diag) = r.s.regime_diagnostics() {
        report.set_statistic(&format!("n{n}:c_over_sigma_sqrt_n"), diag.c_over_sigma_sqrt_n);
        report.set_statistic(&format!("n{n}:mu_p"), diag.mu_p);
        report.set_statistic(&format!("n{n}:delta_over_sqrt_n"), diag.delta_over_sqrt_n);
    }
}

/// Walk marginals of sampled forests against the first-passage bridge, plus
/// the pre-rotation permuted bridge against the Brownian-bridge law and the
/// deterministic endpoint identity.
pub fn exp_walk_convergence(cfg: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    let mut report = ExperimentReport::new("walk_convergence", cfg);
    let reps = cfg.replicates;
    let ks2_threshold = ks_two_sample_quantile(cfg.significance, reps, reps) + cfg.ks_margin;
    let ks1_threshold = ks_one_sample_quantile(cfg.significance, reps) + cfg.ks_margin;

    for (ni, &n_req) in cfg.n_list.iter().enumerate() {
        let r = regime(cfg, n_req)?;
        record_regime(&mut report, &r);
        let (n, c) = (r.n, r.c);
        let scale = 1.0 / (r.sigma_w * (n as f64).sqrt());
        let t_index = |t: f64| (t * n as f64).round() as usize;

        let discrete: Vec<([f64; 3], [f64; 3], bool)> = (0..reps)
            .into_par_iter()
            .map(|rep| {
                let mut rng = cfg.rng(EXP_WALK, ni, 0, rep);
                let mut children = r.s.child_vector();
                rng.shuffle(&mut children);
                let nu = rng.uniform_below(c);
                let bridge = LatticePath::walk_from_children(&children);
                let pre_values = bridge.values();
                let pre =
                    T_GRID.map(|t| pre_values[t_index(t)] as f64 * scale);
                let rotated = bridge.rotate_to_first_passage(nu).expect("nu < c");
                let post_values = rotated.values();
                let post =
                    T_GRID.map(|t| post_values[t_index(t)] as f64 * scale);
                let endpoint_ok = post_values[n as usize] == -(c as i64);
                (pre, post, endpoint_ok)
            })
            .collect();

        let continuum: Vec<[f64; 3]> = (0..reps)
            .into_par_iter()
            .map(|rep| {
                let mut rng = cfg.rng(EXP_WALK, ni, 1, rep);
                let p = sample_fp_bridge(r.lambda, cfg.grid_m, &mut rng)
                    .expect("validated parameters");
                T_GRID.map(|t| p.value_at(t))
            })
            .collect();

        let endpoint_fraction =
            discrete.iter().filter(|d| d.2).count() as f64 / reps as f64;
        report.add_verdict_ge(&format!("n{n}:walk_endpoint_identity"), endpoint_fraction, 1.0);

        for (k, &t) in T_GRID.iter().enumerate() {
            let forest_side = sorted_vec(discrete.iter().map(|d| d.1[k]).collect());
            let cont_side = sorted_vec(continuum.iter().map(|c| c[k]).collect());
            let ks2 = ks_two_sample(&forest_side, &cont_side)?;
            report.set_statistic(&format!("n{n}:ks2_t{t}"), ks2);
            report.add_verdict_le(&format!("n{n}:ks2_t{t}"), ks2, ks2_threshold);

            let sd = (t * (1.0 - t)).sqrt();
            let pre_side = sorted_vec(discrete.iter().map(|d| d.0[k]).collect());
            let ks_bridge =
                ks_one_sample(&pre_side, |x| normal_cdf(-r.lambda * t, sd, x))?;
            report.set_statistic(&format!("n{n}:ks1_bridge_t{t}"), ks_bridge);
            report.add_verdict_le(&format!("n{n}:ks1_bridge_t{t}"), ks_bridge, ks1_threshold);

            report.add_table(
                &format!("n{n}_qq_t{t}"),
                two_column_csv(
                    ("forest_walk", "fp_bridge"),
                    &quantiles(&forest_side, 200),
                    &quantiles(&cont_side, 200),
                ),
            );

            // density oracle via the reflection-principle formula
            let cdf = FpMarginalCdf::build(r.lambda, t, 1 << 15)?;
            report.set_statistic(&format!("n{n}:density_mass_t{t}"), cdf.total_mass());
            let ks1 = ks_one_sample(&forest_side, |x| cdf.eval(x))?;
            report.set_statistic(&format!("n{n}:ks1_density_t{t}"), ks1);
            report.add_verdict_le(&format!("n{n}:ks1_density_t{t}"), ks1, ks1_threshold);
        }
    }
    Ok(report)
}

/// Ranked tree sizes over `n` against ranked excursion lengths of the
/// reflected first-passage bridge, with the exact partition identity and the
/// high-resolution excursion-length sum check.
pub fn exp_tree_sizes(cfg: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    let mut report = ExperimentReport::new("tree_sizes", cfg);
    let reps = cfg.replicates;
    let ks2_threshold = ks_two_sample_quantile(cfg.significance, reps, reps) + cfg.ks_margin;

    for (ni, &n_req) in cfg.n_list.iter().enumerate() {
        let r = regime(cfg, n_req)?;
        record_regime(&mut report, &r);
        let n = r.n;

        let discrete: Vec<([f64; 3], bool)> = (0..reps)
            .into_par_iter()
            .map(|rep| {
                let mut rng = cfg.rng(EXP_SIZES, ni, 0, rep);
                let forest = crate::sampler::sample_forest(&r.s, &mut rng);
                let mut sizes: Vec<u64> =
                    forest.trees().iter().map(|t| t.size()).collect();
                sizes.sort_unstable_by(|a, b| b.cmp(a));
                let total: u64 = sizes.iter().sum();
                let mut top = [0.0f64; 3];
                for (slot, size) in top.iter_mut().zip(&sizes) {
                    *slot = *size as f64 / n as f64;
                }
                (top, total == n)
            })
            .collect();

        let continuum: Vec<[f64; 3]> = (0..reps)
            .into_par_iter()
            .map(|rep| {
                let mut rng = cfg.rng(EXP_SIZES, ni, 1, rep);
                let p = sample_fp_bridge(r.lambda, cfg.grid_m, &mut rng)
                    .expect("validated parameters");
                let lengths = excursions(&p, false).ranked_lengths();
                let mut top = [0.0f64; 3];
                for (slot, len) in top.iter_mut().zip(&lengths) {
                    *slot = *len;
                }
                top
            })
            .collect();

        let partition_fraction =
            discrete.iter().filter(|d| d.1).count() as f64 / reps as f64;
        report.add_verdict_ge(&format!("n{n}:sizes_sum_to_n"), partition_fraction, 1.0);

        for l in 0..3 {
            let sizes = sorted_vec(discrete.iter().map(|d| d.0[l]).collect());
            let lengths = sorted_vec(continuum.iter().map(|c| c[l]).collect());
            let ks2 = ks_two_sample(&sizes, &lengths)?;
            report.set_statistic(&format!("n{n}:ks2_rank{}", l + 1), ks2);
            report.add_verdict_le(&format!("n{n}:ks2_rank{}", l + 1), ks2, ks2_threshold);
            report.add_table(
                &format!("n{n}_qq_rank{}", l + 1),
                two_column_csv(
                    ("tree_size_over_n", "excursion_length"),
                    &quantiles(&sizes, 200),
                    &quantiles(&lengths, 200),
                ),
            );
        }

        // ranked excursion lengths sum to 1 in the limit; at finite grid the
        // defect is the measure of the discrete ladder set
        let m_sum = cfg.sum_check_m.unwrap_or(1 << 16);
        let reps_sum = cfg.sum_check_replicates.unwrap_or(200).min(reps).max(1);
        let totals: Vec<f64> = (0..reps_sum)
            .into_par_iter()
            .map(|rep| {
                let mut rng = cfg.rng(EXP_SIZES, ni, 2, rep);
                let p = sample_fp_bridge(r.lambda, m_sum, &mut rng)
                    .expect("validated parameters");
                excursions(&p, false).total_length()
            })
            .collect();
        let fraction_near_one =
            totals.iter().filter(|&&t| t >= 0.99).count() as f64 / reps_sum as f64;
        report.set_statistic(&format!("n{n}:excursion_sum_mean"), {
            totals.iter().sum::<f64>() / reps_sum as f64
        });
        report.add_verdict_ge(
            &format!("n{n}:excursion_sum_ge_0.99"),
            fraction_near_one,
            0.95,
        );
    }
    Ok(report)
}

/// The largest tree: normalized size and rescaled height against the largest
/// excursion and the independent-Brownian-excursion height, the max-degree
/// ratio diagnostic, and the coupling bounds at the realized sizes.
pub fn exp_largest_tree_scaling(
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport, ExperimentError> {
    let mut report = ExperimentReport::new("largest_tree_scaling", cfg);
    let reps = cfg.replicates;
    let ks2_threshold = ks_two_sample_quantile(cfg.significance, reps, reps) + cfg.ks_margin;
    let mut delta_medians = Vec::new();

    for (ni, &n_req) in cfg.n_list.iter().enumerate() {
        let r = regime(cfg, n_req)?;
        record_regime(&mut report, &r);
        let n = r.n;
        let height_scale = r.sigma_w / (2.0 * (n as f64).sqrt());

        struct LargestTree {
            size_fraction: f64,
            scaled_height: f64,
            delta_ratio: f64,
            top_sizes: [u64; 3],
        }

        let discrete: Vec<LargestTree> = (0..reps)
            .into_par_iter()
            .map(|rep| {
                let mut rng = cfg.rng(EXP_LARGEST, ni, 0, rep);
                let forest =
                    crate::sampler::sample_forest(&r.s, &mut rng).sort_decreasing();
                let largest = &forest.trees()[0];
                let mut top_sizes = [0u64; 3];
                for (slot, tree) in top_sizes.iter_mut().zip(forest.trees()) {
                    *slot = tree.size();
                }
                LargestTree {
                    size_fraction: largest.size() as f64 / n as f64,
                    scaled_height: largest.height() as f64 * height_scale,
                    delta_ratio: largest.max_degree() as f64
                        / (largest.size() as f64).sqrt(),
                    top_sizes,
                }
            })
            .collect();

        let continuum: Vec<(f64, f64)> = (0..reps)
            .into_par_iter()
            .map(|rep| {
                let mut rng = cfg.rng(EXP_LARGEST, ni, 1, rep);
                let p = sample_fp_bridge(r.lambda, cfg.grid_m, &mut rng)
                    .expect("validated parameters");
                let lengths = excursions(&p, false).ranked_lengths();
                let gamma1 = lengths.first().copied().unwrap_or(0.0);
                // height of the tree coded by an excursion of that length,
                // via an independent normalized excursion (Brownian scaling)
                let mut rng_exc = cfg.rng(EXP_LARGEST, ni, 2, rep);
                let e = sample_brownian_excursion(cfg.grid_m, &mut rng_exc)
                    .expect("validated parameters");
                (gamma1, gamma1.sqrt() * e.max_value())
            })
            .collect();

        let sizes = sorted_vec(discrete.iter().map(|d| d.size_fraction).collect());
        let gamma = sorted_vec(continuum.iter().map(|c| c.0).collect());
        let ks_size = ks_two_sample(&sizes, &gamma)?;
        report.set_statistic(&format!("n{n}:ks2_largest_size"), ks_size);
        report.add_verdict_le(&format!("n{n}:ks2_largest_size"), ks_size, ks2_threshold);

        let heights = sorted_vec(discrete.iter().map(|d| d.scaled_height).collect());
        let cont_heights = sorted_vec(continuum.iter().map(|c| c.1).collect());
        let ks_height = ks_two_sample(&heights, &cont_heights)?;
        report.set_statistic(&format!("n{n}:ks2_largest_height"), ks_height);
        report.add_verdict_le(
            &format!("n{n}:ks2_largest_height"),
            ks_height,
            ks2_threshold + cfg.height_bias_margin,
        );
        report.add_table(
            &format!("n{n}_qq_largest_height"),
            two_column_csv(
                ("scaled_tree_height", "excursion_height"),
                &quantiles(&heights, 200),
                &quantiles(&cont_heights, 200),
            ),
        );

        let ratios = sorted_vec(discrete.iter().map(|d| d.delta_ratio).collect());
        let median = ratios[ratios.len() / 2];
        let p90 = ratios[(ratios.len() * 9) / 10];
        report.set_statistic(&format!("n{n}:delta_ratio_median"), median);
        report.set_statistic(&format!("n{n}:delta_ratio_p90"), p90);
        delta_medians.push((n, median));

        // coupling bounds at the mean realized sizes
        let sigma_p = r.s.stats()?.sigma2_p.sqrt();
        let mut csv = String::from("rank,mean_size,d_h,d_p_bound\n");
        for l in 0..3 {
            let mean_size = discrete
                .iter()
                .map(|d| d.top_sizes[l] as f64)
                .sum::<f64>()
                / reps as f64;
            let bounds = discrete_coupling_bounds(mean_size.round().max(1.0) as u64, sigma_p);
            csv.push_str(&format!(
                "{},{mean_size},{},{}\n",
                l + 1,
                bounds.d_h,
                bounds.d_p_bound
            ));
        }
        report.add_table(&format!("n{n}_coupling_bounds"), csv);
    }

    if delta_medians.len() >= 2 {
        let (n_lo, med_lo) = delta_medians[0];
        let (n_hi, med_hi) = *delta_medians.last().unwrap();
        if n_hi > n_lo {
            report.add_verdict_le("delta_ratio_median_shrinks", med_hi, med_lo);
        }
    }
    Ok(report)
}
