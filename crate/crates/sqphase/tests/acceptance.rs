//! Acceptance suite: one test per release criterion, each printing a
//! PASS line (run with `cargo test --test acceptance -- --nocapture`).
//! Tolerances are pinned here, not tuned at runtime.

use statrs::distribution::{ContinuousCDF, Normal};

use sqphase::bayes::{posterior, posterior_variance};
use sqphase::bounds::{
    beyond_sql_interval, fisher_information, max_fisher, ocrb, optimal_phase, qcrb, sql,
};
use sqphase::experiments::{
    default_purity_ladder, run_repeated, sweep_theta, ExecMode, ExperimentConfig, StateSpec,
};
use sqphase::measurement::{log_likelihood, marginal_variance, sample_homodyne, SampleSet};
use sqphase::report::{aggregate_csv, trials_csv};
use sqphase::rng::substream;
use sqphase::state::SqueezedThermalState;

/// Deterministic uniform on [0, 1) for drawing random test cases.
fn unit(seed: u64, k: u64) -> f64 {
    substream(seed, k) as f64 / (u64::MAX as f64 + 1.0)
}

#[test]
fn criterion_01_purity_reproduction() {
    let cases = [
        (3.21, 3.41, 0.977, 0.002),
        (3.21, 4.23, 0.891, 0.003),
        (6.02, 10.96, 0.566, 0.002),
    ];
    for (s_db, a_db, expected, tol) in cases {
        let purity = SqueezedThermalState::from_db(s_db, a_db).unwrap().purity();
        assert!(
            (purity - expected).abs() <= tol,
            "purity({s_db}, {a_db}) = {purity}, want {expected} +- {tol}"
        );
    }
    println!("criterion 01 purity-reproduction: PASS");
}

#[test]
fn criterion_02_bound_identities() {
    let n_meas = 1000u64;
    for i in 0..1000u64 {
        let r = 1e-3 + 2.0 * unit(2, 2 * i);
        let rp = 1.5 * unit(2, 2 * i + 1);
        let s = SqueezedThermalState::new(r, rp).unwrap();
        let o = ocrb(&s, n_meas).unwrap();
        let via_fisher = 1.0 / (n_meas as f64 * max_fisher(&s));
        assert!(
            ((o - via_fisher) / o).abs() < 1e-12,
            "OCRB identity fails at r={r}, rp={rp}"
        );
        let ratio = qcrb(&s, n_meas).unwrap() / o;
        let expect = 0.5 * (1.0 + (-2.0 * rp).exp());
        assert!(
            (ratio - expect).abs() < 1e-12,
            "QCRB/OCRB ratio fails at r={r}, rp={rp}"
        );
    }
    println!("criterion 02 bound-identities: PASS");
}

#[test]
fn criterion_03_fisher_quadrature_oracle() {
    for i in 0..20u64 {
        let r = 0.1 + 1.1 * unit(3, 3 * i);
        let rp = 0.8 * unit(3, 3 * i + 1);
        let theta = 0.15 + (std::f64::consts::FRAC_PI_2 - 0.3) * unit(3, 3 * i + 2);
        let s = SqueezedThermalState::new(r, rp).unwrap();
        let numeric = fisher_numeric(&s, theta);
        let analytic = fisher_information(&s, theta);
        assert!(
            ((numeric - analytic) / analytic).abs() < 1e-4,
            "case {i}: r={r}, rp={rp}, theta={theta}: {numeric} vs {analytic}"
        );
    }
    println!("criterion 03 fisher-oracle: PASS");
}

/// Independent route to F(θ): Simpson quadrature of p·(∂ln p/∂θ)² with the
/// score from central differences of the log likelihood.
fn fisher_numeric(s: &SqueezedThermalState, theta: f64) -> f64 {
    let h = 1e-5;
    let sigma = marginal_variance(s, theta).sqrt();
    let half = 16.0 * sigma;
    let n = 8000usize;
    let dx = 2.0 * half / n as f64;
    let mut total = 0.0;
    for i in 0..=n {
        let x = -half + i as f64 * dx;
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let score = (log_likelihood(x, theta + h, s) - log_likelihood(x, theta - h, s)) / (2.0 * h);
        total += w * log_likelihood(x, theta, s).exp() * score * score;
    }
    total * dx / 3.0
}

#[test]
fn criterion_04_max_fisher_attained_at_optimal_phase() {
    for i in 0..=29 {
        for j in 0..=20 {
            let r = 0.05 + i as f64 * (1.45 / 29.0);
            let rp = j as f64 * (1.0 / 20.0);
            let s = SqueezedThermalState::new(r, rp).unwrap();
            let ratio = fisher_information(&s, optimal_phase(&s)) / max_fisher(&s);
            assert!(
                (ratio - 1.0).abs() < 1e-9,
                "F(theta_opt)/F_max = {ratio} at r={r}, rp={rp}"
            );
        }
    }
    println!("criterion 04 max-fisher-attainment: PASS");
}

#[test]
fn criterion_05_ocrb_attained_by_inference() {
    let s = SqueezedThermalState::new(0.3696, 0.0230).unwrap();
    let theta = optimal_phase(&s);
    let n = 1000usize;
    let bound = ocrb(&s, n as u64).unwrap();
    let sql_level = sql(s.mean_photon_number(), n as u64).unwrap();
    assert!((bound - 7.12e-4).abs() / 7.12e-4 < 0.01, "OCRB anchor {bound}");
    assert!(
        (sql_level - 1.49e-3).abs() / 1.49e-3 < 0.01,
        "SQL anchor {sql_level}"
    );

    let agg = run_repeated(&s, theta, n, 50, 1001, 2048, ExecMode::Parallel).unwrap();
    let v = agg.empirical_variance;
    assert!(
        v >= 0.5 * bound && v <= 2.0 * bound,
        "empirical variance {v} outside [0.5, 2.0] x OCRB ({bound})"
    );
    assert!(v < sql_level, "empirical variance {v} not below SQL {sql_level}");
    println!("criterion 05 ocrb-attainment: PASS (var {v:.3e}, OCRB {bound:.3e}, SQL {sql_level:.3e})");
}

#[test]
fn criterion_06_beyond_sql_interval() {
    let high = SqueezedThermalState::from_db(3.21, 3.41).unwrap();
    let low = SqueezedThermalState::from_db(6.02, 10.96).unwrap();
    let width_high = beyond_sql_interval(&high).width();
    let width_low = beyond_sql_interval(&low).width();
    assert!(
        (0.60..=0.72).contains(&width_high),
        "delta-theta at purity 0.977 is {width_high}, want within [0.60, 0.72]"
    );
    assert!(
        width_high > 2.0 * width_low,
        "width at purity 0.977 ({width_high}) not more than twice width at 0.566 ({width_low})"
    );
    let widths: Vec<(f64, f64)> = default_purity_ladder()
        .iter()
        .map(|spec| {
            let s = spec.resolve().unwrap();
            (s.purity(), beyond_sql_interval(&s).width())
        })
        .collect();
    for pair in widths.windows(2) {
        assert!(pair[0].0 < pair[1].0, "ladder not purity-ordered: {widths:?}");
        assert!(
            pair[0].1 < pair[1].1,
            "delta-theta not strictly increasing with purity: {widths:?}"
        );
    }
    println!("criterion 06 beyond-sql-interval: PASS (widths {widths:?})");
}

#[test]
fn criterion_07_posterior_scaling_with_record_length() {
    let n_values = [100usize, 300, 500, 1000];
    let reps = 20u64;
    let mean_post_var = |state: &SqueezedThermalState, n: usize| -> f64 {
        let mut total = 0.0;
        for rep in 0..reps {
            let set = sample_homodyne(state, 0.4, n, substream(7007, rep)).unwrap();
            total += posterior_variance(&posterior(&set, 2048).unwrap());
        }
        total / reps as f64
    };

    let weak = SqueezedThermalState::new(0.37, 0.0).unwrap();
    let strong = SqueezedThermalState::new(0.69, 0.0).unwrap();
    let weak_vars: Vec<f64> = n_values.iter().map(|&n| mean_post_var(&weak, n)).collect();
    let strong_vars: Vec<f64> = n_values.iter().map(|&n| mean_post_var(&strong, n)).collect();

    for pair in weak_vars.windows(2) {
        assert!(pair[1] < pair[0], "variance not decreasing in N: {weak_vars:?}");
    }
    let scaled: Vec<f64> = weak_vars
        .iter()
        .zip(&n_values)
        .map(|(v, &n)| v * n as f64)
        .collect();
    let hi = scaled.iter().cloned().fold(0.0f64, f64::max);
    let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(hi / lo < 1.5, "variance x N spread {scaled:?}");

    for (w, s) in weak_vars.iter().zip(&strong_vars) {
        assert!(s < w, "stronger squeezing not uniformly better: {weak_vars:?} vs {strong_vars:?}");
    }
    println!("criterion 07 posterior-scaling: PASS (var x N {scaled:?})");
}

#[test]
fn criterion_08_posterior_algebra() {
    let s = SqueezedThermalState::new(0.6, 0.3).unwrap();
    let grid = 256usize;

    // log-space path vs direct linear product, N = 50
    let set = sample_homodyne(&s, 0.8, 50, 4242).unwrap();
    let post = posterior(&set, grid).unwrap();
    let direct_raw: Vec<f64> = post
        .thetas()
        .iter()
        .map(|&theta| {
            let mut p = 2.0 / std::f64::consts::PI;
            for &x in set.samples() {
                p *= log_likelihood(x, theta, &s).exp();
            }
            p
        })
        .collect();
    let mass = trapezoid(post.thetas(), &direct_raw);
    for (a, raw) in post.density().iter().zip(&direct_raw) {
        let b = raw / mass;
        let denom = a.abs().max(b.abs());
        if denom > 0.0 {
            assert!(((a - b) / denom).abs() < 1e-9, "log-space {a} vs product {b}");
        }
    }

    // permutation invariance, N = 1000
    let set = sample_homodyne(&s, 0.5, 1000, 515).unwrap();
    let post = posterior(&set, grid).unwrap();
    let mut reordered = set.samples().to_vec();
    reordered.reverse();
    reordered.rotate_left(317);
    let set_perm = SampleSet::from_parts(reordered, s, 0.5, 515).unwrap();
    let post_perm = posterior(&set_perm, grid).unwrap();
    let peak = post.density().iter().cloned().fold(0.0f64, f64::max);
    for (a, b) in post.density().iter().zip(post_perm.density()) {
        assert!((a - b).abs() <= 1e-12 * peak, "permutation moved the posterior");
    }

    // sequential single-outcome updates vs the batch product, N = 300
    let set = sample_homodyne(&s, 0.45, 300, 31).unwrap();
    let batch = posterior(&set, grid).unwrap();
    let thetas = batch.thetas().to_vec();
    let mut density = vec![2.0 / std::f64::consts::PI; grid];
    for &x in set.samples() {
        for (d, &theta) in density.iter_mut().zip(&thetas) {
            *d *= log_likelihood(x, theta, &s).exp();
        }
        let mass = trapezoid(&thetas, &density);
        density.iter_mut().for_each(|d| *d /= mass);
    }
    let peak = batch.density().iter().cloned().fold(0.0f64, f64::max);
    for (a, b) in batch.density().iter().zip(&density) {
        assert!((a - b).abs() <= 1e-10 * peak, "sequential {b} vs batch {a}");
    }
    println!("criterion 08 posterior-algebra: PASS");
}

fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    let step = xs[1] - xs[0];
    let interior: f64 = ys[1..ys.len() - 1].iter().sum();
    step * (0.5 * ys[0] + interior + 0.5 * ys[ys.len() - 1])
}

#[test]
fn criterion_09_sampler_fidelity() {
    let n = 10_000usize;
    // Kolmogorov critical value at alpha = 0.001
    let d_crit = (0.5 * (2.0f64 / 0.001).ln()).sqrt() / (n as f64).sqrt();
    for i in 0..5u64 {
        let r = 0.1 + 1.0 * unit(9, 3 * i);
        let rp = 0.7 * unit(9, 3 * i + 1);
        let theta = std::f64::consts::FRAC_PI_2 * unit(9, 3 * i + 2);
        let s = SqueezedThermalState::new(r, rp).unwrap();
        let set = sample_homodyne(&s, theta, n, 7000 + i).unwrap();

        let mut sorted = set.samples().to_vec();
        sorted.sort_by(f64::total_cmp);
        let dist = Normal::new(0.0, marginal_variance(&s, theta).sqrt()).unwrap();
        let mut d_max = 0.0f64;
        for (k, &x) in sorted.iter().enumerate() {
            let cdf = dist.cdf(x);
            d_max = d_max
                .max((cdf - k as f64 / n as f64).abs())
                .max((cdf - (k + 1) as f64 / n as f64).abs());
        }
        assert!(
            d_max < d_crit,
            "KS statistic {d_max} exceeds critical {d_crit} for case {i}"
        );

        let expect = s.covariance_at(theta).xx();
        let mean = set.samples().iter().sum::<f64>() / n as f64;
        let var = set
            .samples()
            .iter()
            .map(|x| (x - mean) * (x - mean))
            .sum::<f64>()
            / (n as f64 - 1.0);
        assert!(
            (var - expect).abs() < 5.0 * expect * (2.0 / n as f64).sqrt(),
            "sample variance {var} vs xx {expect} for case {i}"
        );
    }
    println!("criterion 09 sampler-fidelity: PASS");
}

#[test]
fn criterion_10_determinism() {
    let cfg = ExperimentConfig {
        state: Some(StateSpec::Decibels {
            squeezing_db: 3.21,
            antisqueezing_db: 3.41,
        }),
        states: None,
        theta: None,
        thetas: Some(vec![0.2, 0.4, 0.6, 0.8]),
        n_samples: 300,
        repetitions: 6,
        seed: 99,
        grid_points: 512,
        out_path: Some("sweep.csv".into()),
    };
    let state = cfg.primary_state().unwrap();
    let thetas = cfg.thetas.clone().unwrap();
    let run = |mode| {
        let report = sweep_theta(
            &state,
            &thetas,
            cfg.n_samples,
            cfg.repetitions,
            cfg.seed,
            cfg.grid_points,
            mode,
        )
        .unwrap();
        (trials_csv(&report, &cfg), aggregate_csv(&report, &cfg))
    };
    let (trials_serial, agg_serial) = run(ExecMode::Serial);
    let (trials_again, agg_again) = run(ExecMode::Serial);
    let (trials_par, agg_par) = run(ExecMode::Parallel);
    assert_eq!(trials_serial.as_bytes(), trials_again.as_bytes(), "rerun differs");
    assert_eq!(agg_serial.as_bytes(), agg_again.as_bytes(), "rerun differs");
    assert_eq!(trials_serial.as_bytes(), trials_par.as_bytes(), "parallel differs");
    assert_eq!(agg_serial.as_bytes(), agg_par.as_bytes(), "parallel differs");
    println!("criterion 10 determinism: PASS");
}
