use std::f64::consts::{PI, SQRT_2};

use statrs::function::erf::erfc;

use tailmean::lln::{
    cauchy_stability_demo, envelope_entry, mean_vs_single_distance, running_mean_trajectory, wlln_experiment, Sampler,
};
use tailmean::{AtomicComb, BuiltinComb, DensityMeasure, MeasureSpec};

fn gaussian() -> MeasureSpec {
    DensityMeasure::gaussian(0.0, 1.0).unwrap().into()
}

fn cauchy() -> MeasureSpec {
    DensityMeasure::cauchy(0.0, 1.0).unwrap().into()
}

#[test]
fn cauchy_samples_put_half_the_mass_in_the_unit_interval() {
    let xs = Sampler::new(&cauchy(), 1).unwrap().sample(100_000).unwrap();
    let inside = xs.iter().filter(|x| x.abs() <= 1.0).count() as f64 / 1e5;
    assert!((inside - 0.5).abs() < 0.01, "{inside}");
}

#[test]
fn gaussian_sample_mean_is_near_zero() {
    let xs = Sampler::new(&gaussian(), 2).unwrap().sample(100_000).unwrap();
    let m = xs.iter().sum::<f64>() / 1e5;
    assert!(m.abs() < 0.02, "{m}");
}

#[test]
fn comb_atom_frequency_matches_weight() {
    let m: MeasureSpec = AtomicComb::builtin(BuiltinComb::Ex2).into();
    let xs = Sampler::new(&m, 3).unwrap().sample(100_000).unwrap();
    // index n carries ±2^n with weight 2^{-(n+1)} each
    for (atom, weight) in [(2.0, 0.25), (4.0, 0.125), (-8.0, 0.0625)] {
        let hits = xs.iter().filter(|x| **x == atom).count() as f64 / 1e5;
        assert!((hits - weight).abs() < 0.005, "{atom}: {hits}");
    }
}

#[test]
fn empirical_window_masses_within_five_sigma() {
    let m = gaussian();
    let n = 20_000usize;
    let xs = Sampler::new(&m, 4).unwrap().sample(n).unwrap();
    for (lo, hi) in [(-1.0, 1.0), (0.5, 2.0), (-3.0, -0.2)] {
        let p = m.window_mass(lo, hi).unwrap();
        let freq = xs.iter().filter(|x| lo <= **x && **x <= hi).count() as f64 / n as f64;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((freq - p).abs() <= 5.0 * sigma, "[{lo}, {hi}]: {freq} vs {p}");
    }
}

#[test]
fn gaussian_deviations_vanish() {
    let s = Sampler::new(&gaussian(), 0).unwrap();
    let r = wlln_experiment(&s, 0.0, 0.1, &[10, 100, 10_000], 1000).unwrap();
    assert!(r.fractions[2] <= 0.001, "{:?}", r.fractions);
    // decreasing up to Monte Carlo noise
    for w in r.fractions.windows(2) {
        let noise = 2.0 * (w[0] * (1.0 - w[0]) / 1000.0).sqrt();
        assert!(w[1] <= w[0] + noise);
    }
}

#[test]
fn cauchy_deviations_do_not_depend_on_n() {
    let s = Sampler::new(&cauchy(), 0).unwrap();
    let r = wlln_experiment(&s, 0.0, 1.0, &[100, 1000, 10_000], 1000).unwrap();
    for f in &r.fractions {
        assert!((f - 0.5).abs() <= 0.05, "{:?}", r.fractions);
    }
    let r = wlln_experiment(&s, 0.0, 0.5, &[10, 1000], 1000).unwrap();
    let expected = 1.0 - 2.0 / PI * 0.5f64.atan();
    for f in &r.fractions {
        assert!((f - expected).abs() <= 0.05, "{f} vs {expected}");
    }
}

#[test]
fn experiments_reproduce_bitwise() {
    let s = Sampler::new(&cauchy(), 9).unwrap();
    let a = wlln_experiment(&s, 0.0, 1.0, &[50, 500], 200).unwrap();
    let b = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| wlln_experiment(&s, 0.0, 1.0, &[50, 500], 200).unwrap());
    assert_eq!(a, b);
}

#[test]
fn cauchy_mean_has_the_law_of_one_draw() {
    let s = Sampler::new(&cauchy(), 0).unwrap();
    let r = cauchy_stability_demo(&s, 100, 5000).unwrap();
    assert!(r.distance <= 0.03, "{}", r.distance);
    let r = cauchy_stability_demo(&s, 1, 5000).unwrap();
    assert!(r.distance <= 0.03, "{}", r.distance);
}

#[test]
fn gaussian_means_concentrate() {
    // N(0, 1/100) against N(0, 1): sup_x Φ(10x) - Φ(x), found by a grid scan
    let phi = |x: f64| 0.5 * erfc(-x / SQRT_2);
    let oracle = (1..=3000)
        .map(|i| {
            let x = i as f64 * 1e-4;
            phi(10.0 * x) - phi(x)
        })
        .fold(0.0, f64::max);
    assert!((oracle - 0.4).abs() < 0.01, "{oracle}");
    let s = Sampler::new(&gaussian(), 0).unwrap();
    let r = mean_vs_single_distance(&s, 100, 5000).unwrap();
    assert!(
        (r.distance - oracle).abs() <= r.same_law_threshold,
        "{} vs {oracle}",
        r.distance
    );
    assert!(r.distance > 10.0 * r.same_law_threshold);
}

#[test]
fn gaussian_trajectory_enters_the_envelope() {
    let s = Sampler::new(&gaussian(), 5).unwrap();
    let t = running_mean_trajectory(&s, 100_000, 100, 0).unwrap();
    assert_eq!(t.len(), 1000);
    assert_eq!(t.last().unwrap().n, 100_000);
    // soft check: logged, not asserted
    match envelope_entry(&t, 0.0, 1.0) {
        Some(n) => eprintln!("running mean stays inside 5σ/√n from n = {n}"),
        None => eprintln!("running mean left the 5σ/√n envelope at the horizon"),
    }
}
