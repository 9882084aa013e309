//! Lindblad RK4 integrator against closed-form T1/T2 decay.

mod common;

use ergolab::dynamics::{apply_noisy, evolve_free, evolve_free_sampled, NoiseModel};
use ergolab::{Complex64, DensityMatrix, QubitParams};
use rand::Rng;

fn noise_for(t1: f64, t2: f64) -> NoiseModel {
    let p = QubitParams::new(2.0 * std::f64::consts::PI * 5e9, t1, t2, 0.0).unwrap();
    NoiseModel::from_params(&p)
}

fn decayed(rho: &DensityMatrix, t1: f64, t2: f64, t: f64) -> (f64, Complex64) {
    (
        rho.p1() * (-t / t1).exp(),
        rho.coherence_amplitude() * (-t / t2).exp(),
    )
}

#[test]
fn matches_closed_form_on_random_cases() {
    let mut rng = common::rng(11);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let rho = common::random_state(&mut rng);
        let t1: f64 = rng.random_range(1e-6..100e-6);
        let t2 = t1 * rng.random_range(0.1..=2.0);
        let t = t1 * rng.random_range(0.0..3.0);
        let dt = t1.min(t2) / 1000.0;
        let r = evolve_free(&rho, &noise_for(t1, t2), t, dt).unwrap();
        let (p1, a) = decayed(&rho, t1, t2, t);
        worst = worst
            .max((r.final_state.p1() - p1).abs())
            .max((r.final_state.coherence_amplitude() - a).norm());
        assert!(r.max_positivity_violation <= 1e-8);
    }
    assert!(worst <= 1e-6, "worst deviation {worst}");
}

#[test]
fn trace_drift_over_a_million_steps() {
    let p = QubitParams::working_point();
    let noise = NoiseModel::from_params(&p);
    let rho = DensityMatrix::new(2.0 / 3.0, Complex64::new(2f64.sqrt() / 3.0, 0.0)).unwrap();
    let dt = 2.2e-9;
    let r = evolve_free(&rho, &noise, 1_000_000.0 * dt, dt).unwrap();
    assert_eq!(r.step_count, 1_000_000);
    assert!(r.max_trace_drift <= 1e-9, "{}", r.max_trace_drift);
    assert!(r.max_positivity_violation <= 1e-8);
}

#[test]
fn fourth_order_convergence() {
    let (t1, t2) = (64.5e-6, 2.2e-6);
    let noise = noise_for(t1, t2);
    let rho = DensityMatrix::new(0.6, Complex64::new(0.3, 0.2)).unwrap();
    let t = 6e-6;
    let err = |dt: f64| {
        let r = evolve_free(&rho, &noise, t, dt).unwrap();
        let (p1, a) = decayed(&rho, t1, t2, t);
        (r.final_state.p1() - p1)
            .abs()
            .max((r.final_state.coherence_amplitude() - a).norm())
    };
    let coarse = err(t2 / 100.0);
    let fine = err(t2 / 200.0);
    assert!(
        coarse > 1e-13,
        "coarse error {coarse} too small to resolve the order"
    );
    assert!(coarse / fine >= 8.0, "ratio {}", coarse / fine);
}

#[test]
fn coherence_decay_recovers_t2() {
    let (t1, t2) = (64.5e-6, 2.2e-6);
    let rho = DensityMatrix::new(0.5, Complex64::new(0.5, 0.0)).unwrap();
    let r = evolve_free_sampled(&rho, &noise_for(t1, t2), t2, t2 / 1000.0, 201).unwrap();
    // Least-squares slope of ln|a| against time.
    let pts: Vec<(f64, f64)> = r
        .trajectory
        .iter()
        .map(|s| (s.time, s.state.coherence_amplitude().norm().ln()))
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = pts
        .iter()
        .fold((0.0, 0.0), |(x, y), p| (x + p.0 / n, y + p.1 / n));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), p| {
        (a + (p.0 - mx) * (p.1 - my), b + (p.0 - mx).powi(2))
    });
    let fitted = -sxx / sxy;
    assert!(((fitted - t2) / t2).abs() <= 1e-3, "fitted T2 = {fitted}");
}

#[test]
fn noisy_gate_stays_physical() {
    let p = QubitParams::working_point();
    let noise = NoiseModel::from_params(&p);
    let timing = ergolab::control::GateTiming::resonant(&p);
    let mut rng = common::rng(5);
    for _ in 0..20 {
        let rho = common::random_state(&mut rng);
        let g = ergolab::control::Gate::rotation(
            common::random_unit(&mut rng),
            rng.random_range(0.0..=std::f64::consts::PI),
            &timing,
        )
        .unwrap();
        let r = apply_noisy(&g, &rho, &noise, 8e-11).unwrap();
        assert!(r.max_trace_drift <= 1e-9 && r.max_positivity_violation <= 1e-8);
    }
}
