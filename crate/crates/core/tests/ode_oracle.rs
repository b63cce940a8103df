//! Adaptive integrator against a fixed-step RK4 reference at dt = 1e-6.

use lifespan_core::chain::check_minorant;
use lifespan_core::ode::{comparison_check, integrate, rate_probe, OdeSystemSpec};

const DT: f64 = 1e-6;

fn rk4_step(spec: &OdeSystemSpec, t: f64, y: &mut [f64], h: f64) {
    let k = y.len();
    let mut k1 = vec![0.0; k];
    let mut k2 = vec![0.0; k];
    let mut k3 = vec![0.0; k];
    let mut k4 = vec![0.0; k];
    let mut tmp = vec![0.0; k];
    spec.rhs(t, y, &mut k1);
    for i in 0..k {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    spec.rhs(t + 0.5 * h, &tmp, &mut k2);
    for i in 0..k {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    spec.rhs(t + 0.5 * h, &tmp, &mut k3);
    for i in 0..k {
        tmp[i] = y[i] + h * k3[i];
    }
    spec.rhs(t + h, &tmp, &mut k4);
    for i in 0..k {
        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

/// Reference states at each of `times` (ascending, starting at 0).
fn reference(spec: &OdeSystemSpec, times: &[f64]) -> Vec<Vec<f64>> {
    let mut y = spec.initial.clone();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        let span = target - t;
        if span > 0.0 {
            let steps = (span / DT).ceil() as usize;
            let h = span / steps as f64;
            for s in 0..steps {
                rk4_step(spec, t + s as f64 * h, &mut y, h);
            }
            t = target;
        }
        out.push(y.clone());
    }
    out
}

fn suite() -> Vec<OdeSystemSpec> {
    vec![
        OdeSystemSpec::plain(vec![2.0], vec![1.0]).unwrap(),
        OdeSystemSpec::plain(vec![2.0, 2.0], vec![1.0, 1.0]).unwrap(),
        OdeSystemSpec::new(vec![2.0, 2.0], vec![1.0, 1.0], 1.0, vec![0.0, 5.0]).unwrap(),
        OdeSystemSpec::plain(vec![2.0, 3.0], vec![1.0, 1.0]).unwrap(),
        OdeSystemSpec::plain(vec![3.0, 3.0], vec![1.0, 0.5]).unwrap(),
        OdeSystemSpec::plain(vec![2.0, 2.0, 2.0], vec![1.0, 1.0, 1.01]).unwrap(),
    ]
}

#[test]
fn adaptive_trajectory_matches_fixed_step_reference() {
    for spec in suite() {
        let run = integrate(&spec, 50.0, 1e-10).unwrap();
        let t_num = run.estimate.t_num().expect("every suite system blows up");
        let keep: Vec<usize> = (0..run.trajectory.len())
            .filter(|&i| run.trajectory.times[i] <= 0.9 * t_num)
            .collect();
        let times: Vec<f64> = keep.iter().map(|&i| run.trajectory.times[i]).collect();
        let oracle = reference(&spec, &times);
        for (slot, &i) in keep.iter().enumerate() {
            for (a, b) in run.trajectory.states[i].iter().zip(&oracle[slot]) {
                let rel = (a - b).abs() / b.abs().max(1e-12);
                assert!(rel < 1e-4, "p={:?} t={}: {a} vs {b}", spec.p, times[slot]);
            }
        }
    }
}

#[test]
fn blowup_time_is_stable_under_tolerance_halving() {
    for spec in suite() {
        let a = integrate(&spec, 50.0, 1e-8).unwrap().estimate.t_num().unwrap();
        let b = integrate(&spec, 50.0, 5e-9).unwrap().estimate.t_num().unwrap();
        assert!((a - b).abs() / b < 1e-3, "p={:?}: {a} vs {b}", spec.p);
    }
}

#[test]
fn symmetric_systems_blow_up_at_one() {
    for spec in &suite()[..2] {
        let t = integrate(spec, 10.0, 1e-8).unwrap().estimate.t_num().unwrap();
        assert!((t - 1.0).abs() < 1e-3, "{t}");
    }
}

#[test]
fn minorant_blowup_bounds_the_numerical_time() {
    let spec = &suite()[2];
    let c = check_minorant(spec, 1e-10).unwrap();
    assert!(c.holds());
    let oracle_end = reference(spec, &[0.0, 0.95 * c.t_num.unwrap()]);
    assert!(oracle_end[1][0] > c.minorant.value(0.95 * c.t_num.unwrap()));
}

#[test]
fn comparison_propagates_to_every_component() {
    let f = OdeSystemSpec::plain(vec![2.0, 2.0, 2.0], vec![1.0, 1.0, 1.01]).unwrap();
    let g = OdeSystemSpec::plain(vec![2.0, 2.0, 2.0], vec![1.0, 1.0, 1.0]).unwrap();
    let w = comparison_check(&f, &g, 0.45, 1e-10).unwrap();
    assert!(w.holds, "{:?}", w.first_violation);
    assert!(w.checked_steps > 10);

    let stronger = OdeSystemSpec::new(vec![2.0, 3.0], vec![1.2, 1.0], 0.5, vec![0.5, 0.5]).unwrap();
    let weaker = OdeSystemSpec::new(vec![2.0, 3.0], vec![1.0, 1.0], 0.5, vec![0.5, 0.4]).unwrap();
    assert!(comparison_check(&stronger, &weaker, 1.0, 1e-10).unwrap().holds);

    assert!(comparison_check(&g, &g, 0.45, 1e-10).is_err());
}

#[test]
fn equal_exponent_pair_rates() {
    let spec = OdeSystemSpec::plain(vec![3.0, 3.0], vec![1.0, 0.5]).unwrap();
    let probe = rate_probe(&spec, 50.0).unwrap();
    assert!(probe.matches(&[0.5, 0.5], 0.10), "{:?}", probe.slopes);
}
