use mvam::actuation::*;
use mvam::config::Config;
use mvam::dynamics::{inverse_dynamics_trace, DEFAULT_MU};
use mvam::energetics::*;
use mvam::gait::{plan_gait, GaitParams};
use mvam::morphology::{BodyParams, MorphologySample};
use nalgebra::Vector2;
use proptest::prelude::*;

fn nominal() -> (Config, MorphologySample) {
    let cfg = Config::default();
    let s = cfg.nominal_sample().unwrap();
    (cfg, s)
}

proptest! {
    #[test]
    fn electrical_power_is_nonnegative(tau in -30.0f64..30.0, omega in -40.0f64..40.0) {
        for spec in [ActuatorSpec::knee(), ActuatorSpec::hip_sagittal(), ActuatorSpec::hip_frontal()] {
            prop_assert!(electrical_power(&spec, tau, omega) >= 0.0);
        }
    }

    #[test]
    fn tcot_scales_with_power(s in 0.0f64..10.0) {
        let (cfg, sample) = nominal();
        let plan = plan_gait(&cfg.gait, &sample.body).unwrap();
        let tr = inverse_dynamics_trace(&sample.body, &plan, 1e-3, DEFAULT_MU).unwrap();
        let p = PowerTrace::from_torques(&tr.torque, &cfg.actuators);
        let d = plan.distance_per_cycle();
        let base = EnergyReport::from_power(&p, sample.body.mass, d).unwrap().tcot;
        let scaled = EnergyReport::from_power(&p.scaled(s), sample.body.mass, d).unwrap().tcot;
        prop_assert!((scaled - s * base).abs() <= 1e-12 * (1.0 + s * base));
    }
}

#[test]
fn copper_loss_scales_with_torque_squared() {
    let spec = ActuatorSpec::knee();
    let (cfg, sample) = nominal();
    let plan = plan_gait(&cfg.gait, &sample.body).unwrap();
    let tr = inverse_dynamics_trace(&sample.body, &plan, 1e-3, DEFAULT_MU).unwrap();
    let p1 = PowerTrace::from_torques(&tr.torque, &cfg.actuators);
    let p2 = PowerTrace::from_torques(&tr.torque.scaled(2.0), &cfg.actuators);
    for (a, b) in p1.copper.iter().zip(&p2.copper) {
        assert!((b - 4.0 * a).abs() <= 1e-12 * (1.0 + b));
    }
    assert!(copper_loss(&spec, 1.0) > 0.0);
}

#[test]
fn record_matches_hand_composed_pipeline() {
    let (cfg, sample) = nominal();
    let rec = evaluate_morphology(&sample, &cfg.gait, &cfg.actuators, &cfg.evaluation);
    let plan = plan_gait(&cfg.gait, &sample.body).unwrap();
    let tr = inverse_dynamics_trace(&sample.body, &plan, cfg.evaluation.dt, cfg.evaluation.mu).unwrap();
    let power = PowerTrace::from_torques(&tr.torque, &cfg.actuators);
    let energy = energy_integral(&power).unwrap();
    let expected = tcot(energy, sample.body.mass, cfg.gait.speed * cfg.gait.period).unwrap();
    assert_eq!(rec.tcot, Some(expected));
    assert_eq!(rec.min_stability_margin, Some(tr.min_margin()));
    assert!(rec.feasible);
}

#[test]
fn evaluation_is_deterministic() {
    let (cfg, sample) = nominal();
    let a = evaluate_morphology(&sample, &cfg.gait, &cfg.actuators, &cfg.evaluation);
    let b = evaluate_morphology(&sample, &cfg.gait, &cfg.actuators, &cfg.evaluation);
    assert_eq!(a, b);
}

#[test]
fn infeasible_designs_are_flagged_not_fatal() {
    let (cfg, sample) = nominal();
    let weak = ActuatorSet::default();
    let weak = ActuatorSet { knee: weak.knee.with_limits(0.1, 33.0), ..weak };
    let rec = evaluate_morphology(&sample, &cfg.gait, &weak, &cfg.evaluation);
    assert!(!rec.feasible);
    assert_eq!(rec.tcot, None);
    assert_eq!(rec.fitness(), f64::INFINITY);
    let standing = GaitParams { speed: 0.0, ..cfg.gait };
    let rec = evaluate_morphology(&sample, &standing, &cfg.actuators, &cfg.evaluation);
    assert!(!rec.feasible);
    assert!(rec.reason.unwrap().contains("undefined"));
}

#[test]
fn unlimited_actuators_give_the_cap() {
    let (cfg, sample) = nominal();
    let search = PayloadSearch { cap: 0.5, ..PayloadSearch::default() };
    let m = payload_margin(&sample.body, &cfg.gait, &ActuatorSet::unlimited(), &search, 1e-3, DEFAULT_MU);
    assert_eq!(m, Ok(0.5));
}

/// Actuator set whose knee limit sits `headroom` above the nominal peak.
fn tight_limits(body: &BodyParams, gait: &GaitParams, headroom: f64) -> ActuatorSet {
    let plan = plan_gait(gait, body).unwrap();
    let tr = inverse_dynamics_trace(body, &plan, 1e-3, DEFAULT_MU).unwrap();
    let peak = tr.torque.joints.iter().flatten().map(|j| j[1].torque.abs()).fold(0.0, f64::max);
    let d = ActuatorSet::default();
    ActuatorSet { knee: d.knee.with_limits(peak * (1.0 + headroom), f64::INFINITY), ..ActuatorSet::unlimited() }
}

fn linear_scan(body: &BodyParams, gait: &GaitParams, specs: &ActuatorSet, search: &PayloadSearch) -> f64 {
    let mut k = 0u64;
    while (k + 1) as f64 * 1e-3 <= search.cap + 1e-12
        && payload_feasible(body, gait, specs, search, (k + 1) as f64 * 1e-3, 1e-3, DEFAULT_MU).unwrap()
    {
        k += 1;
    }
    k as f64 * 1e-3
}

#[test]
fn payload_margin_matches_gram_scan() {
    let gait = GaitParams::default();
    let search = PayloadSearch { cap: 0.4, ..PayloadSearch::default() };
    for (i, cx) in [-0.08, -0.03, 0.0, 0.02, 0.06].iter().enumerate() {
        for headroom in [0.01, 0.04] {
            let body = BodyParams::lumped(4.3, Vector2::new(*cx, 0.01 * i as f64), 0.1);
            let specs = tight_limits(&body, &gait, headroom);
            let got = payload_margin(&body, &gait, &specs, &search, 1e-3, DEFAULT_MU).unwrap();
            let oracle = linear_scan(&body, &gait, &specs, &search);
            assert!((got - oracle).abs() < 1e-9, "cx {cx}: {got} vs {oracle}");
            assert!(got > 0.0 && got < search.cap, "cx {cx}: {got}");
        }
    }
}

#[test]
fn payload_feasibility_is_monotone_below_the_margin() {
    let gait = GaitParams::default();
    let body = BodyParams::lumped(4.3, Vector2::new(0.03, 0.0), 0.1);
    let specs = tight_limits(&body, &gait, 0.03);
    let search = PayloadSearch { cap: 1.0, ..PayloadSearch::default() };
    let m = payload_margin(&body, &gait, &specs, &search, 1e-3, DEFAULT_MU).unwrap();
    for k in 0..=20 {
        let added = m * k as f64 / 20.0;
        assert!(payload_feasible(&body, &gait, &specs, &search, added, 1e-3, DEFAULT_MU).unwrap());
    }
    assert!(!payload_feasible(&body, &gait, &specs, &search, m + 1e-3, 1e-3, DEFAULT_MU).unwrap());
}

#[test]
fn nominal_infeasible_has_no_margin() {
    let gait = GaitParams::default();
    let body = BodyParams::lumped(4.3, Vector2::new(0.03, 0.0), 0.1);
    let specs = tight_limits(&body, &gait, -0.1);
    let r = payload_margin(&body, &gait, &specs, &PayloadSearch::default(), 1e-3, DEFAULT_MU);
    assert!(matches!(r, Err(PayloadError::NominalInfeasible(_))));
}
