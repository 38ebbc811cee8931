//! Cross-module invariants of the assembled loop: reaching behavior,
//! physical bounds, steady-state character under constant load, and the
//! batch rate contract.

use pmsm_smc::controllers::{ControllerConfig, ControllerKind};
use pmsm_smc::plant::PmsmParams;
use pmsm_smc::sim::{run_scenario, DisturbanceSchedule, RefProfile, RunRecord, Scenario};

fn params() -> PmsmParams {
    PmsmParams::default()
}

fn nominal_run(kind: ControllerKind) -> RunRecord {
    run_scenario(
        &Scenario::nominal(ControllerConfig::default_for(kind)),
        &params(),
    )
    .unwrap()
}

#[test]
fn speed_stays_inside_the_dc_gain_bound() {
    // With |iq| ≤ 10 A the loop can never exceed kt·i_max/B.
    let p = params();
    let bound = p.derived().kt * p.iq_limit / p.b;
    for kind in ControllerKind::ALL {
        for scenario in [
            Scenario::nominal(ControllerConfig::default_for(kind)),
            Scenario::disturbed(ControllerConfig::default_for(kind)),
        ] {
            let record = run_scenario(&scenario, &p).unwrap();
            for &w in &record.omega {
                assert!(w.abs() <= bound, "{kind} left the physical envelope: {w}");
            }
        }
    }
}

#[test]
fn reaching_condition_holds_above_documented_floors() {
    // s·ṡ < 0 whenever |s| exceeds a per-controller floor, expressed as a
    // fraction of the run's own peak |s|. The floors cover where each law
    // legitimately stalls or dithers:
    //  - csmc/tsmc/asmc: discretization ripple near the surface;
    //  - ismc: the surface drifts to a friction-offset equilibrium;
    //  - stsmc: hunting amplitude of the twisting transient;
    //  - fosmc: the order-(β+1) term amplifies one-sample error differences
    //    by h^(−β−1), so its sampling quantum dominates the surface value.
    let floors = [
        (ControllerKind::Csmc, 0.002),
        (ControllerKind::Ismc, 0.03),
        (ControllerKind::Tsmc, 0.002),
        (ControllerKind::Fosmc, 0.75),
        (ControllerKind::Asmc, 0.002),
        (ControllerKind::Stsmc, 0.05),
    ];
    for (kind, fraction) in floors {
        let record = nominal_run(kind);
        let peak = record.s_value.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        let floor = fraction * peak;
        for k in 0..record.len() - 1 {
            let s = record.s_value[k];
            let ds = record.s_value[k + 1] - s;
            if s.abs() > floor {
                assert!(
                    s * ds <= 0.0,
                    "{kind}: s·ds = {} > 0 at |s| = {} (floor {floor})",
                    s * ds,
                    s.abs()
                );
            }
        }
    }
}

#[test]
fn integral_action_separates_constant_load_behavior() {
    // Constant rated load, constant reference: the integral surface removes
    // the bias, the plain error surface cannot.
    let p = params();
    let tail_mean = |kind: ControllerKind| {
        let mut scenario = Scenario::nominal(ControllerConfig::default_for(kind));
        scenario.disturbance = DisturbanceSchedule::constant(1.2);
        let record = run_scenario(&scenario, &p).unwrap();
        let n = record.len();
        let m = n / 10;
        record.error[n - m..].iter().map(|e| e.abs()).sum::<f64>() / m as f64
    };
    let ismc = tail_mean(ControllerKind::Ismc);
    let csmc = tail_mean(ControllerKind::Csmc);
    assert!(ismc < 0.001 * 700.0, "integral bias {ismc}");
    assert!(csmc > 0.001 * 700.0, "conventional bias only {csmc}");
}

#[test]
fn record_shape_follows_the_rate_contract() {
    for kind in ControllerKind::ALL {
        let scenario = Scenario::nominal(ControllerConfig::default_for(kind));
        let record = run_scenario(&scenario, &params()).unwrap();
        assert_eq!(record.len(), scenario.sample_count());
        assert_eq!(scenario.substeps(), 10);
        let n = record.len();
        for series_len in [
            record.omega.len(),
            record.omega_ref.len(),
            record.iq_cmd.len(),
            record.iq_applied.len(),
            record.error.len(),
            record.s_value.len(),
            record.t_load.len(),
        ] {
            assert_eq!(series_len, n);
        }
        for w in record.time.windows(2) {
            assert!((w[1] - w[0] - scenario.sample_dt).abs() < 1e-12);
        }
    }
}

#[test]
fn disturbance_schedule_is_reflected_in_the_record() {
    let record = run_scenario(
        &Scenario::disturbed(ControllerConfig::default_for(ControllerKind::Csmc)),
        &params(),
    )
    .unwrap();
    let at = |t: f64| {
        let idx = (t / record.sample_dt).round() as usize;
        record.t_load[idx]
    };
    assert_eq!(at(0.1), 1.2);
    assert_eq!(at(0.2), 0.0);
    assert_eq!(at(0.5), 0.0);
    assert_eq!(at(0.7), 1.2);
}

#[test]
fn observer_feedforward_removes_the_friction_offset() {
    // Nominal run: without the observer the conventional law parks at a
    // friction-induced offset; with it the offset collapses.
    let p = params();
    let cfg = ControllerConfig::default_for(ControllerKind::Csmc);
    let without = run_scenario(&Scenario::nominal(cfg.clone()), &p).unwrap();
    let mut scenario = Scenario::nominal(cfg);
    scenario.eso_enabled = true;
    let with = run_scenario(&scenario, &p).unwrap();

    let tail = |r: &RunRecord| {
        let n = r.len();
        r.error[n - n / 20..].iter().map(|e| e.abs()).sum::<f64>() / (n / 20) as f64
    };
    assert!(tail(&without) > 5.0, "expected a visible friction offset");
    assert!(tail(&with) < 0.5, "observer failed to remove the offset");
}

#[test]
fn ramp_references_are_tracked_through_the_feedforward_path() {
    // A ramp keeps ω̇* nonzero, exercising the reference-derivative terms.
    // During the constant-slope stretch the tracking error should stay far
    // below the slope-per-time-constant scale, and the end value must match.
    let p = params();
    for kind in [ControllerKind::Csmc, ControllerKind::Ismc] {
        let mut scenario = Scenario::nominal(ControllerConfig::default_for(kind));
        scenario.profile = RefProfile::Ramp {
            t_start: 0.0,
            ramp_time: 0.4,
        };
        scenario.eso_enabled = true;
        scenario.duration = 0.8;
        let record = run_scenario(&scenario, &p).unwrap();
        assert!(!record.is_failed());

        // Mid-ramp window, clear of both corners.
        let mid: Vec<f64> = record
            .time
            .iter()
            .zip(&record.error)
            .filter(|(t, _)| (0.1..0.35).contains(*t))
            .map(|(_, e)| e.abs())
            .collect();
        let worst = mid.iter().fold(0.0f64, |m, e| m.max(*e));
        assert!(worst < 35.0, "{kind} mid-ramp error {worst} rad/s");

        let final_err = record.error.last().unwrap().abs();
        assert!(final_err < 7.0, "{kind} end-of-run error {final_err}");
    }
}

#[test]
fn oracle_disturbance_mode_feeds_the_true_load() {
    // With the oracle enabled the super-twisting equivalent control sees the
    // scheduled torque and holds a tighter steady state than with nothing.
    let p = params();
    let cfg = ControllerConfig::default_for(ControllerKind::Stsmc);
    let mut blind = Scenario::nominal(cfg);
    blind.disturbance = DisturbanceSchedule::constant(1.2);
    blind.duration = 0.5;
    let mut oracle = blind.clone();
    oracle.oracle_disturbance = true;

    let tail = |r: &RunRecord| {
        let n = r.len();
        r.error[n - n / 10..].iter().map(|e| e.abs()).sum::<f64>() / (n / 10) as f64
    };
    let blind_tail = tail(&run_scenario(&blind, &p).unwrap());
    let oracle_tail = tail(&run_scenario(&oracle, &p).unwrap());
    assert!(
        oracle_tail < blind_tail,
        "oracle load view did not help: {oracle_tail} vs {blind_tail}"
    );
}
