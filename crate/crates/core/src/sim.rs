//! Fixed-step closed-loop simulation.
//!
//! The loop runs two nested clocks: the controller updates every `sample_dt`
//! with its output held (zero-order hold, saturated at the plant boundary),
//! and the reduced plant integrates between updates with classical RK4 at
//! `solver_dt`. Load-torque steps come from a right-continuous schedule.
//! Runs are strictly single-threaded and reproducible: identical inputs
//! produce bit-identical records.

use std::time::Instant;

use thiserror::Error;

use crate::controllers::{
    CommonLoopState, ConfigError, Controller, ControllerConfig, DerivFilter, EsoState, PlantView,
    DERIV_FILTER_TAU_SAMPLES,
};
use crate::plant::{
    dq_derivatives, reduced_speed_derivative, saturate, DqInput, MotorState, PlantError,
    PmsmParams,
};

/// Scenario or parameter rejection before a run starts.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Plant(#[from] PlantError),
    #[error(transparent)]
    Controller(#[from] ConfigError),
}

/// Classical 4th-order Runge–Kutta step for a fixed-size state vector.
pub fn rk4_step<const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
    t: f64,
    y: &[f64; N],
    dt: f64,
) -> [f64; N] {
    debug_assert!(dt > 0.0);
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * dt, &add_scaled(y, &k1, 0.5 * dt));
    let k3 = f(t + 0.5 * dt, &add_scaled(y, &k2, 0.5 * dt));
    let k4 = f(t + dt, &add_scaled(y, &k3, dt));
    let mut out = *y;
    for i in 0..N {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn add_scaled<const N: usize>(y: &[f64; N], k: &[f64; N], h: f64) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += h * k[i];
    }
    out
}

/// One RK4 step of the full dq model, with the electrical angle wrapped back
/// into [0, 2π) afterwards.
pub fn step_dq(
    params: &PmsmParams,
    state: &MotorState,
    input: &DqInput,
    dt: f64,
) -> Result<MotorState, PlantError> {
    // Surface the field-naming error once, up front.
    dq_derivatives(params, state, input)?;
    let y = [state.id, state.iq, state.omega_r, state.theta_e];
    let next = rk4_step(
        |_, y: &[f64; 4]| {
            let s = MotorState {
                id: y[0],
                iq: y[1],
                omega_r: y[2],
                theta_e: y[3],
            };
            let d = dq_derivatives(params, &s, input).expect("inputs validated above");
            [d.d_id, d.d_iq, d.d_omega_r, d.d_theta_e]
        },
        0.0,
        &y,
        dt,
    );
    let mut out = MotorState {
        id: next[0],
        iq: next[1],
        omega_r: next[2],
        theta_e: next[3],
    };
    out.wrap_angle();
    Ok(out)
}

/// Speed reference shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RefProfile {
    /// Step from rest to the target at `t_step`.
    Step { t_step: f64 },
    /// Linear ramp from rest to the target over `ramp_time`, starting at `t_start`.
    Ramp { t_start: f64, ramp_time: f64 },
}

impl RefProfile {
    /// Reference value at time `t` for the given target speed.
    pub fn value(&self, t: f64, target: f64) -> f64 {
        match *self {
            RefProfile::Step { t_step } => {
                if t >= t_step {
                    target
                } else {
                    0.0
                }
            }
            RefProfile::Ramp { t_start, ramp_time } => {
                if t < t_start {
                    0.0
                } else if t >= t_start + ramp_time {
                    target
                } else {
                    target * (t - t_start) / ramp_time
                }
            }
        }
    }

    /// First derivative of the reference. Step edges are treated as zero:
    /// impulses are not fed forward.
    pub fn derivative(&self, t: f64, target: f64) -> f64 {
        match *self {
            RefProfile::Step { .. } => 0.0,
            RefProfile::Ramp { t_start, ramp_time } => {
                if t >= t_start && t < t_start + ramp_time {
                    target / ramp_time
                } else {
                    0.0
                }
            }
        }
    }

    /// Second derivative of the reference; zero for both supported shapes.
    pub fn second_derivative(&self, _t: f64, _target: f64) -> f64 {
        0.0
    }
}

/// One load-torque step event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisturbanceEvent {
    /// Time of the step (s).
    pub time: f64,
    /// Torque applied from this instant on (N·m).
    pub torque: f64,
}

/// Right-continuous piecewise-constant load-torque schedule.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DisturbanceSchedule {
    /// Torque before the first event (N·m).
    pub initial: f64,
    /// Step events with strictly increasing times.
    pub events: Vec<DisturbanceEvent>,
}

impl DisturbanceSchedule {
    /// No load at any time.
    pub fn none() -> Self {
        Self::default()
    }

    /// Constant load for the whole run.
    pub fn constant(torque: f64) -> Self {
        Self {
            initial: torque,
            events: Vec::new(),
        }
    }

    /// The benchmark's disturbed profile: rated load from the start, removed
    /// at 0.2 s, reapplied at 0.6 s.
    pub fn rated_steps() -> Self {
        Self {
            initial: 1.2,
            events: vec![
                DisturbanceEvent {
                    time: 0.2,
                    torque: 0.0,
                },
                DisturbanceEvent {
                    time: 0.6,
                    torque: 1.2,
                },
            ],
        }
    }

    /// Torque of the latest event at or before `t`, else the initial value.
    pub fn torque_at(&self, t: f64) -> f64 {
        let mut torque = self.initial;
        for ev in &self.events {
            if ev.time <= t {
                torque = ev.torque;
            } else {
                break;
            }
        }
        torque
    }

    /// Time of the last event, if any.
    pub fn last_event_time(&self) -> Option<f64> {
        self.events.last().map(|ev| ev.time)
    }

    fn validate(&self) -> Result<(), SimError> {
        let mut prev = f64::NEG_INFINITY;
        for ev in &self.events {
            if !ev.time.is_finite() || !ev.torque.is_finite() {
                return Err(SimError::InvalidScenario(
                    "disturbance event with non-finite value".into(),
                ));
            }
            if ev.time <= prev {
                return Err(SimError::InvalidScenario(format!(
                    "disturbance event times must be strictly increasing (at t = {})",
                    ev.time
                )));
            }
            prev = ev.time;
        }
        Ok(())
    }
}

/// Everything one closed-loop run needs besides the machine parameters.
#[derive(Debug, Clone)]
pub struct Scenario {
    /// Controller variant and gains.
    pub controller: ControllerConfig,
    /// Target speed (rad/s).
    pub omega_ref: f64,
    /// Reference shape.
    pub profile: RefProfile,
    /// Run length (s).
    pub duration: f64,
    /// Plant integration step (s).
    pub solver_dt: f64,
    /// Controller period (s); must be an integer multiple of `solver_dt`.
    pub sample_dt: f64,
    /// Load-torque schedule.
    pub disturbance: DisturbanceSchedule,
    /// Enable the extended state observer feedforward path.
    pub eso_enabled: bool,
    /// Observer pole location (rad/s).
    pub eso_bandwidth: f64,
    /// Give the super-twisting equivalent control the true scheduled load
    /// instead of the observer estimate.
    pub oracle_disturbance: bool,
    /// Derivative-filter time constant in sampling periods.
    pub deriv_filter_tau: f64,
}

impl Scenario {
    /// Nominal run: step to 700 rad/s at t = 0, no external load, 1 s.
    pub fn nominal(controller: ControllerConfig) -> Self {
        Self {
            controller,
            omega_ref: 700.0,
            profile: RefProfile::Step { t_step: 0.0 },
            duration: 1.0,
            solver_dt: 1e-5,
            sample_dt: 1e-4,
            disturbance: DisturbanceSchedule::none(),
            eso_enabled: false,
            eso_bandwidth: EsoState::DEFAULT_BANDWIDTH,
            oracle_disturbance: false,
            deriv_filter_tau: DERIV_FILTER_TAU_SAMPLES,
        }
    }

    /// Same as [`Scenario::nominal`] but with the rated load-step schedule.
    pub fn disturbed(controller: ControllerConfig) -> Self {
        Self {
            disturbance: DisturbanceSchedule::rated_steps(),
            ..Self::nominal(controller)
        }
    }

    /// Number of controller updates in the run.
    pub fn sample_count(&self) -> usize {
        (self.duration / self.sample_dt).round() as usize
    }

    /// Plant substeps per controller period.
    pub fn substeps(&self) -> usize {
        (self.sample_dt / self.solver_dt).round() as usize
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(SimError::InvalidScenario("duration must be positive".into()));
        }
        if !(self.solver_dt.is_finite() && self.solver_dt > 0.0)
            || !(self.sample_dt.is_finite() && self.sample_dt > 0.0)
        {
            return Err(SimError::InvalidScenario("time steps must be positive".into()));
        }
        let ratio = self.sample_dt / self.solver_dt;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio || ratio < 1.0 - 1e-9 {
            return Err(SimError::InvalidScenario(format!(
                "sample_dt must be an integer multiple of solver_dt (ratio {ratio})"
            )));
        }
        if let Some(last) = self.disturbance.last_event_time() {
            if self.duration < last {
                return Err(SimError::InvalidScenario(format!(
                    "duration {} shorter than last disturbance event at {last}",
                    self.duration
                )));
            }
        }
        self.disturbance.validate()?;
        if !(self.eso_bandwidth.is_finite() && self.eso_bandwidth > 0.0) {
            return Err(SimError::InvalidScenario(
                "observer bandwidth must be positive".into(),
            ));
        }
        if !(self.deriv_filter_tau.is_finite() && self.deriv_filter_tau > 0.0) {
            return Err(SimError::InvalidScenario(
                "derivative filter time constant must be positive".into(),
            ));
        }
        self.controller.validate()?;
        Ok(())
    }
}

/// Why a run stopped early.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    /// Controller sample index at which the failure was detected.
    pub sample: usize,
    pub reason: String,
}

/// Sampled time series of one closed-loop run, one row per controller update.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    /// Controller period (s).
    pub sample_dt: f64,
    /// Target speed the scenario commanded (rad/s).
    pub omega_ref_target: f64,
    /// Sample instants (s), strictly increasing by `sample_dt`.
    pub time: Vec<f64>,
    /// Measured rotor speed at each sample (rad/s).
    pub omega: Vec<f64>,
    /// Reference value at each sample (rad/s).
    pub omega_ref: Vec<f64>,
    /// Commanded current before saturation (A).
    pub iq_cmd: Vec<f64>,
    /// Applied current after saturation (A).
    pub iq_applied: Vec<f64>,
    /// Speed error ω* − ω (rad/s).
    pub error: Vec<f64>,
    /// Sliding variable reported by the controller.
    pub s_value: Vec<f64>,
    /// Scheduled load torque (N·m).
    pub t_load: Vec<f64>,
    /// Mean controller compute time per update (ns). Excluded from
    /// determinism comparisons.
    pub mean_update_ns: f64,
    /// Set when the run aborted early; the series hold the partial record.
    pub failure: Option<RunFailure>,
}

impl RunRecord {
    fn with_capacity(sample_dt: f64, target: f64, n: usize) -> Self {
        Self {
            sample_dt,
            omega_ref_target: target,
            time: Vec::with_capacity(n),
            omega: Vec::with_capacity(n),
            omega_ref: Vec::with_capacity(n),
            iq_cmd: Vec::with_capacity(n),
            iq_applied: Vec::with_capacity(n),
            error: Vec::with_capacity(n),
            s_value: Vec::with_capacity(n),
            t_load: Vec::with_capacity(n),
            mean_update_ns: 0.0,
            failure: None,
        }
    }

    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    pub fn is_failed(&self) -> bool {
        self.failure.is_some()
    }

    /// Recorded series agree with the deterministic part of `other`
    /// (everything except wall-clock timing).
    pub fn same_series(&self, other: &RunRecord) -> bool {
        self.sample_dt == other.sample_dt
            && self.omega_ref_target == other.omega_ref_target
            && self.time == other.time
            && self.omega == other.omega
            && self.omega_ref == other.omega_ref
            && self.iq_cmd == other.iq_cmd
            && self.iq_applied == other.iq_applied
            && self.error == other.error
            && self.s_value == other.s_value
            && self.t_load == other.t_load
            && self.failure == other.failure
    }
}

/// Runs one scenario against the reduced plant and records every sample.
pub fn run_scenario(scenario: &Scenario, params: &PmsmParams) -> Result<RunRecord, SimError> {
    scenario.validate()?;
    params.validate()?;

    let consts = params.derived();
    let ts = scenario.sample_dt;
    let n_samples = scenario.sample_count();
    let substeps = scenario.substeps();
    let target = scenario.omega_ref;

    let mut controller = Controller::new(
        &scenario.controller,
        &consts,
        ts,
        scenario.deriv_filter_tau,
    )?;
    let mut eso = scenario
        .eso_enabled
        .then(|| EsoState::new(scenario.eso_bandwidth));
    let mut e_filter = DerivFilter::new(ts, scenario.deriv_filter_tau);

    let mut record = RunRecord::with_capacity(ts, target, n_samples);
    let mut omega = 0.0f64;
    let mut iq_applied = 0.0f64;
    let mut update_ns_total = 0u128;
    let blowup_limit = if target != 0.0 {
        10.0 * target.abs()
    } else {
        f64::INFINITY
    };

    for k in 0..n_samples {
        let t = k as f64 * ts;
        let omega_ref = scenario.profile.value(t, target);
        let e = omega_ref - omega;
        let lp = CommonLoopState {
            e,
            e_dot: e_filter.update(e),
            omega_ref_dot: scenario.profile.derivative(t, target),
            omega_ref_ddot: scenario.profile.second_derivative(t, target),
        };

        if let Some(observer) = eso.as_mut() {
            observer.update(&consts, omega, iq_applied, ts);
        }

        let t_load_now = scenario.disturbance.torque_at(t);
        let t_load_est = if scenario.oracle_disturbance {
            t_load_now
        } else if let Some(observer) = eso.as_ref() {
            observer.load_torque_estimate(&consts, omega)
        } else {
            0.0
        };
        let view = PlantView {
            iq: iq_applied,
            omega_m: omega,
            t_load_est,
        };

        let started = Instant::now();
        let iq_cmd = controller.update(&lp, eso.as_ref(), &view);
        update_ns_total += started.elapsed().as_nanos();

        if !iq_cmd.is_finite() {
            record.failure = Some(RunFailure {
                sample: k,
                reason: format!("controller output non-finite at t = {t}"),
            });
            break;
        }
        iq_applied = saturate(iq_cmd, params.iq_limit);

        record.time.push(t);
        record.omega.push(omega);
        record.omega_ref.push(omega_ref);
        record.iq_cmd.push(iq_cmd);
        record.iq_applied.push(iq_applied);
        record.error.push(e);
        record.s_value.push(controller.sliding());
        record.t_load.push(t_load_now);

        for sub in 0..substeps {
            let t_sub = t + sub as f64 * scenario.solver_dt;
            let next = rk4_step(
                |tt, y: &[f64; 1]| {
                    [reduced_speed_derivative(
                        &consts,
                        y[0],
                        iq_applied,
                        scenario.disturbance.torque_at(tt),
                    )]
                },
                t_sub,
                &[omega],
                scenario.solver_dt,
            );
            omega = next[0];
        }

        if !omega.is_finite() || omega.abs() > blowup_limit {
            record.failure = Some(RunFailure {
                sample: k,
                reason: format!("speed diverged to {omega} at t = {t}"),
            });
            break;
        }
    }

    let updates = record.len().max(1) as f64;
    record.mean_update_ns = update_ns_total as f64 / updates;
    Ok(record)
}
