//! Error indices and time-domain step metrics over a recorded run.
//!
//! The integral indices (ISE, IAE, ITSE, ITAE) are trapezoidal quadratures
//! of e², |e|, t·e² and t·|e| over the whole record, disturbance intervals
//! included. Step metrics follow the usual conventions: 10 %→90 % rise,
//! settling into a ±band that is never left again, overshoot relative to
//! the reference, and the mean error over the final 5 % as the steady-state
//! figure. Chattering is measured as the total-variation rate of the
//! commanded current over a trailing window.

use thiserror::Error;

use crate::sim::RunRecord;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("record holds no samples")]
    EmptyRecord,
}

/// The four integral error indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralIndices {
    /// ∫e² dt ((rad/s)²·s).
    pub ise: f64,
    /// ∫|e| dt (rad).
    pub iae: f64,
    /// ∫t·e² dt ((rad/s)²·s²).
    pub itse: f64,
    /// ∫t·|e| dt (rad·s).
    pub itae: f64,
}

/// Classical step-response figures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepMetrics {
    /// 10 %→90 % rise time (s); `None` when a threshold is never crossed.
    pub rise_time: Option<f64>,
    /// Earliest time after which the response stays inside the band (s);
    /// `None` when it does not settle within the record.
    pub settling_time: Option<f64>,
    /// Peak excursion above the reference, percent of the reference.
    pub overshoot_pct: f64,
    /// Mean (ref − ω) over the final 5 % of the run (rad/s).
    pub steady_state_error: f64,
}

/// Everything the summary table reports for one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub ise: f64,
    pub iae: f64,
    pub itse: f64,
    pub itae: f64,
    pub rise_time: Option<f64>,
    pub settling_time: Option<f64>,
    pub overshoot_pct: f64,
    pub steady_state_error: f64,
    /// Total-variation rate of iq_cmd over the trailing window (A/s).
    pub chattering_index: f64,
}

impl MetricsReport {
    /// Computes the full report with the default 2 % band and 25 % window.
    pub fn from_record(record: &RunRecord) -> Result<Self, MetricsError> {
        Self::with_options(record, record.omega_ref_target, 2.0, 0.25)
    }

    pub fn with_options(
        record: &RunRecord,
        reference: f64,
        band_pct: f64,
        chatter_window: f64,
    ) -> Result<Self, MetricsError> {
        let indices = integral_indices(record)?;
        let step = step_metrics(record, reference, band_pct)?;
        let chattering = chattering_index(record, chatter_window)?;
        Ok(Self {
            ise: indices.ise,
            iae: indices.iae,
            itse: indices.itse,
            itae: indices.itae,
            rise_time: step.rise_time,
            settling_time: step.settling_time,
            overshoot_pct: step.overshoot_pct,
            steady_state_error: step.steady_state_error,
            chattering_index: chattering,
        })
    }
}

fn trapezoid(time: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    let mut acc = 0.0;
    for i in 1..time.len() {
        acc += 0.5 * (time[i] - time[i - 1]) * (f(i) + f(i - 1));
    }
    acc
}

/// Trapezoidal ISE/IAE/ITSE/ITAE over the full record.
pub fn integral_indices(record: &RunRecord) -> Result<IntegralIndices, MetricsError> {
    if record.is_empty() {
        return Err(MetricsError::EmptyRecord);
    }
    let t = &record.time;
    let e = &record.error;
    Ok(IntegralIndices {
        ise: trapezoid(t, |i| e[i] * e[i]),
        iae: trapezoid(t, |i| e[i].abs()),
        itse: trapezoid(t, |i| t[i] * e[i] * e[i]),
        itae: trapezoid(t, |i| t[i] * e[i].abs()),
    })
}

/// Step metrics against a step of height `reference` from rest.
pub fn step_metrics(
    record: &RunRecord,
    reference: f64,
    band_pct: f64,
) -> Result<StepMetrics, MetricsError> {
    if record.is_empty() {
        return Err(MetricsError::EmptyRecord);
    }
    let omega = &record.omega;
    let time = &record.time;
    let n = omega.len();

    let crossing = |fraction: f64| -> Option<f64> {
        let threshold = fraction * reference;
        if reference >= 0.0 {
            (0..n).find(|&i| omega[i] >= threshold).map(|i| time[i])
        } else {
            (0..n).find(|&i| omega[i] <= threshold).map(|i| time[i])
        }
    };
    let rise_time = match (crossing(0.1), crossing(0.9)) {
        (Some(t10), Some(t90)) => Some(t90 - t10),
        _ => None,
    };

    let band = band_pct / 100.0 * reference.abs();
    let last_violation = (0..n).rev().find(|&i| (reference - omega[i]).abs() > band);
    let settling_time = match last_violation {
        None => Some(time[0]),
        Some(i) if i + 1 < n => Some(time[i + 1]),
        Some(_) => None,
    };

    let peak = omega.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let overshoot_pct = if reference != 0.0 {
        ((peak - reference).max(0.0) / reference.abs()) * 100.0
    } else {
        0.0
    };

    let tail = ((0.05 * n as f64).round() as usize).clamp(1, n);
    let sse = record.error[n - tail..].iter().sum::<f64>() / tail as f64;

    Ok(StepMetrics {
        rise_time,
        settling_time,
        overshoot_pct,
        steady_state_error: sse,
    })
}

/// Mean total-variation rate of the commanded current over the trailing
/// `window` fraction of the run (A/s).
pub fn chattering_index(record: &RunRecord, window: f64) -> Result<f64, MetricsError> {
    if record.is_empty() {
        return Err(MetricsError::EmptyRecord);
    }
    debug_assert!(window > 0.0 && window <= 1.0);
    let n = record.len();
    if n < 2 {
        return Ok(0.0);
    }
    let m = ((window * n as f64).round() as usize).clamp(2, n);
    let start = n - m;
    let mut variation = 0.0;
    for i in start + 1..n {
        variation += (record.iq_cmd[i] - record.iq_cmd[i - 1]).abs();
    }
    let duration = record.time[n - 1] - record.time[start];
    Ok(variation / duration)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Synthetic record with the given speed trace at a uniform step.
    fn record_from(omega: Vec<f64>, iq_cmd: Vec<f64>, dt: f64, reference: f64) -> RunRecord {
        let n = omega.len();
        let time: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
        let error: Vec<f64> = omega.iter().map(|w| reference - w).collect();
        RunRecord {
            sample_dt: dt,
            omega_ref_target: reference,
            omega_ref: vec![reference; n],
            iq_applied: iq_cmd.clone(),
            s_value: vec![0.0; n],
            t_load: vec![0.0; n],
            mean_update_ns: 0.0,
            failure: None,
            time,
            omega,
            iq_cmd,
            error,
        }
    }

    fn ramp_error_record(dt: f64) -> RunRecord {
        // e(t) = t on [0, 1]: ω = ref − t with ref = 0 gives error t... use
        // ref = 0 and ω = −t so error = t.
        let n = (1.0 / dt).round() as usize + 1;
        let omega: Vec<f64> = (0..n).map(|k| -(k as f64 * dt)).collect();
        record_from(omega, vec![0.0; n], dt, 0.0)
    }

    #[test]
    fn indices_of_constant_unit_error() {
        let n = 10_001;
        let record = record_from(vec![-1.0; n], vec![0.0; n], 1e-4, 0.0);
        let idx = integral_indices(&record).unwrap();
        assert!((idx.ise - 1.0).abs() < 1e-9);
        assert!((idx.iae - 1.0).abs() < 1e-9);
        assert!((idx.itse - 0.5).abs() < 1e-9);
        assert!((idx.itae - 0.5).abs() < 1e-9);
    }

    #[test]
    fn indices_of_zero_error_vanish() {
        let record = record_from(vec![0.0; 100], vec![0.0; 100], 1e-3, 0.0);
        let idx = integral_indices(&record).unwrap();
        assert_eq!(
            (idx.ise, idx.iae, idx.itse, idx.itae),
            (0.0, 0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn indices_of_linear_error_match_closed_forms() {
        let idx = integral_indices(&ramp_error_record(1e-4)).unwrap();
        assert!((idx.ise - 1.0 / 3.0).abs() < 1e-6);
        assert!((idx.iae - 0.5).abs() < 1e-6);
        assert!((idx.itse - 0.25).abs() < 1e-6);
        assert!((idx.itae - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn empty_record_is_an_error() {
        let record = record_from(vec![], vec![], 1e-4, 0.0);
        assert_eq!(integral_indices(&record), Err(MetricsError::EmptyRecord));
        assert!(step_metrics(&record, 1.0, 2.0).is_err());
        assert!(chattering_index(&record, 0.25).is_err());
    }

    #[test]
    fn first_order_response_metrics() {
        // ω(t) = 700·(1 − e^{−t/0.005}): rise = τ·ln9, settling = τ·ln50.
        let dt = 1e-4;
        let tau = 0.005;
        let n = 10_001;
        let omega: Vec<f64> = (0..n)
            .map(|k| 700.0 * (1.0 - (-(k as f64 * dt) / tau).exp()))
            .collect();
        let record = record_from(omega, vec![0.0; n], dt, 700.0);
        let m = step_metrics(&record, 700.0, 2.0).unwrap();
        assert!((m.rise_time.unwrap() - 0.010986).abs() <= dt);
        assert!((m.settling_time.unwrap() - 0.019560).abs() <= dt);
        assert_eq!(m.overshoot_pct, 0.0);
        assert!(m.steady_state_error.abs() < 1e-6);
    }

    #[test]
    fn ideal_step_settles_immediately() {
        let n = 100;
        let record = record_from(vec![700.0; n], vec![0.0; n], 1e-4, 700.0);
        let m = step_metrics(&record, 700.0, 2.0).unwrap();
        assert_eq!(m.rise_time, Some(0.0));
        assert_eq!(m.settling_time, Some(0.0));
        assert_eq!(m.overshoot_pct, 0.0);
    }

    #[test]
    fn overshoot_percentage() {
        let mut omega = vec![700.0; 200];
        omega[50] = 780.0;
        // Peak of 780 over a 700 reference: 11.43 %. The spike also breaks
        // settling until it has passed.
        let record = record_from(omega, vec![0.0; 200], 1e-4, 700.0);
        let m = step_metrics(&record, 700.0, 2.0).unwrap();
        assert!((m.overshoot_pct - 80.0 / 700.0 * 100.0).abs() < 1e-9);
        assert_eq!(m.settling_time, Some(51.0 * 1e-4));
    }

    #[test]
    fn never_settling_is_flagged() {
        // Oscillation that is still outside the band at the final sample.
        let omega: Vec<f64> = (0..101).map(|k| if k % 2 == 0 { 0.0 } else { 700.0 }).collect();
        let record = record_from(omega, vec![0.0; 101], 1e-4, 700.0);
        let m = step_metrics(&record, 700.0, 2.0).unwrap();
        assert_eq!(m.settling_time, None);
    }

    #[test]
    fn chattering_of_constant_command_is_zero() {
        let record = record_from(vec![0.0; 1000], vec![1.5; 1000], 1e-4, 0.0);
        assert_eq!(chattering_index(&record, 0.25).unwrap(), 0.0);
    }

    #[test]
    fn chattering_of_a_square_wave() {
        // ±0.1 A toggling every sample at 10 kHz: 0.2 A per step, 10⁴
        // steps per second → 2000 A/s.
        let n = 10_000;
        let iq: Vec<f64> = (0..n).map(|k| if k % 2 == 0 { 0.1 } else { -0.1 }).collect();
        let record = record_from(vec![0.0; n], iq, 1e-4, 0.0);
        let c = chattering_index(&record, 0.25).unwrap();
        assert!((c - 2000.0).abs() < 1e-6, "got {c}");
    }

    #[test]
    fn chattering_of_a_smooth_ramp_telescopes() {
        // 0→1 A across the window: total variation 1 over the window span.
        let n = 1000;
        let iq: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
        let record = record_from(vec![0.0; n], iq, 1e-3, 0.0);
        let window = 1.0;
        let c = chattering_index(&record, window).unwrap();
        let span = (n - 1) as f64 * 1e-3;
        assert!((c - 1.0 / span).abs() < 1e-9, "got {c}");
    }

    #[test]
    fn scaling_the_error_scales_the_indices() {
        let record = ramp_error_record(1e-3);
        let mut scaled = record.clone();
        for e in &mut scaled.error {
            *e *= 3.0;
        }
        let base = integral_indices(&record).unwrap();
        let big = integral_indices(&scaled).unwrap();
        assert!((big.ise - 9.0 * base.ise).abs() < 1e-12);
        assert!((big.iae - 3.0 * base.iae).abs() < 1e-12);
    }

    #[test]
    fn quadrature_error_shrinks_quadratically() {
        // e(t) = sin(t) on [0, 1]: halving the step shrinks the ISE error 4×.
        let make = |dt: f64| {
            let n = (1.0 / dt).round() as usize + 1;
            let omega: Vec<f64> = (0..n).map(|k| -((k as f64 * dt).sin())).collect();
            record_from(omega, vec![0.0; n], dt, 0.0)
        };
        let exact = 0.5 - 0.25 * (2.0f64).sin(); // ∫sin² over [0,1]
        let err = |dt: f64| (integral_indices(&make(dt)).unwrap().ise - exact).abs();
        let ratio = err(2e-3) / err(1e-3);
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn time_shift_leaves_settling_and_overshoot_offsets_consistent() {
        let dt = 1e-4;
        let n = 5000;
        let tau = 0.005;
        let omega: Vec<f64> = (0..n)
            .map(|k| 700.0 * (1.0 - (-(k as f64 * dt) / tau).exp()))
            .collect();
        let base = record_from(omega, vec![0.0; n], dt, 700.0);
        let mut shifted = base.clone();
        for t in &mut shifted.time {
            *t += 2.5;
        }
        let m0 = step_metrics(&base, 700.0, 2.0).unwrap();
        let m1 = step_metrics(&shifted, 700.0, 2.0).unwrap();
        let (r0, r1) = (m0.rise_time.unwrap(), m1.rise_time.unwrap());
        assert!((r0 - r1).abs() < 1e-12, "rise changed: {r0} vs {r1}");
        assert!((m1.settling_time.unwrap() - m0.settling_time.unwrap() - 2.5).abs() < 1e-9);
        assert_eq!(m0.overshoot_pct, m1.overshoot_pct);
    }
}
