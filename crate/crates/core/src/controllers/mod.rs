//! Discrete-time sliding-mode speed controllers.
//!
//! All six variants consume the same per-sample loop signals and produce the
//! q-axis current command `iq*` for the reduced speed loop. Saturation is
//! not applied here; the plant boundary owns it, so the commanded and the
//! applied current can be recorded separately.
//!
//! Shared conventions:
//!
//! * `sgn(0) = 0` everywhere, which also makes the power-rate exponent
//!   `|s|^(b·sgn(|s|−1))` evaluate to 1 at `|s| = 1`.
//! * Error and sliding-variable derivatives are backward differences passed
//!   through a first-order low-pass (time constant `tau_samples`·Ts, default
//!   10·Ts); raw differences of switched signals are unusable.
//! * Switching-function integrals accumulate rectangularly (`sgn`·Ts per
//!   sample); error integrals accumulate trapezoidally.

mod asmc;
mod csmc;
mod eso;
mod fosmc;
mod ismc;
mod stsmc;
mod tsmc;

pub use asmc::{Asmc, AsmcConfig};
pub use csmc::{Csmc, CsmcConfig};
pub use eso::EsoState;
pub use fosmc::{Fosmc, FosmcConfig};
pub use ismc::{Ismc, IsmcConfig};
pub use stsmc::{Stsmc, StsmcConfig};
pub use tsmc::{Tsmc, TsmcConfig};

use crate::plant::DerivedConstants;
use thiserror::Error;

/// Default derivative-filter time constant in units of the sampling period.
pub const DERIV_FILTER_TAU_SAMPLES: f64 = 10.0;

/// Gain or parameter outside its admissible range.
#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{controller}: `{field}` {reason}")]
    InvalidGain {
        controller: &'static str,
        field: &'static str,
        reason: &'static str,
    },
}

/// Sign function with `sgn(0) = 0`.
pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Power-rate reaching law shared by the conventional and integral variants:
/// `ε·|e|^a·sgn(s) + k·|s|^(b·sgn(|s|−1))·s`.
///
/// The exponent term degenerates gracefully: at `|s| = 1` the exponent is
/// zero and the factor is exactly 1; at `s = 0` the whole term vanishes.
pub fn power_rate_reaching(e: f64, s: f64, eps: f64, k: f64, a: f64, b: f64) -> f64 {
    let switching = eps * e.abs().powf(a) * sgn(s);
    let exponent = b * sgn(s.abs() - 1.0);
    let rate = if s == 0.0 || exponent == 0.0 {
        // |s|^(−b)·s would be 0^(−b)·0 at the origin; the term is zero there.
        s
    } else {
        s.abs().powf(exponent) * s
    };
    switching + k * rate
}

/// Boundary-layer saturation: 1 above `delta`, −1 below `−delta`, and the
/// raw argument (not normalized) inside the layer.
pub fn sat_boundary(e: f64, delta: f64) -> f64 {
    debug_assert!(delta > 0.0);
    if e > delta {
        1.0
    } else if e < -delta {
        -1.0
    } else {
        e
    }
}

/// Backward-difference differentiator followed by a first-order low-pass.
///
/// The previous input starts at zero, so a signal that is already nonzero at
/// the first sample is seen as a step from rest.
#[derive(Debug, Clone)]
pub struct DerivFilter {
    ts: f64,
    alpha: f64,
    prev: f64,
    value: f64,
}

impl DerivFilter {
    /// `tau_samples` is the filter time constant in sampling periods.
    pub fn new(ts: f64, tau_samples: f64) -> Self {
        let tau = tau_samples * ts;
        Self {
            ts,
            alpha: ts / (tau + ts),
            prev: 0.0,
            value: 0.0,
        }
    }

    /// Pushes a sample, returns the filtered derivative.
    pub fn update(&mut self, x: f64) -> f64 {
        let raw = (x - self.prev) / self.ts;
        self.prev = x;
        self.value += self.alpha * (raw - self.value);
        self.value
    }

    /// Current filtered derivative without pushing a new sample.
    pub fn value(&self) -> f64 {
        self.value
    }
}

/// Loop signals shared by every controller at one sampling instant.
#[derive(Debug, Clone, Copy, Default)]
pub struct CommonLoopState {
    /// Speed error ω* − ω (rad/s).
    pub e: f64,
    /// Filtered error derivative (rad/s²).
    pub e_dot: f64,
    /// Reference-speed derivative (rad/s²).
    pub omega_ref_dot: f64,
    /// Reference-speed second derivative (rad/s³).
    pub omega_ref_ddot: f64,
}

/// Plant-side measurements needed by controllers with equivalent-control
/// terms: the current actually flowing, the measured speed, and a load
/// torque estimate (observer-mapped, oracle, or zero).
#[derive(Debug, Clone, Copy, Default)]
pub struct PlantView {
    /// q-axis current held by the drive over the last period (A).
    pub iq: f64,
    /// Measured rotor speed (rad/s).
    pub omega_m: f64,
    /// Load torque estimate (N·m).
    pub t_load_est: f64,
}

/// The six controller variants under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ControllerKind {
    Csmc,
    Ismc,
    Tsmc,
    Fosmc,
    Asmc,
    Stsmc,
}

impl ControllerKind {
    /// All variants in presentation order.
    pub const ALL: [ControllerKind; 6] = [
        ControllerKind::Csmc,
        ControllerKind::Ismc,
        ControllerKind::Tsmc,
        ControllerKind::Fosmc,
        ControllerKind::Asmc,
        ControllerKind::Stsmc,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ControllerKind::Csmc => "csmc",
            ControllerKind::Ismc => "ismc",
            ControllerKind::Tsmc => "tsmc",
            ControllerKind::Fosmc => "fosmc",
            ControllerKind::Asmc => "asmc",
            ControllerKind::Stsmc => "stsmc",
        }
    }
}

impl std::str::FromStr for ControllerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csmc" => Ok(ControllerKind::Csmc),
            "ismc" => Ok(ControllerKind::Ismc),
            "tsmc" => Ok(ControllerKind::Tsmc),
            "fosmc" => Ok(ControllerKind::Fosmc),
            "asmc" => Ok(ControllerKind::Asmc),
            "stsmc" => Ok(ControllerKind::Stsmc),
            other => Err(format!("unknown controller kind `{other}`")),
        }
    }
}

impl std::fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-variant gain set.
#[derive(Debug, Clone, PartialEq)]
pub enum ControllerConfig {
    Csmc(CsmcConfig),
    Ismc(IsmcConfig),
    Tsmc(TsmcConfig),
    Fosmc(FosmcConfig),
    Asmc(AsmcConfig),
    Stsmc(StsmcConfig),
}

impl ControllerConfig {
    /// Nominal benchmark gains for the given variant.
    pub fn default_for(kind: ControllerKind) -> Self {
        match kind {
            ControllerKind::Csmc => ControllerConfig::Csmc(CsmcConfig::default()),
            ControllerKind::Ismc => ControllerConfig::Ismc(IsmcConfig::default()),
            ControllerKind::Tsmc => ControllerConfig::Tsmc(TsmcConfig::default()),
            ControllerKind::Fosmc => ControllerConfig::Fosmc(FosmcConfig::default()),
            ControllerKind::Asmc => ControllerConfig::Asmc(AsmcConfig::default()),
            ControllerKind::Stsmc => ControllerConfig::Stsmc(StsmcConfig::default()),
        }
    }

    pub fn kind(&self) -> ControllerKind {
        match self {
            ControllerConfig::Csmc(_) => ControllerKind::Csmc,
            ControllerConfig::Ismc(_) => ControllerKind::Ismc,
            ControllerConfig::Tsmc(_) => ControllerKind::Tsmc,
            ControllerConfig::Fosmc(_) => ControllerKind::Fosmc,
            ControllerConfig::Asmc(_) => ControllerKind::Asmc,
            ControllerConfig::Stsmc(_) => ControllerKind::Stsmc,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match self {
            ControllerConfig::Csmc(c) => c.validate(),
            ControllerConfig::Ismc(c) => c.validate(),
            ControllerConfig::Tsmc(c) => c.validate(),
            ControllerConfig::Fosmc(c) => c.validate(),
            ControllerConfig::Asmc(c) => c.validate(),
            ControllerConfig::Stsmc(c) => c.validate(),
        }
    }
}

/// A ready-to-run controller instance for one simulation.
#[derive(Debug, Clone)]
pub enum Controller {
    Csmc(Csmc),
    Ismc(Ismc),
    Tsmc(Tsmc),
    Fosmc(Fosmc),
    Asmc(Asmc),
    Stsmc(Stsmc),
}

impl Controller {
    /// Builds a controller from validated gains.
    ///
    /// `ts` is the sampling period and `tau_samples` the derivative-filter
    /// time constant in sampling periods.
    pub fn new(
        cfg: &ControllerConfig,
        consts: &DerivedConstants,
        ts: f64,
        tau_samples: f64,
    ) -> Result<Self, ConfigError> {
        cfg.validate()?;
        Ok(match cfg {
            ControllerConfig::Csmc(c) => Controller::Csmc(Csmc::new(c.clone(), consts)),
            ControllerConfig::Ismc(c) => Controller::Ismc(Ismc::new(c.clone(), consts, ts)),
            ControllerConfig::Tsmc(c) => Controller::Tsmc(Tsmc::new(c.clone(), consts, ts)),
            ControllerConfig::Fosmc(c) => Controller::Fosmc(Fosmc::new(c.clone(), consts, ts)),
            ControllerConfig::Asmc(c) => {
                Controller::Asmc(Asmc::new(c.clone(), consts, ts, tau_samples))
            }
            ControllerConfig::Stsmc(c) => Controller::Stsmc(Stsmc::new(c.clone(), consts, ts)),
        })
    }

    pub fn kind(&self) -> ControllerKind {
        match self {
            Controller::Csmc(_) => ControllerKind::Csmc,
            Controller::Ismc(_) => ControllerKind::Ismc,
            Controller::Tsmc(_) => ControllerKind::Tsmc,
            Controller::Fosmc(_) => ControllerKind::Fosmc,
            Controller::Asmc(_) => ControllerKind::Asmc,
            Controller::Stsmc(_) => ControllerKind::Stsmc,
        }
    }

    /// One controller update; returns the unsaturated current command (A).
    pub fn update(
        &mut self,
        lp: &CommonLoopState,
        eso: Option<&EsoState>,
        view: &PlantView,
    ) -> f64 {
        match self {
            Controller::Csmc(c) => c.update(lp, eso),
            Controller::Ismc(c) => c.update(lp, eso),
            Controller::Tsmc(c) => c.update(lp, eso),
            Controller::Fosmc(c) => c.update(lp),
            Controller::Asmc(c) => c.update(lp),
            Controller::Stsmc(c) => c.update(lp, view),
        }
    }

    /// Sliding variable after the most recent update.
    pub fn sliding(&self) -> f64 {
        match self {
            Controller::Csmc(c) => c.sliding(),
            Controller::Ismc(c) => c.sliding(),
            Controller::Tsmc(c) => c.sliding(),
            Controller::Fosmc(c) => c.sliding(),
            Controller::Asmc(c) => c.sliding(),
            Controller::Stsmc(c) => c.sliding(),
        }
    }

    /// Auxiliary dynamic states beyond the shared loop signals.
    pub fn extra_states(&self) -> usize {
        match self {
            Controller::Csmc(_) => 0,
            Controller::Ismc(_) => 1,
            Controller::Tsmc(_) => 0,
            Controller::Fosmc(_) => 2,
            Controller::Asmc(_) => 1,
            Controller::Stsmc(_) => 1,
        }
    }

    /// Total state footprint in bytes, including heap buffers.
    pub fn state_bytes(&self) -> usize {
        match self {
            Controller::Csmc(c) => std::mem::size_of_val(c),
            Controller::Ismc(c) => std::mem::size_of_val(c),
            Controller::Tsmc(c) => std::mem::size_of_val(c),
            Controller::Fosmc(c) => std::mem::size_of_val(c) + c.buffer_bytes(),
            Controller::Asmc(c) => std::mem::size_of_val(c),
            Controller::Stsmc(c) => std::mem::size_of_val(c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sgn_is_exact_at_zero_and_tiny_values() {
        assert_eq!(sgn(-3.2), -1.0);
        assert_eq!(sgn(0.0), 0.0);
        assert_eq!(sgn(1e-300), 1.0);
    }

    #[test]
    fn boundary_layer_branches() {
        assert_eq!(sat_boundary(0.05, 0.02), 1.0);
        assert_eq!(sat_boundary(0.0, 0.02), 0.0);
        assert_eq!(sat_boundary(-0.01, 0.02), -0.01);
        assert_eq!(sat_boundary(-0.05, 0.02), -1.0);
    }

    #[test]
    fn deriv_filter_tracks_slow_ramps() {
        // On a ramp the filtered derivative converges to the slope.
        let ts = 1e-3;
        let mut f = DerivFilter::new(ts, 10.0);
        let slope = 4.0;
        let mut out = 0.0;
        for k in 0..500 {
            out = f.update(slope * ts * k as f64);
        }
        assert!((out - slope).abs() < 1e-6, "got {out}");
    }

    #[test]
    fn deriv_filter_smooths_steps() {
        let ts = 1e-4;
        let mut f = DerivFilter::new(ts, 10.0);
        let first = f.update(1.0);
        // One eleventh of the raw backward difference on the first sample.
        assert!((first - (1.0 / ts) / 11.0).abs() < 1e-9);
        let second = f.update(1.0);
        assert!(second < first);
    }

    #[test]
    fn kind_round_trips_through_strings() {
        for kind in ControllerKind::ALL {
            let parsed: ControllerKind = kind.as_str().parse().unwrap();
            assert_eq!(parsed, kind);
        }
        assert!("pid".parse::<ControllerKind>().is_err());
    }

    #[test]
    fn default_configs_validate() {
        for kind in ControllerKind::ALL {
            assert!(ControllerConfig::default_for(kind).validate().is_ok());
        }
    }
}
