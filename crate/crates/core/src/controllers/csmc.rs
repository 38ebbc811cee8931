//! Conventional sliding-mode speed controller.
//!
//! Uses the plain error surface `s = e` with the power-rate reaching law
//!
//! ```text
//! ṡ = −ε·|e|^a·sgn(s) − k·|s|^(b·sgn(|s|−1))·s
//! ```
//!
//! which the speed dynamics invert to the current command
//!
//! ```text
//! iq* = (1/χ)·[ω̇* − ẑ + ε·|e|^a·sgn(s) + k·|s|^(b·sgn(|s|−1))·s]
//! ```
//!
//! where `ẑ` is the observer's lumped-disturbance estimate (zero with the
//! observer disabled). There is no integral action: a constant load leaves a
//! persistent error at whatever magnitude makes the reaching terms supply
//! the holding current.

use super::{power_rate_reaching, CommonLoopState, ConfigError, EsoState};
use crate::plant::DerivedConstants;

/// Reaching-law gains. Both exponents live strictly inside (0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct CsmcConfig {
    /// Reaching gain ε.
    pub eps: f64,
    /// Proportional reaching gain k.
    pub k: f64,
    /// Error exponent a.
    pub a: f64,
    /// Sliding exponent b.
    pub b: f64,
}

impl Default for CsmcConfig {
    fn default() -> Self {
        Self {
            eps: 15.0,
            k: 5.0,
            a: 0.6,
            b: 0.8,
        }
    }
}

impl CsmcConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let c = "csmc";
        check_positive(c, "eps", self.eps)?;
        check_positive(c, "k", self.k)?;
        check_unit_interval(c, "a", self.a)?;
        check_unit_interval(c, "b", self.b)?;
        Ok(())
    }
}

pub(super) fn check_positive(
    controller: &'static str,
    field: &'static str,
    v: f64,
) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::InvalidGain {
            controller,
            field,
            reason: "must be strictly positive",
        })
    }
}

pub(super) fn check_unit_interval(
    controller: &'static str,
    field: &'static str,
    v: f64,
) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(ConfigError::InvalidGain {
            controller,
            field,
            reason: "must lie strictly inside (0, 1)",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Csmc {
    cfg: CsmcConfig,
    chi: f64,
    s: f64,
}

impl Csmc {
    pub fn new(cfg: CsmcConfig, consts: &DerivedConstants) -> Self {
        Self {
            cfg,
            chi: consts.chi,
            s: 0.0,
        }
    }

    pub fn update(&mut self, lp: &CommonLoopState, eso: Option<&EsoState>) -> f64 {
        let s = lp.e;
        self.s = s;
        let feedforward = eso.map_or(0.0, |o| -o.z2());
        let reach = power_rate_reaching(lp.e, s, self.cfg.eps, self.cfg.k, self.cfg.a, self.cfg.b);
        (lp.omega_ref_dot + feedforward + reach) / self.chi
    }

    pub fn sliding(&self) -> f64 {
        self.s
    }
}
