//! Terminal sliding-mode speed controller.
//!
//! A fractional-exponent surface accelerates convergence near the origin,
//! with a boundary-layer saturation standing in for the sign of the error:
//!
//! ```text
//! s   = ė + c·|e|^α·sat(e, Δe)
//! iq* = (1/χ)·(c·|e|^α·sat(e, Δe) + k·∫sgn(s) dτ)
//! ```
//!
//! The law is implemented exactly as written; reference-derivative and
//! observer feedforward terms are available behind `compensated` but stay
//! off by default.

use super::csmc::{check_positive, check_unit_interval};
use super::{sat_boundary, sgn, CommonLoopState, ConfigError, EsoState};
use crate::plant::DerivedConstants;

#[derive(Debug, Clone, PartialEq)]
pub struct TsmcConfig {
    /// Surface gain c.
    pub c: f64,
    /// Terminal exponent α ∈ (0, 1).
    pub alpha: f64,
    /// Switching gain k.
    pub k: f64,
    /// Boundary-layer half-width Δe (rad/s).
    pub delta_e: f64,
    /// Add ω̇* and observer feedforward to the printed law.
    pub compensated: bool,
}

impl Default for TsmcConfig {
    fn default() -> Self {
        Self {
            c: 20.0,
            alpha: 0.7,
            k: 10.0,
            delta_e: 0.02,
            compensated: false,
        }
    }
}

impl TsmcConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let ctl = "tsmc";
        check_positive(ctl, "c", self.c)?;
        check_unit_interval(ctl, "alpha", self.alpha)?;
        check_positive(ctl, "k", self.k)?;
        check_positive(ctl, "delta_e", self.delta_e)?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Tsmc {
    cfg: TsmcConfig,
    chi: f64,
    ts: f64,
    /// Running integral of sgn(s) (seconds).
    sw_int: f64,
    s: f64,
}

impl Tsmc {
    pub fn new(cfg: TsmcConfig, consts: &DerivedConstants, ts: f64) -> Self {
        Self {
            cfg,
            chi: consts.chi,
            ts,
            sw_int: 0.0,
            s: 0.0,
        }
    }

    pub fn update(&mut self, lp: &CommonLoopState, eso: Option<&EsoState>) -> f64 {
        let surface_term = self.cfg.c * lp.e.abs().powf(self.cfg.alpha)
            * sat_boundary(lp.e, self.cfg.delta_e);
        let s = lp.e_dot + surface_term;
        self.s = s;

        let compensation = if self.cfg.compensated {
            lp.omega_ref_dot + eso.map_or(0.0, |o| -o.z2())
        } else {
            0.0
        };
        let iq = (compensation + surface_term + self.cfg.k * self.sw_int) / self.chi;
        // Integral accumulates after the output: ∫ over [0, t).
        self.sw_int += sgn(s) * self.ts;
        iq
    }

    pub fn sliding(&self) -> f64 {
        self.s
    }

    pub fn switching_integral(&self) -> f64 {
        self.sw_int
    }
}
