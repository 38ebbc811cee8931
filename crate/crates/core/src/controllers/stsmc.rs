//! Super-twisting sliding-mode speed controller.
//!
//! A second-order algorithm acting on the current *rate*: the control output
//! is `u = d(iq)/dt`, which the controller integrates into the command, so
//! `iq*` is continuous by construction. On the surface `s = ė + c·e`:
//!
//! ```text
//! u  = u_eq + L·|s|^½·sgn(s) + u1
//! u̇1 = W·sgn(s)
//! ```
//!
//! with the super-twisting signs already resolved for this machine, whose
//! control-channel gain g = −kt/J is negative. The equivalent part keeps
//! ṡ = 0 on the manifold:
//!
//! ```text
//! u_eq = (J/kt)·(ω̈* + c·ω̇*) + (B/J − c)·iq + (B/kt)·(c − B/J)·ω
//!        + (1/kt)·(c − B/J)·T̂L
//! ```
//!
//! The load-torque rate is not estimated and enters as zero. Finite-time
//! convergence requires L² > 4·W, enforced at construction.

use super::csmc::check_positive;
use super::{sgn, CommonLoopState, ConfigError, PlantView};
use crate::plant::DerivedConstants;

#[derive(Debug, Clone, PartialEq)]
pub struct StsmcConfig {
    /// Surface gain c.
    pub c: f64,
    /// Proportional super-twisting gain L (also written k1).
    pub l_gain: f64,
    /// Integral super-twisting gain W (also written k2).
    pub w_gain: f64,
}

impl Default for StsmcConfig {
    fn default() -> Self {
        Self {
            c: 15.0,
            l_gain: 8.0,
            w_gain: 3.0,
        }
    }
}

impl StsmcConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let ctl = "stsmc";
        check_positive(ctl, "c", self.c)?;
        check_positive(ctl, "l_gain", self.l_gain)?;
        check_positive(ctl, "w_gain", self.w_gain)?;
        if self.l_gain * self.l_gain <= 4.0 * self.w_gain {
            return Err(ConfigError::InvalidGain {
                controller: ctl,
                field: "l_gain",
                reason: "finite-time condition k1² > 4·k2 violated",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Stsmc {
    cfg: StsmcConfig,
    ts: f64,
    /// Reference-shaping gain J/kt = 1/χ.
    inv_chi: f64,
    /// Equivalent-control coefficient on the measured current, B/J − c.
    k_iq: f64,
    /// Equivalent-control coefficient on the measured speed, (B/kt)(c − B/J).
    k_omega: f64,
    /// Equivalent-control coefficient on the load estimate, (1/kt)(c − B/J).
    k_load: f64,
    /// Twisting direction −sgn(g); +1 for this machine.
    twist_dir: f64,
    w_ts: f64,
    /// Auxiliary integral state of the twisting term (A/s).
    u1: f64,
    /// Integrated current command (A).
    iq_star: f64,
    s: f64,
}

impl Stsmc {
    pub fn new(cfg: StsmcConfig, consts: &DerivedConstants, ts: f64) -> Self {
        let c = cfg.c;
        Self {
            ts,
            inv_chi: 1.0 / consts.chi,
            k_iq: consts.a_fric - c,
            k_omega: (consts.a_fric / consts.chi) * (c - consts.a_fric),
            k_load: (c - consts.a_fric) / consts.kt,
            twist_dir: -consts.g_sign,
            w_ts: cfg.w_gain * ts,
            cfg,
            u1: 0.0,
            iq_star: 0.0,
            s: 0.0,
        }
    }

    pub fn update(&mut self, lp: &CommonLoopState, view: &PlantView) -> f64 {
        let c = self.cfg.c;
        let s = lp.e_dot + c * lp.e;
        self.s = s;

        let u_eq = (lp.omega_ref_ddot + c * lp.omega_ref_dot) * self.inv_chi
            + self.k_iq * view.iq
            + self.k_omega * view.omega_m
            + self.k_load * view.t_load_est;

        let u = u_eq + self.twist_dir * self.cfg.l_gain * s.abs().sqrt() * sgn(s) + self.u1;
        self.u1 += self.twist_dir * self.w_ts * sgn(s);

        self.iq_star += u * self.ts;
        self.iq_star
    }

    pub fn sliding(&self) -> f64 {
        self.s
    }

    /// Auxiliary integral state after the most recent update.
    pub fn aux_state(&self) -> f64 {
        self.u1
    }
}
