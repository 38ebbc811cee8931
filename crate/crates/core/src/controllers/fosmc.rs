//! Fractional-order sliding-mode speed controller.
//!
//! The surface blends the error with its fractional integral and derivative,
//!
//! ```text
//! s = kp·e + ki·D^{−α} e + kd·D^{β} e,        0 < α, β < 1
//! ```
//!
//! and the reaching law `ṡ = −w·s − ks·sgn(s)` inverts through the speed
//! dynamics to
//!
//! ```text
//! iq* = (1/χ)·[ω̇* + w·ki·D^{−α}e + w·kd·D^{β}e + ks·∫sgn(s) dτ
//!              + (w + B/J)·kp·e + ki·D^{1−α}e + kd·D^{β+1}e]
//! ```
//!
//! Four streaming Grünwald–Letnikov operators (orders −α, β, 1−α, β+1) feed
//! on the error each sample. The order-(β+1) term is evaluated as a single
//! operator rather than a chained first difference, so there is one
//! truncation error source instead of two. All four buffers start zeroed;
//! the first `memory_len` samples carry the truncation transient.

use super::csmc::{check_positive, check_unit_interval};
use super::{sgn, CommonLoopState, ConfigError};
use crate::frac::GlOperator;
use crate::plant::DerivedConstants;

#[derive(Debug, Clone, PartialEq)]
pub struct FosmcConfig {
    /// Proportional surface gain.
    pub kp: f64,
    /// Fractional-integral surface gain.
    pub ki: f64,
    /// Fractional-derivative surface gain.
    pub kd: f64,
    /// Integral order α ∈ (0, 1).
    pub alpha: f64,
    /// Derivative order β ∈ (0, 1).
    pub beta: f64,
    /// Linear reaching gain w.
    pub w: f64,
    /// Switching reaching gain ks.
    pub ks: f64,
    /// History truncation length for the fractional operators (samples).
    pub memory_len: usize,
}

impl Default for FosmcConfig {
    fn default() -> Self {
        Self {
            kp: 1.0,
            ki: 30.0,
            kd: 0.002,
            alpha: 0.8,
            beta: 0.7,
            w: 40.0,
            ks: 8.0,
            memory_len: 2000,
        }
    }
}

impl FosmcConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let ctl = "fosmc";
        check_positive(ctl, "kp", self.kp)?;
        check_positive(ctl, "ki", self.ki)?;
        check_positive(ctl, "kd", self.kd)?;
        check_unit_interval(ctl, "alpha", self.alpha)?;
        check_unit_interval(ctl, "beta", self.beta)?;
        check_positive(ctl, "w", self.w)?;
        check_positive(ctl, "ks", self.ks)?;
        if self.memory_len == 0 {
            return Err(ConfigError::InvalidGain {
                controller: ctl,
                field: "memory_len",
                reason: "must be at least 1",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Fosmc {
    cfg: FosmcConfig,
    inv_chi: f64,
    ts: f64,
    /// Reaching-law products w·ki, w·kd and (w + B/J)·kp, fixed per run.
    w_ki: f64,
    w_kd: f64,
    wa_kp: f64,
    /// D^{−α} e — fractional integral in the surface.
    gl_int: GlOperator,
    /// D^{β} e — fractional derivative in the surface.
    gl_der: GlOperator,
    /// D^{1−α} e — complement integral appearing in the law.
    gl_comp: GlOperator,
    /// D^{β+1} e — surface-derivative term in the law.
    gl_der_plus: GlOperator,
    sw_int: f64,
    s: f64,
}

impl Fosmc {
    pub fn new(cfg: FosmcConfig, consts: &DerivedConstants, ts: f64) -> Self {
        let m = cfg.memory_len;
        Self {
            gl_int: GlOperator::new(-cfg.alpha, ts, m),
            gl_der: GlOperator::new(cfg.beta, ts, m),
            gl_comp: GlOperator::new(1.0 - cfg.alpha, ts, m),
            gl_der_plus: GlOperator::new(cfg.beta + 1.0, ts, m),
            inv_chi: 1.0 / consts.chi,
            ts,
            w_ki: cfg.w * cfg.ki,
            w_kd: cfg.w * cfg.kd,
            wa_kp: (cfg.w + consts.a_fric) * cfg.kp,
            cfg,
            sw_int: 0.0,
            s: 0.0,
        }
    }

    pub fn update(&mut self, lp: &CommonLoopState) -> f64 {
        let e = lp.e;
        let d_int = self.gl_int.apply(e);
        let d_der = self.gl_der.apply(e);
        let d_comp = self.gl_comp.apply(e);
        let d_der_plus = self.gl_der_plus.apply(e);

        let s = self.cfg.kp * e + self.cfg.ki * d_int + self.cfg.kd * d_der;
        self.s = s;

        let iq = (lp.omega_ref_dot
            + self.w_ki * d_int
            + self.w_kd * d_der
            + self.cfg.ks * self.sw_int
            + self.wa_kp * e
            + self.cfg.ki * d_comp
            + self.cfg.kd * d_der_plus)
            * self.inv_chi;
        self.sw_int += sgn(s) * self.ts;
        iq
    }

    pub fn sliding(&self) -> f64 {
        self.s
    }

    /// Heap bytes held by the four fractional operators.
    pub fn buffer_bytes(&self) -> usize {
        self.gl_int.buffer_bytes()
            + self.gl_der.buffer_bytes()
            + self.gl_comp.buffer_bytes()
            + self.gl_der_plus.buffer_bytes()
    }
}
