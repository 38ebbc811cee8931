//! Linear extended state observer for the reduced speed loop.
//!
//! The observer treats everything the model does not command as one lumped
//! acceleration term and estimates it alongside the speed:
//!
//! ```text
//! ż1 = χ·iq + z2 + 2ωo·(ω − z1)
//! ż2 =              ωo²·(ω − z1)
//! ```
//!
//! Both observer poles sit at −ωo (bandwidth parameterization). `z2`
//! converges to the lumped term −(B/J)·ω − TL/J for constant disturbances,
//! so `−z2` is the feedforward that cancels it.

use crate::plant::DerivedConstants;

/// Observer state, advanced by forward-Euler at the controller rate.
#[derive(Debug, Clone, Copy)]
pub struct EsoState {
    z1: f64,
    z2: f64,
    bandwidth: f64,
}

impl EsoState {
    /// Default observer pole location (rad/s).
    pub const DEFAULT_BANDWIDTH: f64 = 2000.0;

    pub fn new(bandwidth: f64) -> Self {
        assert!(bandwidth > 0.0, "observer bandwidth must be positive");
        Self {
            z1: 0.0,
            z2: 0.0,
            bandwidth,
        }
    }

    /// Speed estimate (rad/s).
    pub fn z1(&self) -> f64 {
        self.z1
    }

    /// Lumped-disturbance estimate (rad/s²).
    pub fn z2(&self) -> f64 {
        self.z2
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// One Euler step driven by the measured speed and the current actually
    /// applied over the elapsed period.
    pub fn update(&mut self, consts: &DerivedConstants, omega_meas: f64, iq_applied: f64, ts: f64) {
        let err = omega_meas - self.z1;
        let wo = self.bandwidth;
        self.z1 += ts * (consts.chi * iq_applied + self.z2 + 2.0 * wo * err);
        self.z2 += ts * (wo * wo * err);
    }

    /// Load torque consistent with the current estimate:
    /// z2 = −(B/J)·ω − TL/J  ⇒  TL = −(J·z2 + B·ω).
    pub fn load_torque_estimate(&self, consts: &DerivedConstants, omega_meas: f64) -> f64 {
        -(consts.inertia() * self.z2 + consts.friction() * omega_meas)
    }
}
