//! PMSM models in the rotor-aligned dq frame.
//!
//! Two views of the same machine are provided. The full electrical model
//! integrates both current axes together with the mechanical equation:
//!
//! ```text
//! d(id)/dt = (ud − Rs·id + ωe·Lq·iq) / Ld
//! d(iq)/dt = (uq − Rs·iq − ωe·(Ld·id + ψf)) / Lq
//! J·dω/dt  = Te − B·ω − TL,      Te = 1.5·pn·(ψf·iq + (Ld−Lq)·id·iq)
//! ωe = pn·ω
//! ```
//!
//! The reduced speed-loop model assumes an ideal current loop (iq tracks its
//! command instantly) and lumps everything but the commanded current:
//!
//! ```text
//! dω/dt = χ·iq* − (B/J)·ω − TL/J,      χ = 3·pn·ψf / (2·J)
//! ```
//!
//! The reduced model is what the speed controllers are derived against; the
//! full model is retained for cross-checking the two agree when id ≡ 0.
//! Actuator saturation on the current command is a plant-boundary concern
//! and lives here as well.

use std::f64::consts::TAU;

use thiserror::Error;

/// Numeric-domain violation in a plant computation.
#[derive(Debug, Error, PartialEq)]
pub enum PlantError {
    /// A state or input field held a NaN or infinity.
    #[error("non-finite value in `{field}`: {value}")]
    NonFinite { field: &'static str, value: f64 },
    /// A machine parameter violated its physical constraint.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam {
        field: &'static str,
        reason: &'static str,
    },
}

/// Nameplate constants of the machine and drive.
#[derive(Debug, Clone, PartialEq)]
pub struct PmsmParams {
    /// Stator phase resistance (ohm).
    pub rs: f64,
    /// d-axis inductance (henry).
    pub ld: f64,
    /// q-axis inductance (henry).
    pub lq: f64,
    /// Rotor flux linkage (weber).
    pub psi_f: f64,
    /// Pole-pair count.
    pub pn: u32,
    /// Rotor moment of inertia (kg·m²).
    pub j: f64,
    /// Viscous friction coefficient (N·m·s/rad).
    pub b: f64,
    /// DC-link voltage (volt).
    pub vdc: f64,
    /// Current saturation bound (ampere), applied symmetrically.
    pub iq_limit: f64,
    /// Controller sampling frequency (hertz).
    pub fs: f64,
}

impl Default for PmsmParams {
    /// Nominal surface-mount machine used throughout the benchmark.
    fn default() -> Self {
        Self {
            rs: 0.9,
            ld: 8.5e-3,
            lq: 8.5e-3,
            psi_f: 0.175,
            pn: 4,
            j: 2.8e-4,
            b: 1.5e-4,
            vdc: 300.0,
            iq_limit: 10.0,
            fs: 10_000.0,
        }
    }
}

impl PmsmParams {
    /// Checks physical positivity and the surface-mount assumption Ld == Lq.
    pub fn validate(&self) -> Result<(), PlantError> {
        let positive: [(&'static str, f64); 8] = [
            ("rs", self.rs),
            ("ld", self.ld),
            ("lq", self.lq),
            ("psi_f", self.psi_f),
            ("j", self.j),
            ("b", self.b),
            ("vdc", self.vdc),
            ("iq_limit", self.iq_limit),
        ];
        for (field, value) in positive {
            if !value.is_finite() {
                return Err(PlantError::NonFinite { field, value });
            }
            if value <= 0.0 {
                return Err(PlantError::InvalidParam {
                    field,
                    reason: "must be strictly positive",
                });
            }
        }
        if !self.fs.is_finite() || self.fs <= 0.0 {
            return Err(PlantError::InvalidParam {
                field: "fs",
                reason: "must be strictly positive",
            });
        }
        if self.pn < 1 {
            return Err(PlantError::InvalidParam {
                field: "pn",
                reason: "pole-pair count must be at least 1",
            });
        }
        if self.ld != self.lq {
            return Err(PlantError::InvalidParam {
                field: "ld",
                reason: "surface-mount benchmark requires ld == lq",
            });
        }
        Ok(())
    }

    /// Derived coupling constants used by the controllers and the observer.
    pub fn derived(&self) -> DerivedConstants {
        let kt = 1.5 * self.pn as f64 * self.psi_f;
        DerivedConstants {
            chi: kt / self.j,
            kt,
            a_fric: self.b / self.j,
            g_sign: -1.0,
        }
    }
}

/// Constants derived from [`PmsmParams`] for the reduced speed loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    /// Speed-loop input gain χ = 3·pn·ψf/(2·J) = kt/J (rad/s² per ampere).
    pub chi: f64,
    /// Torque constant kt = 3·pn·ψf/2 (N·m/A).
    pub kt: f64,
    /// Friction ratio B/J (1/s).
    pub a_fric: f64,
    /// Sign of the control-channel gain in the current-rate formulation;
    /// g = −kt/J is negative for every valid machine, so this is −1.
    pub g_sign: f64,
}

impl DerivedConstants {
    /// Rotor inertia recovered from kt/χ (kg·m²).
    pub fn inertia(&self) -> f64 {
        self.kt / self.chi
    }

    /// Viscous friction coefficient recovered as (B/J)·J (N·m·s/rad).
    pub fn friction(&self) -> f64 {
        self.a_fric * self.inertia()
    }
}

/// Instantaneous plant state of the full dq model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotorState {
    /// d-axis current (ampere).
    pub id: f64,
    /// q-axis current (ampere).
    pub iq: f64,
    /// Mechanical rotor speed (rad/s).
    pub omega_r: f64,
    /// Electrical angle, wrapped to [0, 2π).
    pub theta_e: f64,
}

impl MotorState {
    /// State with every quantity at zero (machine at rest).
    pub fn at_rest() -> Self {
        Self {
            id: 0.0,
            iq: 0.0,
            omega_r: 0.0,
            theta_e: 0.0,
        }
    }

    /// Electrical angular speed ωe = pn·ω (derived, never stored).
    pub fn omega_e(&self, params: &PmsmParams) -> f64 {
        params.pn as f64 * self.omega_r
    }

    /// Wraps the electrical angle into [0, 2π).
    pub fn wrap_angle(&mut self) {
        self.theta_e = self.theta_e.rem_euclid(TAU);
    }
}

/// Voltage-level input to the full dq model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DqInput {
    /// d-axis voltage (volt).
    pub ud: f64,
    /// q-axis voltage (volt).
    pub uq: f64,
    /// Load torque (N·m).
    pub t_load: f64,
}

/// Time derivative of [`MotorState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DqDerivatives {
    pub d_id: f64,
    pub d_iq: f64,
    pub d_omega_r: f64,
    pub d_theta_e: f64,
}

/// Electromagnetic torque Te = 1.5·pn·(ψf·iq + (Ld−Lq)·id·iq).
///
/// Reduces to kt·iq for the surface-mount case Ld == Lq.
pub fn electromagnetic_torque(params: &PmsmParams, state: &MotorState) -> f64 {
    1.5 * params.pn as f64 * (params.psi_f * state.iq + (params.ld - params.lq) * state.id * state.iq)
}

/// Full dq-frame state derivative.
///
/// Rejects non-finite state or input values rather than propagating NaN.
pub fn dq_derivatives(
    params: &PmsmParams,
    state: &MotorState,
    input: &DqInput,
) -> Result<DqDerivatives, PlantError> {
    let checked: [(&'static str, f64); 7] = [
        ("id", state.id),
        ("iq", state.iq),
        ("omega_r", state.omega_r),
        ("theta_e", state.theta_e),
        ("ud", input.ud),
        ("uq", input.uq),
        ("t_load", input.t_load),
    ];
    for (field, value) in checked {
        if !value.is_finite() {
            return Err(PlantError::NonFinite { field, value });
        }
    }

    let omega_e = state.omega_e(params);
    let te = electromagnetic_torque(params, state);
    Ok(DqDerivatives {
        d_id: (input.ud - params.rs * state.id + omega_e * params.lq * state.iq) / params.ld,
        d_iq: (input.uq - params.rs * state.iq - omega_e * (params.ld * state.id + params.psi_f))
            / params.lq,
        d_omega_r: (te - params.b * state.omega_r - input.t_load) / params.j,
        d_theta_e: omega_e,
    })
}

/// Speed derivative of the reduced model: χ·iq* − (B/J)·ω − TL/J.
///
/// The command is expected to be saturated already; saturation is applied at
/// the plant boundary, not here.
pub fn reduced_speed_derivative(
    consts: &DerivedConstants,
    omega_r: f64,
    iq_cmd: f64,
    t_load: f64,
) -> f64 {
    consts.chi * iq_cmd - consts.a_fric * omega_r - t_load / consts.inertia()
}

/// Clamps a current command to the symmetric bound ±limit. Idempotent.
pub fn saturate(value: f64, limit: f64) -> f64 {
    value.clamp(-limit, limit)
}
