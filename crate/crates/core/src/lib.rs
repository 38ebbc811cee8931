//! Deterministic speed-loop simulation of a permanent-magnet synchronous
//! motor (PMSM) under six sliding-mode controller variants, with the
//! instrumentation needed to compare them fairly: integral error indices,
//! step-response metrics, a chattering measure, and per-update cost
//! benchmarks.
//!
//! The crate is organized around the closed loop:
//!
//! * [`plant`] — the dq-frame machine model and the reduced speed-loop model
//!   the controllers are designed against, plus actuator saturation.
//! * [`frac`] — discrete Grünwald–Letnikov differintegral operators with
//!   truncated-memory ring buffers (used by the fractional-order controller).
//! * [`controllers`] — the six discrete-time speed controllers producing the
//!   q-axis current command, an extended state observer for disturbance
//!   feedforward, and the shared switching-function helpers.
//! * [`sim`] — fixed-step RK4 integration of the plant with zero-order-hold
//!   controller updates, disturbance scheduling, and run recording.
//! * [`metrics`] — error indices and time-domain step metrics over a run.
//! * [`bench`] — wall-time and state-footprint comparison of the controllers
//!   on an identical recorded input tape.
//!
//! Every run is fully deterministic: the same scenario produces a
//! bit-identical record.

pub mod bench;
pub mod controllers;
pub mod frac;
pub mod metrics;
pub mod plant;
pub mod sim;

pub use controllers::{ControllerConfig, ControllerKind};
pub use plant::{DerivedConstants, PmsmParams};
pub use sim::{RunRecord, Scenario};
