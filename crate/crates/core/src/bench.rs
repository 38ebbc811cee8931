//! Per-controller computational cost measurement.
//!
//! Every controller replays the same recorded input tape so the numeric
//! workload is identical; wall time per update is the median over batches,
//! with warm-up batches discarded and batch sizes grown until each batch is
//! long enough for the timer to resolve. Alongside the timing, each row
//! reports deterministic size figures: auxiliary state count, state-memory
//! footprint, and a static multiply/divide count read off the update
//! arithmetic (power and square-root calls counted as one each; the
//! fractional variant's count is dominated by its history convolutions).

use std::hint::black_box;
use std::time::Instant;

use crate::controllers::{
    CommonLoopState, ConfigError, Controller, ControllerConfig, ControllerKind, DerivFilter,
    PlantView, DERIV_FILTER_TAU_SAMPLES,
};
use crate::plant::DerivedConstants;
use crate::sim::RunRecord;

/// One sample of the recorded loop signals.
#[derive(Debug, Clone, Copy)]
pub struct TapeSample {
    pub lp: CommonLoopState,
    pub view: PlantView,
}

/// Recorded nominal-run signals replayed identically into every controller.
#[derive(Debug, Clone)]
pub struct InputTape {
    samples: Vec<TapeSample>,
}

impl InputTape {
    /// Rebuilds the loop signals a controller would have seen during the
    /// recorded run. The error-derivative filter is replayed from scratch so
    /// the tape is deterministic given the record.
    pub fn from_record(record: &RunRecord) -> Self {
        let mut filter = DerivFilter::new(record.sample_dt, DERIV_FILTER_TAU_SAMPLES);
        let mut samples = Vec::with_capacity(record.len());
        let mut prev_iq = 0.0;
        for k in 0..record.len() {
            let e = record.error[k];
            samples.push(TapeSample {
                lp: CommonLoopState {
                    e,
                    e_dot: filter.update(e),
                    omega_ref_dot: 0.0,
                    omega_ref_ddot: 0.0,
                },
                view: PlantView {
                    iq: prev_iq,
                    omega_m: record.omega[k],
                    t_load_est: record.t_load[k],
                },
            });
            prev_iq = record.iq_applied[k];
        }
        Self { samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Cost figures for one controller variant.
#[derive(Debug, Clone)]
pub struct ComplexityRow {
    pub kind: ControllerKind,
    /// Dynamic states beyond the shared loop signals.
    pub extra_states: usize,
    /// Median-of-batches wall time per update (ns).
    pub mean_update_ns: f64,
    /// Static per-update cost normalized to the conventional controller
    /// (1.0 there by construction). Wall time is reported unnormalized in
    /// `mean_update_ns` because transcendental-call asymmetry across the
    /// laws makes time ratios hardware-shaped rather than law-shaped.
    pub relative_cost: f64,
    /// Controller-state footprint including heap buffers (bytes).
    pub memory_bytes: usize,
    /// Static multiply-equivalent count per update.
    pub static_mults: usize,
}

/// Static multiply-equivalent count of one update, read off each law as
/// implemented: multiplies, divides, powers and square roots count one
/// each, and the error-derivative filter (one divide, one multiply) is
/// charged to the variants that consume the error derivative.
///
/// * conventional (7): ε·|e|^a·sgn [3] + |s|^(±b)·s [2] + k·rate [1] + /χ [1]
/// * integral (10): conventional [7] + trapezoid [1] + λ·e_int [1] + λ·e [1]
/// * terminal (8): filter [2] + c·|e|^α·sat [3] + k·∫ [1] + /χ [1] + sgn·Ts [1]
/// * fractional (4·m+15): four history convolutions [4·m + 4 scales] +
///   surface assembly [3] + law assembly [7] + sgn·Ts [1]
/// * adaptive (11): filter [2] + c·e [1] + ṡ filter [2] + η1·|s| [1] +
///   η2·|ṡ| [1] + arg offset [1] + Ω·sgn·Ts [2] + /χ [1]
/// * super-twisting (13): filter [2] + c·e [1] + reference shaping [2] +
///   three equivalent-control products [3] + L·√|s|·sgn [3] + W·Ts·sgn [1] +
///   u·Ts [1]
pub fn static_mult_count(cfg: &ControllerConfig) -> usize {
    match cfg {
        ControllerConfig::Csmc(_) => 7,
        ControllerConfig::Ismc(_) => 10,
        ControllerConfig::Tsmc(_) => 8,
        ControllerConfig::Fosmc(c) => 4 * c.memory_len + 15,
        ControllerConfig::Asmc(_) => 11,
        ControllerConfig::Stsmc(_) => 13,
    }
}

/// Measures one controller on the tape. `n_updates` is split into batches;
/// the per-update figure is the median batch rate after warm-up.
pub fn bench_controller(
    cfg: &ControllerConfig,
    consts: &DerivedConstants,
    ts: f64,
    n_updates: usize,
    tape: &InputTape,
) -> Result<ComplexityRow, ConfigError> {
    assert!(!tape.is_empty(), "input tape must hold samples");
    let controller = Controller::new(cfg, consts, ts, DERIV_FILTER_TAU_SAMPLES)?;
    let extra_states = controller.extra_states();
    let memory_bytes = controller.state_bytes();

    const BATCHES: usize = 31;
    const WARMUP: usize = 4;
    let mut batch_size = (n_updates / BATCHES).max(1);

    let mean_update_ns = loop {
        let mut medians = Vec::with_capacity(BATCHES);
        let mut too_fast = false;
        for batch in 0..BATCHES + WARMUP {
            // Fresh state per batch so early batches are not cheaper.
            let mut ctl = Controller::new(cfg, consts, ts, DERIV_FILTER_TAU_SAMPLES)?;
            let started = Instant::now();
            let mut acc = 0.0;
            for i in 0..batch_size {
                let sample = &tape.samples[i % tape.len()];
                acc += ctl.update(black_box(&sample.lp), None, black_box(&sample.view));
            }
            let elapsed = started.elapsed();
            black_box(acc);
            if batch >= WARMUP {
                // Need at least ~1 ns resolution per update within a batch.
                if elapsed.as_nanos() < batch_size as u128 {
                    too_fast = true;
                    break;
                }
                medians.push(elapsed.as_nanos() as f64 / batch_size as f64);
            }
        }
        if too_fast {
            batch_size *= 4;
            continue;
        }
        medians.sort_by(|a, b| a.total_cmp(b));
        break medians[medians.len() / 2];
    };

    let static_mults = static_mult_count(cfg);
    let baseline = static_mult_count(&ControllerConfig::Csmc(Default::default()));
    Ok(ComplexityRow {
        kind: cfg.kind(),
        extra_states,
        mean_update_ns,
        relative_cost: static_mults as f64 / baseline as f64,
        memory_bytes,
        static_mults,
    })
}

/// Benches every given variant on the same tape. Relative costs are the
/// static counts normalized to the conventional baseline.
pub fn complexity_table(
    cfgs: &[ControllerConfig],
    consts: &DerivedConstants,
    ts: f64,
    n_updates: usize,
    tape: &InputTape,
) -> Result<Vec<ComplexityRow>, ConfigError> {
    let mut rows = Vec::with_capacity(cfgs.len());
    for cfg in cfgs {
        rows.push(bench_controller(cfg, consts, ts, n_updates, tape)?);
    }
    Ok(rows)
}
