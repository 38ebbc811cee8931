//! Adaptive sliding-mode speed controller.
//!
//! The switching gain Ω is recomputed every sample from the distance to the
//! surface `s = ė + c·e` and its rate, then clamped to a working band:
//!
//! ```text
//! Ω   = clamp(η1·|s| − η2·|ṡ| + η3, Ωr, H)
//! arg = s + sgn(ṡ)/(2·Ωr)          (s alone when ṡ = 0)
//! iq* = (1/χ)·(ω̇* + c·e + ∫Ω·sgn(arg) dτ)
//! ```
//!
//! The gain grows far from the surface and shrinks to the floor near the
//! origin, which keeps the integrated switching action smooth. The clamp
//! guarantees Ω ∈ [Ωr, H] for any input sequence.

use super::csmc::check_positive;
use super::{sgn, CommonLoopState, ConfigError, DerivFilter};
use crate::plant::DerivedConstants;

#[derive(Debug, Clone, PartialEq)]
pub struct AsmcConfig {
    /// Surface gain c.
    pub c: f64,
    /// Gain-growth rate η1 on |s|.
    pub eta1: f64,
    /// Gain-decay rate η2 on |ṡ|.
    pub eta2: f64,
    /// Gain offset η3.
    pub eta3: f64,
    /// Lower gain bound Ωr.
    pub omega_r_bound: f64,
    /// Upper gain bound H.
    pub h_cap: f64,
}

impl Default for AsmcConfig {
    fn default() -> Self {
        Self {
            c: 15.0,
            eta1: 2.0,
            eta2: 1.5,
            eta3: 0.2,
            omega_r_bound: 1.0,
            h_cap: 50.0,
        }
    }
}

impl AsmcConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let ctl = "asmc";
        check_positive(ctl, "c", self.c)?;
        check_positive(ctl, "eta1", self.eta1)?;
        check_positive(ctl, "eta2", self.eta2)?;
        check_positive(ctl, "eta3", self.eta3)?;
        check_positive(ctl, "omega_r_bound", self.omega_r_bound)?;
        check_positive(ctl, "h_cap", self.h_cap)?;
        if self.h_cap <= self.omega_r_bound {
            return Err(ConfigError::InvalidGain {
                controller: ctl,
                field: "h_cap",
                reason: "upper gain bound must exceed the lower bound",
            });
        }
        Ok(())
    }
}

/// Candidate gain before clamping: η1·|s| − η2·|ṡ| + η3.
pub fn adaptive_gain(cfg: &AsmcConfig, s: f64, s_dot: f64) -> f64 {
    let candidate = cfg.eta1 * s.abs() - cfg.eta2 * s_dot.abs() + cfg.eta3;
    candidate.clamp(cfg.omega_r_bound, cfg.h_cap)
}

/// Switching argument `s + sgn(ṡ)/(2·Ωr)`, reducing to `s` at ṡ = 0.
pub fn switching_argument(cfg: &AsmcConfig, s: f64, s_dot: f64) -> f64 {
    if s_dot == 0.0 {
        s
    } else {
        s + sgn(s_dot) / (2.0 * cfg.omega_r_bound)
    }
}

#[derive(Debug, Clone)]
pub struct Asmc {
    cfg: AsmcConfig,
    chi: f64,
    ts: f64,
    s_filter: DerivFilter,
    /// Running integral of Ω·sgn(arg) (ampere-equivalent before 1/χ).
    sw_int: f64,
    omega_gain: f64,
    s: f64,
}

impl Asmc {
    pub fn new(cfg: AsmcConfig, consts: &DerivedConstants, ts: f64, tau_samples: f64) -> Self {
        let omega_gain = cfg.omega_r_bound;
        Self {
            cfg,
            chi: consts.chi,
            ts,
            s_filter: DerivFilter::new(ts, tau_samples),
            sw_int: 0.0,
            omega_gain,
            s: 0.0,
        }
    }

    pub fn update(&mut self, lp: &CommonLoopState) -> f64 {
        let ce = self.cfg.c * lp.e;
        let s = lp.e_dot + ce;
        let s_dot = self.s_filter.update(s);
        self.s = s;

        self.omega_gain = adaptive_gain(&self.cfg, s, s_dot);
        let arg = switching_argument(&self.cfg, s, s_dot);
        self.sw_int += self.omega_gain * sgn(arg) * self.ts;

        (lp.omega_ref_dot + ce + self.sw_int) / self.chi
    }

    pub fn sliding(&self) -> f64 {
        self.s
    }

    /// Adaptive gain after the most recent update.
    pub fn gain(&self) -> f64 {
        self.omega_gain
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plant::PmsmParams;

    fn cfg() -> AsmcConfig {
        AsmcConfig::default()
    }

    #[test]
    fn gain_at_rest_sits_on_the_floor() {
        // η3 = 0.2 < Ωr = 1, so the clamp lifts it to the floor.
        assert_eq!(adaptive_gain(&cfg(), 0.0, 0.0), 1.0);
    }

    #[test]
    fn gain_inside_the_band_uses_the_formula() {
        let g = adaptive_gain(&cfg(), 10.0, 0.0);
        assert!((g - 20.2).abs() < 1e-12, "got {g}");
    }

    #[test]
    fn gain_saturates_at_the_cap() {
        assert_eq!(adaptive_gain(&cfg(), 100.0, 0.0), 50.0);
    }

    #[test]
    fn surface_rate_lowers_the_gain() {
        let g = adaptive_gain(&cfg(), 10.0, 4.0);
        assert!((g - (20.2 - 6.0)).abs() < 1e-12);
    }

    #[test]
    fn switching_argument_handles_zero_rate() {
        assert_eq!(switching_argument(&cfg(), 3.0, 0.0), 3.0);
        assert_eq!(switching_argument(&cfg(), 3.0, -2.0), 3.0 - 0.5);
        assert_eq!(switching_argument(&cfg(), 3.0, 2.0), 3.0 + 0.5);
    }

    #[test]
    fn rest_state_commands_nothing() {
        let consts = PmsmParams::default().derived();
        let mut c = Asmc::new(cfg(), &consts, 1e-4, 10.0);
        let iq = c.update(&CommonLoopState::default());
        assert_eq!(iq, 0.0);
        assert_eq!(c.gain(), 1.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            // The gain stays inside [Ωr, H] for any input sequence.
            #[test]
            fn gain_always_clamped(
                es in proptest::collection::vec(-1e4f64..1e4, 1..200),
                eds in proptest::collection::vec(-1e6f64..1e6, 1..200),
            ) {
                let consts = PmsmParams::default().derived();
                let config = AsmcConfig::default();
                let mut c = Asmc::new(config.clone(), &consts, 1e-4, 10.0);
                for (e, e_dot) in es.iter().zip(eds.iter()) {
                    c.update(&CommonLoopState { e: *e, e_dot: *e_dot, ..Default::default() });
                    prop_assert!(c.gain() >= config.omega_r_bound);
                    prop_assert!(c.gain() <= config.h_cap);
                }
            }
        }
    }
}
