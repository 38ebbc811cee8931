//! Strict sectioned key/value scenario files.
//!
//! The format is deliberately plain so diffs stay readable:
//!
//! ```text
//! # comment
//! [plant]
//! rs = 0.9
//! pn = 4
//!
//! [scenario]
//! omega_ref = 700.0
//! duration = 1.0
//!
//! [disturbance]
//! initial = 1.2
//! event = 0.2 0.0
//! event = 0.6 1.2
//!
//! [controller.stsmc]
//! c = 15
//! k1 = 8
//! k2 = 3
//! ```
//!
//! Parsing is strict: unknown sections or keys and duplicated keys are
//! errors with line numbers, so a typo in a gain name cannot silently fall
//! back to a default. Omitted sections and keys fall back to the nominal
//! benchmark values. The `event` key is the one repeatable key; events are
//! `time torque` pairs and must be listed in increasing time order.

use std::collections::HashSet;
use std::fmt;

use pmsm_smc::controllers::{
    AsmcConfig, ControllerConfig, ControllerKind, CsmcConfig, FosmcConfig, IsmcConfig,
    StsmcConfig, TsmcConfig,
};
use pmsm_smc::plant::PmsmParams;
use pmsm_smc::sim::{DisturbanceEvent, DisturbanceSchedule, RefProfile, Scenario};

/// Parse or validation failure with source position where available.
#[derive(Debug)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn err_at(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line: Some(line),
        message: message.into(),
    }
}

fn err(message: impl Into<String>) -> ConfigError {
    ConfigError {
        line: None,
        message: message.into(),
    }
}

/// Run-level settings from the `[scenario]` section.
#[derive(Debug, Clone)]
pub struct RunSettings {
    pub omega_ref: f64,
    pub profile: RefProfile,
    pub duration: f64,
    pub solver_dt: f64,
    pub sample_dt: f64,
    pub eso_enabled: bool,
    pub eso_bandwidth: f64,
    pub oracle_disturbance: bool,
    pub deriv_filter_tau: f64,
}

impl Default for RunSettings {
    fn default() -> Self {
        let base = Scenario::nominal(ControllerConfig::default_for(ControllerKind::Csmc));
        Self {
            omega_ref: base.omega_ref,
            profile: base.profile,
            duration: base.duration,
            solver_dt: base.solver_dt,
            sample_dt: base.sample_dt,
            eso_enabled: base.eso_enabled,
            eso_bandwidth: base.eso_bandwidth,
            oracle_disturbance: base.oracle_disturbance,
            deriv_filter_tau: base.deriv_filter_tau,
        }
    }
}

/// A fully parsed scenario file: machine, run settings, load schedule and
/// one gain set per controller variant.
#[derive(Debug, Clone)]
pub struct ScenarioFile {
    pub params: PmsmParams,
    pub run: RunSettings,
    pub disturbance: DisturbanceSchedule,
    pub csmc: CsmcConfig,
    pub ismc: IsmcConfig,
    pub tsmc: TsmcConfig,
    pub fosmc: FosmcConfig,
    pub asmc: AsmcConfig,
    pub stsmc: StsmcConfig,
}

impl Default for ScenarioFile {
    fn default() -> Self {
        Self {
            params: PmsmParams::default(),
            run: RunSettings::default(),
            disturbance: DisturbanceSchedule::rated_steps(),
            csmc: CsmcConfig::default(),
            ismc: IsmcConfig::default(),
            tsmc: TsmcConfig::default(),
            fosmc: FosmcConfig::default(),
            asmc: AsmcConfig::default(),
            stsmc: StsmcConfig::default(),
        }
    }
}

impl ScenarioFile {
    /// Parses and fully validates a scenario document.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut file = ScenarioFile::default();
        let mut section = String::new();
        let mut seen_keys: HashSet<(String, String)> = HashSet::new();
        let mut disturbance_section_present = false;
        let mut disturbance_events: Vec<(usize, DisturbanceEvent)> = Vec::new();
        let mut disturbance_initial: Option<f64> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }

            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| err_at(line_no, "unterminated section header"))?
                    .trim()
                    .to_ascii_lowercase();
                match name.as_str() {
                    "plant" | "scenario" | "disturbance" => {}
                    other => {
                        if let Some(kind) = other.strip_prefix("controller.") {
                            kind.parse::<ControllerKind>()
                                .map_err(|e| err_at(line_no, e))?;
                        } else {
                            return Err(err_at(line_no, format!("unknown section `[{other}]`")));
                        }
                    }
                }
                if name == "disturbance" {
                    disturbance_section_present = true;
                }
                section = name;
                continue;
            }

            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err_at(line_no, "expected `key = value`"))?;
            let key = key.trim().to_ascii_lowercase();
            let value = value.trim();
            if section.is_empty() {
                return Err(err_at(line_no, "key outside of any section"));
            }
            if key != "event" && !seen_keys.insert((section.clone(), key.clone())) {
                return Err(err_at(
                    line_no,
                    format!("duplicate key `{key}` in section `[{section}]`"),
                ));
            }

            match section.as_str() {
                "plant" => parse_plant_key(&mut file.params, &key, value, line_no)?,
                "scenario" => parse_scenario_key(&mut file.run, &key, value, line_no)?,
                "disturbance" => match key.as_str() {
                    "initial" => disturbance_initial = Some(parse_f64(value, line_no)?),
                    "event" => {
                        let mut parts = value.split_whitespace();
                        let time = parts
                            .next()
                            .ok_or_else(|| err_at(line_no, "event needs `time torque`"))?;
                        let torque = parts
                            .next()
                            .ok_or_else(|| err_at(line_no, "event needs `time torque`"))?;
                        if parts.next().is_some() {
                            return Err(err_at(line_no, "event takes exactly two values"));
                        }
                        disturbance_events.push((
                            line_no,
                            DisturbanceEvent {
                                time: parse_f64(time, line_no)?,
                                torque: parse_f64(torque, line_no)?,
                            },
                        ));
                    }
                    other => {
                        return Err(err_at(
                            line_no,
                            format!("unknown key `{other}` in `[disturbance]`"),
                        ))
                    }
                },
                ctl => {
                    let kind = ctl.strip_prefix("controller.").expect("validated above");
                    parse_controller_key(&mut file, kind, &key, value, line_no)?;
                }
            }
        }

        if disturbance_section_present {
            let mut prev = f64::NEG_INFINITY;
            for (line_no, ev) in &disturbance_events {
                if ev.time <= prev {
                    return Err(err_at(
                        *line_no,
                        format!("disturbance events out of order at t = {}", ev.time),
                    ));
                }
                prev = ev.time;
            }
            file.disturbance = DisturbanceSchedule {
                initial: disturbance_initial.unwrap_or(0.0),
                events: disturbance_events.into_iter().map(|(_, ev)| ev).collect(),
            };
        }

        file.validate()?;
        Ok(file)
    }

    /// Full validation: machine parameters, run settings and every gain set.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params
            .validate()
            .map_err(|e| err(format!("[plant] {e}")))?;
        for cfg in self.all_configs() {
            cfg.validate()
                .map_err(|e| err(format!("[controller.{}] {e}", cfg.kind())))?;
        }
        // Shared scenario constraints, checked against one variant.
        self.scenario_for(ControllerKind::Csmc)
            .validate()
            .map_err(|e| err(format!("[scenario] {e}")))?;
        Ok(())
    }

    pub fn gains_for(&self, kind: ControllerKind) -> ControllerConfig {
        match kind {
            ControllerKind::Csmc => ControllerConfig::Csmc(self.csmc.clone()),
            ControllerKind::Ismc => ControllerConfig::Ismc(self.ismc.clone()),
            ControllerKind::Tsmc => ControllerConfig::Tsmc(self.tsmc.clone()),
            ControllerKind::Fosmc => ControllerConfig::Fosmc(self.fosmc.clone()),
            ControllerKind::Asmc => ControllerConfig::Asmc(self.asmc.clone()),
            ControllerKind::Stsmc => ControllerConfig::Stsmc(self.stsmc.clone()),
        }
    }

    pub fn all_configs(&self) -> Vec<ControllerConfig> {
        ControllerKind::ALL
            .iter()
            .map(|&k| self.gains_for(k))
            .collect()
    }

    /// Scenario with the file's own disturbance schedule.
    pub fn scenario_for(&self, kind: ControllerKind) -> Scenario {
        Scenario {
            controller: self.gains_for(kind),
            omega_ref: self.run.omega_ref,
            profile: self.run.profile,
            duration: self.run.duration,
            solver_dt: self.run.solver_dt,
            sample_dt: self.run.sample_dt,
            disturbance: self.disturbance.clone(),
            eso_enabled: self.run.eso_enabled,
            eso_bandwidth: self.run.eso_bandwidth,
            oracle_disturbance: self.run.oracle_disturbance,
            deriv_filter_tau: self.run.deriv_filter_tau,
        }
    }

    /// Scenario with the load schedule zeroed out.
    pub fn nominal_scenario_for(&self, kind: ControllerKind) -> Scenario {
        Scenario {
            disturbance: DisturbanceSchedule::none(),
            ..self.scenario_for(kind)
        }
    }
}

fn parse_f64(value: &str, line: usize) -> Result<f64, ConfigError> {
    value
        .parse::<f64>()
        .map_err(|_| err_at(line, format!("`{value}` is not a number")))
}

fn parse_bool(value: &str, line: usize) -> Result<bool, ConfigError> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" => Ok(true),
        "false" | "no" | "off" => Ok(false),
        other => Err(err_at(line, format!("`{other}` is not a boolean"))),
    }
}

fn parse_plant_key(
    params: &mut PmsmParams,
    key: &str,
    value: &str,
    line: usize,
) -> Result<(), ConfigError> {
    match key {
        "rs" => params.rs = parse_f64(value, line)?,
        "ld" => params.ld = parse_f64(value, line)?,
        "lq" => params.lq = parse_f64(value, line)?,
        "psi_f" => params.psi_f = parse_f64(value, line)?,
        "pn" => {
            params.pn = value
                .parse::<u32>()
                .map_err(|_| err_at(line, format!("`{value}` is not a pole-pair count")))?
        }
        "j" => params.j = parse_f64(value, line)?,
        "b" => params.b = parse_f64(value, line)?,
        "vdc" => params.vdc = parse_f64(value, line)?,
        "iq_limit" => params.iq_limit = parse_f64(value, line)?,
        "fs" => params.fs = parse_f64(value, line)?,
        other => return Err(err_at(line, format!("unknown key `{other}` in `[plant]`"))),
    }
    Ok(())
}

fn parse_scenario_key(
    run: &mut RunSettings,
    key: &str,
    value: &str,
    line: usize,
) -> Result<(), ConfigError> {
    match key {
        "omega_ref" => run.omega_ref = parse_f64(value, line)?,
        "ref_profile" => {
            run.profile = match value.to_ascii_lowercase().as_str() {
                "step" => RefProfile::Step {
                    t_step: profile_start(run.profile),
                },
                "ramp" => RefProfile::Ramp {
                    t_start: profile_start(run.profile),
                    ramp_time: 0.05,
                },
                other => return Err(err_at(line, format!("unknown profile `{other}`"))),
            }
        }
        "step_time" => {
            let t = parse_f64(value, line)?;
            run.profile = match run.profile {
                RefProfile::Step { .. } => RefProfile::Step { t_step: t },
                RefProfile::Ramp { ramp_time, .. } => RefProfile::Ramp {
                    t_start: t,
                    ramp_time,
                },
            };
        }
        "ramp_time" => {
            let ramp_time = parse_f64(value, line)?;
            run.profile = RefProfile::Ramp {
                t_start: profile_start(run.profile),
                ramp_time,
            };
        }
        "duration" => run.duration = parse_f64(value, line)?,
        "solver_dt" => run.solver_dt = parse_f64(value, line)?,
        "sample_dt" => run.sample_dt = parse_f64(value, line)?,
        "eso_enabled" => run.eso_enabled = parse_bool(value, line)?,
        "eso_bandwidth" => run.eso_bandwidth = parse_f64(value, line)?,
        "oracle_disturbance" => run.oracle_disturbance = parse_bool(value, line)?,
        "deriv_filter_tau" => run.deriv_filter_tau = parse_f64(value, line)?,
        other => {
            return Err(err_at(
                line,
                format!("unknown key `{other}` in `[scenario]`"),
            ))
        }
    }
    Ok(())
}

fn profile_start(profile: RefProfile) -> f64 {
    match profile {
        RefProfile::Step { t_step } => t_step,
        RefProfile::Ramp { t_start, .. } => t_start,
    }
}

fn parse_controller_key(
    file: &mut ScenarioFile,
    kind: &str,
    key: &str,
    value: &str,
    line: usize,
) -> Result<(), ConfigError> {
    let unknown = |k: &str| err_at(line, format!("unknown key `{k}` in `[controller.{kind}]`"));
    match kind {
        "csmc" => {
            let c = &mut file.csmc;
            match key {
                "eps" => c.eps = parse_f64(value, line)?,
                "k" => c.k = parse_f64(value, line)?,
                "a" => c.a = parse_f64(value, line)?,
                "b" => c.b = parse_f64(value, line)?,
                other => return Err(unknown(other)),
            }
        }
        "ismc" => {
            let c = &mut file.ismc;
            match key {
                "lambda" => c.lambda = parse_f64(value, line)?,
                "eps" => c.eps = parse_f64(value, line)?,
                "k" => c.k = parse_f64(value, line)?,
                "a" => c.a = parse_f64(value, line)?,
                "b" => c.b = parse_f64(value, line)?,
                "manifold_init" => c.manifold_init = parse_bool(value, line)?,
                other => return Err(unknown(other)),
            }
        }
        "tsmc" => {
            let c = &mut file.tsmc;
            match key {
                "c" => c.c = parse_f64(value, line)?,
                "alpha" => c.alpha = parse_f64(value, line)?,
                "k" => c.k = parse_f64(value, line)?,
                "delta_e" => c.delta_e = parse_f64(value, line)?,
                "compensated" => c.compensated = parse_bool(value, line)?,
                other => return Err(unknown(other)),
            }
        }
        "fosmc" => {
            let c = &mut file.fosmc;
            match key {
                "kp" => c.kp = parse_f64(value, line)?,
                "ki" => c.ki = parse_f64(value, line)?,
                "kd" => c.kd = parse_f64(value, line)?,
                "alpha" => c.alpha = parse_f64(value, line)?,
                "beta" => c.beta = parse_f64(value, line)?,
                "w" => c.w = parse_f64(value, line)?,
                "ks" => c.ks = parse_f64(value, line)?,
                "memory_len" => {
                    c.memory_len = value
                        .parse::<usize>()
                        .map_err(|_| err_at(line, format!("`{value}` is not a sample count")))?
                }
                other => return Err(unknown(other)),
            }
        }
        "asmc" => {
            let c = &mut file.asmc;
            match key {
                "c" => c.c = parse_f64(value, line)?,
                "eta1" => c.eta1 = parse_f64(value, line)?,
                "eta2" => c.eta2 = parse_f64(value, line)?,
                "eta3" => c.eta3 = parse_f64(value, line)?,
                "omega_r" => c.omega_r_bound = parse_f64(value, line)?,
                "h" => c.h_cap = parse_f64(value, line)?,
                other => return Err(unknown(other)),
            }
        }
        "stsmc" => {
            let c = &mut file.stsmc;
            match key {
                "c" => c.c = parse_f64(value, line)?,
                "k1" => c.l_gain = parse_f64(value, line)?,
                "k2" => c.w_gain = parse_f64(value, line)?,
                other => return Err(unknown(other)),
            }
        }
        other => return Err(err_at(line, format!("unknown controller `{other}`"))),
    }
    Ok(())
}
