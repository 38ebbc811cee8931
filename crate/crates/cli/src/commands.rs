//! Subcommand implementations.

use std::fs;
use std::path::{Path, PathBuf};

use pmsm_smc::bench::{complexity_table, InputTape};
use pmsm_smc::controllers::ControllerKind;
use pmsm_smc::metrics::MetricsReport;
use pmsm_smc::sim::{run_scenario, RunRecord, Scenario};

use crate::config::ScenarioFile;
use crate::output;
use crate::svg::{write_overlay, Series};
use crate::CliError;

pub fn load_scenario_file(path: &Path) -> Result<ScenarioFile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    ScenarioFile::parse(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn parse_controller_list(spec: Option<&str>) -> Result<Vec<ControllerKind>, CliError> {
    match spec {
        None => Ok(ControllerKind::ALL.to_vec()),
        Some(list) => list
            .split(',')
            .map(|item| {
                item.trim()
                    .parse::<ControllerKind>()
                    .map_err(CliError::Config)
            })
            .collect(),
    }
}

fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("creating {}: {e}", dir.display())))
}

fn apply_overrides(mut scenario: Scenario, no_eso: bool) -> Scenario {
    if no_eso {
        scenario.eso_enabled = false;
    }
    scenario
}

struct CompletedRun {
    kind: ControllerKind,
    record: RunRecord,
    report: Option<MetricsReport>,
}

fn execute(
    file: &ScenarioFile,
    kinds: &[ControllerKind],
    nominal: bool,
    no_eso: bool,
    band_pct: f64,
) -> Result<Vec<CompletedRun>, CliError> {
    let mut runs = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        let scenario = if nominal {
            file.nominal_scenario_for(kind)
        } else {
            file.scenario_for(kind)
        };
        let scenario = apply_overrides(scenario, no_eso);
        let record = run_scenario(&scenario, &file.params)
            .map_err(|e| CliError::Config(format!("{kind}: {e}")))?;
        let report = if record.is_failed() || record.is_empty() {
            None
        } else {
            MetricsReport::with_options(&record, scenario.omega_ref, band_pct, 0.25).ok()
        };
        runs.push(CompletedRun {
            kind,
            record,
            report,
        });
    }
    Ok(runs)
}

fn write_plots(
    out_dir: &Path,
    suffix: &str,
    runs: &[CompletedRun],
    events: &[f64],
) -> Result<(), CliError> {
    let speed: Vec<Series<'_>> = runs
        .iter()
        .map(|r| Series {
            label: r.kind.as_str(),
            time: &r.record.time,
            values: &r.record.omega,
        })
        .collect();
    write_overlay(
        &out_dir.join(format!("speed{suffix}.svg")),
        &format!("rotor speed{}", suffix.replace('_', " ")),
        "omega (rad/s)",
        &speed,
        events,
    )?;
    let effort: Vec<Series<'_>> = runs
        .iter()
        .map(|r| Series {
            label: r.kind.as_str(),
            time: &r.record.time,
            values: &r.record.iq_cmd,
        })
        .collect();
    write_overlay(
        &out_dir.join(format!("control{suffix}.svg")),
        &format!("control effort{}", suffix.replace('_', " ")),
        "iq command (A)",
        &effort,
        events,
    )?;
    Ok(())
}

fn summary_rows(runs: &[CompletedRun]) -> Vec<(ControllerKind, Option<MetricsReport>)> {
    runs.iter().map(|r| (r.kind, r.report)).collect()
}

fn failures(runs: &[CompletedRun]) -> Vec<String> {
    runs.iter()
        .filter_map(|r| {
            r.record
                .failure
                .as_ref()
                .map(|f| format!("{}: {} (sample {})", r.kind, f.reason, f.sample))
        })
        .collect()
}

pub struct RunOptions<'a> {
    pub scenario_path: &'a Path,
    pub out_dir: PathBuf,
    pub controllers: Option<&'a str>,
    pub band_pct: f64,
    pub no_eso: bool,
    pub plots: bool,
}

/// `run`: the scenario as configured, one CSV per controller.
pub fn cmd_run(opts: &RunOptions<'_>) -> Result<(), CliError> {
    let file = load_scenario_file(opts.scenario_path)?;
    let kinds = parse_controller_list(opts.controllers)?;
    ensure_out_dir(&opts.out_dir)?;

    let runs = execute(&file, &kinds, false, opts.no_eso, opts.band_pct)?;
    for run in &runs {
        output::write_run_csv(
            &run.record,
            &opts.out_dir.join(format!("{}.csv", run.kind)),
        )?;
    }
    let rows = summary_rows(&runs);
    fs::write(
        opts.out_dir.join("summary.csv"),
        output::summary_csv(&rows),
    )
    .map_err(|e| CliError::Io(e.to_string()))?;
    print!("{}", output::summary_table("scenario run", &rows));

    if opts.plots {
        let events: Vec<f64> = file.disturbance.events.iter().map(|e| e.time).collect();
        write_plots(&opts.out_dir, "", &runs, &events)?;
    }

    let failed = failures(&runs);
    if !failed.is_empty() {
        return Err(CliError::Run(failed.join("; ")));
    }
    Ok(())
}

/// `compare`: nominal and disturbed variants for the selected controllers,
/// with per-run CSVs, two summaries and four overlay plots.
pub fn cmd_compare(opts: &RunOptions<'_>) -> Result<(), CliError> {
    let file = load_scenario_file(opts.scenario_path)?;
    let kinds = parse_controller_list(opts.controllers)?;
    ensure_out_dir(&opts.out_dir)?;

    let mut all_failures = Vec::new();
    for (variant, nominal) in [("nominal", true), ("disturbed", false)] {
        let runs = execute(&file, &kinds, nominal, opts.no_eso, opts.band_pct)?;
        for run in &runs {
            output::write_run_csv(
                &run.record,
                &opts.out_dir.join(format!("{}_{variant}.csv", run.kind)),
            )?;
        }
        let rows = summary_rows(&runs);
        fs::write(
            opts.out_dir.join(format!("summary_{variant}.csv")),
            output::summary_csv(&rows),
        )
        .map_err(|e| CliError::Io(e.to_string()))?;
        print!("{}", output::summary_table(variant, &rows));

        if opts.plots {
            let events: Vec<f64> = if nominal {
                Vec::new()
            } else {
                file.disturbance.events.iter().map(|e| e.time).collect()
            };
            write_plots(&opts.out_dir, &format!("_{variant}"), &runs, &events)?;
        }
        all_failures.extend(failures(&runs));
    }

    if !all_failures.is_empty() {
        return Err(CliError::Run(all_failures.join("; ")));
    }
    Ok(())
}

/// `bench`: identical-tape cost measurement for the selected controllers.
pub fn cmd_bench(
    scenario_path: &Path,
    out_dir: PathBuf,
    controllers: Option<&str>,
    n_updates: usize,
) -> Result<(), CliError> {
    let file = load_scenario_file(scenario_path)?;
    let kinds = parse_controller_list(controllers)?;
    ensure_out_dir(&out_dir)?;

    // The tape is one nominal conventional-controller run of this scenario,
    // so every variant sees the same numeric workload.
    let tape_scenario = file.nominal_scenario_for(ControllerKind::Csmc);
    let record = run_scenario(&tape_scenario, &file.params)
        .map_err(|e| CliError::Config(e.to_string()))?;
    if record.is_failed() {
        return Err(CliError::Run("tape run failed".into()));
    }
    let tape = InputTape::from_record(&record);

    let cfgs: Vec<_> = kinds.iter().map(|&k| file.gains_for(k)).collect();
    let rows = complexity_table(
        &cfgs,
        &file.params.derived(),
        file.run.sample_dt,
        n_updates,
        &tape,
    )
    .map_err(|e| CliError::Config(e.to_string()))?;

    fs::write(out_dir.join("complexity.csv"), output::complexity_csv(&rows))
        .map_err(|e| CliError::Io(e.to_string()))?;
    print!("{}", output::complexity_table(&rows));
    Ok(())
}

/// `validate`: dry parse plus invariant checks, no runs.
pub fn cmd_validate(scenario_path: &Path) -> Result<(), CliError> {
    let file = load_scenario_file(scenario_path)?;
    for kind in ControllerKind::ALL {
        file.scenario_for(kind)
            .validate()
            .map_err(|e| CliError::Config(format!("{kind}: {e}")))?;
    }
    println!(
        "scenario OK: {} samples at {} Hz, {} substeps, {} disturbance event(s), observer {}",
        file.scenario_for(ControllerKind::Csmc).sample_count(),
        1.0 / file.run.sample_dt,
        file.scenario_for(ControllerKind::Csmc).substeps(),
        file.disturbance.events.len(),
        if file.run.eso_enabled { "on" } else { "off" },
    );
    Ok(())
}
