//! CSV and table emission.
//!
//! Run CSVs are bit-stable: fixed header, 9 significant digits in
//! scientific notation, UNIX newlines, one row per controller sample.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use pmsm_smc::bench::ComplexityRow;
use pmsm_smc::controllers::ControllerKind;
use pmsm_smc::metrics::MetricsReport;
use pmsm_smc::sim::RunRecord;

use crate::CliError;

pub const RUN_CSV_HEADER: &str = "t,omega,omega_ref,iq_cmd,iq_applied,error,s,t_load";

fn sig9(x: f64) -> String {
    format!("{x:.8e}")
}

/// Serializes a run record to the fixed CSV layout.
pub fn run_csv(record: &RunRecord) -> String {
    let mut out = String::with_capacity(record.len() * 96 + 64);
    out.push_str(RUN_CSV_HEADER);
    out.push('\n');
    for i in 0..record.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            sig9(record.time[i]),
            sig9(record.omega[i]),
            sig9(record.omega_ref[i]),
            sig9(record.iq_cmd[i]),
            sig9(record.iq_applied[i]),
            sig9(record.error[i]),
            sig9(record.s_value[i]),
            sig9(record.t_load[i]),
        );
    }
    out
}

pub fn write_run_csv(record: &RunRecord, path: &Path) -> Result<(), CliError> {
    fs::write(path, run_csv(record))
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

/// Parses a run CSV back into column vectors (round-trip oracle).
#[cfg(test)]
pub fn parse_run_csv(text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != RUN_CSV_HEADER {
        return Err(CliError::Io(format!("unexpected CSV header `{header}`")));
    }
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); 8];
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(CliError::Io(format!("row {} has {} fields", i + 2, fields.len())));
        }
        for (col, field) in columns.iter_mut().zip(fields) {
            col.push(
                field
                    .parse::<f64>()
                    .map_err(|_| CliError::Io(format!("bad number `{field}` in row {}", i + 2)))?,
            );
        }
    }
    Ok(columns)
}

pub const SUMMARY_CSV_HEADER: &str = "controller,ise,iae,itse,itae,rise_time,settling_time,overshoot_pct,steady_state_error,chattering_index";

fn opt9(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".into(), sig9)
}

/// One summary line per controller; failed runs carry a `failed` marker in
/// every numeric column.
pub fn summary_csv(rows: &[(ControllerKind, Option<MetricsReport>)]) -> String {
    let mut out = String::new();
    out.push_str(SUMMARY_CSV_HEADER);
    out.push('\n');
    for (kind, report) in rows {
        match report {
            Some(m) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    kind,
                    sig9(m.ise),
                    sig9(m.iae),
                    sig9(m.itse),
                    sig9(m.itae),
                    opt9(m.rise_time),
                    opt9(m.settling_time),
                    sig9(m.overshoot_pct),
                    sig9(m.steady_state_error),
                    sig9(m.chattering_index),
                );
            }
            None => {
                let _ = writeln!(out, "{kind},failed,failed,failed,failed,failed,failed,failed,failed,failed");
            }
        }
    }
    out
}

type ColumnGetter = fn(&MetricsReport) -> Option<f64>;

/// Console table with the best (smallest) entry per column marked `*`,
/// mirroring the boldface convention of printed comparison tables.
pub fn summary_table(title: &str, rows: &[(ControllerKind, Option<MetricsReport>)]) -> String {
    let columns: [(&str, ColumnGetter); 9] = [
        ("ise", |m| Some(m.ise)),
        ("iae", |m| Some(m.iae)),
        ("itse", |m| Some(m.itse)),
        ("itae", |m| Some(m.itae)),
        ("rise", |m| m.rise_time),
        ("settle", |m| m.settling_time),
        ("ovs%", |m| Some(m.overshoot_pct)),
        ("|sse|", |m| Some(m.steady_state_error.abs())),
        ("chat", |m| Some(m.chattering_index)),
    ];
    let best: Vec<Option<f64>> = columns
        .iter()
        .map(|(_, get)| {
            rows.iter()
                .filter_map(|(_, m)| m.as_ref().and_then(get))
                .fold(None, |acc: Option<f64>, v| {
                    Some(acc.map_or(v, |a| a.min(v)))
                })
        })
        .collect();

    let mut out = String::new();
    let _ = writeln!(out, "{title}");
    let _ = write!(out, "{:<8}", "ctl");
    for (name, _) in &columns {
        let _ = write!(out, "{name:>13}");
    }
    out.push('\n');
    for (kind, report) in rows {
        let _ = write!(out, "{:<8}", kind.to_string());
        match report {
            Some(m) => {
                for ((_, get), best) in columns.iter().zip(&best) {
                    match get(m) {
                        Some(v) => {
                            let marker =
                                if best.is_some_and(|b| v == b) { "*" } else { "" };
                            let _ = write!(out, "{:>13}", format!("{v:.5}{marker}"));
                        }
                        None => {
                            let _ = write!(out, "{:>13}", "--");
                        }
                    }
                }
            }
            None => {
                let _ = write!(out, "{:>13}", "failed");
            }
        }
        out.push('\n');
    }
    out
}

pub const COMPLEXITY_CSV_HEADER: &str =
    "controller,extra_states,mean_update_ns,relative_cost,memory_bytes,static_mults";

pub fn complexity_csv(rows: &[ComplexityRow]) -> String {
    let mut out = String::new();
    out.push_str(COMPLEXITY_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.kind,
            r.extra_states,
            sig9(r.mean_update_ns),
            sig9(r.relative_cost),
            r.memory_bytes,
            r.static_mults,
        );
    }
    out
}

pub fn complexity_table(rows: &[ComplexityRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<8}{:>8}{:>15}{:>10}{:>13}{:>13}",
        "ctl", "states", "update_ns", "relative", "state_bytes", "static_mults"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<8}{:>8}{:>15.1}{:>10.2}{:>13}{:>13}",
            r.kind.to_string(),
            r.extra_states,
            r.mean_update_ns,
            r.relative_cost,
            r.memory_bytes,
            r.static_mults,
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(n: usize) -> RunRecord {
        RunRecord {
            sample_dt: 1e-4,
            omega_ref_target: 700.0,
            time: (0..n).map(|k| k as f64 * 1e-4).collect(),
            omega: (0..n).map(|k| k as f64).collect(),
            omega_ref: vec![700.0; n],
            iq_cmd: (0..n).map(|k| 0.1 * k as f64).collect(),
            iq_applied: (0..n).map(|k| 0.1 * k as f64).collect(),
            error: (0..n).map(|k| 700.0 - k as f64).collect(),
            s_value: vec![0.25; n],
            t_load: vec![1.2; n],
            mean_update_ns: 17.0,
            failure: None,
        }
    }

    #[test]
    fn csv_has_header_plus_one_row_per_sample() {
        let text = run_csv(&record(3));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], RUN_CSV_HEADER);
        assert!(!text.contains('\r'));
    }

    #[test]
    fn csv_round_trips_to_printed_precision() {
        let rec = record(50);
        let cols = parse_run_csv(&run_csv(&rec)).unwrap();
        for (i, &t) in rec.time.iter().enumerate() {
            assert!((cols[0][i] - t).abs() <= 1e-8 * t.abs().max(1.0));
        }
        for (i, &w) in rec.omega.iter().enumerate() {
            assert!((cols[1][i] - w).abs() <= 1e-8 * w.abs().max(1.0));
        }
        // Time strictly increasing in the serialized form.
        for w in cols[0].windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(700.0), "7.00000000e2");
        assert_eq!(sig9(-1.2428571428571429), "-1.24285714e0");
    }
}
