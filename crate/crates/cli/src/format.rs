//! CSV emission and parsing for series, snapshots and sweep tables.

use std::fmt::Write as _;

use acca_core::harness::{CellOutcome, Record, SweepResult};
use acca_core::{Configuration, TopologyKind};

use crate::error::CliError;

pub const SERIES_HEADER: &str = "t,R,psi,Y,tau1,W";
pub const SWEEP_HEADER: &str =
    "topology,epsilon,k_mid,k_noise,mean_R,se_R,mean_absY,se_absY,mean_absTau1,se_absTau1,replicates";

/// Decimal text with 12 significant digits, trailing zeros trimmed.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    let decimals = (11 - exp).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        let trimmed = s.trim_end_matches('0').trim_end_matches('.').len();
        s.truncate(trimmed);
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

pub fn series_csv(records: &[Record]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for r in records {
        let w = r.winding.map(|w| w.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{},{},{}", r.t, fmt_num(r.r), opt(r.psi), fmt_num(r.y), fmt_num(r.tau1), w);
    }
    out
}

fn bad(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("line {line}: {msg}"))
}

fn parse_f64(field: &str, line: usize) -> Result<f64, CliError> {
    field.trim().parse::<f64>().map_err(|_| bad(line, format!("`{field}` is not a number")))
}

fn parse_opt_f64(field: &str, line: usize) -> Result<Option<f64>, CliError> {
    if field.trim().is_empty() {
        Ok(None)
    } else {
        parse_f64(field, line).map(Some)
    }
}

fn parse_u64(field: &str, line: usize) -> Result<u64, CliError> {
    field.trim().parse::<u64>().map_err(|_| bad(line, format!("`{field}` is not a non-negative integer")))
}

pub fn parse_series_csv(text: &str) -> Result<Vec<Record>, CliError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == SERIES_HEADER => {}
        _ => return Err(CliError::Usage(format!("series file must start with `{SERIES_HEADER}`"))),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(bad(i + 1, "expected 6 fields"));
        }
        let winding = if f[5].trim().is_empty() {
            None
        } else {
            Some(f[5].trim().parse::<i64>().map_err(|_| bad(i + 1, "bad winding number"))?)
        };
        out.push(Record {
            t: parse_u64(f[0], i + 1)?,
            r: parse_f64(f[1], i + 1)?,
            psi: parse_opt_f64(f[2], i + 1)?,
            y: parse_f64(f[3], i + 1)?,
            tau1: parse_f64(f[4], i + 1)?,
            winding,
        });
    }
    Ok(out)
}

/// Wide snapshot table: `t,theta_1,...,theta_N`, one row per kept time.
pub fn snapshots_csv<'a>(n: usize, rows: impl IntoIterator<Item = (u64, &'a Configuration)>) -> String {
    let mut out = String::from("t");
    for i in 1..=n {
        let _ = write!(out, ",theta_{i}");
    }
    out.push('\n');
    for (t, c) in rows {
        let _ = write!(out, "{t}");
        for a in c.as_slice() {
            out.push(',');
            out.push_str(&fmt_num(*a));
        }
        out.push('\n');
    }
    out
}

pub fn parse_snapshots_csv(text: &str) -> Result<Vec<(u64, Vec<f64>)>, CliError> {
    let mut lines = text.lines().enumerate();
    let header = match lines.next() {
        Some((_, h)) if h.starts_with("t,theta_1") => h,
        _ => return Err(CliError::Usage("snapshot file must start with `t,theta_1,...`".into())),
    };
    let n = header.split(',').count() - 1;
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != n + 1 {
            return Err(bad(i + 1, format!("expected {} fields", n + 1)));
        }
        let t = parse_u64(f[0], i + 1)?;
        let angles = f[1..].iter().map(|x| parse_f64(x, i + 1)).collect::<Result<Vec<_>, _>>()?;
        rows.push((t, angles));
    }
    Ok(rows)
}

pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for o in &result.outcomes {
        let Ok(s) = &o.result else { continue };
        let c = o.cell;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            c.topology,
            fmt_num(c.epsilon),
            c.k_mid,
            c.k_noise,
            fmt_num(s.mean_r),
            opt(s.se_r),
            fmt_num(s.mean_abs_y),
            opt(s.se_abs_y),
            fmt_num(s.mean_abs_tau1),
            opt(s.se_abs_tau1),
            s.replicates
        );
    }
    out
}

/// One line per failed cell.
pub fn sweep_errors(failures: &[&CellOutcome]) -> String {
    let mut out = String::new();
    for o in failures {
        let c = o.cell;
        let msg = o.result.as_ref().err().map(String::as_str).unwrap_or("");
        let _ = writeln!(out, "{},{},{},{}: {}", c.topology, fmt_num(c.epsilon), c.k_mid, c.k_noise, msg);
    }
    out
}

/// A parsed row of `sweep.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub topology: TopologyKind,
    pub epsilon: f64,
    pub k_mid: usize,
    pub k_noise: usize,
    pub mean_r: f64,
    pub se_r: Option<f64>,
    pub mean_abs_y: f64,
    pub se_abs_y: Option<f64>,
    pub mean_abs_tau1: f64,
    pub se_abs_tau1: Option<f64>,
    pub replicates: usize,
}

pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>, CliError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == SWEEP_HEADER => {}
        _ => return Err(CliError::Usage(format!("sweep file must start with `{SWEEP_HEADER}`"))),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 11 {
            return Err(bad(i + 1, "expected 11 fields"));
        }
        let ln = i + 1;
        rows.push(SweepRow {
            topology: f[0].parse().map_err(|e| bad(ln, e))?,
            epsilon: parse_f64(f[1], ln)?,
            k_mid: parse_u64(f[2], ln)? as usize,
            k_noise: parse_u64(f[3], ln)? as usize,
            mean_r: parse_f64(f[4], ln)?,
            se_r: parse_opt_f64(f[5], ln)?,
            mean_abs_y: parse_f64(f[6], ln)?,
            se_abs_y: parse_opt_f64(f[7], ln)?,
            mean_abs_tau1: parse_f64(f[8], ln)?,
            se_abs_tau1: parse_opt_f64(f[9], ln)?,
            replicates: parse_u64(f[10], ln)? as usize,
        });
    }
    Ok(rows)
}
