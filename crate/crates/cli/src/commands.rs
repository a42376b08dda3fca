//! Subcommand implementations. Each gathers settings, computes every output
//! in memory and then writes the files, removing them again if a write fails.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use acca_core::exec::ExecMode;
use acca_core::harness::{
    late_time_average, run_conditioned, run_simulation, sweep, Initializer, SimulationParams, SweepConfig, SweepGrid,
    DEFAULT_LATE_FRACTION, DEFAULT_REPLICATES,
};
use acca_core::verify::{identity_suite, verify_closed_form, SuiteSizes};
use acca_core::{StepParams, Topology, TopologyKind};

use crate::config::{check, Settings};
use crate::error::CliError;
use crate::format::{parse_snapshots_csv, parse_sweep_csv, series_csv, snapshots_csv, sweep_csv, sweep_errors};
use crate::svg::{spacetime_svg, sweep_svg, Metric};

pub const RUN_KEYS: &[&str] = &[
    "n", "topology", "epsilon", "k_mid", "k_noise", "steps", "record_stride", "seed", "init", "winding", "alpha",
    "snapshot_times", "heatmap", "condition_winding", "burn_in", "max_attempts", "late_fraction",
];

pub const SWEEP_KEYS: &[&str] = &[
    "n", "topologies", "epsilons", "k_mids", "k_noises", "steps", "record_stride", "seed", "init", "winding", "alpha",
    "replicates", "late_fraction", "threads", "heatmaps",
];

pub const VERIFY_KEYS: &[&str] = &["max_w", "samples", "seed", "threads", "suite"];

/// Default number of burst steps per sweep replicate.
pub const DEFAULT_SWEEP_STEPS: u64 = 1_000_000;

/// Writes all files or none.
pub fn write_all(files: &[(PathBuf, Vec<u8>)]) -> Result<(), CliError> {
    let mut done: Vec<&Path> = Vec::new();
    for (path, bytes) in files {
        let res = (|| {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            let mut f = std::fs::File::create(path)?;
            done.push(path);
            f.write_all(bytes)?;
            f.sync_all()
        })();
        if let Err(e) = res {
            for p in &done {
                let _ = std::fs::remove_file(p);
            }
            return Err(CliError::Runtime(format!("cannot write {}: {e}", path.display())));
        }
    }
    Ok(())
}

fn initializer(s: &Settings) -> Result<Initializer, CliError> {
    match s.get::<String>("init", "uniform".into())?.as_str() {
        "uniform" | "random" => {
            check(s.raw("winding").is_none(), "`winding` needs init = winding")?;
            Ok(Initializer::UniformRandom)
        }
        "winding" | "twist" => {
            let w: i64 = s.get_opt("winding")?.ok_or_else(|| CliError::Usage("init = winding needs `winding`".into()))?;
            let alpha: f64 = s.get("alpha", 0.0)?;
            check(alpha.is_finite(), "alpha must be finite")?;
            Ok(Initializer::WindingLattice { w, alpha })
        }
        other => Err(CliError::Usage(format!("unknown init `{other}`; expected uniform or winding"))),
    }
}

fn exec_mode(s: &Settings) -> Result<ExecMode, CliError> {
    Ok(match s.get_opt::<usize>("threads")? {
        None | Some(0) => ExecMode::Parallel,
        Some(t) => ExecMode::threads(t),
    })
}

fn late_fraction(s: &Settings) -> Result<f64, CliError> {
    let f: f64 = s.get("late_fraction", DEFAULT_LATE_FRACTION)?;
    check(f > 0.0 && f <= 1.0, "late_fraction must lie in (0, 1]")?;
    Ok(f)
}

/// Everything `run` needs, after validation.
#[derive(Debug, Clone)]
pub struct RunPlan {
    pub params: SimulationParams,
    pub heatmap: bool,
    pub condition: Option<(i64, u64, usize)>,
    pub late_fraction: f64,
}

pub fn plan_run(s: &Settings) -> Result<RunPlan, CliError> {
    let n: usize = s.get("n", 100)?;
    let kind: TopologyKind = s.get("topology", TopologyKind::Ring)?;
    let topology = Topology::new(kind, n)?;
    let epsilon: f64 = s.get("epsilon", 0.0)?;
    let step = StepParams { epsilon, k_mid: s.get("k_mid", 1)?, k_noise: s.get("k_noise", 1)? };
    step.validate(&topology)?;
    let steps: u64 = s.get("steps", 100_000)?;
    let record_stride: u64 = s.get("record_stride", n as u64)?;
    check(record_stride >= 1, "record_stride must be at least 1")?;
    let heatmap = s.get_bool("heatmap", false)?;
    let condition = match s.get_opt::<i64>("condition_winding")? {
        None => None,
        Some(w) => {
            check(kind == TopologyKind::Ring, "condition_winding needs a ring")?;
            let burn_in: u64 = s.get("burn_in", steps / 2)?;
            check(burn_in <= steps, "burn_in must not exceed steps")?;
            let attempts: usize = s.get("max_attempts", 100)?;
            check(attempts >= 1, "max_attempts must be at least 1")?;
            Some((w, burn_in, attempts))
        }
    };
    let params = SimulationParams {
        topology,
        step,
        steps,
        record_stride,
        seed: s.get("seed", 1)?,
        initializer: initializer(s)?,
        snapshot_times: s.get_list("snapshot_times", Vec::new())?,
        keep_frames: heatmap,
    };
    params.validate()?;
    Ok(RunPlan { params, heatmap, condition, late_fraction: late_fraction(s)? })
}

/// Runs one simulation and writes `series.csv`, plus `snapshots.csv` and
/// `heatmap.svg` when asked. Returns a short human summary.
pub fn run(s: &Settings, out_dir: &Path) -> Result<String, CliError> {
    let plan = plan_run(s)?;
    let (ts, attempt) = match plan.condition {
        None => (run_simulation(&plan.params)?, None),
        Some((w, burn_in, attempts)) => {
            let (ts, a) = run_conditioned(&plan.params, w, burn_in, attempts)?;
            (ts, Some(a))
        }
    };
    let n = plan.params.n();
    let mut files = vec![(out_dir.join("series.csv"), series_csv(&ts.records).into_bytes())];
    if !plan.params.snapshot_times.is_empty() {
        let rows = ts.snapshots.iter().map(|(t, c)| (*t, c));
        files.push((out_dir.join("snapshots.csv"), snapshots_csv(n, rows).into_bytes()));
    }
    if plan.heatmap {
        let rows: Vec<Vec<f64>> = ts.frames.iter().map(|c| c.as_slice().to_vec()).collect();
        let title = format!("{} N={n} seed={}", ts.topology.kind(), plan.params.seed);
        files.push((out_dir.join("heatmap.svg"), spacetime_svg(&title, &rows).into_bytes()));
    }
    write_all(&files)?;

    let mut msg = String::new();
    if let Some(a) = attempt {
        let _ = writeln!(msg, "conditioned run accepted on attempt {a}");
    }
    if let Some(last) = ts.records.last() {
        let _ = writeln!(msg, "final t={} R={:.6} Y={:.6} tau1={:.6}", last.t, last.r, last.y, last.tau1);
    }
    if let Ok(late) = late_time_average(&ts.records, plan.late_fraction) {
        let _ = writeln!(
            msg,
            "late-time means over {} records: R={:.6} |Y|={:.6} |tau1|={:.6}",
            late.window, late.mean_r, late.mean_abs_y, late.mean_abs_tau1
        );
    }
    for (p, _) in &files {
        let _ = writeln!(msg, "wrote {}", p.display());
    }
    Ok(msg)
}

pub fn plan_sweep(s: &Settings) -> Result<(SweepGrid, SweepConfig, ExecMode, bool), CliError> {
    let reference = SweepGrid::reference();
    let grid = SweepGrid {
        topologies: s.get_list("topologies", reference.topologies)?,
        epsilons: s.get_list("epsilons", reference.epsilons)?,
        k_mids: s.get_list("k_mids", reference.k_mids)?,
        k_noises: s.get_list("k_noises", reference.k_noises)?,
    };
    check(!grid.is_empty(), "sweep grid has no cells")?;
    check(grid.epsilons.iter().all(|e| (0.0..=1.0).contains(e)), "epsilons must lie in [0, 1]")?;
    let n: usize = s.get("n", 100)?;
    check(n >= 3, "n must be at least 3")?;
    let config = SweepConfig {
        n,
        steps: s.get("steps", DEFAULT_SWEEP_STEPS)?,
        record_stride: s.get("record_stride", n as u64)?,
        seed: s.get("seed", 1)?,
        initializer: initializer(s)?,
        replicates: s.get("replicates", DEFAULT_REPLICATES)?,
        late_fraction: late_fraction(s)?,
    };
    check(config.record_stride >= 1, "record_stride must be at least 1")?;
    check(config.replicates >= 1, "replicates must be at least 1")?;
    check(config.steps / config.record_stride >= 1, "steps must cover at least one record stride")?;
    Ok((grid, config, exec_mode(s)?, s.get_bool("heatmaps", true)?))
}

/// Runs the grid and writes `sweep.csv`, `sweep.errors` for failed cells and
/// one heatmap per metric. Failed cells do not abort the sweep.
pub fn run_sweep(s: &Settings, out_dir: &Path) -> Result<String, CliError> {
    let (grid, config, mode, heatmaps) = plan_sweep(s)?;
    let result = sweep(&grid, &config, mode)?;
    let csv = sweep_csv(&result);
    let failures: Vec<_> = result.failures().collect();
    let mut files = vec![(out_dir.join("sweep.csv"), csv.clone().into_bytes())];
    if !failures.is_empty() {
        files.push((out_dir.join("sweep.errors"), sweep_errors(&failures).into_bytes()));
    }
    if heatmaps {
        let rows = parse_sweep_csv(&csv)?;
        for m in Metric::ALL {
            files.push((out_dir.join(format!("heatmap_{}.svg", m.name())), sweep_svg(&rows, m).into_bytes()));
        }
    }
    write_all(&files)?;
    let mut msg = format!("{} cells, {} failed\n", result.outcomes.len(), failures.len());
    for (p, _) in &files {
        let _ = writeln!(msg, "wrote {}", p.display());
    }
    Ok(msg)
}

/// Prints the τ₁ table and the identity checks. `Err(Verification)` when any fail.
pub fn verify_tau(s: &Settings) -> Result<String, CliError> {
    let max_w: u32 = s.get("max_w", 5)?;
    check(max_w >= 1, "max_w must be at least 1")?;
    let samples: usize = s.get("samples", 100_000)?;
    check(samples >= 100, "samples must be at least 100")?;
    let seed: u64 = s.get("seed", 1)?;
    let mode = exec_mode(s)?;
    let suite = s.get_bool("suite", true)?;

    let rows = verify_closed_form(max_w, samples, seed, mode)?;
    let mut out = String::new();
    let _ = writeln!(out, "{:>4} {:>12} {:>12} {:>12} {:>12}  result", "W", "theory", "estimate", "abs_error", "tolerance");
    for r in &rows {
        let _ = writeln!(
            out,
            "{:>4} {:>12.6} {:>12.6} {:>12.6} {:>12.6}  {}",
            r.w,
            r.theory,
            r.estimate,
            r.abs_error,
            r.tolerance,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    let mut failed = rows.iter().filter(|r| !r.pass).count();
    if suite {
        out.push('\n');
        for c in identity_suite(SuiteSizes::default(), seed, mode) {
            let _ = writeln!(out, "{:<20} {}  {}", c.name, if c.pass { "PASS" } else { "FAIL" }, c.detail);
            failed += usize::from(!c.pass);
        }
    }
    if failed > 0 {
        out.push_str(&format!("{failed} check(s) failed\n"));
        return Err(CliError::Verification(out));
    }
    Ok(out)
}

/// Renders a snapshot table to one space-time SVG, or a sweep table to one
/// SVG per metric. The input kind is taken from its header.
pub fn render(input: &Path, out: Option<&Path>) -> Result<String, CliError> {
    let text = std::fs::read_to_string(input).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", input.display())))?;
    let files: Vec<(PathBuf, Vec<u8>)> = if text.starts_with("t,theta_1") {
        let rows = parse_snapshots_csv(&text)?;
        check(!rows.is_empty(), "snapshot file has no rows")?;
        let grid: Vec<Vec<f64>> = rows.into_iter().map(|(_, a)| a).collect();
        let target = out.map(Path::to_path_buf).unwrap_or_else(|| input.with_extension("svg"));
        vec![(target, spacetime_svg(&input.display().to_string(), &grid).into_bytes())]
    } else if text.starts_with("topology,") {
        let rows = parse_sweep_csv(&text)?;
        check(!rows.is_empty(), "sweep file has no rows")?;
        let dir = out.map(Path::to_path_buf).unwrap_or_else(|| input.parent().unwrap_or(Path::new(".")).to_path_buf());
        Metric::ALL
            .iter()
            .map(|&m| (dir.join(format!("heatmap_{}.svg", m.name())), sweep_svg(&rows, m).into_bytes()))
            .collect()
    } else {
        return Err(CliError::Usage(format!("{}: neither a snapshot nor a sweep table", input.display())));
    };
    write_all(&files)?;
    Ok(files.iter().map(|(p, _)| format!("wrote {}\n", p.display())).collect())
}
