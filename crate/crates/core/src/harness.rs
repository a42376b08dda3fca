//! Trajectory runner, late-time averaging and the burst-parameter sweep.
//!
//! Every trajectory uses the burst stepper; `k_mid = k_noise = 1` is the
//! sequential noisy rule and `epsilon = 0` switches the noise off.

use std::collections::BTreeSet;

use crate::circle::{winding_of_ring, Configuration, Topology, TopologyKind};
use crate::dynamics::{ParallelStepper, StepParams};
use crate::error::{usage, Result};
use crate::exec::{map_ordered, ExecMode};
use crate::observables::{ideal_winding_lattice, kuramoto_of, y_of, Tau1Kernel, WindingSpec};
use crate::rng::{derive_seed, SimRng};
use crate::stats::{mean, standard_error};

/// Fraction of records averaged for late-time values unless told otherwise.
pub const DEFAULT_LATE_FRACTION: f64 = 0.2;
/// Replicates per sweep cell unless told otherwise.
pub const DEFAULT_REPLICATES: usize = 8;
/// Moving-average window (in records) for flip-flop detection.
pub const FLIP_WINDOW: usize = 50;
/// `|Y|` a smoothed series must exceed to count as sitting on a plateau.
pub const FLIP_BAND: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Initializer {
    /// I.i.d. uniform angles on `[-π, π)`.
    UniformRandom,
    /// Lattice twist `Φ_i = α + W·2πi/N`.
    WindingLattice { w: i64, alpha: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationParams {
    pub topology: Topology,
    pub step: StepParams,
    /// Total number of time steps.
    pub steps: u64,
    /// Steps between recorded observables.
    pub record_stride: u64,
    pub seed: u64,
    pub initializer: Initializer,
    /// Times at which full configurations are kept.
    pub snapshot_times: Vec<u64>,
    /// Keep the configuration of every record (needed for heatmaps).
    pub keep_frames: bool,
}

impl SimulationParams {
    /// Sequential rule (`k_mid = k_noise = 1`), stride one sweep, random start.
    pub fn new(topology: Topology, epsilon: f64, steps: u64, seed: u64) -> Self {
        SimulationParams {
            topology,
            step: StepParams::sequential(epsilon),
            steps,
            record_stride: topology.n() as u64,
            seed,
            initializer: Initializer::UniformRandom,
            snapshot_times: Vec::new(),
            keep_frames: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.step.validate(&self.topology)?;
        if self.record_stride == 0 {
            return usage("record_stride must be at least 1");
        }
        if let Initializer::WindingLattice { alpha, .. } = self.initializer {
            if !alpha.is_finite() {
                return usage("winding offset alpha must be finite");
            }
        }
        if let Some(&t) = self.snapshot_times.iter().find(|&&t| t > self.steps) {
            return usage(format!("snapshot time {t} is past the last step {}", self.steps));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.topology.n()
    }
}

/// Observables of one recorded configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub t: u64,
    pub r: f64,
    /// Mean phase; `None` when `r` is numerically zero.
    pub psi: Option<f64>,
    pub y: f64,
    pub tau1: f64,
    /// Rounded winding number. Always `None` on the path.
    pub winding: Option<i64>,
}

/// Computes [`Record`]s for one topology, reusing the τ₁ weights.
#[derive(Debug, Clone)]
pub struct Observer {
    ring: bool,
    kernel: Tau1Kernel,
}

impl Observer {
    pub fn new(topology: &Topology) -> Self {
        Observer {
            ring: topology.is_ring(),
            kernel: Tau1Kernel::new(topology.n()).expect("topologies have at least 2 sites"),
        }
    }

    pub fn observe(&self, t: u64, c: &Configuration) -> Record {
        let theta = c.as_slice();
        let k = kuramoto_of(theta);
        Record {
            t,
            r: k.r,
            psi: k.psi.map(|a| a.value()),
            y: y_of(theta),
            tau1: self.kernel.eval(theta),
            winding: self.ring.then(|| winding_of_ring(theta).rounded),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub topology: Topology,
    pub records: Vec<Record>,
    pub snapshots: Vec<(u64, Configuration)>,
    /// One configuration per record when `keep_frames` was set, else empty.
    pub frames: Vec<Configuration>,
    pub final_config: Configuration,
}

impl TimeSeries {
    pub fn ys(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.y).collect()
    }
}

/// Initial configuration; random starts draw `n` angles from `rng`.
pub fn initial_configuration(topology: &Topology, init: Initializer, rng: &mut SimRng) -> Result<Configuration> {
    let n = topology.n();
    match init {
        Initializer::UniformRandom => Configuration::from_angles((0..n).map(|_| rng.angle()).collect::<Vec<_>>()),
        Initializer::WindingLattice { w, alpha } => {
            if n < 3 {
                return usage("winding initial conditions need at least 3 sites");
            }
            Ok(ideal_winding_lattice(n, WindingSpec::new(w, alpha)?)?.config)
        }
    }
}

/// Runs `params.steps` burst steps, recording every `record_stride` steps and at `t = 0`.
pub fn run_simulation(params: &SimulationParams) -> Result<TimeSeries> {
    params.validate()?;
    let topo = params.topology;
    let mut rng = SimRng::new(params.seed);
    let mut c = initial_configuration(&topo, params.initializer, &mut rng)?;
    let mut stepper = ParallelStepper::new(topo, params.step)?;
    let observer = Observer::new(&topo);
    let snap_at: BTreeSet<u64> = params.snapshot_times.iter().copied().collect();

    let capacity = (params.steps / params.record_stride) as usize + 1;
    let mut records = Vec::with_capacity(capacity);
    let mut frames = Vec::with_capacity(if params.keep_frames { capacity } else { 0 });
    let mut snapshots = Vec::with_capacity(snap_at.len());

    let mut keep = |t: u64, c: &Configuration, records: &mut Vec<Record>| {
        if t.is_multiple_of(params.record_stride) {
            records.push(observer.observe(t, c));
            if params.keep_frames {
                frames.push(c.clone());
            }
        }
        if snap_at.contains(&t) {
            snapshots.push((t, c.clone()));
        }
    };

    keep(0, &c, &mut records);
    for t in 1..=params.steps {
        stepper.step(&mut c, &mut rng);
        keep(t, &c, &mut records);
    }
    Ok(TimeSeries { topology: topo, records, snapshots, frames, final_config: c })
}

/// Steps until `R` exceeds `threshold` (checked every `record_stride` steps)
/// or `max_steps` pass. Returns the first checked time above the threshold.
pub fn run_until_consensus(params: &SimulationParams, threshold: f64, max_steps: u64) -> Result<Option<u64>> {
    params.validate()?;
    let topo = params.topology;
    let mut rng = SimRng::new(params.seed);
    let mut c = initial_configuration(&topo, params.initializer, &mut rng)?;
    let mut stepper = ParallelStepper::new(topo, params.step)?;
    if kuramoto_of(c.as_slice()).r > threshold {
        return Ok(Some(0));
    }
    for t in 1..=max_steps {
        stepper.step(&mut c, &mut rng);
        if t.is_multiple_of(params.record_stride) && kuramoto_of(c.as_slice()).r > threshold {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// Retries derived seeds until the ring's winding number at the first record
/// at or after `burn_in` equals `target`. Returns the run and the attempt index.
pub fn run_conditioned(params: &SimulationParams, target: i64, burn_in: u64, max_attempts: usize) -> Result<(TimeSeries, usize)> {
    if !params.topology.is_ring() {
        return usage("conditioning on the winding number needs a ring");
    }
    if burn_in > params.steps {
        return usage("burn-in is longer than the run");
    }
    for attempt in 0..max_attempts {
        let mut p = params.clone();
        p.seed = derive_seed(params.seed, &[0xC0DD, attempt as u64]);
        let ts = run_simulation(&p)?;
        let hit = ts.records.iter().find(|r| r.t >= burn_in).and_then(|r| r.winding);
        if hit == Some(target) {
            return Ok((ts, attempt));
        }
    }
    usage(format!("no run landed in winding sector {target} after {max_attempts} attempts"))
}

/// Late-time means of `R`, `|Y|` and `|τ₁|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LateTime {
    pub mean_r: f64,
    pub mean_abs_y: f64,
    pub mean_abs_tau1: f64,
    /// Records in the window.
    pub window: usize,
}

/// Averages over the final `fraction` of records (at least two).
pub fn late_time_average(records: &[Record], fraction: f64) -> Result<LateTime> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return usage(format!("late-time fraction must be in (0, 1], got {fraction}"));
    }
    let window = ((records.len() as f64) * fraction).ceil() as usize;
    if window < 2 {
        return usage(format!("late-time window holds {window} records; need at least 2"));
    }
    let tail = &records[records.len() - window..];
    let avg = |f: &dyn Fn(&Record) -> f64| tail.iter().map(f).sum::<f64>() / window as f64;
    Ok(LateTime {
        mean_r: avg(&|r| r.r),
        mean_abs_y: avg(&|r| r.y.abs()),
        mean_abs_tau1: avg(&|r| r.tau1.abs()),
        window,
    })
}

/// Plateau switching of a `Y` series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlipFlop {
    /// Switches between a `+band` and a `-band` plateau.
    pub sign_changes: usize,
    /// Number of distinct plateau visits (sign changes + 1 once any plateau is reached).
    pub plateaus: usize,
}

/// Trailing moving average over `window` entries (shorter at the start).
pub fn moving_average(xs: &[f64], window: usize) -> Vec<f64> {
    let window = window.max(1);
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        acc += x;
        if i >= window {
            acc -= xs[i - window];
        }
        out.push(acc / (i + 1).min(window) as f64);
    }
    out
}

/// Counts plateau switches of the smoothed series with hysteresis `|Y| > band`.
pub fn flip_flop(ys: &[f64], window: usize, band: f64) -> FlipFlop {
    let mut state = 0i8;
    let mut sign_changes = 0;
    let mut plateaus = 0;
    for s in moving_average(ys, window) {
        let next = if s > band {
            1
        } else if s < -band {
            -1
        } else {
            continue;
        };
        if next != state {
            if state != 0 {
                sign_changes += 1;
            }
            plateaus += 1;
            state = next;
        }
    }
    FlipFlop { sign_changes, plateaus }
}

/// Axes of a burst-parameter sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub topologies: Vec<TopologyKind>,
    pub epsilons: Vec<f64>,
    pub k_mids: Vec<usize>,
    pub k_noises: Vec<usize>,
}

impl SweepGrid {
    /// `k_mid ∈ {1,10,20,40}`, `k_noise ∈ {0,1,10,20,40}`, `ε ∈ {0.002, 0.02}`, both topologies.
    pub fn reference() -> Self {
        SweepGrid {
            topologies: vec![TopologyKind::Path, TopologyKind::Ring],
            epsilons: vec![0.002, 0.02],
            k_mids: vec![1, 10, 20, 40],
            k_noises: vec![0, 1, 10, 20, 40],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.topologies.is_empty() || self.epsilons.is_empty() || self.k_mids.is_empty() || self.k_noises.is_empty()
    }

    /// Cells in row-major order: topology, epsilon, k_mid, k_noise.
    pub fn cells(&self) -> Vec<SweepCell> {
        let mut cells = Vec::new();
        for &topology in &self.topologies {
            for &epsilon in &self.epsilons {
                for &k_mid in &self.k_mids {
                    for &k_noise in &self.k_noises {
                        cells.push(SweepCell { topology, epsilon, k_mid, k_noise });
                    }
                }
            }
        }
        cells
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub topology: TopologyKind,
    pub epsilon: f64,
    pub k_mid: usize,
    pub k_noise: usize,
}

impl SweepCell {
    /// Seed of one replicate, a function of the cell's coordinates only.
    pub fn replicate_seed(&self, base: u64, replicate: usize) -> u64 {
        let kind = match self.topology {
            TopologyKind::Path => 0,
            TopologyKind::Ring => 1,
        };
        derive_seed(base, &[kind, self.epsilon.to_bits(), self.k_mid as u64, self.k_noise as u64, replicate as u64])
    }
}

/// Settings shared by every sweep cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub n: usize,
    pub steps: u64,
    pub record_stride: u64,
    pub seed: u64,
    pub initializer: Initializer,
    pub replicates: usize,
    pub late_fraction: f64,
}

impl SweepConfig {
    pub fn new(n: usize, steps: u64, seed: u64) -> Self {
        SweepConfig {
            n,
            steps,
            record_stride: n as u64,
            seed,
            initializer: Initializer::UniformRandom,
            replicates: DEFAULT_REPLICATES,
            late_fraction: DEFAULT_LATE_FRACTION,
        }
    }

    fn params_for(&self, cell: &SweepCell, replicate: usize) -> Result<SimulationParams> {
        let topology = Topology::new(cell.topology, self.n)?;
        Ok(SimulationParams {
            topology,
            step: StepParams { epsilon: cell.epsilon, k_mid: cell.k_mid, k_noise: cell.k_noise },
            steps: self.steps,
            record_stride: self.record_stride,
            seed: cell.replicate_seed(self.seed, replicate),
            initializer: self.initializer,
            snapshot_times: Vec::new(),
            keep_frames: false,
        })
    }
}

/// Replicate statistics of one cell. Standard errors are `None` for one replicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSummary {
    pub mean_r: f64,
    pub se_r: Option<f64>,
    pub mean_abs_y: f64,
    pub se_abs_y: Option<f64>,
    pub mean_abs_tau1: f64,
    pub se_abs_tau1: Option<f64>,
    pub replicates: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub cell: SweepCell,
    pub result: std::result::Result<CellSummary, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub outcomes: Vec<CellOutcome>,
}

impl SweepResult {
    pub fn failures(&self) -> impl Iterator<Item = &CellOutcome> {
        self.outcomes.iter().filter(|o| o.result.is_err())
    }

    pub fn get(&self, topology: TopologyKind, epsilon: f64, k_mid: usize, k_noise: usize) -> Option<&CellOutcome> {
        self.outcomes.iter().find(|o| {
            o.cell.topology == topology && o.cell.epsilon == epsilon && o.cell.k_mid == k_mid && o.cell.k_noise == k_noise
        })
    }
}

/// Runs every cell and replicate. Output is independent of `mode`.
pub fn sweep(grid: &SweepGrid, config: &SweepConfig, mode: ExecMode) -> Result<SweepResult> {
    if grid.is_empty() {
        return usage("sweep grid is empty");
    }
    if config.replicates == 0 {
        return usage("replicates must be at least 1");
    }
    if !(config.late_fraction > 0.0 && config.late_fraction <= 1.0) {
        return usage(format!("late-time fraction must be in (0, 1], got {}", config.late_fraction));
    }
    let cells = grid.cells();
    let jobs: Vec<(usize, usize)> =
        (0..cells.len()).flat_map(|c| (0..config.replicates).map(move |r| (c, r))).collect();
    let results = map_ordered(&jobs, mode, |&(c, r)| -> Result<LateTime> {
        let params = config.params_for(&cells[c], r)?;
        let ts = run_simulation(&params)?;
        late_time_average(&ts.records, config.late_fraction)
    });

    let outcomes = cells
        .iter()
        .zip(results.chunks(config.replicates))
        .map(|(cell, reps)| {
            let result = match reps.iter().find_map(|r| r.as_ref().err()) {
                Some(e) => Err(e.to_string()),
                None => {
                    let vals: Vec<&LateTime> = reps.iter().map(|r| r.as_ref().expect("checked")).collect();
                    let col = |f: fn(&LateTime) -> f64| vals.iter().map(|v| f(v)).collect::<Vec<_>>();
                    let (r, y, t) = (col(|v| v.mean_r), col(|v| v.mean_abs_y), col(|v| v.mean_abs_tau1));
                    Ok(CellSummary {
                        mean_r: mean(&r).expect("replicates ≥ 1"),
                        se_r: standard_error(&r),
                        mean_abs_y: mean(&y).expect("replicates ≥ 1"),
                        se_abs_y: standard_error(&y),
                        mean_abs_tau1: mean(&t).expect("replicates ≥ 1"),
                        se_abs_tau1: standard_error(&t),
                        replicates: vals.len(),
                    })
                }
            };
            CellOutcome { cell: *cell, result }
        })
        .collect();
    Ok(SweepResult { outcomes })
}
