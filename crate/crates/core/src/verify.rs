//! Built-in checks of the τ₁ closed form and the identities behind it.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::circle::{winding_number, wrap, Configuration, Topology};
use crate::dynamics::acca_step;
use crate::error::{usage, Result};
use crate::exec::{map_ordered, ExecMode};
use crate::observables::{alternating_odd_sum, tau1_pair_estimate, tau1_theory};
use crate::rng::{derive_seed, SimRng};
use crate::stats::ks_one_sample;
use crate::Angle;

/// Significance level of the distributional checks.
pub const SIGNIFICANCE: f64 = 0.01;
/// Tolerance on the mean absolute wrapped difference.
pub const MEAN_ABS_TOLERANCE: f64 = 0.005;

/// One line of the τ₁ table.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormRow {
    pub w: i64,
    pub theory: f64,
    pub estimate: f64,
    pub abs_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Tolerance `4/√samples` (per-pair variance is at most one).
pub fn closed_form_tolerance(samples: usize) -> f64 {
    4.0 / (samples as f64).sqrt()
}

/// Monte Carlo τ₁ against the closed form for `W ∈ {-max_w..-1, 1..max_w}`.
pub fn verify_closed_form(max_w: u32, samples: usize, seed: u64, mode: ExecMode) -> Result<Vec<ClosedFormRow>> {
    if max_w == 0 {
        return usage("max_w must be at least 1");
    }
    if samples == 0 {
        return usage("samples must be positive");
    }
    let m = max_w as i64;
    let ws: Vec<i64> = (-m..=-1).chain(1..=m).collect();
    let tolerance = closed_form_tolerance(samples);
    map_ordered(&ws, mode, |&w| {
        let mut rng = SimRng::new(derive_seed(seed, &[w as u64]));
        let theory = tau1_theory(w)?;
        let estimate = tau1_pair_estimate(w, Angle::ZERO, samples, &mut rng)?;
        let abs_error = (estimate - theory).abs();
        Ok(ClosedFormRow { w, theory, estimate, abs_error, tolerance, pass: abs_error <= tolerance })
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub detail: String,
    pub pass: bool,
}

/// The wrapped difference of two independent uniforms is uniform on `[-π, π)`.
pub fn check_wrapped_uniform(samples: usize, rng: &mut SimRng) -> Check {
    let mut d: Vec<f64> = (0..samples)
        .map(|_| wrap(rng.angle_upper_closed() - rng.angle_upper_closed()))
        .collect();
    let ks = ks_one_sample(&mut d, |x| ((x + PI) / TAU).clamp(0.0, 1.0));
    Check {
        name: "wrapped-uniform",
        detail: format!("KS D = {:.6}, p = {:.4} over {samples} samples", ks.statistic, ks.p_value),
        pass: ks.passes(SIGNIFICANCE),
    }
}

/// `sign(wrap(x)) = sign(sin x)` away from multiples of π.
pub fn check_sign_identity(points: usize) -> Check {
    let (lo, hi) = (-20.0 * PI, 20.0 * PI);
    let exclusion = 1e-9;
    let mut tested = 0usize;
    let mut violations = 0usize;
    for k in 0..points {
        let x = lo + (hi - lo) * (k as f64 + 0.5) / points as f64;
        if (x - PI * (x / PI).round()).abs() < exclusion {
            continue;
        }
        tested += 1;
        let w = wrap(x);
        if (w > 0.0) != (x.sin() > 0.0) || w == 0.0 {
            violations += 1;
        }
    }
    Check {
        name: "sign-identity",
        detail: format!("{violations} violations over {tested} grid points"),
        pass: violations == 0 && tested > 0,
    }
}

/// `Σ_{k<w} (-1)^k (2k+1) = (-1)^(w+1) w` for `w = 1..=max_w`.
pub fn check_alternating_sum(max_w: u32) -> Check {
    let bad: Vec<u32> = (1..=max_w)
        .filter(|&w| {
            let expect = if w % 2 == 1 { w as i64 } else { -(w as i64) };
            alternating_odd_sum(w).ok() != Some(expect)
        })
        .collect();
    Check {
        name: "alternating-sum",
        detail: if bad.is_empty() { format!("holds for w = 1..={max_w}") } else { format!("fails for w in {bad:?}") },
        pass: bad.is_empty(),
    }
}

/// `E|wrap(Θ₂ - Θ₁)| = π/2`.
pub fn check_mean_abs_difference(samples: usize, rng: &mut SimRng) -> Check {
    let total: f64 = (0..samples)
        .map(|_| wrap(rng.angle_upper_closed() - rng.angle_upper_closed()).abs())
        .sum();
    let m = total / samples as f64;
    Check {
        name: "mean-abs-difference",
        detail: format!("mean = {m:.6}, π/2 = {FRAC_PI_2:.6}, tolerance {MEAN_ABS_TOLERANCE}"),
        pass: (m - FRAC_PI_2).abs() <= MEAN_ABS_TOLERANCE,
    }
}

/// Random ring state whose increments all have magnitude at most `max_inc`
/// and whose winding number is `w`. `None` when the closing drift is too large.
fn bounded_twist(n: usize, w: i64, max_inc: f64, rng: &mut SimRng) -> Option<Configuration> {
    let spread = 0.75 * max_inc;
    let mut incs: Vec<f64> = (0..n).map(|_| (2.0 * rng.unit() - 1.0) * spread).collect();
    let drift = (TAU * w as f64 - incs.iter().sum::<f64>()) / n as f64;
    for d in incs.iter_mut() {
        *d += drift;
        if d.abs() > max_inc {
            return None;
        }
    }
    let mut acc = rng.angle();
    let angles = incs.iter().map(|d| {
        let a = acc;
        acc += d;
        a
    });
    Configuration::from_angles(angles.collect::<Vec<_>>()).ok()
}

/// One midpoint step never changes W when every increment is within `π/2`.
pub fn check_winding_stability(trials: usize, rng: &mut SimRng) -> Check {
    let mut done = 0usize;
    let mut broken = 0usize;
    while done < trials {
        let n = 3 + rng.below(98);
        let max_w = (n / 16).min(5) as i64;
        let w = rng.below(2 * max_w as usize + 1) as i64 - max_w;
        let Some(mut c) = bounded_twist(n, w, FRAC_PI_2, rng) else {
            continue;
        };
        let topo = Topology::ring(n).expect("n ≥ 3");
        let before = winding_number(&c, &topo).expect("ring");
        acca_step(&mut c, &topo, rng);
        let after = winding_number(&c, &topo).expect("ring");
        if before.rounded != w || after.rounded != before.rounded || !after.is_integral() {
            broken += 1;
        }
        done += 1;
    }
    Check {
        name: "winding-stability",
        detail: format!("{broken} of {trials} single steps changed W"),
        pass: broken == 0,
    }
}

/// Sample sizes of the identity suite.
#[derive(Debug, Clone, Copy)]
pub struct SuiteSizes {
    pub ks_samples: usize,
    pub sign_points: usize,
    pub alternating_max_w: u32,
    pub mean_abs_samples: usize,
    pub stability_trials: usize,
}

impl Default for SuiteSizes {
    fn default() -> Self {
        SuiteSizes {
            ks_samples: 1_000_000,
            sign_points: 100_000,
            alternating_max_w: 50,
            mean_abs_samples: 1_000_000,
            stability_trials: 10_000,
        }
    }
}

/// Runs every identity check, each on its own derived stream.
pub fn identity_suite(sizes: SuiteSizes, seed: u64, mode: ExecMode) -> Vec<Check> {
    let jobs: Vec<u64> = (0..5).collect();
    map_ordered(&jobs, mode, |&job| {
        let mut rng = SimRng::new(derive_seed(seed, &[0xA99E_0D1C, job]));
        match job {
            0 => check_wrapped_uniform(sizes.ks_samples, &mut rng),
            1 => check_sign_identity(sizes.sign_points),
            2 => check_alternating_sum(sizes.alternating_max_w),
            3 => check_mean_abs_difference(sizes.mean_abs_samples, &mut rng),
            _ => check_winding_stability(sizes.stability_trials, &mut rng),
        }
    })
}
