//! Order parameters: Kuramoto modulus and phase, the orientation projection
//! `Y`, and the weighted toroidal Kendall coefficient τ₁.
//!
//! τ₁ of a configuration pairs each opinion with its site position on the
//! ring, `Θ_i = wrap(2π i / N)`. With that embedding a lattice twist of
//! winding `W` has τ₁ close to `(-1)^(W+1) / W`.

use std::f64::consts::TAU;

use crate::circle::{wrap, Angle, Configuration};
use crate::error::{usage, Error, Result};
use crate::rng::SimRng;

/// Below this modulus the mean phase is not reported.
pub const PSI_UNDEFINED_BELOW: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KuramotoOrder {
    pub r: f64,
    /// `None` when `r` is below [`PSI_UNDEFINED_BELOW`].
    pub psi: Option<Angle>,
}

pub fn kuramoto(c: &Configuration) -> KuramotoOrder {
    kuramoto_of(c.as_slice())
}

pub(crate) fn kuramoto_of(theta: &[f64]) -> KuramotoOrder {
    let n = theta.len() as f64;
    let (s, co) = theta.iter().fold((0.0, 0.0), |(s, c), &t| {
        let (st, ct) = t.sin_cos();
        (s + st, c + ct)
    });
    let (re, im) = (co / n, s / n);
    let r = re.hypot(im).min(1.0);
    let psi = (r >= PSI_UNDEFINED_BELOW).then(|| Angle::new(im.atan2(re)).expect("finite phase"));
    KuramotoOrder { r, psi }
}

/// Mean of `sin θ`: +1 when everything sits at π/2, -1 at -π/2.
pub fn y_projection(c: &Configuration) -> f64 {
    y_of(c.as_slice())
}

pub(crate) fn y_of(theta: &[f64]) -> f64 {
    theta.iter().map(|t| t.sin()).sum::<f64>() / theta.len() as f64
}

#[inline]
fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Winding number and phase offset of an ideal twisted configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindingSpec {
    pub w: i64,
    pub alpha: Angle,
}

impl WindingSpec {
    pub fn new(w: i64, alpha: f64) -> Result<Self> {
        Ok(WindingSpec { w, alpha: Angle::new(alpha)? })
    }

    #[inline]
    fn phase(&self, site_phase: f64) -> f64 {
        wrap(self.alpha.value() + self.w as f64 * site_phase)
    }
}

/// Site phases `Θ` and the twisted opinions `Φ = α + WΘ (mod 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealWinding {
    pub site_phases: Vec<f64>,
    pub config: Configuration,
}

/// Deterministic twist: `Θ_i = wrap(2π i / n)` for `i = 1..=n`.
pub fn ideal_winding_lattice(n: usize, spec: WindingSpec) -> Result<IdealWinding> {
    if n < 3 {
        return usage(format!("a winding configuration needs at least 3 sites, got {n}"));
    }
    let site_phases: Vec<f64> = (1..=n).map(|i| lattice_phase(i, n)).collect();
    let config = Configuration::from_canonical(site_phases.iter().map(|&t| spec.phase(t)).collect());
    Ok(IdealWinding { site_phases, config })
}

/// Random twist: `Θ_i` i.i.d. uniform on `(-π, π]`.
pub fn ideal_winding_iid(n: usize, spec: WindingSpec, rng: &mut SimRng) -> Result<IdealWinding> {
    if n < 3 {
        return usage(format!("a winding configuration needs at least 3 sites, got {n}"));
    }
    let site_phases: Vec<f64> = (0..n).map(|_| rng.angle_upper_closed()).collect();
    let config = Configuration::from_canonical(site_phases.iter().map(|&t| spec.phase(t)).collect());
    Ok(IdealWinding { site_phases, config })
}

#[inline]
fn lattice_phase(i: usize, n: usize) -> f64 {
    wrap(TAU * i as f64 / n as f64)
}

/// τ₁ over all ordered pairs of `(Θ_i, Φ_i)` samples.
///
/// Returns a numeric error when every `Θ` difference vanishes.
pub fn tau1_pairs(site_phases: &[f64], opinions: &[f64]) -> Result<f64> {
    if site_phases.len() != opinions.len() {
        return usage("site phases and opinions differ in length");
    }
    let n = site_phases.len();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = wrap(site_phases[j] - site_phases[i]);
            num += d * sign(wrap(opinions[j] - opinions[i]));
            den += d.abs();
        }
    }
    ratio(num, den)
}

/// τ₁ from `budget` uniformly drawn ordered pairs `i ≠ j`, for large N.
pub fn tau1_pairs_subsampled(site_phases: &[f64], opinions: &[f64], budget: usize, rng: &mut SimRng) -> Result<f64> {
    if site_phases.len() != opinions.len() {
        return usage("site phases and opinions differ in length");
    }
    let n = site_phases.len();
    if n < 2 || budget == 0 {
        return usage("need at least two samples and a positive pair budget");
    }
    let (mut num, mut den) = (0.0, 0.0);
    for _ in 0..budget {
        let i = rng.below(n);
        let mut j = rng.below(n - 1);
        if j >= i {
            j += 1;
        }
        let d = wrap(site_phases[j] - site_phases[i]);
        num += d * sign(wrap(opinions[j] - opinions[i]));
        den += d.abs();
    }
    ratio(num, den)
}

fn ratio(num: f64, den: f64) -> Result<f64> {
    if den <= 0.0 {
        return Err(Error::Numeric("τ₁ denominator is zero".into()));
    }
    Ok(num / den)
}

/// Precomputed site-embedding weights for τ₁ of configurations on `n` sites.
#[derive(Debug, Clone)]
pub struct Tau1Kernel {
    /// `weights[d]` is the Θ difference for index offset `d`, reduced exactly:
    /// offsets at or past `n/2` map to negative arcs, so `d = n/2` weighs `-π`.
    weights: Vec<f64>,
    denominator: f64,
}

impl Tau1Kernel {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return usage(format!("τ₁ needs at least 2 sites, got {n}"));
        }
        let weights: Vec<f64> = (0..n)
            .map(|d| if 2 * d >= n { -TAU * (n - d) as f64 / n as f64 } else { TAU * d as f64 / n as f64 })
            .collect();
        let denominator = n as f64 * weights[1..].iter().map(|w| w.abs()).sum::<f64>();
        Ok(Tau1Kernel { weights, denominator })
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    /// Panics if `theta.len()` differs from the kernel size.
    pub fn eval(&self, theta: &[f64]) -> f64 {
        let n = self.weights.len();
        assert_eq!(theta.len(), n, "τ₁ kernel size mismatch");
        let mut num = 0.0;
        for (i, &ti) in theta.iter().enumerate() {
            for (d, &tj) in theta[i + 1..].iter().enumerate().map(|(k, t)| (k + 1, t)) {
                let x = tj - ti;
                num += self.weights[d] * sign(wrap(x)) + self.weights[n - d] * sign(wrap(-x));
            }
        }
        num / self.denominator
    }
}

/// τ₁ of a configuration with sites embedded at `Θ_i = wrap(2π i / N)`.
pub fn tau1_config(c: &Configuration) -> f64 {
    Tau1Kernel::new(c.len()).expect("configurations have at least 2 sites").eval(c.as_slice())
}

/// Monte Carlo τ₁ for the ideal twist, from `samples` independent pairs.
pub fn tau1_pair_estimate(w: i64, alpha: Angle, samples: usize, rng: &mut SimRng) -> Result<f64> {
    if samples == 0 {
        return usage("need at least one sample pair");
    }
    let spec = WindingSpec { w, alpha };
    let (mut num, mut den) = (0.0, 0.0);
    for _ in 0..samples {
        let t1 = rng.angle_upper_closed();
        let t2 = rng.angle_upper_closed();
        let d = wrap(t2 - t1);
        num += d * sign(wrap(spec.phase(t2) - spec.phase(t1)));
        den += d.abs();
    }
    ratio(num, den)
}

/// Closed form `(-1)^(W+1) / W` for the ideal twist.
pub fn tau1_theory(w: i64) -> Result<f64> {
    if w == 0 {
        return Err(Error::Domain("τ₁ of the ideal twist is only defined for W ≠ 0".into()));
    }
    let s = if w.rem_euclid(2) == 1 { 1.0 } else { -1.0 };
    Ok(s / w as f64)
}

/// `Σ_{k=0}^{w-1} (-1)^k (2k+1)`, summed term by term.
pub fn alternating_odd_sum(w: u32) -> Result<i64> {
    if w == 0 {
        return usage("alternating sum needs w ≥ 1");
    }
    Ok((0..w as i64).map(|k| if k % 2 == 0 { 2 * k + 1 } else { -(2 * k + 1) }).sum())
}
