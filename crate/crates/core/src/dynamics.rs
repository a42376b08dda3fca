//! Update rules: the sequential midpoint step, the midpoint step followed by
//! one bi-modal noise kick, and the burst step acting on a uniform matching
//! and a uniform site subset.
//!
//! Random draws happen in a fixed order so a seed pins the trajectory:
//! midpoint edge(s) first, then the noise site(s), then one target per
//! noisy site in ascending site order.

use std::f64::consts::PI;

use crate::circle::{circ_increment, wrap, Configuration, Topology};
use crate::error::{usage, Result};
use crate::matching::{MatchingSampler, SubsetSampler};
use crate::rng::SimRng;

/// Noise target: `0` or the antipode (stored as `-π`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Zero,
    Antipode,
}

impl Target {
    #[inline]
    pub fn angle(self) -> f64 {
        match self {
            Target::Zero => 0.0,
            Target::Antipode => -PI,
        }
    }

    #[inline]
    fn draw(rng: &mut SimRng) -> Self {
        if rng.coin() {
            Target::Antipode
        } else {
            Target::Zero
        }
    }
}

/// Noise strength and burst sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepParams {
    pub epsilon: f64,
    pub k_mid: usize,
    pub k_noise: usize,
}

impl StepParams {
    /// Single midpoint move and single noise kick per step.
    pub fn sequential(epsilon: f64) -> Self {
        StepParams { epsilon, k_mid: 1, k_noise: 1 }
    }

    pub fn validate(&self, topo: &Topology) -> Result<()> {
        check_epsilon(self.epsilon)?;
        if self.k_mid < 1 {
            return usage("k_mid must be at least 1");
        }
        if self.k_mid > topo.max_matching() {
            return usage(format!(
                "k_mid = {} exceeds the largest matching ({}) of a {} on {} sites",
                self.k_mid,
                topo.max_matching(),
                topo.kind(),
                topo.n()
            ));
        }
        if self.k_noise > topo.n() {
            return usage(format!("k_noise = {} exceeds the site count {}", self.k_noise, topo.n()));
        }
        Ok(())
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&epsilon) {
        return usage(format!("epsilon must lie in [0, 1], got {epsilon}"));
    }
    Ok(())
}

#[inline]
fn midpoint_in_place(theta: &mut [f64], i: usize, j: usize) {
    let half = 0.5 * circ_increment(theta[i], theta[j]);
    theta[i] = wrap(theta[i] + half);
    theta[j] = wrap(theta[j] - half);
}

#[inline]
fn kick_in_place(theta: &mut [f64], k: usize, target: Target, epsilon: f64) {
    theta[k] = wrap(theta[k] + epsilon * circ_increment(theta[k], target.angle()));
}

/// Moves sites `i` and `j` to their midpoint along the shortest arc.
pub fn midpoint_update(c: &Configuration, topo: &Topology, edge: (usize, usize)) -> Result<Configuration> {
    let (i, j) = edge;
    if c.len() != topo.n() {
        return usage(format!("configuration has {} sites, topology has {}", c.len(), topo.n()));
    }
    if !topo.has_edge(i, j) {
        return usage(format!("({i}, {j}) is not an edge of the {} on {} sites", topo.kind(), topo.n()));
    }
    let mut out = c.clone();
    midpoint_in_place(out.as_mut_slice(), i, j);
    Ok(out)
}

/// Moves `site` a fraction `epsilon` of the shortest arc toward `target`.
pub fn noise_kick(c: &Configuration, site: usize, target: Target, epsilon: f64) -> Result<Configuration> {
    check_epsilon(epsilon)?;
    if site >= c.len() {
        return usage(format!("site {site} out of range for {} sites", c.len()));
    }
    let mut out = c.clone();
    kick_in_place(out.as_mut_slice(), site, target, epsilon);
    Ok(out)
}

/// One midpoint move on a uniformly chosen edge. One draw.
pub fn acca_step(c: &mut Configuration, topo: &Topology, rng: &mut SimRng) {
    debug_assert_eq!(c.len(), topo.n());
    let (i, j) = topo.edge(rng.below(topo.edge_count()));
    midpoint_in_place(c.as_mut_slice(), i, j);
}

/// Midpoint move then one noise kick at a uniform site toward a uniform target.
/// Three draws: edge, site, target.
pub fn noisy_step(c: &mut Configuration, topo: &Topology, epsilon: f64, rng: &mut SimRng) {
    debug_assert!((0.0..=1.0).contains(&epsilon));
    acca_step(c, topo, rng);
    let k = rng.below(topo.n());
    let target = Target::draw(rng);
    kick_in_place(c.as_mut_slice(), k, target, epsilon);
}

/// Burst stepper with preallocated sampling buffers.
#[derive(Debug, Clone)]
pub struct ParallelStepper {
    topo: Topology,
    params: StepParams,
    matchings: MatchingSampler,
    subsets: SubsetSampler,
    edges: Vec<(usize, usize)>,
    sites: Vec<usize>,
}

impl ParallelStepper {
    pub fn new(topo: Topology, params: StepParams) -> Result<Self> {
        params.validate(&topo)?;
        Ok(ParallelStepper {
            topo,
            params,
            matchings: MatchingSampler::new(topo, params.k_mid)?,
            subsets: SubsetSampler::new(topo.n(), params.k_noise)?,
            edges: Vec::with_capacity(params.k_mid),
            sites: Vec::with_capacity(params.k_noise),
        })
    }

    pub fn topology(&self) -> &Topology {
        &self.topo
    }

    pub fn params(&self) -> &StepParams {
        &self.params
    }

    /// Advances `c` by one time step.
    pub fn step(&mut self, c: &mut Configuration, rng: &mut SimRng) {
        debug_assert_eq!(c.len(), self.topo.n());
        self.matchings.sample_into(rng, &mut self.edges);
        let theta = c.as_mut_slice();
        // Edges are disjoint, so in-place updates read only pre-step values.
        for &(i, j) in &self.edges {
            midpoint_in_place(theta, i, j);
        }
        if self.params.k_noise == 0 {
            return;
        }
        self.subsets.sample_into(rng, &mut self.sites);
        let eps = self.params.epsilon;
        for &k in &self.sites {
            kick_in_place(theta, k, Target::draw(rng), eps);
        }
    }

    /// Last sampled midpoint edges.
    pub fn last_edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Last sampled noise sites.
    pub fn last_sites(&self) -> &[usize] {
        &self.sites
    }
}

/// One burst step. Builds a fresh [`ParallelStepper`]; loops should keep one around instead.
pub fn parallel_step(c: &mut Configuration, topo: &Topology, params: &StepParams, rng: &mut SimRng) -> Result<()> {
    if c.len() != topo.n() {
        return usage(format!("configuration has {} sites, topology has {}", c.len(), topo.n()));
    }
    ParallelStepper::new(*topo, *params)?.step(c, rng);
    Ok(())
}

/// Applies midpoint moves on `edges`, each computed from the input configuration.
pub fn parallel_midpoint(c: &Configuration, edges: &[(usize, usize)]) -> Configuration {
    let src = c.as_slice();
    let mut out = src.to_vec();
    for &(i, j) in edges {
        let half = 0.5 * circ_increment(src[i], src[j]);
        out[i] = wrap(src[i] + half);
        out[j] = wrap(src[j] - half);
    }
    Configuration::from_canonical(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{winding_number, TopologyKind};
    use crate::error::Error;
    use crate::matching::sample_matching;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

    fn circ_close(a: f64, b: f64, tol: f64) -> bool {
        circ_increment(a, b).abs() < tol
    }

    #[test]
    fn midpoint_examples() {
        let topo = Topology::path(2).unwrap();
        let c = Configuration::from_angles([0.0, FRAC_PI_2]).unwrap();
        let m = midpoint_update(&c, &topo, (0, 1)).unwrap();
        assert!((m.get(0).value() - FRAC_PI_4).abs() < 1e-15);
        assert!((m.get(1).value() - FRAC_PI_4).abs() < 1e-15);

        let c = Configuration::from_angles([0.9 * PI, -0.9 * PI]).unwrap();
        let m = midpoint_update(&c, &topo, (0, 1)).unwrap();
        assert!(circ_close(m.get(0).value(), -PI, 1e-12));
        assert!(circ_close(m.get(1).value(), -PI, 1e-12));
        assert!(m.is_canonical());

        let c = Configuration::constant(2, 1.1).unwrap();
        assert_eq!(midpoint_update(&c, &topo, (0, 1)).unwrap(), c);
    }

    #[test]
    fn midpoint_rejects_non_edges() {
        let c = Configuration::constant(5, 0.0).unwrap();
        let path = Topology::path(5).unwrap();
        assert!(matches!(midpoint_update(&c, &path, (0, 4)), Err(Error::Usage(_))));
        assert!(matches!(midpoint_update(&c, &path, (1, 3)), Err(Error::Usage(_))));
        assert!(midpoint_update(&c, &Topology::ring(5).unwrap(), (4, 0)).is_ok());
    }

    #[test]
    fn midpoint_closes_the_gap() {
        let mut rng = SimRng::new(21);
        let topo = Topology::ring(10).unwrap();
        for _ in 0..10_000 {
            let c = Configuration::from_angles((0..10).map(|_| rng.angle())).unwrap();
            let e = topo.edge(rng.below(10));
            let m = midpoint_update(&c, &topo, e).unwrap();
            assert!(circ_increment(m.get(e.0).value(), m.get(e.1).value()).abs() < 1e-12);
            assert!(m.is_canonical());
        }
    }

    #[test]
    fn noise_kick_examples() {
        let c = Configuration::from_angles([FRAC_PI_2, 0.0]).unwrap();
        let k = noise_kick(&c, 0, Target::Zero, 0.35).unwrap();
        assert!((k.get(0).value() - 0.325 * PI).abs() < 1e-12);
        assert_eq!(k.get(1).value(), 0.0);
        // toward the antipode: the short way from π/2 to π is +π/2
        let k = noise_kick(&c, 0, Target::Antipode, 0.35).unwrap();
        assert!((k.get(0).value() - 0.675 * PI).abs() < 1e-12);

        assert_eq!(noise_kick(&c, 0, Target::Zero, 0.0).unwrap(), c);
        for eps in [0.0, 0.3, 1.0] {
            assert_eq!(noise_kick(&c, 1, Target::Zero, eps).unwrap().get(1).value(), 0.0);
        }
        assert!(matches!(noise_kick(&c, 0, Target::Zero, 1.5), Err(Error::Usage(_))));
        assert!(matches!(noise_kick(&c, 0, Target::Zero, -0.1), Err(Error::Usage(_))));
        assert!(matches!(noise_kick(&c, 2, Target::Zero, 0.1), Err(Error::Usage(_))));
    }

    #[test]
    fn acca_step_on_single_edge() {
        let topo = Topology::path(2).unwrap();
        for seed in 0..20 {
            let mut c = Configuration::from_angles([0.0, FRAC_PI_2]).unwrap();
            acca_step(&mut c, &topo, &mut SimRng::new(seed));
            assert!((c.get(0).value() - FRAC_PI_4).abs() < 1e-15);
            assert!((c.get(1).value() - FRAC_PI_4).abs() < 1e-15);
        }
    }

    #[test]
    fn consensus_is_absorbing() {
        let topo = Topology::ring(30).unwrap();
        let mut c = Configuration::constant(30, -2.0).unwrap();
        let start = c.clone();
        let mut rng = SimRng::new(2);
        for _ in 0..1000 {
            acca_step(&mut c, &topo, &mut rng);
        }
        assert_eq!(c, start);
    }

    #[test]
    fn acca_step_is_deterministic() {
        let topo = Topology::ring(100).unwrap();
        let run = |seed| {
            let mut rng = SimRng::new(seed);
            let mut c = Configuration::from_angles((0..100).map(|_| rng.angle())).unwrap();
            for _ in 0..10_000 {
                acca_step(&mut c, &topo, &mut rng);
            }
            c.into_vec().into_iter().map(f64::to_bits).collect::<Vec<_>>()
        };
        assert_eq!(run(77), run(77));
        assert_ne!(run(77), run(78));
    }

    #[test]
    fn noisy_step_with_zero_epsilon_matches_acca_step() {
        let topo = Topology::path(20).unwrap();
        let mut r0 = SimRng::new(5);
        let mut c0 = Configuration::from_angles((0..20).map(|_| r0.angle())).unwrap();
        let mut c1 = c0.clone();
        let mut r1 = r0.clone();
        for _ in 0..500 {
            acca_step(&mut c0, &topo, &mut r0);
            // burn the site and target draws acca_step does not make
            r0.below(20);
            r0.coin();
            noisy_step(&mut c1, &topo, 0.0, &mut r1);
        }
        assert_eq!(c0, c1);
    }

    #[test]
    fn noisy_step_on_zero_state_with_full_epsilon_and_zero_target() {
        // All at 0: the midpoint leaves it, and a kick toward 0 leaves it.
        // A kick toward the antipode with ε = 1 sends the site to -π.
        let topo = Topology::ring(8).unwrap();
        let mut rng = SimRng::new(1);
        for _ in 0..200 {
            let mut c = Configuration::constant(8, 0.0).unwrap();
            noisy_step(&mut c, &topo, 1.0, &mut rng);
            let moved: Vec<f64> = c.as_slice().iter().copied().filter(|&a| a != 0.0).collect();
            assert!(moved.is_empty() || moved == vec![-PI]);
        }
    }

    #[test]
    fn noise_targets_are_fair() {
        let mut rng = SimRng::new(99);
        let draws = 100_000;
        let zeros = (0..draws).filter(|_| Target::draw(&mut rng) == Target::Zero).count();
        assert!((zeros as f64 / draws as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn step_params_validation() {
        let ring = Topology::ring(100).unwrap();
        assert!(StepParams { epsilon: 0.002, k_mid: 40, k_noise: 40 }.validate(&ring).is_ok());
        assert!(StepParams { epsilon: 0.002, k_mid: 51, k_noise: 0 }.validate(&ring).is_err());
        assert!(StepParams { epsilon: 0.002, k_mid: 0, k_noise: 0 }.validate(&ring).is_err());
        assert!(StepParams { epsilon: 0.002, k_mid: 1, k_noise: 101 }.validate(&ring).is_err());
        assert!(StepParams { epsilon: 1.01, k_mid: 1, k_noise: 1 }.validate(&ring).is_err());
        let mut c = Configuration::constant(100, 0.0).unwrap();
        let bad = StepParams { epsilon: 0.1, k_mid: 60, k_noise: 1 };
        assert!(matches!(parallel_step(&mut c, &ring, &bad, &mut SimRng::new(0)), Err(Error::Usage(_))));
    }

    #[test]
    fn parallel_step_without_noise_is_pure_midpoint() {
        let topo = Topology::ring(40).unwrap();
        let params = StepParams { epsilon: 0.5, k_mid: 7, k_noise: 0 };
        let mut stepper = ParallelStepper::new(topo, params).unwrap();
        let mut rng = SimRng::new(8);
        for _ in 0..200 {
            let mut c = Configuration::from_angles((0..40).map(|_| rng.angle())).unwrap();
            let before = c.clone();
            stepper.step(&mut c, &mut rng);
            assert_eq!(c, parallel_midpoint(&before, stepper.last_edges()));
            assert!(stepper.last_sites().is_empty());
        }
    }

    #[test]
    fn parallel_step_touches_only_matched_and_kicked_sites() {
        let topo = Topology::path(30).unwrap();
        let params = StepParams { epsilon: 0.3, k_mid: 5, k_noise: 4 };
        let mut stepper = ParallelStepper::new(topo, params).unwrap();
        let mut rng = SimRng::new(18);
        for _ in 0..500 {
            let mut c = Configuration::from_angles((0..30).map(|_| rng.angle())).unwrap();
            let before = c.clone();
            stepper.step(&mut c, &mut rng);
            assert!(c.is_canonical());
            let mut touched = [false; 30];
            for &(i, j) in stepper.last_edges() {
                touched[i] = true;
                touched[j] = true;
            }
            for &k in stepper.last_sites() {
                touched[k] = true;
            }
            for (s, &hit) in touched.iter().enumerate() {
                if !hit {
                    assert_eq!(c.get(s), before.get(s));
                }
            }
        }
    }

    #[test]
    fn parallel_midpoint_is_order_independent() {
        let mut rng = SimRng::new(31);
        for _ in 0..500 {
            let c = Configuration::from_angles((0..24).map(|_| rng.angle())).unwrap();
            let k = 1 + rng.below(12);
            let m = sample_matching(24, k, TopologyKind::Ring, &mut rng).unwrap();
            let mut edges = m.edges().to_vec();
            let reference = parallel_midpoint(&c, &edges);
            // reverse and rotate the order
            edges.reverse();
            let shift = rng.below(edges.len());
            edges.rotate_left(shift);
            assert_eq!(parallel_midpoint(&c, &edges), reference);
            // in-place sequential application agrees too, because the edges are disjoint
            let mut seq = c.clone();
            for &(i, j) in &edges {
                midpoint_in_place(seq.as_mut_slice(), i, j);
            }
            assert_eq!(seq, reference);
        }
    }

    #[test]
    fn small_increments_preserve_winding() {
        let n = 60;
        let topo = Topology::ring(n).unwrap();
        let mut rng = SimRng::new(404);
        let mut accepted = 0;
        let mut trial = 0;
        while accepted < 10_000 {
            trial += 1;
            // random walk with steps in [-π/2, π/2], closed up by a multiple of 2π
            let w = (trial % 7) as f64 - 3.0;
            let mut incs: Vec<f64> = (0..n).map(|_| (rng.unit() - 0.5) * 2.4).collect();
            let drift = (TAU * w - incs.iter().sum::<f64>()) / n as f64;
            if incs.iter().any(|d| (d + drift).abs() > FRAC_PI_2) {
                continue;
            }
            for d in incs.iter_mut() {
                *d += drift;
            }
            let start = rng.angle();
            let mut acc = start;
            let angles: Vec<f64> = incs.iter().map(|d| {
                let a = acc;
                acc += d;
                a
            }).collect();
            let mut c = Configuration::from_angles(angles).unwrap();
            accepted += 1;
            let before = winding_number(&c, &topo).unwrap().rounded;
            assert_eq!(before, w as i64);
            acca_step(&mut c, &topo, &mut rng);
            let after = winding_number(&c, &topo).unwrap();
            assert_eq!(after.rounded, before);
            assert!(after.is_integral());
        }
    }
}
