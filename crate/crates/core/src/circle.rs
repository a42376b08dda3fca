//! Canonical angle arithmetic on the circle.
//!
//! Every angle handed out by this crate lives in the half-open interval
//! `[-π, π)`. The antipode of zero is represented by `-π`; `π` itself is
//! never produced.

use std::f64::consts::{PI, TAU};
use std::fmt;

use crate::error::{usage, Error, Result};

/// Tolerance for accepting a winding sum as an integer. Safe for rings of up to 10⁴ sites.
pub const WINDING_TOLERANCE: f64 = 1e-9;

/// Wrap without the finiteness check. Hot loops use this directly.
#[inline]
pub fn wrap(x: f64) -> f64 {
    debug_assert!(x.is_finite(), "wrap of non-finite value {x}");
    if (-PI..PI).contains(&x) {
        return x;
    }
    let mut r = x - TAU * ((x + PI) / TAU).floor();
    // The floor formula can land one rounding step outside [-π, π).
    if r >= PI {
        r -= TAU;
    }
    if r < -PI {
        r += TAU;
        if r >= PI {
            r = -PI;
        }
    }
    r
}

/// `x − 2π⌊(x+π)/2π⌋`, the representative of `x` in `[-π, π)`.
pub fn wrap_pi(x: f64) -> Result<Angle> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("cannot wrap non-finite value {x}")));
    }
    Ok(Angle(wrap(x)))
}

/// Shortest signed arc from `a` to `b`, in `[-π, π)`.
#[inline]
pub fn circ_increment(a: f64, b: f64) -> f64 {
    wrap(b - a)
}

/// An angle in canonical range `[-π, π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);
    pub const ANTIPODE: Angle = Angle(-PI);

    pub fn new(x: f64) -> Result<Self> {
        wrap_pi(x)
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Signed shortest arc from `self` to `other`.
    pub fn increment_to(self, other: Angle) -> f64 {
        circ_increment(self.0, other.0)
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TopologyKind {
    Path,
    Ring,
}

impl TopologyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TopologyKind::Path => "path",
            TopologyKind::Ring => "ring",
        }
    }
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TopologyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "path" | "open" => Ok(TopologyKind::Path),
            "ring" | "periodic" => Ok(TopologyKind::Ring),
            other => usage(format!("unknown topology `{other}` (expected path or ring)")),
        }
    }
}

/// Path or ring on `n` sites, labelled `0..n`.
///
/// Edge `e` joins sites `e` and `e + 1`; on the ring the last edge `n - 1`
/// joins `n - 1` back to `0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Topology {
    kind: TopologyKind,
    n: usize,
}

impl Topology {
    pub fn new(kind: TopologyKind, n: usize) -> Result<Self> {
        match kind {
            TopologyKind::Path if n < 2 => usage(format!("a path needs at least 2 sites, got {n}")),
            TopologyKind::Ring if n < 3 => usage(format!("a ring needs at least 3 sites, got {n}")),
            _ => Ok(Topology { kind, n }),
        }
    }

    pub fn path(n: usize) -> Result<Self> {
        Self::new(TopologyKind::Path, n)
    }

    pub fn ring(n: usize) -> Result<Self> {
        Self::new(TopologyKind::Ring, n)
    }

    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_ring(&self) -> bool {
        self.kind == TopologyKind::Ring
    }

    pub fn edge_count(&self) -> usize {
        match self.kind {
            TopologyKind::Path => self.n - 1,
            TopologyKind::Ring => self.n,
        }
    }

    /// Endpoints of edge number `e`. Panics if `e` is out of range.
    #[inline]
    pub fn edge(&self, e: usize) -> (usize, usize) {
        assert!(e < self.edge_count(), "edge {e} out of range");
        (e, if e + 1 == self.n { 0 } else { e + 1 })
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.edge_count()).map(move |e| self.edge(e))
    }

    /// Whether `(i, j)` (in either orientation) is an edge.
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        if i >= self.n || j >= self.n || i == j {
            return false;
        }
        let (lo, hi) = (i.min(j), i.max(j));
        hi == lo + 1 || (self.is_ring() && lo == 0 && hi == self.n - 1)
    }

    /// Largest matching size: ⌊n/2⌋ for both topologies.
    pub fn max_matching(&self) -> usize {
        self.n / 2
    }
}

/// A state vector of canonical angles, one per site.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    angles: Vec<f64>,
}

impl Configuration {
    /// Builds a configuration, wrapping every entry into `[-π, π)`.
    pub fn from_angles(raw: impl IntoIterator<Item = f64>) -> Result<Self> {
        let angles = raw
            .into_iter()
            .map(|x| wrap_pi(x).map(Angle::value))
            .collect::<Result<Vec<_>>>()?;
        if angles.len() < 2 {
            return usage(format!("a configuration needs at least 2 sites, got {}", angles.len()));
        }
        Ok(Configuration { angles })
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Self::from_angles(std::iter::repeat_n(value, n))
    }

    /// Caller guarantees every entry is already canonical.
    pub(crate) fn from_canonical(angles: Vec<f64>) -> Self {
        debug_assert!(angles.iter().all(|&a| (-PI..PI).contains(&a)));
        Configuration { angles }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> Angle {
        Angle(self.angles[i])
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.angles
    }

    /// Mutable access for the update rules; they must keep entries canonical.
    #[inline]
    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.angles
    }

    pub fn iter(&self) -> impl Iterator<Item = Angle> + '_ {
        self.angles.iter().map(|&a| Angle(a))
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.angles
    }

    /// Rotates every site by `c`.
    pub fn rotated(&self, c: f64) -> Configuration {
        Configuration { angles: self.angles.iter().map(|&a| wrap(a + c)).collect() }
    }

    pub fn is_canonical(&self) -> bool {
        self.angles.iter().all(|&a| (-PI..PI).contains(&a))
    }
}

/// Winding number of a ring configuration, as a real sum and its nearest integer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Winding {
    pub raw: f64,
    pub rounded: i64,
}

impl Winding {
    pub fn is_integral(&self) -> bool {
        (self.raw - self.rounded as f64).abs() < WINDING_TOLERANCE
    }
}

/// `(1/2π) Σ_e δ(e)` over all ring edges.
pub fn winding_number(c: &Configuration, topo: &Topology) -> Result<Winding> {
    if !topo.is_ring() {
        return usage("the winding number is only defined on the ring");
    }
    if c.len() != topo.n() {
        return usage(format!("configuration has {} sites, topology has {}", c.len(), topo.n()));
    }
    Ok(winding_of_ring(c.as_slice()))
}

pub(crate) fn winding_of_ring(theta: &[f64]) -> Winding {
    let n = theta.len();
    let sum: f64 = (0..n).map(|i| circ_increment(theta[i], theta[(i + 1) % n])).sum();
    let raw = sum / TAU;
    Winding { raw, rounded: raw.round() as i64 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn wrap_examples() {
        assert_eq!(wrap_pi(0.0).unwrap().value(), 0.0);
        assert_eq!(wrap_pi(PI).unwrap().value(), -PI);
        assert!(close(wrap_pi(3.0 * PI).unwrap().value(), -PI));
        assert!(close(wrap_pi(-0.9 * PI - 0.9 * PI).unwrap().value(), 0.2 * PI));
    }

    #[test]
    fn wrap_rejects_non_finite() {
        assert!(matches!(wrap_pi(f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(wrap_pi(f64::INFINITY), Err(Error::Domain(_))));
        assert!(matches!(wrap_pi(f64::NEG_INFINITY), Err(Error::Domain(_))));
    }

    #[test]
    fn wrap_boundary_inputs_stay_in_range() {
        let eps = f64::EPSILON;
        let mut xs = vec![PI, -PI, 3.0 * PI, -3.0 * PI, PI + eps, PI - eps, -PI + eps, -PI - eps];
        for k in -20..=20 {
            let base = PI * (2 * k + 1) as f64;
            xs.extend([base, base.next_up(), base.next_down()]);
        }
        for x in xs {
            let w = wrap(x);
            assert!((-PI..PI).contains(&w), "wrap({x}) = {w}");
        }
    }

    #[test]
    fn wrap_range_on_a_million_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1_000_000 {
            let x: f64 = rng.random_range(-1e4..1e4);
            let w = wrap(x);
            assert!((-PI..PI).contains(&w), "wrap({x}) = {w}");
        }
    }

    #[test]
    fn increment_examples() {
        assert!(close(circ_increment(0.0, PI / 2.0), PI / 2.0));
        assert!(close(circ_increment(0.9 * PI, -0.9 * PI), 0.2 * PI));
        for x in [-PI, -1.0, 0.0, 2.5] {
            assert_eq!(circ_increment(x, x), 0.0);
        }
    }

    #[test]
    fn winding_examples() {
        let ring = Topology::ring(5).unwrap();
        let c = Configuration::constant(5, 1.3).unwrap();
        assert_eq!(winding_number(&c, &ring).unwrap().rounded, 0);
        let path = Topology::path(5).unwrap();
        assert!(matches!(winding_number(&c, &path), Err(Error::Usage(_))));
    }

    #[test]
    fn winding_of_hand_built_twist() {
        // N = 12, W = -1, α = 0.3: Φ_i = 0.3 - 2πi/12, every increment is -π/6.
        let c = Configuration::from_angles((1..=12).map(|i| 0.3 - TAU * i as f64 / 12.0)).unwrap();
        let w = winding_number(&c, &Topology::ring(12).unwrap()).unwrap();
        assert_eq!(w.rounded, -1);
        assert!(w.is_integral());
    }

    #[test]
    fn integer_winding_on_random_rings() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let n = rng.random_range(3..=500);
            let c = Configuration::from_angles((0..n).map(|_| rng.random_range(-PI..PI))).unwrap();
            let w = winding_number(&c, &Topology::ring(n).unwrap()).unwrap();
            assert!(w.is_integral(), "W = {} for n = {n}", w.raw);
        }
    }

    #[test]
    fn topology_edges() {
        let p = Topology::path(4).unwrap();
        assert_eq!(p.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2), (2, 3)]);
        let r = Topology::ring(4).unwrap();
        assert_eq!(r.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert!(r.has_edge(0, 3) && r.has_edge(3, 0));
        assert!(!p.has_edge(0, 3));
        assert!(Topology::ring(2).is_err());
        assert!(Topology::path(1).is_err());
    }

    #[test]
    fn configuration_is_canonicalized() {
        let c = Configuration::from_angles([PI, 3.0 * PI, 7.0]).unwrap();
        assert!(c.is_canonical());
        assert_eq!(c.get(0).value(), -PI);
        assert!(Configuration::from_angles([0.0]).is_err());
        assert!(Configuration::from_angles([0.0, f64::NAN]).is_err());
    }

    proptest! {
        #[test]
        fn wrap_is_idempotent(x in -1e6f64..1e6) {
            let w = wrap(x);
            prop_assert_eq!(wrap(w), w);
        }

        #[test]
        fn wrap_is_congruent(x in -100f64..100.0) {
            let k = (wrap(x) - x) / TAU;
            prop_assert!((k - k.round()).abs() < 1e-12);
        }

        #[test]
        fn increment_is_antisymmetric(a in -PI..PI, b in -PI..PI) {
            let d = circ_increment(a, b);
            if d != -PI {
                prop_assert!((d + circ_increment(b, a)).abs() < 1e-12);
            }
        }
    }
}
