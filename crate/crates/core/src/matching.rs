//! Exact counting and exactly uniform sampling of size-k matchings on the
//! path and the cycle, plus uniform k-subsets of sites.
//!
//! A k-matching of a path on `m` vertices is a tiling of the vertices by
//! `k` dominoes and `m - 2k` monomers, so it corresponds one-to-one with a
//! choice of `k` domino slots among `m - k` tiles. Sampling a uniform
//! k-subset of slots therefore samples a uniform matching.
//!
//! On the cycle, the wrap-around edge `(n-1, 0)` belongs to a uniform
//! k-matching with probability exactly `k/n` (the sub-count ratio
//! `C(n-k-1, k-1) / (n/(n-k) · C(n-k, k))`). Conditioning on it reduces the
//! cycle to a path on either `n - 2` or `n` vertices.

use num_bigint::BigUint;

use crate::circle::{Topology, TopologyKind};
use crate::error::{usage, Result};
use crate::rng::SimRng;

/// Pairwise vertex-disjoint edges, each stored as `(i, j)` with `j = i + 1`
/// or `(n - 1, 0)` for the ring's wrap-around edge. Sorted by `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    edges: Vec<(usize, usize)>,
}

impl Matching {
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Checks disjointness and edge membership.
    pub fn is_valid_for(&self, topo: &Topology) -> bool {
        is_matching(&self.edges, topo)
    }
}

pub(crate) fn is_matching(edges: &[(usize, usize)], topo: &Topology) -> bool {
    let mut used = vec![false; topo.n()];
    for &(i, j) in edges {
        if !topo.has_edge(i, j) || used[i] || used[j] {
            return false;
        }
        used[i] = true;
        used[j] = true;
    }
    true
}

/// Distinct site indices, sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SiteSubset {
    sites: Vec<usize>,
}

impl SiteSubset {
    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }
}

fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

fn check_size(n: usize, k: usize, kind: TopologyKind) -> Result<()> {
    Topology::new(kind, n)?;
    if 2 * k > n {
        return usage(format!("no {k}-matching exists on a {kind} of {n} sites (max {})", n / 2));
    }
    Ok(())
}

/// Number of k-matchings: `C(n-k, k)` on the path, `n/(n-k) · C(n-k, k)` on the cycle.
pub fn count_matchings(n: usize, k: usize, kind: TopologyKind) -> Result<BigUint> {
    check_size(n, k, kind)?;
    let path = binomial(n - k, k);
    Ok(match kind {
        TopologyKind::Path => path,
        TopologyKind::Ring => path * n / (n - k),
    })
}

/// Floyd's algorithm: uniform k-subset of `0..a` using exactly `k` draws.
/// Result is left sorted in `picks`. `marks` must be all-false with length ≥ `a`
/// and is restored before returning.
fn floyd_subset(rng: &mut SimRng, a: usize, k: usize, marks: &mut [bool], picks: &mut Vec<usize>) {
    debug_assert!(k <= a);
    picks.clear();
    for j in (a - k)..a {
        let t = rng.below(j + 1);
        let pick = if marks[t] { j } else { t };
        marks[pick] = true;
        picks.push(pick);
    }
    for &p in picks.iter() {
        marks[p] = false;
    }
    picks.sort_unstable();
}

/// Reusable uniform sampler of k-matchings on a fixed topology.
///
/// Each call consumes a number of draws that depends only on `(n, k, kind)`:
/// `k` on the path; on the ring `k + 1` for `k ≥ 1` and none for `k = 0`.
#[derive(Debug, Clone)]
pub struct MatchingSampler {
    topo: Topology,
    k: usize,
    marks: Vec<bool>,
    picks: Vec<usize>,
}

impl MatchingSampler {
    pub fn new(topo: Topology, k: usize) -> Result<Self> {
        check_size(topo.n(), k, topo.kind())?;
        Ok(MatchingSampler { topo, k, marks: vec![false; topo.n()], picks: Vec::with_capacity(k) })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Writes a uniform k-matching into `out` (cleared first).
    pub fn sample_into(&mut self, rng: &mut SimRng, out: &mut Vec<(usize, usize)>) {
        out.clear();
        let n = self.topo.n();
        let k = self.k;
        if k == 0 {
            return;
        }
        match self.topo.kind() {
            TopologyKind::Path => self.path_matching(rng, 0, n, k, out),
            TopologyKind::Ring => {
                if rng.below(n) < k {
                    // Wrap edge taken: sites 0 and n-1 are used, the rest is a path on 1..n-1.
                    self.path_matching(rng, 1, n - 2, k - 1, out);
                    // Keeps the draw count independent of the branch.
                    let _ = rng.below(n);
                    out.push((n - 1, 0));
                } else {
                    self.path_matching(rng, 0, n, k, out);
                }
            }
        }
        debug_assert!(is_matching(out, &self.topo), "sampler produced a non-matching {out:?}");
    }

    /// k-matching of the path on vertices `offset..offset + m`.
    fn path_matching(&mut self, rng: &mut SimRng, offset: usize, m: usize, k: usize, out: &mut Vec<(usize, usize)>) {
        if k == 0 {
            return;
        }
        floyd_subset(rng, m - k, k, &mut self.marks, &mut self.picks);
        out.extend(self.picks.iter().enumerate().map(|(j, &slot)| {
            let start = offset + slot + j;
            (start, start + 1)
        }));
    }

    pub fn sample(&mut self, rng: &mut SimRng) -> Matching {
        let mut edges = Vec::with_capacity(self.k);
        self.sample_into(rng, &mut edges);
        edges.sort_unstable();
        Matching { edges }
    }
}

/// One uniform k-matching of the path or cycle on `n` sites.
pub fn sample_matching(n: usize, k: usize, kind: TopologyKind, rng: &mut SimRng) -> Result<Matching> {
    let topo = Topology::new(kind, n)?;
    Ok(MatchingSampler::new(topo, k)?.sample(rng))
}

/// Reusable uniform k-subset sampler over `0..n`. Exactly `k` draws per call.
#[derive(Debug, Clone)]
pub struct SubsetSampler {
    n: usize,
    k: usize,
    marks: Vec<bool>,
}

impl SubsetSampler {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return usage(format!("cannot choose {k} sites out of {n}"));
        }
        Ok(SubsetSampler { n, k, marks: vec![false; n] })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Writes the sorted subset into `out`.
    pub fn sample_into(&mut self, rng: &mut SimRng, out: &mut Vec<usize>) {
        floyd_subset(rng, self.n, self.k, &mut self.marks, out);
    }
}

/// Uniform k-subset of the sites `0..n`, sorted ascending.
pub fn sample_subset(n: usize, k: usize, rng: &mut SimRng) -> Result<SiteSubset> {
    let mut sampler = SubsetSampler::new(n, k)?;
    let mut sites = Vec::with_capacity(k);
    sampler.sample_into(rng, &mut sites);
    Ok(SiteSubset { sites })
}
