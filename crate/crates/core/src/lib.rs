//! Circular midpoint opinion dynamics on paths and rings.
//!
//! The crate provides canonical angle arithmetic ([`circle`]), the exact
//! uniform matching sampler used by burst updates ([`matching`]), the update
//! rules ([`dynamics`]), the order parameters ([`observables`]), statistical
//! checks ([`stats`], [`verify`]) and the trajectory and sweep runner
//! ([`harness`]).
//!
//! With the default `parallel` feature, sweeps and Monte Carlo checks fan out
//! over rayon. Results do not depend on the worker count.

pub mod circle;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod harness;
pub mod matching;
pub mod observables;
pub mod rng;
pub mod stats;
pub mod verify;

pub use circle::{circ_increment, winding_number, wrap, wrap_pi, Angle, Configuration, Topology, TopologyKind, Winding};
pub use dynamics::{acca_step, midpoint_update, noise_kick, noisy_step, parallel_step, ParallelStepper, StepParams, Target};
pub use error::{Error, Result};
pub use matching::{count_matchings, sample_matching, sample_subset, Matching, MatchingSampler, SiteSubset};
pub use observables::{
    alternating_odd_sum, ideal_winding_iid, ideal_winding_lattice, kuramoto, tau1_config, tau1_pair_estimate, tau1_theory,
    y_projection, KuramotoOrder, Tau1Kernel, WindingSpec,
};
pub use rng::SimRng;
