//! Analysis of symmetric 2x2 games as models of reciprocal cooperation and
//! kin-selected altruism.
//!
//! - [`game`]: payoff matrices, cost/benefit/synergy decomposition, the
//!   ordinal taxonomy and the strong-altruism mapping.
//! - [`strategy`]: five-locus deterministic strategies and exact iterated
//!   matches.
//! - [`analytics`]: closed-form fitnesses, relatedness thresholds and mixed
//!   equilibria at one locus and with role separation.
//! - [`dynamics`]: replicator flows, RK4 trajectories and fixed-point
//!   classification.
//! - [`abm`]: Monte Carlo estimates and finite-population evolution that
//!   check the closed forms independently.
//! - [`export`]: CSV writers for the tabular outputs.

pub mod abm;
pub mod analytics;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod game;
pub mod strategy;

pub use abm::{EstimateReport, Mode, PairingModel, PopulationConfig};
pub use analytics::{EquilibriumReport, KinContext, Threshold, ThresholdBounds, ThresholdCurve};
pub use dynamics::{FixedPointReport, Stability, Trajectory, TwoLocusState};
pub use error::{Error, Result};
pub use game::{
    Action, AdditivityClass, DonationDecomposition, GameClass, HawkDoveParams, PayoffMatrix,
};
pub use strategy::{Genome, MatchOutcome};
