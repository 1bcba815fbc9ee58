//! Simulation and equilibrium analysis for single origin-destination
//! dynamical flow networks under decentralized congestion pricing.
//!
//! Densities on links evolve on a fast time scale driven by node-local
//! routing splits; aggregate path preferences follow a logit perturbed best
//! response to current (optionally delayed) latencies plus tolls on a slow
//! time scale. The [`equilibrium`] solvers compute the social optimum,
//! generalized Wardrop equilibria and logit-perturbed equilibria
//! independently of the simulator.

pub mod cell;
pub mod equilibrium;
pub mod error;
pub mod network;
pub mod plot;
mod quad;
pub mod routing;
pub mod scenario;
pub mod simulator;
pub mod sweep;

pub use cell::{CellModel, CustomToll, Exponential, FlowDensity, TollPolicy};
pub use equilibrium::{Certificate, EquilibriumResult};
pub use error::{CellError, EquilibriumError, Error, NetworkError, RoutingError, SimError};
pub use network::{Network, PathSet, Topology};
pub use routing::{CostVector, PathPreference};
pub use scenario::{Model, Scenario};
pub use simulator::{Convergence, SimConfig, SimState, Simulator, Trajectory};

