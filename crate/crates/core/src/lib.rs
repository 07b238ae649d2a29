//! Discrete-event simulation of lightpath routing in optical networks with
//! wavelength interchange.
//!
//! The crate compares three routing and wavelength assignment algorithms on
//! networks whose routers and links fail at random:
//!
//! * [`Algorithm::Mrpr`] minimizes the probability that the lightpath has to
//!   be reconfigured before it departs.
//! * [`Algorithm::Aur`] takes the fewest hops over links with capacity.
//! * [`Algorithm::Llr`] takes the least loaded candidate route.
//!
//! [`simulator::run`] drives one replication; [`experiment::run_sweep`] runs a
//! grid of them and writes CSV.

pub mod auxgraph;
pub mod cost;
pub mod experiment;
pub mod graph;
pub mod routing;
pub mod simulator;
pub mod state;
pub mod stats;
pub mod topology;

pub use cost::{erlang_b, repacking_probability, CostModel, FailureBound};
pub use experiment::{run_sweep, ExperimentConfig, SweepRow};
pub use routing::{Algorithm, RouteDecision, RoutingEngine, WavelengthPolicy};
pub use simulator::{run, Metrics, SimConfig, SimOutput};
pub use state::NetworkState;
pub use stats::ElementStats;
pub use topology::{ConversionMode, LinkId, RouterId, Topology, Wavelength};
