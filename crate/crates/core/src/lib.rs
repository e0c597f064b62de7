//! Weight protection for neuroevolution across sequences of control
//! tasks.
//!
//! A population of fixed-layout recurrent networks is evolved with
//! (μ+λ) NSGA-II. When the population moves on to a new task, fitness is
//! penalized for drifting away from a frozen reference network, which
//! reduces forgetting of earlier tasks without any gradients.

pub mod environments;
pub mod evolution;
pub mod genome;
pub mod harness;
pub mod network;
pub mod weight_protection;

pub use environments::{TaskId, TaskSpec};
pub use evolution::{EvolutionConfig, Individual};
pub use genome::{Genome, Topology};
pub use weight_protection::{ReferenceModel, WpConfig};
