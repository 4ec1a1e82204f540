//! Bell-scenario boxes and the sets they can live in: qubit quantum
//! realizations, classical models with limited shared randomness, and
//! their hybrids.

pub mod classical;
pub mod error;
pub mod experiments;
pub mod membership;
pub mod optim;
pub mod quantum;
pub mod scenario;
pub mod schema;

pub use error::{Error, Result};
pub use membership::{MembershipResult, SetDescriptor, SolverConfig, Verdict};
pub use scenario::{BellScenario, BoxLabel, CorrelatorBox, ProbBox};
