//! Pricing, replenishment and donation-contract decisions for a
//! manufacturer–retailer chain whose demand grows with displayed stock and
//! with the share of the retail price donated to a social cause.
//!
//! The chain can be run decentralized (retailer leads, manufacturer follows),
//! centralized (one decision maker), or coordinated through a
//! revenue-and-cost-sharing contract that reaches the centralized optimum.
//! Every analytic profit formula can be replayed numerically by [`oracle`].
//!
//! ```
//! use chaincoord::{benchmark_problems, solve_all, SolverSettings};
//!
//! let params = benchmark_problems()[0];
//! let all = solve_all(&params, &SolverSettings::default()).unwrap();
//! assert_eq!(all.decentralized.n_star, 2);
//! assert!(all.centralized.profit_chain_c > all.decentralized.profit_chain);
//! ```

// Negated comparisons route NaN into the rejection branch on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blocked;
pub mod centralized;
pub mod coordination;
pub mod decentralized;
pub mod error;
pub mod kinetics;
pub mod oracle;
pub mod params;
pub mod root;
pub mod sweep;
pub mod verify;

use serde::{Deserialize, Serialize};

pub use blocked::ComparisonReport;
pub use centralized::{CentralizedAuxiliaries, CentralizedSolution};
pub use coordination::{ContractAuxiliaries, ContractOutcome};
pub use decentralized::{DecentralizedSolution, FocCoefficients};
pub use error::{Error, Result};
pub use kinetics::CycleGeometry;
pub use oracle::{SimMode, SimProfits};
pub use params::{
    benchmark_problems, load_config, validate, ModelParams, ParamField, SolverSettings, ValidationReport,
};
pub use sweep::SweepRow;

/// Solutions of all three decision systems for one parameter set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemSolutions {
    pub decentralized: DecentralizedSolution,
    pub centralized: CentralizedSolution,
    pub coordinated: ContractOutcome,
}

/// Validates `params` and runs the decentralized, centralized and
/// coordinated solvers in turn.
pub fn solve_all(params: &ModelParams, settings: &SolverSettings) -> Result<SystemSolutions> {
    settings.check()?;
    validate(params).into_result()?;
    let decentralized = decentralized::solve_decentralized(params, settings)?;
    let centralized = centralized::solve_centralized(params, settings)?;
    let coordinated = coordination::coordinate(params, &decentralized, &centralized)?;
    Ok(SystemSolutions {
        decentralized,
        centralized,
        coordinated,
    })
}
