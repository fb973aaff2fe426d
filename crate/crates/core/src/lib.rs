//! Finite-horizon dynamic mechanism design with exact arithmetic.
//!
//! The crate models stochastic reporting games, computes the efficient
//! decision policy, prices reports under several transfer rules and verifies
//! equilibrium and budget properties by exact enumeration.

pub mod analysis;
pub mod error;
pub mod format;
pub mod game;
pub mod mechanism;
pub mod paths;
pub mod policy;
pub mod rat;
pub mod scenarios;
pub mod strategy;

pub use error::{Error, Result};
pub use game::{validate, AgentId, Game, GameSpec, TypeId};
pub use mechanism::{MechanismKind, TransferLedger};
pub use policy::{compute_efficient_policy, DecisionPolicy};
pub use rat::Rat;
pub use strategy::{Strategy, StrategySet};
