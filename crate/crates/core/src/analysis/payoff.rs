//! Exact expected payoffs.

use num_traits::Zero;

use crate::error::Result;
use crate::mechanism::MechanismKind;
use crate::paths::enumerate_paths;
use crate::policy::DecisionPolicy;
use crate::rat::Rat;
use crate::strategy::Strategy;

/// Expected payoff per agent: utility plus transfers.
pub type PayoffVector = Vec<Rat>;

/// Which part of the outcome a payoff table reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    /// Utility plus net transfers.
    Total,
    Utility,
    Transfers,
    /// Sum of the per-round `γ` values.
    Gamma,
}

/// Expectations of every outcome component under one profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expectation {
    pub utility: Vec<Rat>,
    pub transfers: Vec<Rat>,
    pub gamma: Vec<Rat>,
    pub subsidy: Rat,
    /// Number of terminal paths with positive probability.
    pub paths: usize,
    /// Total probability of those paths; always one.
    pub mass: Rat,
}

impl Expectation {
    pub fn payoff(&self) -> PayoffVector {
        self.measure(Measure::Total)
    }

    pub fn measure(&self, m: Measure) -> Vec<Rat> {
        match m {
            Measure::Total => self.utility.iter().zip(&self.transfers).map(|(u, y)| u + y).collect(),
            Measure::Utility => self.utility.clone(),
            Measure::Transfers => self.transfers.clone(),
            Measure::Gamma => self.gamma.clone(),
        }
    }
}

pub fn expectation(
    policy: &DecisionPolicy,
    mechanism: Option<&MechanismKind>,
    profile: &[Strategy],
) -> Result<Expectation> {
    let n = policy.game().n_agents();
    let mut e = Expectation {
        utility: vec![Rat::zero(); n],
        transfers: vec![Rat::zero(); n],
        gamma: vec![Rat::zero(); n],
        subsidy: Rat::zero(),
        paths: 0,
        mass: Rat::zero(),
    };
    enumerate_paths(policy, profile, mechanism, |p| {
        let w = &p.probability;
        for a in 0..n {
            e.utility[a] += w * &p.utility[a];
            e.transfers[a] += w * &p.transfers[a];
            e.gamma[a] += w * &p.gamma[a];
        }
        e.subsidy += w * &p.subsidy;
        e.paths += 1;
        e.mass += w;
    })?;
    Ok(e)
}

pub fn expected_payoffs(
    policy: &DecisionPolicy,
    mechanism: Option<&MechanismKind>,
    profile: &[Strategy],
) -> Result<PayoffVector> {
    Ok(expectation(policy, mechanism, profile)?.payoff())
}
