//! Guaranteed payoffs of truthful agents.

use crate::error::{Error, Result};
use crate::game::AgentId;
use crate::mechanism::MechanismKind;
use crate::policy::DecisionPolicy;
use crate::rat::Rat;
use crate::strategy::truthful_profile;

use super::best_response::{best_response_value, coalition_value, Objective};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuaranteeCertificate {
    pub mechanism: String,
    /// Claimed guarantee per agent: the trustful initial value.
    pub guarantees: Vec<Rat>,
    /// Worst expected payoff of each truthful agent over all behavior of the
    /// others. Zero for the public agent.
    pub adversarial: Vec<Rat>,
    pub efficient_total: Rat,
}

impl GuaranteeCertificate {
    pub fn sum_matches(&self) -> bool {
        self.guarantees.iter().sum::<Rat>() == self.efficient_total
    }

    /// Agents whose adversarial value falls below their guarantee.
    pub fn violations(&self) -> Vec<AgentId> {
        (0..self.guarantees.len()).filter(|&a| self.adversarial[a] < self.guarantees[a]).collect()
    }

    pub fn is_valid(&self) -> bool {
        self.sum_matches() && self.violations().is_empty()
    }
}

/// Computes the certificate without judging it.
pub fn guarantee_certificate(policy: &DecisionPolicy, mechanism: &MechanismKind) -> Result<GuaranteeCertificate> {
    let g = policy.game();
    let guarantees = policy.initial_value();
    let truthful = truthful_profile(g);
    let mut adversarial = vec![Rat::default(); g.n_agents()];
    for a in g.reporting_agents() {
        adversarial[a] = best_response_value(policy, Some(mechanism), a, &truthful, Objective::Min)?;
    }
    Ok(GuaranteeCertificate {
        mechanism: mechanism.to_string(),
        guarantees,
        adversarial,
        efficient_total: policy.efficient_total(),
    })
}

/// The certificate, or the first violation.
pub fn verify_guarantee(policy: &DecisionPolicy, mechanism: &MechanismKind) -> Result<GuaranteeCertificate> {
    let cert = guarantee_certificate(policy, mechanism)?;
    if let Some(&a) = cert.violations().first() {
        return Err(Error::CertificateFailure {
            agent: policy.game().agent_name(a).to_string(),
            value: crate::rat::fmt(&cert.adversarial[a]),
            bound: crate::rat::fmt(&cert.guarantees[a]),
        });
    }
    if !cert.sum_matches() {
        return Err(Error::CertificateFailure {
            agent: "the sum of guarantees".into(),
            value: crate::rat::fmt(&cert.guarantees.iter().sum::<Rat>()),
            bound: crate::rat::fmt(&cert.efficient_total),
        });
    }
    Ok(cert)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoalitionCheck {
    pub coalition: Vec<AgentId>,
    /// Best joint expected payoff against truthful outsiders.
    pub value: Rat,
    /// Sum of the members' guarantees.
    pub bound: Rat,
}

impl CoalitionCheck {
    pub fn holds(&self) -> bool {
        self.value <= self.bound
    }
}

pub fn coalition_check(
    policy: &DecisionPolicy,
    mechanism: &MechanismKind,
    coalition: &[AgentId],
) -> Result<CoalitionCheck> {
    let c = policy.initial_value();
    Ok(CoalitionCheck {
        coalition: coalition.to_vec(),
        value: coalition_value(policy, Some(mechanism), coalition)?,
        bound: coalition.iter().map(|&a| &c[a]).sum(),
    })
}
