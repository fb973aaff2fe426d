//! Equilibrium checks for behavioral profiles.

use crate::error::Result;
use crate::game::AgentId;
use crate::mechanism::MechanismKind;
use crate::policy::DecisionPolicy;
use crate::rat::Rat;
use crate::strategy::{CmpOp, Cond, Operand, Ref, RoundRef, Rule, Strategy, StrategySet};

use super::best_response::{best_response_value, Objective};
use super::payoff::expected_payoffs;

/// A profitable deviation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deviation {
    pub agent: AgentId,
    /// Strategy name, `round N -> label`, or `best response`.
    pub deviation: String,
    pub value: Rat,
    pub gain: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NashVerdict {
    /// Expected payoff of every agent under the profile.
    pub values: Vec<Rat>,
    /// Best-response value of every reporting agent on its own information.
    pub best_responses: Vec<Option<Rat>>,
    pub witnesses: Vec<Deviation>,
    /// Description of the deviations that were checked.
    pub scope: String,
}

impl NashVerdict {
    pub fn is_nash(&self) -> bool {
        self.witnesses.is_empty()
    }
}

/// `strategy` with its round-`round` rule replaced.
fn with_round(strategy: &Strategy, round: usize, rule: Rule) -> Strategy {
    let mut s = strategy.clone();
    s.name = format!("{} with round {round} replaced", strategy.name);
    s.rounds.insert(round, rule);
    s
}

/// Checks every registered alternative, every single-round fixed report and
/// the exact best response of each reporting agent.
pub fn nash_check(
    policy: &DecisionPolicy,
    mechanism: Option<&MechanismKind>,
    profile: &[Strategy],
    sets: &[StrategySet],
) -> Result<NashVerdict> {
    let g = policy.game();
    let values = expected_payoffs(policy, mechanism, profile)?;
    let mut witnesses = Vec::new();
    let mut best_responses = vec![None; g.n_agents()];
    let try_dev = |agent: AgentId, name: String, s: Strategy, w: &mut Vec<Deviation>| -> Result<()> {
        let mut p = profile.to_vec();
        p[agent] = s;
        let v = expected_payoffs(policy, mechanism, &p)?[agent].clone();
        if v > values[agent] {
            let gain = &v - &values[agent];
            w.push(Deviation { agent, deviation: name, value: v, gain });
        }
        Ok(())
    };
    for a in g.reporting_agents() {
        for set in sets.iter().filter(|s| s.agent == a) {
            for s in &set.strategies {
                try_dev(a, s.name.clone(), s.clone(), &mut witnesses)?;
            }
        }
        for t in 1..=g.rounds() {
            for &ty in g.types_at(a, t) {
                let label = g.label(ty).to_string();
                let s = with_round(&profile[a], t, Rule::Label(label.clone()));
                try_dev(a, format!("round {t} -> {label:?}"), s, &mut witnesses)?;
            }
        }
        let br = best_response_value(policy, mechanism, a, profile, Objective::Max)?;
        if br > values[a] {
            let gain = &br - &values[a];
            witnesses.push(Deviation { agent: a, deviation: "best response".into(), value: br.clone(), gain });
        }
        best_responses[a] = Some(br);
    }
    Ok(NashVerdict {
        values,
        best_responses,
        witnesses,
        scope: "registered strategies, single-round fixed reports, exact best response on own information".into(),
    })
}

/// Expected payoff of `agent` when, holding type `own_label` in `round`, it
/// reports each of `labels` and otherwise follows `profile`. A mixing agent
/// is indifferent iff all values are equal.
pub fn report_values(
    policy: &DecisionPolicy,
    mechanism: Option<&MechanismKind>,
    profile: &[Strategy],
    agent: AgentId,
    round: usize,
    own_label: &str,
    labels: &[&str],
) -> Result<Vec<(String, Rat)>> {
    let cond = Cond::Cmp(
        Operand::Label(Ref::OwnType { round: RoundRef::Cur }),
        CmpOp::Eq,
        Operand::Str(own_label.to_string()),
    );
    let mut out = Vec::new();
    for &l in labels {
        let orig = profile[agent].rule(round).clone();
        let rule = Rule::If(cond.clone(), Box::new(Rule::Label(l.to_string())), Box::new(orig));
        let mut p = profile.to_vec();
        p[agent] = with_round(&profile[agent], round, rule);
        out.push((l.to_string(), expected_payoffs(policy, mechanism, &p)?[agent].clone()));
    }
    Ok(out)
}
