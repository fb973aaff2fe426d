//! Martingale check of a truthful agent's value under sequential pricing.
//!
//! Types are drawn lazily: within a round the public agent moves first, then
//! each agent in the update order draws its type and reports at once, then
//! private decisions are taken and utilities realized. At every node the
//! tracked quantity is the agent's realized utility plus its trustful value
//! of the current mixed profile plus its transfers so far; each node's
//! residual is the expected change over its next event.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::game::{AgentId, Game, JointDecision, TypeId};
use crate::mechanism::{MechanismKind, RoundReports};
use crate::paths::TransferCache;
use crate::policy::DecisionPolicy;
use crate::rat::Rat;
use crate::strategy::{private_decision, report, Observation, Strategy};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Event {
    PublicDraw,
    /// Type draw and report of an agent.
    Report(AgentId),
    /// Private decisions and realized utilities.
    Settle,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residual {
    pub round: usize,
    /// The event following the node.
    pub event: Event,
    /// Probability of reaching the node.
    pub reach: Rat,
    pub value: Rat,
    pub residual: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MartingaleReport {
    pub agent: AgentId,
    /// Number of non-terminal nodes checked.
    pub nodes: usize,
    pub nonzero: Vec<Residual>,
}

impl MartingaleReport {
    pub fn is_martingale(&self) -> bool {
        self.nonzero.is_empty()
    }
}

/// An extra amount credited to the checked agent at one report event, for
/// testing the checker itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fault {
    pub round: usize,
    pub at: AgentId,
    pub amount: Rat,
}

struct Walk<'a> {
    game: &'a Game,
    policy: &'a DecisionPolicy,
    profile: &'a [Strategy],
    agent: AgentId,
    order: Vec<AgentId>,
    cache: TransferCache<'a>,
    fault: Option<Fault>,
    types: Vec<Vec<TypeId>>,
    reports: Vec<Vec<TypeId>>,
    hist: Vec<Vec<TypeId>>,
    recommended: Vec<usize>,
    decisions: Vec<JointDecision>,
    /// Round-`t` entries, pre-filled with round `t-1` values.
    cur_types: Vec<TypeId>,
    cur_reports: Vec<TypeId>,
    realized: Rat,
    transfers: Rat,
    report: MartingaleReport,
}

impl Walk<'_> {
    fn events(&self) -> Vec<Event> {
        let mut v = Vec::new();
        if self.game.public_agent().is_some() {
            v.push(Event::PublicDraw);
        }
        v.extend(self.order.iter().map(|&a| Event::Report(a)));
        v.push(Event::Settle);
        v
    }

    fn value(&self, t: usize) -> Rat {
        let g = self.game;
        let prev_decision = if t == 1 { None } else { Some(self.recommended[t - 2]) };
        let prev_public = g.public_agent().map(|p| self.reports[t - 1][p]);
        let up = self.policy.stage_value(t, prev_decision, prev_public, &self.cur_reports);
        &self.realized + &up[self.agent] + &self.transfers
    }

    /// Transfer to the checked agent at `k`'s report in round `t`.
    fn step_transfer(&mut self, t: usize, k: AgentId) -> Result<Rat> {
        let g = self.game;
        let mut current = self.cur_reports.clone();
        let pos = self.order.iter().position(|&a| a == k).expect("k is in the order");
        for &a in &self.order[pos + 1..] {
            current[a] = g.types_at(a, t)[0];
        }
        let prev_decision = if t == 1 { None } else { Some(self.recommended[t - 2]) };
        let r = RoundReports { round: t, prev_decision, prev: &self.reports[t - 1], current: &current };
        let rt = self.cache.get(r)?;
        let i = self.agent;
        let mut x = Rat::zero();
        for p in &rt.payments {
            if k == i && p.payee == i {
                x += &p.amount;
            } else if p.payee == k && p.payer == Some(i) {
                x -= &p.amount;
            }
        }
        if let Some(f) = &self.fault {
            if f.round == t && f.at == k {
                x += &f.amount;
            }
        }
        Ok(x)
    }

    fn node(&mut self, t: usize, e: usize, reach: Rat) -> Result<()> {
        let g = self.game;
        if t > g.rounds() {
            return Ok(());
        }
        let events = self.events();
        if e == events.len() {
            return self.node(t + 1, 0, reach);
        }
        let here = self.value(t);
        let mut expected = Rat::zero();
        let prev_public = g.public_agent().map(|p| self.types[t - 1][p]);
        let prev_actual = self.decisions.last().cloned();
        match events[e] {
            Event::PublicDraw => {
                let p = g.public_agent().expect("public event");
                let succ = g.successors(p, t, self.types[t - 1][p], prev_public, prev_actual.as_ref())?.to_vec();
                for (ty, w) in succ.into_iter().filter(|(_, w)| !w.is_zero()) {
                    self.cur_types[p] = ty;
                    self.cur_reports[p] = ty;
                    self.hist[p].push(ty);
                    expected += &w * self.value(t);
                    self.node(t, e + 1, &reach * &w)?;
                    self.hist[p].pop();
                }
                self.cur_types[p] = self.types[t - 1][p];
                self.cur_reports[p] = self.reports[t - 1][p];
            }
            Event::Report(k) => {
                let succ = g.successors(k, t, self.types[t - 1][k], prev_public, prev_actual.as_ref())?.to_vec();
                for (ty, w) in succ.into_iter().filter(|(_, w)| !w.is_zero()) {
                    self.cur_types[k] = ty;
                    self.hist[k].push(ty);
                    let dist = if k == self.agent {
                        vec![(ty, Rat::one())]
                    } else {
                        let obs = Observation {
                            agent: k,
                            round: t,
                            own_types: &self.hist[k],
                            reports: &self.reports[..t],
                            decisions: &self.recommended,
                            types: &self.types[..t],
                            recommendation: None,
                        };
                        report(g, &self.profile[k], &obs)?
                    };
                    for (r, q) in dist.into_iter().filter(|(_, q)| !q.is_zero()) {
                        self.cur_reports[k] = r;
                        let x = self.step_transfer(t, k)?;
                        self.transfers += &x;
                        let p = &w * &q;
                        expected += &p * self.value(t);
                        self.node(t, e + 1, &reach * &p)?;
                        self.transfers -= &x;
                    }
                    self.hist[k].pop();
                }
                self.cur_types[k] = self.types[t - 1][k];
                self.cur_reports[k] = self.reports[t - 1][k];
            }
            Event::Settle => {
                let rec_idx = self.policy.decide(t, &self.cur_reports);
                let rec = g.joint_decisions(t)[rec_idx].clone();
                let mut outcomes = vec![(rec.clone(), Rat::one())];
                self.reports.push(self.cur_reports.clone());
                self.recommended.push(rec_idx);
                for a in 0..g.n_agents() {
                    if a == self.agent || g.is_public(a) || !g.has_private_choice(t, a) {
                        continue;
                    }
                    let obs = Observation {
                        agent: a,
                        round: t,
                        own_types: &self.hist[a],
                        reports: &self.reports[..=t],
                        decisions: &self.recommended,
                        types: &self.types[..t],
                        recommendation: Some(&rec),
                    };
                    let dist = private_decision(g, &self.profile[a], &obs)?;
                    let mut next = Vec::new();
                    for (d, p) in &outcomes {
                        for (x, q) in dist.iter().filter(|(_, q)| !q.is_zero()) {
                            let mut d = d.clone();
                            d.private[a] = *x;
                            next.push((d, p * q));
                        }
                    }
                    outcomes = next;
                }
                self.types.push(self.cur_types.clone());
                let public = g.public_agent().map(|p| self.cur_types[p]);
                for (actual, w) in outcomes {
                    let u = g.utility(t, self.agent, &actual, self.cur_types[self.agent], public);
                    self.realized += &u;
                    self.decisions.push(actual);
                    let saved = (self.cur_types.clone(), self.cur_reports.clone());
                    let v = if t == g.rounds() {
                        &self.realized + &self.transfers
                    } else {
                        let pub_t = g.public_agent().map(|p| self.cur_reports[p]);
                        let up = self.policy.stage_value(t + 1, Some(rec_idx), pub_t, &self.cur_reports);
                        &self.realized + &up[self.agent] + &self.transfers
                    };
                    expected += &w * v;
                    self.node(t, e + 1, &reach * &w)?;
                    (self.cur_types, self.cur_reports) = saved;
                    self.decisions.pop();
                    self.realized -= &u;
                }
                self.types.pop();
                self.recommended.pop();
                self.cur_reports = self.reports.pop().expect("pushed above");
            }
        }
        self.report.nodes += 1;
        let residual = expected - &here;
        if !residual.is_zero() {
            self.report.nonzero.push(Residual { round: t, event: events[e], reach, value: here, residual });
        }
        Ok(())
    }
}

/// Residuals of the martingale for truthful `agent`, with the other agents
/// following `profile`. Only sequential pricing is supported.
pub fn verify_martingale(
    policy: &DecisionPolicy,
    mechanism: &MechanismKind,
    agent: AgentId,
    profile: &[Strategy],
) -> Result<MartingaleReport> {
    verify_martingale_with_fault(policy, mechanism, agent, profile, None)
}

pub fn verify_martingale_with_fault(
    policy: &DecisionPolicy,
    mechanism: &MechanismKind,
    agent: AgentId,
    profile: &[Strategy],
    fault: Option<Fault>,
) -> Result<MartingaleReport> {
    let g = policy.game();
    let MechanismKind::SequentialUpdate(order) = mechanism else {
        return Err(Error::Unsupported(format!("martingale check under {mechanism}")));
    };
    if profile.len() != g.n_agents() {
        return Err(Error::ProfileShapeMismatch(format!("{} strategies for {} agents", profile.len(), g.n_agents())));
    }
    if agent >= g.n_agents() || g.is_public(agent) {
        return Err(Error::InvalidSpec(format!("agent {agent} does not report")));
    }
    let init = g.initial_profile();
    let mut w = Walk {
        game: g,
        policy,
        profile,
        agent,
        order: order.clone(),
        cache: TransferCache::new(policy, mechanism)?,
        fault,
        types: vec![init.clone()],
        reports: vec![init.clone()],
        hist: init.iter().map(|&t| vec![t]).collect(),
        recommended: Vec::new(),
        decisions: Vec::new(),
        cur_types: init.clone(),
        cur_reports: init,
        realized: Rat::zero(),
        transfers: Rat::zero(),
        report: MartingaleReport { agent, nodes: 0, nonzero: Vec::new() },
    };
    w.node(1, 0, Rat::one())?;
    Ok(w.report)
}
