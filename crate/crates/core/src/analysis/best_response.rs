//! Optimal play of a group of agents against fixed strategies of the rest.
//!
//! Chance, the fixed agents and the controlled group are expanded round by
//! round. The group acts twice per round (report, then private decision) and
//! chooses one action per information set: worlds that the group cannot
//! tell apart are grouped and share the action. With [`Info::Full`] every
//! world is its own information set.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::game::{AgentId, Game, JointDecision, TypeId};
use crate::mechanism::{MechanismKind, RoundReports};
use crate::paths::TransferCache;
use crate::policy::{product, DecisionPolicy};
use crate::rat::Rat;
use crate::strategy::{private_decision, report, truthful_profile, Observation, Strategy};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    Max,
    Min,
}

/// What the controlled group observes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Info {
    /// Everything, including all current true types.
    Full,
    /// What its members observe together: own types, public reports and
    /// decisions, and revealed types.
    Pooled,
}

pub struct Problem<'a> {
    pub policy: &'a DecisionPolicy,
    pub mechanism: Option<&'a MechanismKind>,
    pub controlled: Vec<AgentId>,
    /// Strategies of the other agents; entries of controlled agents are
    /// ignored.
    pub profile: &'a [Strategy],
    /// The objective is `Σ_a weights[a] * payoff[a]`.
    pub weights: Vec<Rat>,
    pub objective: Objective,
    pub info: Info,
}

#[derive(Clone)]
struct World {
    types: Vec<Vec<TypeId>>,
    reports: Vec<Vec<TypeId>>,
    recommended: Vec<usize>,
    decisions: Vec<JointDecision>,
    hist: Vec<Vec<TypeId>>,
    payoff: Rat,
    weight: Rat,
}

struct Solver<'a> {
    p: &'a Problem<'a>,
    game: &'a Game,
    transfers: Option<TransferCache<'a>>,
    controlled: Vec<bool>,
    revealed: Vec<AgentId>,
}

impl<'a> Solver<'a> {
    fn pick(&self, best: Option<Rat>, v: Rat) -> Option<Rat> {
        Some(match best {
            None => v,
            Some(b) => match self.p.objective {
                Objective::Max if v > b => v,
                Objective::Min if v < b => v,
                _ => b,
            },
        })
    }

    fn group(&self, worlds: Vec<World>, t: usize, private: bool) -> Vec<Vec<World>> {
        if self.p.info == Info::Full {
            return worlds.into_iter().map(|w| vec![w]).collect();
        }
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut groups: Vec<Vec<World>> = Vec::new();
        for w in worlds {
            let mut key = Vec::new();
            for &a in &self.p.controlled {
                key.extend(w.hist[a].iter().map(|x| x.0));
            }
            let seen = if private { t + 1 } else { t };
            for r in &w.reports[..seen] {
                key.extend(r.iter().map(|x| x.0));
            }
            key.extend(w.recommended.iter().copied());
            for &b in &self.revealed {
                key.extend(w.types[..t].iter().map(|r| r[b].0));
            }
            match index.get(&key) {
                Some(&k) => groups[k].push(w),
                None => {
                    index.insert(key, groups.len());
                    groups.push(vec![w]);
                }
            }
        }
        groups
    }

    fn round(&mut self, t: usize, worlds: Vec<World>) -> Result<Rat> {
        let g = self.game;
        if t > g.rounds() {
            return Ok(worlds.iter().map(|w| &w.weight * &w.payoff).sum());
        }
        let mut drawn = Vec::new();
        for w in worlds {
            self.draw(t, w, &mut drawn)?;
        }
        let layers: Vec<&[TypeId]> = self.p.controlled.iter().map(|&a| g.types_at(a, t)).collect();
        let actions = product(&layers);
        let mut total = Rat::zero();
        for group in self.group(drawn, t, false) {
            let mut best = None;
            for act in &actions {
                let mut next = Vec::new();
                for w in &group {
                    self.reports(t, w.clone(), act, &mut next)?;
                }
                let v = self.private_stage(t, next)?;
                best = self.pick(best, v);
            }
            total += best.unwrap_or_else(Rat::zero);
        }
        Ok(total)
    }

    fn draw(&self, t: usize, mut w: World, out: &mut Vec<World>) -> Result<()> {
        let g = self.game;
        let prev = w.types[t - 1].clone();
        let prev_public = g.public_agent().map(|p| prev[p]);
        let mut partial = vec![(Vec::with_capacity(g.n_agents()), Rat::one())];
        for a in 0..g.n_agents() {
            let succ = g.successors(a, t, prev[a], prev_public, w.decisions.last())?;
            let mut next = Vec::new();
            for (types, p) in &partial {
                for (ty, q) in succ.iter().filter(|(_, q)| !q.is_zero()) {
                    let mut v: Vec<TypeId> = types.clone();
                    v.push(*ty);
                    next.push((v, p * q));
                }
            }
            partial = next;
        }
        let base = w.weight.clone();
        for (types, p) in partial {
            w.weight = &base * p;
            let mut c = w.clone();
            for (h, &ty) in c.hist.iter_mut().zip(&types) {
                h.push(ty);
            }
            c.types.push(types);
            out.push(c);
        }
        Ok(())
    }

    fn reports(&self, t: usize, w: World, act: &[TypeId], out: &mut Vec<World>) -> Result<()> {
        let g = self.game;
        let mut partial: Vec<(Vec<TypeId>, Rat)> = vec![(Vec::new(), w.weight.clone())];
        let mut k = 0;
        for a in 0..g.n_agents() {
            let dist = if self.controlled[a] {
                k += 1;
                vec![(act[k - 1], Rat::one())]
            } else if g.is_public(a) {
                vec![(w.types[t][a], Rat::one())]
            } else {
                let obs = Observation {
                    agent: a,
                    round: t,
                    own_types: &w.hist[a],
                    reports: &w.reports[..t],
                    decisions: &w.recommended,
                    types: &w.types[..t],
                    recommendation: None,
                };
                report(g, &self.p.profile[a], &obs)?
            };
            let mut next = Vec::new();
            for (r, p) in &partial {
                for (ty, q) in dist.iter().filter(|(_, q)| !q.is_zero()) {
                    let mut v = r.clone();
                    v.push(*ty);
                    next.push((v, p * q));
                }
            }
            partial = next;
        }
        for (r, p) in partial {
            let mut c = w.clone();
            c.weight = p;
            c.recommended.push(self.p.policy.decide(t, &r));
            c.reports.push(r);
            out.push(c);
        }
        Ok(())
    }

    fn private_stage(&mut self, t: usize, worlds: Vec<World>) -> Result<Rat> {
        let g = self.game;
        let choosers: Vec<AgentId> =
            self.p.controlled.iter().copied().filter(|&a| g.has_private_choice(t, a)).collect();
        let ranges: Vec<Vec<usize>> =
            choosers.iter().map(|&a| (0..g.private_labels(t, a).len()).collect()).collect();
        let layers: Vec<&[usize]> = ranges.iter().map(|r| r.as_slice()).collect();
        let actions = product(&layers);
        let mut total = Rat::zero();
        for group in self.group(worlds, t, true) {
            let mut best = None;
            for act in &actions {
                let mut next = Vec::new();
                for w in &group {
                    self.settle(t, w.clone(), &choosers, act, &mut next)?;
                }
                let v = self.round(t + 1, next)?;
                best = self.pick(best, v);
            }
            total += best.unwrap_or_else(Rat::zero);
        }
        Ok(total)
    }

    fn settle(&mut self, t: usize, w: World, choosers: &[AgentId], act: &[usize], out: &mut Vec<World>) -> Result<()> {
        let g = self.game;
        let rec = g.joint_decisions(t)[w.recommended[t - 1]].clone();
        let mut partial = vec![(rec.clone(), w.weight.clone())];
        for a in 0..g.n_agents() {
            if g.is_public(a) || !g.has_private_choice(t, a) {
                continue;
            }
            let dist = match choosers.iter().position(|&c| c == a) {
                Some(k) => vec![(act[k], Rat::one())],
                None => {
                    let obs = Observation {
                        agent: a,
                        round: t,
                        own_types: &w.hist[a],
                        reports: &w.reports[..=t],
                        decisions: &w.recommended,
                        types: &w.types[..t],
                        recommendation: Some(&rec),
                    };
                    private_decision(g, &self.p.profile[a], &obs)?
                }
            };
            let mut next = Vec::new();
            for (d, p) in &partial {
                for (x, q) in dist.iter().filter(|(_, q)| !q.is_zero()) {
                    let mut d = d.clone();
                    d.private[a] = *x;
                    next.push((d, p * q));
                }
            }
            partial = next;
        }
        let net = match &mut self.transfers {
            Some(cache) => {
                let r = RoundReports {
                    round: t,
                    prev_decision: if t == 1 { None } else { Some(w.recommended[t - 2]) },
                    prev: &w.reports[t - 1],
                    current: &w.reports[t],
                };
                Some(cache.get(r)?.net.clone())
            }
            None => None,
        };
        let types = &w.types[t];
        let public = g.public_agent().map(|p| types[p]);
        for (actual, p) in partial {
            let mut gain = Rat::zero();
            for a in 0..g.n_agents() {
                if self.p.weights[a].is_zero() || g.is_public(a) {
                    continue;
                }
                let mut x = g.utility(t, a, &actual, types[a], public);
                if let Some(net) = &net {
                    x += &net[a];
                }
                gain += &self.p.weights[a] * x;
            }
            let mut c = w.clone();
            c.payoff += gain;
            c.weight = p;
            c.decisions.push(actual);
            out.push(c);
        }
        Ok(())
    }
}

/// Optimal value of the problem's objective.
pub fn solve(p: &Problem<'_>) -> Result<Rat> {
    let g = p.policy.game();
    let n = g.n_agents();
    if p.profile.len() != n || p.weights.len() != n {
        return Err(Error::ProfileShapeMismatch(format!(
            "{} strategies and {} weights for {n} agents",
            p.profile.len(),
            p.weights.len()
        )));
    }
    let mut controlled = vec![false; n];
    for &a in &p.controlled {
        if a >= n || g.is_public(a) {
            return Err(Error::InvalidSpec(format!("agent {a} cannot be controlled")));
        }
        controlled[a] = true;
    }
    let mut revealed: Vec<AgentId> = p.controlled.iter().flat_map(|&a| g.reveals_to(a)).collect();
    revealed.sort_unstable();
    revealed.dedup();
    let transfers = match p.mechanism {
        Some(m) => Some(TransferCache::new(p.policy, m)?),
        None => None,
    };
    let init = g.initial_profile();
    let world = World {
        types: vec![init.clone()],
        reports: vec![init.clone()],
        recommended: Vec::new(),
        decisions: Vec::new(),
        hist: init.iter().map(|&t| vec![t]).collect(),
        payoff: Rat::zero(),
        weight: Rat::one(),
    };
    let mut s = Solver { p, game: g, transfers, controlled, revealed };
    s.round(1, vec![world])
}

fn unit(n: usize, agents: &[AgentId]) -> Vec<Rat> {
    let mut w = vec![Rat::zero(); n];
    for &a in agents {
        w[a] = Rat::one();
    }
    w
}

/// `Min`: the other agents jointly play against `agent`, which follows
/// `profile[agent]`; they pool everything they observe but do not see
/// `agent`'s type of the current round before reporting. `Max`: `agent` best-responds on its own
/// information to the rest of `profile`.
pub fn best_response_value(
    policy: &DecisionPolicy,
    mechanism: Option<&MechanismKind>,
    agent: AgentId,
    profile: &[Strategy],
    objective: Objective,
) -> Result<Rat> {
    let g = policy.game();
    let (controlled, info) = match objective {
        Objective::Min => (g.reporting_agents().into_iter().filter(|&a| a != agent).collect(), Info::Pooled),
        Objective::Max => (vec![agent], Info::Pooled),
    };
    solve(&Problem {
        policy,
        mechanism,
        controlled,
        profile,
        weights: unit(g.n_agents(), &[agent]),
        objective,
        info,
    })
}

/// Best joint value of a coalition sharing its information, against truthful
/// outsiders.
pub fn coalition_value(
    policy: &DecisionPolicy,
    mechanism: Option<&MechanismKind>,
    coalition: &[AgentId],
) -> Result<Rat> {
    let g = policy.game();
    let profile = truthful_profile(g);
    solve(&Problem {
        policy,
        mechanism,
        controlled: coalition.to_vec(),
        profile: &profile,
        weights: unit(g.n_agents(), coalition),
        objective: Objective::Max,
        info: Info::Pooled,
    })
}
