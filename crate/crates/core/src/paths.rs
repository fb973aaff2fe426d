//! Exact enumeration of play paths under a strategy profile.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::game::{Game, JointDecision, TypeId};
use crate::mechanism::{round_transfers, MechanismKind, RoundReports, RoundTransfers};
use crate::policy::DecisionPolicy;
use crate::rat::Rat;
use crate::strategy::{private_decision, report, Observation, Strategy};

/// A (terminal) play path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathState {
    pub round: usize,
    /// True type profiles, rounds `0..=round`.
    pub types: Vec<Vec<TypeId>>,
    /// Reported profiles, rounds `0..=round`; round 0 is the initial profile.
    pub reports: Vec<Vec<TypeId>>,
    /// Recommended joint decisions (indices), rounds `1..=round`.
    pub recommended: Vec<usize>,
    /// Decisions actually taken (recommended public part, chosen private parts).
    pub decisions: Vec<JointDecision>,
    pub probability: Rat,
    /// Realized utility per agent.
    pub utility: Vec<Rat>,
    /// Net transfer per agent so far (zero without a mechanism).
    pub transfers: Vec<Rat>,
    /// Cumulative `γ` per agent.
    pub gamma: Vec<Rat>,
    pub subsidy: Rat,
}

type TransferKey = (usize, Option<usize>, Vec<TypeId>, Vec<TypeId>);

/// Caches round transfers, which depend only on the designer's information.
pub struct TransferCache<'p> {
    policy: &'p DecisionPolicy,
    mechanism: MechanismKind,
    memo: HashMap<TransferKey, RoundTransfers>,
}

impl<'p> TransferCache<'p> {
    pub fn new(policy: &'p DecisionPolicy, mechanism: &MechanismKind) -> Result<Self> {
        mechanism.check(policy.game())?;
        Ok(TransferCache { policy, mechanism: mechanism.clone(), memo: HashMap::new() })
    }

    pub fn get(&mut self, r: RoundReports<'_>) -> Result<&RoundTransfers> {
        let key = (r.round, r.prev_decision, r.prev.to_vec(), r.current.to_vec());
        if !self.memo.contains_key(&key) {
            let rt = round_transfers(self.policy, &self.mechanism, r)?;
            self.memo.insert(key.clone(), rt);
        }
        Ok(&self.memo[&key])
    }
}

struct Walker<'a, 'p, F> {
    game: &'a Game,
    policy: &'p DecisionPolicy,
    profile: &'a [Strategy],
    transfers: Option<TransferCache<'p>>,
    state: PathState,
    hist: Vec<Vec<TypeId>>,
    visit: F,
}

impl<F: FnMut(&PathState)> Walker<'_, '_, F> {
    fn round(&mut self, t: usize) -> Result<()> {
        if t > self.game.rounds() {
            (self.visit)(&self.state);
            return Ok(());
        }
        self.state.types.push(Vec::with_capacity(self.game.n_agents()));
        let r = self.draw(t, 0);
        self.state.types.pop();
        r
    }

    fn draw(&mut self, t: usize, a: usize) -> Result<()> {
        let g = self.game;
        if a == g.n_agents() {
            self.state.reports.push(Vec::with_capacity(g.n_agents()));
            let r = self.report(t, 0);
            self.state.reports.pop();
            return r;
        }
        let prev = &self.state.types[t - 1];
        let prev_public = g.public_agent().map(|p| prev[p]);
        let dec = self.state.decisions.last();
        let succ = g.successors(a, t, prev[a], prev_public, dec)?.to_vec();
        for (ty, w) in succ {
            if w.is_zero() {
                continue;
            }
            let saved = self.state.probability.clone();
            self.state.probability *= &w;
            self.state.types[t].push(ty);
            self.hist[a].push(ty);
            let r = self.draw(t, a + 1);
            self.hist[a].pop();
            self.state.types[t].pop();
            self.state.probability = saved;
            r?;
        }
        Ok(())
    }

    fn report(&mut self, t: usize, a: usize) -> Result<()> {
        let g = self.game;
        if a == g.n_agents() {
            let rec = self.policy.decide(t, &self.state.reports[t]);
            self.state.recommended.push(rec);
            let mut chosen = g.joint_decisions(t)[rec].clone();
            let r = self.private(t, 0, &mut chosen);
            self.state.recommended.pop();
            return r;
        }
        let dist = if g.is_public(a) {
            vec![(self.state.types[t][a], Rat::one())]
        } else {
            let obs = Observation {
                agent: a,
                round: t,
                own_types: &self.hist[a],
                reports: &self.state.reports[..t],
                decisions: &self.state.recommended,
                types: &self.state.types[..t],
                recommendation: None,
            };
            report(g, &self.profile[a], &obs)?
        };
        for (ty, w) in dist {
            if w.is_zero() {
                continue;
            }
            let saved = self.state.probability.clone();
            self.state.probability *= &w;
            self.state.reports[t].push(ty);
            let r = self.report(t, a + 1);
            self.state.reports[t].pop();
            self.state.probability = saved;
            r?;
        }
        Ok(())
    }

    fn private(&mut self, t: usize, a: usize, chosen: &mut JointDecision) -> Result<()> {
        let g = self.game;
        if a == g.n_agents() {
            return self.settle(t, chosen.clone());
        }
        if g.is_public(a) || !g.has_private_choice(t, a) {
            return self.private(t, a + 1, chosen);
        }
        let rec = g.joint_decisions(t)[self.state.recommended[t - 1]].clone();
        let obs = Observation {
            agent: a,
            round: t,
            own_types: &self.hist[a],
            reports: &self.state.reports[..=t],
            decisions: &self.state.recommended,
            types: &self.state.types[..t],
            recommendation: Some(&rec),
        };
        let dist = private_decision(g, &self.profile[a], &obs)?;
        for (x, w) in dist {
            if w.is_zero() {
                continue;
            }
            let saved = self.state.probability.clone();
            self.state.probability *= &w;
            let old = chosen.private[a];
            chosen.private[a] = x;
            let r = self.private(t, a + 1, chosen);
            chosen.private[a] = old;
            self.state.probability = saved;
            r?;
        }
        Ok(())
    }

    fn settle(&mut self, t: usize, actual: JointDecision) -> Result<()> {
        let g = self.game;
        let types = &self.state.types[t];
        let public = g.public_agent().map(|p| types[p]);
        let gains: Vec<Rat> = (0..g.n_agents())
            .map(|a| if g.is_public(a) { Rat::zero() } else { g.utility(t, a, &actual, types[a], public) })
            .collect();
        let rt = match &mut self.transfers {
            Some(cache) => {
                let prev_decision = if t == 1 { None } else { Some(self.state.recommended[t - 2]) };
                let r = RoundReports {
                    round: t,
                    prev_decision,
                    prev: &self.state.reports[t - 1],
                    current: &self.state.reports[t],
                };
                Some(cache.get(r)?.clone())
            }
            None => None,
        };
        let saved = (
            self.state.utility.clone(),
            self.state.transfers.clone(),
            self.state.gamma.clone(),
            self.state.subsidy.clone(),
        );
        for (u, x) in self.state.utility.iter_mut().zip(&gains) {
            *u += x;
        }
        if let Some(rt) = &rt {
            for a in 0..g.n_agents() {
                self.state.transfers[a] += &rt.net[a];
                self.state.gamma[a] += &rt.gamma[a];
            }
            self.state.subsidy += &rt.subsidy;
        }
        self.state.decisions.push(actual);
        self.state.round = t;
        let r = self.round(t + 1);
        self.state.round = t - 1;
        self.state.decisions.pop();
        (self.state.utility, self.state.transfers, self.state.gamma, self.state.subsidy) = saved;
        r
    }
}

/// Calls `visit` on every terminal path with positive probability.
pub fn enumerate_paths<F: FnMut(&PathState)>(
    policy: &DecisionPolicy,
    profile: &[Strategy],
    mechanism: Option<&MechanismKind>,
    visit: F,
) -> Result<()> {
    let game = policy.game();
    if profile.len() != game.n_agents() {
        return Err(Error::ProfileShapeMismatch(format!(
            "{} strategies for {} agents",
            profile.len(),
            game.n_agents()
        )));
    }
    let n = game.n_agents();
    let init = game.initial_profile();
    let state = PathState {
        round: 0,
        types: vec![init.clone()],
        reports: vec![init.clone()],
        recommended: Vec::new(),
        decisions: Vec::new(),
        probability: Rat::one(),
        utility: vec![Rat::zero(); n],
        transfers: vec![Rat::zero(); n],
        gamma: vec![Rat::zero(); n],
        subsidy: Rat::zero(),
    };
    let transfers = match mechanism {
        Some(m) => Some(TransferCache::new(policy, m)?),
        None => None,
    };
    let mut w = Walker {
        game,
        policy,
        profile,
        transfers,
        state,
        hist: init.iter().map(|&t| vec![t]).collect(),
        visit,
    };
    w.round(1)
}

/// All terminal paths, materialized.
pub fn collect_paths(
    policy: &DecisionPolicy,
    profile: &[Strategy],
    mechanism: Option<&MechanismKind>,
) -> Result<Vec<PathState>> {
    let mut out = Vec::new();
    enumerate_paths(policy, profile, mechanism, |p| out.push(p.clone()))?;
    Ok(out)
}
