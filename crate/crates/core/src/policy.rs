//! Efficient decision policy and trustful expected-utility values.
//!
//! A *stage* of round `t` is described by the round `t-1` decision, the round
//! `t-1` public type and a mixed profile in which each agent holds either its
//! round `t-1` or its round `t` type. The value of a stage is the vector of
//! expected utilities from round `t` on, assuming every remaining report is
//! truthful and decisions follow the efficient policy. Values are computed
//! lazily and memoized.

use std::collections::HashMap;
use std::sync::RwLock;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::game::{Game, JointDecision, TypeId};
use crate::rat::Rat;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct StageKey {
    round: usize,
    prev_decision: Option<usize>,
    prev_public: Option<TypeId>,
    profile: Vec<TypeId>,
}

#[derive(Clone, Debug)]
struct Choice {
    decision: usize,
    tied: bool,
    value: Vec<Rat>,
}

/// The efficient policy together with its value table.
#[derive(Debug)]
pub struct DecisionPolicy {
    game: Game,
    stages: RwLock<HashMap<StageKey, Vec<Rat>>>,
    choices: RwLock<HashMap<(usize, Vec<TypeId>), Choice>>,
}

/// One row of [`DecisionPolicy::dump`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolicyEntry {
    pub round: usize,
    pub profile: Vec<TypeId>,
    pub decision: usize,
    pub tied: bool,
    pub value: Vec<Rat>,
}

pub fn compute_efficient_policy(game: &Game) -> DecisionPolicy {
    DecisionPolicy::new(game.clone())
}

impl DecisionPolicy {
    pub fn new(game: Game) -> Self {
        DecisionPolicy { game, stages: RwLock::new(HashMap::new()), choices: RwLock::new(HashMap::new()) }
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    fn zeros(&self) -> Vec<Rat> {
        vec![Rat::zero(); self.game.n_agents()]
    }

    /// Public type component of a round-`t` profile, if any.
    pub fn public_of(&self, profile: &[TypeId]) -> Option<TypeId> {
        self.game.public_agent().map(|p| profile[p])
    }

    fn choice(&self, round: usize, profile: &[TypeId]) -> Choice {
        let key = (round, profile.to_vec());
        if let Some(c) = self.choices.read().unwrap().get(&key) {
            return c.clone();
        }
        let g = &self.game;
        let public = self.public_of(profile);
        let reporting = g.reporting_agents();
        let mut best: Option<Choice> = None;
        for (idx, d) in g.joint_decisions(round).iter().enumerate() {
            let mut value = self.stage_value(round + 1, Some(idx), public, profile);
            for &a in &reporting {
                value[a] += g.utility(round, a, d, profile[a], public);
            }
            let total: Rat = reporting.iter().map(|&a| &value[a]).sum();
            match &mut best {
                None => best = Some(Choice { decision: idx, tied: false, value }),
                Some(b) => {
                    let bt: Rat = reporting.iter().map(|&a| &b.value[a]).sum();
                    if total > bt {
                        *b = Choice { decision: idx, tied: false, value };
                    } else if total == bt {
                        b.tied = true;
                    }
                }
            }
        }
        let c = best.expect("every round has a decision");
        self.choices.write().unwrap().insert(key, c.clone());
        c
    }

    /// Efficient joint decision (index into [`Game::joint_decisions`]) for a
    /// complete round-`round` reported profile.
    pub fn decide(&self, round: usize, profile: &[TypeId]) -> usize {
        self.choice(round, profile).decision
    }

    pub fn decision(&self, round: usize, profile: &[TypeId]) -> &JointDecision {
        &self.game.joint_decisions(round)[self.decide(round, profile)]
    }

    /// Expected utility vector from round `round` on (the round's own utility
    /// included) once every round-`round` type is known.
    pub fn full_value(&self, round: usize, profile: &[TypeId]) -> Vec<Rat> {
        self.choice(round, profile).value
    }

    /// Value of a stage of round `round`. Entries of `profile` are round
    /// `round - 1` (not yet updated) or round `round` types.
    pub fn stage_value(
        &self,
        round: usize,
        prev_decision: Option<usize>,
        prev_public: Option<TypeId>,
        profile: &[TypeId],
    ) -> Vec<Rat> {
        let g = &self.game;
        if round > g.rounds() {
            return self.zeros();
        }
        let key = StageKey { round, prev_decision, prev_public, profile: profile.to_vec() };
        if let Some(v) = self.stages.read().unwrap().get(&key) {
            return v.clone();
        }
        let pending = (0..g.n_agents()).find(|&a| g.ty(profile[a]).round + 1 == round);
        let value = match pending {
            None => self.full_value(round, profile),
            Some(a) => {
                let prev = prev_decision.map(|d| &g.joint_decisions(round - 1)[d]);
                let succ = g
                    .successors(a, round, profile[a], prev_public, prev)
                    .expect("validated kernel is complete");
                let mut acc = self.zeros();
                let mut next = profile.to_vec();
                for (ty, w) in succ {
                    next[a] = *ty;
                    let v = self.stage_value(round, prev_decision, prev_public, &next);
                    for (x, y) in acc.iter_mut().zip(v) {
                        *x += w * y;
                    }
                }
                acc
            }
        };
        self.stages.write().unwrap().insert(key, value.clone());
        value
    }

    /// Expected total utility per agent from the initial state.
    pub fn initial_value(&self) -> Vec<Rat> {
        let init = self.game.initial_profile();
        let public = self.public_of(&init);
        self.stage_value(1, None, public, &init)
    }

    /// Sum of all agents' expected utilities under truthful play.
    pub fn efficient_total(&self) -> Rat {
        self.initial_value().iter().sum()
    }

    /// Value of the stage after the first `j` agents (in index order) have
    /// reported their round-`round` types. `prev_decision` is the round
    /// `round - 1` decision and `prev_public` the round `round - 1` public type.
    pub fn upsilon(
        &self,
        round: usize,
        j: usize,
        profile: &[TypeId],
        prev_decision: Option<usize>,
        prev_public: Option<TypeId>,
    ) -> Result<Vec<Rat>> {
        let g = &self.game;
        if round == 0 || round > g.rounds() + 1 || profile.len() != g.n_agents() || j > g.n_agents() {
            return Err(Error::ProfileShapeMismatch(format!(
                "round {round}, prefix {j}, {} entries for {} agents",
                profile.len(),
                g.n_agents()
            )));
        }
        for (a, &ty) in profile.iter().enumerate() {
            let want = if a < j { round } else { round - 1 };
            let t = g.ty(ty);
            if t.agent != a || t.round != want {
                return Err(Error::ProfileShapeMismatch(format!(
                    "entry {a} is {:?} of round {}, expected a round-{want} type of {}",
                    t.label,
                    t.round,
                    g.agent_name(a)
                )));
            }
        }
        if (prev_decision.is_none()) != (round == 1) {
            return Err(Error::ProfileShapeMismatch("previous decision must be given exactly after round 1".into()));
        }
        Ok(self.stage_value(round, prev_decision, prev_public, profile))
    }

    /// Every complete reported profile of every round with its decision.
    pub fn dump(&self) -> Vec<PolicyEntry> {
        let g = &self.game;
        let mut out = Vec::new();
        for t in 1..=g.rounds() {
            let layers: Vec<&[TypeId]> = (0..g.n_agents()).map(|a| g.types_at(a, t)).collect();
            for profile in product(&layers) {
                let c = self.choice(t, &profile);
                out.push(PolicyEntry { round: t, profile, decision: c.decision, tied: c.tied, value: c.value });
            }
        }
        out
    }
}

/// Cartesian product in row-major order.
pub fn product<T: Clone>(layers: &[&[T]]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for layer in layers {
        let mut next = Vec::with_capacity(out.len() * layer.len());
        for prefix in &out {
            for x in layer.iter() {
                let mut p = prefix.clone();
                p.push(x.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}
