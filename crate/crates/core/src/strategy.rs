//! Reporting strategies.
//!
//! A strategy is a small rule program evaluated on an agent's observation:
//! its own type history, the public report and decision history, and any
//! type revelation channel the scenario grants. Randomization is behavioral,
//! through explicit [`Rule::Mix`] weights.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::game::{AgentId, Game, JointDecision, TypeId};
use crate::rat::{self, Rat};

/// Round designator inside a rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RoundRef {
    Abs(usize),
    /// The round being played.
    Cur,
    /// `k` rounds before the round being played.
    Prev(usize),
}

impl RoundRef {
    pub fn resolve(&self, t: usize) -> Option<usize> {
        match self {
            RoundRef::Abs(r) => Some(*r),
            RoundRef::Cur => Some(t),
            RoundRef::Prev(k) => t.checked_sub(*k),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ref {
    /// Public report of `agent` in a past round.
    Report { agent: AgentId, round: RoundRef },
    OwnType { round: RoundRef },
    /// Past true type of `agent`, available only through a reveal channel.
    Revealed { agent: AgentId, round: RoundRef },
    /// Public decision of a past round (label only).
    Decision { round: RoundRef },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Operand {
    Ann(Ref),
    Label(Ref),
    Const(Rat),
    Str(String),
    /// The round being played, as a number.
    Round,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    fn apply<T: PartialOrd>(self, a: &T, b: &T) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cond {
    True,
    Not(Box<Cond>),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
    Cmp(Operand, CmpOp, Operand),
}

/// Report rule: yields a distribution over the agent's current-round types.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    Truth,
    Label(String),
    /// The current-round type carrying this annotation.
    Ann(Rat),
    /// The current-round type annotated `1 - own annotation`.
    Flip,
    If(Cond, Box<Rule>, Box<Rule>),
    Mix(Vec<(Rat, Rule)>),
}

/// Private decision rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrivateRule {
    Follow,
    Choose(String),
    If(Cond, Box<PrivateRule>, Box<PrivateRule>),
    Mix(Vec<(Rat, PrivateRule)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    pub name: String,
    /// Report rule for specific rounds; other rounds use `default`.
    pub rounds: BTreeMap<usize, Rule>,
    pub default: Rule,
    pub private: PrivateRule,
}

impl Strategy {
    pub fn new(name: &str, default: Rule) -> Self {
        Strategy { name: name.to_string(), rounds: BTreeMap::new(), default, private: PrivateRule::Follow }
    }

    pub fn at(mut self, round: usize, rule: Rule) -> Self {
        self.rounds.insert(round, rule);
        self
    }

    pub fn with_private(mut self, rule: PrivateRule) -> Self {
        self.private = rule;
        self
    }

    pub fn rule(&self, round: usize) -> &Rule {
        self.rounds.get(&round).unwrap_or(&self.default)
    }

    pub fn is_truthful(&self) -> bool {
        self.default == Rule::Truth
            && self.rounds.values().all(|r| *r == Rule::Truth)
            && self.private == PrivateRule::Follow
    }

    /// Checks that every reference can be bound for `agent` in `game`.
    pub fn check(&self, game: &Game, agent: AgentId) -> Result<()> {
        for t in 1..=game.rounds() {
            let ctx = Ctx { game, agent, round: t, strategy: &self.name, private: false };
            ctx.rule(self.rule(t))?;
            ctx_private(&ctx).prule(&self.private)?;
        }
        Ok(())
    }
}

fn ctx_private<'a>(c: &Ctx<'a>) -> Ctx<'a> {
    Ctx { private: true, ..*c }
}

#[derive(Clone, Copy)]
struct Ctx<'a> {
    game: &'a Game,
    agent: AgentId,
    round: usize,
    strategy: &'a str,
    private: bool,
}

impl Ctx<'_> {
    fn unbound(&self, what: String) -> Error {
        Error::UnboundScriptReference(format!(
            "strategy {:?} of {} at round {}: {what}",
            self.strategy,
            self.game.agent_name(self.agent),
            self.round
        ))
    }

    fn reference(&self, r: &Ref) -> Result<()> {
        let visible_reports = if self.private { self.round } else { self.round.saturating_sub(1) };
        match r {
            Ref::Report { agent, round } => {
                let rr = round.resolve(self.round).ok_or_else(|| self.unbound("report before round 0".into()))?;
                if *agent >= self.game.n_agents() {
                    return Err(self.unbound(format!("unknown agent {agent}")));
                }
                if rr > visible_reports {
                    return Err(self.unbound(format!("report of round {rr} is not yet public")));
                }
            }
            Ref::OwnType { round } => {
                let rr = round.resolve(self.round).ok_or_else(|| self.unbound("type before round 0".into()))?;
                if rr > self.round {
                    return Err(self.unbound(format!("own type of future round {rr}")));
                }
            }
            Ref::Revealed { agent, round } => {
                let rr = round.resolve(self.round).ok_or_else(|| self.unbound("type before round 0".into()))?;
                if !self.game.reveals_to(self.agent).contains(agent) {
                    return Err(self.unbound(format!(
                        "no reveal channel from {} to {}",
                        self.game.agent_name(*agent),
                        self.game.agent_name(self.agent)
                    )));
                }
                if rr >= self.round {
                    return Err(self.unbound(format!("revealed type of round {rr} is not yet past")));
                }
            }
            Ref::Decision { round } => {
                let rr = round.resolve(self.round).ok_or_else(|| self.unbound("decision before round 1".into()))?;
                if rr == 0 || rr > visible_reports {
                    return Err(self.unbound(format!("decision of round {rr} is not known")));
                }
            }
        }
        Ok(())
    }

    fn operand(&self, o: &Operand) -> Result<()> {
        match o {
            Operand::Ann(Ref::Decision { .. }) => Err(self.unbound("decisions carry no annotation".into())),
            Operand::Ann(r) | Operand::Label(r) => self.reference(r),
            _ => Ok(()),
        }
    }

    fn cond(&self, c: &Cond) -> Result<()> {
        match c {
            Cond::True => Ok(()),
            Cond::Not(a) => self.cond(a),
            Cond::And(a, b) | Cond::Or(a, b) => {
                self.cond(a)?;
                self.cond(b)
            }
            Cond::Cmp(a, _, b) => {
                self.operand(a)?;
                self.operand(b)
            }
        }
    }

    fn rule(&self, r: &Rule) -> Result<()> {
        match r {
            Rule::If(c, a, b) => {
                self.cond(c)?;
                self.rule(a)?;
                self.rule(b)
            }
            Rule::Mix(parts) => parts.iter().try_for_each(|(_, r)| self.rule(r)),
            _ => Ok(()),
        }
    }

    fn prule(&self, r: &PrivateRule) -> Result<()> {
        match r {
            PrivateRule::If(c, a, b) => {
                self.cond(c)?;
                self.prule(a)?;
                self.prule(b)
            }
            PrivateRule::Mix(parts) => parts.iter().try_for_each(|(_, r)| self.prule(r)),
            _ => Ok(()),
        }
    }
}

/// What an agent knows when it acts in a round.
#[derive(Clone, Debug)]
pub struct Observation<'a> {
    pub agent: AgentId,
    pub round: usize,
    /// Own true types, rounds `0..=round`.
    pub own_types: &'a [TypeId],
    /// Public reports of all agents: rounds `0..round` when reporting,
    /// `0..=round` when making the private decision.
    pub reports: &'a [Vec<TypeId>],
    /// Public decision indices (into the joint decision lists) of rounds
    /// `1..round` (and `round` itself when making the private decision).
    pub decisions: &'a [usize],
    /// True types of all agents for rounds `0..round`; only the entries of
    /// agents revealing to `agent` may be read.
    pub types: &'a [Vec<TypeId>],
    pub recommendation: Option<&'a JointDecision>,
}

enum Value {
    Num(Rat),
    Str(String),
}

struct Eval<'a, 'b> {
    game: &'a Game,
    obs: &'a Observation<'b>,
    strategy: &'a str,
}

impl Eval<'_, '_> {
    fn unreachable(&self, reason: String) -> Error {
        Error::UnreachableObservation {
            agent: self.game.agent_name(self.obs.agent).to_string(),
            strategy: self.strategy.to_string(),
            round: self.obs.round,
            reason,
        }
    }

    fn unbound(&self, what: String) -> Error {
        Error::UnboundScriptReference(format!(
            "strategy {:?} of {} at round {}: {what}",
            self.strategy,
            self.game.agent_name(self.obs.agent),
            self.obs.round
        ))
    }

    fn lookup(&self, r: &Ref) -> Result<Option<TypeId>> {
        let t = self.obs.round;
        let res = |rr: &RoundRef| rr.resolve(t).ok_or_else(|| self.unbound(format!("{rr:?}")));
        Ok(Some(match r {
            Ref::Report { agent, round } => {
                let rr = res(round)?;
                *self.obs.reports.get(rr).and_then(|p| p.get(*agent)).ok_or_else(|| self.unbound(format!("report {rr}")))?
            }
            Ref::OwnType { round } => {
                let rr = res(round)?;
                *self.obs.own_types.get(rr).ok_or_else(|| self.unbound(format!("own type {rr}")))?
            }
            Ref::Revealed { agent, round } => {
                let rr = res(round)?;
                if !self.game.reveals_to(self.obs.agent).contains(agent) || rr >= t {
                    return Err(self.unbound(format!("revealed type {rr}")));
                }
                *self.obs.types.get(rr).and_then(|p| p.get(*agent)).ok_or_else(|| self.unbound(format!("revealed {rr}")))?
            }
            Ref::Decision { .. } => return Ok(None),
        }))
    }

    fn operand(&self, o: &Operand) -> Result<Value> {
        Ok(match o {
            Operand::Const(c) => Value::Num(c.clone()),
            Operand::Str(s) => Value::Str(s.clone()),
            Operand::Round => Value::Num(rat::int(self.obs.round as i64)),
            Operand::Label(Ref::Decision { round }) => {
                let rr = round.resolve(self.obs.round).ok_or_else(|| self.unbound(format!("{round:?}")))?;
                let idx = *self
                    .obs
                    .decisions
                    .get(rr.wrapping_sub(1))
                    .ok_or_else(|| self.unbound(format!("decision {rr}")))?;
                let d = &self.game.joint_decisions(rr)[idx];
                Value::Str(self.game.spec().decisions[rr - 1].public[d.public].clone())
            }
            Operand::Label(r) => Value::Str(self.game.label(self.lookup(r)?.unwrap()).to_string()),
            Operand::Ann(r) => {
                let id = self.lookup(r)?.ok_or_else(|| self.unbound("decision annotation".into()))?;
                Value::Num(
                    self.game
                        .annotation(id)
                        .cloned()
                        .ok_or_else(|| self.unreachable(format!("type {:?} has no annotation", self.game.label(id))))?,
                )
            }
        })
    }

    fn cond(&self, c: &Cond) -> Result<bool> {
        Ok(match c {
            Cond::True => true,
            Cond::Not(a) => !self.cond(a)?,
            Cond::And(a, b) => self.cond(a)? && self.cond(b)?,
            Cond::Or(a, b) => self.cond(a)? || self.cond(b)?,
            Cond::Cmp(a, op, b) => match (self.operand(a)?, self.operand(b)?) {
                (Value::Num(x), Value::Num(y)) => op.apply(&x, &y),
                (Value::Str(x), Value::Str(y)) => op.apply(&x, &y),
                _ => return Err(self.unreachable("comparison of a number with a label".into())),
            },
        })
    }

    fn rule(&self, r: &Rule, weight: Rat, out: &mut Vec<(TypeId, Rat)>) -> Result<()> {
        let g = self.game;
        let (a, t) = (self.obs.agent, self.obs.round);
        let pick = |id: Option<TypeId>, what: String| id.ok_or_else(|| self.unreachable(what));
        let id = match r {
            Rule::Truth => self.obs.own_types[t],
            Rule::Label(l) => pick(g.type_by_label(a, t, l), format!("no round-{t} type {l:?}"))?,
            Rule::Ann(p) => pick(g.type_by_annotation(a, t, p), format!("no round-{t} type annotated {}", rat::fmt(p)))?,
            Rule::Flip => {
                let own = self.obs.own_types[t];
                let p = g.annotation(own).ok_or_else(|| self.unreachable("own type has no annotation".into()))?;
                let q = rat::one() - p;
                pick(g.type_by_annotation(a, t, &q), format!("no round-{t} type annotated {}", rat::fmt(&q)))?
            }
            Rule::If(c, x, y) => return self.rule(if self.cond(c)? { x } else { y }, weight, out),
            Rule::Mix(parts) => {
                check_weights(parts.iter().map(|(w, _)| w)).map_err(|e| self.unreachable(e))?;
                for (w, sub) in parts {
                    if !w.is_zero() {
                        self.rule(sub, &weight * w, out)?;
                    }
                }
                return Ok(());
            }
        };
        push(out, id, weight);
        Ok(())
    }

    fn prule(&self, r: &PrivateRule, weight: Rat, out: &mut Vec<(usize, Rat)>) -> Result<()> {
        let g = self.game;
        let (a, t) = (self.obs.agent, self.obs.round);
        let idx = match r {
            PrivateRule::Follow => self.obs.recommendation.map_or(0, |d| d.private[a]),
            PrivateRule::Choose(l) => g
                .private_labels(t, a)
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| self.unreachable(format!("no private decision {l:?}")))?,
            PrivateRule::If(c, x, y) => return self.prule(if self.cond(c)? { x } else { y }, weight, out),
            PrivateRule::Mix(parts) => {
                check_weights(parts.iter().map(|(w, _)| w)).map_err(|e| self.unreachable(e))?;
                for (w, sub) in parts {
                    if !w.is_zero() {
                        self.prule(sub, &weight * w, out)?;
                    }
                }
                return Ok(());
            }
        };
        push(out, idx, weight);
        Ok(())
    }
}

fn push<K: PartialEq>(out: &mut Vec<(K, Rat)>, k: K, w: Rat) {
    match out.iter_mut().find(|(x, _)| *x == k) {
        Some((_, acc)) => *acc += w,
        None => out.push((k, w)),
    }
}

fn check_weights<'a>(ws: impl Iterator<Item = &'a Rat>) -> std::result::Result<(), String> {
    let mut total = Rat::zero();
    for w in ws {
        if *w < Rat::zero() {
            return Err(format!("negative mixing weight {}", rat::fmt(w)));
        }
        total += w;
    }
    if total.is_one() {
        Ok(())
    } else {
        Err(format!("mixing weights sum to {}", rat::fmt(&total)))
    }
}

/// Report distribution of `strategy` at the observation.
pub fn report(game: &Game, strategy: &Strategy, obs: &Observation<'_>) -> Result<Vec<(TypeId, Rat)>> {
    let mut out = Vec::new();
    let ev = Eval { game, obs, strategy: &strategy.name };
    ev.rule(strategy.rule(obs.round), Rat::one(), &mut out)?;
    Ok(out)
}

/// Private decision distribution (indices into the agent's private labels).
pub fn private_decision(game: &Game, strategy: &Strategy, obs: &Observation<'_>) -> Result<Vec<(usize, Rat)>> {
    let mut out = Vec::new();
    let ev = Eval { game, obs, strategy: &strategy.name };
    ev.prule(&strategy.private, Rat::one(), &mut out)?;
    Ok(out)
}

pub fn truthful(game: &Game, agent: AgentId) -> Strategy {
    let _ = (game, agent);
    Strategy::new("truthful", Rule::Truth)
}

pub fn truthful_profile(game: &Game) -> Vec<Strategy> {
    (0..game.n_agents()).map(|a| truthful(game, a)).collect()
}

/// Named strategies of one agent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategySet {
    pub agent: AgentId,
    pub strategies: Vec<Strategy>,
}

impl StrategySet {
    pub fn new(agent: AgentId, strategies: Vec<Strategy>) -> Result<Self> {
        for (k, s) in strategies.iter().enumerate() {
            if strategies[..k].iter().any(|o| o.name == s.name) {
                return Err(Error::InvalidSpec(format!("duplicate strategy name {:?}", s.name)));
            }
        }
        Ok(StrategySet { agent, strategies })
    }

    pub fn names(&self) -> Vec<&str> {
        self.strategies.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&Strategy> {
        self.strategies.iter().find(|s| s.name == name)
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_must_sum_to_one() {
        assert!(check_weights([rat::ratio(1, 2), rat::ratio(1, 2)].iter()).is_ok());
        assert!(check_weights([rat::ratio(1, 2), rat::ratio(1, 3)].iter()).is_err());
        assert!(check_weights([rat::ratio(3, 2), rat::ratio(-1, 2)].iter()).is_err());
    }

    #[test]
    fn round_refs() {
        assert_eq!(RoundRef::Prev(1).resolve(3), Some(2));
        assert_eq!(RoundRef::Prev(4).resolve(3), None);
        assert_eq!(RoundRef::Cur.resolve(3), Some(3));
    }
}
