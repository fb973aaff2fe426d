//! The finite-horizon game model.
//!
//! A round `t` (1-based) proceeds as: every agent's type is drawn from the
//! kernel given its round `t-1` type, the round `t-1` public type and the round
//! `t-1` decision; agents report; the designer fixes the round `t` decision from
//! the reports; agents collect `u(x_t, θ_t)`. Round 0 carries the fixed,
//! publicly known initial types.
//!
//! [`GameSpec`] is the plain, label-based description (what scenario files
//! contain). [`validate`] checks it and produces an indexed [`Game`] that the
//! rest of the crate works with.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rat::{self, Rat};

pub type AgentId = usize;

/// Index of a type in [`Game::types`]. Types are per-round entities, so the id
/// also identifies the round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Agent {
    pub name: String,
    /// A public agent carries a publicly observed state: it always reports
    /// truthfully, has no utility and takes part in no transfer.
    pub public: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgentType {
    pub agent: AgentId,
    pub round: usize,
    pub label: String,
    /// Probability that the final type is HIGH, for probability-chain scenarios.
    pub annotation: Option<Rat>,
}

/// Decision spaces of one round. An empty private list means the agent has a
/// single implicit private decision `"-"`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RoundDecisions {
    pub public: Vec<String>,
    pub private: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JointDecision {
    pub public: usize,
    pub private: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Slot {
    Any,
    Is(String),
}

impl Slot {
    pub fn is(label: &str) -> Self {
        Slot::Is(label.to_string())
    }
}

/// Match conditions shared by kernel rows and utility entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    pub own_type: Slot,
    pub public_type: Slot,
    pub public: Slot,
    pub private: Vec<(AgentId, String)>,
}

impl Pattern {
    pub fn any() -> Self {
        Pattern { own_type: Slot::Any, public_type: Slot::Any, public: Slot::Any, private: Vec::new() }
    }

    pub fn own(label: &str) -> Self {
        Pattern { own_type: Slot::is(label), ..Pattern::any() }
    }

    pub fn with_public(mut self, label: &str) -> Self {
        self.public = Slot::is(label);
        self
    }

    pub fn with_private(mut self, agent: AgentId, label: &str) -> Self {
        self.private.push((agent, label.to_string()));
        self
    }

    pub fn with_public_type(mut self, label: &str) -> Self {
        self.public_type = Slot::is(label);
        self
    }
}

/// Transition row: the round `round` type distribution of `agent` when the
/// round `round - 1` state matches `pattern`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelRow {
    pub agent: AgentId,
    pub round: usize,
    pub pattern: Pattern,
    pub outcomes: Vec<(String, Rat)>,
}

/// Utility of `agent` in `round` when the round's decision and types match
/// `pattern`. Unlisted combinations are worth zero; the first match wins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UtilityEntry {
    pub round: usize,
    pub agent: AgentId,
    pub pattern: Pattern,
    pub value: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GameSpec {
    pub name: String,
    pub rounds: usize,
    pub agents: Vec<Agent>,
    pub types: Vec<AgentType>,
    /// Initial (round 0) type label per agent.
    pub initial: Vec<String>,
    /// Decision spaces for rounds `1..=rounds`, stored at index `round - 1`.
    pub decisions: Vec<RoundDecisions>,
    pub kernel: Vec<KernelRow>,
    pub utilities: Vec<UtilityEntry>,
    /// `(from, to)`: `to` observes the past types of `from`.
    pub reveal: Vec<(AgentId, AgentId)>,
}

impl GameSpec {
    pub fn new(name: &str, rounds: usize) -> Self {
        GameSpec {
            name: name.to_string(),
            rounds,
            decisions: vec![RoundDecisions::default(); rounds],
            ..Default::default()
        }
    }

    pub fn add_agent(&mut self, name: &str, public: bool) -> AgentId {
        self.agents.push(Agent { name: name.to_string(), public });
        self.initial.push(String::new());
        self.agents.len() - 1
    }

    pub fn add_type(&mut self, agent: AgentId, round: usize, label: &str, annotation: Option<Rat>) {
        self.types.push(AgentType { agent, round, label: label.to_string(), annotation });
    }

    pub fn set_initial(&mut self, agent: AgentId, label: &str) {
        self.initial[agent] = label.to_string();
    }

    pub fn set_public_decisions(&mut self, round: usize, labels: &[&str]) {
        self.decisions[round - 1].public = labels.iter().map(|s| s.to_string()).collect();
    }

    pub fn set_private_decisions(&mut self, round: usize, agent: AgentId, labels: &[&str]) {
        let rd = &mut self.decisions[round - 1];
        if rd.private.len() <= agent {
            rd.private.resize(agent + 1, Vec::new());
        }
        rd.private[agent] = labels.iter().map(|s| s.to_string()).collect();
    }

    pub fn add_kernel(&mut self, agent: AgentId, round: usize, pattern: Pattern, outcomes: Vec<(&str, Rat)>) {
        self.kernel.push(KernelRow {
            agent,
            round,
            pattern,
            outcomes: outcomes.into_iter().map(|(l, p)| (l.to_string(), p)).collect(),
        });
    }

    pub fn add_utility(&mut self, round: usize, agent: AgentId, pattern: Pattern, value: Rat) {
        self.utilities.push(UtilityEntry { round, agent, pattern, value });
    }

    pub fn agent_id(&self, name: &str) -> Option<AgentId> {
        self.agents.iter().position(|a| a.name == name)
    }
}

#[derive(Clone, Debug)]
struct Resolved {
    own_type: Option<TypeId>,
    public_type: Option<TypeId>,
    public: Option<usize>,
    private: Vec<(AgentId, usize)>,
}

impl Resolved {
    fn matches(&self, own: TypeId, public_type: Option<TypeId>, decision: Option<&JointDecision>) -> bool {
        if self.own_type.is_some_and(|t| t != own) {
            return false;
        }
        if let Some(pt) = self.public_type {
            if public_type != Some(pt) {
                return false;
            }
        }
        match decision {
            None => self.public.is_none() && self.private.is_empty(),
            Some(d) => {
                self.public.is_none_or(|p| p == d.public)
                    && self.private.iter().all(|&(a, x)| d.private[a] == x)
            }
        }
    }
}

#[derive(Clone, Debug)]
struct ResolvedRow {
    cond: Resolved,
    outcomes: Vec<(TypeId, Rat)>,
}

#[derive(Clone, Debug)]
struct ResolvedUtility {
    cond: Resolved,
    value: Rat,
}

/// A validated game with label lookups resolved to indices.
#[derive(Clone, Debug)]
pub struct Game {
    spec: GameSpec,
    public_agent: Option<AgentId>,
    by_round: Vec<Vec<Vec<TypeId>>>,
    label_index: HashMap<(AgentId, usize, String), TypeId>,
    initial: Vec<TypeId>,
    joint: Vec<Vec<JointDecision>>,
    kernel: Vec<Vec<Vec<ResolvedRow>>>,
    utility: Vec<Vec<Vec<ResolvedUtility>>>,
}

impl PartialEq for Game {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

/// Checks every structural invariant of `spec` and indexes it.
pub fn validate(spec: GameSpec) -> Result<Game> {
    Game::new(spec)
}

impl Game {
    fn new(spec: GameSpec) -> Result<Self> {
        let n = spec.agents.len();
        let rounds = spec.rounds;
        if n == 0 {
            return Err(Error::InvalidSpec("no agents".into()));
        }
        let mut names = std::collections::HashSet::new();
        for a in &spec.agents {
            if !names.insert(a.name.as_str()) {
                return Err(Error::InvalidSpec(format!("duplicate agent {:?}", a.name)));
            }
        }
        let publics: Vec<AgentId> = (0..n).filter(|&i| spec.agents[i].public).collect();
        if publics.len() > 1 {
            return Err(Error::InvalidSpec("at most one public agent is supported".into()));
        }
        if spec.decisions.len() != rounds {
            return Err(Error::InvalidSpec(format!(
                "{} decision rounds declared for a {rounds}-round game",
                spec.decisions.len()
            )));
        }
        if spec.initial.len() != n {
            return Err(Error::InvalidSpec("initial type list does not match agents".into()));
        }

        let mut by_round = vec![vec![Vec::new(); rounds + 1]; n];
        let mut label_index = HashMap::new();
        for (idx, ty) in spec.types.iter().enumerate() {
            if ty.agent >= n || ty.round > rounds {
                return Err(Error::InvalidSpec(format!(
                    "type {:?} has agent {} / round {} out of range",
                    ty.label, ty.agent, ty.round
                )));
            }
            if let Some(p) = &ty.annotation {
                if *p < rat::zero() || *p > rat::one() {
                    return Err(Error::InvalidSpec(format!(
                        "annotation of {:?} is {}, outside [0, 1]",
                        ty.label,
                        rat::fmt(p)
                    )));
                }
            }
            let key = (ty.agent, ty.round, ty.label.clone());
            if label_index.insert(key, TypeId(idx)).is_some() {
                return Err(Error::InvalidSpec(format!(
                    "duplicate type {:?} for {} at round {}",
                    ty.label, spec.agents[ty.agent].name, ty.round
                )));
            }
            by_round[ty.agent][ty.round].push(TypeId(idx));
        }
        for (a, layers) in by_round.iter().enumerate() {
            for (t, layer) in layers.iter().enumerate() {
                if layer.is_empty() {
                    return Err(Error::InvalidSpec(format!(
                        "{} has no types at round {t}",
                        spec.agents[a].name
                    )));
                }
            }
        }
        let mut initial = Vec::with_capacity(n);
        for a in 0..n {
            let id = label_index.get(&(a, 0, spec.initial[a].clone())).copied().ok_or_else(|| {
                Error::InvalidSpec(format!(
                    "initial type {:?} of {} is not a round-0 type",
                    spec.initial[a], spec.agents[a].name
                ))
            })?;
            initial.push(id);
        }

        let mut joint = Vec::with_capacity(rounds);
        for (ri, rd) in spec.decisions.iter().enumerate() {
            if rd.public.is_empty() {
                return Err(Error::InvalidSpec(format!("round {} has no public decision", ri + 1)));
            }
            if rd.private.len() > n {
                return Err(Error::InvalidSpec(format!("round {} lists too many private spaces", ri + 1)));
            }
            let sizes: Vec<usize> = (0..n)
                .map(|a| rd.private.get(a).map_or(1, |v| v.len().max(1)))
                .collect();
            let mut list = Vec::new();
            for p in 0..rd.public.len() {
                let mut digits = vec![0usize; n];
                loop {
                    list.push(JointDecision { public: p, private: digits.clone() });
                    let mut wrapped = true;
                    for k in (0..n).rev() {
                        digits[k] += 1;
                        if digits[k] < sizes[k] {
                            wrapped = false;
                            break;
                        }
                        digits[k] = 0;
                    }
                    if wrapped {
                        break;
                    }
                }
            }
            joint.push(list);
        }

        let mut game = Game {
            public_agent: publics.first().copied(),
            by_round,
            label_index,
            initial,
            joint,
            kernel: vec![vec![Vec::new(); rounds + 1]; n],
            utility: vec![vec![Vec::new(); n]; rounds + 1],
            spec,
        };

        for row in game.spec.kernel.clone() {
            game.add_kernel_row(&row)?;
        }
        for entry in game.spec.utilities.clone() {
            game.add_utility(&entry)?;
        }
        game.check_complete()?;
        Ok(game)
    }

    fn resolve(&self, round: usize, agent: AgentId, type_round: usize, decision_round: usize, p: &Pattern, what: &str) -> Result<Resolved> {
        let dangling = |label: &str| {
            if what == "kernel" {
                Error::DanglingKernelEntry {
                    agent: self.spec.agents[agent].name.clone(),
                    round,
                    label: label.to_string(),
                }
            } else {
                Error::MissingUtility {
                    entry: format!("round {round} agent {}", self.spec.agents[agent].name),
                    label: label.to_string(),
                }
            }
        };
        let own_type = match &p.own_type {
            Slot::Any => None,
            Slot::Is(l) => Some(self.type_by_label(agent, type_round, l).ok_or_else(|| dangling(l))?),
        };
        let public_type = match &p.public_type {
            Slot::Any => None,
            Slot::Is(l) => {
                let pa = self.public_agent.ok_or_else(|| dangling(l))?;
                Some(self.type_by_label(pa, type_round, l).ok_or_else(|| dangling(l))?)
            }
        };
        let needs_decision = !matches!(p.public, Slot::Any) || !p.private.is_empty();
        if needs_decision && decision_round == 0 {
            return Err(Error::InvalidSpec(format!(
                "{what} entry for {} at round {round} conditions on a decision before round 1",
                self.spec.agents[agent].name
            )));
        }
        let public = match &p.public {
            Slot::Any => None,
            Slot::Is(l) => Some(
                self.spec.decisions[decision_round - 1]
                    .public
                    .iter()
                    .position(|x| x == l)
                    .ok_or_else(|| dangling(l))?,
            ),
        };
        let mut private = Vec::new();
        for (a, l) in &p.private {
            if *a >= self.n_agents() {
                return Err(dangling(l));
            }
            let labels = self.private_labels(decision_round, *a);
            let x = labels.iter().position(|x| x == l).ok_or_else(|| dangling(l))?;
            private.push((*a, x));
        }
        Ok(Resolved { own_type, public_type, public, private })
    }

    fn add_kernel_row(&mut self, row: &KernelRow) -> Result<()> {
        if row.agent >= self.n_agents() || row.round == 0 || row.round > self.rounds() {
            return Err(Error::InvalidSpec(format!(
                "kernel row for agent {} round {} out of range",
                row.agent, row.round
            )));
        }
        let cond = self.resolve(row.round, row.agent, row.round - 1, row.round - 1, &row.pattern, "kernel")?;
        let mut outcomes = Vec::new();
        let mut total = rat::zero();
        for (label, w) in &row.outcomes {
            let id = self.type_by_label(row.agent, row.round, label).ok_or_else(|| Error::DanglingKernelEntry {
                agent: self.spec.agents[row.agent].name.clone(),
                round: row.round,
                label: label.clone(),
            })?;
            if *w < rat::zero() {
                return Err(Error::NonUnitDistribution {
                    state: self.describe_row(row),
                    total: format!("negative weight {}", rat::fmt(w)),
                });
            }
            total += w;
            outcomes.push((id, w.clone()));
        }
        if !total.is_one() {
            return Err(Error::NonUnitDistribution { state: self.describe_row(row), total: rat::fmt(&total) });
        }
        self.kernel[row.agent][row.round].push(ResolvedRow { cond, outcomes });
        Ok(())
    }

    fn add_utility(&mut self, e: &UtilityEntry) -> Result<()> {
        if e.agent >= self.n_agents() || e.round == 0 || e.round > self.rounds() {
            return Err(Error::InvalidSpec(format!(
                "utility entry for agent {} round {} out of range",
                e.agent, e.round
            )));
        }
        if self.spec.agents[e.agent].public {
            return Err(Error::InvalidSpec(format!(
                "public agent {} cannot carry utility",
                self.spec.agents[e.agent].name
            )));
        }
        let cond = self.resolve(e.round, e.agent, e.round, e.round, &e.pattern, "utility")?;
        self.utility[e.round][e.agent].push(ResolvedUtility { cond, value: e.value.clone() });
        Ok(())
    }

    fn describe_row(&self, row: &KernelRow) -> String {
        format!(
            "kernel {} round {} {}",
            self.spec.agents[row.agent].name,
            row.round,
            crate::format::pattern_text(&self.spec, row.agent, &row.pattern)
        )
    }

    fn check_complete(&self) -> Result<()> {
        for a in 0..self.n_agents() {
            for t in 1..=self.rounds() {
                let publics: Vec<Option<TypeId>> = match self.public_agent {
                    Some(p) => self.types_at(p, t - 1).iter().map(|&x| Some(x)).collect(),
                    None => vec![None],
                };
                let decisions: Vec<Option<&JointDecision>> = if t == 1 {
                    vec![None]
                } else {
                    self.joint[t - 2].iter().map(Some).collect()
                };
                for &own in self.types_at(a, t - 1) {
                    for &pt in &publics {
                        for &d in &decisions {
                            if !self.kernel[a][t].iter().any(|r| r.cond.matches(own, pt, d)) {
                                return Err(Error::UndefinedKernelEntry {
                                    state: format!(
                                        "{} round {} from {:?}{}",
                                        self.spec.agents[a].name,
                                        t,
                                        self.ty(own).label,
                                        d.map(|d| format!(" after decision {}", self.decision_label(t - 1, d)))
                                            .unwrap_or_default()
                                    ),
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> &GameSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn rounds(&self) -> usize {
        self.spec.rounds
    }

    pub fn n_agents(&self) -> usize {
        self.spec.agents.len()
    }

    pub fn agent_name(&self, a: AgentId) -> &str {
        &self.spec.agents[a].name
    }

    pub fn agent_id(&self, name: &str) -> Option<AgentId> {
        self.spec.agent_id(name)
    }

    pub fn public_agent(&self) -> Option<AgentId> {
        self.public_agent
    }

    pub fn is_public(&self, a: AgentId) -> bool {
        self.public_agent == Some(a)
    }

    /// Agents that report strategically and take part in transfers.
    pub fn reporting_agents(&self) -> Vec<AgentId> {
        (0..self.n_agents()).filter(|&a| !self.is_public(a)).collect()
    }

    pub fn reveals_to(&self, to: AgentId) -> Vec<AgentId> {
        self.spec.reveal.iter().filter(|(_, b)| *b == to).map(|(a, _)| *a).collect()
    }

    pub fn ty(&self, id: TypeId) -> &AgentType {
        &self.spec.types[id.0]
    }

    pub fn label(&self, id: TypeId) -> &str {
        &self.spec.types[id.0].label
    }

    pub fn annotation(&self, id: TypeId) -> Option<&Rat> {
        self.spec.types[id.0].annotation.as_ref()
    }

    pub fn types_at(&self, agent: AgentId, round: usize) -> &[TypeId] {
        &self.by_round[agent][round]
    }

    pub fn type_by_label(&self, agent: AgentId, round: usize, label: &str) -> Option<TypeId> {
        self.label_index.get(&(agent, round, label.to_string())).copied()
    }

    /// The round-`round` type of `agent` with the given annotation, if unique.
    pub fn type_by_annotation(&self, agent: AgentId, round: usize, ann: &Rat) -> Option<TypeId> {
        let mut found = self.types_at(agent, round).iter().filter(|&&t| self.annotation(t) == Some(ann));
        let first = found.next().copied();
        if found.next().is_some() {
            None
        } else {
            first
        }
    }

    pub fn initial(&self, agent: AgentId) -> TypeId {
        self.initial[agent]
    }

    pub fn initial_profile(&self) -> Vec<TypeId> {
        self.initial.clone()
    }

    /// Joint decisions of round `round` (1-based), in declaration order.
    pub fn joint_decisions(&self, round: usize) -> &[JointDecision] {
        &self.joint[round - 1]
    }

    pub fn private_labels(&self, round: usize, agent: AgentId) -> Vec<String> {
        match self.spec.decisions[round - 1].private.get(agent) {
            Some(v) if !v.is_empty() => v.clone(),
            _ => vec!["-".to_string()],
        }
    }

    pub fn has_private_choice(&self, round: usize, agent: AgentId) -> bool {
        self.private_labels(round, agent).len() > 1
    }

    pub fn decision_label(&self, round: usize, d: &JointDecision) -> String {
        let rd = &self.spec.decisions[round - 1];
        let mut s = rd.public[d.public].clone();
        for a in 0..self.n_agents() {
            if self.has_private_choice(round, a) {
                s.push_str(&format!("|{}={}", self.agent_name(a), self.private_labels(round, a)[d.private[a]]));
            }
        }
        s
    }

    pub fn decision_index(&self, round: usize, d: &JointDecision) -> usize {
        self.joint[round - 1].iter().position(|x| x == d).expect("joint decision of this round")
    }

    /// Next-round type distribution for `agent` entering `round`.
    pub fn successors(
        &self,
        agent: AgentId,
        round: usize,
        own: TypeId,
        public_type: Option<TypeId>,
        decision: Option<&JointDecision>,
    ) -> Result<&[(TypeId, Rat)]> {
        self.kernel[agent][round]
            .iter()
            .find(|r| r.cond.matches(own, public_type, decision))
            .map(|r| r.outcomes.as_slice())
            .ok_or_else(|| Error::UndefinedKernelEntry {
                state: format!("{} round {} from {:?}", self.agent_name(agent), round, self.label(own)),
            })
    }

    /// Utility of `agent` in `round` under decision `d` and the given types.
    pub fn utility(&self, round: usize, agent: AgentId, d: &JointDecision, own: TypeId, public_type: Option<TypeId>) -> Rat {
        self.utility[round][agent]
            .iter()
            .find(|u| u.cond.matches(own, public_type, Some(d)))
            .map(|u| u.value.clone())
            .unwrap_or_else(Rat::zero)
    }
}

impl fmt::Display for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} agents, {} rounds)", self.spec.name, self.n_agents(), self.rounds())
    }
}

/// A failed martingale identity `annotation = E[successor annotation]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnotationViolation {
    pub agent: String,
    pub round: usize,
    pub label: String,
    pub annotation: Rat,
    /// `None` when some successor carries no annotation.
    pub expected_next: Option<Rat>,
}

/// Every annotated type must equal the expectation of its successors'
/// annotations under each kernel row that applies to it.
pub fn check_martingale_annotations(game: &Game) -> Vec<AnnotationViolation> {
    let mut out = Vec::new();
    for a in 0..game.n_agents() {
        for t in 1..=game.rounds() {
            for row in &game.kernel[a][t] {
                let sources: Vec<TypeId> = match row.cond.own_type {
                    Some(id) => vec![id],
                    None => game.types_at(a, t - 1).to_vec(),
                };
                for src in sources {
                    let Some(ann) = game.annotation(src) else { continue };
                    let mut next = Some(rat::zero());
                    for (succ, w) in &row.outcomes {
                        next = match (next, game.annotation(*succ)) {
                            (Some(acc), Some(p)) => Some(acc + w * p),
                            _ => None,
                        };
                    }
                    if next.as_ref() != Some(ann) {
                        out.push(AnnotationViolation {
                            agent: game.agent_name(a).to_string(),
                            round: t - 1,
                            label: game.label(src).to_string(),
                            annotation: ann.clone(),
                            expected_next: next,
                        });
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ratio;

    fn coin(rounds: usize) -> GameSpec {
        let mut s = GameSpec::new("coin", rounds);
        let a = s.add_agent("a", false);
        s.add_type(a, 0, "half", Some(ratio(1, 2)));
        s.set_initial(a, "half");
        for t in 1..=rounds {
            s.add_type(a, t, "lo", Some(ratio(0, 1)));
            s.add_type(a, t, "hi", Some(ratio(1, 1)));
            s.set_public_decisions(t, &["go"]);
            if t == 1 {
                s.add_kernel(a, 1, Pattern::any(), vec![("lo", ratio(1, 2)), ("hi", ratio(1, 2))]);
            } else {
                s.add_kernel(a, t, Pattern::own("lo"), vec![("lo", ratio(1, 1))]);
                s.add_kernel(a, t, Pattern::own("hi"), vec![("hi", ratio(1, 1))]);
            }
        }
        s
    }

    #[test]
    fn zero_round_game_is_valid() {
        let g = validate(coin(0)).unwrap();
        assert_eq!(g.rounds(), 0);
        assert!(check_martingale_annotations(&g).is_empty());
    }

    #[test]
    fn non_unit_row_rejected() {
        let mut s = coin(1);
        s.kernel[0].outcomes = vec![("lo".into(), ratio(1, 2)), ("hi".into(), ratio(1, 3))];
        assert!(matches!(validate(s), Err(Error::NonUnitDistribution { .. })));
    }

    #[test]
    fn dangling_and_missing_rows() {
        let mut s = coin(1);
        s.kernel[0].outcomes[0].0 = "nowhere".into();
        assert!(matches!(validate(s), Err(Error::DanglingKernelEntry { .. })));

        let mut s = coin(2);
        s.kernel.pop();
        assert!(matches!(validate(s), Err(Error::UndefinedKernelEntry { .. })));

        let mut s = coin(1);
        s.add_utility(1, 0, Pattern::own("mid"), ratio(1, 1));
        assert!(matches!(validate(s), Err(Error::MissingUtility { .. })));
    }

    #[test]
    fn absorbing_and_binary_chains_are_martingales() {
        let g = validate(coin(3)).unwrap();
        assert!(check_martingale_annotations(&g).is_empty());
        let hi = g.type_by_label(0, 2, "hi").unwrap();
        let succ = g.successors(0, 3, hi, None, Some(&g.joint_decisions(2)[0])).unwrap();
        assert_eq!(succ, &[(g.type_by_label(0, 3, "hi").unwrap(), ratio(1, 1))]);
    }

    #[test]
    fn joint_decisions_enumerate_private_spaces() {
        let mut s = coin(1);
        let b = s.add_agent("b", false);
        s.add_type(b, 0, "x", None);
        s.add_type(b, 1, "x", None);
        s.set_initial(b, "x");
        s.add_kernel(b, 1, Pattern::any(), vec![("x", ratio(1, 1))]);
        s.set_public_decisions(1, &["p", "q"]);
        s.set_private_decisions(1, b, &["YES", "NO"]);
        let g = validate(s).unwrap();
        let labels: Vec<String> = g.joint_decisions(1).iter().map(|d| g.decision_label(1, d)).collect();
        assert_eq!(labels, ["p|b=YES", "p|b=NO", "q|b=YES", "q|b=NO"]);
    }
}
