//! Transfer rules.
//!
//! All four mechanisms price the move from the round `t-1` reports to the
//! round `t` reports using trustful stage values from [`DecisionPolicy`]. The
//! public agent's update is treated as a chance event that happens before any
//! report is priced, and the public agent never pays or receives anything.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::game::{AgentId, Game, TypeId};
use crate::policy::DecisionPolicy;
use crate::rat::{self, Rat};

/// Shapley averaging enumerates subsets of the agents whose reports move the
/// values; beyond this many such agents it refuses.
pub const SHAPLEY_MAX_ACTIVE: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MechanismKind {
    BalancedTeam,
    SequentialUpdate(Vec<AgentId>),
    ShapleyAveraged,
    UnbalancedTeam,
}

impl MechanismKind {
    pub fn is_balanced(&self) -> bool {
        !matches!(self, MechanismKind::UnbalancedTeam)
    }

    /// Sequential update in agent index order.
    pub fn sequential(game: &Game) -> Self {
        MechanismKind::SequentialUpdate(game.reporting_agents())
    }

    pub fn check(&self, game: &Game) -> Result<()> {
        if let MechanismKind::SequentialUpdate(order) = self {
            let mut want = game.reporting_agents();
            let mut got = order.clone();
            want.sort_unstable();
            got.sort_unstable();
            if want != got {
                return Err(Error::InvalidSpec(format!(
                    "update order {order:?} is not a permutation of the reporting agents {want:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            MechanismKind::BalancedTeam => "balanced",
            MechanismKind::SequentialUpdate(_) => "sequential",
            MechanismKind::ShapleyAveraged => "shapley",
            MechanismKind::UnbalancedTeam => "unbalanced",
        }
    }
}

impl fmt::Display for MechanismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MechanismKind::SequentialUpdate(order) => {
                let o: Vec<String> = order.iter().map(|a| a.to_string()).collect();
                write!(f, "sequential[{}]", o.join(","))
            }
            other => f.write_str(other.name()),
        }
    }
}

/// A directed payment; `payer == None` is money from outside the agents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Payment {
    pub payer: Option<AgentId>,
    pub payee: AgentId,
    pub amount: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundTransfers {
    pub round: usize,
    pub gamma: Vec<Rat>,
    pub payments: Vec<Payment>,
    /// Net transfer received by each agent this round.
    pub net: Vec<Rat>,
    /// Money injected from outside this round (zero for balanced rules).
    pub subsidy: Rat,
}

impl RoundTransfers {
    fn from_payments(round: usize, n: usize, gamma: Vec<Rat>, payments: Vec<Payment>) -> Self {
        let mut net = vec![Rat::zero(); n];
        let mut subsidy = Rat::zero();
        for p in &payments {
            net[p.payee] += &p.amount;
            match p.payer {
                Some(j) => net[j] -= &p.amount,
                None => subsidy += &p.amount,
            }
        }
        RoundTransfers { round, gamma, payments, net, subsidy }
    }

    /// `m[j][i]`: net amount `j` pays to `i` this round. Antisymmetric.
    pub fn pair_matrix(&self) -> Vec<Vec<Rat>> {
        let n = self.net.len();
        let mut m = vec![vec![Rat::zero(); n]; n];
        for p in &self.payments {
            if let Some(j) = p.payer {
                m[j][p.payee] += &p.amount;
                m[p.payee][j] -= &p.amount;
            }
        }
        m
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferLedger {
    pub mechanism: String,
    pub agents: Vec<String>,
    pub rounds: Vec<RoundTransfers>,
}

impl TransferLedger {
    /// Total transfer `y^i` per agent.
    pub fn totals(&self) -> Vec<Rat> {
        let mut y = vec![Rat::zero(); self.agents.len()];
        for r in &self.rounds {
            for (acc, v) in y.iter_mut().zip(&r.net) {
                *acc += v;
            }
        }
        y
    }

    pub fn gamma_totals(&self) -> Vec<Rat> {
        let mut g = vec![Rat::zero(); self.agents.len()];
        for r in &self.rounds {
            for (acc, v) in g.iter_mut().zip(&r.gamma) {
                *acc += v;
            }
        }
        g
    }

    pub fn subsidy(&self) -> Rat {
        rat::sum(self.rounds.iter().map(|r| &r.subsidy))
    }

    /// `round,payer,payee,amount` rows with exact fractions.
    pub fn to_csv(&self) -> String {
        self.to_csv_with(&rat::fmt)
    }

    pub fn to_csv_with(&self, num: &dyn Fn(&Rat) -> String) -> String {
        let mut s = String::from("round,payer,payee,amount\n");
        for r in &self.rounds {
            for p in &r.payments {
                let payer = p.payer.map_or("outside", |j| self.agents[j].as_str());
                s.push_str(&format!("{},{},{},{}\n", r.round, payer, self.agents[p.payee], num(&p.amount)));
            }
        }
        s
    }

    pub fn to_text(&self) -> String {
        self.to_text_with(&rat::fmt)
    }

    pub fn to_text_with(&self, num: &dyn Fn(&Rat) -> String) -> String {
        let mut s = format!("mechanism {}\n", self.mechanism);
        for r in &self.rounds {
            s.push_str(&format!("round {}\n", r.round));
            for (a, g) in r.gamma.iter().enumerate() {
                s.push_str(&format!("  gamma {} = {}\n", self.agents[a], num(g)));
            }
            for p in &r.payments {
                let payer = p.payer.map_or("outside", |j| self.agents[j].as_str());
                s.push_str(&format!("  {} -> {} : {}\n", payer, self.agents[p.payee], num(&p.amount)));
            }
        }
        for (a, y) in self.totals().iter().enumerate() {
            s.push_str(&format!("total {} = {}\n", self.agents[a], num(y)));
        }
        if !self.subsidy().is_zero() {
            s.push_str(&format!("subsidy = {}\n", num(&self.subsidy())));
        }
        s
    }
}

/// Reports of two consecutive rounds, as seen by the designer.
#[derive(Clone, Copy, Debug)]
pub struct RoundReports<'a> {
    pub round: usize,
    pub prev_decision: Option<usize>,
    pub prev: &'a [TypeId],
    pub current: &'a [TypeId],
}

/// Stage values of a round indexed by the set of updated reporting agents.
struct Pricer<'a> {
    policy: &'a DecisionPolicy,
    r: RoundReports<'a>,
    reporting: Vec<AgentId>,
    cache: HashMap<u64, Vec<Rat>>,
}

impl<'a> Pricer<'a> {
    fn new(policy: &'a DecisionPolicy, r: RoundReports<'a>) -> Self {
        Pricer { policy, r, reporting: policy.game().reporting_agents(), cache: HashMap::new() }
    }

    fn value(&mut self, mask: u64) -> Vec<Rat> {
        if let Some(v) = self.cache.get(&mask) {
            return v.clone();
        }
        let g = self.policy.game();
        let mut profile = self.r.prev.to_vec();
        let prev_public = g.public_agent().map(|p| self.r.prev[p]);
        if let Some(p) = g.public_agent() {
            profile[p] = self.r.current[p];
        }
        for a in 0..g.n_agents() {
            if mask >> a & 1 == 1 {
                profile[a] = self.r.current[a];
            }
        }
        let v = self.policy.stage_value(self.r.round, self.r.prev_decision, prev_public, &profile);
        self.cache.insert(mask, v.clone());
        v
    }

    /// Change of each agent's value when `i` is added to the updated set `mask`.
    fn delta(&mut self, mask: u64, i: AgentId) -> Vec<Rat> {
        let before = self.value(mask);
        let after = self.value(mask | 1 << i);
        after.into_iter().zip(before).map(|(a, b)| a - b).collect()
    }

    /// Agents whose update can change some value: those whose report is not
    /// the certain outcome of the kernel.
    fn active(&self) -> Vec<AgentId> {
        let g = self.policy.game();
        let prev_public = g.public_agent().map(|p| self.r.prev[p]);
        let prev = self.r.prev_decision.map(|d| &g.joint_decisions(self.r.round - 1)[d]);
        self.reporting
            .iter()
            .copied()
            .filter(|&a| match g.successors(a, self.r.round, self.r.prev[a], prev_public, prev) {
                Ok([(ty, w)]) => *ty != self.r.current[a] || !w.is_one(),
                _ => true,
            })
            .collect()
    }
}

/// `γ^i`: the change of the other agents' total value when only `i`'s report
/// moves to round `t`.
pub fn balanced_gamma(policy: &DecisionPolicy, r: RoundReports<'_>) -> Vec<Rat> {
    let mut pr = Pricer::new(policy, r);
    let n = policy.game().n_agents();
    let mut gamma = vec![Rat::zero(); n];
    for &i in &pr.reporting.clone() {
        let d = pr.delta(0, i);
        gamma[i] = pr.reporting.iter().filter(|&&j| j != i).map(|&j| &d[j]).sum();
    }
    gamma
}

/// Payments of one round of the balanced rule: each `γ^i` is financed equally
/// by the other reporting agents.
pub fn balanced_round(game: &Game, round: usize, gamma: Vec<Rat>) -> RoundTransfers {
    let reporting = game.reporting_agents();
    let mut payments = Vec::new();
    if reporting.len() > 1 {
        let share = rat::ratio(1, reporting.len() as i64 - 1);
        for &i in &reporting {
            if gamma[i].is_zero() {
                continue;
            }
            for &j in &reporting {
                if j != i {
                    payments.push(Payment { payer: Some(j), payee: i, amount: &gamma[i] * &share });
                }
            }
        }
    }
    RoundTransfers::from_payments(round, game.n_agents(), gamma, payments)
}

/// Settles a γ history (rounds `1..`) into a balanced ledger.
pub fn balanced_settle(game: &Game, gammas: &[Vec<Rat>]) -> TransferLedger {
    TransferLedger {
        mechanism: MechanismKind::BalancedTeam.to_string(),
        agents: agent_names(game),
        rounds: gammas.iter().enumerate().map(|(k, g)| balanced_round(game, k + 1, g.clone())).collect(),
    }
}

/// Reports priced one by one in `order`; every other agent pays the reporter
/// its own value change.
pub fn sequential_transfers(policy: &DecisionPolicy, r: RoundReports<'_>, order: &[AgentId]) -> RoundTransfers {
    let g = policy.game();
    let mut pr = Pricer::new(policy, r);
    let mut gamma = vec![Rat::zero(); g.n_agents()];
    let mut payments = Vec::new();
    let mut mask = 0u64;
    for &i in order {
        let d = pr.delta(mask, i);
        for &j in &pr.reporting {
            if j != i && !d[j].is_zero() {
                gamma[i] += &d[j];
                payments.push(Payment { payer: Some(j), payee: i, amount: d[j].clone() });
            }
        }
        mask |= 1 << i;
    }
    RoundTransfers::from_payments(r.round, g.n_agents(), gamma, payments)
}

/// Sequential transfers averaged over all update orders.
pub fn shapley_transfers(policy: &DecisionPolicy, r: RoundReports<'_>) -> Result<RoundTransfers> {
    let g = policy.game();
    let mut pr = Pricer::new(policy, r);
    let active = pr.active();
    let m = active.len();
    if m > SHAPLEY_MAX_ACTIVE {
        return Err(Error::Unsupported(format!("Shapley averaging over {m} changing reports")));
    }
    // weight of a predecessor set of size s among m players: s!(m-s-1)!/m!
    let mut fact = vec![Rat::one()];
    for k in 1..=m {
        let next = &fact[k - 1] * rat::int(k as i64);
        fact.push(next);
    }
    let mut gamma = vec![Rat::zero(); g.n_agents()];
    let mut paid: HashMap<(AgentId, AgentId), Rat> = HashMap::new();
    for (pos, &i) in active.iter().enumerate() {
        let others: Vec<AgentId> = active.iter().enumerate().filter(|&(q, _)| q != pos).map(|(_, &a)| a).collect();
        for sub in 0u64..(1 << others.len()) {
            let mut mask = 0u64;
            for (q, &a) in others.iter().enumerate() {
                if sub >> q & 1 == 1 {
                    mask |= 1 << a;
                }
            }
            let s = sub.count_ones() as usize;
            let w = &fact[s] * &fact[m - s - 1] / &fact[m];
            let d = pr.delta(mask, i);
            for &j in &pr.reporting {
                if j != i && !d[j].is_zero() {
                    let x = &w * &d[j];
                    gamma[i] += &x;
                    *paid.entry((j, i)).or_insert_with(Rat::zero) += x;
                }
            }
        }
    }
    let mut keys: Vec<_> = paid.keys().copied().collect();
    keys.sort_unstable_by_key(|&(j, i)| (i, j));
    let payments = keys
        .into_iter()
        .filter(|k| !paid[k].is_zero())
        .map(|k| Payment { payer: Some(k.0), payee: k.1, amount: paid[&k].clone() })
        .collect();
    Ok(RoundTransfers::from_payments(r.round, g.n_agents(), gamma, payments))
}

/// Explicit average of [`sequential_transfers`] over every permutation of the
/// reporting agents. Exponential; kept for cross-checking.
pub fn shapley_by_permutations(policy: &DecisionPolicy, r: RoundReports<'_>) -> RoundTransfers {
    let g = policy.game();
    let reporting = g.reporting_agents();
    let perms = permutations(&reporting);
    let count = rat::int(perms.len() as i64);
    let mut gamma = vec![Rat::zero(); g.n_agents()];
    let mut paid: HashMap<(AgentId, AgentId), Rat> = HashMap::new();
    for order in &perms {
        let rt = sequential_transfers(policy, r, order);
        for (acc, v) in gamma.iter_mut().zip(&rt.gamma) {
            *acc += v / &count;
        }
        for p in rt.payments {
            *paid.entry((p.payer.unwrap(), p.payee)).or_insert_with(Rat::zero) += p.amount / &count;
        }
    }
    let mut keys: Vec<_> = paid.keys().copied().collect();
    keys.sort_unstable_by_key(|&(j, i)| (i, j));
    let payments = keys
        .into_iter()
        .filter(|k| !paid[k].is_zero())
        .map(|k| Payment { payer: Some(k.0), payee: k.1, amount: paid[&k].clone() })
        .collect();
    RoundTransfers::from_payments(r.round, g.n_agents(), gamma, payments)
}

/// Each agent is paid, from outside, the other agents' reported utility of
/// the round's decision.
pub fn unbalanced_transfers(policy: &DecisionPolicy, r: RoundReports<'_>) -> RoundTransfers {
    let g = policy.game();
    let decision = policy.decision(r.round, r.current).clone();
    let public = policy.public_of(r.current);
    let reporting = g.reporting_agents();
    let utils: Vec<Rat> = (0..g.n_agents())
        .map(|a| if g.is_public(a) { Rat::zero() } else { g.utility(r.round, a, &decision, r.current[a], public) })
        .collect();
    let mut gamma = vec![Rat::zero(); g.n_agents()];
    let mut payments = Vec::new();
    for &i in &reporting {
        gamma[i] = reporting.iter().filter(|&&j| j != i).map(|&j| &utils[j]).sum();
        if !gamma[i].is_zero() {
            payments.push(Payment { payer: None, payee: i, amount: gamma[i].clone() });
        }
    }
    RoundTransfers::from_payments(r.round, g.n_agents(), gamma, payments)
}

/// Transfers of one round under `kind`.
pub fn round_transfers(policy: &DecisionPolicy, kind: &MechanismKind, r: RoundReports<'_>) -> Result<RoundTransfers> {
    Ok(match kind {
        MechanismKind::BalancedTeam => balanced_round(policy.game(), r.round, balanced_gamma(policy, r)),
        MechanismKind::SequentialUpdate(order) => sequential_transfers(policy, r, order),
        MechanismKind::ShapleyAveraged => shapley_transfers(policy, r)?,
        MechanismKind::UnbalancedTeam => unbalanced_transfers(policy, r),
    })
}

/// Ledger of a whole report history; `reports[0]` must be the initial profile.
pub fn ledger(policy: &DecisionPolicy, kind: &MechanismKind, reports: &[Vec<TypeId>]) -> Result<TransferLedger> {
    let g = policy.game();
    kind.check(g)?;
    if reports.len() != g.rounds() + 1 {
        return Err(Error::ProfileShapeMismatch(format!(
            "{} report rounds for a {}-round game",
            reports.len(),
            g.rounds()
        )));
    }
    let mut rounds = Vec::new();
    let mut prev_decision = None;
    for t in 1..=g.rounds() {
        let r = RoundReports { round: t, prev_decision, prev: &reports[t - 1], current: &reports[t] };
        rounds.push(round_transfers(policy, kind, r)?);
        prev_decision = Some(policy.decide(t, &reports[t]));
    }
    Ok(TransferLedger { mechanism: kind.to_string(), agents: agent_names(g), rounds })
}

pub fn agent_names(game: &Game) -> Vec<String> {
    (0..game.n_agents()).map(|a| game.agent_name(a).to_string()).collect()
}

pub fn permutations(items: &[AgentId]) -> Vec<Vec<AgentId>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (k, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(k);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}
