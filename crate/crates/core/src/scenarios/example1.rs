//! The YES/NO project game: two active agents learn over `K` rounds whether
//! their final type is HIGH, a third agent pays for a YES, the rest only share
//! transfers.

use crate::game::{GameSpec, Pattern};
use crate::rat::{self, Rat};
use crate::strategy::{CmpOp, Cond, Operand, Ref, RoundRef, Rule, Strategy};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Utilities {
    /// LOW 1, HIGH 4, payer -6: price coefficient 2.
    Small,
    /// LOW 84, HIGH 104, payer -204: price coefficient 100.
    Large,
}

impl Utilities {
    /// (LOW, HIGH, payer) values of a YES.
    pub fn values(self) -> (i64, i64, i64) {
        match self {
            Utilities::Small => (1, 4, -6),
            Utilities::Large => (84, 104, -204),
        }
    }

    /// `-(HIGH + payer)`: the unit price factor of the closed-form transfers.
    pub fn coefficient(self) -> i64 {
        let (_, high, payer) = self.values();
        -(high + payer)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Process {
    /// Probabilities stay at their initial value until the final round, which
    /// realizes HIGH or LOW.
    Default,
    /// The 4-round lattice with probabilities 30/70, 20/80, 10/90 for one agent
    /// and 50, 20/80, 10/90 for the other.
    Lattice,
    /// Like `Default`, but the first agent's type is realized one round before
    /// the second's, so no round has two chance events.
    Staggered,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Example1 {
    pub rounds: usize,
    /// Total number of agents. With 2 the payer is dropped and its cost is
    /// split between the two active agents.
    pub agents: usize,
    pub utilities: Utilities,
    pub process: Process,
    /// Lowest reportable probability before the final round (0 by default).
    pub floor: Rat,
    /// Initial HIGH probabilities of the two active agents.
    pub initial: (Rat, Rat),
}

impl Example1 {
    pub fn new(rounds: usize, agents: usize) -> Self {
        Example1 {
            rounds,
            agents,
            utilities: Utilities::Small,
            process: Process::Default,
            floor: rat::zero(),
            initial: (rat::ratio(1, 2), rat::ratio(1, 2)),
        }
    }

    pub fn large(mut self) -> Self {
        self.utilities = Utilities::Large;
        self
    }

    pub fn process(mut self, p: Process) -> Self {
        self.process = p;
        if p == Process::Lattice {
            self.rounds = 4;
        }
        self
    }

    pub fn floor(mut self, f: Rat) -> Self {
        self.floor = f;
        self
    }

    pub fn initial(mut self, blue: Rat, red: Rat) -> Self {
        self.initial = (blue, red);
        self
    }

    pub fn build(&self) -> GameSpec {
        build(self)
    }
}

pub const BLUE: usize = 0;
pub const RED: usize = 1;
pub const GREEN: usize = 2;

/// Label of a probability type.
pub fn pct(p: &Rat) -> String {
    rat::fmt_percent(p)
}

fn sorted_unique(mut v: Vec<Rat>) -> Vec<Rat> {
    v.sort();
    v.dedup();
    v
}

/// Adds a probability chain for `agent`: constant until `realize`, binary at
/// `realize`, absorbing afterwards.
fn chain(s: &mut GameSpec, agent: usize, p0: &Rat, floor: &Rat, rounds: usize, realize: usize) {
    s.add_type(agent, 0, &pct(p0), Some(p0.clone()));
    s.set_initial(agent, &pct(p0));
    for t in 1..=rounds {
        let layer = if t < realize {
            sorted_unique(vec![floor.clone(), p0.clone(), rat::one()])
        } else {
            vec![rat::zero(), rat::one()]
        };
        for p in &layer {
            s.add_type(agent, t, &pct(p), Some(p.clone()));
        }
        let prev_layer: Vec<Rat> = if t == 1 {
            vec![p0.clone()]
        } else if t - 1 < realize {
            sorted_unique(vec![floor.clone(), p0.clone(), rat::one()])
        } else {
            vec![rat::zero(), rat::one()]
        };
        for p in &prev_layer {
            let outcomes = if t == realize {
                let mut o = Vec::new();
                if *p != rat::one() {
                    o.push((pct(&rat::zero()), rat::one() - p));
                }
                if *p != rat::zero() {
                    o.push((pct(&rat::one()), p.clone()));
                }
                o
            } else {
                vec![(pct(p), rat::one())]
            };
            s.add_kernel(agent, t, Pattern::own(&pct(p)), outcomes.iter().map(|(l, w)| (l.as_str(), w.clone())).collect());
        }
    }
}

fn passive(s: &mut GameSpec, agent: usize, rounds: usize) {
    for t in 0..=rounds {
        s.add_type(agent, t, "-", None);
        if t > 0 {
            s.add_kernel(agent, t, Pattern::any(), vec![("-", rat::one())]);
        }
    }
    s.set_initial(agent, "-");
}

/// One step of the lattice: from `from` to `(lo, hi)` with the martingale weights.
pub(crate) fn lattice_step(s: &mut GameSpec, agent: usize, t: usize, from: &str, lo: &str, hi: &str, w_lo: Rat) {
    let w_hi = rat::one() - &w_lo;
    s.add_kernel(agent, t, Pattern::own(from), vec![(lo, w_lo), (hi, w_hi)]);
}

/// Blue and Red lattices of the 4-round variant.
pub(crate) fn lattice(s: &mut GameSpec) {
    let r = rat::ratio;
    let types = [
        (BLUE, 0, "b0:50%", r(1, 2)),
        (BLUE, 1, "b1:30%", r(3, 10)),
        (BLUE, 1, "b1:70%", r(7, 10)),
        (BLUE, 2, "b2:20%", r(1, 5)),
        (BLUE, 2, "b2:80%", r(4, 5)),
        (BLUE, 3, "b3:10%", r(1, 10)),
        (BLUE, 3, "b3:90%", r(9, 10)),
        (BLUE, 4, "b4:0%", r(0, 1)),
        (BLUE, 4, "b4:100%", r(1, 1)),
        (RED, 0, "r0:50%", r(1, 2)),
        (RED, 1, "r1:50%", r(1, 2)),
        (RED, 2, "r2:20%", r(1, 5)),
        (RED, 2, "r2:80%", r(4, 5)),
        (RED, 3, "r3:10%", r(1, 10)),
        (RED, 3, "r3:90%", r(9, 10)),
        (RED, 4, "r4:0%", r(0, 1)),
        (RED, 4, "r4:100%", r(1, 1)),
    ];
    for (a, t, l, p) in types {
        s.add_type(a, t, l, Some(p));
    }
    s.set_initial(BLUE, "b0:50%");
    s.set_initial(RED, "r0:50%");

    lattice_step(s, BLUE, 1, "b0:50%", "b1:30%", "b1:70%", r(1, 2));
    lattice_step(s, BLUE, 2, "b1:30%", "b2:20%", "b2:80%", r(5, 6));
    lattice_step(s, BLUE, 2, "b1:70%", "b2:20%", "b2:80%", r(1, 6));
    lattice_step(s, BLUE, 3, "b2:20%", "b3:10%", "b3:90%", r(7, 8));
    lattice_step(s, BLUE, 3, "b2:80%", "b3:10%", "b3:90%", r(1, 8));
    lattice_step(s, BLUE, 4, "b3:10%", "b4:0%", "b4:100%", r(9, 10));
    lattice_step(s, BLUE, 4, "b3:90%", "b4:0%", "b4:100%", r(1, 10));

    s.add_kernel(RED, 1, Pattern::own("r0:50%"), vec![("r1:50%", r(1, 1))]);
    lattice_step(s, RED, 2, "r1:50%", "r2:20%", "r2:80%", r(1, 2));
    lattice_step(s, RED, 3, "r2:20%", "r3:10%", "r3:90%", r(7, 8));
    lattice_step(s, RED, 3, "r2:80%", "r3:10%", "r3:90%", r(1, 8));
    lattice_step(s, RED, 4, "r3:10%", "r4:0%", "r4:100%", r(9, 10));
    lattice_step(s, RED, 4, "r3:90%", "r4:0%", "r4:100%", r(1, 10));
}

/// Adds the agents: blue, red, green (if at least 3) and passive `p4..pn`.
pub(crate) fn add_agents(s: &mut GameSpec, n: usize) {
    s.add_agent("blue", false);
    s.add_agent("red", false);
    if n >= 3 {
        s.add_agent("green", false);
    }
    for k in 4..=n {
        s.add_agent(&format!("p{k}"), false);
    }
}

/// YES utilities of the final round. `high` labels the HIGH final types.
pub(crate) fn yes_utilities(s: &mut GameSpec, n: usize, u: Utilities, round: usize, yes: &str, high: (&str, &str), low: (&str, &str)) {
    let (lo, hi, payer) = u.values();
    let share = if n >= 3 { 0 } else { payer / 2 };
    for (agent, h, l) in [(BLUE, high.0, low.0), (RED, high.1, low.1)] {
        s.add_utility(round, agent, Pattern::own(h).with_public(yes), rat::int(hi + share));
        s.add_utility(round, agent, Pattern::own(l).with_public(yes), rat::int(lo + share));
    }
    if n >= 3 {
        s.add_utility(round, GREEN, Pattern::any().with_public(yes), rat::int(payer));
    }
}

fn build(e: &Example1) -> GameSpec {
    assert!(e.agents >= 2, "the game needs both active agents");
    let k = e.rounds;
    let name = match e.process {
        Process::Default => "example1",
        Process::Lattice => "example1-lattice",
        Process::Staggered => "example1-staggered",
    };
    let mut s = GameSpec::new(name, k);
    add_agents(&mut s, e.agents);
    let (high, low): ((String, String), (String, String)) = match e.process {
        Process::Lattice => {
            lattice(&mut s);
            (("b4:100%".into(), "r4:100%".into()), ("b4:0%".into(), "r4:0%".into()))
        }
        Process::Default | Process::Staggered => {
            assert!(k >= 1);
            let blue_realize = if e.process == Process::Staggered { k.saturating_sub(1).max(1) } else { k };
            chain(&mut s, BLUE, &e.initial.0, &e.floor, k, blue_realize);
            chain(&mut s, RED, &e.initial.1, &e.floor, k, k);
            let h = pct(&rat::one());
            let l = pct(&rat::zero());
            ((h.clone(), h), (l.clone(), l))
        }
    };
    for a in 2..e.agents {
        passive(&mut s, a, k);
    }
    for t in 1..k {
        s.set_public_decisions(t, &["-"]);
    }
    s.set_public_decisions(k, &["YES", "NO"]);
    yes_utilities(&mut s, e.agents, e.utilities, k, "YES", (&high.0, &high.1), (&low.0, &low.1));
    s
}

fn ann_of_report(agent: usize, round: usize) -> Operand {
    Operand::Ann(Ref::Report { agent, round: RoundRef::Abs(round) })
}

pub fn report_is(agent: usize, round: usize, p: &Rat) -> Cond {
    Cond::Cmp(ann_of_report(agent, round), CmpOp::Eq, Operand::Const(p.clone()))
}

/// The three strategies of the payoff table for `agent` (the other active
/// agent is `other`), in table order.
pub fn table_strategies(e: &Example1, agent: usize) -> Vec<Strategy> {
    let other = 1 - agent;
    let k = e.rounds;
    let lo = e.floor.clone();
    let buy = Rule::If(report_is(other, k - 1, &lo), Box::new(Rule::Ann(rat::one())), Box::new(Rule::Truth));
    vec![
        Strategy::new("truthful", Rule::Truth),
        Strategy::new("buy-after-low", Rule::Truth).at(k, buy.clone()),
        Strategy::new("low-then-buy", Rule::Truth).at(k - 1, Rule::Ann(lo)).at(k, buy),
    ]
}

/// Reports 1 in odd rounds and the floor in even rounds.
pub fn alternating(e: &Example1) -> Strategy {
    let mut s = Strategy::new("alternating", Rule::Truth);
    for t in 1..=e.rounds {
        let p = if t % 2 == 1 { rat::one() } else { e.floor.clone() };
        s = s.at(t, Rule::Ann(p));
    }
    s
}

/// Always reports the given probability.
pub fn constant(name: &str, p: Rat) -> Strategy {
    Strategy::new(name, Rule::Ann(p))
}
