//! One-round version of the project game and its candidate equilibria.

use crate::game::GameSpec;
use crate::rat::{self, Rat};
use crate::scenarios::example1::{Example1, BLUE, RED};
use crate::strategy::{CmpOp, Cond, Operand, Ref, RoundRef, Rule, Strategy};

pub fn config(p_blue: Rat, p_red: Rat, agents: usize) -> Example1 {
    Example1::new(1, agents).large().initial(p_blue, p_red)
}

pub fn build(p_blue: Rat, p_red: Rat, agents: usize) -> GameSpec {
    config(p_blue, p_red, agents).build()
}

fn own_high() -> Cond {
    Cond::Cmp(Operand::Ann(Ref::OwnType { round: RoundRef::Cur }), CmpOp::Eq, Operand::Const(rat::one()))
}

fn mix(p_one: Rat) -> Rule {
    let p_zero = rat::one() - &p_one;
    Rule::Mix(vec![(p_one, Rule::Ann(rat::one())), (p_zero, Rule::Ann(rat::zero()))])
}

/// Probability that a HIGH agent reports 1 in the fourth candidate.
pub fn high_mix() -> Rat {
    rat::ratio(100, 104)
}

/// Probability that a LOW agent reports 1 in the fifth candidate, so that
/// `P(LOW and report 1) = 16/84 * p0`.
pub fn low_mix(p0: &Rat) -> Option<Rat> {
    if *p0 == rat::one() {
        return None;
    }
    let q = rat::ratio(16, 84) * p0 / (rat::one() - p0);
    (q <= rat::one()).then_some(q)
}

/// The five candidate profiles for one agent with initial probability `p0`.
/// The last one is absent when its mixing weight is not a probability.
pub fn candidates(p0: &Rat) -> Vec<Strategy> {
    let mut v = vec![
        Strategy::new("always-0", Rule::Ann(rat::zero())),
        Strategy::new("always-1", Rule::Ann(rat::one())),
        Strategy::new("truthful", Rule::Truth),
        Strategy::new("high-mixes", Rule::If(own_high(), Box::new(mix(high_mix())), Box::new(Rule::Ann(rat::zero()))))
    ];
    if let Some(q) = low_mix(p0) {
        v.push(Strategy::new("low-mixes", Rule::If(own_high(), Box::new(Rule::Ann(rat::one())), Box::new(mix(q)))));
    }
    v
}

pub const ACTIVE: [usize; 2] = [BLUE, RED];
