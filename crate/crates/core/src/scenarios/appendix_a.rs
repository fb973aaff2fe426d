//! The 4-round lattice game with truth-forcing punishments.
//!
//! Blue must be matched by the round-2 decision and Red by the round-3
//! decision; the final decision also names both final types. A wrong guess
//! costs the agent `10^42`, so lying in those rounds is strictly dominated.

use crate::game::{GameSpec, Pattern};
use crate::rat::{self, Rat};
use crate::scenarios::example1::{add_agents, lattice, Utilities, BLUE, GREEN, RED};
use crate::strategy::{CmpOp, Cond, Operand, Ref, RoundRef, Rule, Strategy, StrategySet};

pub fn punishment() -> Rat {
    -rat::pow10(42)
}

/// Labels of the final-round decisions: `blue guess|red guess|YES or NO`.
pub fn final_decisions() -> Vec<String> {
    let mut v = Vec::new();
    for b in ["b4:0%", "b4:100%"] {
        for r in ["r4:0%", "r4:100%"] {
            for x in ["YES", "NO"] {
                v.push(format!("{b}|{r}|{x}"));
            }
        }
    }
    v
}

pub fn build(n: usize) -> GameSpec {
    assert!(n >= 3, "the payer must be present");
    let mut s = GameSpec::new("appendixA", 4);
    add_agents(&mut s, n);
    lattice(&mut s);
    for a in 2..n {
        for t in 0..=4 {
            s.add_type(a, t, "-", None);
            if t > 0 {
                s.add_kernel(a, t, Pattern::any(), vec![("-", rat::one())]);
            }
        }
        s.set_initial(a, "-");
    }
    s.set_public_decisions(1, &["-"]);
    s.set_public_decisions(2, &["b2:20%", "b2:80%"]);
    s.set_public_decisions(3, &["r3:10%", "r3:90%"]);
    let finals = final_decisions();
    let refs: Vec<&str> = finals.iter().map(|x| x.as_str()).collect();
    s.set_public_decisions(4, &refs);

    for (own, other) in [("b2:20%", "b2:80%"), ("b2:80%", "b2:20%")] {
        s.add_utility(2, BLUE, Pattern::own(own).with_public(other), punishment());
    }
    for (own, other) in [("r3:10%", "r3:90%"), ("r3:90%", "r3:10%")] {
        s.add_utility(3, RED, Pattern::own(own).with_public(other), punishment());
    }
    let (lo, hi, payer) = Utilities::Large.values();
    for d in &finals {
        let parts: Vec<&str> = d.split('|').collect();
        let yes = parts[2] == "YES";
        for (agent, guess, types) in [(BLUE, parts[0], ["b4:0%", "b4:100%"]), (RED, parts[1], ["r4:0%", "r4:100%"])] {
            for (k, own) in types.iter().enumerate() {
                let mut v = rat::zero();
                if yes {
                    v += rat::int(if k == 1 { hi } else { lo });
                }
                if *own != guess {
                    v += punishment();
                }
                if v != rat::zero() {
                    s.add_utility(4, agent, Pattern::own(own).with_public(d), v);
                }
            }
        }
        if yes {
            s.add_utility(4, GREEN, Pattern::any().with_public(d), rat::int(payer));
        }
    }
    s
}

fn label_is(r: Ref, l: &str) -> Cond {
    Cond::Cmp(Operand::Label(r), CmpOp::Eq, Operand::Str(l.to_string()))
}

fn report(agent: usize, round: usize) -> Ref {
    Ref::Report { agent, round: RoundRef::Abs(round) }
}

fn own(round: usize) -> Ref {
    Ref::OwnType { round: RoundRef::Abs(round) }
}

fn and(a: Cond, b: Cond) -> Cond {
    Cond::And(Box::new(a), Box::new(b))
}

fn pick(c: Cond, then: &str, otherwise: &str) -> Rule {
    Rule::If(c, Box::new(Rule::Label(then.into())), Box::new(Rule::Label(otherwise.into())))
}

/// Blue's and Red's reduced strategy sets, in table order.
pub fn reduced_sets() -> (StrategySet, StrategySet) {
    // Blue's round-3 report always opposes Red's round-2 report.
    let oppose = pick(label_is(report(RED, 2), "r2:20%"), "b3:90%", "b3:10%");
    let blue = vec![
        Strategy::new("truthful", Rule::Truth).at(3, oppose.clone()),
        Strategy::new("opposite", Rule::Truth).at(1, Rule::Flip).at(3, oppose.clone()),
        Strategy::new("always-70", Rule::Truth).at(1, Rule::Label("b1:70%".into())).at(3, oppose.clone()),
        Strategy::new("always-30", Rule::Truth).at(1, Rule::Label("b1:30%".into())).at(3, oppose),
    ];
    let blue70 = || label_is(report(BLUE, 1), "b1:70%");
    let blue30 = || label_is(report(BLUE, 1), "b1:30%");
    let red = vec![
        Strategy::new("truthful", Rule::Truth),
        Strategy::new("oppose-blue", Rule::Truth).at(2, pick(blue70(), "r2:20%", "r2:80%")),
        Strategy::new("prefer-high", Rule::Truth)
            .at(2, pick(and(blue70(), label_is(own(2), "r2:20%")), "r2:20%", "r2:80%")),
        Strategy::new("prefer-low", Rule::Truth)
            .at(2, pick(and(blue30(), label_is(own(2), "r2:80%")), "r2:80%", "r2:20%")),
    ];
    (StrategySet::new(BLUE, blue).unwrap(), StrategySet::new(RED, red).unwrap())
}

/// Full-lie strategies for the punished rounds, used to show they are
/// strictly dominated.
pub fn punished_liars() -> (Strategy, Strategy) {
    let blue = Strategy::new("lie-round-2", Rule::Truth).at(2, pick(label_is(own(2), "b2:20%"), "b2:80%", "b2:20%"));
    let red = Strategy::new("lie-round-3", Rule::Truth).at(3, pick(label_is(own(3), "r3:10%"), "r3:90%", "r3:10%"));
    (blue, red)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{check_martingale_annotations, validate};

    #[test]
    fn validates_with_martingale_lattice() {
        let g = validate(build(3)).unwrap();
        assert!(check_martingale_annotations(&g).is_empty());
        let (b, r) = reduced_sets();
        for s in &b.strategies {
            s.check(&g, BLUE).unwrap();
        }
        for s in &r.strategies {
            s.check(&g, RED).unwrap();
        }
    }
}
