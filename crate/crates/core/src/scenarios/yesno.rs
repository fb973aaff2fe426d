//! Coordination game with private YES/NO choices.
//!
//! An agent choosing YES gets 1 if some other agent chooses YES in the same
//! round or has chosen YES in an earlier round, and pays `yes_cost` for every
//! YES. Earlier choices are tracked by a public agent whose type is the set of
//! agents that have said YES so far.

use crate::game::{GameSpec, Pattern};
use crate::rat::{self, Rat};
use crate::strategy::{PrivateRule, Rule, Strategy};

pub const HISTORY: &str = "history";

fn set_label(names: &[String], mask: usize) -> String {
    let members: Vec<&str> = (0..names.len()).filter(|i| mask >> i & 1 == 1).map(|i| names[i].as_str()).collect();
    if members.is_empty() {
        "none".into()
    } else {
        members.join("+")
    }
}

pub fn build(n: usize, rounds: usize, yes_cost: Rat) -> GameSpec {
    assert!(n >= 2 && rounds >= 1);
    let mut s = GameSpec::new("yesno", rounds);
    let names: Vec<String> = (1..=n).map(|k| format!("a{k}")).collect();
    for name in &names {
        s.add_agent(name, false);
    }
    let h = s.add_agent(HISTORY, true);
    for a in 0..n {
        for t in 0..=rounds {
            s.add_type(a, t, "-", None);
            if t > 0 {
                s.add_kernel(a, t, Pattern::any(), vec![("-", rat::one())]);
            }
        }
        s.set_initial(a, "-");
    }
    let sets = 1usize << n;
    for t in 0..=rounds {
        for mask in 0..sets {
            s.add_type(h, t, &set_label(&names, mask), None);
        }
    }
    s.set_initial(h, "none");
    for t in 1..=rounds {
        s.set_public_decisions(t, &["-"]);
        for a in 0..n {
            s.set_private_decisions(t, a, &["YES", "NO"]);
        }
    }
    // round 1 has no earlier choices to record
    s.add_kernel(h, 1, Pattern::any(), vec![("none", rat::one())]);
    for t in 2..=rounds {
        for prev in 0..sets {
            for chosen in 0..sets {
                let mut p = Pattern::own(&set_label(&names, prev));
                for a in 0..n {
                    p = p.with_private(a, if chosen >> a & 1 == 1 { "YES" } else { "NO" });
                }
                s.add_kernel(h, t, p, vec![(&set_label(&names, prev | chosen), rat::one())]);
            }
        }
    }
    let win = rat::one() - &yes_cost;
    for t in 1..=rounds {
        for a in 0..n {
            for mask in 0..sets {
                if mask & !(1 << a) != 0 {
                    let p = Pattern::any().with_public_type(&set_label(&names, mask)).with_private(a, "YES");
                    s.add_utility(t, a, p, win.clone());
                }
            }
            for b in (0..n).filter(|&b| b != a) {
                s.add_utility(t, a, Pattern::any().with_private(a, "YES").with_private(b, "YES"), win.clone());
            }
            if yes_cost != rat::zero() {
                s.add_utility(t, a, Pattern::any().with_private(a, "YES"), -yes_cost.clone());
            }
        }
    }
    s
}

pub fn always(choice: &str) -> Strategy {
    Strategy::new(&format!("always-{}", choice.to_lowercase()), Rule::Truth).with_private(PrivateRule::Choose(choice.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::validate;

    #[test]
    fn validates() {
        let g = validate(build(3, 2, rat::ratio(1, 100))).unwrap();
        assert_eq!(g.joint_decisions(1).len(), 8);
        assert_eq!(g.types_at(3, 2).len(), 8);
    }
}
