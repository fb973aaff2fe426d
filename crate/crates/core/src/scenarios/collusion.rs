//! Two agents with i.i.d. signals 1000 or -1 each round; a YES pays each
//! agent its own signal.

use crate::game::{GameSpec, Pattern};
use crate::rat;
use crate::strategy::{Rule, Strategy};

pub const HIGH: &str = "1000";
pub const LOW: &str = "-1";

pub fn build(rounds: usize) -> GameSpec {
    assert!(rounds >= 1);
    let mut s = GameSpec::new("collusion", rounds);
    for name in ["a", "b"] {
        s.add_agent(name, false);
    }
    for a in 0..2 {
        s.add_type(a, 0, "start", None);
        s.set_initial(a, "start");
        for t in 1..=rounds {
            s.add_type(a, t, HIGH, None);
            s.add_type(a, t, LOW, None);
            s.add_kernel(a, t, Pattern::any(), vec![(HIGH, rat::ratio(1, 2)), (LOW, rat::ratio(1, 2))]);
            s.add_utility(t, a, Pattern::own(HIGH).with_public("YES"), rat::int(1000));
            s.add_utility(t, a, Pattern::own(LOW).with_public("YES"), rat::int(-1));
        }
    }
    for t in 1..=rounds {
        s.set_public_decisions(t, &["YES", "NO"]);
    }
    s
}

pub fn always_high() -> Strategy {
    Strategy::new("always-1000", Rule::Label(HIGH.into()))
}
