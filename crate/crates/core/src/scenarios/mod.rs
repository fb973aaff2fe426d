//! Built-in scenarios.

pub mod appendix_a;
pub mod appendix_b;
pub mod collusion;
pub mod example1;
pub mod random;
pub mod yesno;

use std::fmt;

use crate::error::{Error, Result};
use crate::game::{validate, Game, GameSpec};
use crate::rat::{self, Rat};
use crate::strategy::{truthful, Rule, Strategy, StrategySet};

pub use example1::{Example1, Process, Utilities};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScenarioId {
    Example1(Example1),
    AppendixA { agents: usize },
    AppendixB { p_blue: Rat, p_red: Rat, agents: usize },
    YesNo { agents: usize, rounds: usize, yes_cost: Rat },
    Collusion { rounds: usize },
}

/// Largest sizes accepted for exact runs.
pub const MAX_ROUNDS: usize = 6;
pub const MAX_AGENTS: usize = 12;

impl ScenarioId {
    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        match self {
            ScenarioId::Example1(e) => {
                if e.rounds == 0 || e.rounds > MAX_ROUNDS {
                    return bad(format!("K must be in 1..={MAX_ROUNDS}"));
                }
                if e.agents < 2 || e.agents > MAX_AGENTS {
                    return bad(format!("n must be in 2..={MAX_AGENTS}"));
                }
                if e.floor < rat::zero() || e.floor >= rat::one() {
                    return bad("floor must be in [0, 1)".into());
                }
                if e.process == Process::Lattice && e.rounds != 4 {
                    return bad("the lattice process has exactly 4 rounds".into());
                }
                if e.process == Process::Staggered && e.rounds < 2 {
                    return bad("the staggered process needs K >= 2".into());
                }
                for p in [&e.initial.0, &e.initial.1] {
                    if *p < rat::zero() || *p > rat::one() {
                        return bad("initial probabilities must lie in [0, 1]".into());
                    }
                }
            }
            ScenarioId::AppendixA { agents } | ScenarioId::AppendixB { agents, .. } => {
                if *agents < 3 || *agents > MAX_AGENTS {
                    return bad(format!("n must be in 3..={MAX_AGENTS}"));
                }
            }
            ScenarioId::YesNo { agents, rounds, .. } => {
                if *agents < 2 || *agents > 4 || *rounds == 0 || *rounds > MAX_ROUNDS {
                    return bad(format!("yesno needs 2..=4 agents and 1..={MAX_ROUNDS} rounds"));
                }
            }
            ScenarioId::Collusion { rounds } => {
                if *rounds == 0 || *rounds > MAX_ROUNDS {
                    return bad(format!("k must be in 1..={MAX_ROUNDS}"));
                }
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> Result<GameSpec> {
        self.check()?;
        Ok(match self {
            ScenarioId::Example1(e) => e.build(),
            ScenarioId::AppendixA { agents } => appendix_a::build(*agents),
            ScenarioId::AppendixB { p_blue, p_red, agents } => appendix_b::build(p_blue.clone(), p_red.clone(), *agents),
            ScenarioId::YesNo { agents, rounds, yes_cost } => yesno::build(*agents, *rounds, yes_cost.clone()),
            ScenarioId::Collusion { rounds } => collusion::build(*rounds),
        })
    }

    pub fn game(&self) -> Result<Game> {
        validate(self.spec()?)
    }

    /// Registered strategy sets, one per reporting agent that has choices.
    pub fn strategy_sets(&self, game: &Game) -> Vec<StrategySet> {
        let set = |agent, v| StrategySet::new(agent, v).expect("built-in names are unique");
        match self {
            // the lattice has no 0% or 100% types before the last round
            ScenarioId::Example1(e) if e.process == Process::Lattice => [example1::BLUE, example1::RED]
                .into_iter()
                .map(|a| set(a, vec![truthful(game, a), Strategy::new("opposite", Rule::Flip)]))
                .collect(),
            ScenarioId::Example1(e) => vec![
                set(example1::BLUE, example1::table_strategies(e, example1::BLUE)),
                set(example1::RED, example1::table_strategies(e, example1::RED)),
            ],
            ScenarioId::AppendixA { .. } => {
                let (b, r) = appendix_a::reduced_sets();
                vec![b, r]
            }
            ScenarioId::AppendixB { p_blue, p_red, .. } => vec![
                set(example1::BLUE, appendix_b::candidates(p_blue)),
                set(example1::RED, appendix_b::candidates(p_red)),
            ],
            ScenarioId::YesNo { agents, .. } => {
                (0..*agents).map(|a| set(a, vec![yesno::always("YES"), yesno::always("NO")])).collect()
            }
            ScenarioId::Collusion { .. } => (0..2)
                .map(|a| set(a, vec![truthful(game, a), collusion::always_high()]))
                .collect(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioId::Example1(_) => "example1",
            ScenarioId::AppendixA { .. } => "appendixA",
            ScenarioId::AppendixB { .. } => "appendixB",
            ScenarioId::YesNo { .. } => "yesno",
            ScenarioId::Collusion { .. } => "collusion",
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioId::Example1(e) => write!(
                f,
                "example1 K={} n={} utilities={:?} process={:?} floor={}",
                e.rounds,
                e.agents,
                e.utilities,
                e.process,
                rat::fmt(&e.floor)
            ),
            ScenarioId::AppendixA { agents } => write!(f, "appendixA n={agents}"),
            ScenarioId::AppendixB { p_blue, p_red, agents } => {
                write!(f, "appendixB n={agents} p0=({}, {})", rat::fmt(p_blue), rat::fmt(p_red))
            }
            ScenarioId::YesNo { agents, rounds, yes_cost } => {
                write!(f, "yesno n={agents} k={rounds} cost={}", rat::fmt(yes_cost))
            }
            ScenarioId::Collusion { rounds } => write!(f, "collusion k={rounds}"),
        }
    }
}

/// Default instance of every built-in scenario family.
pub fn builtins() -> Vec<ScenarioId> {
    vec![
        ScenarioId::Example1(Example1::new(2, 3)),
        ScenarioId::Example1(Example1::new(3, 3).large()),
        ScenarioId::Example1(Example1::new(4, 3).process(Process::Lattice).large()),
        ScenarioId::Example1(Example1::new(2, 2).process(Process::Staggered)),
        ScenarioId::AppendixA { agents: 3 },
        ScenarioId::AppendixB { p_blue: rat::ratio(1, 2), p_red: rat::ratio(1, 2), agents: 3 },
        ScenarioId::YesNo { agents: 2, rounds: 2, yes_cost: rat::zero() },
        ScenarioId::Collusion { rounds: 3 },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_validate_and_strategies_bind() {
        for id in builtins() {
            let g = id.game().unwrap_or_else(|e| panic!("{id}: {e}"));
            for set in id.strategy_sets(&g) {
                for s in &set.strategies {
                    s.check(&g, set.agent).unwrap_or_else(|e| panic!("{id} {}: {e}", s.name));
                }
            }
        }
    }

    #[test]
    fn random_games_validate() {
        for seed in 0..40 {
            let g = validate(random::game(seed, random::Limits::default())).unwrap();
            for a in g.reporting_agents() {
                random::strategy(&g, a, seed).check(&g, a).unwrap();
            }
        }
    }
}
