//! Seeded random small games and strategies for property checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::{Game, GameSpec, Pattern};
use crate::rat::{self, Rat};
use crate::strategy::{CmpOp, Cond, Operand, Ref, RoundRef, Rule, Strategy};

#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub agents: usize,
    pub rounds: usize,
    pub types: usize,
    pub decisions: usize,
    /// Whether a public chance agent may be added.
    pub public: bool,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { agents: 3, rounds: 3, types: 3, decisions: 2, public: true }
    }
}

fn distribution(rng: &mut ChaCha8Rng, labels: &[String]) -> Vec<(String, Rat)> {
    let weights: Vec<i64> = labels.iter().map(|_| rng.gen_range(0..4)).collect();
    let total: i64 = weights.iter().sum();
    if total == 0 {
        return vec![(labels[rng.gen_range(0..labels.len())].clone(), rat::one())];
    }
    labels
        .iter()
        .zip(weights)
        .filter(|(_, w)| *w > 0)
        .map(|(l, w)| (l.clone(), rat::ratio(w, total)))
        .collect()
}

/// A random game within `limits`. Kernels depend on the previous decision,
/// utilities on the decision and the own (and public) type.
pub fn game(seed: u64, limits: Limits) -> GameSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rounds = rng.gen_range(1..=limits.rounds);
    let n = rng.gen_range(1..=limits.agents);
    let mut s = GameSpec::new(&format!("random-{seed}"), rounds);
    for k in 0..n {
        s.add_agent(&format!("g{k}"), false);
    }
    if limits.public && rng.gen_bool(0.3) {
        s.add_agent("nature", true);
    }
    let total = s.agents.len();
    let decisions: Vec<Vec<String>> = (1..=rounds)
        .map(|_| (0..rng.gen_range(1..=limits.decisions)).map(|d| format!("x{d}")).collect())
        .collect();
    for (t, ds) in decisions.iter().enumerate() {
        let refs: Vec<&str> = ds.iter().map(|x| x.as_str()).collect();
        s.set_public_decisions(t + 1, &refs);
    }
    let mut labels: Vec<Vec<Vec<String>>> = Vec::new();
    for a in 0..total {
        let mut per_round = Vec::new();
        for t in 0..=rounds {
            let count = if t == 0 { 1 } else { rng.gen_range(1..=limits.types) };
            let ls: Vec<String> = (0..count).map(|k| format!("t{t}.{k}")).collect();
            for l in &ls {
                s.add_type(a, t, l, None);
            }
            per_round.push(ls);
        }
        s.set_initial(a, &per_round[0][0]);
        labels.push(per_round);
    }
    for a in 0..total {
        for t in 1..=rounds {
            for from in &labels[a][t - 1] {
                if t == 1 {
                    let d = distribution(&mut rng, &labels[a][t]);
                    s.add_kernel(a, t, Pattern::own(from), d.iter().map(|(l, w)| (l.as_str(), w.clone())).collect());
                    continue;
                }
                for x in &decisions[t - 2] {
                    let d = distribution(&mut rng, &labels[a][t]);
                    let p = Pattern::own(from).with_public(x);
                    s.add_kernel(a, t, p, d.iter().map(|(l, w)| (l.as_str(), w.clone())).collect());
                }
            }
        }
    }
    let public = (total > n).then(|| total - 1);
    for a in 0..n {
        for t in 1..=rounds {
            for own in &labels[a][t] {
                for x in &decisions[t - 1] {
                    let p = Pattern::own(own).with_public(x);
                    if let Some(pa) = public {
                        if rng.gen_bool(0.5) {
                            let l = labels[pa][t].choose(&mut rng).unwrap().clone();
                            let v = rat::int(rng.gen_range(-3..=3));
                            s.add_utility(t, a, p.clone().with_public_type(&l), v);
                        }
                    }
                    let v = rat::int(rng.gen_range(-3..=3));
                    if v != rat::zero() {
                        s.add_utility(t, a, p, v);
                    }
                }
            }
        }
    }
    s
}

/// A random deterministic or mixed report strategy for `agent`.
pub fn strategy(game: &Game, agent: usize, seed: u64) -> Strategy {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0000 ^ (agent as u64) << 40);
    let mut s = Strategy::new(&format!("random-{seed}"), Rule::Truth);
    let others: Vec<usize> = game.reporting_agents().into_iter().filter(|&b| b != agent).collect();
    for t in 1..=game.rounds() {
        let labels: Vec<String> = game.types_at(agent, t).iter().map(|&id| game.label(id).to_string()).collect();
        let pick = |rng: &mut ChaCha8Rng| Rule::Label(labels.choose(rng).unwrap().clone());
        let rule = match rng.gen_range(0..4) {
            0 => Rule::Truth,
            1 => pick(&mut rng),
            2 if !others.is_empty() && t >= 2 => {
                let b = *others.choose(&mut rng).unwrap();
                let seen = game.types_at(b, t - 1).choose(&mut rng).unwrap();
                let c = Cond::Cmp(
                    Operand::Label(Ref::Report { agent: b, round: RoundRef::Prev(1) }),
                    CmpOp::Eq,
                    Operand::Str(game.label(*seen).to_string()),
                );
                Rule::If(c, Box::new(pick(&mut rng)), Box::new(Rule::Truth))
            }
            _ => {
                let w = rat::ratio(rng.gen_range(1..4), 4);
                Rule::Mix(vec![(w.clone(), Rule::Truth), (rat::one() - w, pick(&mut rng))])
            }
        };
        s = s.at(t, rule);
    }
    s
}
