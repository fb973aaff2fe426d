//! Brute-force evaluation shared by the integration tests.
#![allow(dead_code)]

use dynmech::game::{JointDecision, TypeId};
use dynmech::mechanism::{round_transfers, MechanismKind, RoundReports};
use dynmech::policy::DecisionPolicy;
use dynmech::rat::Rat;
use dynmech::strategy::{private_decision, report, Observation, Strategy};
use num_traits::{One, Zero};

/// A fully materialized outcome.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub weight: Rat,
    pub types: Vec<Vec<TypeId>>,
    pub reports: Vec<Vec<TypeId>>,
    pub recommended: Vec<usize>,
    pub decisions: Vec<JointDecision>,
    pub utility: Vec<Rat>,
    pub transfers: Vec<Rat>,
    pub gamma: Vec<Rat>,
}

fn spread<T: Clone>(items: Vec<(Outcome, T)>, f: impl Fn(&Outcome, &T) -> Vec<(Outcome, T)>) -> Vec<(Outcome, T)> {
    items.iter().flat_map(|(o, x)| f(o, x)).collect()
}

/// Expands the whole game breadth-first, one round at a time.
pub fn outcomes(policy: &DecisionPolicy, profile: &[Strategy], mechanism: Option<&MechanismKind>) -> Vec<Outcome> {
    let g = policy.game();
    let n = g.n_agents();
    let init = g.initial_profile();
    let mut layer = vec![Outcome {
        weight: Rat::one(),
        types: vec![init.clone()],
        reports: vec![init],
        recommended: vec![],
        decisions: vec![],
        utility: vec![Rat::zero(); n],
        transfers: vec![Rat::zero(); n],
        gamma: vec![Rat::zero(); n],
    }];
    for t in 1..=g.rounds() {
        // nature
        let mut items: Vec<(Outcome, Vec<TypeId>)> = layer.into_iter().map(|o| (o, vec![])).collect();
        for a in 0..n {
            items = spread(items, |o, drawn| {
                let prev = &o.types[t - 1];
                let pubt = g.public_agent().map(|p| prev[p]);
                g.successors(a, t, prev[a], pubt, o.decisions.last())
                    .unwrap()
                    .iter()
                    .filter(|(_, w)| !w.is_zero())
                    .map(|(ty, w)| {
                        let mut o = o.clone();
                        o.weight *= w;
                        let mut d = drawn.clone();
                        d.push(*ty);
                        (o, d)
                    })
                    .collect()
            });
        }
        let mut items: Vec<(Outcome, Vec<TypeId>)> = items
            .into_iter()
            .map(|(mut o, d)| {
                o.types.push(d);
                (o, vec![])
            })
            .collect();
        // reports
        for a in 0..n {
            items = spread(items, |o, rep| {
                let dist = if g.is_public(a) {
                    vec![(o.types[t][a], Rat::one())]
                } else {
                    let own: Vec<TypeId> = o.types.iter().map(|r| r[a]).collect();
                    let obs = Observation {
                        agent: a,
                        round: t,
                        own_types: &own,
                        reports: &o.reports,
                        decisions: &o.recommended,
                        types: &o.types[..t],
                        recommendation: None,
                    };
                    report(g, &profile[a], &obs).unwrap()
                };
                dist.into_iter()
                    .filter(|(_, w)| !w.is_zero())
                    .map(|(ty, w)| {
                        let mut o = o.clone();
                        o.weight *= w;
                        let mut r = rep.clone();
                        r.push(ty);
                        (o, r)
                    })
                    .collect()
            });
        }
        let mut items: Vec<(Outcome, JointDecision)> = items
            .into_iter()
            .map(|(mut o, r)| {
                let rec = policy.decide(t, &r);
                o.reports.push(r);
                o.recommended.push(rec);
                let d = g.joint_decisions(t)[rec].clone();
                (o, d)
            })
            .collect();
        // private decisions
        for a in 0..n {
            if g.is_public(a) || !g.has_private_choice(t, a) {
                continue;
            }
            items = spread(items, |o, actual| {
                let own: Vec<TypeId> = o.types.iter().map(|r| r[a]).collect();
                let rec = g.joint_decisions(t)[o.recommended[t - 1]].clone();
                let obs = Observation {
                    agent: a,
                    round: t,
                    own_types: &own,
                    reports: &o.reports,
                    decisions: &o.recommended,
                    types: &o.types[..t],
                    recommendation: Some(&rec),
                };
                private_decision(g, &profile[a], &obs)
                    .unwrap()
                    .into_iter()
                    .filter(|(_, w)| !w.is_zero())
                    .map(|(x, w)| {
                        let mut o = o.clone();
                        o.weight *= w;
                        let mut d = actual.clone();
                        d.private[a] = x;
                        (o, d)
                    })
                    .collect()
            });
        }
        layer = items
            .into_iter()
            .map(|(mut o, actual)| {
                let pubt = g.public_agent().map(|p| o.types[t][p]);
                for a in 0..n {
                    if !g.is_public(a) {
                        o.utility[a] += g.utility(t, a, &actual, o.types[t][a], pubt);
                    }
                }
                if let Some(m) = mechanism {
                    let r = RoundReports {
                        round: t,
                        prev_decision: if t == 1 { None } else { Some(o.recommended[t - 2]) },
                        prev: &o.reports[t - 1],
                        current: &o.reports[t],
                    };
                    let rt = round_transfers(policy, m, r).unwrap();
                    for a in 0..n {
                        o.transfers[a] += &rt.net[a];
                        o.gamma[a] += &rt.gamma[a];
                    }
                }
                o.decisions.push(actual);
                o
            })
            .collect();
    }
    layer
}

/// Expected utility plus transfers, summed over materialized outcomes.
pub fn brute_payoffs(policy: &DecisionPolicy, profile: &[Strategy], mechanism: Option<&MechanismKind>) -> Vec<Rat> {
    let n = policy.game().n_agents();
    let mut v = vec![Rat::zero(); n];
    for o in outcomes(policy, profile, mechanism) {
        for a in 0..n {
            v[a] += &o.weight * (&o.utility[a] + &o.transfers[a]);
        }
    }
    v
}

pub fn fmt_vec(v: &[Rat]) -> String {
    let s: Vec<String> = v.iter().map(dynmech::rat::fmt).collect();
    format!("({})", s.join(", "))
}
