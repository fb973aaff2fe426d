//! Sampled payoffs, used only to cross-check the exact evaluator.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{JointDecision, TypeId};
use crate::mechanism::{MechanismKind, RoundReports};
use crate::paths::TransferCache;
use crate::policy::DecisionPolicy;
use crate::rat::{self, Rat};
use crate::strategy::{private_decision, report, Observation, Strategy};

#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarlo {
    pub samples: usize,
    pub mean: Vec<f64>,
    pub std_err: Vec<f64>,
}

impl MonteCarlo {
    /// Whether every agent's exact value lies within `k` standard errors.
    /// A zero standard error requires a near-exact match.
    pub fn agrees(&self, exact: &[Rat], k: f64) -> bool {
        exact.iter().zip(&self.mean).zip(&self.std_err).all(|((x, m), s)| {
            let d = (rat::to_f64(x) - m).abs();
            d <= k * s || d <= 1e-9 * (1.0 + m.abs())
        })
    }
}

fn pick<T: Copy>(rng: &mut ChaCha8Rng, dist: &[(T, Rat)]) -> T {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (x, w) in dist {
        acc += rat::to_f64(w);
        if u < acc {
            return *x;
        }
    }
    dist.iter().rev().find(|(_, w)| !num_traits::Zero::is_zero(w)).map(|(x, _)| *x).expect("non-empty distribution")
}

type NetKey = (usize, Option<usize>, Vec<TypeId>, Vec<TypeId>);

/// Mean payoff (utility plus transfers) over `samples` seeded plays.
pub fn monte_carlo(
    policy: &DecisionPolicy,
    mechanism: Option<&MechanismKind>,
    profile: &[Strategy],
    samples: usize,
    seed: u64,
) -> Result<MonteCarlo> {
    let g = policy.game();
    let n = g.n_agents();
    if profile.len() != n {
        return Err(Error::ProfileShapeMismatch(format!("{} strategies for {n} agents", profile.len())));
    }
    let mut cache = match mechanism {
        Some(m) => Some(TransferCache::new(policy, m)?),
        None => None,
    };
    let mut nets: HashMap<NetKey, Vec<f64>> = HashMap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = vec![0.0; n];
    let mut sq = vec![0.0; n];
    let init = g.initial_profile();
    for _ in 0..samples {
        let mut types = vec![init.clone()];
        let mut reports = vec![init.clone()];
        let mut hist: Vec<Vec<TypeId>> = init.iter().map(|&t| vec![t]).collect();
        let mut recommended: Vec<usize> = Vec::new();
        let mut last: Option<JointDecision> = None;
        let mut payoff = vec![0.0; n];
        for t in 1..=g.rounds() {
            let prev_public = g.public_agent().map(|p| types[t - 1][p]);
            let mut cur = Vec::with_capacity(n);
            for a in 0..n {
                let succ = g.successors(a, t, types[t - 1][a], prev_public, last.as_ref())?;
                let ty = pick(&mut rng, succ);
                cur.push(ty);
                hist[a].push(ty);
            }
            types.push(cur);
            let mut rep = Vec::with_capacity(n);
            for a in 0..n {
                if g.is_public(a) {
                    rep.push(types[t][a]);
                    continue;
                }
                let obs = Observation {
                    agent: a,
                    round: t,
                    own_types: &hist[a],
                    reports: &reports[..t],
                    decisions: &recommended,
                    types: &types[..t],
                    recommendation: None,
                };
                rep.push(pick(&mut rng, &report(g, &profile[a], &obs)?));
            }
            reports.push(rep);
            let rec_idx = policy.decide(t, &reports[t]);
            recommended.push(rec_idx);
            let rec = g.joint_decisions(t)[rec_idx].clone();
            let mut actual = rec.clone();
            for a in 0..n {
                if g.is_public(a) || !g.has_private_choice(t, a) {
                    continue;
                }
                let obs = Observation {
                    agent: a,
                    round: t,
                    own_types: &hist[a],
                    reports: &reports[..=t],
                    decisions: &recommended,
                    types: &types[..t],
                    recommendation: Some(&rec),
                };
                actual.private[a] = pick(&mut rng, &private_decision(g, &profile[a], &obs)?);
            }
            let public = g.public_agent().map(|p| types[t][p]);
            for (a, x) in payoff.iter_mut().enumerate() {
                if !g.is_public(a) {
                    *x += rat::to_f64(&g.utility(t, a, &actual, types[t][a], public));
                }
            }
            if let Some(cache) = &mut cache {
                let prev_decision = if t == 1 { None } else { Some(recommended[t - 2]) };
                let key = (t, prev_decision, reports[t - 1].clone(), reports[t].clone());
                if !nets.contains_key(&key) {
                    let r = RoundReports { round: t, prev_decision, prev: &reports[t - 1], current: &reports[t] };
                    let net = cache.get(r)?.net.iter().map(rat::to_f64).collect();
                    nets.insert(key.clone(), net);
                }
                for (x, y) in payoff.iter_mut().zip(&nets[&key]) {
                    *x += y;
                }
            }
            last = Some(actual);
        }
        for a in 0..n {
            sum[a] += payoff[a];
            sq[a] += payoff[a] * payoff[a];
        }
    }
    let m = samples as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / m).collect();
    let std_err = sq
        .iter()
        .zip(&mean)
        .map(|(q, mu)| {
            let var = (q / m - mu * mu).max(0.0) * m / (m - 1.0).max(1.0);
            (var / m).sqrt()
        })
        .collect();
    Ok(MonteCarlo { samples, mean, std_err })
}
