//! Closed forms of expected `γ` sums in two-reporter projects.
//!
//! Applies to games where two agents carry probability annotations and all
//! other agents are passive. With `δ_t = p̂_t - p_t` (reported minus true
//! annotation) and `c` the price factor of the project, the balanced rule
//! pays in expectation
//!
//! ```text
//! E Σγ^b = c·E( Σ_{t<k} (δr_t - δr_{t-1})·δb_t - δr_{k-1}·δb_k + pr_0·pb_0 - pr_k·p̂b_k )
//! ```
//!
//! and symmetrically for the other agent. If one agent is truthful in even
//! rounds and the other in odd rounds, and both at the first and last round,
//! only the products `-δr_{2s}·δb_{2s+1}` (resp. `-δb_{2s-1}·δr_{2s}`) remain.

use std::collections::HashMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::game::{AgentId, Game, TypeId};
use crate::mechanism::MechanismKind;
use crate::paths::{collect_paths, PathState};
use crate::policy::DecisionPolicy;
use crate::rat::Rat;
use crate::strategy::Strategy;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaRow {
    pub round: usize,
    pub p: Rat,
    pub p_hat: Rat,
    pub delta: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaTrace {
    pub agent: AgentId,
    pub rows: Vec<DeltaRow>,
}

fn annotation(game: &Game, ty: TypeId) -> Result<Rat> {
    game.annotation(ty).cloned().ok_or_else(|| {
        Error::InvalidSpec(format!(
            "type {:?} of {} has no probability annotation",
            game.label(ty),
            game.agent_name(game.ty(ty).agent)
        ))
    })
}

pub fn delta_trace(game: &Game, path: &PathState, agent: AgentId) -> Result<DeltaTrace> {
    let mut rows = Vec::with_capacity(path.types.len());
    for (t, (types, reports)) in path.types.iter().zip(&path.reports).enumerate() {
        let p = annotation(game, types[agent])?;
        let p_hat = annotation(game, reports[agent])?;
        let delta = &p_hat - &p;
        rows.push(DeltaRow { round: t, p, p_hat, delta });
    }
    Ok(DeltaTrace { agent, rows })
}

/// The two annotated agents and the price factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pair {
    pub blue: AgentId,
    pub red: AgentId,
    pub coefficient: Rat,
}

/// Enumerated expectations of `Σγ` against the closed forms, in the order
/// (blue, red).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaCheck {
    pub gamma: [Rat; 2],
    pub closed_form: [Rat; 2],
}

impl LemmaCheck {
    pub fn holds(&self) -> bool {
        self.gamma == self.closed_form
    }
}

struct Traced {
    path: PathState,
    b: DeltaTrace,
    r: DeltaTrace,
}

fn traced(policy: &DecisionPolicy, profile: &[Strategy], pair: &Pair) -> Result<Vec<Traced>> {
    let g = policy.game();
    collect_paths(policy, profile, Some(&MechanismKind::BalancedTeam))?
        .into_iter()
        .map(|path| {
            let b = delta_trace(g, &path, pair.blue)?;
            let r = delta_trace(g, &path, pair.red)?;
            Ok(Traced { path, b, r })
        })
        .collect()
}

fn enumerated(paths: &[Traced], pair: &Pair) -> [Rat; 2] {
    let mut e = [Rat::zero(), Rat::zero()];
    for x in paths {
        e[0] += &x.path.probability * &x.path.gamma[pair.blue];
        e[1] += &x.path.probability * &x.path.gamma[pair.red];
    }
    e
}

pub fn lemma_parity_check(policy: &DecisionPolicy, profile: &[Strategy], pair: &Pair) -> Result<LemmaCheck> {
    let k = policy.game().rounds();
    let paths = traced(policy, profile, pair)?;
    for x in &paths {
        for t in 0..=k {
            let edge = t == 0 || t == k;
            if (edge || t % 2 == 0) && !x.b.rows[t].delta.is_zero() {
                return Err(Error::HypothesisViolated {
                    round: t,
                    detail: "blue's report differs from its type".into(),
                });
            }
            if (edge || t % 2 == 1) && !x.r.rows[t].delta.is_zero() {
                return Err(Error::HypothesisViolated {
                    round: t,
                    detail: "red's report differs from its type".into(),
                });
            }
        }
    }
    let mut rhs = [Rat::zero(), Rat::zero()];
    for x in &paths {
        let w = &x.path.probability;
        let (b, r) = (&x.b.rows, &x.r.rows);
        for s in 1..=k.saturating_sub(2) / 2 {
            rhs[0] -= w * &r[2 * s].delta * &b[2 * s + 1].delta;
        }
        for s in 1..=k.saturating_sub(1) / 2 {
            rhs[1] -= w * &b[2 * s - 1].delta * &r[2 * s].delta;
        }
    }
    Ok(LemmaCheck {
        gamma: enumerated(&paths, pair),
        closed_form: rhs.map(|v| v * &pair.coefficient),
    })
}

fn general_form(mine: &[DeltaRow], other: &[DeltaRow]) -> Rat {
    let k = mine.len() - 1;
    let mut v = Rat::zero();
    for t in 1..k {
        v += (&other[t].delta - &other[t - 1].delta) * &mine[t].delta;
    }
    if k >= 1 {
        v -= &other[k - 1].delta * &mine[k].delta;
    }
    v + &other[0].p * &mine[0].p - &other[k].p * &mine[k].p_hat
}

/// Checks that each agent's final report is conditionally independent of the
/// other's final type given the history of earlier rounds.
fn check_final_independence(paths: &[Traced]) -> Result<()> {
    let Some(first) = paths.first() else { return Ok(()) };
    let k = first.b.rows.len() - 1;
    if k == 0 {
        return Ok(());
    }
    #[derive(Default)]
    struct Acc {
        mass: Rat,
        xb: Rat,
        yr: Rat,
        xy_b: Rat,
        xr: Rat,
        yb: Rat,
        xy_r: Rat,
    }
    let mut groups: HashMap<(Vec<Vec<TypeId>>, Vec<Vec<TypeId>>, Vec<usize>), Acc> = HashMap::new();
    for x in paths {
        let key = (x.path.types[..k].to_vec(), x.path.reports[..k].to_vec(), x.path.recommended[..k - 1].to_vec());
        let a = groups.entry(key).or_default();
        let w = &x.path.probability;
        let (bh, rp) = (&x.b.rows[k].p_hat, &x.r.rows[k].p);
        let (rh, bp) = (&x.r.rows[k].p_hat, &x.b.rows[k].p);
        a.mass += w;
        a.xb += w * bh;
        a.yr += w * rp;
        a.xy_b += w * bh * rp;
        a.xr += w * rh;
        a.yb += w * bp;
        a.xy_r += w * rh * bp;
    }
    for a in groups.values() {
        if &a.xy_b * &a.mass != &a.xb * &a.yr || &a.xy_r * &a.mass != &a.xr * &a.yb {
            return Err(Error::HypothesisViolated {
                round: k,
                detail: "a final report is correlated with the other agent's final type".into(),
            });
        }
    }
    Ok(())
}

pub fn lemma_general_check(policy: &DecisionPolicy, profile: &[Strategy], pair: &Pair) -> Result<LemmaCheck> {
    let paths = traced(policy, profile, pair)?;
    check_final_independence(&paths)?;
    let mut rhs = [Rat::zero(), Rat::zero()];
    for x in &paths {
        let w = &x.path.probability;
        rhs[0] += w * general_form(&x.b.rows, &x.r.rows);
        rhs[1] += w * general_form(&x.r.rows, &x.b.rows);
    }
    Ok(LemmaCheck {
        gamma: enumerated(&paths, pair),
        closed_form: rhs.map(|v| v * &pair.coefficient),
    })
}
