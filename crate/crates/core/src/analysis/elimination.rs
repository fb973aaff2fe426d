//! Iterated elimination of dominated strategies.

use std::fmt;

use super::normal_form::NormalForm;
use crate::policy::product;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Strictly worse against every surviving opponent profile.
    Strict,
    /// Never better, and worse against some surviving opponent profile.
    Weak,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    /// Every dominated strategy of every player is removed at each stage.
    ExhaustiveSimultaneous,
    /// One strategy per stage: the first dominated one in player order, then
    /// strategy order.
    LexicographicIterative,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elimination {
    /// Position of the player in the table.
    pub player: usize,
    pub strategy: String,
    pub dominator: String,
    pub mode: Mode,
    pub stage: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EliminationTrace {
    pub steps: Vec<Elimination>,
}

impl fmt::Display for EliminationTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            let how = match s.mode {
                Mode::Strict => "strictly",
                Mode::Weak => "weakly",
            };
            writeln!(f, "stage {}: player {} drops {:?}, {how} dominated by {:?}", s.stage, s.player, s.strategy, s.dominator)?;
        }
        Ok(())
    }
}

/// Whether strategy `a` of `player` dominates `b` given the surviving
/// strategy indices `alive`.
pub fn dominates(nf: &NormalForm, alive: &[Vec<usize>], player: usize, a: usize, b: usize, mode: Mode) -> bool {
    if a == b {
        return false;
    }
    let mut layers: Vec<&[usize]> = alive.iter().map(|v| v.as_slice()).collect();
    let pin = [0usize];
    layers[player] = &pin;
    let mut better_somewhere = false;
    for mut idx in product(&layers) {
        idx[player] = a;
        let va = nf.cell(&idx)[player].clone();
        idx[player] = b;
        let vb = &nf.cell(&idx)[player];
        match mode {
            Mode::Strict if va <= *vb => return false,
            Mode::Weak if va < *vb => return false,
            _ => {}
        }
        better_somewhere |= va > *vb;
    }
    mode == Mode::Strict || better_somewhere
}

fn dominated(nf: &NormalForm, alive: &[Vec<usize>], player: usize, b: usize, mode: Mode) -> Option<usize> {
    alive[player].iter().copied().find(|&a| dominates(nf, alive, player, a, b, mode))
}

/// Eliminates to a fixpoint. Returns the surviving sub-table and the trace.
pub fn eliminate(nf: &NormalForm, mode: Mode, order: Order) -> (NormalForm, EliminationTrace) {
    let mut alive: Vec<Vec<usize>> = nf.shape().into_iter().map(|n| (0..n).collect()).collect();
    let mut trace = EliminationTrace::default();
    let mut stage = 0;
    loop {
        stage += 1;
        let mut found: Vec<(usize, usize, usize)> = Vec::new();
        'scan: for p in 0..alive.len() {
            if alive[p].len() < 2 {
                continue;
            }
            for &b in &alive[p] {
                if let Some(a) = dominated(nf, &alive, p, b, mode) {
                    found.push((p, b, a));
                    if order == Order::LexicographicIterative {
                        break 'scan;
                    }
                }
            }
        }
        // a player never loses all strategies in one simultaneous stage
        for p in 0..alive.len() {
            let drop = found.iter().filter(|f| f.0 == p).count();
            if drop == alive[p].len() {
                let keep = found.iter().position(|f| f.0 == p).expect("non-empty");
                found.remove(keep);
            }
        }
        if found.is_empty() {
            break;
        }
        for &(p, b, a) in &found {
            trace.steps.push(Elimination {
                player: p,
                strategy: nf.strategies[p][b].clone(),
                dominator: nf.strategies[p][a].clone(),
                mode,
                stage,
            });
        }
        for (p, b, _) in found {
            alive[p].retain(|&x| x != b);
        }
    }
    (nf.restrict(&alive), trace)
}

/// Replays a trace against the full table, checking every recorded
/// domination at its stage. Returns the first step that does not verify.
pub fn verify_trace(nf: &NormalForm, trace: &EliminationTrace) -> Result<(), Elimination> {
    let mut alive: Vec<Vec<usize>> = nf.shape().into_iter().map(|n| (0..n).collect()).collect();
    let mut stage = 0;
    let mut pending: Vec<(usize, usize)> = Vec::new();
    for step in &trace.steps {
        if step.stage != stage {
            for (p, b) in pending.drain(..) {
                alive[p].retain(|&x| x != b);
            }
            stage = step.stage;
        }
        let find = |name: &str| nf.strategies[step.player].iter().position(|s| s == name);
        let (Some(b), Some(a)) = (find(&step.strategy), find(&step.dominator)) else {
            return Err(step.clone());
        };
        if !alive[step.player].contains(&b)
            || !alive[step.player].contains(&a)
            || !dominates(nf, &alive, step.player, a, b, step.mode) {
            return Err(step.clone());
        }
        pending.push((step.player, b));
    }
    Ok(())
}
