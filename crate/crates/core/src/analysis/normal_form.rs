//! Induced normal forms over finite strategy sets.

use std::fmt::Write as _;
use std::thread;

use crate::error::{Error, Result};
use crate::game::AgentId;
use crate::mechanism::MechanismKind;
use crate::policy::{product, DecisionPolicy};
use crate::rat::{self, Rat};
use crate::strategy::{truthful_profile, Strategy, StrategySet};

use super::payoff::{expectation, Measure};

/// A payoff table. Cells are stored row-major over the players' strategy
/// lists; each cell holds one exact value per player.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub players: Vec<AgentId>,
    pub player_names: Vec<String>,
    pub strategies: Vec<Vec<String>>,
    cells: Vec<Vec<Rat>>,
    /// Display-only factor applied by [`NormalForm::to_text`].
    pub scale: Option<Rat>,
}

impl NormalForm {
    pub fn new(
        players: Vec<AgentId>,
        player_names: Vec<String>,
        strategies: Vec<Vec<String>>,
        cells: Vec<Vec<Rat>>,
    ) -> Result<Self> {
        let k = players.len();
        if player_names.len() != k || strategies.len() != k {
            return Err(Error::ProfileShapeMismatch("player lists differ in length".into()));
        }
        let size: usize = strategies.iter().map(|s| s.len()).product();
        if cells.len() != size || cells.iter().any(|c| c.len() != k) {
            return Err(Error::ProfileShapeMismatch(format!("{} cells for a table of {size}", cells.len())));
        }
        Ok(NormalForm { players, player_names, strategies, cells, scale: None })
    }

    pub fn with_scale(mut self, scale: Rat) -> Self {
        self.scale = Some(scale);
        self
    }

    pub fn shape(&self) -> Vec<usize> {
        self.strategies.iter().map(|s| s.len()).collect()
    }

    fn offset(&self, idx: &[usize]) -> usize {
        idx.iter().zip(self.shape()).fold(0, |acc, (&i, n)| acc * n + i)
    }

    pub fn cell(&self, idx: &[usize]) -> &[Rat] {
        &self.cells[self.offset(idx)]
    }

    /// Cell multiplied by the display scale.
    pub fn scaled(&self, idx: &[usize]) -> Vec<Rat> {
        let c = self.cell(idx);
        match &self.scale {
            Some(s) => c.iter().map(|v| v * s).collect(),
            None => c.to_vec(),
        }
    }

    pub fn index(&self, names: &[&str]) -> Option<Vec<usize>> {
        names
            .iter()
            .zip(&self.strategies)
            .map(|(n, list)| list.iter().position(|s| s == n))
            .collect()
    }

    pub fn cell_by_name(&self, names: &[&str]) -> Option<&[Rat]> {
        self.index(names).map(|i| self.cell(&i))
    }

    /// Every strategy profile in storage order.
    pub fn profiles(&self) -> Vec<Vec<usize>> {
        let ranges: Vec<Vec<usize>> = self.shape().into_iter().map(|n| (0..n).collect()).collect();
        let layers: Vec<&[usize]> = ranges.iter().map(|r| r.as_slice()).collect();
        product(&layers)
    }

    /// Sub-table keeping the listed strategy indices of every player.
    pub fn restrict(&self, keep: &[Vec<usize>]) -> NormalForm {
        let layers: Vec<&[usize]> = keep.iter().map(|k| k.as_slice()).collect();
        let cells = product(&layers).iter().map(|idx| self.cell(idx).to_vec()).collect();
        NormalForm {
            players: self.players.clone(),
            player_names: self.player_names.clone(),
            strategies: keep
                .iter()
                .zip(&self.strategies)
                .map(|(k, s)| k.iter().map(|&i| s[i].clone()).collect())
                .collect(),
            cells,
            scale: self.scale.clone(),
        }
    }

    /// One row per profile: the strategy names, then the exact payoffs.
    pub fn to_csv(&self) -> String {
        self.to_csv_with(&rat::fmt)
    }

    pub fn to_csv_with(&self, num: &dyn Fn(&Rat) -> String) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = self.player_names.clone();
        header.extend(self.player_names.iter().map(|n| format!("{n}.payoff")));
        w.write_record(&header).expect("in-memory write");
        for idx in self.profiles() {
            let mut row: Vec<String> = idx.iter().zip(&self.strategies).map(|(&i, s)| s[i].clone()).collect();
            row.extend(self.cell(&idx).iter().map(num));
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    /// Reads a table written by [`NormalForm::to_csv`]. Player ids are taken
    /// to be the column positions.
    pub fn from_csv(src: &str) -> Result<NormalForm> {
        let bad = |line: usize, m: String| Error::Parse { line, column: 1, message: m };
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(src.as_bytes());
        let header = r.headers().map_err(|e| bad(1, e.to_string()))?.clone();
        if header.len() % 2 != 0 || header.is_empty() {
            return Err(bad(1, "expected strategy and payoff columns for every player".into()));
        }
        let k = header.len() / 2;
        let names: Vec<String> = header.iter().take(k).map(String::from).collect();
        let mut strategies: Vec<Vec<String>> = vec![Vec::new(); k];
        let mut rows = Vec::new();
        for (n, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| bad(n + 2, e.to_string()))?;
            if rec.len() != 2 * k {
                return Err(bad(n + 2, format!("{} fields, expected {}", rec.len(), 2 * k)));
            }
            let mut idx = Vec::with_capacity(k);
            for (p, list) in strategies.iter_mut().enumerate() {
                let s = &rec[p];
                let i = match list.iter().position(|x| x == s) {
                    Some(i) => i,
                    None => {
                        list.push(s.to_string());
                        list.len() - 1
                    }
                };
                idx.push(i);
            }
            let vals = (k..2 * k)
                .map(|c| rat::parse(&rec[c]).ok_or_else(|| bad(n + 2, format!("bad number {:?}", &rec[c]))))
                .collect::<Result<Vec<Rat>>>()?;
            rows.push((idx, vals));
        }
        let shape: Vec<usize> = strategies.iter().map(|s| s.len()).collect();
        let size: usize = shape.iter().product();
        let mut cells: Vec<Option<Vec<Rat>>> = vec![None; size];
        for (idx, vals) in rows {
            let off = idx.iter().zip(&shape).fold(0, |acc, (&i, &n)| acc * n + i);
            if cells[off].replace(vals).is_some() {
                return Err(bad(1, format!("profile {idx:?} listed twice")));
            }
        }
        let cells = cells
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| bad(1, "table is incomplete".into()))?;
        NormalForm::new((0..k).collect(), names, strategies, cells)
    }

    /// Aligned table; two players give a matrix, more give one line per
    /// profile.
    pub fn to_text(&self) -> String {
        self.to_text_with(&rat::fmt)
    }

    /// [`NormalForm::to_text`] with a custom number format.
    pub fn to_text_with(&self, num: &dyn Fn(&Rat) -> String) -> String {
        let cell = |idx: &[usize]| {
            let v: Vec<String> = self.scaled(idx).iter().map(num).collect();
            format!("({})", v.join(", "))
        };
        let mut out = String::new();
        if let Some(s) = &self.scale {
            let _ = writeln!(out, "values scaled by {}", rat::fmt(s));
        }
        if self.players.len() != 2 {
            for idx in self.profiles() {
                let names: Vec<&str> =
                    idx.iter().zip(&self.strategies).map(|(&i, s)| s[i].as_str()).collect();
                let _ = writeln!(out, "{}  {}", names.join(" / "), cell(&idx));
            }
            return out;
        }
        let (rows, cols) = (&self.strategies[0], &self.strategies[1]);
        let texts: Vec<Vec<String>> =
            (0..rows.len()).map(|i| (0..cols.len()).map(|j| cell(&[i, j])).collect()).collect();
        let head = format!("{} \\ {}", self.player_names[0], self.player_names[1]);
        let w0 = rows.iter().map(|r| r.len()).chain([head.len()]).max().unwrap_or(0);
        let widths: Vec<usize> = (0..cols.len())
            .map(|j| texts.iter().map(|r| r[j].len()).chain([cols[j].len()]).max().unwrap_or(0))
            .collect();
        let _ = write!(out, "{head:<w0$}");
        for (c, w) in cols.iter().zip(&widths) {
            let _ = write!(out, "  {c:>w$}");
        }
        out.push('\n');
        for (r, line) in rows.iter().zip(&texts) {
            let _ = write!(out, "{r:<w0$}");
            for (t, w) in line.iter().zip(&widths) {
                let _ = write!(out, "  {t:>w$}");
            }
            out.push('\n');
        }
        out
    }
}

/// Payoff table over the product of `sets`; agents without a set play
/// truthfully. Cells are evaluated on worker threads.
pub fn induced_normal_form(
    policy: &DecisionPolicy,
    mechanism: Option<&MechanismKind>,
    sets: &[StrategySet],
    measure: Measure,
) -> Result<NormalForm> {
    let g = policy.game();
    let base = truthful_profile(g);
    let lists: Vec<Vec<usize>> = sets.iter().map(|s| (0..s.len()).collect()).collect();
    let layers: Vec<&[usize]> = lists.iter().map(|l| l.as_slice()).collect();
    let profiles = product(&layers);
    let build = |idx: &[usize]| -> Vec<Strategy> {
        let mut p = base.clone();
        for (set, &i) in sets.iter().zip(idx) {
            p[set.agent] = set.strategies[i].clone();
        }
        p
    };
    let workers = thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(profiles.len().max(1));
    let chunk = profiles.len().div_ceil(workers.max(1)).max(1);
    let results: Vec<Result<Vec<Rat>>> = thread::scope(|s| {
        let handles: Vec<_> = profiles
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    part.iter()
                        .map(|idx| {
                            let e = expectation(policy, mechanism, &build(idx))?;
                            let v = e.measure(measure);
                            Ok(sets.iter().map(|set| v[set.agent].clone()).collect())
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    });
    let cells = results.into_iter().collect::<Result<Vec<_>>>()?;
    NormalForm::new(
        sets.iter().map(|s| s.agent).collect(),
        sets.iter().map(|s| g.agent_name(s.agent).to_string()).collect(),
        sets.iter().map(|s| s.names().into_iter().map(String::from).collect()).collect(),
        cells,
    )
}
