//! `dynmech` command-line front end.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage or configuration error.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dynmech::analysis::budget::budget_balance_check;
use dynmech::analysis::elimination::{eliminate, verify_trace, Mode, Order};
use dynmech::analysis::guarantee::{coalition_check, guarantee_certificate};
use dynmech::analysis::lemma::{lemma_general_check, lemma_parity_check, LemmaCheck, Pair};
use dynmech::analysis::martingale::verify_martingale;
use dynmech::analysis::montecarlo::monte_carlo;
use dynmech::analysis::nash::nash_check;
use dynmech::analysis::normal_form::{induced_normal_form, NormalForm};
use dynmech::analysis::payoff::{expectation, Measure};
use dynmech::format::{export_scenario, load_scenario};
use dynmech::mechanism::{ledger, permutations};
use dynmech::paths::collect_paths;
use dynmech::policy::product;
use dynmech::rat::{self, Rat};
use dynmech::scenarios::{builtins, Example1, Process, ScenarioId};
use dynmech::strategy::truthful_profile;
use dynmech::{compute_efficient_policy, DecisionPolicy, Error, Game, GameSpec, MechanismKind, Strategy, StrategySet};

#[derive(Parser)]
#[command(name = "dynmech", version, about = "Exact analysis of transfer mechanisms for dynamic reporting games")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    /// Print numbers as decimals with this many places instead of exact fractions.
    #[arg(long, global = true, value_name = "K")]
    decimal: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Built-in scenarios.
    Scenario {
        #[command(subcommand)]
        action: ScenarioCmd,
    },
    /// The efficient decision policy.
    Policy {
        #[command(subcommand)]
        action: PolicyCmd,
    },
    /// Expected payoff table over the registered strategy sets.
    Table(TableArgs),
    /// Iterated elimination of dominated strategies.
    Eliminate(EliminateArgs),
    /// Run one verification check.
    Verify(VerifyArgs),
    /// Transfer ledgers of the paths of one profile.
    Ledger(LedgerArgs),
    /// Expected payoffs of one profile.
    Payoff(PayoffArgs),
}

#[derive(Subcommand)]
enum ScenarioCmd {
    List,
    /// Print the scenario in the file format.
    Show(Source),
}

#[derive(Subcommand)]
enum PolicyCmd {
    Dump(Source),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    #[value(name = "example1")]
    Example1,
    #[value(name = "appendixA")]
    AppendixA,
    #[value(name = "appendixB")]
    AppendixB,
    #[value(name = "yesno")]
    YesNo,
    #[value(name = "collusion")]
    Collusion,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProcessArg {
    Default,
    Lattice,
    Staggered,
}

#[derive(Args, Clone)]
struct Source {
    #[arg(long, value_enum, required_unless_present = "file", conflicts_with = "file")]
    scenario: Option<Family>,
    /// Scenario file (see docs/scenario-format.md).
    #[arg(long)]
    file: Option<String>,
    /// Rounds of example1.
    #[arg(long = "K")]
    big_k: Option<usize>,
    /// Number of agents.
    #[arg(long)]
    n: Option<usize>,
    /// Rounds of yesno and collusion.
    #[arg(long)]
    k: Option<usize>,
    /// Use the 84/104/-204 utilities in example1.
    #[arg(long)]
    large: bool,
    #[arg(long, value_enum)]
    process: Option<ProcessArg>,
    /// Lowest reportable probability before the last round of example1.
    #[arg(long, value_parser = parse_rat)]
    floor: Option<Rat>,
    /// Initial probabilities of example1 and appendixB.
    #[arg(long = "p-blue", value_parser = parse_rat)]
    p_blue: Option<Rat>,
    #[arg(long = "p-red", value_parser = parse_rat)]
    p_red: Option<Rat>,
    /// Cost of a YES in yesno.
    #[arg(long, value_parser = parse_rat)]
    cost: Option<Rat>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mech {
    None,
    Balanced,
    Sequential,
    Shapley,
    Unbalanced,
}

#[derive(Args, Clone)]
struct MechArgs {
    #[arg(long, value_enum, default_value = "balanced")]
    mechanism: Mech,
    /// Update order of the sequential mechanism, as comma-separated agent names.
    #[arg(long)]
    order: Option<String>,
    /// Picks the sequential update order among all permutations unless --order
    /// is given; also seeds sampling.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeasureArg {
    Total,
    Utility,
    Transfers,
    Gamma,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    mech: MechArgs,
    #[arg(long, value_enum, default_value = "total")]
    measure: MeasureArg,
    /// Multiply every displayed value, e.g. 1/3.
    #[arg(long, value_parser = parse_rat)]
    normalize: Option<Rat>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Weak,
    Strict,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepArg {
    Lexicographic,
    Exhaustive,
}

#[derive(Args)]
struct EliminateArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    mech: MechArgs,
    #[arg(long, value_enum, default_value = "weak")]
    mode: ModeArg,
    /// Lexicographic drops one strategy per stage; exhaustive drops every
    /// dominated strategy at once.
    #[arg(long, value_enum, default_value = "lexicographic")]
    sweep: SweepArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Check {
    Balance,
    Martingale,
    Guarantee,
    LemmaParity,
    LemmaGeneral,
    Nash,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    check: Check,
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    mech: MechArgs,
    /// `rowIxcolJ` (1-based, first two strategy sets) or comma-separated
    /// strategy names, one per set. Defaults to every registered profile for
    /// the lemma and martingale checks and to truthful play otherwise.
    #[arg(long)]
    profile: Option<String>,
    /// Price factor of the lemma closed forms; built-ins know theirs.
    #[arg(long, value_parser = parse_rat)]
    coefficient: Option<Rat>,
}

#[derive(Args)]
struct LedgerArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    mech: MechArgs,
    #[arg(long)]
    profile: Option<String>,
    /// Show only the most probable paths.
    #[arg(long, default_value_t = 10)]
    top: usize,
}

#[derive(Args)]
struct PayoffArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    mech: MechArgs,
    #[arg(long)]
    profile: Option<String>,
    /// Monte Carlo cross-check with this many samples; needs --seed.
    #[arg(long, requires = "seed")]
    samples: Option<usize>,
}

fn parse_rat(s: &str) -> Result<Rat, String> {
    let t = s.trim();
    let v = match t.strip_suffix('%') {
        Some(p) => rat::parse(p).map(|r| r / rat::int(100)),
        None => rat::parse(t),
    };
    v.ok_or_else(|| format!("not a number: {s:?}"))
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CertificateFailure { .. } => 1,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

type Run<T> = Result<T, Failure>;

/// What a command printed and whether it passed.
struct Report {
    out: String,
    pass: bool,
}

impl Report {
    fn ok(out: String) -> Self {
        Report { out, pass: true }
    }
}

struct Ctx {
    format: Format,
    decimal: Option<usize>,
}

impl Ctx {
    fn num(&self, r: &Rat) -> String {
        match self.decimal {
            Some(k) => rat::fmt_decimal(r, k),
            None => rat::fmt(r),
        }
    }

    fn nums(&self, v: &[Rat]) -> Vec<String> {
        v.iter().map(|x| self.num(x)).collect()
    }

    fn tuple(&self, v: &[Rat]) -> String {
        format!("({})", self.nums(v).join(", "))
    }

    fn json(&self, v: Value) -> String {
        serde_json::to_string_pretty(&v).expect("plain values serialize") + "\n"
    }

    fn no_csv(&self, what: &str) -> Run<()> {
        if self.format == Format::Csv {
            return Err(usage(format!("{what} has no csv output")));
        }
        Ok(())
    }
}

struct Loaded {
    id: Option<ScenarioId>,
    spec: GameSpec,
    game: Game,
    sets: Vec<StrategySet>,
}

impl Source {
    fn scenario_id(&self, family: Family) -> ScenarioId {
        let half = || rat::ratio(1, 2);
        match family {
            Family::Example1 => {
                let mut e = Example1::new(self.big_k.unwrap_or(2), self.n.unwrap_or(3));
                if self.large {
                    e = e.large();
                }
                if let Some(p) = self.process {
                    e = e.process(match p {
                        ProcessArg::Default => Process::Default,
                        ProcessArg::Lattice => Process::Lattice,
                        ProcessArg::Staggered => Process::Staggered,
                    });
                }
                if let Some(f) = &self.floor {
                    e = e.floor(f.clone());
                }
                e.initial(self.p_blue.clone().unwrap_or_else(half), self.p_red.clone().unwrap_or_else(half))
                    .pipe(ScenarioId::Example1)
            }
            Family::AppendixA => ScenarioId::AppendixA { agents: self.n.unwrap_or(3) },
            Family::AppendixB => ScenarioId::AppendixB {
                p_blue: self.p_blue.clone().unwrap_or_else(half),
                p_red: self.p_red.clone().unwrap_or_else(half),
                agents: self.n.unwrap_or(3),
            },
            Family::YesNo => ScenarioId::YesNo {
                agents: self.n.unwrap_or(2),
                rounds: self.k.unwrap_or(2),
                yes_cost: self.cost.clone().unwrap_or_else(rat::zero),
            },
            Family::Collusion => ScenarioId::Collusion { rounds: self.k.unwrap_or(3) },
        }
    }

    fn load(&self) -> Run<Loaded> {
        if let Some(path) = &self.file {
            let src = std::fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))?;
            let (game, sets) = load_scenario(&src)?;
            return Ok(Loaded { id: None, spec: game.spec().clone(), game, sets });
        }
        let family = self.scenario.ok_or_else(|| usage("give --scenario or --file"))?;
        let id = self.scenario_id(family);
        let spec = id.spec()?;
        let game = dynmech::validate(spec.clone())?;
        let sets = id.strategy_sets(&game);
        Ok(Loaded { id: Some(id), spec, game, sets })
    }
}

trait Pipe: Sized {
    fn pipe<T>(self, f: impl FnOnce(Self) -> T) -> T {
        f(self)
    }
}

impl<T> Pipe for T {}

fn mechanism(game: &Game, m: &MechArgs) -> Run<Option<MechanismKind>> {
    Ok(match m.mechanism {
        Mech::None => None,
        Mech::Balanced => Some(MechanismKind::BalancedTeam),
        Mech::Shapley => Some(MechanismKind::ShapleyAveraged),
        Mech::Unbalanced => Some(MechanismKind::UnbalancedTeam),
        Mech::Sequential => {
            let order = match (&m.order, m.seed) {
                (Some(names), _) => names
                    .split(',')
                    .map(|n| game.agent_id(n.trim()).ok_or_else(|| usage(format!("unknown agent {n:?} in --order"))))
                    .collect::<Run<Vec<_>>>()?,
                (None, Some(seed)) => {
                    let all = permutations(&game.reporting_agents());
                    all[(seed % all.len() as u64) as usize].clone()
                }
                (None, None) => game.reporting_agents(),
            };
            let k = MechanismKind::SequentialUpdate(order);
            k.check(game)?;
            Some(k)
        }
    })
}

fn needs_mechanism(m: Option<MechanismKind>, what: &str) -> Run<MechanismKind> {
    m.ok_or_else(|| usage(format!("{what} needs a mechanism")))
}

/// Resolves `--profile`; returns the full profile and a display name.
fn profile(l: &Loaded, spec: Option<&str>) -> Run<(Vec<Strategy>, String)> {
    let mut p = truthful_profile(&l.game);
    let Some(spec) = spec else { return Ok((p, "truthful".into())) };
    let grid = spec
        .strip_prefix("row")
        .and_then(|s| s.split_once("xcol"))
        .and_then(|(r, c)| Some((r.parse::<usize>().ok()?, c.parse::<usize>().ok()?)));
    if let Some((r, c)) = grid {
        if l.sets.len() < 2 {
            return Err(usage("rowIxcolJ needs two strategy sets"));
        }
        for (set, i) in l.sets.iter().zip([r, c]) {
            let s = i.checked_sub(1).and_then(|i| set.strategies.get(i)).ok_or_else(|| {
                usage(format!("{} has {} strategies, not {i}", l.game.agent_name(set.agent), set.len()))
            })?;
            p[set.agent] = s.clone();
        }
        return Ok((p, spec.to_string()));
    }
    let names: Vec<&str> = spec.split(',').map(str::trim).collect();
    if names.len() != l.sets.len() {
        return Err(usage(format!("{} strategy names for {} strategy sets", names.len(), l.sets.len())));
    }
    for (set, name) in l.sets.iter().zip(&names) {
        let s = set.get(name).ok_or_else(|| {
            usage(format!("{} has no strategy {name:?}; choices: {}", l.game.agent_name(set.agent), set.names().join(", ")))
        })?;
        p[set.agent] = s.clone();
    }
    Ok((p, names.join(" x ")))
}

fn registered_profiles(l: &Loaded) -> Vec<(Vec<Strategy>, String)> {
    let lists: Vec<Vec<usize>> = l.sets.iter().map(|s| (0..s.len()).collect()).collect();
    let layers: Vec<&[usize]> = lists.iter().map(|v| v.as_slice()).collect();
    product(&layers)
        .into_iter()
        .map(|idx| {
            let mut p = truthful_profile(&l.game);
            let mut names = Vec::new();
            for (set, &i) in l.sets.iter().zip(&idx) {
                p[set.agent] = set.strategies[i].clone();
                names.push(set.strategies[i].name.clone());
            }
            (p, names.join(" x "))
        })
        .collect()
}

fn cmd_scenario_list(cx: &Ctx) -> Run<Report> {
    let ids = builtins();
    Ok(Report::ok(match cx.format {
        Format::Json => cx.json(json!(ids.iter().map(|id| json!({"name": id.name(), "instance": id.to_string()})).collect::<Vec<_>>())),
        Format::Csv => {
            let mut s = String::from("name,instance\n");
            for id in &ids {
                let _ = writeln!(s, "{},\"{}\"", id.name(), id);
            }
            s
        }
        Format::Text => ids.iter().map(|id| format!("{:<10} {id}\n", id.name())).collect(),
    }))
}

fn cmd_scenario_show(cx: &Ctx, src: &Source) -> Run<Report> {
    cx.no_csv("scenario show")?;
    let l = src.load()?;
    let text = export_scenario(&l.spec, &l.sets);
    Ok(Report::ok(match cx.format {
        Format::Json => cx.json(json!({"name": l.game.name(), "scenario": text})),
        _ => text,
    }))
}

fn cmd_policy_dump(cx: &Ctx, src: &Source) -> Run<Report> {
    let l = src.load()?;
    let pol = compute_efficient_policy(&l.game);
    let g = &l.game;
    let entries = pol.dump();
    let labels = |p: &[dynmech::TypeId]| p.iter().map(|&t| g.label(t).to_string()).collect::<Vec<_>>();
    let decision = |t: usize, d: usize| g.decision_label(t, &g.joint_decisions(t)[d]);
    Ok(Report::ok(match cx.format {
        Format::Json => cx.json(json!(entries
            .iter()
            .map(|e| json!({
                "round": e.round,
                "profile": labels(&e.profile),
                "decision": decision(e.round, e.decision),
                "tied": e.tied,
                "value": cx.nums(&e.value),
            }))
            .collect::<Vec<_>>())),
        Format::Csv => {
            let names: Vec<&str> = (0..g.n_agents()).map(|a| g.agent_name(a)).collect();
            let mut s = format!("round,{},decision,tied,value\n", names.join(","));
            for e in &entries {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    e.round,
                    labels(&e.profile).join(","),
                    decision(e.round, e.decision),
                    e.tied,
                    cx.nums(&e.value).join(" ")
                );
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for e in &entries {
                let tie = if e.tied { " (tie)" } else { "" };
                let _ = writeln!(
                    s,
                    "round {}  {}  -> {}{tie}  value {}",
                    e.round,
                    labels(&e.profile).join(" "),
                    decision(e.round, e.decision),
                    cx.tuple(&e.value)
                );
            }
            s
        }
    }))
}

fn table(l: &Loaded, pol: &DecisionPolicy, m: Option<&MechanismKind>, measure: MeasureArg) -> Run<NormalForm> {
    if l.sets.is_empty() || l.sets.iter().any(|s| s.is_empty()) {
        return Err(usage("the scenario registers no strategy sets"));
    }
    let measure = match measure {
        MeasureArg::Total => Measure::Total,
        MeasureArg::Utility => Measure::Utility,
        MeasureArg::Transfers => Measure::Transfers,
        MeasureArg::Gamma => Measure::Gamma,
    };
    Ok(induced_normal_form(pol, m, &l.sets, measure)?)
}

fn render_table(cx: &Ctx, nf: &NormalForm) -> String {
    match cx.format {
        Format::Text => nf.to_text_with(&|r| cx.num(r)),
        Format::Csv => {
            // exact scaled values, so the output reads back as it is shown
            let cells = nf.profiles().iter().map(|idx| nf.scaled(idx)).collect();
            let shown = NormalForm::new(nf.players.clone(), nf.player_names.clone(), nf.strategies.clone(), cells)
                .expect("same shape");
            shown.to_csv_with(&|r| cx.num(r))
        }
        Format::Json => cx.json(json!({
            "players": nf.player_names,
            "strategies": nf.strategies,
            "scale": nf.scale.as_ref().map(rat::fmt),
            "cells": nf.profiles().iter().map(|idx| json!({
                "profile": idx.iter().zip(&nf.strategies).map(|(&i, s)| s[i].clone()).collect::<Vec<_>>(),
                "payoffs": cx.nums(&nf.scaled(idx)),
            })).collect::<Vec<_>>(),
        })),
    }
}

fn cmd_table(cx: &Ctx, a: &TableArgs) -> Run<Report> {
    let l = a.source.load()?;
    let pol = compute_efficient_policy(&l.game);
    let m = mechanism(&l.game, &a.mech)?;
    let mut nf = table(&l, &pol, m.as_ref(), a.measure)?;
    if let Some(s) = &a.normalize {
        nf = nf.with_scale(s.clone());
    }
    Ok(Report::ok(render_table(cx, &nf)))
}

fn cmd_eliminate(cx: &Ctx, a: &EliminateArgs) -> Run<Report> {
    cx.no_csv("eliminate")?;
    let l = a.source.load()?;
    let pol = compute_efficient_policy(&l.game);
    let m = mechanism(&l.game, &a.mech)?;
    let nf = table(&l, &pol, m.as_ref(), MeasureArg::Total)?;
    let mode = match a.mode {
        ModeArg::Weak => Mode::Weak,
        ModeArg::Strict => Mode::Strict,
    };
    let order = match a.sweep {
        SweepArg::Lexicographic => Order::LexicographicIterative,
        SweepArg::Exhaustive => Order::ExhaustiveSimultaneous,
    };
    let (rest, trace) = eliminate(&nf, mode, order);
    let verified = verify_trace(&nf, &trace).is_ok();
    Ok(Report {
        pass: verified,
        out: match cx.format {
            Format::Json => cx.json(json!({
                "steps": trace.steps.iter().map(|s| json!({
                    "stage": s.stage,
                    "player": nf.player_names[s.player],
                    "dropped": s.strategy,
                    "dominator": s.dominator,
                })).collect::<Vec<_>>(),
                "survivors": rest.strategies,
                "trace_verified": verified,
            })),
            _ => {
                let mut s = String::new();
                if trace.steps.is_empty() {
                    s.push_str("nothing is eliminated\n");
                }
                for st in &trace.steps {
                    let _ = writeln!(
                        s,
                        "stage {}: {} drops {:?}, {} dominated by {:?}",
                        st.stage,
                        nf.player_names[st.player],
                        st.strategy,
                        if st.mode == Mode::Weak { "weakly" } else { "strictly" },
                        st.dominator
                    );
                }
                s.push_str("survivors:\n");
                s.push_str(&rest.to_text_with(&|r| cx.num(r)));
                if !verified {
                    s.push_str("trace does not verify\n");
                }
                s
            }
        },
    })
}

fn lemma_pair(l: &Loaded, given: &Option<Rat>) -> Run<Pair> {
    let coefficient = match (given, &l.id) {
        (Some(c), _) => c.clone(),
        (None, Some(ScenarioId::Example1(e))) => rat::int(e.utilities.coefficient()),
        (None, Some(ScenarioId::AppendixA { .. } | ScenarioId::AppendixB { .. })) => rat::int(100),
        _ => return Err(usage("this scenario needs --coefficient")),
    };
    if l.game.reporting_agents().len() < 2 {
        return Err(usage("the lemma checks need two reporting agents"));
    }
    Ok(Pair { blue: 0, red: 1, coefficient })
}

fn cmd_verify(cx: &Ctx, a: &VerifyArgs) -> Run<Report> {
    cx.no_csv("verify")?;
    let l = a.source.load()?;
    let pol = compute_efficient_policy(&l.game);
    let g = &l.game;
    let m = mechanism(g, &a.mech)?;
    let names: Vec<&str> = (0..g.n_agents()).map(|i| g.agent_name(i)).collect();
    let mut lines: Vec<String> = Vec::new();
    let mut data = serde_json::Map::new();
    let pass = match a.check {
        Check::Balance => {
            let m = needs_mechanism(m, "balance")?;
            let (p, pname) = profile(&l, a.profile.as_deref())?;
            let paths = collect_paths(&pol, &p, None)?;
            let mut unbalanced = 0;
            let mut expected_subsidy = Rat::default();
            for path in &paths {
                let v = budget_balance_check(&ledger(&pol, &m, &path.reports)?);
                if !v.is_balanced() {
                    unbalanced += 1;
                }
                expected_subsidy += &path.probability * &v.subsidy;
            }
            lines.push(format!("{m} on {pname}: {} paths, {unbalanced} with nonzero transfer sum", paths.len()));
            lines.push(format!("expected subsidy {}", cx.num(&expected_subsidy)));
            data.insert("paths".into(), json!(paths.len()));
            data.insert("unbalanced_paths".into(), json!(unbalanced));
            data.insert("expected_subsidy".into(), json!(cx.num(&expected_subsidy)));
            if m.is_balanced() {
                unbalanced == 0
            } else {
                // subsidized by design: reported, not failed
                lines.push("warning: the mechanism is subsidized".into());
                data.insert("warning".into(), json!("subsidized"));
                true
            }
        }
        Check::Martingale => {
            let m = needs_mechanism(m, "martingale")?;
            if !matches!(m, MechanismKind::SequentialUpdate(_)) {
                return Err(usage("the martingale check needs --mechanism sequential"));
            }
            let profiles = match &a.profile {
                Some(s) => vec![profile(&l, Some(s))?],
                None => registered_profiles(&l),
            };
            let mut ok = true;
            let mut runs = 0;
            for agent in g.reporting_agents() {
                let mut seen: Vec<Vec<Strategy>> = Vec::new();
                for (p, _) in &profiles {
                    let mut q = p.clone();
                    q[agent] = truthful_profile(g)[agent].clone();
                    if seen.contains(&q) {
                        continue;
                    }
                    let r = verify_martingale(&pol, &m, agent, &q)?;
                    runs += 1;
                    if let Some(x) = r.nonzero.first() {
                        ok = false;
                        lines.push(format!(
                            "{}: residual {} at round {} ({:?})",
                            names[agent],
                            cx.num(&x.residual),
                            x.round,
                            x.event
                        ));
                    }
                    seen.push(q);
                }
            }
            lines.push(format!("{runs} runs, {}", if ok { "all residuals zero" } else { "nonzero residuals" }));
            data.insert("runs".into(), json!(runs));
            ok
        }
        Check::Guarantee => {
            let m = needs_mechanism(m, "guarantee")?;
            let cert = guarantee_certificate(&pol, &m)?;
            for i in g.reporting_agents() {
                lines.push(format!(
                    "{}: guarantee {} adversarial {}",
                    names[i],
                    cx.num(&cert.guarantees[i]),
                    cx.num(&cert.adversarial[i])
                ));
            }
            let sum: Rat = cert.guarantees.iter().sum();
            lines.push(format!("sum of guarantees {} efficient total {}", cx.num(&sum), cx.num(&cert.efficient_total)));
            let agents = g.reporting_agents();
            let mut coalitions_ok = true;
            for (k, &x) in agents.iter().enumerate() {
                for &y in &agents[k + 1..] {
                    let c = coalition_check(&pol, &m, &[x, y])?;
                    coalitions_ok &= c.holds();
                    lines.push(format!(
                        "coalition {}+{}: value {} bound {}",
                        names[x],
                        names[y],
                        cx.num(&c.value),
                        cx.num(&c.bound)
                    ));
                }
            }
            data.insert("guarantees".into(), json!(cx.nums(&cert.guarantees)));
            data.insert("adversarial".into(), json!(cx.nums(&cert.adversarial)));
            data.insert("efficient_total".into(), json!(cx.num(&cert.efficient_total)));
            let holds = cert.is_valid() && coalitions_ok;
            if m == MechanismKind::BalancedTeam {
                lines.push(format!("informational: no guarantee is claimed for {m} (it {})", if holds { "holds" } else { "fails" }));
                data.insert("informational".into(), json!(true));
                true
            } else {
                holds
            }
        }
        Check::LemmaParity | Check::LemmaGeneral => {
            let pair = lemma_pair(&l, &a.coefficient)?;
            let check = |p: &[Strategy]| -> dynmech::Result<LemmaCheck> {
                match a.check {
                    Check::LemmaParity => lemma_parity_check(&pol, p, &pair),
                    _ => lemma_general_check(&pol, p, &pair),
                }
            };
            let single = a.profile.is_some();
            let profiles = match &a.profile {
                Some(s) => vec![profile(&l, Some(s))?],
                None => registered_profiles(&l),
            };
            let (mut ok, mut checked) = (true, 0);
            let mut rows = Vec::new();
            for (p, name) in &profiles {
                match check(p) {
                    Ok(c) => {
                        checked += 1;
                        ok &= c.holds();
                        lines.push(format!(
                            "{name}: enumerated {} closed form {}{}",
                            cx.tuple(&c.gamma),
                            cx.tuple(&c.closed_form),
                            if c.holds() { "" } else { "  MISMATCH" }
                        ));
                        rows.push(json!({"profile": name, "enumerated": cx.nums(&c.gamma), "closed_form": cx.nums(&c.closed_form)}));
                    }
                    Err(e @ Error::HypothesisViolated { .. }) => {
                        if single {
                            return Err(e.into());
                        }
                        lines.push(format!("{name}: skipped, {e}"));
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            lines.push(format!("{checked} profiles checked"));
            data.insert("profiles".into(), json!(rows));
            ok
        }
        Check::Nash => {
            let (p, pname) = profile(&l, a.profile.as_deref())?;
            let v = nash_check(&pol, m.as_ref(), &p, &l.sets)?;
            lines.push(format!("{pname}: payoffs {}", cx.tuple(&v.values)));
            lines.push(format!("checked {}", v.scope));
            for w in &v.witnesses {
                lines.push(format!("{} gains {} by {}", names[w.agent], cx.num(&w.gain), w.deviation));
            }
            data.insert("values".into(), json!(cx.nums(&v.values)));
            data.insert(
                "witnesses".into(),
                json!(v.witnesses.iter().map(|w| json!({"agent": names[w.agent], "deviation": w.deviation, "gain": cx.num(&w.gain)})).collect::<Vec<_>>()),
            );
            v.is_nash()
        }
    };
    let verdict = if pass { "PASS" } else { "FAIL" };
    let out = match cx.format {
        Format::Json => {
            data.insert("check".into(), json!(Check::value_name(a.check)));
            data.insert("pass".into(), json!(pass));
            cx.json(Value::Object(data))
        }
        _ => format!("{}\n{verdict}\n", lines.join("\n")),
    };
    Ok(Report { out, pass })
}

impl Check {
    fn value_name(c: Check) -> String {
        c.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
    }
}

fn cmd_ledger(cx: &Ctx, a: &LedgerArgs) -> Run<Report> {
    let l = a.source.load()?;
    let pol = compute_efficient_policy(&l.game);
    let g = &l.game;
    let m = needs_mechanism(mechanism(g, &a.mech)?, "ledger")?;
    let (p, _) = profile(&l, a.profile.as_deref())?;
    let mut paths = collect_paths(&pol, &p, None)?;
    paths.sort_by(|x, y| y.probability.cmp(&x.probability));
    paths.truncate(a.top);
    let reports = |r: &[Vec<dynmech::TypeId>]| {
        r[1..].iter().map(|p| p.iter().map(|&t| g.label(t).to_string()).collect::<Vec<_>>().join(" ")).collect::<Vec<_>>()
    };
    let mut out = String::new();
    let mut items = Vec::new();
    if cx.format == Format::Csv {
        out.push_str("path,probability,round,payer,payee,amount\n");
    }
    for (k, path) in paths.iter().enumerate() {
        let lg = ledger(&pol, &m, &path.reports)?;
        match cx.format {
            Format::Text => {
                let _ = writeln!(out, "path {} probability {}", k + 1, cx.num(&path.probability));
                for (t, r) in reports(&path.reports).iter().enumerate() {
                    let _ = writeln!(out, "  reports {}: {r}", t + 1);
                }
                out.push_str(&lg.to_text_with(&|r| cx.num(r)));
                out.push('\n');
            }
            Format::Csv => {
                for line in lg.to_csv_with(&|r| cx.num(r)).lines().skip(1) {
                    let _ = writeln!(out, "{},{},{line}", k + 1, cx.num(&path.probability));
                }
            }
            Format::Json => items.push(json!({
                "probability": cx.num(&path.probability),
                "reports": reports(&path.reports),
                "payments": lg.rounds.iter().flat_map(|r| r.payments.iter().map(move |p| (r.round, p))).map(|(t, p)| json!({
                    "round": t,
                    "payer": p.payer.map_or("outside", |j| lg.agents[j].as_str()),
                    "payee": lg.agents[p.payee],
                    "amount": cx.num(&p.amount),
                })).collect::<Vec<_>>(),
                "totals": cx.nums(&lg.totals()),
                "subsidy": cx.num(&lg.subsidy()),
            })),
        }
    }
    if cx.format == Format::Json {
        out = cx.json(json!({"mechanism": m.to_string(), "paths": items}));
    }
    Ok(Report::ok(out))
}

fn cmd_payoff(cx: &Ctx, a: &PayoffArgs) -> Run<Report> {
    let l = a.source.load()?;
    let pol = compute_efficient_policy(&l.game);
    let g = &l.game;
    let m = mechanism(g, &a.mech)?;
    let (p, pname) = profile(&l, a.profile.as_deref())?;
    let e = expectation(&pol, m.as_ref(), &p)?;
    let names: Vec<&str> = (0..g.n_agents()).map(|i| g.agent_name(i)).collect();
    let mc = match a.samples {
        Some(n) => Some(monte_carlo(&pol, m.as_ref(), &p, n, a.mech.seed.expect("clap enforces --seed"))?),
        None => None,
    };
    let agrees = mc.as_ref().is_none_or(|x| x.agrees(&e.payoff(), 5.0));
    let out = match cx.format {
        Format::Json => cx.json(json!({
            "profile": pname,
            "agents": names,
            "payoff": cx.nums(&e.payoff()),
            "utility": cx.nums(&e.utility),
            "transfers": cx.nums(&e.transfers),
            "subsidy": cx.num(&e.subsidy),
            "paths": e.paths,
            "monte_carlo": mc.as_ref().map(|x| json!({"samples": x.samples, "mean": x.mean, "std_err": x.std_err, "agrees": agrees})),
        })),
        Format::Csv => {
            let mut s = String::from("agent,payoff,utility,transfers\n");
            for (i, n) in names.iter().enumerate() {
                let _ = writeln!(s, "{n},{},{},{}", cx.num(&e.payoff()[i]), cx.num(&e.utility[i]), cx.num(&e.transfers[i]));
            }
            s
        }
        Format::Text => {
            let mut s = format!("{pname} over {} paths\n", e.paths);
            for (i, n) in names.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{n}: payoff {} (utility {}, transfers {})",
                    cx.num(&e.payoff()[i]),
                    cx.num(&e.utility[i]),
                    cx.num(&e.transfers[i])
                );
            }
            if e.subsidy != rat::zero() {
                let _ = writeln!(s, "subsidy {}", cx.num(&e.subsidy));
            }
            if let Some(x) = &mc {
                let _ = writeln!(s, "monte carlo, {} samples:", x.samples);
                for (i, n) in names.iter().enumerate() {
                    let _ = writeln!(s, "  {n}: {:.4} +- {:.4}", x.mean[i], x.std_err[i]);
                }
                let _ = writeln!(s, "{}", if agrees { "agrees within 5 standard errors" } else { "DISAGREES" });
            }
            s
        }
    };
    Ok(Report { out, pass: agrees })
}

fn run(cli: &Cli) -> Run<Report> {
    let cx = Ctx { format: cli.format, decimal: cli.decimal };
    match &cli.cmd {
        Cmd::Scenario { action: ScenarioCmd::List } => cmd_scenario_list(&cx),
        Cmd::Scenario { action: ScenarioCmd::Show(s) } => cmd_scenario_show(&cx, s),
        Cmd::Policy { action: PolicyCmd::Dump(s) } => cmd_policy_dump(&cx, s),
        Cmd::Table(a) => cmd_table(&cx, a),
        Cmd::Eliminate(a) => cmd_eliminate(&cx, a),
        Cmd::Verify(a) => cmd_verify(&cx, a),
        Cmd::Ledger(a) => cmd_ledger(&cx, a),
        Cmd::Payoff(a) => cmd_payoff(&cx, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(r) => {
            print!("{}", r.out);
            ExitCode::from(if r.pass { 0 } else { 1 })
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

