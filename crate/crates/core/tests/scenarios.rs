use dynmech::analysis::elimination::{dominates, Mode};
use dynmech::analysis::nash::nash_check;
use dynmech::analysis::normal_form::induced_normal_form;
use dynmech::analysis::payoff::{expected_payoffs, Measure};
use dynmech::error::Error;
use dynmech::format::{export_scenario, load_scenario, parse_scenario};
use dynmech::game::{check_martingale_annotations, validate, JointDecision, TypeId};
use dynmech::mechanism::MechanismKind;
use dynmech::policy::product;
use dynmech::rat::{self, ratio, Rat};
use dynmech::scenarios::example1::{BLUE, GREEN, RED};
use dynmech::scenarios::{appendix_a, builtins, collusion, yesno, Example1, Process, ScenarioId, Utilities};
use dynmech::strategy::{truthful_profile, CmpOp, Cond, Operand, PrivateRule, Rule, Strategy};
use dynmech::{compute_efficient_policy, Game};

#[test]
fn builtins_pass_the_annotation_check() {
    for id in builtins() {
        let g = id.game().unwrap();
        assert!(check_martingale_annotations(&g).is_empty(), "{id}");
    }
}

#[test]
fn price_coefficients() {
    assert_eq!(Utilities::Small.coefficient(), 2);
    assert_eq!(Utilities::Large.coefficient(), 100);
}

#[test]
fn parameter_ranges() {
    let bad = [
        ScenarioId::Example1(Example1::new(7, 3)),
        ScenarioId::Example1(Example1::new(2, 13)),
        ScenarioId::Example1(Example1::new(1, 3).process(Process::Staggered)),
        ScenarioId::Example1(Example1::new(2, 3).floor(rat::one())),
        ScenarioId::AppendixA { agents: 2 },
        ScenarioId::YesNo { agents: 5, rounds: 1, yes_cost: rat::zero() },
        ScenarioId::Collusion { rounds: 0 },
    ];
    for id in bad {
        assert!(matches!(id.game(), Err(Error::InvalidSpec(_))), "{id}");
    }
}

#[test]
fn two_agent_project_splits_the_cost() {
    let g = validate(Example1::new(2, 2).build()).unwrap();
    assert_eq!(g.n_agents(), 2);
    let yes = g.joint_decisions(2).iter().position(|d| g.decision_label(2, d) == "YES").unwrap();
    let d = &g.joint_decisions(2)[yes];
    for a in [BLUE, RED] {
        let high = g.type_by_annotation(a, 2, &rat::one()).unwrap();
        assert_eq!(g.utility(2, a, d, high, None), rat::int(4 - 3));
    }
}

fn yesno_cells(n: usize, k: usize) -> Vec<(Vec<&'static str>, Vec<Rat>)> {
    let id = ScenarioId::YesNo { agents: n, rounds: k, yes_cost: rat::zero() };
    let pol = compute_efficient_policy(&id.game().unwrap());
    let choices = ["always-yes", "always-no"];
    let layers: Vec<&[&str]> = vec![&choices; n];
    product(&layers)
        .into_iter()
        .map(|names| {
            let mut p = truthful_profile(pol.game());
            for (a, name) in names.iter().enumerate() {
                p[a] = if *name == "always-yes" { yesno::always("YES") } else { yesno::always("NO") };
            }
            (names, expected_payoffs(&pol, None, &p).unwrap()[..n].to_vec())
        })
        .collect()
}

#[test]
fn yes_no_payoffs() {
    let cells = yesno_cells(2, 1);
    let get = |a: &str, b: &str| cells.iter().find(|(n, _)| n == &[a, b]).unwrap().1.clone();
    assert_eq!(get("always-yes", "always-yes"), [rat::one(), rat::one()]);
    assert_eq!(get("always-no", "always-no"), [rat::zero(), rat::zero()]);
    assert_eq!(get("always-yes", "always-no"), [rat::zero(), rat::zero()]);
    // a YES counts for later rounds too
    let cells = yesno_cells(2, 3);
    let get = |a: &str, b: &str| cells.iter().find(|(n, _)| n == &[a, b]).unwrap().1.clone();
    assert_eq!(get("always-yes", "always-yes"), [rat::int(3), rat::int(3)]);
}

#[test]
fn a_late_yes_pays_after_an_early_one() {
    let g = validate(yesno::build(2, 2, rat::zero())).unwrap();
    let pol = compute_efficient_policy(&g);
    let mut p = truthful_profile(&g);
    p[0] = yesno::always("YES");
    let second = Cond::Cmp(Operand::Round, CmpOp::Eq, Operand::Const(rat::int(2)));
    let late = PrivateRule::If(second, Box::new(PrivateRule::Choose("YES".into())), Box::new(PrivateRule::Choose("NO".into())));
    p[1] = Strategy::new("late", Rule::Truth).with_private(late);
    // round 1: only a1 says YES, so 0; round 2: both say YES
    assert_eq!(expected_payoffs(&pol, None, &p).unwrap()[..2], [rat::one(), rat::one()]);
}

#[test]
fn all_no_is_an_equilibrium_of_one_round() {
    let id = ScenarioId::YesNo { agents: 3, rounds: 1, yes_cost: rat::zero() };
    let pol = compute_efficient_policy(&id.game().unwrap());
    let sets = id.strategy_sets(pol.game());
    let mut p = truthful_profile(pol.game());
    for a in 0..3 {
        p[a] = yesno::always("NO");
    }
    assert!(nash_check(&pol, None, &p, &sets).unwrap().is_nash());
}

#[test]
fn always_yes_weakly_dominates_always_no() {
    let id = ScenarioId::YesNo { agents: 2, rounds: 2, yes_cost: rat::zero() };
    let pol = compute_efficient_policy(&id.game().unwrap());
    let nf = induced_normal_form(&pol, None, &id.strategy_sets(pol.game()), Measure::Total).unwrap();
    let alive = vec![vec![0, 1], vec![0, 1]];
    for player in 0..2 {
        assert!(dominates(&nf, &alive, player, 0, 1, Mode::Weak));
        assert!(!dominates(&nf, &alive, player, 0, 1, Mode::Strict));
    }
    // with a cost, YES against NO loses
    let id = ScenarioId::YesNo { agents: 2, rounds: 2, yes_cost: ratio(1, 100) };
    let pol = compute_efficient_policy(&id.game().unwrap());
    let nf = induced_normal_form(&pol, None, &id.strategy_sets(pol.game()), Measure::Total).unwrap();
    assert!(!dominates(&nf, &alive, 0, 0, 1, Mode::Weak));
}

#[test]
fn collusion_signals() {
    let g = validate(collusion::build(1)).unwrap();
    let yes = JointDecision { public: 0, private: vec![0, 0] };
    let no = JointDecision { public: 1, private: vec![0, 0] };
    assert_eq!(g.decision_label(1, &yes), "YES");
    let hi = |a| g.type_by_label(a, 1, collusion::HIGH).unwrap();
    let lo = |a| g.type_by_label(a, 1, collusion::LOW).unwrap();
    assert_eq!(g.utility(1, 0, &yes, hi(0), None), rat::int(1000));
    assert_eq!(g.utility(1, 1, &yes, lo(1), None), rat::int(-1));
    assert_eq!(g.utility(1, 0, &no, hi(0), None), rat::zero());
    let pol = compute_efficient_policy(&g);
    assert_eq!(pol.decide(1, &[lo(0), lo(1)]), 1);
    assert_eq!(pol.decide(1, &[hi(0), lo(1)]), 0);
}

#[test]
fn appendix_a_round_trips_through_the_file_format() {
    let id = ScenarioId::AppendixA { agents: 3 };
    let spec = id.spec().unwrap();
    let sets = id.strategy_sets(&validate(spec.clone()).unwrap());
    let text = export_scenario(&spec, &sets);
    let (back, back_sets) = parse_scenario(&text).unwrap();
    assert_eq!(back, spec);
    assert_eq!(back_sets, sets);
    assert_eq!(export_scenario(&back, &back_sets), text);
}

#[test]
fn every_builtin_round_trips() {
    for id in builtins() {
        let spec = id.spec().unwrap();
        let sets = id.strategy_sets(&validate(spec.clone()).unwrap());
        let (back, back_sets) = parse_scenario(&export_scenario(&spec, &sets)).unwrap_or_else(|e| panic!("{id}: {e}"));
        assert_eq!(back, spec, "{id}");
        assert_eq!(back_sets, sets, "{id}");
    }
}

const COIN: &str = r#"
scenario "coin"
rounds 1
agent a
type a 0 "start"
type a 1 "heads" 1
type a 1 "tails" 0
initial a "start"
decision 1 "go" "stop"
kernel a 1 (*, *, *, *) -> {"heads": 1/2, "tails": 2/3}
utility 1 a ("heads", *, "go", *) = 1
"#;

#[test]
fn probabilities_must_sum_to_one() {
    match load_scenario(COIN) {
        Err(Error::NonUnitDistribution { total, .. }) => assert_eq!(total, "7/6"),
        other => panic!("{other:?}"),
    }
    assert!(load_scenario(&COIN.replace("2/3", "1/2")).is_ok());
}

#[test]
fn parse_errors_carry_positions() {
    let src = COIN.replace("rounds 1", "rounds one");
    match parse_scenario(&src) {
        Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (3, 8)),
        other => panic!("{other:?}"),
    }
    match parse_scenario(&COIN.replace("agent a", "agent a\nagent a")) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_scenario(&COIN.replace("kernel a 1", "kernel b 1")), Err(Error::Parse { .. })));
}

/// Example 1 with K = 2, n = 3, written by hand.
const EXAMPLE1: &str = r#"
scenario "hand-written"
rounds 2
agent blue
agent red
agent green
type blue 0 "50%" 50%
type blue 1 "0%" 0%
type blue 1 "50%" 50%
type blue 1 "100%" 100%
type blue 2 "low" 0
type blue 2 "high" 1
type red 0 "50%" 1/2
type red 1 "0%" 0
type red 1 "50%" 1/2
type red 1 "100%" 1
type red 2 "low" 0
type red 2 "high" 1
type green 0 "-"
type green 1 "-"
type green 2 "-"
initial blue "50%"
initial red "50%"
initial green "-"
decision 1 "-"
decision 2 "YES" "NO"
kernel blue 1 (*, *, *, *) -> {"50%": 1}
kernel blue 2 ("0%", *, *, *) -> {"low": 1}
kernel blue 2 ("50%", *, *, *) -> {"low": 1/2, "high": 1/2}
kernel blue 2 ("100%", *, *, *) -> {"high": 1}
kernel red 1 (*, *, *, *) -> {"50%": 1}
kernel red 2 ("0%", *, *, *) -> {"low": 1}
kernel red 2 ("50%", *, *, *) -> {"low": 1/2, "high": 1/2}
kernel red 2 ("100%", *, *, *) -> {"high": 1}
kernel green 1 (*, *, *, *) -> {"-": 1}
kernel green 2 (*, *, *, *) -> {"-": 1}
utility 2 blue ("low", *, "YES", *) = 1
utility 2 blue ("high", *, "YES", *) = 4
utility 2 red ("low", *, "YES", *) = 1
utility 2 red ("high", *, "YES", *) = 4
utility 2 green (*, *, "YES", *) = -6
# the double deviation
strategy blue "low-then-buy" {
  default: truth
  round 1: 0
  round 2: if ann(report(red, t-1)) == 0 then "high" else truth
}
strategy red "low-then-buy" {
  default: truth
  round 1: 0%
  round 2: if ann(report(blue, 1)) == 0 then 1 else truth
}
"#;

#[test]
fn hand_written_example_matches_the_builtin() {
    let (g, sets) = load_scenario(EXAMPLE1).unwrap();
    let mine = compute_efficient_policy(&g);
    let id = ScenarioId::Example1(Example1::new(2, 3));
    let builtin = compute_efficient_policy(&id.game().unwrap());
    let theirs = id.strategy_sets(builtin.game());
    for m in [None, Some(MechanismKind::BalancedTeam), Some(MechanismKind::ShapleyAveraged)] {
        let truth = expected_payoffs(&mine, m.as_ref(), &truthful_profile(&g)).unwrap();
        assert_eq!(truth, expected_payoffs(&builtin, m.as_ref(), &truthful_profile(builtin.game())).unwrap());
        let mut p = truthful_profile(&g);
        let mut q = truthful_profile(builtin.game());
        for (set, other) in sets.iter().zip(&theirs) {
            p[set.agent] = set.strategies[0].clone();
            q[other.agent] = other.get("low-then-buy").unwrap().clone();
        }
        assert_eq!(expected_payoffs(&mine, m.as_ref(), &p).unwrap(), expected_payoffs(&builtin, m.as_ref(), &q).unwrap());
    }
}

#[test]
fn lattice_project_is_appendix_a_without_punishments() {
    let lattice = validate(Example1::new(4, 3).process(Process::Lattice).large().build()).unwrap();
    let a = validate(appendix_a::build(3)).unwrap();
    for agent in [BLUE, RED, GREEN] {
        for t in 0..=4 {
            let labels = |g: &Game| g.types_at(agent, t).iter().map(|&x| (g.label(x).to_string(), g.annotation(x).cloned())).collect::<Vec<_>>();
            assert_eq!(labels(&lattice), labels(&a));
            if t == 0 {
                continue;
            }
            for &from in lattice.types_at(agent, t - 1) {
                let other = a.type_by_label(agent, t - 1, lattice.label(from)).unwrap();
                let d = (t > 1).then(|| &lattice.joint_decisions(t - 1)[0]);
                let da = (t > 1).then(|| &a.joint_decisions(t - 1)[0]);
                let names = |g: &Game, v: &[(TypeId, Rat)]| {
                    v.iter().map(|(x, w)| (g.label(*x).to_string(), w.clone())).collect::<Vec<_>>()
                };
                assert_eq!(
                    names(&lattice, lattice.successors(agent, t, from, None, d).unwrap()),
                    names(&a, a.successors(agent, t, other, None, da).unwrap())
                );
            }
        }
    }
    let (pl, pa) = (compute_efficient_policy(&lattice), compute_efficient_policy(&a));
    assert_eq!(pl.efficient_total(), pa.efficient_total());
    assert_eq!(pl.initial_value(), pa.initial_value());
}
