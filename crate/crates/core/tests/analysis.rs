mod common;

use dynmech::analysis::best_response::{best_response_value, solve, Info, Objective, Problem};
use dynmech::analysis::budget::budget_balance_check;
use dynmech::analysis::elimination::{eliminate, verify_trace, Mode, Order};
use dynmech::analysis::lemma::{lemma_general_check, lemma_parity_check, Pair};
use dynmech::analysis::martingale::{verify_martingale, verify_martingale_with_fault, Event, Fault};
use dynmech::analysis::nash::nash_check;
use dynmech::analysis::normal_form::{induced_normal_form, NormalForm};
use dynmech::analysis::payoff::{expectation, expected_payoffs, Measure};
use dynmech::error::Error;
use dynmech::game::{validate, GameSpec, Pattern};
use dynmech::mechanism::{ledger, MechanismKind};
use dynmech::paths::collect_paths;
use dynmech::policy::product;
use dynmech::rat::{self, ratio, Rat};
use dynmech::scenarios::example1::{BLUE, RED};
use dynmech::scenarios::{builtins, random, Example1, ScenarioId};
use dynmech::strategy::{truthful_profile, Rule, Strategy, StrategySet};
use dynmech::{compute_efficient_policy, DecisionPolicy};

fn policy_of(id: &ScenarioId) -> DecisionPolicy {
    compute_efficient_policy(&id.game().unwrap())
}

fn example1(k: usize, n: usize) -> ScenarioId {
    ScenarioId::Example1(Example1::new(k, n))
}

fn profiles(pol: &DecisionPolicy, sets: &[StrategySet]) -> Vec<Vec<Strategy>> {
    let g = pol.game();
    let layers: Vec<Vec<Strategy>> = (0..g.n_agents())
        .map(|a| sets.iter().find(|s| s.agent == a).map_or_else(|| truthful_profile(g)[a..=a].to_vec(), |s| s.strategies.clone()))
        .collect();
    let refs: Vec<&[Strategy]> = layers.iter().map(|v| v.as_slice()).collect();
    product(&refs)
}

#[test]
fn truthful_project_payoff_is_one() {
    for k in 1..=4 {
        for n in [3, 5] {
            let pol = policy_of(&example1(k, n));
            let e = expectation(&pol, Some(&MechanismKind::BalancedTeam), &truthful_profile(pol.game())).unwrap();
            assert_eq!(e.payoff()[BLUE], rat::one());
            assert_eq!(e.payoff()[RED], rat::one());
            assert_eq!(e.utility[2], ratio(-6, 4));
            assert_eq!(e.mass, rat::one());
            assert!(e.transfers.iter().all(|x| *x == rat::zero()));
        }
    }
}

#[test]
fn expectations_match_brute_force() {
    for id in [example1(2, 3), ScenarioId::YesNo { agents: 2, rounds: 2, yes_cost: rat::zero() }, ScenarioId::Collusion { rounds: 2 }] {
        let pol = policy_of(&id);
        let sets = id.strategy_sets(pol.game());
        for m in [None, Some(MechanismKind::BalancedTeam), Some(MechanismKind::ShapleyAveraged)] {
            for p in profiles(&pol, &sets) {
                assert_eq!(expected_payoffs(&pol, m.as_ref(), &p).unwrap(), common::brute_payoffs(&pol, &p, m.as_ref()), "{id}");
            }
        }
    }
}

#[test]
fn measures_add_up() {
    let id = example1(2, 3);
    let pol = policy_of(&id);
    let m = MechanismKind::BalancedTeam;
    let sets = id.strategy_sets(pol.game());
    let total = induced_normal_form(&pol, Some(&m), &sets, Measure::Total).unwrap();
    let util = induced_normal_form(&pol, Some(&m), &sets, Measure::Utility).unwrap();
    let tr = induced_normal_form(&pol, Some(&m), &sets, Measure::Transfers).unwrap();
    for idx in total.profiles() {
        for k in 0..2 {
            assert_eq!(total.cell(&idx)[k], &util.cell(&idx)[k] + &tr.cell(&idx)[k]);
        }
    }
    let truthful = total.cell_by_name(&["truthful", "truthful"]).unwrap();
    assert_eq!(truthful, [rat::one(), rat::one()]);
}

#[test]
fn normal_form_csv_round_trip() {
    let id = ScenarioId::AppendixA { agents: 3 };
    let pol = policy_of(&id);
    let nf = induced_normal_form(&pol, Some(&MechanismKind::BalancedTeam), &id.strategy_sets(pol.game()), Measure::Total).unwrap();
    let back = NormalForm::from_csv(&nf.to_csv()).unwrap();
    assert_eq!(back, nf);
    assert!(NormalForm::from_csv("row,row payoff\ns,abc\n").is_err());
    assert!(NormalForm::from_csv("row,col,row payoff,col payoff\ns,t,1,2\ns,t,1,2\n").is_err());
    assert!(NormalForm::from_csv("row,col,row payoff,col payoff\ns,t,1,2\nu,v,1,2\n").is_err());
}

#[test]
fn normal_form_rejects_bad_shapes() {
    let names = vec!["a".to_string(), "b".to_string()];
    let strategies = vec![vec!["s".to_string(), "t".to_string()], vec!["u".to_string()]];
    assert!(NormalForm::new(vec![0, 1], names.clone(), strategies.clone(), vec![vec![rat::zero(); 2]]).is_err());
    let nf = NormalForm::new(vec![0, 1], names, strategies, vec![vec![rat::one(), rat::zero()], vec![rat::zero(), rat::one()]]).unwrap();
    assert_eq!(nf.cell(&[1, 0]), [rat::zero(), rat::one()]);
}

/// Prisoner's dilemma: defection strictly dominates.
fn dilemma() -> NormalForm {
    let v = |a: i64, b: i64| vec![rat::int(a), rat::int(b)];
    NormalForm::new(
        vec![0, 1],
        vec!["row".into(), "col".into()],
        vec![vec!["cooperate".into(), "defect".into()]; 2],
        vec![v(3, 3), v(0, 5), v(5, 0), v(1, 1)],
    )
    .unwrap()
}

#[test]
fn elimination_on_a_known_table() {
    for order in [Order::ExhaustiveSimultaneous, Order::LexicographicIterative] {
        let (rest, trace) = eliminate(&dilemma(), Mode::Strict, order);
        assert_eq!(rest.strategies, vec![vec!["defect".to_string()]; 2]);
        assert_eq!(trace.steps.len(), 2);
        assert!(trace.steps.iter().all(|s| s.dominator == "defect"));
        verify_trace(&dilemma(), &trace).unwrap();
    }
    // a forged step is caught
    let (_, mut trace) = eliminate(&dilemma(), Mode::Strict, Order::LexicographicIterative);
    trace.steps[0].strategy = "defect".into();
    trace.steps[0].dominator = "cooperate".into();
    assert!(verify_trace(&dilemma(), &trace).is_err());
}

#[test]
fn appendix_a_table_survives_strict_elimination() {
    let id = ScenarioId::AppendixA { agents: 3 };
    let pol = policy_of(&id);
    let nf = induced_normal_form(&pol, Some(&MechanismKind::BalancedTeam), &id.strategy_sets(pol.game()), Measure::Total).unwrap();
    let (rest, trace) = eliminate(&nf, Mode::Strict, Order::ExhaustiveSimultaneous);
    assert!(trace.steps.is_empty());
    assert_eq!(rest, nf);
}

#[test]
fn yes_beats_no_without_cost() {
    let id = ScenarioId::YesNo { agents: 2, rounds: 2, yes_cost: rat::zero() };
    let pol = policy_of(&id);
    let nf = induced_normal_form(&pol, None, &id.strategy_sets(pol.game()), Measure::Total).unwrap();
    let (rest, trace) = eliminate(&nf, Mode::Weak, Order::LexicographicIterative);
    verify_trace(&nf, &trace).unwrap();
    assert!(trace.steps.iter().all(|s| s.strategy == "always-no"));
    assert!(rest.strategies.iter().all(|s| s == &["always-yes".to_string()]));
}

#[test]
fn nash_in_the_one_round_yes_no_game() {
    let id = ScenarioId::YesNo { agents: 2, rounds: 1, yes_cost: rat::zero() };
    let pol = policy_of(&id);
    let sets = id.strategy_sets(pol.game());
    for names in [["always-no", "always-no"], ["always-yes", "always-yes"]] {
        let mut p = truthful_profile(pol.game());
        for (set, name) in sets.iter().zip(names) {
            p[set.agent] = set.get(name).unwrap().clone();
        }
        let v = nash_check(&pol, None, &p, &sets).unwrap();
        assert!(v.is_nash(), "{names:?}: {:?}", v.witnesses);
    }
}

#[test]
fn truthful_is_nash_under_balanced_team() {
    let id = example1(2, 3);
    let pol = policy_of(&id);
    let sets = id.strategy_sets(pol.game());
    let v = nash_check(&pol, Some(&MechanismKind::BalancedTeam), &truthful_profile(pol.game()), &sets).unwrap();
    assert!(v.is_nash(), "{:?}", v.witnesses);
    assert_eq!(v.best_responses[BLUE], Some(rat::one()));
    assert_eq!(v.best_responses[RED], Some(rat::one()));
}

#[test]
fn deviations_are_witnessed() {
    // without transfers the buy-after-low lie pays
    let id = example1(2, 3);
    let pol = policy_of(&id);
    let sets = id.strategy_sets(pol.game());
    let v = nash_check(&pol, None, &truthful_profile(pol.game()), &sets).unwrap();
    assert!(!v.is_nash());
    assert!(v.witnesses.iter().all(|w| w.gain > rat::zero() && w.value == &v.values[w.agent] + &w.gain));
}

fn zero_game() -> DecisionPolicy {
    let mut s = GameSpec::new("zero", 2);
    s.add_agent("a", false);
    s.add_agent("b", false);
    for a in 0..2 {
        s.add_type(a, 0, "s", None);
        s.set_initial(a, "s");
        for t in 1..=2 {
            s.add_type(a, t, "x", None);
            s.add_type(a, t, "y", None);
            s.add_kernel(a, t, Pattern::any(), vec![("x", ratio(1, 3)), ("y", ratio(2, 3))]);
        }
    }
    for t in 1..=2 {
        s.set_public_decisions(t, &["p", "q"]);
    }
    compute_efficient_policy(&validate(s).unwrap())
}

#[test]
fn zero_game_is_worth_nothing() {
    let pol = zero_game();
    let p = truthful_profile(pol.game());
    for m in [MechanismKind::BalancedTeam, MechanismKind::sequential(pol.game()), MechanismKind::ShapleyAveraged, MechanismKind::UnbalancedTeam] {
        for obj in [Objective::Max, Objective::Min] {
            assert_eq!(best_response_value(&pol, Some(&m), 0, &p, obj).unwrap(), rat::zero());
        }
        assert_eq!(expected_payoffs(&pol, Some(&m), &p).unwrap(), vec![rat::zero(); 2]);
    }
}

#[test]
fn best_response_is_at_least_every_registered_strategy() {
    let id = example1(2, 3);
    let pol = policy_of(&id);
    let g = pol.game();
    for m in [None, Some(MechanismKind::BalancedTeam), Some(MechanismKind::UnbalancedTeam)] {
        for p in profiles(&pol, &id.strategy_sets(g)) {
            let br = best_response_value(&pol, m.as_ref(), BLUE, &p, Objective::Max).unwrap();
            let here = expected_payoffs(&pol, m.as_ref(), &p).unwrap();
            assert!(br >= here[BLUE]);
        }
    }
}

#[test]
fn full_information_can_only_help() {
    for seed in 0..15 {
        let g = validate(random::game(seed, random::Limits::default())).unwrap();
        let pol = compute_efficient_policy(&g);
        let p = truthful_profile(&g);
        let a = g.reporting_agents()[0];
        let mut w = vec![rat::zero(); g.n_agents()];
        w[a] = rat::one();
        let value = |info| {
            solve(&Problem { policy: &pol, mechanism: None, controlled: vec![a], profile: &p, weights: w.clone(), objective: Objective::Max, info }).unwrap()
        };
        let (pooled, full) = (value(Info::Pooled), value(Info::Full));
        assert!(full >= pooled, "seed {seed}");
        // truthful play is feasible for the controller
        assert!(pooled >= expected_payoffs(&pol, None, &p).unwrap()[a]);
    }
}

#[test]
fn lone_agent_gets_the_whole_value() {
    for seed in 0..40 {
        let mut limits = random::Limits::default();
        limits.agents = 1;
        limits.public = false;
        let g = validate(random::game(seed, limits)).unwrap();
        let pol = compute_efficient_policy(&g);
        let p = truthful_profile(&g);
        for m in [MechanismKind::BalancedTeam, MechanismKind::sequential(&g)] {
            assert_eq!(best_response_value(&pol, Some(&m), 0, &p, Objective::Min).unwrap(), pol.efficient_total());
            assert_eq!(best_response_value(&pol, Some(&m), 0, &p, Objective::Max).unwrap(), pol.efficient_total());
        }
    }
}

#[test]
fn sequential_values_are_martingales() {
    for id in builtins() {
        let pol = policy_of(&id);
        let g = pol.game();
        let m = MechanismKind::sequential(g);
        for a in g.reporting_agents() {
            let r = verify_martingale(&pol, &m, a, &truthful_profile(g)).unwrap();
            assert!(r.is_martingale(), "{id} agent {a}: {:?}", r.nonzero.first());
            assert!(r.nodes > 0);
        }
    }
}

#[test]
fn a_fault_shows_up_before_it_happens() {
    let pol = policy_of(&example1(3, 3));
    let g = pol.game();
    let m = MechanismKind::sequential(g);
    let fault = Fault { round: 2, at: RED, amount: rat::int(7) };
    let r = verify_martingale_with_fault(&pol, &m, BLUE, &truthful_profile(g), Some(fault)).unwrap();
    assert!(!r.is_martingale());
    // the node just before Red's round-2 report sees the jump
    assert!(r.nonzero.iter().any(|x| x.round == 2 && x.event == Event::Report(RED)));
    assert!(r.nonzero.iter().all(|x| x.round <= 2));
    assert!(verify_martingale(&pol, &MechanismKind::BalancedTeam, BLUE, &truthful_profile(g)).is_err());
}

#[test]
fn lemma_identities_hold_on_registered_profiles() {
    for id in [example1(2, 3), example1(3, 3), ScenarioId::Example1(Example1::new(3, 3).large()), ScenarioId::AppendixA { agents: 3 }] {
        let pol = policy_of(&id);
        let g = pol.game();
        let c = match &id {
            ScenarioId::Example1(e) => e.utilities.coefficient(),
            _ => 100,
        };
        let pair = Pair { blue: BLUE, red: RED, coefficient: rat::int(c) };
        for p in profiles(&pol, &id.strategy_sets(g)) {
            let general = lemma_general_check(&pol, &p, &pair).unwrap();
            assert!(general.holds(), "{id}: {general:?}");
            match lemma_parity_check(&pol, &p, &pair) {
                Ok(parity) => {
                    assert!(parity.holds(), "{id}: {parity:?}");
                    assert_eq!(parity.gamma, general.gamma);
                }
                Err(e) => assert!(matches!(e, Error::HypothesisViolated { .. }), "{e}"),
            }
        }
        let t = lemma_general_check(&pol, &truthful_profile(g), &pair).unwrap();
        assert_eq!(t.gamma, [rat::zero(), rat::zero()]);
    }
}

#[test]
fn parity_lies_pay_the_closed_form() {
    let pol = policy_of(&example1(4, 3));
    let g = pol.game();
    let pair = Pair { blue: BLUE, red: RED, coefficient: rat::int(2) };
    let mut p = truthful_profile(g);
    p[BLUE] = Strategy::new("odd", Rule::Truth).at(1, Rule::Ann(rat::one())).at(3, Rule::Ann(rat::zero()));
    p[RED] = Strategy::new("even", Rule::Truth).at(2, Rule::Ann(rat::one()));
    let parity = lemma_parity_check(&pol, &p, &pair).unwrap();
    assert!(parity.holds(), "{parity:?}");
    // Blue gains from Red's round-2 lie of +1/2 followed by its own round-3 lie of -1/2
    assert_eq!(parity.gamma[BLUE], ratio(1, 2));
    // Red pays for Blue's round-1 lie of +1/2 times its own +1/2
    assert_eq!(parity.gamma[RED], ratio(-1, 2));
    assert_eq!(lemma_general_check(&pol, &p, &pair).unwrap().gamma, parity.gamma);
}

#[test]
fn budget_verdicts() {
    let id = ScenarioId::Collusion { rounds: 2 };
    let pol = policy_of(&id);
    let g = pol.game();
    for path in collect_paths(&pol, &truthful_profile(g), None).unwrap() {
        let b = budget_balance_check(&ledger(&pol, &MechanismKind::BalancedTeam, &path.reports).unwrap());
        assert!(b.is_balanced());
        assert_eq!(b.subsidy, rat::zero());
        let u = budget_balance_check(&ledger(&pol, &MechanismKind::UnbalancedTeam, &path.reports).unwrap());
        assert_eq!(u.total, u.subsidy);
        // only a YES is worth anything to the other agent
        assert_eq!(u.is_balanced(), path.utility.iter().all(|x| *x == rat::zero()));
    }
    let e = expectation(&pol, Some(&MechanismKind::UnbalancedTeam), &truthful_profile(g)).unwrap();
    assert_eq!(e.subsidy, e.transfers.iter().sum::<Rat>());
}
