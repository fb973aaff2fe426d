use dynmech::error::Error;
use dynmech::game::{validate, Game, TypeId};
use dynmech::paths::collect_paths;
use dynmech::policy::product;
use dynmech::rat::{self, ratio, Rat};
use dynmech::scenarios::example1::{self, BLUE, RED};
use dynmech::scenarios::{appendix_a, appendix_b, builtins, Example1};
use dynmech::strategy::{report, truthful, CmpOp, Cond, Observation, Operand, Ref, RoundRef, Rule, Strategy};
use dynmech::compute_efficient_policy;

fn label(g: &Game, a: usize, t: usize, l: &str) -> TypeId {
    g.type_by_label(a, t, l).unwrap_or_else(|| panic!("no type {l}"))
}

/// Observation of `agent` reporting in round `reports.len()`.
fn obs<'a>(agent: usize, own: &'a [TypeId], reports: &'a [Vec<TypeId>], decisions: &'a [usize], types: &'a [Vec<TypeId>]) -> Observation<'a> {
    Observation { agent, round: reports.len(), own_types: own, reports, decisions, types, recommendation: None }
}

fn only(dist: Vec<(TypeId, Rat)>) -> TypeId {
    assert_eq!(dist.len(), 1, "{dist:?}");
    assert_eq!(dist[0].1, rat::one());
    dist[0].0
}

#[test]
fn truthful_reports_the_type_whatever_others_say() {
    let g = validate(Example1::new(3, 3).build()).unwrap();
    let s = truthful(&g, BLUE);
    let layers: Vec<&[TypeId]> = (0..3).map(|a| g.types_at(a, 1)).collect();
    for own in g.types_at(BLUE, 2) {
        let own_types = [g.initial_profile()[BLUE], g.types_at(BLUE, 1)[0], *own];
        for r1 in product(&layers) {
            let reports = [g.initial_profile(), r1];
            let o = obs(BLUE, &own_types, &reports, &[0], &[]);
            assert_eq!(only(report(&g, &s, &o).unwrap()), *own);
        }
    }
}

#[test]
fn low_then_buy_script() {
    let e = Example1::new(2, 3);
    let g = validate(e.build()).unwrap();
    let s = &example1::table_strategies(&e, BLUE)[2];
    assert_eq!(s.name, "low-then-buy");
    let ann = |a, t, p: Rat| g.type_by_annotation(a, t, &p).unwrap();
    let init = g.initial_profile();
    // round 1: report the floor whatever the type
    for own in g.types_at(BLUE, 1) {
        let own_types = [init[BLUE], *own];
        let o = obs(BLUE, &own_types, std::slice::from_ref(&init), &[], &[]);
        assert_eq!(only(report(&g, s, &o).unwrap()), ann(BLUE, 1, rat::zero()));
    }
    // round 2: report 1 after a low red report, truth otherwise
    for red in [rat::zero(), ratio(1, 2)] {
        for own in g.types_at(BLUE, 2) {
            let r1 = vec![ann(BLUE, 1, rat::zero()), ann(RED, 1, red.clone()), g.types_at(2, 1)[0]];
            let reports = [init.clone(), r1];
            let own_types = [init[BLUE], g.types_at(BLUE, 1)[0], *own];
            let got = only(report(&g, s, &obs(BLUE, &own_types, &reports, &[0], &[])).unwrap());
            let want = if red == rat::zero() { ann(BLUE, 2, rat::one()) } else { *own };
            assert_eq!(got, want);
        }
    }
}

#[test]
fn prefer_high_lies_only_after_blue_70() {
    let g = validate(appendix_a::build(3)).unwrap();
    let (_, red) = appendix_a::reduced_sets();
    let s = red.get("prefer-high").unwrap();
    let init = g.initial_profile();
    let r1 = label(&g, RED, 1, "r1:50%");
    for blue in ["b1:30%", "b1:70%"] {
        for own in ["r2:20%", "r2:80%"] {
            let reports = [init.clone(), vec![label(&g, BLUE, 1, blue), r1, g.types_at(2, 1)[0]]];
            let own_types = [init[RED], r1, label(&g, RED, 2, own)];
            let got = g.label(only(report(&g, s, &obs(RED, &own_types, &reports, &[0], &[])).unwrap())).to_string();
            let want = if blue == "b1:70%" && own == "r2:20%" { "r2:20%" } else { "r2:80%" };
            assert_eq!(got, want, "{blue} {own}");
        }
    }
}

#[test]
fn alternating_reports() {
    let e = Example1::new(4, 3);
    let g = validate(e.build()).unwrap();
    let s = example1::alternating(&e);
    for t in 1..=4 {
        let want = if t % 2 == 1 { rat::one() } else { rat::zero() };
        assert_eq!(*s.rule(t), Rule::Ann(want.clone()));
        assert!(g.type_by_annotation(BLUE, t, &want).is_some());
    }
}

#[test]
fn reduced_sets_tell_the_truth_when_punished() {
    let (blue, red) = appendix_a::reduced_sets();
    assert_eq!(blue.names(), ["truthful", "opposite", "always-70", "always-30"]);
    assert_eq!(red.names(), ["truthful", "oppose-blue", "prefer-high", "prefer-low"]);
    for s in &blue.strategies {
        assert_eq!(*s.rule(2), Rule::Truth, "{}", s.name);
        assert_eq!(*s.rule(4), Rule::Truth);
    }
    for s in &red.strategies {
        assert_eq!(*s.rule(3), Rule::Truth, "{}", s.name);
        assert_eq!(*s.rule(4), Rule::Truth);
    }
}

#[test]
fn registered_strategies_are_total() {
    for id in builtins() {
        let g = id.game().unwrap();
        let pol = compute_efficient_policy(&g);
        let sets = id.strategy_sets(&g);
        let layers: Vec<Vec<Strategy>> = (0..g.n_agents())
            .map(|a| sets.iter().find(|s| s.agent == a).map_or_else(|| vec![truthful(&g, a)], |s| s.strategies.clone()))
            .collect();
        let refs: Vec<&[Strategy]> = layers.iter().map(|v| v.as_slice()).collect();
        for profile in product(&refs) {
            let paths = collect_paths(&pol, &profile, None).unwrap_or_else(|e| panic!("{id}: {e}"));
            let total: Rat = paths.iter().map(|p| &p.probability).sum();
            assert_eq!(total, rat::one(), "{id}");
        }
    }
}

#[test]
fn mixed_reports_carry_their_weights() {
    let p0 = ratio(1, 2);
    let g = validate(appendix_b::build(p0.clone(), p0.clone(), 3)).unwrap();
    let cands = appendix_b::candidates(&p0);
    let init = g.initial_profile();
    let reports = [init.clone()];
    let high = g.type_by_annotation(BLUE, 1, &rat::one()).unwrap();
    let low = g.type_by_annotation(BLUE, 1, &rat::zero()).unwrap();
    let dist = |name: &str, own| {
        let s = cands.iter().find(|s| s.name == name).unwrap();
        let mut d = report(&g, s, &obs(BLUE, &[init[BLUE], own], &reports, &[], &[])).unwrap();
        d.sort();
        d
    };
    let mut want = vec![(high, ratio(100, 104)), (low, ratio(4, 104))];
    want.sort();
    assert_eq!(dist("high-mixes", high), want);
    assert_eq!(dist("high-mixes", low), vec![(low, rat::one())]);
    let mut want = vec![(high, ratio(16, 84)), (low, ratio(68, 84))];
    want.sort();
    assert_eq!(dist("low-mixes", low), want);
}

#[test]
fn low_mixes_needs_a_probability() {
    assert!(appendix_b::low_mix(&ratio(84, 100)).is_some());
    assert!(appendix_b::low_mix(&ratio(85, 100)).is_none());
    assert_eq!(appendix_b::candidates(&ratio(9, 10)).len(), 4);
}

#[test]
fn bad_weights_are_unreachable() {
    let g = validate(Example1::new(1, 3).build()).unwrap();
    let s = Strategy::new("bad", Rule::Mix(vec![(ratio(1, 2), Rule::Truth), (ratio(1, 3), Rule::Flip)]));
    let init = g.initial_profile();
    let own = [init[BLUE], g.types_at(BLUE, 1)[0]];
    let reports = [init.clone()];
    let err = report(&g, &s, &obs(BLUE, &own, &reports, &[], &[])).unwrap_err();
    assert!(matches!(err, Error::UnreachableObservation { .. }), "{err}");
}

#[test]
fn references_must_be_observable() {
    let g = validate(Example1::new(2, 3).build()).unwrap();
    let peek = |r| {
        let c = Cond::Cmp(Operand::Ann(r), CmpOp::Eq, Operand::Const(rat::one()));
        Strategy::new("peek", Rule::If(c, Box::new(Rule::Truth), Box::new(Rule::Flip)))
    };
    // same-round reports are simultaneous
    let same = peek(Ref::Report { agent: RED, round: RoundRef::Cur });
    assert!(matches!(same.check(&g, BLUE), Err(Error::UnboundScriptReference(_))));
    // no reveal channel in Example 1
    let reveal = peek(Ref::Revealed { agent: RED, round: RoundRef::Prev(1) });
    assert!(matches!(reveal.check(&g, BLUE), Err(Error::UnboundScriptReference(_))));
    let future = peek(Ref::OwnType { round: RoundRef::Abs(3) });
    assert!(matches!(future.check(&g, BLUE), Err(Error::UnboundScriptReference(_))));
    let fine = peek(Ref::Report { agent: RED, round: RoundRef::Prev(1) });
    fine.check(&g, BLUE).unwrap();
    // a reveal channel makes the past type readable
    let mut spec = appendix_a::build(3);
    spec.reveal.push((BLUE, RED));
    let g = validate(spec).unwrap();
    peek(Ref::Revealed { agent: BLUE, round: RoundRef::Prev(1) }).check(&g, RED).unwrap();
    assert!(peek(Ref::Revealed { agent: BLUE, round: RoundRef::Cur }).check(&g, RED).is_err());
}
