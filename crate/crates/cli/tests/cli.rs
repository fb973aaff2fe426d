use std::process::{Command, Output};

fn dynmech(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynmech")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[track_caller]
fn ok(args: &[&str]) -> String {
    let o = dynmech(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}\n{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

#[test]
fn lists_every_builtin() {
    let out = ok(&["scenario", "list"]);
    for name in ["example1", "appendixA", "appendixB", "yesno", "collusion"] {
        assert!(out.contains(name), "{out}");
    }
    assert_eq!(out.lines().count(), 8);
}

#[test]
fn appendix_a_table_normalized() {
    let out = ok(&["table", "--scenario", "appendixA", "--mechanism", "balanced", "--normalize", "1/3"]);
    assert!(out.starts_with("values scaled by 1/3"), "{out}");
    let truthful = out.lines().find(|l| l.starts_with("truthful ")).unwrap();
    assert!(truthful.contains("(26/3, 26/3)"), "{truthful}");
}

#[test]
fn example1_corner() {
    let out = ok(&["table", "--scenario", "example1", "--K", "2", "--n", "3", "--mechanism", "balanced"]);
    let last = out.lines().find(|l| l.starts_with("low-then-buy")).unwrap();
    assert!(last.trim_end().ends_with("(11/4, 11/4)"), "{last}");
}

#[test]
fn csv_table_with_decimals() {
    let out = ok(&[
        "table", "--scenario", "example1", "--mechanism", "balanced", "--format", "csv", "--decimal", "2",
    ]);
    assert_eq!(out.lines().next(), Some("blue,red,blue.payoff,red.payoff"));
    assert!(out.contains("low-then-buy,low-then-buy,2.75,2.75"), "{out}");
}

#[test]
fn csv_table_reads_back() {
    let out = ok(&["table", "--scenario", "appendixA", "--mechanism", "balanced", "--format", "csv"]);
    let nf = dynmech::analysis::normal_form::NormalForm::from_csv(&out).unwrap();
    assert_eq!(nf.shape(), vec![4, 4]);
}

#[test]
fn guarantee_under_sequential() {
    let out = ok(&["verify", "guarantee", "--scenario", "appendixA", "--mechanism", "sequential"]);
    assert!(out.contains("sum of guarantees 1 efficient total 1"), "{out}");
    assert!(out.trim_end().ends_with("PASS"));
}

#[test]
fn unbalanced_collusion_warns_but_passes() {
    let out = ok(&["verify", "balance", "--scenario", "collusion", "--mechanism", "unbalanced"]);
    assert!(out.contains("warning"), "{out}");
    assert!(out.contains("expected subsidy 5997/2"), "{out}");
}

#[test]
fn lemma_parity_on_one_cell() {
    let out = ok(&["verify", "lemma-parity", "--scenario", "appendixA", "--profile", "row2xcol2"]);
    assert!(out.contains("enumerated (18, 12) closed form (18, 12)"), "{out}");
}

#[test]
fn martingale_and_nash_pass() {
    ok(&["verify", "martingale", "--scenario", "example1", "--mechanism", "sequential", "--order", "red,blue,green"]);
    ok(&["verify", "nash", "--scenario", "appendixA", "--mechanism", "balanced"]);
}

#[test]
fn profitable_deviation_exits_one() {
    // without transfers the truthful profile of example1 is not an equilibrium
    let o = dynmech(&["verify", "nash", "--scenario", "example1", "--mechanism", "none"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn usage_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &["table"],
        &["table", "--scenario", "appendixA", "--file", "x.scn"],
        &["verify", "martingale", "--scenario", "example1", "--mechanism", "balanced"],
        &["payoff", "--scenario", "appendixA", "--samples", "10"],
        &["table", "--scenario", "example1", "--K", "9"],
        &["table", "--scenario", "appendixA", "--profile", "x"],
        &["verify", "nash", "--scenario", "appendixA", "--profile", "row9xcol1"],
        &["ledger", "--scenario", "appendixA", "--mechanism", "sequential", "--order", "blue,nobody,green"],
        &["table", "--file", "/nonexistent.scn"],
    ];
    for args in cases {
        assert_eq!(dynmech(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn exported_scenario_loads_back() {
    let text = ok(&["scenario", "show", "--scenario", "yesno", "--k", "1"]);
    let path = std::env::temp_dir().join(format!("dynmech-cli-{}.scn", std::process::id()));
    std::fs::write(&path, text).unwrap();
    let out = ok(&["payoff", "--file", path.to_str().unwrap(), "--mechanism", "none", "--format", "csv"]);
    std::fs::remove_file(&path).ok();
    assert!(out.starts_with("agent,payoff,utility,transfers\n"), "{out}");
}

#[test]
fn json_is_valid() {
    for args in [
        &["payoff", "--scenario", "appendixA", "--format", "json"][..],
        &["verify", "guarantee", "--scenario", "appendixA", "--mechanism", "shapley", "--format", "json"],
        &["ledger", "--scenario", "example1", "--top", "2", "--format", "json"],
        &["eliminate", "--scenario", "yesno", "--format", "json"],
    ] {
        let v: serde_json::Value = serde_json::from_str(&ok(args)).unwrap();
        assert!(v.is_object(), "{args:?}");
    }
}

#[test]
fn monte_carlo_cross_check() {
    let out = ok(&["payoff", "--scenario", "appendixB", "--samples", "3000", "--seed", "11"]);
    assert!(out.contains("agrees within 5 standard errors"), "{out}");
}
