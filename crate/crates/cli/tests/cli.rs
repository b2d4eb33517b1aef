use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;

use orthinv::{FieldSpec, QuadForm};
use orthinv_cli::commands::mat_literal;
use orthinv_cli::parse::{parse_element, parse_field, parse_form, parse_map};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orthinv")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut a = args.to_vec();
    a.extend(["--out", "json"]);
    let o = run(&a);
    let v = serde_json::from_slice(&o.stdout).unwrap_or(Value::Null);
    (v, o.status.code().unwrap())
}

#[test]
fn normalize_examples() {
    let (v, c) = json(&["normalize", "--form", "[1,1]_|_[1,1]"]);
    assert_eq!((c, &v["m"], &v["d"]), (0, &Value::from(2), &Value::from(0)));
    assert_eq!(v["schema"], "orthinv.normalize/1");
    let (v, _) = json(&["normalize", "--field", "f2t", "--form", "<1,t,t^2>"]);
    assert_eq!((&v["m"], &v["d"], &v["aniso_kernel"]), (&Value::from(0), &Value::from(1), &Value::from("<1,t>")));
    let (v, _) = json(&["normalize", "--form", "<0>"]);
    assert_eq!((&v["m"], &v["d"]), (&Value::from(0), &Value::from(1)));
}

#[test]
fn undecidable_and_input_errors_exit_2() {
    assert_eq!(run(&["normalize", "--field", "f2t", "--form", "[1,t]"]).status.code(), Some(2));
    let o = run(&["normalize", "--form", "[1,1]_|_[1 1]"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1, column 12"));
    assert_eq!(run(&["normalize", "--field", "gf3"]).status.code(), Some(2));
}

#[test]
fn classify_examples() {
    let (v, _) = json(&["classify", "--form", "[1,1]", "--map", "tau(x1)"]);
    let d = &v["descriptor"];
    assert_eq!((&d["kind"], &d["length"], &d["norm_signature"][0]), (&Value::from("Diagonal"), &Value::from(1), &Value::from("1")));
    let (v, _) = json(&["classify", "--form", "[0,0]_|_[0,0]", "--map", "null(1,2)"]);
    assert_eq!((&v["descriptor"]["kind"], &v["descriptor"]["length"]), (&Value::from("Null"), &Value::from(1)));
    let (v, _) = json(&["classify", "--form", "<0,0>", "--map", "radswap(1,2)"]);
    assert_eq!((&v["descriptor"]["kind"], &v["descriptor"]["norm_signature"][0]), (&Value::from("Radical"), &Value::from("0")));
    let o = run(&["classify", "--form", "[1,1]", "--map", "[1,1;1,0]"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not an involution: phi^2 moves basis vector"));
}

#[test]
fn census_examples() {
    for (f, order, invs, classes) in [("[1,1]", 6, 3, 1), ("[0,0]", 2, 1, 1), ("[0,0]_|_[0,0]", 72, 21, 3)] {
        let (v, c) = json(&["census", "--form", f]);
        assert_eq!(c, 0, "{f}");
        assert_eq!(v["group_order"], order);
        assert_eq!(v["involutions"], invs);
        assert_eq!(v["class_count"], classes);
        assert_eq!(v["class_equation"], true);
        assert_eq!(v["predicates_consistent"], true);
    }
}

#[test]
fn conjugate_agrees_with_oracle() {
    let f = "[0,0]_|_[0,0]";
    let (v, c) = json(&["conjugate", "--form", f, "--map", "tau(x1+y1)", "--other", "tau(x2+y2)"]);
    assert_eq!((c, &v["verdict"], &v["oracle"]["agrees"]), (0, &Value::from("conjugate"), &Value::from(true)));
    let (v, c) = json(&["conjugate", "--form", f, "--map", "tau(x1+y1)", "--other", "null(1,2)"]);
    assert_eq!((c, &v["verdict"], &v["oracle"]["agrees"]), (0, &Value::from("not_conjugate"), &Value::from(true)));
}

#[test]
fn fixgroup_reports_structure() {
    let (v, c) = json(&["fixgroup", "--form", "[1,1]_|_[1,1]", "--map", "tau(x1)"]);
    assert_eq!(c, 0);
    assert_eq!(v["centralizer_order"], 12);
    assert_eq!(v["structure"]["report"]["predicted_order"], 12);
    let (v, _) = json(&["fixgroup", "--form", "<0,0,0>", "--map", "radswap(1,2)"]);
    assert_eq!(v["structure"]["order_holds"], true);
}

#[test]
fn verify_examples() {
    let (v, c) = json(&["verify", "--form", ""]);
    assert_eq!((c, &v["passed"]), (0, &Value::from(true)));
    let (v, c) = json(&["verify", "--form", "[0,0]_|_[1,1]"]);
    assert_eq!((c, &v["passed"]), (0, &Value::from(true)));
    let (v, c) = json(&["verify", "--form", "[1,1]_|_<0>", "--inject-fault"]);
    assert_eq!(c, 1);
    assert_eq!(v["failures"][0]["check"], "isometry");
    assert!(v["failures"][0]["detail"]["at"].is_array());
}

#[test]
fn budget_exit_3() {
    assert_eq!(run(&["census", "--form", "[0,0]_|_[0,0]", "--budget", "10"]).status.code(), Some(3));
}

#[test]
fn json_is_stable_across_runs_and_workers() {
    let a = run(&["census", "--form", "[0,0]_|_<0,0>", "--out", "json", "--jobs", "1"]).stdout;
    let b = run(&["census", "--form", "[0,0]_|_<0,0>", "--out", "json", "--jobs", "2"]).stdout;
    let c = run(&["census", "--form", "[0,0]_|_<0,0>", "--out", "json"]).stdout;
    assert!(!a.is_empty());
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn field_names_round_trip() {
    for s in ["gf2", "gf4", "gf8", "gf16:t^4+t+1", "f2t"] {
        assert_eq!(parse_field(s).unwrap().to_string(), s);
    }
}

fn spec_strategy() -> impl Strategy<Value = FieldSpec> {
    prop_oneof![Just(FieldSpec::gf2()), Just(FieldSpec::gf4()), Just(FieldSpec::gf8()), Just(FieldSpec::ratfunc())]
}

fn element(spec: FieldSpec, num: u128, den: u128) -> orthinv::FieldElement {
    match spec.order() {
        Some(o) => spec.from_code((num % o as u128) as u64),
        None => spec.ratio(num, den).unwrap(),
    }
}

proptest! {
    #[test]
    fn elements_round_trip(spec in spec_strategy(), num in 0u128..1024, den in 1u128..1024) {
        let a = element(spec, num, den);
        prop_assert_eq!(parse_element(spec, &a.to_string()).unwrap(), a);
    }

    #[test]
    fn forms_round_trip(
        spec in spec_strategy(),
        pairs in prop::collection::vec((0u128..64, 0u128..64), 0..3),
        diag in prop::collection::vec((0u128..64, 1u128..16), 0..3),
    ) {
        let p: Vec<_> = pairs.iter().map(|&(a, b)| (element(spec, a, 1), element(spec, b, 1))).collect();
        let d: Vec<_> = diag.iter().map(|&(a, b)| element(spec, a, b)).collect();
        let q = QuadForm::from_signature(spec, &p, &d);
        let s = q.to_string();
        let back = parse_form(spec, &s).unwrap();
        prop_assert_eq!(&back, &q);
        prop_assert_eq!(back.to_string(), s);
    }

    #[test]
    fn matrix_literals_round_trip(codes in prop::collection::vec(0u64..4, 9)) {
        let k = FieldSpec::gf4();
        let q = QuadForm::from_signature(k, &[], &[k.zero(), k.zero(), k.zero()]);
        let lit = format!("[{}]", codes.chunks(3).map(|r| r.iter().map(|c| k.from_code(*c).to_string()).collect::<Vec<_>>().join(",")).collect::<Vec<_>>().join(";"));
        let m = parse_map(&q, &lit).unwrap();
        prop_assert_eq!(mat_literal(&m), lit);
    }
}
