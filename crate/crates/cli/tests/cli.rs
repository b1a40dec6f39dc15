use std::io::Write;
use std::process::{Command, Stdio};

use serde_json::{json, Value};

fn csinv(args: &[&str], stdin: Option<&str>) -> (i32, Value) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_csinv"))
        .arg("--json")
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .expect("spawn csinv");
    {
        let mut pipe = child.stdin.take().unwrap();
        if let Some(s) = stdin {
            pipe.write_all(s.as_bytes()).unwrap();
        }
    }
    let out = child.wait_with_output().unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).expect("json output");
    (out.status.code().unwrap(), v)
}

fn case5_input() -> Value {
    json!({
        "presentation": { "a": [2, 3, 11], "b": [-1, 1, 2] },
        "data": {
            "p0": "0", "q0": "0", "r0": "0",
            "p": ["1/2", "1/3", "-1/11"],
            "q": ["-1/2", "-1/3", "1/11"],
            "r": ["0", "0", "0"]
        }
    })
}

#[test]
fn cs_seifert_case_five() {
    let (code, v) = csinv(&["cs-seifert"], Some(&case5_input().to_string()));
    assert_eq!(code, 0);
    let p = &v["payload"];
    assert_eq!(p["cs"], "25/66");
    assert_eq!(p["burns_epstein"], "41/66");
    assert_eq!(p["pipeline_cs"], "25/66");
    assert_eq!(p["pipeline_agrees"], true);
    assert!((p["cs_decimal"].as_f64().unwrap() - 25.0 / 66.0).abs() < 1e-15);
}

#[test]
fn cs_seifert_from_file_and_angle_data() {
    let input = json!({
        "presentation": { "a": [2, 3, 11] },
        "generators": [
            { "fractions": ["0", "1/2", "1/2"], "theta1": "0", "theta2": "-1/2" },
            { "fractions": ["0", "2/3", "1/3"], "theta1": "0", "theta2": "1/3" },
            { "fractions": ["6/11", "3/11", "2/11"], "theta1": "0", "theta2": "2/11" }
        ],
        "central": { "theta1": "0", "theta2": "-1" }
    });
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "{input}").unwrap();
    let (code, v) = csinv(&["cs-seifert", file.path().to_str().unwrap()], None);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["cs"], "13/66");
    assert_eq!(v["payload"]["data"]["q"][2], "-8/11");
}

#[test]
fn cs_seifert_trivial() {
    let input = json!({
        "presentation": { "a": [2, 3, 5] },
        "data": { "p0": "0", "q0": "0", "r0": "0", "p": ["0","0","0"], "q": ["0","0","0"], "r": ["0","0","0"] }
    });
    let (code, v) = csinv(&["cs-seifert"], Some(&input.to_string()));
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["cs"], "0/1");
}

#[test]
fn cs_seifert_names_violated_constraint() {
    let mut input = case5_input();
    input["data"]["r"][0] = json!("1/2");
    let (code, v) = csinv(&["cs-seifert"], Some(&input.to_string()));
    assert_eq!(code, 2);
    assert_eq!(v["status"], "fail");
    let diags: Vec<String> = serde_json::from_value(v["diagnostics"].clone()).unwrap();
    assert!(diags.iter().any(|d| d.contains("a_ir_i+b_ir_0=0") && d.contains("i=1")), "{diags:?}");
}

#[test]
fn malformed_input_exits_one() {
    let (code, v) = csinv(&["cs-seifert"], Some("{ not json"));
    assert_eq!(code, 1);
    assert_eq!(v["status"], "error");
    let (code, _) = csinv(&["cs-seifert"], Some(r#"{"presentation":{"a":[2,3,11]},"data":{"p0":"x"}}"#));
    assert_eq!(code, 1);
}

#[test]
fn output_round_trips_through_cs_seifert() {
    let (_, first) = csinv(&["cs-seifert"], Some(&case5_input().to_string()));
    let (code, second) = csinv(&["cs-seifert"], Some(&first["payload"].to_string()));
    assert_eq!(code, 0);
    assert_eq!(first["payload"], second["payload"]);
}

#[test]
fn verify_table_variants() {
    let (code, v) = csinv(&["verify-table"], None);
    assert_eq!(code, 0);
    let values: Vec<&str> = v["payload"]["cases"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["cs_closed"].as_str().unwrap())
        .collect();
    assert_eq!(values, ["13/66", "13/66", "7/66", "7/66", "25/66"]);
    assert_eq!(v["payload"]["matched"], 5);

    let (code, v) = csinv(&["verify-table", "--case", "3"], None);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["cases"][0]["cs_closed"], "7/66");

    let (code, v) = csinv(&["verify-table", "--pipeline-only"], None);
    assert_eq!(code, 0);
    let values: Vec<&str> = v["payload"]["cases"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["cs_pipeline"].as_str().unwrap())
        .collect();
    assert_eq!(values, ["13/66", "13/66", "7/66", "7/66", "25/66"]);

    let (code, _) = csinv(&["verify-table", "--case", "9"], None);
    assert_eq!(code, 1);
}

#[test]
fn classify_examples() {
    let id = "[[[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]],[[0,0],[0,0],[1,0]]]";
    let (code, v) = csinv(&["classify"], Some(id));
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["type"], "Elliptic");

    let (ch, sh) = (1f64.cosh(), 1f64.sinh());
    let lox = json!({ "matrix": [[[1,0],[0,0],[0,0]],[[0,0],[ch,0],[sh,0]],[[0,0],[sh,0],[ch,0]]] });
    let (code, v) = csinv(&["classify"], Some(&lox.to_string()));
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["type"], "Loxodromic");

    let bad = "[[[2,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]],[[0,0],[0,0],[1,0]]]";
    let (code, _) = csinv(&["classify"], Some(bad));
    assert_eq!(code, 2);
    let (code, v) = csinv(&["check-u21"], Some(bad));
    assert_eq!(code, 2);
    assert_eq!(v["payload"]["in_u21"], false);
}

#[test]
fn variation_examples() {
    let constant = json!({ "family": "elliptic", "params": { "alpha1": { "kind": "constant", "value": 0.3 } } });
    let (code, v) = csinv(&["variation"], Some(&constant.to_string()));
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["closed_form"].as_f64().unwrap(), 0.0);

    let elliptic = json!({ "family": "elliptic", "params": {
        "alpha1": { "kind": "linear", "from": 0.0, "to": 1.0 },
        "beta1": { "kind": "constant", "value": 1.0 } } });
    let (code, v) = csinv(&["variation"], Some(&elliptic.to_string()));
    assert_eq!(code, 0);
    assert!((v["payload"]["closed_form"].as_f64().unwrap() + 0.5).abs() < 1e-15);
    assert!(v["payload"]["abs_difference"].as_f64().unwrap() <= 1e-10);

    let lox = json!({ "family": "loxodromic", "params": {
        "u": { "kind": "linear", "from": 0.0, "to": 1.0 },
        "v": { "kind": "constant", "value": 1.0 } } });
    let (code, v) = csinv(&["variation"], Some(&lox.to_string()));
    assert_eq!(code, 0);
    let expected = 1.0 / (4.0 * std::f64::consts::PI.powi(2));
    assert!((v["payload"]["closed_form"].as_f64().unwrap() - expected).abs() < 1e-12);

    let (code, _) = csinv(&["variation"], Some(r#"{"family":"elliptic","params":{"alpha1":{"kind":"samples","values":[1,2]}}}"#));
    assert_eq!(code, 1);
}

#[test]
fn mul_of_identity_and_element() {
    let id = json!({ "matrix": [[[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]],[[0,0],[0,0],[1,0]]], "theta1": 0.0, "theta2": 0.0 });
    let pi = std::f64::consts::PI;
    let minus = json!({ "matrix": [[[1,0],[0,0],[0,0]],[[0,0],[-1,0],[0,0]],[[0,0],[0,0],[-1,0]]], "theta1": 0.0, "theta2": pi });
    let (code, v) = csinv(&["mul"], Some(&json!([id, minus, minus]).to_string()));
    assert_eq!(code, 0);
    assert!((v["payload"]["product"]["theta2"].as_f64().unwrap() - 2.0 * pi).abs() < 1e-12);
}

#[test]
fn find_reps_case_five_and_trivial() {
    let (code, v) = csinv(&["find-reps", "--case", "5", "--seed", "1", "--budget", "64"], None);
    assert_eq!(code, 0);
    let p = &v["payload"];
    assert_eq!(p["cs"], "25/66");
    assert_eq!(p["irreducible"], true);
    assert!(p["search"]["residual"].as_f64().unwrap() <= 1e-8);

    let (code, again) = csinv(&["cs-seifert"], Some(&p.to_string()));
    assert_eq!(code, 0);
    assert_eq!(again["payload"]["cs"], "25/66");

    let trivial = json!({
        "presentation": { "a": [2, 3, 11] },
        "target": { "generators": [["0","0","0"],["0","0","0"],["0","0","0"]], "central": { "fraction": "0" } }
    });
    let (code, v) = csinv(&["find-reps"], Some(&trivial.to_string()));
    assert_eq!(code, 0);
    assert!(v["payload"]["search"]["residual"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn find_reps_infeasible_target() {
    let target = json!({
        "presentation": { "a": [2, 3, 11] },
        "target": { "generators": [["1/3","2/3","0"],["0","0","0"],["0","0","0"]], "central": { "fraction": "0" } }
    });
    let (code, v) = csinv(&["find-reps"], Some(&target.to_string()));
    assert_eq!(code, 2);
    assert!(v["diagnostics"][0].as_str().unwrap().contains("lifted"));
}

#[test]
fn find_reps_reports_non_convergence() {
    // Liftable classes with x_2 = x_3 = 1 would force x_1 = 1.
    let target = json!({
        "presentation": { "a": [2, 3, 5] },
        "target": { "generators": [["1/2","1/2","0"],["0","0","0"],["0","0","0"]], "central": { "fraction": "0" } }
    });
    let (code, v) = csinv(&["find-reps", "--budget", "2"], Some(&target.to_string()));
    assert_eq!(code, 3, "{v}");
    assert!(v["payload"]["search"]["residual"].as_f64().unwrap() > 1e-6);
}
