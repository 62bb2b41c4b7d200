use robba::cli::run;
use serde_json::Value;

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["robba", "--json"];
    full.extend_from_slice(args);
    let out = run(full);
    let v = serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout));
    (out.code, v)
}

fn classify(lit: &str) -> (i32, Value) {
    json(&["classify", lit])
}

#[test]
fn classify_examples() {
    for (lit, class, dims, degree, slope) in [
        ("w", "OmegaXI(0)", [0, 2, 1], 0, "0"),
        ("x^-1", "XMinusI(1)", [1, 2, 0], -1, "-1"),
        ("ur(5^0*3)", "Generic", [0, 1, 0], 0, "0"),
    ] {
        let (code, v) = classify(lit);
        assert_eq!(code, 0, "{lit}");
        let r = &v["result"];
        assert_eq!(r["class"], class, "{lit}");
        assert_eq!([r["h0"].as_i64().unwrap(), r["h1"].as_i64().unwrap(), r["h2"].as_i64().unwrap()], dims.map(i64::from));
        assert_eq!(r["euler"], -1);
        assert_eq!(r["degree"], degree);
        assert_eq!(r["slope"], slope);
    }
}

#[test]
fn report_is_self_describing() {
    let (_, v) = json(&["--prime", "7", "--seed", "42", "--window", "-12:60", "classify", "x"]);
    assert_eq!(v["schema"], "robba-report/1");
    assert_eq!(v["command"], "classify");
    let c = &v["config"];
    assert_eq!((c["p"].as_u64(), c["seed"].as_u64(), c["lo"].as_i64(), c["hi"].as_i64()), (Some(7), Some(42), Some(-12), Some(60)));
    assert_eq!(v["status"], "pass");
}

#[test]
fn verify_suites_name_their_identities() {
    let (code, v) = json(&["--samples", "4", "verify", "operators"]);
    assert_eq!(code, 0);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"∂φ=pφ∂"));
    let (code, v) = json(&["--samples", "4", "verify", "residues"]);
    assert_eq!(code, 0);
    assert!(v["checks"].as_array().unwrap().iter().any(|c| c["name"] == "Res(γf)=χ(γ)⁻¹Res(f)" && c["pass"] == true));
}

#[test]
fn pairing_example() {
    let (code, v) = json(&["pair", "--c1", "\"t\"@x^-1", "--c2", "\"(1+T)/T^2\"@w*x"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["value_int"], 1);
}

#[test]
fn h2reduce_abs_x_trivializes() {
    let (code, v) = json(&["--samples", "2", "h2reduce", "--char", "|x|", "--f", "-1:1"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["status"], "pass");
    assert!(v["result"].to_string().contains("rivialization"));
}

#[test]
fn torsion_example() {
    let (code, v) = json(&["torsion", "--k", "1", "--nmax", "3"]);
    assert_eq!(code, 0);
    let r = &v["result"];
    assert_eq!((r["h0"].as_i64(), r["h1"].as_i64(), r["chi"].as_i64(), r["stabilized_at"].as_i64()), (Some(1), Some(1), Some(0), Some(1)));
}

#[test]
fn shapiro_reports_equal_dimensions() {
    let (code, v) = json(&["shapiro", "--m", "2", "--fiber", "R/t^2@x^-1"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["status"], "pass");
}

#[test]
fn exit_codes() {
    assert_eq!(run(["robba", "--prime", "4", "classify", "x"]).code, 3);
    assert_eq!(run(["robba", "--precision", "3", "classify", "x"]).code, 3);
    assert_eq!(run(["robba", "classify", "x^^"]).code, 3);
    assert_eq!(run(["robba", "nonsense"]).code, 3);
    let out = run(["robba", "--help"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("GRAMMAR") || out.stdout.to_lowercase().contains("grammar"));
}

#[test]
fn text_output_is_one_line_per_check() {
    let out = run(["robba", "classify", "w"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.starts_with("classify [pass] p=5 N=12"));
    assert!(out.stdout.contains("χ = -1: pass"));
}
