use biquat_web::{contract, integrate, multiply};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn multiply_unit_is_neutral() {
    let v = parse(&multiply(r#"{"a":[1,0,1,0,0,0,0,0],"b":[0.5,0.25,-1,2,3,0,0,-4]}"#));
    assert_eq!(v["ab"], v["ba"]);
    assert_eq!(v["commutator_norm"], 0.0);
    // Unit maps to the IJK scalar part 1.
    let u = parse(&multiply(r#"{"a":[1,0,1,0,0,0,0,0],"b":[1,0,1,0,0,0,0,0]}"#));
    assert_eq!(u["ab_ijk"][0], serde_json::json!([1.0, 0.0]));
}

#[test]
fn integrate_conj_on_circle_matches_frozen_control() {
    let req = r#"{"curve":{"kind":"ellipse","center":[0,0,0],"u":[1,0,0],"v":[0,1,0]},"map":"conj","side":"right","n":100000}"#;
    let v = parse(&integrate(req));
    let e1_im = v["value"][1].as_f64().unwrap();
    assert!((e1_im - 6.2831853030454162537).abs() < 1e-9, "{e1_im}");
}

#[test]
fn contract_left_map_cancels() {
    let req = r#"{"curve":{"kind":"wobbly","lobes":3,"amplitude":0.15,"lift":0.1},"map":"zeta2","side":"left","target":[0,0,0.5],"s":0.6,"rho":1.0}"#;
    let v = parse(&contract(req));
    assert!(v.get("error").is_none(), "{v}");
    assert!(v["cancellation"].as_f64().unwrap() < 1e-10);
    assert!(v["boundary_norm"].as_f64().unwrap() < 1e-3);
}

#[test]
fn malformed_requests_yield_error_objects() {
    for (f, body) in [
        (multiply as fn(&str) -> String, "{}"),
        (integrate, r#"{"curve":{"kind":"square","half":-1,"z":0},"map":"zeta2","side":"right","n":64}"#),
        (integrate, r#"{"curve":{"kind":"square","half":1,"z":0},"map":"zeta2","side":"right","n":1}"#),
        (contract, "not json"),
    ] {
        assert!(parse(&f(body))["error"].is_string());
    }
}
