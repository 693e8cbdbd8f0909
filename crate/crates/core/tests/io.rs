mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;

use subcert::io::{emit_system, examples, parse_system, SystemFile};
use subcert::Error;

#[test]
fn parses_documented_format() {
    let text = r#"{
  "n": 1,
  "forms": [
    {"name": "model", "terms": [{"mono": "xi1*xi1", "re": 1}, {"mono": "x1*x1", "im": 1}]}
  ]
}"#;
    let sys: Sys = parse_system(text).unwrap();
    assert_eq!(sys.forms(), model().forms());
    assert_eq!(sys.names(), &["model".to_string()]);
}

#[test]
fn cross_terms_are_split() {
    let text = r#"{"n": 2, "forms": [{"name": "q", "terms": [{"mono": "x2*xi1", "im": 1}]}]}"#;
    let sys: Sys = parse_system(text).unwrap();
    let im = sys.forms()[0].im();
    assert_eq!((im[(1, 2)], im[(2, 1)]), (0.5, 0.5));
}

#[test]
fn reports_errors_with_locations() {
    let err = SystemFile::parse("{\"n\": 1,\n \"forms\": [}").unwrap_err();
    assert!(matches!(err, Error::Input(_)));
    assert!(err.to_string().contains("line 2"), "{err}");
    let err = SystemFile::parse(r#"{"n": 1, "forms": [], "extra": 0}"#).unwrap_err();
    assert!(err.to_string().contains("extra"));
    let bad_var = r#"{"n": 1, "forms": [{"name": "a", "terms": [{"mono": "x2*x1", "re": 1}]}]}"#;
    let err = parse_system::<f64>(bad_var).unwrap_err().to_string();
    assert!(err.contains("form 0 (`a`), term 0") && err.contains("x2"), "{err}");
    let negative = r#"{"n": 1, "forms": [{"name": "a", "terms": [{"mono": "x1*x1", "re": -1}]}]}"#;
    assert!(parse_system::<f64>(negative).unwrap_err().to_string().contains("nonnegative"));
    let cubic = r#"{"n": 1, "forms": [{"name": "a", "terms": [{"mono": "x1*x1*x1", "re": 1}]}]}"#;
    assert!(parse_system::<f64>(cubic).is_err());
    assert!(parse_system::<f64>(r#"{"n": 0, "forms": []}"#).is_err());
}

#[test]
fn cross_system_generator() {
    let sys = examples::cross_system::<f64>(3).unwrap();
    assert_eq!(sys.len(), 4);
    assert_eq!(sys.names(), &["q1", "qt1", "q2", "qt2"].map(String::from));
    let sum = examples::cross_sum::<f64>(3, &[1.0, 2.0], &[1.0, 0.5]).unwrap();
    assert_eq!(sum.len(), 1);
    let file = SystemFile::from_system(&sys, Some(examples::cross_metadata(3, None)));
    let back: Sys = SystemFile::parse(&file.to_json()).unwrap().to_system().unwrap();
    assert_eq!(back, sys);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn round_trip(seed in seeds()) {
        let mut g = rng(seed);
        let n = g.gen_range(1..=3);
        let count = g.gen_range(1..=3);
        let integer = g.gen_bool(0.5);
        let sys = random_system(&mut g, n, count, integer);
        let text = emit_system(&sys);
        let back: Sys = parse_system(&text).unwrap();
        prop_assert_eq!(&back, &sys);
        prop_assert_eq!(emit_system(&back), text);
    }
}
