use lopsim::gates::CZ_REFINED;
use lopsim_web::{calibrate, cz_explore, hom_curve};
use serde_json::Value;

fn parse(s: Result<String, String>) -> Value {
    serde_json::from_str(&s.expect("export succeeds")).unwrap()
}

#[test]
fn cz_explorer_at_refined_settings() {
    let v = parse(cz_explore(CZ_REFINED[0], CZ_REFINED[1], CZ_REFINED[2]));
    assert!(v["residual_norm"].as_f64().unwrap() < 1e-10);
    assert!((v["success_probability"].as_f64().unwrap() - 0.152403).abs() < 1e-5);
    let map = v["map"].as_array().unwrap();
    assert_eq!(map.len(), 16);
    let a = v["success_amplitude"].as_f64().unwrap();
    // diagonal (1, 1, 1, −1)·A, nothing off the diagonal
    for e in map {
        let re = e["re"].as_f64().unwrap();
        let want = match (e["input"].as_str().unwrap(), e["output"].as_str().unwrap()) {
            ("11", "11") => -a,
            (i, o) if i == o => a,
            _ => 0.0,
        };
        assert!((re.abs() - want.abs()).abs() < 1e-9 && re * want >= 0.0, "{e}");
    }
}

#[test]
fn cz_explorer_rejects_bad_transmittance() {
    assert!(cz_explore(1.5, 0.0, 0.0).is_err());
}

#[test]
fn hom_dip_in_the_middle() {
    let v = parse(hom_curve(101));
    let c = v["coincidence"].as_array().unwrap();
    assert_eq!(c.len(), 101);
    assert!((c[0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((c[100].as_f64().unwrap() - 1.0).abs() < 1e-12);
    // minimum at t² = ½, sampled closest at index 71
    let (imin, _) = c.iter().map(|x| x.as_f64().unwrap()).enumerate().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    assert_eq!(imin, 71);
    assert!(hom_curve(1).is_err());
}

#[test]
fn calibration_round_trip() {
    let v = parse(calibrate(0.3, 0.1, -0.2, "lower"));
    assert!((v["realised_t"].as_f64().unwrap() - 0.3).abs() < 1e-12);
    assert!(v["drive"].as_f64().unwrap() >= 0.0);
    assert!(calibrate(0.3, 0.0, 0.0, "sideways").is_err());
    assert!(calibrate(1.2, 0.0, 0.0, "upper").is_err());
}
