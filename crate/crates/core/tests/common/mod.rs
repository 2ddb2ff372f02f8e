#![allow(dead_code)]

use serde_json::Value;
use twistlab::funcs::FuncDescriptor;

pub fn fixtures() -> Value {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/oracle_fixtures.json");
    serde_json::from_str(&std::fs::read_to_string(path).expect("fixture file")).expect("fixture JSON")
}

pub fn fixture(path: &str) -> f64 {
    let mut v = fixtures();
    for key in path.split('.') {
        v = v[key].take();
    }
    v.as_f64().unwrap_or_else(|| panic!("fixture {path} is not a number"))
}

pub fn band(path: &str) -> (f64, f64) {
    let mut v = fixtures();
    for key in path.split('.') {
        v = v[key].take();
    }
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

pub fn frac_sqrt(p: u64) -> f64 {
    (p as f64).sqrt().fract()
}

/// `SinLog(0.1, 2π·{√2}·log 2)`.
pub fn example_sinlog() -> FuncDescriptor {
    FuncDescriptor::sin_log(0.1, twistlab::cone::beta_hat(frac_sqrt(2))).unwrap()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
