//! Replays the checked-in fuzz seeds through the decoders the fuzz targets exercise.

use std::fs;
use std::path::PathBuf;

use convec_core::annulus::BaseState;
use convec_core::config::RunConfig;
use convec_core::dynamics::OBState;
use convec_core::spectral::SpectralField;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn field_seeds_round_trip() {
    for (name, text) in seeds("field_json") {
        let f = SpectralField::from_json(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(SpectralField::from_json(&f.to_json().unwrap()).unwrap(), f, "{name}");
    }
}

#[test]
fn state_seeds_round_trip() {
    for (name, text) in seeds("state_json") {
        let s = OBState::from_json(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(OBState::from_json(&s.to_json().unwrap()).unwrap(), s, "{name}");
    }
}

#[test]
fn config_seeds_parse_or_reject() {
    let parsed: Vec<(String, bool)> = seeds("run_config").into_iter().map(|(n, t)| (n, RunConfig::parse(&t).is_ok())).collect();
    for (name, ok) in &parsed {
        assert_eq!(*ok, !name.starts_with("dup"), "{name}");
    }
}

#[test]
fn base_state_seeds_validate() {
    for (name, text) in seeds("base_state_json") {
        let b = BaseState::from_json(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(b.symmetry_residual() < 1e-10, "{name}");
    }
}

#[test]
fn truncated_seeds_never_panic() {
    for target in ["field_json", "state_json", "base_state_json", "run_config"] {
        for (_, text) in seeds(target) {
            for cut in (0..text.len()).step_by(7).filter(|&c| text.is_char_boundary(c)) {
                let t = &text[..cut];
                let _ = SpectralField::from_json(t);
                let _ = OBState::from_json(t);
                let _ = BaseState::from_json(t);
                let _ = RunConfig::parse(t);
            }
        }
    }
}
