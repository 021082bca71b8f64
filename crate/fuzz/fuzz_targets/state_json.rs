#![no_main]
use convec_core::dynamics::OBState;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = OBState::from_json(text) {
        s.validate().unwrap();
        let back = OBState::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(back, s);
    }
});
