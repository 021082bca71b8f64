#![no_main]
use convec_core::annulus::BaseState;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(b) = BaseState::from_json(text) {
        let _ = b.symmetry_residual();
        let _ = b.to_json();
    }
});
