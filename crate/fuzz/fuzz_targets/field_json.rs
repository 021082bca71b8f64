#![no_main]
use convec_core::spectral::SpectralField;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = SpectralField::from_json(text) {
        let back = SpectralField::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(back, f);
    }
});
