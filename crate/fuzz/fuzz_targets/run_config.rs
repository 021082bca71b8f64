#![no_main]
use convec_core::config::{RunConfig, SimulationConfig};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = RunConfig::parse(text) {
        for k in cfg.keys() {
            assert!(!cfg.get(k).unwrap().is_empty());
        }
        let _ = SimulationConfig::from_config(&cfg);
    }
});
