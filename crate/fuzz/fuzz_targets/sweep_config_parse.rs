#![no_main]

use libfuzzer_sys::fuzz_target;
use noiseaudit::synthbench::SweepConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(cfg) = SweepConfig::from_slice(data) {
        let _ = cfg.validate();
    }
});
