#![no_main]

use libfuzzer_sys::fuzz_target;
use noiseaudit::synthbench::InjectionLedger;

fuzz_target!(|data: &[u8]| {
    let _ = InjectionLedger::from_slice(data);
});
