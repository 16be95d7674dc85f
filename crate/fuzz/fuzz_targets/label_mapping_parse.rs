#![no_main]

use libfuzzer_sys::fuzz_target;
use noiseaudit::detect::LabelMapping;

fuzz_target!(|data: &[u8]| {
    let _ = LabelMapping::from_slice(data);
});
