#![no_main]

use libfuzzer_sys::fuzz_target;
use noiseaudit::NoiseManifest;

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = NoiseManifest::from_slice(data) {
        let _ = m.digest();
    }
});
