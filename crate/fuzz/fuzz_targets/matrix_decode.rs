#![no_main]

use libfuzzer_sys::fuzz_target;
use noiseaudit::vecstore::{MatrixSet, RawMatrix};

fuzz_target!(|data: &[u8]| {
    // Raw decode re-encodes to the same bytes; typed decode must never panic.
    if let Ok(raw) = RawMatrix::decode(data) {
        assert_eq!(raw.encode().expect("decoded matrix re-encodes"), data);
    }
    let _ = MatrixSet::from_bytes(data);
});
