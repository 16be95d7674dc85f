#![no_main]

use libfuzzer_sys::fuzz_target;
use noiseaudit::LabelSpace;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(ls) = LabelSpace::parse(text) {
            assert_eq!(LabelSpace::parse(&ls.to_text()).unwrap(), ls);
        }
    }
});
