#![no_main]

use libfuzzer_sys::fuzz_target;
use noiseaudit::{Dataset, LabelSpace, Split};

// Input is `<label space text>\0<dataset bytes>`; without a NUL the whole
// input is the dataset and a fixed label space is used.
fuzz_target!(|data: &[u8]| {
    let (labels, body) = match data.iter().position(|&b| b == 0) {
        Some(i) => (
            std::str::from_utf8(&data[..i])
                .ok()
                .and_then(|t| LabelSpace::parse(t).ok()),
            &data[i + 1..],
        ),
        None => (None, data),
    };
    let ls = labels.unwrap_or_else(|| LabelSpace::parse("no_relation\nper:title\norg:founded_by\n").unwrap());
    if let Ok(d) = Dataset::parse(body, Split::Train, &ls) {
        let again = Dataset::parse(d.to_jsonl(None).as_bytes(), Split::Train, &ls).expect("re-parse");
        assert_eq!(again.len(), d.len());
    }
});
