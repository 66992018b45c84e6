#![no_main]

use libfuzzer_sys::fuzz_target;
use specglauber::report::ExperimentSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // the spec deserializer must never panic on malformed input
    let _ = serde_json::from_str::<ExperimentSpec>(text);
});
