#![no_main]

use libfuzzer_sys::fuzz_target;
use specglauber::io::{format_boundary_json, parse_boundary_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(b) = parse_boundary_json(text) {
        let again = parse_boundary_json(&format_boundary_json(&b)).expect("round trip");
        assert_eq!(b, again);
    }
});
