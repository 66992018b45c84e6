#![no_main]

use libfuzzer_sys::fuzz_target;
use specglauber::io::{format_graph_json, parse_graph_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(g) = parse_graph_json(text) {
        let again = parse_graph_json(&format_graph_json(&g)).expect("round trip");
        assert_eq!(g, again);
    }
});
