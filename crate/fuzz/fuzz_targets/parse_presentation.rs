#![no_main]

use libfuzzer_sys::fuzz_target;
use mipkit::presentation::{parse_presentation, render_presentation};

// Accepted input must round-trip: render it and the result has to parse
// back to a presentation that renders identically.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_presentation(text) {
        let rendered = render_presentation(&p);
        let reparsed = parse_presentation(&rendered)
            .unwrap_or_else(|e| panic!("rendered text failed to parse: {e}\n{rendered}"));
        assert_eq!(render_presentation(&reparsed), rendered);
    }
});
