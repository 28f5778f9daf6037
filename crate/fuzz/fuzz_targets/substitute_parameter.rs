#![no_main]

use libfuzzer_sys::fuzz_target;
use mipkit::presentation::{parse_presentation, substitute_parameter};

// First byte picks the parameter value, the rest is the template. Successful
// substitutions are fed on to the parser, which must not panic either.
fuzz_target!(|data: &[u8]| {
    let Some((&m_byte, rest)) = data.split_first() else { return };
    let m = i64::from(m_byte as i8);
    let Ok(template) = std::str::from_utf8(rest) else { return };
    if let Ok(text) = substitute_parameter(template, m) {
        let _ = parse_presentation(&text);
    }
});
