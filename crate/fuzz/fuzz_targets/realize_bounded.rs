#![no_main]

use libfuzzer_sys::fuzz_target;
use mipkit::groups::realize;
use mipkit::presentation::parse_presentation;

// Coset enumeration on arbitrary parsed presentations, kept small: the
// budget bounds the table, and the caps below keep single runs cheap
// (relators are scanned letter by letter, so their total length matters).
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(p) = parse_presentation(text) else { return };
    if p.ngens() > 8 {
        return;
    }
    let letters: u64 = p
        .relations()
        .iter()
        .map(|r| r.relator().syllables().iter().map(|s| s.exp.unsigned_abs()).sum::<u64>())
        .sum();
    if letters > 2048 {
        return;
    }
    let _ = realize(&p, 512);
});
