#![no_main]

use libfuzzer_sys::fuzz_target;
use mipkit::cache::{decode, table_to_group};

// Two leading bytes choose generator images, the rest is a candidate cache
// file. Decoding plus table reconstruction must reject garbage without
// panicking; anything accepted is a verified group.
fuzz_target!(|data: &[u8]| {
    let [i0, i1, file @ ..] = data else { return };
    if let Ok(table) = decode(file) {
        let images = [usize::from(*i0), usize::from(*i1)];
        if let Ok(g) = table_to_group(&table, &images) {
            assert_eq!(g.order(), table.order());
        }
    }
});
