#![no_main]

use libfuzzer_sys::fuzz_target;
use sigmak::cli::{answer_cone_query, parse_cone_queries};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(queries) = parse_cone_queries(text) {
        for q in &queries {
            let _ = answer_cone_query(q);
        }
    }
});
