#![no_main]

use libfuzzer_sys::fuzz_target;
use ptrank_core::io::{field_descriptor, parse_field};

// Anything that parses must print back to a descriptor naming the same field.
fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(ctx) = parse_field(s) {
        let again = parse_field(&field_descriptor(&ctx)).expect("canonical descriptor parses");
        assert_eq!(again, ctx);
    }
});
