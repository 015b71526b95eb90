#![no_main]

use libfuzzer_sys::fuzz_target;

// Arbitrary input must produce a scenario or an error, never a panic.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = epr_transport::scenario::parse_scenario(text);
    }
});
