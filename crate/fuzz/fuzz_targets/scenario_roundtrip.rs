#![no_main]

use libfuzzer_sys::fuzz_target;

use epr_transport::scenario::parse_scenario;

// Anything that parses must survive echo and re-parse unchanged.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(first) = parse_scenario(text) else {
        return;
    };
    let echo = first.to_text();
    let second = parse_scenario(&echo).expect("canonical echo must parse");
    assert_eq!(second.to_text(), echo);
    assert_eq!(second, first);
});
