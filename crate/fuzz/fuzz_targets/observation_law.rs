#![no_main]

use libfuzzer_sys::fuzz_target;
use macsk::schema::parse_observation_law;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_observation_law(text);
});
