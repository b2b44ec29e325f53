#![no_main]

use libfuzzer_sys::fuzz_target;
use macsk::schema::parse_ct;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_ct(text) {
        let _ = p.protocol.enumerate(&p.channel);
    }
});
