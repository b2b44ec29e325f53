#![no_main]

use libfuzzer_sys::fuzz_target;
use macsk::schema::parse_interactive;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_interactive(text) {
        let obs = vec![0; p.terminals()];
        let _ = p.run(&obs);
    }
});
