#![no_main]

use libfuzzer_sys::fuzz_target;
use macsk::converse::best_bound_lp;
use macsk::schema::parse_law;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_law(text) {
        if p.layout.terminals.len() <= 4 {
            let _ = best_bound_lp(&p.law, &p.layout.terminals);
        }
    }
});
