#![no_main]

use libfuzzer_sys::fuzz_target;
use macsk::schema::parse_distribution;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(d) = parse_distribution(text) {
        let s: f64 = d.probs().iter().sum();
        assert!((s - 1.0).abs() < 1e-9);
    }
});
