#![no_main]

use libfuzzer_sys::fuzz_target;
use macsk::converse::Partition;

fuzz_target!(|data: &[u8]| {
    let Some((&m, rest)) = data.split_first() else { return };
    let Ok(spec) = std::str::from_utf8(rest) else { return };
    let _ = Partition::parse(m as usize % 8, spec);
});
