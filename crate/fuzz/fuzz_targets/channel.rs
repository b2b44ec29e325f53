#![no_main]

use libfuzzer_sys::fuzz_target;
use macsk::schema::{parse_channel, ChannelFile};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(ch) = parse_channel(text) {
        // Accepted channels round-trip.
        let again = serde_json::to_string(&ChannelFile::of(&ch)).unwrap();
        assert_eq!(parse_channel(&again).unwrap(), ch);
    }
});
