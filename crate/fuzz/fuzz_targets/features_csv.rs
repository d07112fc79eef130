#![no_main]
use feather_core::io::parse_features;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = parse_features(data, None);
    let _ = parse_features(data, Some(8));
});
