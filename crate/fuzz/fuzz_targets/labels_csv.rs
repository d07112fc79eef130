#![no_main]
use feather_core::io::parse_labels;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = parse_labels(data, 64, None);
    let _ = parse_labels(data, 64, Some(3));
});
