#![no_main]
use feather_core::io::parse_numeric_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = parse_numeric_csv(data);
});
