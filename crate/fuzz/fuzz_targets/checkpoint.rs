#![no_main]
use feather_core::models::checkpoint::{from_bytes, to_bytes};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(params) = from_bytes(data) {
        // Anything accepted must serialize back to the same model.
        assert_eq!(from_bytes(&to_bytes(&params)).unwrap(), params);
    }
});
