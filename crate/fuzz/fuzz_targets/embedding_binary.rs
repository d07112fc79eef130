#![no_main]
use feather_core::io::embedding_from_parts;
use libfuzzer_sys::fuzz_target;

// Input: sidecar JSON, a zero byte, then the raw payload.
fuzz_target!(|data: &[u8]| {
    let split = data.iter().position(|&b| b == 0).unwrap_or(data.len());
    let Ok(json) = std::str::from_utf8(&data[..split]) else { return };
    let payload = data.get(split + 1..).unwrap_or(&[]);
    let _ = embedding_from_parts(json, payload);
});
