#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = freqlab::io::read_sequence_text(&mut &data[..]);
});
