#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(inputs) = freqlab::io::AnalysisInputs::from_json(text) {
            let _ = inputs.resolve(3);
        }
    }
});
