//! Fuzz the run-configuration parser: arbitrary bytes must never panic,
//! only produce Ok or a config error. Validated configs must also survive
//! resolution into a benchmark.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(config) = cutfem::config::RunConfig::from_json(text) {
        let _ = config.resolve();
    }
});
