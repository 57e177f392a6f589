//! Experiment-config JSON parsing: no panics, and accepted configs
//! re-serialize losslessly.

#![no_main]

use libfuzzer_sys::fuzz_target;
use planeforest::experiments::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(cfg) = serde_json::from_str::<ExperimentConfig>(text) else {
        return;
    };
    let json = serde_json::to_string(&cfg).unwrap();
    let round: ExperimentConfig = serde_json::from_str(&json).unwrap();
    assert_eq!(serde_json::to_string(&round).unwrap(), json);
    // validation must return, never panic
    let _ = cfg.validate();
});
