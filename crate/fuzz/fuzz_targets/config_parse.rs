#![no_main]

use libfuzzer_sys::fuzz_target;
use uav_aoi::experiments::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = ExperimentConfig::parse(text, "fuzz.toml") {
        let resolved = cfg.resolved();
        let again = ExperimentConfig::parse(&resolved.to_toml(), "resolved.toml").expect("resolved config parses");
        assert_eq!(again.hash(), cfg.hash());
    }
});
