#![no_main]

use libfuzzer_sys::fuzz_target;
use uav_aoi::experiments::Checkpoint;

fuzz_target!(|data: &[u8]| {
    if let Ok(cp) = Checkpoint::decode(data) {
        // accepted input is canonical: re-encoding reproduces it exactly
        assert_eq!(cp.encode(), data);
    }
});
