#![no_main]

use libfuzzer_sys::fuzz_target;
use wallkit::steinitz::{Chords, MoveLog};

const COMPLETE3: &str = include_str!("../../crates/cli/fixtures/complete3_chords.json");

fuzz_target!(|data: &[u8]| {
    let Ok(log) = serde_json::from_slice::<MoveLog>(data) else { return };
    let d = Chords::from_json(COMPLETE3).unwrap().to_diagram().unwrap();
    // Moves that do not apply must come back as errors, not panics.
    if let Ok(r) = d.replay(&log) {
        assert_eq!(r.boundary_distances().len(), d.boundary_distances().len());
    }
});
