#![no_main]

use libfuzzer_sys::fuzz_target;
use wallkit::steinitz::Chords;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(c) = Chords::from_json(text) else { return };
    // Arrangements grow quadratically; large boundaries only exercise allocation.
    if c.boundary_length > 40 {
        return;
    }
    if let Ok(d) = c.to_diagram() {
        assert!(d.is_pla());
        let table = d.boundary_distances();
        assert_eq!(table.len(), c.boundary_length);
    }
});
