#![no_main]

use libfuzzer_sys::fuzz_target;
use wallkit::squarecell::SquareCelledSurface;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = SquareCelledSurface::from_json(text) {
        let back = SquareCelledSurface::from_json(&m.to_json()).expect("own output parses");
        assert_eq!(back.square_count(), m.square_count());
        let _ = m.boundary_cycles();
        let _ = m.is_isometric_filling();
        if m.vertex_count() > 0 {
            let _ = m.distances_from(0);
        }
    }
});
