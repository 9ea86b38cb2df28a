#![no_main]

use libfuzzer_sys::fuzz_target;
use wallkit::fine::FineSurface;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(s) = FineSurface::from_json(text) else { return };
    let back = FineSurface::from_json(&s.to_json()).expect("own output parses");
    assert_eq!(back.triangle_count(), s.triangle_count());
    let _ = s.strands();
    if s.is_disk() {
        let _ = s.boundary_cycle();
        let _ = s.is_tight();
    }
});
