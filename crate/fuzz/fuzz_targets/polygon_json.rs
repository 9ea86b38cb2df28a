#![no_main]

use libfuzzer_sys::fuzz_target;
use wallkit::lattice::{self, IntegralPolygon};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(k) = IntegralPolygon::from_json(text) else { return };
    let back = IntegralPolygon::from_json(&k.to_json()).expect("own output parses");
    assert_eq!(back.double_area(), k.double_area());
    if let Ok(walls) = lattice::walls_from_polygon(&k) {
        if let Ok(c) = lattice::crossing_count(&walls) {
            assert_eq!(2 * c, k.double_area());
        }
    }
});
