#![no_main]

use libfuzzer_sys::fuzz_target;
use wallkit::wallsystem::Wallsystem;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(w) = Wallsystem::from_json(text) {
        let a = w.area();
        let _ = w.walls();
        if w.is_cellular() {
            if let Ok(m) = w.dualize() {
                assert_eq!(m.square_count(), a.crossings);
            }
        }
    }
});
