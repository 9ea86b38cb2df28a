#![no_main]

use libfuzzer_sys::fuzz_target;
use wallkit::combmap::SurfaceMap;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = SurfaceMap::from_json(text) {
        let c = m.classify();
        let back = SurfaceMap::from_json(&m.to_json()).expect("own output parses");
        assert!(back.is_isomorphic(&m));
        assert_eq!(back.classify(), c);
    }
});
