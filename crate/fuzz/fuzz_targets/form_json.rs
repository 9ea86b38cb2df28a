#![no_main]

use libfuzzer_sys::fuzz_target;
use wallkit::forms::Form;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = Form::from_json(text) {
        assert_eq!(Form::from_json(&f.to_json()).expect("own output parses"), f);
    }
});
