#![no_main]

use std::sync::{Arc, OnceLock};

use libfuzzer_sys::fuzz_target;
use nkverify::frames::{build_frame, FrameCase};
use nkverify::parse::{parse_linform, parse_relations, parse_scalar};
use nkverify::scalar::Field;

fn field() -> &'static Arc<Field> {
    static F: OnceLock<Arc<Field>> = OnceLock::new();
    F.get_or_init(|| build_frame(FrameCase::FlagD1D2D3).field)
}

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let f = field();
    if let Ok(v) = parse_linform(f, src) {
        // canonical text must parse back to the same form
        let again = parse_linform(f, &v.to_string()).expect("canonical text parses");
        assert_eq!(again, v);
    }
    let _ = parse_scalar(f, src);
    let _ = parse_relations(f, src);
});
