#![no_main]

use libfuzzer_sys::fuzz_target;
use nkverify::tables::parse_table_specs;

fuzz_target!(|data: &[u8]| {
    if let Ok(src) = std::str::from_utf8(data) {
        let _ = parse_table_specs(src);
    }
});
