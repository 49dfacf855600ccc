//! Replays the checked-in fuzz seeds through the parser entry points.

use std::path::PathBuf;

use nkverify::almostcontact::parse_script;
use nkverify::frames::{build_frame, FrameCase};
use nkverify::parse::{parse_linform, parse_relations, parse_scalar};
use nkverify::tables::parse_table_specs;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn expression_seeds_parse_and_round_trip() {
    let f = build_frame(FrameCase::FlagD1D2D3).field;
    for (name, src) in seeds("parse_expr") {
        let ok = match parse_linform(&f, &src) {
            Ok(v) => {
                assert_eq!(parse_linform(&f, &v.to_string()).unwrap(), v, "{name}");
                true
            }
            Err(_) => false,
        };
        let any = ok || parse_scalar(&f, &src).is_ok() || parse_relations(&f, &src).is_ok();
        assert!(any, "seed {name} parses nowhere");
    }
}

#[test]
fn table_spec_seeds_parse() {
    for (name, src) in seeds("parse_table_specs") {
        assert!(parse_table_specs(&src).is_ok(), "{name}");
    }
}

#[test]
fn script_seeds_parse() {
    for (name, src) in seeds("parse_script") {
        assert!(parse_script(&src).is_ok(), "{name}");
    }
}

#[test]
fn truncated_inputs_do_not_panic() {
    let f = build_frame(FrameCase::FlagD1D2D3).field;
    for target in ["parse_expr", "parse_table_specs", "parse_script"] {
        for (_, src) in seeds(target) {
            for cut in (0..src.len()).filter(|&i| src.is_char_boundary(i)).step_by(7) {
                let s = &src[..cut];
                let _ = parse_linform(&f, s);
                let _ = parse_scalar(&f, s);
                let _ = parse_relations(&f, s);
                let _ = parse_table_specs(s);
                let _ = parse_script(s);
            }
        }
    }
}
