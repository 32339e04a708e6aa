use std::path::PathBuf;

use proptest::prelude::*;
use sqcomb::hitran::{
    parse_record, parse_record_bytes, LineList, ParseError, SpectralLine, RECORD_LEN,
};

const FIXTURE: &str = include_str!("data/c2h2_p9.par");

fn decimal(units: i64, decimals: u32) -> f64 {
    let scale = 10i64.pow(decimals);
    let sign = if units < 0 { "-" } else { "" };
    let units = units.abs();
    format!(
        "{sign}{}.{:0width$}",
        units / scale,
        units % scale,
        width = decimals as usize
    )
    .parse()
    .unwrap()
}

prop_compose! {
    fn quantized_line()(
        molecule_id in 1u8..=99,
        isotopologue_id in 1u8..=36,
        nu in 1i64..=99_999_999_999,
        mantissa in 1000i64..=9999,
        exponent in -35i32..=-5,
        gamma_air in 1i64..=9999,
        gamma_self in 0i64..=9999,
        e_lower in 0i64..=999_999_999,
        n_air in 0i64..=99,
        delta_air in -999_999i64..=999_999,
    ) -> SpectralLine {
        SpectralLine {
            molecule_id,
            isotopologue_id,
            nu0: decimal(nu, 6),
            intensity: format!("{}E{exponent}", decimal(mantissa, 3)).parse().unwrap(),
            gamma_air: decimal(gamma_air, 4),
            gamma_self: decimal(gamma_self, 3),
            e_lower: decimal(e_lower, 4),
            n_air: decimal(n_air, 2),
            delta_air: decimal(delta_air, 6),
        }
    }
}

proptest! {
    #[test]
    fn quantized_lines_round_trip(line in quantized_line()) {
        let record = line.to_record().unwrap();
        prop_assert_eq!(record.len(), RECORD_LEN);
        prop_assert_eq!(parse_record(&record).unwrap(), line);
        prop_assert_eq!(parse_record(&format!("{record}\r\n")).unwrap(), line);
    }

    #[test]
    fn arbitrary_records_never_panic(bytes in proptest::collection::vec(any::<u8>(), RECORD_LEN)) {
        let _ = parse_record_bytes(&bytes);
    }

    #[test]
    fn printable_records_never_panic(text in "[ 0-9.EeDd+-]{160}") {
        if let Ok(line) = parse_record(&text) {
            prop_assert!(line.nu0 > 0.0 && line.gamma_air > 0.0);
            prop_assert!(line.intensity >= 0.0 && line.gamma_self >= 0.0);
        }
    }

    #[test]
    fn other_lengths_are_rejected(len in 0usize..400) {
        prop_assume!(len != RECORD_LEN);
        let bytes = vec![b' '; len];
        prop_assert_eq!(parse_record_bytes(&bytes), Err(ParseError::WrongLength { found: len }));
    }
}

#[test]
fn fixture_lines() {
    let list = LineList::from_par_str(FIXTURE).unwrap();
    assert_eq!(list.len(), 5);
    let acetylene = list.select_window(6530.0, 6540.0, 26).unwrap();
    assert_eq!(acetylene.len(), 4);
    let p9 = list.nearest(6534.36).unwrap();
    assert_eq!((p9.molecule_id, p9.isotopologue_id), (26, 1));
    assert_eq!(p9.nu0, 6534.3634);
    assert_eq!(p9.intensity, 1.189e-20);
    assert_eq!(p9.gamma_air, 0.0771);
    assert_eq!(p9.gamma_self, 0.146);
    assert_eq!(p9.e_lower, 105.8823);
    assert_eq!(p9.n_air, 0.75);
    assert_eq!(p9.delta_air, -0.0079);
}

#[test]
fn fixture_records_round_trip() {
    for raw in FIXTURE.lines() {
        let line = parse_record(raw).unwrap();
        let again = parse_record(&line.to_record().unwrap()).unwrap();
        assert_eq!(again, line);
    }
}

#[test]
fn truncated_fixture_reports_line() {
    let mut text = FIXTURE.to_string();
    text.push_str("261 6540.000000 1.000E-21\n");
    match LineList::from_par_str(&text) {
        Err(ParseError::AtLine { line, source }) => {
            assert_eq!(line, 6);
            assert!(matches!(*source, ParseError::WrongLength { found: 25 }));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn fuzz_corpus_seeds_parse_without_panicking() {
    let corpus = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    let mut seen = 0;
    for target in ["parse_record", "parse_line_list"] {
        let Ok(entries) = std::fs::read_dir(corpus.join(target)) else {
            continue;
        };
        for entry in entries {
            let bytes = std::fs::read(entry.unwrap().path()).unwrap();
            let _ = parse_record_bytes(&bytes);
            if let Ok(text) = std::str::from_utf8(&bytes) {
                let _ = LineList::from_par_str(text);
            }
            seen += 1;
        }
    }
    assert!(seen > 0, "no corpus seeds under {}", corpus.display());
}
