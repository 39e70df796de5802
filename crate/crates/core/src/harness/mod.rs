//! Verification harness: construction specs, named checks, manifests,
//! deterministic reports and plots.

pub mod checks;
pub mod construct;
pub mod manifest;
pub mod svg;

pub use checks::{run_check, split_check, validate_check, Outcome, Series, CHECK_NAMES};
pub use construct::{two_squares, two_squares_instance, Builder, Built, ConstructionSpec, SlitFamily};
pub use manifest::{
    fmt_f64, judge, merge_reports, parse_f64, rows_to_csv, run_entry, run_on, sample_spec, verify, Entry, Expected, Mode,
    Report, Row, VerifyManifest,
};
pub use svg::loglog_svg;

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(construction: &str, check: &str, expected: Expected, mode: Mode) -> Entry {
        Entry {
            construction: construction.into(),
            check: check.into(),
            expected,
            mode,
            tolerance: 0.0,
            paper_ref: "slit count".into(),
            provenance: "elementary".into(),
            samples: None,
            r_min: None,
            r_max: None,
        }
    }

    #[test]
    fn spec_round_trip() {
        for text in [
            "square(5)",
            "Q(2,7)",
            "carpet(1,6)",
            "Qinf(6)",
            "corner(3,1,7)",
            "circles(6;0.25,0.3,0.1;0.7,0.3,0.12)",
            "circle(64)",
            "ellipse(64,1,0.5)",
            "filled(Q(2,7))",
            "twosquares(2)",
        ] {
            let spec: ConstructionSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
            assert_eq!(spec.to_string().parse::<ConstructionSpec>().unwrap(), spec);
        }
        for bad in ["Q", "Q(1,2,3)", "nope(1)", "Q(x,1)"] {
            assert!(matches!(bad.parse::<ConstructionSpec>(), Err(crate::Error::Usage(_))), "{bad}");
        }
    }

    #[test]
    fn empty_manifest_gives_empty_report() {
        let m = VerifyManifest::from_json(r#"{"seed": 3}"#).unwrap();
        let rep = verify(&m, &Builder::new(None)).unwrap();
        assert!(rep.rows.is_empty() && rep.all_pass());
        assert_eq!(rep.to_csv().unwrap().lines().count(), 1);
    }

    #[test]
    fn manifest_usage_errors() {
        let unknown = r#"{"entries":[{"construction":"Q(1,4)","check":"bogus","expected":1,"mode":"ratio"}]}"#;
        assert!(matches!(VerifyManifest::from_json(unknown), Err(crate::Error::Usage(_))));
        let mismatch = r#"{"entries":[{"construction":"Q(1,4)","check":"slits","expected":true,"mode":"ratio"}]}"#;
        assert!(matches!(VerifyManifest::from_json(mismatch), Err(crate::Error::Usage(_))));
        assert!(matches!(VerifyManifest::from_json("{"), Err(crate::Error::Usage(_))));
    }

    #[test]
    fn slit_count_entries() {
        let m = VerifyManifest {
            seed: 1,
            entries: vec![
                entry("Q(1,4)", "slits", Expected::Value(1.0), Mode::Absolute),
                entry("Q(2)", "slits", Expected::Value(5.0), Mode::Ratio),
                entry("Q(2)", "slits", Expected::Interval(Some(6.0), None), Mode::Absolute),
            ],
        };
        let rep = verify(&m, &Builder::new(None)).unwrap();
        let pass: Vec<&str> = rep.rows.iter().map(|r| r.pass.as_str()).collect();
        assert_eq!(rep.rows.len(), 3);
        assert_eq!(pass.iter().filter(|p| **p == "pass").count(), 2, "{:?}", rep.rows);
        assert!(!rep.all_pass());
    }

    #[test]
    fn judge_modes() {
        assert!(judge(&Expected::Value(2.0), Mode::Ratio, 0.15, 2.2, true));
        assert!(!judge(&Expected::Value(2.0), Mode::Ratio, 0.15, 1.0, true));
        assert!(judge(&Expected::Interval(None, Some(1.0)), Mode::Ratio, 0.0, 1.0, true));
        assert!(judge(&Expected::Flag(false), Mode::Flag, 0.0, 0.0, false));
        assert!(!judge(&Expected::Value(1.0), Mode::Absolute, 0.1, f64::NAN, true));
    }

    #[test]
    fn entry_seeds_are_distinct_and_stable() {
        let m = VerifyManifest { seed: 7, entries: Vec::new() };
        let seeds: Vec<u64> = (0..8).map(|i| m.entry_seed(i)).collect();
        let mut uniq = seeds.clone();
        uniq.sort();
        uniq.dedup();
        assert_eq!(uniq.len(), 8);
        assert_eq!(seeds, (0..8).map(|i| m.entry_seed(i)).collect::<Vec<_>>());
    }

    #[test]
    fn merge_dedups_and_rejects_conflicts() {
        let m = VerifyManifest { seed: 1, entries: vec![entry("Q(2)", "slits", Expected::Value(5.0), Mode::Ratio)] };
        let rep = verify(&m, &Builder::new(None)).unwrap();
        let merged = merge_reports(&[rep.clone(), rep.clone()]).unwrap();
        assert_eq!(merged, rep);
        let mut other = rep.clone();
        other.rows[0].value = 4.0;
        assert!(matches!(merge_reports(&[rep.clone(), other]), Err(crate::Error::Usage(_))));
        let back = Report::from_json(&rep.to_json().unwrap()).unwrap();
        assert_eq!(back, rep);
    }

    #[test]
    fn svg_has_slope_annotation() {
        let s = Series {
            construction: "Q(1,6)".into(),
            check: "ahlfors:2".into(),
            seed: 0,
            radii: vec![0.0625, 0.125, 0.25],
            masses: vec![0.004, 0.016, 0.064],
            slope: 2.0,
        };
        let svg = loglog_svg(&s);
        assert!(svg.starts_with("<svg") && svg.contains("slope = 2.0000") && svg.trim_end().ends_with("</svg>"));
    }
}
