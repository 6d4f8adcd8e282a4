use std::collections::BTreeSet;

use preper::fixtures::*;
use preper::portraits::{embedded_rows, Catalogue};

#[test]
fn every_fixture_verifies() {
    let report = verify_all_fixtures();
    let bad: Vec<String> = report.failures().iter().map(|e| format!("{}: {}", e.anchor, e.detail)).collect();
    assert!(report.all_pass(), "{bad:#?}");
    let find = |a: &str| report.entries.iter().find(|e| e.anchor == a).unwrap_or_else(|| panic!("{a}"));
    assert_eq!(find("catalogue:14(2,1,1)@17").detail, "14 points");
    assert!(find("modular:X1(16)").pass);
    assert_eq!(find("table:12(2)").detail, "2 of at most 6");
    assert_eq!(find("table:12(4,2)").detail, "1 of at most 2");
}

#[test]
fn coverage() {
    let rows: BTreeSet<String> = embedded_rows().into_iter().map(|r| r.label).collect();
    for e in &Catalogue::embedded().entries {
        assert!(rows.contains(&e.label), "{} has no row", e.label);
    }
    let systems: BTreeSet<String> = curve_points().into_iter().map(|c| c.system).collect();
    for label in ["10(1,1)a", "12(2)", "12(2,1,1)a", "12(4,2)", "14(2,1,1)", "14(3,1,1)", "14(3,2)"] {
        assert!(systems.contains(label), "{label}");
    }
}
