mod common;

use proptest::prelude::*;

use common::props::*;
use preper::dynamics::lattice_closure;
use preper::localtests::ParamData;
use preper::portraits::{embedded_rows, verify_row};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn local_tests_are_sound(case in soundness_case()) {
        local_tests_sound(case)?;
    }

    #[test]
    fn canonical_form_ignores_vertex_order(case in relabelled_portrait()) {
        canonical_form_invariant(case)?;
    }

    #[test]
    fn height_is_symmetric(x in field_and_element()) {
        height_symmetry(x)?;
    }

    #[test]
    fn valuations_add(xy in element_pair(), p in prop::sample::select(vec![2u64, 3, 5, 7, 11])) {
        valuation_additivity(xy, p)?;
    }
}

#[test]
fn enumeration_matches_oracle() {
    for (d, b) in ENUMERATION_CASES {
        enumeration_matches(d, b).unwrap();
    }
}

#[test]
fn closure_matches_pipeline_on_catalogue_rows() {
    for row in embedded_rows() {
        let pre = verify_row(&row).unwrap();
        let pd = ParamData::new(&pre.c);
        assert_eq!(lattice_closure(&pd).unwrap().points, pre.points, "{}", row.label);
    }
}
