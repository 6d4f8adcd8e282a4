//! Property checks shared by the proptest suites and the acceptance run.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::sync::{Mutex, OnceLock};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use preper::dynamics::{lattice_closure, preperiodic_points};
use preper::localtests::{preperiodicity_test, ParamData, Verdict};
use preper::portraits::{canonicalize, embedded_rows, verify_row, Catalogue, Portrait};
use qarith::enumerate::{elements_of_bounded_height, elements_with_heights};
use qarith::exactnum::{int, ord_p_rat, rat};
use qarith::quadfield::{ord_ideal, primes_above};
use qarith::{make_field, relative_height, QuadElement, QuadField};

use super::{point_height_bound, Pool};

pub const SMALL_DS: [i64; 8] = [-7, -5, -3, -2, -1, 2, 3, 5];
/// Squarefree d with |d| ≤ 15.
pub const DS15: [i64; 18] = [-15, -14, -13, -11, -10, -7, -6, -5, -3, -2, -1, 2, 3, 5, 6, 7, 10, 13];

/// Runs a property with a fixed case count; Err carries the minimal failure.
pub fn run<S: Strategy>(cases: u32, strat: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner.run(&strat, test).map_err(|e| e.to_string())
}

pub fn element(k: QuadField) -> impl Strategy<Value = QuadElement> {
    (-30i64..=30, 1i64..=12, -30i64..=30, 1i64..=12).prop_map(move |(a, b, c, d)| k.elem(rat(a, b), rat(c, d)))
}

pub fn field_and_element() -> impl Strategy<Value = QuadElement> {
    prop::sample::select(SMALL_DS.to_vec()).prop_flat_map(|d| element(make_field(d).unwrap()))
}

pub fn element_pair() -> impl Strategy<Value = (QuadElement, QuadElement)> {
    prop::sample::select(SMALL_DS.to_vec()).prop_flat_map(|d| {
        let k = make_field(d).unwrap();
        (element(k), element(k))
    })
}

/// H_K is invariant under conjugation, negation and inversion (compared by value).
pub fn height_symmetry(x: QuadElement) -> Result<(), TestCaseError> {
    let h = relative_height(&x);
    prop_assert_eq!(relative_height(&x.conj()).cmp(&h), Ordering::Equal);
    prop_assert_eq!(relative_height(&-x.clone()).cmp(&h), Ordering::Equal);
    if !x.is_zero() {
        prop_assert_eq!(relative_height(&x.inv()).cmp(&h), Ordering::Equal);
    }
    Ok(())
}

/// ord_𝔭(xy) = ord_𝔭(x) + ord_𝔭(y), and Σ f_𝔭·ord_𝔭 = ord_p N over the primes above p.
pub fn valuation_additivity((x, y): (QuadElement, QuadElement), p: u64) -> Result<(), TestCaseError> {
    if x.is_zero() || y.is_zero() {
        return Ok(());
    }
    let k = x.field();
    let xy = &x * &y;
    let mut weighted = 0;
    for pr in primes_above(&k, p, 8) {
        let (a, b, c) = (ord_ideal(&x, &pr).unwrap(), ord_ideal(&y, &pr).unwrap(), ord_ideal(&xy, &pr).unwrap());
        prop_assert_eq!(c, a + b);
        weighted += pr.f() * c;
    }
    prop_assert_eq!(weighted, ord_p_rat(&xy.norm(), p));
    Ok(())
}

/// Every x with H_K(x) ≤ B, from coordinate boxes: with A the leading coefficient of the
/// primitive minimal polynomial, x = (u + v√d)/(2A) and H_K(x) ≥ A·|σ(x)|, or A·|x|² when
/// K is imaginary.
pub fn enumeration_oracle(k: QuadField, b: i64) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let d = k.d;
    for a in 1..=b {
        let (ur, vr) = if d > 0 {
            let s = 2 * b;
            (s, (s as f64 / (d as f64).sqrt()).floor() as i64)
        } else {
            let s = 2.0 * ((a * b) as f64).sqrt();
            (s.floor() as i64, (s / (-d as f64).sqrt()).floor() as i64)
        };
        for u in -ur..=ur {
            for v in -vr..=vr {
                let x = k.elem(rat(u, 2 * a), rat(v, 2 * a));
                if relative_height(&x).le_rational(&int(b)) {
                    out.insert(x.to_string());
                }
            }
        }
    }
    out
}

pub const ENUMERATION_CASES: [(i64, i64); 7] = [(5, 20), (-1, 20), (2, 12), (-3, 15), (3, 9), (-7, 11), (13, 6)];

pub fn enumeration_matches(d: i64, b: i64) -> Result<(), String> {
    let k = make_field(d).unwrap();
    let got: BTreeSet<String> = elements_of_bounded_height(&k, &int(b)).iter().map(|x| x.to_string()).collect();
    let want = enumeration_oracle(k, b);
    if got != want {
        return Err(format!("d = {d}, B = {b}: {} enumerated, {} by oracle", got.len(), want.len()));
    }
    Ok(())
}

// per field: parameters with H_K(c) ≤ 50 and an iteration pool covering their preperiodic points
pub struct FieldData {
    pub params: Vec<(QuadElement, f64)>,
    pub pool: Pool,
}

pub fn field_data(d: i64) -> &'static FieldData {
    static CACHE: OnceLock<Mutex<HashMap<i64, &'static FieldData>>> = OnceLock::new();
    let mut m = CACHE.get_or_init(Default::default).lock().unwrap();
    m.entry(d).or_insert_with(|| {
        let k = make_field(d).unwrap();
        let params = elements_with_heights(&k, &int(50)).into_iter().map(|(c, h)| (c, h.to_f64())).collect();
        let pool = Pool::new(k, point_height_bound(50.0).ceil() as i64);
        Box::leak(Box::new(FieldData { params, pool }))
    })
}

pub fn soundness_case() -> impl Strategy<Value = (i64, prop::sample::Index)> {
    (prop::sample::select(DS15.to_vec()), any::<prop::sample::Index>())
}

/// NO is never returned for a preperiodic point, and both PrePer pipelines agree with iteration.
pub fn local_tests_sound((d, ci): (i64, prop::sample::Index)) -> Result<(), TestCaseError> {
    let fd = field_data(d);
    let (c, hc) = &fd.params[ci.index(fd.params.len())];
    let truth = fd.pool.preper_by_iteration(c, *hc);
    for p in &truth {
        prop_assert_eq!(preperiodicity_test(p, c), Verdict::Maybe, "P = {}, c = {}", p, c);
    }
    prop_assert_eq!(&preperiodic_points(c).points, &truth, "c = {}", c);
    let pd = ParamData::new(c);
    if pd.admissible() {
        prop_assert_eq!(&lattice_closure(&pd).unwrap().points, &truth);
    } else {
        prop_assert!(truth.is_empty());
    }
    Ok(())
}

/// A catalogue portrait together with a vertex permutation.
pub fn relabelled_portrait() -> impl Strategy<Value = (usize, Vec<usize>)> {
    let n = embedded_rows().len();
    (0..n).prop_flat_map(|i| {
        let size = verify_row(&embedded_rows()[i]).unwrap().len();
        (Just(i), Just((0..size).collect::<Vec<_>>()).prop_shuffle())
    })
}

pub fn canonical_form_invariant((i, perm): (usize, Vec<usize>)) -> Result<(), TestCaseError> {
    let row = &embedded_rows()[i];
    let g = verify_row(row).unwrap().portrait();
    let mut succ = vec![0; g.len()];
    for v in 0..g.len() {
        succ[perm[v]] = perm[g.succ[v]];
    }
    let h = Portrait { succ };
    prop_assert_eq!(canonicalize(&h).unwrap(), canonicalize(&g).unwrap());
    prop_assert_eq!(Catalogue::embedded().label_portrait(&h).to_string(), row.label.clone());
    Ok(())
}
