//! PrePer(f_c, K) for f_c(z) = z² + c, the batch survey, and the small classifications.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use num_integer::Integer;
use qarith::enumerate::{
    quadratic_integers_of_bounded_abs_height, raw_elements_with_heights, root_in_field, RawElement,
};
use qarith::exactnum::{compare_surd, exact_sqrt_int, isqrt};
use qarith::heights::height_bound_holds_with;
use qarith::{make_field, relative_height, HeightValue, QuadElement, QuadField, Surd};

use crate::localtests::{quick_admissible, ParamData, Verdict};
use crate::portraits::{Catalogue, Portrait};

/// The finite K-rational preperiodic points of z² + c, with the map restricted to them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreperSet {
    pub c: QuadElement,
    /// Sorted by (a, b).
    pub points: Vec<QuadElement>,
    /// successor[i] is the index of points[i]² + c.
    pub successor: Vec<usize>,
}

impl PreperSet {
    pub fn from_points(c: &QuadElement, mut points: Vec<QuadElement>) -> PreperSet {
        points.sort();
        points.dedup();
        let successor = points
            .iter()
            .map(|p| {
                let q = p.f(c);
                points.binary_search(&q).expect("set not closed under f")
            })
            .collect();
        PreperSet { c: c.clone(), points, successor }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &QuadElement) -> bool {
        self.points.binary_search(p).is_ok()
    }

    pub fn portrait(&self) -> Portrait {
        Portrait { succ: self.successor.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    /// Distinct iterates P, f(P), f²(P), …
    pub points: Vec<QuadElement>,
    /// True when the next iterate repeats an earlier one.
    pub repeated: bool,
}

pub fn orbit(p: &QuadElement, c: &QuadElement, max_steps: usize) -> Orbit {
    let mut seen = HashSet::new();
    let mut points = vec![p.clone()];
    seen.insert(p.clone());
    for _ in 0..max_steps {
        let q = points.last().unwrap().f(c);
        if seen.contains(&q) {
            return Orbit { points, repeated: true };
        }
        seen.insert(q.clone());
        points.push(q);
    }
    Orbit { points, repeated: false }
}

// Radius beyond which an embedding escapes, padded for f64 error.
fn escape_radius(sc: f64) -> f64 {
    0.5 + (0.25 + sc.abs()).sqrt() + 1e-6
}

// Integer coordinates (u, v) of the lattice points x = (u + vω)/m inside the padded escape box.
fn box_points(c: &QuadElement, m: f64) -> Vec<(i64, i64)> {
    let k = c.field();
    let disc = k.disc() as f64;
    let (e1, _) = k.omega_poly();
    let mut out = Vec::new();
    if k.is_real() {
        let emb = c.real_embeddings();
        let r1 = escape_radius(emb[0].to_f64());
        let r2 = escape_radius(emb[1].to_f64());
        let sd = disc.sqrt();
        // ω's real conjugates: roots of t² + e1·t + e0
        let (w1, w2) = (((-e1 as f64) + sd) / 2.0, ((-e1 as f64) - sd) / 2.0);
        let vmax = (m * (r1 + r2) / sd).floor() as i64 + 1;
        for v in -vmax..=vmax {
            let vf = v as f64;
            let lo = (-m * r1 - vf * w1).max(-m * r2 - vf * w2).floor() as i64 - 1;
            let hi = (m * r1 - vf * w1).min(m * r2 - vf * w2).ceil() as i64 + 1;
            out.extend((lo..=hi).map(|u| (u, v)));
        }
    } else {
        let (re, im) = c.approx();
        let r = escape_radius((re * re + im * im).sqrt());
        let im_w = (-disc).sqrt() / 2.0;
        let re_w = -(e1 as f64) / 2.0;
        let vmax = (m * r / im_w).floor() as i64 + 1;
        for v in -vmax..=vmax {
            let vf = v as f64;
            let lo = (-m * r - vf * re_w).floor() as i64 - 1;
            let hi = (m * r - vf * re_w).ceil() as i64 + 1;
            out.extend((lo..=hi).map(|u| (u, v)));
        }
    }
    out
}

fn lattice_point(k: &QuadField, u: i64, v: i64, m: &BigInt) -> QuadElement {
    k.from_coords(BigRational::new(BigInt::from(u), m.clone()), BigRational::new(BigInt::from(v), m.clone()))
}

/// Every x = (u + vω)/m, m the forced denominator, whose archimedean sizes fit the escape radii.
pub fn lattice_candidates(pd: &ParamData) -> Vec<QuadElement> {
    let k = pd.c.field();
    let m = pd.point_denominator();
    box_points(&pd.c, m.to_f64().unwrap())
        .into_iter()
        .map(|(u, v)| lattice_point(&k, u, v, &m))
        .collect()
}

/// PrePer computed as the points of the candidate lattice box whose orbit never leaves the box.
///
/// Every preperiodic point lies in the box, so this is exact; it skips the local tests and runs in
/// machine integers. None when the coordinates could overflow.
pub fn lattice_closure(pd: &ParamData) -> Option<PreperSet> {
    let k = pd.c.field();
    let m_big = pd.point_denominator();
    let m = m_big.to_i64()? as i128;
    let (cu, cv, cm) = pd.c.integral_parts();
    let (cu, cv, cm) = (cu.to_i64()? as i128, cv.to_i64()? as i128, cm.to_i64()? as i128);
    let (e1, e0) = k.omega_poly();
    let (e1, e0) = (e1 as i128, e0 as i128);
    let pts = box_points(&pd.c, m as f64);
    let lim = pts.iter().map(|&(u, v)| u.unsigned_abs().max(v.unsigned_abs())).max().unwrap_or(0) as i128;
    // |u|,|v| ≤ lim: the numerators below stay far from i128::MAX
    if lim > 1 << 28 || cm > 1 << 28 || m > 1 << 28 {
        return None;
    }
    let index: HashMap<(i64, i64), usize> = pts.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let den = m * cm;
    let succ: Vec<Option<usize>> = pts
        .iter()
        .map(|&(u, v)| {
            let (u, v) = (u as i128, v as i128);
            // m·(x² + c) with x = (u + vω)/m and ω² = −e1·ω − e0
            let n1 = (u * u - e0 * v * v) * cm + m * m * cu;
            let n2 = (2 * u * v - e1 * v * v) * cm + m * m * cv;
            if n1 % den != 0 || n2 % den != 0 {
                return None;
            }
            let (a, b) = (i64::try_from(n1 / den).ok()?, i64::try_from(n2 / den).ok()?);
            index.get(&(a, b)).copied()
        })
        .collect();
    // 0 unknown, 1 on the current path, 2 preperiodic, 3 escapes
    let mut state = vec![0u8; pts.len()];
    let mut path = Vec::new();
    for start in 0..pts.len() {
        let mut i = start;
        let verdict = loop {
            match state[i] {
                0 => {
                    state[i] = 1;
                    path.push(i);
                    match succ[i] {
                        Some(j) => i = j,
                        None => break 3,
                    }
                }
                1 => break 2,
                s => break s,
            }
        };
        for j in path.drain(..) {
            state[j] = verdict;
        }
    }
    let points = (0..pts.len())
        .filter(|&i| state[i] == 2)
        .map(|i| lattice_point(&k, pts[i].0, pts[i].1, &m_big))
        .collect();
    Some(PreperSet::from_points(&pd.c, points))
}

/// The worklist loop over height-sorted MAYBE points; returns the confirmed preperiodic ones.
pub fn classify_candidates(c: &QuadElement, maybe: &[QuadElement]) -> Vec<QuadElement> {
    let pending_set: HashSet<&QuadElement> = maybe.iter().collect();
    let mut removed: HashSet<QuadElement> = HashSet::new();
    let mut yes: HashSet<QuadElement> = HashSet::new();
    for p in maybe {
        if removed.contains(p) {
            continue;
        }
        let mut iter = vec![p.clone()];
        let mut q = p.f(c);
        loop {
            if yes.contains(&q) || iter.contains(&q) {
                for x in &iter {
                    yes.insert(x.clone());
                    removed.insert(x.clone());
                }
                break;
            }
            if !pending_set.contains(&q) || removed.contains(&q) {
                removed.extend(iter);
                break;
            }
            let next = q.f(c);
            iter.push(q);
            q = next;
        }
    }
    yes.into_iter().collect()
}

fn height_sorted(mut v: Vec<(QuadElement, HeightValue)>) -> Vec<QuadElement> {
    v.sort_by(|x, y| x.1.cmp(&y.1).then_with(|| x.0.cmp(&y.0)));
    v.into_iter().map(|(e, _)| e).collect()
}

fn preper_with(pd: &ParamData) -> PreperSet {
    let hc = relative_height(&pd.c);
    let maybe: Vec<(QuadElement, HeightValue)> = lattice_candidates(pd)
        .into_iter()
        .filter(|p| pd.test(p) == Verdict::Maybe)
        .filter_map(|p| {
            let h = relative_height(&p);
            height_bound_holds_with(&h, &hc).then_some((p, h))
        })
        .collect();
    let maybe = height_sorted(maybe);
    PreperSet::from_points(&pd.c, classify_candidates(&pd.c, &maybe))
}

/// PrePer(f_c, K) \ {∞}.
pub fn preperiodic_points(c: &QuadElement) -> PreperSet {
    preper_with(&ParamData::new(c))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyRecord {
    pub field: String,
    pub c: String,
    pub points: Vec<String>,
    pub label: String,
    pub count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveySummary {
    pub parameters: usize,
    pub inadmissible: usize,
    pub empty: usize,
    pub nonempty: usize,
}

#[derive(Debug, Clone)]
pub struct SurveyOutcome {
    pub records: Vec<SurveyRecord>,
    pub summary: SurveySummary,
}

/// The parameters of a survey in canonical order: H_K(c) ≤ B sorted by height, then the
/// rational c with B < H_K(c) ≤ B' sorted by (height, value).
pub fn survey_parameters(k: &QuadField, b: &BigRational, rational: Option<&BigRational>) -> Vec<RawElement> {
    let mut all: Vec<RawElement> = raw_elements_with_heights(k, b).into_iter().map(|(r, _)| r).collect();
    if let Some(rb) = rational {
        // H_K(c) = H(c)² for rational c
        let lo = isqrt(&b.floor().to_integer()).to_i64().unwrap();
        let hi = isqrt(&rb.floor().to_integer()).to_i64().unwrap();
        let mut extra = Vec::new();
        for q in 1..=hi {
            for p in 0..=hi {
                let h = p.max(q);
                if h > lo && p.gcd(&q) == 1 {
                    extra.push((h, -p, q));
                    if p != 0 {
                        extra.push((h, p, q));
                    }
                }
            }
        }
        extra.sort_by(|x, y| x.0.cmp(&y.0).then_with(|| (x.1 as i128 * y.2 as i128).cmp(&(y.1 as i128 * x.2 as i128))));
        all.extend(extra.into_iter().map(|(_, p, q)| RawElement::Rational { p, q }));
    }
    all
}

pub fn survey_record(pre: &PreperSet, catalogue: &Catalogue) -> SurveyRecord {
    let label = catalogue.label_portrait(&pre.portrait());
    SurveyRecord {
        field: pre.c.field().to_string(),
        c: pre.c.to_string(),
        points: pre.points.iter().map(|p| p.to_string()).collect(),
        label: label.to_string(),
        count: pre.len(),
    }
}

/// PrePer for every admissible parameter; records for the nonempty ones, in parameter order.
pub fn survey(
    k: &QuadField,
    b: &BigRational,
    rational: Option<&BigRational>,
    catalogue: &Catalogue,
) -> SurveyOutcome {
    let params = survey_parameters(k, b, rational);
    let results: Vec<Option<Option<SurveyRecord>>> = params
        .par_iter()
        .map(|raw| {
            if !quick_admissible(k, raw) {
                return None;
            }
            let pd = ParamData::new(&raw.to_element(k));
            if !pd.admissible() {
                return None;
            }
            let pre = lattice_closure(&pd).unwrap_or_else(|| preper_with(&pd));
            Some((!pre.is_empty()).then(|| survey_record(&pre, catalogue)))
        })
        .collect();
    let mut summary = SurveySummary { parameters: params.len(), ..Default::default() };
    let mut records = Vec::new();
    for r in results {
        match r {
            None => summary.inadmissible += 1,
            Some(None) => summary.empty += 1,
            Some(Some(rec)) => {
                summary.nonempty += 1;
                records.push(rec);
            }
        }
    }
    SurveyOutcome { records, summary }
}

/// A parameter that is either rational or generates a quadratic field.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum AlgebraicParam {
    Rational(BigRational),
    Quadratic(QuadElement),
}

impl std::fmt::Display for AlgebraicParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AlgebraicParam::Rational(r) => write!(f, "{}", qarith::exactnum::fmt_rational(r)),
            AlgebraicParam::Quadratic(x) => write!(f, "{} in {}", x, x.field()),
        }
    }
}

// 2.29² as an exact rational; H(fⁿ(0)) ≤ φ·H(c)^{1/2} < 2.29 once H(c) ≤ 2
fn pcf_iterate_bound() -> Surd {
    Surd::rational(BigRational::new(BigInt::from(52441), BigInt::from(10000)))
}

fn passes_iterate_heights(c: &QuadElement) -> bool {
    let bound = pcf_iterate_bound();
    let mut z = c.field().from_int(0);
    for _ in 0..5 {
        z = z.f(c);
        if compare_surd(&relative_height(&z).to_surd(), &bound) != Ordering::Less {
            return false;
        }
    }
    true
}

/// Post-critically finite c of degree ≤ 2 over Q.
pub fn classify_pcf_parameters() -> Vec<AlgebraicParam> {
    let mut out = Vec::new();
    // rational PCF c are integers with |c| ≤ 2; any field carries them
    let carrier = make_field(-1).unwrap();
    for n in -2..=2i64 {
        let c = carrier.from_int(n);
        if passes_iterate_heights(&c) && orbit(&carrier.from_int(0), &c, 16).repeated {
            out.push(AlgebraicParam::Rational(BigRational::from_integer(BigInt::from(n))));
        }
    }
    let two = BigRational::from_integer(BigInt::from(2));
    for (a1, a0) in quadratic_integers_of_bounded_abs_height(&two) {
        let k = make_field(a1 * a1 - 4 * a0).unwrap();
        let r = root_in_field(&k, a1, a0);
        for c in [r.clone(), r.conj()] {
            if passes_iterate_heights(&c) && orbit(&k.from_int(0), &c, 16).repeated {
                out.push(AlgebraicParam::Quadratic(c));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Fields where z² + 1/4 (the only c with a single fixed point) gains extra preperiodic points.
/// Keys are field names plus "otherwise"; values are portrait labels.
pub fn unique_fixed_point_portraits(catalogue: &Catalogue) -> BTreeMap<String, String> {
    // A preperiodic P for c = 1/4 has 2P integral and |σ(P)| ≤ 1/2 + √(1/2), so 2P is a
    // root of t² + a₁t + a₀ with |a₁| ≤ 4 and |a₀| ≤ 5.
    let mut fields: BTreeSet<i64> = BTreeSet::new();
    for a1 in -4..=4i64 {
        for a0 in -5..=5i64 {
            let disc = a1 * a1 - 4 * a0;
            if disc >= 0 && exact_sqrt_int(&BigInt::from(disc)).is_some() {
                continue;
            }
            fields.insert(make_field(disc).unwrap().d);
        }
    }
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    let generic = {
        let k = make_field(7).unwrap();
        let pre = preperiodic_points(&k.from_rational(quarter.clone()));
        catalogue.label_portrait(&pre.portrait()).to_string()
    };
    let mut out = BTreeMap::new();
    for d in fields {
        let k = make_field(d).unwrap();
        let pre = preperiodic_points(&k.from_rational(quarter.clone()));
        let label = catalogue.label_portrait(&pre.portrait()).to_string();
        if label != generic {
            out.insert(k.to_string(), label);
        }
    }
    out.insert("otherwise".to_string(), generic);
    out
}

/// Linear interpolation of the per-field height bound over |Δ| in [1, max_disc].
pub fn height_schedule(disc_abs: u64, max_disc: u64, lo: u64, hi: u64) -> BigRational {
    if max_disc <= 1 || lo == hi {
        return BigRational::from_integer(BigInt::from(lo));
    }
    let t = BigRational::new(BigInt::from(disc_abs.saturating_sub(1)), BigInt::from(max_disc - 1));
    let t = if t > BigRational::one() { BigRational::one() } else { t };
    let span = BigRational::from_integer(BigInt::from(hi as i64 - lo as i64));
    (BigRational::from_integer(BigInt::from(lo)) + span * t).floor()
}
