//! Versioned reference data and its re-verification.
//!
//! Files live under `fixtures/v1/` and are embedded at build time; `MANIFEST.sha256` pins their
//! contents.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qarith::exactnum::parse_rational;
use qarith::{make_field, QuadElement, QuadField};

use crate::curves::{count_points_mod_p, verify_point, CurveSystem, HyperellipticModel};
use crate::dynamics::preperiodic_points;
use crate::portraits::{embedded_rows, verify_row, Catalogue};

pub const FILES: &[(&str, &str)] = &[
    ("catalogue_rows.json", include_str!("../fixtures/v1/catalogue_rows.json")),
    ("aux_curves.json", include_str!("../fixtures/v1/aux_curves.json")),
    ("curve_points.json", include_str!("../fixtures/v1/curve_points.json")),
    ("known_pairs.json", include_str!("../fixtures/v1/known_pairs.json")),
    ("modular_models.json", include_str!("../fixtures/v1/modular_models.json")),
];

pub const MANIFEST: &str = include_str!("../fixtures/v1/MANIFEST.sha256");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    CatalogueRow,
    CurvePoint,
    KnownPair,
    ModularModel,
}

#[derive(Debug, Clone, Deserialize)]
pub struct FpCount {
    pub p: u64,
    pub count: u64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct BoundData {
    pub method: String,
    pub d: u32,
    pub value: i64,
    pub tightened: i64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct AuxCurve {
    pub anchor: String,
    /// Leading coefficient first.
    pub model: Vec<i64>,
    pub scale: String,
    pub rank: Option<u32>,
    pub fp: Option<FpCount>,
    pub bound: Option<BoundData>,
    pub points: Vec<[String; 2]>,
}

impl AuxCurve {
    pub fn model(&self) -> HyperellipticModel {
        HyperellipticModel::from_desc(&self.model).twisted(parse_rational(&self.scale).expect("scale"))
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct CurvePoint {
    pub anchor: String,
    /// A parameterized family label.
    pub system: String,
    pub field: i64,
    pub point: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct FieldPoint {
    pub field: i64,
    pub point: [String; 2],
}

#[derive(Debug, Clone, Deserialize)]
pub struct ModularModel {
    pub anchor: String,
    pub model: Vec<i64>,
    pub j: i64,
    pub c: i64,
    pub w: i64,
    pub q: i64,
    pub points: Vec<FieldPoint>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct KnownPair {
    pub anchor: String,
    pub label: String,
    pub field: i64,
    pub c: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct KnownCount {
    pub label: String,
    pub known: usize,
    pub upper_bound: usize,
}

#[derive(Debug, Clone, Deserialize)]
pub struct KnownPairs {
    pub pairs: Vec<KnownPair>,
    pub table: Vec<KnownCount>,
}

fn file(name: &str) -> &'static str {
    FILES.iter().find(|f| f.0 == name).map(|f| f.1).expect("embedded fixture")
}

pub fn aux_curves() -> Vec<AuxCurve> {
    serde_json::from_str(file("aux_curves.json")).expect("aux curves parse")
}

pub fn aux_curve(anchor: &str) -> Option<AuxCurve> {
    aux_curves().into_iter().find(|a| a.anchor == anchor)
}

pub fn curve_points() -> Vec<CurvePoint> {
    serde_json::from_str(file("curve_points.json")).expect("curve points parse")
}

pub fn modular_models() -> Vec<ModularModel> {
    serde_json::from_str(file("modular_models.json")).expect("modular models parse")
}

pub fn known_pairs() -> KnownPairs {
    serde_json::from_str(file("known_pairs.json")).expect("known pairs parse")
}

/// Files whose digest differs from the manifest.
pub fn manifest_mismatches() -> Vec<String> {
    let mut bad = Vec::new();
    for (name, body) in FILES {
        let digest = format!("{:x}", Sha256::digest(body.as_bytes()));
        let listed = MANIFEST.lines().find_map(|l| {
            let (h, n) = l.split_once("  ")?;
            (n.trim() == *name).then(|| h.to_string())
        });
        if listed.as_deref() != Some(digest.as_str()) {
            bad.push(name.to_string());
        }
    }
    bad
}

#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub anchor: String,
    pub kind: Kind,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub entries: Vec<Entry>,
    pub manifest_ok: bool,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.manifest_ok && self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> Vec<&Entry> {
        self.entries.iter().filter(|e| !e.pass).collect()
    }
}

fn entry(anchor: String, kind: Kind, r: Result<String, String>) -> Entry {
    match r {
        Ok(detail) => Entry { anchor, kind, pass: true, detail },
        Err(detail) => Entry { anchor, kind, pass: false, detail },
    }
}

fn parse_in(k: &QuadField, s: &str) -> Result<QuadElement, String> {
    k.parse(s).map_err(|e| e.to_string())
}

/// Every sign pattern on the coordinates after x, and the Galois conjugate, must satisfy the system.
fn check_curve_point(cp: &CurvePoint) -> Result<String, String> {
    let sys = CurveSystem::family(&cp.system).ok_or_else(|| format!("no system {}", cp.system))?;
    let k = make_field(cp.field).map_err(|e| e.to_string())?;
    let pt: Vec<QuadElement> = cp.point.iter().map(|s| parse_in(&k, s)).collect::<Result<_, _>>()?;
    let n = pt.len() - 1;
    for conj in [false, true] {
        for mask in 0..1u32 << n {
            let q: Vec<QuadElement> = pt
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let v = if conj { v.conj() } else { v.clone() };
                    if i > 0 && mask >> (i - 1) & 1 == 1 {
                        -v
                    } else {
                        v
                    }
                })
                .collect();
            if !verify_point(&sys, &q) {
                return Err(format!("fails with signs {mask:b}, conjugate {conj}"));
            }
        }
    }
    // c at the point, where the family map is defined there
    let coords: Vec<(String, QuadElement)> =
        ["x", "y", "z"].iter().zip(&pt).map(|(n, v)| (n.to_string(), v.clone())).collect();
    let c = crate::param::family(&cp.system)
        .ok()
        .and_then(|f| f.at_point(&coords).ok())
        .map(|i| format!(", c = {}", i.c))
        .unwrap_or_default();
    Ok(format!("{} sign patterns{c}", 2u32 << n))
}

fn check_aux(a: &AuxCurve) -> Result<String, String> {
    let m = a.model();
    if !m.is_squarefree() {
        return Err("model is singular".into());
    }
    let k = make_field(-1).unwrap();
    for [x, y] in &a.points {
        let (x, y) = (parse_in(&k, x)?, parse_in(&k, y)?);
        if !verify_point(&CurveSystem::single(m.clone()), &[x.clone(), y.clone()]) {
            return Err(format!("({x}, {y}) is not on the curve"));
        }
    }
    let mut detail = format!("{} rational points, genus {}", a.points.len(), m.genus());
    if let Some(fp) = &a.fp {
        let n = count_points_mod_p(&m, fp.p).map_err(|e| e.to_string())?;
        if n != fp.count {
            return Err(format!("#X(F_{}) = {n}, listed {}", fp.p, fp.count));
        }
        detail += &format!(", #X(F_{}) = {n}", fp.p);
    }
    Ok(detail)
}

fn check_modular(m: &ModularModel) -> Result<String, String> {
    let q = crate::curves::nonobvious_count(m.j, m.c, m.w).map_err(|e| e.to_string())?;
    if q != m.q {
        return Err(format!("q = {q}, listed {}", m.q));
    }
    let model = HyperellipticModel::from_desc(&m.model);
    for fp in &m.points {
        let k = make_field(fp.field).map_err(|e| e.to_string())?;
        let (x, y) = (parse_in(&k, &fp.point[0])?, parse_in(&k, &fp.point[1])?);
        if !model.on_curve(&x, &y) {
            return Err(format!("({x}, {y}) is not on the curve"));
        }
    }
    if m.points.len() as i64 != q {
        return Err(format!("{} points listed, q = {q}", m.points.len()));
    }
    Ok(format!("q = {q}, {} points", m.points.len()))
}

fn check_pair(p: &KnownPair, cat: &Catalogue) -> Result<String, String> {
    let k = make_field(p.field).map_err(|e| e.to_string())?;
    let c = k.from_rational(parse_rational(&p.c).map_err(|e| e.to_string())?);
    let pre = preperiodic_points(&c);
    let label = cat.label_portrait(&pre.portrait()).to_string();
    if label != p.label {
        return Err(format!("portrait {label}"));
    }
    Ok(format!("{} points", pre.len()))
}

fn check_table(t: &KnownCount, pairs: &[KnownPair]) -> Result<String, String> {
    let n = pairs.iter().filter(|p| p.label == t.label).count();
    if n != t.known || t.known > t.upper_bound {
        return Err(format!("{n} pairs present, table says {} of at most {}", t.known, t.upper_bound));
    }
    Ok(format!("{n} of at most {}", t.upper_bound))
}

pub fn catalogue_anchor(label: &str, field: i64) -> String {
    format!("catalogue:{label}@{field}")
}

/// Re-verifies every fixture; failures are report entries.
pub fn verify_all_fixtures() -> Report {
    let cat = Catalogue::embedded();
    let known = known_pairs();
    let mut jobs: Vec<Box<dyn Fn() -> Entry + Send + Sync>> = Vec::new();
    for row in embedded_rows() {
        jobs.push(Box::new(move || {
            let r = verify_row(&row).map(|pre| format!("{} points", pre.len())).map_err(|e| e.to_string());
            entry(catalogue_anchor(&row.label, row.field), Kind::CatalogueRow, r)
        }));
    }
    for cp in curve_points() {
        jobs.push(Box::new(move || entry(cp.anchor.clone(), Kind::CurvePoint, check_curve_point(&cp))));
    }
    for a in aux_curves() {
        jobs.push(Box::new(move || entry(a.anchor.clone(), Kind::CurvePoint, check_aux(&a))));
    }
    for m in modular_models() {
        jobs.push(Box::new(move || entry(m.anchor.clone(), Kind::ModularModel, check_modular(&m))));
    }
    for p in known.pairs.clone() {
        let cat = cat.clone();
        jobs.push(Box::new(move || entry(p.anchor.clone(), Kind::KnownPair, check_pair(&p, &cat))));
    }
    for t in known.table.clone() {
        let pairs = known.pairs.clone();
        jobs.push(Box::new(move || entry(format!("table:{}", t.label), Kind::KnownPair, check_table(&t, &pairs))));
    }
    let entries = jobs.par_iter().map(|j| j()).collect();
    Report { entries, manifest_ok: manifest_mismatches().is_empty() }
}
