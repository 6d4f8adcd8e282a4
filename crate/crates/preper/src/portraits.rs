//! Canonical forms and labels for preperiodic portraits, and the reference catalogue.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use qarith::{make_field, QuadElement};

use crate::dynamics::{preperiodic_points, PreperSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PortraitError {
    #[error("malformed portrait: {0}")]
    MalformedPortrait(String),
    #[error("catalogue row {label} over Q(sqrt({field})): {detail}")]
    CatalogueMismatch { label: String, field: i64, detail: String },
}

/// A finite functional digraph: vertex i maps to succ[i].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Portrait {
    pub succ: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalForm(pub String);

impl Portrait {
    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    fn validate(&self) -> Result<(), PortraitError> {
        let n = self.succ.len();
        if let Some(i) = self.succ.iter().position(|&s| s >= n) {
            return Err(PortraitError::MalformedPortrait(format!(
                "vertex {i} maps to {} outside 0..{n}",
                self.succ[i]
            )));
        }
        Ok(())
    }

    /// The vertices of every cycle, each cycle listed in map order.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.succ.len();
        // 0 unseen, 1 on current walk, 2 done
        let mut state = vec![0u8; n];
        let mut out = Vec::new();
        for start in 0..n {
            let mut walk = Vec::new();
            let mut v = start;
            while state[v] == 0 {
                state[v] = 1;
                walk.push(v);
                v = self.succ[v];
            }
            if state[v] == 1 {
                let pos = walk.iter().position(|&w| w == v).unwrap();
                out.push(walk[pos..].to_vec());
            }
            for w in walk {
                state[w] = 2;
            }
        }
        out
    }

    /// Cycle lengths, nonincreasing.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let mut l: Vec<usize> = self.cycles().iter().map(|c| c.len()).collect();
        l.sort_by(|a, b| b.cmp(a));
        l
    }

    pub fn base_label(&self) -> String {
        if self.is_empty() {
            return "0".to_string();
        }
        let l: Vec<String> = self.cycle_lengths().iter().map(|x| x.to_string()).collect();
        format!("{}({})", self.len(), l.join(","))
    }

    pub fn to_dot(&self, names: Option<&[String]>) -> String {
        let name = |i: usize| match names {
            Some(ns) => ns[i].clone(),
            None => i.to_string(),
        };
        let mut s = String::from("digraph portrait {\n");
        for (i, &j) in self.succ.iter().enumerate() {
            s.push_str(&format!("  \"{}\" -> \"{}\";\n", name(i), name(j)));
        }
        s.push_str("}\n");
        s
    }
}

pub fn canonicalize(g: &Portrait) -> Result<CanonicalForm, PortraitError> {
    g.validate()?;
    let n = g.len();
    let cycles = g.cycles();
    let mut on_cycle = vec![false; n];
    for c in &cycles {
        for &v in c {
            on_cycle[v] = true;
        }
    }
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, &w) in g.succ.iter().enumerate() {
        if !on_cycle[v] {
            children[w].push(v);
        }
    }
    // AHU codes; the forest hanging off the cycles is acyclic so recursion terminates
    fn code(v: usize, children: &[Vec<usize>], memo: &mut Vec<Option<String>>) -> String {
        if let Some(s) = &memo[v] {
            return s.clone();
        }
        let mut kids: Vec<String> = children[v].iter().map(|&c| code(c, children, memo)).collect();
        kids.sort();
        let s = format!("({})", kids.concat());
        memo[v] = Some(s.clone());
        s
    }
    let mut memo = vec![None; n];
    let mut comps: Vec<(usize, String)> = cycles
        .iter()
        .map(|cyc| {
            let codes: Vec<String> = cyc.iter().map(|&v| code(v, &children, &mut memo)).collect();
            let best = (0..codes.len())
                .map(|r| {
                    let mut rot = codes[r..].to_vec();
                    rot.extend_from_slice(&codes[..r]);
                    rot
                })
                .min()
                .unwrap();
            (cyc.len(), best.join(","))
        })
        .collect();
    comps.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    let parts: Vec<String> = comps.iter().map(|(l, s)| format!("{l}:{s}")).collect();
    Ok(CanonicalForm(parts.join("|")))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Label {
    pub base: String,
    pub letter: Option<char>,
    /// The form is not in the catalogue.
    pub novel: bool,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)?;
        if let Some(c) = self.letter {
            write!(f, "{c}")?;
        }
        if self.novel {
            write!(f, "*")?;
        }
        Ok(())
    }
}

/// One reference row: a field Q(√D), ω's minimal polynomial t² + e1·t + e0, c, and one point
/// from each ± pair of PrePer, written in terms of g = ω.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogueRow {
    pub label: String,
    pub field: i64,
    pub g_poly: [i64; 2],
    pub c: String,
    pub points: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct CatalogueEntry {
    pub label: String,
    pub form: CanonicalForm,
    pub vertices: usize,
}

#[derive(Debug, Clone)]
pub struct Catalogue {
    pub entries: Vec<CatalogueEntry>,
    by_form: HashMap<CanonicalForm, usize>,
}

pub const CATALOGUE_ROWS: &str = include_str!("../fixtures/v1/catalogue_rows.json");

pub fn embedded_rows() -> Vec<CatalogueRow> {
    serde_json::from_str(CATALOGUE_ROWS).expect("embedded catalogue rows parse")
}

fn split_label(label: &str) -> (String, Option<char>) {
    match label.chars().last() {
        Some(ch) if ch.is_ascii_lowercase() => (label[..label.len() - 1].to_string(), Some(ch)),
        _ => (label.to_string(), None),
    }
}

fn mismatch(row: &CatalogueRow, detail: String) -> PortraitError {
    PortraitError::CatalogueMismatch { label: row.label.clone(), field: row.field, detail }
}

/// Parse a row and recompute its PrePer; the row's ± expanded point set must match exactly.
pub fn verify_row(row: &CatalogueRow) -> Result<PreperSet, PortraitError> {
    let k = make_field(row.field).map_err(|e| mismatch(row, e.to_string()))?;
    let g = k.omega();
    let [e1, e0] = row.g_poly;
    let check = &(&g.square() + &g.scale(&qarith::exactnum::int(e1))) + &k.from_int(e0);
    if !check.is_zero() {
        return Err(mismatch(row, "g is not a root of the stated polynomial".into()));
    }
    let parse = |s: &str| k.parse_with(s, &g).map_err(|e| mismatch(row, e.to_string()));
    let c = parse(&row.c)?;
    let mut expected: Vec<QuadElement> = Vec::new();
    for s in &row.points {
        let p = parse(s)?;
        expected.push(-&p);
        expected.push(p);
    }
    expected.sort();
    expected.dedup();
    let pre = preperiodic_points(&c);
    if pre.points != expected {
        return Err(mismatch(
            row,
            format!("expected {} points, recomputed {}", expected.len(), pre.len()),
        ));
    }
    let base = pre.portrait().base_label();
    if split_label(&row.label).0 != base {
        return Err(mismatch(row, format!("recomputed base label {base}")));
    }
    Ok(pre)
}

pub fn build_catalogue(rows: &[CatalogueRow]) -> Result<Catalogue, PortraitError> {
    let mut by_label: BTreeMap<String, CatalogueEntry> = BTreeMap::new();
    for row in rows {
        let pre = verify_row(row)?;
        let form = canonicalize(&pre.portrait())?;
        match by_label.get(&row.label) {
            Some(e) if e.form != form => {
                return Err(mismatch(row, "two rows with one label have different portraits".into()))
            }
            Some(_) => {}
            None => {
                let entry = CatalogueEntry { label: row.label.clone(), form, vertices: pre.len() };
                by_label.insert(row.label.clone(), entry);
            }
        }
    }
    let entries: Vec<CatalogueEntry> = by_label.into_values().collect();
    let mut by_form = HashMap::new();
    for (i, e) in entries.iter().enumerate() {
        if let Some(j) = by_form.insert(e.form.clone(), i) {
            return Err(PortraitError::CatalogueMismatch {
                label: e.label.clone(),
                field: 0,
                detail: format!("same portrait as {}", entries[j].label),
            });
        }
    }
    // letters only where a base is shared
    let mut per_base: BTreeMap<String, Vec<Option<char>>> = BTreeMap::new();
    for e in &entries {
        let (b, l) = split_label(&e.label);
        per_base.entry(b).or_default().push(l);
    }
    for (b, ls) in per_base {
        let lettered = ls.iter().all(|l| l.is_some());
        if (ls.len() > 1) != lettered {
            return Err(PortraitError::CatalogueMismatch {
                label: b,
                field: 0,
                detail: "letter suffixes inconsistent with the number of forms".into(),
            });
        }
    }
    Ok(Catalogue { entries, by_form })
}

impl Catalogue {
    /// The catalogue built from the embedded rows, computed once per process.
    pub fn embedded() -> &'static Catalogue {
        static CAT: OnceLock<Catalogue> = OnceLock::new();
        CAT.get_or_init(|| build_catalogue(&embedded_rows()).expect("embedded catalogue verifies"))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn label_portrait(&self, g: &Portrait) -> Label {
        let base = g.base_label();
        let form = match canonicalize(g) {
            Ok(f) => f,
            Err(_) => return Label { base, letter: None, novel: true },
        };
        match self.by_form.get(&form) {
            Some(&i) => {
                let (b, letter) = split_label(&self.entries[i].label);
                debug_assert_eq!(b, base);
                Label { base: b, letter, novel: false }
            }
            None => Label { base, letter: None, novel: true },
        }
    }

    pub fn form_of(&self, label: &str) -> Option<&CanonicalForm> {
        self.entries.iter().find(|e| e.label == label).map(|e| &e.form)
    }

    /// Whether g has a sub-portrait (closed under the map) isomorphic to the named entry.
    pub fn contains_type(&self, g: &Portrait, label: &str) -> bool {
        let Some(target) = self.form_of(label) else { return false };
        closed_subsets_match(g, target)
    }
}

// Searches the closed subsets of size = target size; portraits here have ≤ 14 vertices.
fn closed_subsets_match(g: &Portrait, target: &CanonicalForm) -> bool {
    let n = g.len();
    if n > 20 {
        return false;
    }
    let want: usize = target
        .0
        .split('|')
        .filter(|s| !s.is_empty())
        .map(|s| s.matches('(').count())
        .sum();
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != want {
            continue;
        }
        let closed = (0..n).all(|v| mask & (1 << v) == 0 || mask & (1 << g.succ[v]) != 0);
        if !closed {
            continue;
        }
        let verts: Vec<usize> = (0..n).filter(|v| mask & (1 << v) != 0).collect();
        let idx: HashMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let sub = Portrait { succ: verts.iter().map(|v| idx[&g.succ[*v]]).collect() };
        if canonicalize(&sub).map(|f| &f == target).unwrap_or(false) {
            return true;
        }
    }
    false
}
