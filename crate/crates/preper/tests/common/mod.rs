//! Direct-iteration oracle for preperiodic points, independent of the local tests and of the
//! lattice search.
#![allow(dead_code)]

pub mod props;

use std::collections::HashMap;

use qarith::enumerate::raw_elements_with_heights;
use qarith::{BigRational, QuadElement, QuadField};


/// φ²·√h, the largest H_K(P) a preperiodic P can have when H_K(c) = h.
pub fn point_height_bound(hc: f64) -> f64 {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    phi * phi * hc.sqrt()
}

/// An element with its f64 height and its complex embeddings as (re, im).
pub type Entry = (QuadElement, f64, [(f64, f64); 2]);

/// Elements of K with H_K ≤ b, height-sorted, with f64 heights for prefix cuts.
pub struct Pool {
    pub elems: Vec<Entry>,
    height: HashMap<QuadElement, f64>,
}

impl Pool {
    pub fn new(k: QuadField, b: i64) -> Pool {
        let elems = raw_elements_with_heights(&k, &BigRational::from_integer(b.into()))
            .into_iter()
            .map(|(r, h)| {
                let e = r.to_element(&k);
                let emb = embeddings(&e);
                (e, h.to_f64(), emb)
            })
            .collect::<Vec<_>>();
        let height = elems.iter().map(|(e, h, _)| (e.clone(), *h)).collect();
        Pool { elems, height }
    }

    /// Points of height ≤ bound (with slack; a superset is harmless).
    pub fn upto(&self, bound: f64) -> &[Entry] {
        let n = self.elems.partition_point(|e| e.1 <= slack(bound));
        &self.elems[..n]
    }

    fn within(&self, x: &QuadElement, bound: f64) -> bool {
        self.height.get(x).is_some_and(|h| *h <= slack(bound))
    }

    /// PrePer(z² + c) by iteration: the pool up to the point height bound contains every
    /// preperiodic point, so an orbit that leaves it is not preperiodic.
    pub fn preper_by_iteration(&self, c: &QuadElement, hc: f64) -> Vec<QuadElement> {
        let bound = point_height_bound(hc);
        let ce = embeddings(c);
        let mut out: Vec<QuadElement> = self
            .upto(bound)
            .iter()
            .filter(|(_, _, emb)| !escapes(*emb, ce))
            .filter(|(p, _, _)| {
                let mut seen = vec![p.clone()];
                let mut z = p.f(c);
                loop {
                    if seen.contains(&z) {
                        return true;
                    }
                    if !self.within(&z, bound) {
                        return false;
                    }
                    let next = z.f(c);
                    seen.push(z);
                    z = next;
                }
            })
            .map(|(p, _, _)| p.clone())
            .collect();
        out.sort();
        out
    }
}

fn slack(b: f64) -> f64 {
    b * (1.0 + 1e-9) + 1e-9
}

/// Both complex embeddings as (re, im).
pub fn embeddings(x: &QuadElement) -> [(f64, f64); 2] {
    let k = x.field();
    // x = a + b√d
    let (a, b) = (to_f64(&x.a), to_f64(&x.b));
    let s = (k.d.abs() as f64).sqrt();
    if k.d > 0 {
        [(a + b * s, 0.0), (a - b * s, 0.0)]
    } else {
        [(a, b * s), (a, -b * s)]
    }
}

fn to_f64(r: &BigRational) -> f64 {
    qarith::exactnum::to_f64(r)
}

/// Whether P escapes to infinity under z² + c in some embedding, decided in floating point with a
/// margin: |z| > 1/2 + √(1/4 + |c|) forces |f(z)| > |z| and divergence. Only a few steps, so
/// rounding error cannot reach the margin; later escapes are left to exact iteration.
fn escapes(p: [(f64, f64); 2], c: [(f64, f64); 2]) -> bool {
    for s in 0..2 {
        let (cr, ci) = c[s];
        let r = 0.5 + (0.25 + (cr * cr + ci * ci).sqrt()).sqrt();
        let lim = r * (1.0 + 1e-6) + 1e-6;
        let (mut zr, mut zi) = p[s];
        for _ in 0..4 {
            if (zr * zr + zi * zi).sqrt() > lim {
                return true;
            }
            let nr = zr * zr - zi * zi + cr;
            zi = 2.0 * zr * zi + ci;
            zr = nr;
        }
    }
    false
}
