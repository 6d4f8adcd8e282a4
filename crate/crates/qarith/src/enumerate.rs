use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::exactnum::{exact_sqrt_int, rational_height, Surd};
use crate::heights::{relative_height, HeightValue};
use crate::quadfield::{make_field, QuadElement, QuadField};

fn floor_i64(b: &BigRational) -> i64 {
    b.floor().to_integer().to_i64().expect("bound too large")
}

/// All x ∈ Q with H(x) ≤ B, sorted by (height, value).
pub fn rationals_of_bounded_height(b: &BigRational) -> Vec<BigRational> {
    let n = floor_i64(b);
    let mut out = Vec::new();
    if n < 1 {
        return out;
    }
    out.push(BigRational::from_integer(BigInt::from(0)));
    for q in 1..=n {
        for p in 1..=n {
            if p.gcd(&q) == 1 {
                let x = BigRational::new(BigInt::from(p), BigInt::from(q));
                out.push(-x.clone());
                out.push(x);
            }
        }
    }
    out.sort_by(|x, y| rational_height(x).cmp(&rational_height(y)).then(x.cmp(y)));
    out
}

fn isqrt_floor(n: i128) -> i128 {
    if n <= 0 {
        return 0;
    }
    
    (n as u128).sqrt() as i128
}

fn isqrt_ceil(n: i128) -> i128 {
    if n <= 0 {
        return 0;
    }
    let r = isqrt_floor(n);
    if r * r == n {
        r
    } else {
        r + 1
    }
}

// roots of x² ≡ t (mod m), indexed by t
fn sqrt_table(m: i128) -> Vec<Vec<i128>> {
    let mut tab = vec![Vec::new(); m as usize];
    for x in 0..m {
        tab[((x * x) % m) as usize].push(x);
    }
    tab
}

/// Primitive minimal polynomials A t² + B t + C (A > 0) with discriminant D·f² and
/// |A|, |C| ≤ n, |B| ≤ 2n; the box containing every quadratic x ∈ K with H_K(x) ≤ n.
pub fn minimal_polynomial_box(k: &QuadField, n: i64) -> Vec<(i64, i64, i64, i64)> {
    let d = k.d as i128;
    let n = n as i128;
    let mut out = Vec::new();
    for a in 1..=n {
        let m = 4 * a;
        let tab = sqrt_table(m);
        let mut f: i128 = 1;
        loop {
            let df2 = d * f * f;
            let (lo, hi) = if d > 0 {
                if df2 > 4 * n * n + 4 * a * n {
                    break;
                }
                ((df2 - 4 * a * n).max(0), (df2 + 4 * a * n).min(4 * n * n))
            } else {
                if -df2 > 4 * a * n {
                    break;
                }
                (0, (4 * a * n + df2).min(4 * n * n))
            };
            if lo <= hi {
                let blo = isqrt_ceil(lo);
                let bhi = isqrt_floor(hi);
                let t = df2.rem_euclid(m) as usize;
                for &r in &tab[t] {
                    // nonnegative B ≡ r mod 4A in [blo, bhi]; negatives by symmetry
                    let mut b = blo + (r - blo).rem_euclid(m);
                    while b <= bhi {
                        let c = (b * b - df2) / m;
                        if c != 0 && c.abs() <= n && a.gcd(&b).gcd(&c) == 1 {
                            out.push((a as i64, b as i64, c as i64, f as i64));
                            if b != 0 {
                                out.push((a as i64, -b as i64, c as i64, f as i64));
                            }
                        }
                        b += m;
                    }
                }
            }
            f += 1;
        }
    }
    out
}

/// Sign of p + q√d for integers, d > 0 not a square.
pub fn sign_int_surd(p: i128, q: i128, d: i128) -> i32 {
    let (sp, sq) = (p.signum() as i32, q.signum() as i32);
    if sq == 0 || sp == sq {
        return if sp == 0 { sq } else { sp };
    }
    if sp == 0 {
        return sq;
    }
    match (p * p).cmp(&(q * q * d)) {
        Ordering::Greater => sp,
        Ordering::Less => sq,
        Ordering::Equal => 0,
    }
}

/// A height (p + q√D)/2 with small integers, for the root of a polynomial with leading
/// coefficient a (q = 0 for integer heights).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RawHeight {
    pub p: i64,
    pub q: i64,
    pub a: i64,
    pub d: i64,
}

impl RawHeight {
    fn integer(n: i64) -> RawHeight {
        RawHeight { p: 2 * n, q: 0, a: 1, d: 1 }
    }

    pub fn to_f64(&self) -> f64 {
        (self.p as f64 + self.q as f64 * (self.d as f64).sqrt()) / 2.0
    }

    pub fn to_height_value(&self) -> HeightValue {
        if self.q == 0 {
            return HeightValue::integer(BigInt::from(self.p / 2));
        }
        // H = a·|root| with |root| = (p + q√D)/(2a)
        let den = BigInt::from(2 * self.a);
        HeightValue {
            m: BigInt::from(self.a),
            s: Surd {
                p: BigRational::new(BigInt::from(self.p), den.clone()),
                q: BigRational::new(BigInt::from(self.q), den),
                r: BigRational::from_integer(BigInt::from(self.d)),
            },
        }
    }

    fn cmp_exact(&self, other: &RawHeight) -> Ordering {
        let d = if self.q != 0 { self.d } else { other.d };
        match sign_int_surd((self.p - other.p) as i128, (self.q - other.q) as i128, d as i128) {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        }
    }
}

// H_K of either root of the primitive A t² + B t + C with discriminant D f², when ≤ n.
// Equals relative_height of the roots, computed in machine integers.
// `ns` bounds the irrational heights and must be ≥ the true bound.
fn box_height(k: &QuadField, a: i64, b: i64, c: i64, f: i64, n: i64, ns: i64) -> Option<RawHeight> {
    if k.d < 0 {
        let h = a.max(c.abs());
        return (h <= n).then(|| RawHeight::integer(h));
    }
    let (a, b, f, ns, d) = (a as i128, b as i128, f as i128, ns as i128, k.d as i128);
    // root numerators −B ± f√D; |root| > 1 iff |numerator| > 2A
    let outside = |s: i128| sign_int_surd(-b - 2 * a, s * f, d) > 0 || sign_int_surd(-b + 2 * a, s * f, d) < 0;
    let h = match (outside(1), outside(-1)) {
        (true, true) => c.abs(),
        (false, false) => a as i64,
        (o, _) => {
            let s = if o { 1 } else { -1 };
            // H = |−B + s f√D|/2
            if sign_int_surd(-b - 2 * ns, s * f, d) > 0 || sign_int_surd(-b + 2 * ns, s * f, d) < 0 {
                return None;
            }
            let sg = sign_int_surd(-b, s * f, d) as i128;
            return Some(RawHeight { p: (-b * sg) as i64, q: (s * f * sg) as i64, a: a as i64, d: d as i64 });
        }
    };
    (h <= n).then(|| RawHeight::integer(h))
}

/// An enumerated element before conversion: x = p/q, or x = (−B + f√D)/(2A) for the
/// primitive minimal polynomial A t² + B t + C (f carries the sign).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RawElement {
    Rational { p: i64, q: i64 },
    Quadratic { a: i64, b: i64, c: i64, f: i64 },
}

impl RawElement {
    pub fn to_element(&self, k: &QuadField) -> QuadElement {
        match *self {
            RawElement::Rational { p, q } => k.from_rational(BigRational::new(BigInt::from(p), BigInt::from(q))),
            RawElement::Quadratic { a, b, f, .. } => {
                let den = BigInt::from(2 * a);
                k.elem(
                    BigRational::new(BigInt::from(-b), den.clone()),
                    BigRational::new(BigInt::from(f), den),
                )
            }
        }
    }

    // (a-coordinate, b-coordinate) as (numerator, denominator) pairs
    fn coords(&self) -> ((i128, i128), (i128, i128)) {
        match *self {
            RawElement::Rational { p, q } => ((p as i128, q as i128), (0, 1)),
            RawElement::Quadratic { a, b, f, .. } => {
                let den = 2 * a as i128;
                ((-(b as i128), den), (f as i128, den))
            }
        }
    }
}

fn frac_cmp(x: (i128, i128), y: (i128, i128)) -> Ordering {
    (x.0 * y.1).cmp(&(y.0 * x.1))
}

fn sort_by_height(v: &mut [(RawElement, RawHeight)]) {
    v.sort_by(|(ex, hx), (ey, hy)| {
        let (x, y) = (hx.to_f64(), hy.to_f64());
        let close = (x - y).abs() <= 1e-9 * x.abs().max(y.abs());
        let by_h = if close { hx.cmp_exact(hy) } else { x.partial_cmp(&y).unwrap() };
        by_h.then_with(|| {
            let (a1, b1) = ex.coords();
            let (a2, b2) = ey.coords();
            frac_cmp(a1, a2).then_with(|| frac_cmp(b1, b2))
        })
    });
}

/// As [`elements_with_heights`], before conversion to field elements.
pub fn raw_elements_with_heights(k: &QuadField, b: &BigRational) -> Vec<(RawElement, RawHeight)> {
    let n = floor_i64(b);
    if n < 1 {
        return Vec::new();
    }
    let r = n.sqrt();
    let mut out = vec![(RawElement::Rational { p: 0, q: 1 }, RawHeight::integer(1))];
    for q in 1..=r {
        for p in 1..=r {
            if p.gcd(&q) == 1 {
                let h = RawHeight::integer(p.max(q) * p.max(q));
                out.push((RawElement::Rational { p, q }, h));
                out.push((RawElement::Rational { p: -p, q }, h));
            }
        }
    }
    let exact = b.is_integer();
    let ns = b.ceil().to_integer().to_i64().unwrap();
    for (a, bb, c, f) in minimal_polynomial_box(k, n) {
        let Some(h) = box_height(k, a, bb, c, f, n, ns) else { continue };
        if !exact && !h.to_height_value().le_rational(b) {
            continue;
        }
        // conjugates share the height
        out.push((RawElement::Quadratic { a, b: bb, c, f: -f }, h));
        out.push((RawElement::Quadratic { a, b: bb, c, f }, h));
    }
    sort_by_height(&mut out);
    out
}

/// All x ∈ K with H_K(x) ≤ B together with their heights, sorted by (H_K, a, b).
pub fn elements_with_heights(k: &QuadField, b: &BigRational) -> Vec<(QuadElement, HeightValue)> {
    raw_elements_with_heights(k, b).into_iter().map(|(r, h)| (r.to_element(k), h.to_height_value())).collect()
}

pub fn elements_of_bounded_height(k: &QuadField, b: &BigRational) -> Vec<QuadElement> {
    elements_with_heights(k, b).into_iter().map(|(e, _)| e).collect()
}

/// Monic irreducible t² + a₁t + a₀ with |a₀| ≤ B², |a₁| ≤ 2B² whose roots have absolute height ≤ B.
pub fn quadratic_integers_of_bounded_abs_height(b: &BigRational) -> Vec<(i64, i64)> {
    let b2 = b * b;
    let n = floor_i64(&b2);
    let mut out = Vec::new();
    for a1 in -2 * n..=2 * n {
        for a0 in -n..=n {
            let disc = a1 * a1 - 4 * a0;
            if disc >= 0 && exact_sqrt_int(&BigInt::from(disc)).is_some() {
                continue;
            }
            let k = make_field(disc).unwrap();
            let x = root_in_field(&k, a1, a0);
            // H(x)² = H_K(x) for quadratic x
            if relative_height(&x).le_rational(&b2) {
                out.push((a1, a0));
            }
        }
    }
    out
}

/// The root (−a₁ + √(a₁² − 4a₀))/2 expressed in Q(√D).
pub fn root_in_field(k: &QuadField, a1: i64, a0: i64) -> QuadElement {
    let disc = a1 * a1 - 4 * a0;
    let m2 = disc / k.d;
    let m = exact_sqrt_int(&BigInt::from(m2)).expect("discriminant not in field");
    k.elem(
        BigRational::new(BigInt::from(-a1), BigInt::from(2)),
        BigRational::new(m, BigInt::from(2)),
    )
}

pub fn height_order(x: &HeightValue, y: &HeightValue) -> Ordering {
    x.cmp(y)
}
