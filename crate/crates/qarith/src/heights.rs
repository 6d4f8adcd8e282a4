use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};


use crate::exactnum::{compare_surd, rational_height, sign_radical_sum, Surd};
use crate::quadfield::QuadElement;

/// An exact height m·s, with s = 1 unless the element has one real conjugate inside the unit disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightValue {
    pub m: BigInt,
    pub s: Surd,
}

impl HeightValue {
    pub fn integer(m: BigInt) -> HeightValue {
        HeightValue { m, s: Surd::rational(BigRational::one()) }
    }

    pub fn to_surd(&self) -> Surd {
        self.s.scale(&BigRational::from_integer(self.m.clone()))
    }

    pub fn to_f64(&self) -> f64 {
        self.to_surd().to_f64()
    }

    pub fn is_rational(&self) -> bool {
        self.s.is_rational()
    }

    pub fn le_rational(&self, b: &BigRational) -> bool {
        compare_surd(&self.to_surd(), &Surd::rational(b.clone())) != Ordering::Greater
    }
}

impl PartialOrd for HeightValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeightValue {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        if self.is_rational() && other.is_rational() {
            return self.m.cmp(&other.m);
        }
        compare_surd(&self.to_surd(), &other.to_surd())
    }
}

impl fmt::Display for HeightValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.to_surd())
        } else {
            write!(f, "{}*({})", self.m, self.s)
        }
    }
}

/// Primitive integer minimal polynomial (A, B, C) of a quadratic irrational, A > 0.
pub fn minimal_polynomial(x: &QuadElement) -> (BigInt, BigInt, BigInt) {
    assert!(!x.is_rational());
    let t1 = -x.trace();
    let t0 = x.norm();
    let l = t1.denom().lcm(t0.denom());
    let lr = BigRational::from_integer(l.clone());
    let b = (t1 * &lr).to_integer();
    let c = (t0 * &lr).to_integer();
    let g = l.gcd(&b).gcd(&c);
    (l / &g, b / &g, c / &g)
}

/// H_K(x) for x in a quadratic field K, via the Mahler measure of its minimal polynomial.
pub fn relative_height(x: &QuadElement) -> HeightValue {
    if x.is_rational() {
        let h = rational_height(&x.a);
        return HeightValue::integer(&h * &h);
    }
    let (a, _, c) = minimal_polynomial(x);
    if !x.k.is_real() {
        return HeightValue::integer(if a > c.abs() { a } else { c.abs() });
    }
    let one = Surd::rational(BigRational::one());
    let mags: Vec<Surd> = x
        .real_embeddings()
        .into_iter()
        .map(|s| if s.sign() < 0 { s.neg() } else { s })
        .collect();
    let outside: Vec<bool> = mags.iter().map(|m| compare_surd(m, &one) == Ordering::Greater).collect();
    match (outside[0], outside[1]) {
        (true, true) => HeightValue::integer(c.abs()),
        (false, false) => HeightValue::integer(a),
        (true, false) => HeightValue { m: a, s: mags[0].clone() },
        (false, true) => HeightValue { m: a, s: mags[1].clone() },
    }
}

/// φ⁴ = (7 + 3√5)/2.
pub fn phi4() -> Surd {
    Surd::new(
        BigRational::new(BigInt::from(7), BigInt::from(2)),
        BigRational::new(BigInt::from(3), BigInt::from(2)),
        BigRational::from_integer(BigInt::from(5)),
    )
}

/// H_K(P)² ≤ φ⁴·H_K(c), decided exactly.
pub fn preper_height_bound_holds(p: &QuadElement, c: &QuadElement) -> bool {
    height_bound_holds_with(&relative_height(p), &relative_height(c))
}

pub fn height_bound_holds_with(hp: &HeightValue, hc: &HeightValue) -> bool {
    let lhs = hp.to_surd().square();
    let rhs = hc.to_surd();
    let f = phi4();
    let mut terms = vec![
        (&f.p * &rhs.p, BigRational::one()),
        (&f.q * &rhs.p, f.r.clone()),
        (-&lhs.p, BigRational::one()),
    ];
    if !rhs.q.is_zero() {
        terms.push((&f.p * &rhs.q, rhs.r.clone()));
        terms.push((&f.q * &rhs.q, &f.r * &rhs.r));
    }
    if !lhs.q.is_zero() {
        terms.push((-&lhs.q, lhs.r.clone()));
    }
    sign_radical_sum(&terms) >= 0
}

/// Absolute height squared, H(x)² = H_K(x) for quadratic x and H(x)² for rational x.
pub fn abs_height_squared(x: &QuadElement) -> Surd {
    relative_height(x).to_surd()
}
