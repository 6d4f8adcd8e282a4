use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("cannot parse rational from {0:?}")]
    BadRational(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// H(p/q) = max(|p|, q) for p/q in lowest terms.
pub fn rational_height(x: &BigRational) -> BigInt {
    let n = x.numer().abs();
    let d = x.denom().clone();
    if n > d {
        n
    } else {
        d
    }
}

pub fn fmt_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, ParseError> {
    let t = s.trim();
    let bad = || ParseError::BadRational(s.to_string());
    match t.split_once('/') {
        None => t.parse::<BigInt>().map(BigRational::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(ParseError::ZeroDenominator(s.to_string()));
            }
            Ok(BigRational::new(n, d))
        }
    }
}

pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative());
    n.sqrt()
}

pub fn exact_sqrt_int(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// Square root of a nonnegative rational when it is rational.
pub fn exact_sqrt(x: &BigRational) -> Option<BigRational> {
    let n = exact_sqrt_int(x.numer())?;
    let d = exact_sqrt_int(x.denom())?;
    Some(BigRational::new(n, d))
}

pub fn to_f64(x: &BigRational) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // fall back to scaling huge numerators and denominators
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let shift_n = (nb - 60).max(0);
    let shift_d = (db - 60).max(0);
    let n = (x.numer() >> shift_n as usize).to_f64().unwrap_or(0.0);
    let d = (x.denom() >> shift_d as usize).to_f64().unwrap_or(1.0);
    n / d * 2f64.powi((shift_n - shift_d) as i32)
}

/// The real number p + q·√r with r ≥ 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Surd {
    pub p: BigRational,
    pub q: BigRational,
    pub r: BigRational,
}

impl Surd {
    pub fn new(p: BigRational, q: BigRational, r: BigRational) -> Surd {
        assert!(!r.is_negative(), "negative radicand");
        if q.is_zero() || r.is_zero() {
            return Surd::rational(p);
        }
        if let Some(s) = exact_sqrt(&r) {
            return Surd::rational(p + q * s);
        }
        Surd { p, q, r }
    }

    pub fn rational(p: BigRational) -> Surd {
        Surd { p, q: BigRational::zero(), r: BigRational::zero() }
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.p) + to_f64(&self.q) * to_f64(&self.r).sqrt()
    }

    pub fn neg(&self) -> Surd {
        Surd { p: -&self.p, q: -&self.q, r: self.r.clone() }
    }

    pub fn scale(&self, m: &BigRational) -> Surd {
        Surd::new(&self.p * m, &self.q * m, self.r.clone())
    }

    pub fn square(&self) -> Surd {
        let p = &self.p * &self.p + &self.q * &self.q * &self.r;
        let q = BigRational::from_integer(BigInt::from(2)) * &self.p * &self.q;
        Surd::new(p, q, self.r.clone())
    }

    pub fn sign(&self) -> i32 {
        sign_radical_sum(&[(self.p.clone(), BigRational::one()), (self.q.clone(), self.r.clone())])
    }

    pub fn terms(&self) -> Vec<(BigRational, BigRational)> {
        vec![(self.p.clone(), BigRational::one()), (self.q.clone(), self.r.clone())]
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", fmt_rational(&self.p))
        } else {
            let q = fmt_rational(&self.q);
            let sep = if self.q.is_negative() { "" } else { "+" };
            write!(f, "{}{}{}*sqrt({})", fmt_rational(&self.p), sep, q, fmt_rational(&self.r))
        }
    }
}

/// Exact sign of a − b.
pub fn compare_surd(a: &Surd, b: &Surd) -> Ordering {
    let mut t = a.terms();
    t.extend(b.neg().terms());
    match sign_radical_sum(&t) {
        -1 => Ordering::Less,
        0 => Ordering::Equal,
        _ => Ordering::Greater,
    }
}

// c·√r with r rewritten as an integer radicand; perfect squares fold to rationals.
fn normalize(terms: &[(BigRational, BigRational)]) -> Vec<(BigRational, BigInt)> {
    let mut out: Vec<(BigRational, BigInt)> = Vec::new();
    let mut rational = BigRational::zero();
    for (c, r) in terms {
        assert!(!r.is_negative(), "negative radicand");
        if c.is_zero() || r.is_zero() {
            continue;
        }
        let rad = r.numer() * r.denom();
        let coef = c / BigRational::from_integer(r.denom().clone());
        if let Some(s) = exact_sqrt_int(&rad) {
            rational += coef * BigRational::from_integer(s);
            continue;
        }
        match out.iter_mut().find(|(_, k)| *k == rad) {
            Some(slot) => slot.0 += coef,
            None => out.push((coef, rad)),
        }
    }
    out.retain(|(c, _)| !c.is_zero());
    if !rational.is_zero() {
        out.insert(0, (rational, BigInt::one()));
    }
    out
}

fn float_sign(terms: &[(BigRational, BigInt)]) -> Option<i32> {
    let mut sum = 0.0f64;
    let mut mag = 0.0f64;
    for (c, r) in terms {
        let v = to_f64(c) * r.to_f64()?.sqrt();
        if !v.is_finite() {
            return None;
        }
        sum += v;
        mag += v.abs();
    }
    if sum.abs() > mag * 1e-9 {
        Some(if sum > 0.0 { 1 } else { -1 })
    } else {
        None
    }
}

/// Exact sign of Σ cᵢ·√rᵢ for at most four distinct radicals.
pub fn sign_radical_sum(terms: &[(BigRational, BigRational)]) -> i32 {
    let t = normalize(terms);
    sign_normalized(&t)
}

fn sign_normalized(t: &[(BigRational, BigInt)]) -> i32 {
    match t.len() {
        0 => return 0,
        1 => return sign_of(&t[0].0),
        _ => {}
    }
    if let Some(s) = float_sign(t) {
        return s;
    }
    assert!(t.len() <= 4, "too many radicals for exact sign");
    let mid = t.len() / 2;
    let (l, r) = t.split_at(mid);
    let sl = sign_normalized(l);
    let sr = sign_normalized(r);
    if sl == 0 || sr == 0 || sl == sr {
        return if sl != 0 { sl } else { sr };
    }
    // opposite signs: the side with the larger square wins
    let mut diff = square_terms(l);
    for (c, k) in square_terms(r) {
        diff.push((-c, k));
    }
    let d = sign_radical_sum(&diff);
    match d {
        0 => 0,
        1 => sl,
        _ => sr,
    }
}

fn square_terms(t: &[(BigRational, BigInt)]) -> Vec<(BigRational, BigRational)> {
    let two = BigRational::from_integer(BigInt::from(2));
    let mut out = Vec::new();
    for i in 0..t.len() {
        let (ci, ki) = &t[i];
        out.push((ci * ci * BigRational::from_integer(ki.clone()), BigRational::one()));
        for (cj, kj) in &t[i + 1..] {
            out.push((&two * ci * cj, BigRational::from_integer(ki * kj)));
        }
    }
    out
}

fn sign_of(x: &BigRational) -> i32 {
    match x.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

pub fn sign_rat(x: &BigRational) -> i32 {
    sign_of(x)
}

/// Exponent of the prime p in the integer n (n ≠ 0).
pub fn ord_p_int(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut k = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return k;
        }
        m = q;
        k += 1;
    }
}

pub fn ord_p_rat(x: &BigRational, p: u64) -> i64 {
    ord_p_int(x.numer(), p) as i64 - ord_p_int(x.denom(), p) as i64
}

/// Prime factors of |n| by trial division, ascending.
pub fn prime_factors(n: &BigInt) -> Vec<u64> {
    let mut m = n.abs();
    let mut out = Vec::new();
    if m.is_zero() {
        return out;
    }
    let mut p: u64 = 2;
    while BigInt::from(p) * BigInt::from(p) <= m {
        let pb = BigInt::from(p);
        if (&m % &pb).is_zero() {
            out.push(p);
            while (&m % &pb).is_zero() {
                m /= &pb;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > BigInt::one() {
        out.push(m.to_u64().expect("prime factor beyond u64"));
    }
    out
}

/// Squarefree kernel of a nonzero integer, sign kept.
pub fn squarefree_kernel(n: &BigInt) -> BigInt {
    assert!(!n.is_zero());
    let mut k = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    for p in prime_factors(n) {
        if ord_p_int(n, p) % 2 == 1 {
            k *= BigInt::from(p);
        }
    }
    k
}

/// Squarefree kernel of a nonzero rational (kernel of numerator·denominator).
pub fn squarefree_kernel_rat(x: &BigRational) -> BigInt {
    squarefree_kernel(&(x.numer() * x.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: BigRational, q: BigRational, r: i64) -> Surd {
        Surd::new(p, q, int(r))
    }

    #[test]
    fn heights_of_rationals() {
        assert_eq!(rational_height(&rat(3, 7)), BigInt::from(7));
        assert_eq!(rational_height(&int(0)), BigInt::from(1));
        assert_eq!(rational_height(&rat(-5, 3)), BigInt::from(5));
    }

    #[test]
    fn surd_comparisons() {
        let sqrt2 = s(int(0), int(1), 2);
        assert_eq!(compare_surd(&sqrt2, &Surd::rational(rat(3, 2))), Ordering::Less);
        let phi = s(rat(1, 2), rat(1, 2), 5);
        assert_eq!(compare_surd(&phi, &Surd::rational(rat(8, 5))), Ordering::Greater);
        let four = s(int(0), int(1), 4);
        assert!(four.is_rational());
        assert_eq!(compare_surd(&four, &Surd::rational(int(2))), Ordering::Equal);
    }

    #[test]
    fn near_ties_resolved_exactly() {
        // convergents of √2: p² − 2q² = ±1 decides the side
        let sqrt2 = s(int(0), int(1), 2);
        assert_eq!(compare_surd(&sqrt2, &Surd::rational(rat(99, 70))), Ordering::Less);
        assert_eq!(compare_surd(&sqrt2, &Surd::rational(rat(239, 169))), Ordering::Greater);
        assert_eq!(compare_surd(&sqrt2, &Surd::rational(rat(5741, 4059))), Ordering::Less);
        let big = BigRational::new(
            "1572584048032918633353217".parse().unwrap(),
            "1111984844349868137938112".parse().unwrap(),
        );
        assert_eq!(compare_surd(&sqrt2, &Surd::rational(big)), Ordering::Less);
    }

    #[test]
    fn four_radical_sum() {
        // √2 + √3 − √5 − √(10)/... check a genuine zero: √8 − 2√2 = 0
        let t = vec![(int(1), int(8)), (int(-2), int(2))];
        assert_eq!(sign_radical_sum(&t), 0);
        // √2 + √3 vs √5 + 0.3
        let t = vec![(int(1), int(2)), (int(1), int(3)), (int(-1), int(5)), (rat(-3, 10), int(1))];
        assert_eq!(sign_radical_sum(&t), 1);
        // (1+√5)/2 squared equals (3+√5)/2
        let phi = s(rat(1, 2), rat(1, 2), 5);
        assert_eq!(phi.square(), s(rat(3, 2), rat(1, 2), 5));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("-301/144").unwrap(), rat(-301, 144));
        assert_eq!(fmt_rational(&rat(6, 3)), "2");
        assert_eq!(fmt_rational(&rat(-1, 4)), "-1/4");
        assert!(parse_rational("1/0").is_err());
        assert_eq!(s(int(1), int(-2), 3).to_string(), "1-2*sqrt(3)");
    }

    #[test]
    fn kernels() {
        assert_eq!(squarefree_kernel(&BigInt::from(12)), BigInt::from(3));
        assert_eq!(squarefree_kernel(&BigInt::from(-1820)), BigInt::from(-455));
        assert_eq!(prime_factors(&BigInt::from(720)), vec![2, 3, 5]);
    }
}
