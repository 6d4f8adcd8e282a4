use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exactnum::{
    exact_sqrt_int, fmt_rational, ord_p_int, parse_rational, squarefree_kernel, Surd,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("{0} is a perfect square; no quadratic field")]
    PerfectSquareInput(i64),
    #[error("zero has no valuation")]
    ZeroInput,
    #[error("local square test is not valid above 2")]
    EvenResidueCharacteristic,
    #[error("element is not a unit at the prime")]
    NotAUnit,
    #[error("cannot parse field element {0:?}")]
    Parse(String),
}

/// Q(√D) with D squarefree, D ≠ 0, 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadField {
    pub d: i64,
}

pub fn make_field(d: i64) -> Result<QuadField, FieldError> {
    if d >= 0 && exact_sqrt_int(&BigInt::from(d)).is_some() {
        return Err(FieldError::PerfectSquareInput(d));
    }
    let k = squarefree_kernel(&BigInt::from(d)).to_i64().unwrap();
    Ok(QuadField { d: k })
}

impl QuadField {
    pub fn disc(&self) -> i64 {
        if self.d.rem_euclid(4) == 1 {
            self.d
        } else {
            4 * self.d
        }
    }

    pub fn is_real(&self) -> bool {
        self.d > 0
    }

    fn omega_half(&self) -> bool {
        self.d.rem_euclid(4) == 1
    }

    /// ω = (1+√D)/2 or √D.
    pub fn omega(&self) -> QuadElement {
        if self.omega_half() {
            QuadElement::new(*self, half(), half())
        } else {
            QuadElement::new(*self, BigRational::zero(), BigRational::one())
        }
    }

    pub fn sqrt_d(&self) -> QuadElement {
        QuadElement::new(*self, BigRational::zero(), BigRational::one())
    }

    /// Minimal polynomial of ω as t² + e1·t + e0.
    pub fn omega_poly(&self) -> (i64, i64) {
        if self.omega_half() {
            (-1, -(self.d - 1) / 4)
        } else {
            (0, -self.d)
        }
    }

    pub fn elem(&self, a: BigRational, b: BigRational) -> QuadElement {
        QuadElement::new(*self, a, b)
    }

    pub fn from_rational(&self, a: BigRational) -> QuadElement {
        QuadElement::new(*self, a, BigRational::zero())
    }

    pub fn from_int(&self, a: i64) -> QuadElement {
        self.from_rational(BigRational::from_integer(BigInt::from(a)))
    }

    /// Element u + v·ω from integral-basis coordinates.
    pub fn from_coords(&self, u: BigRational, v: BigRational) -> QuadElement {
        if self.omega_half() {
            let vh = &v * half();
            QuadElement::new(*self, u + &vh, vh)
        } else {
            QuadElement::new(*self, u, v)
        }
    }

    /// Parse "a/b+c/d*sqrt(D)" style input, also accepting "g" for a supplied generator.
    pub fn parse(&self, s: &str) -> Result<QuadElement, FieldError> {
        self.parse_with(s, &self.sqrt_d())
    }

    pub fn parse_with(&self, s: &str, gen: &QuadElement) -> Result<QuadElement, FieldError> {
        let bad = || FieldError::Parse(s.to_string());
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(bad());
        }
        let mut terms: Vec<String> = Vec::new();
        let mut cur = String::new();
        let mut depth = 0;
        for ch in cleaned.chars() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            if (ch == '+' || ch == '-') && depth == 0 && !cur.is_empty() && !cur.ends_with('*') {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        let mut acc = self.from_int(0);
        for t in terms {
            let (neg, body) = match t.strip_prefix('-') {
                Some(r) => (true, r.to_string()),
                None => (false, t.trim_start_matches('+').to_string()),
            };
            let (coef, unit) = match body.split_once('*') {
                Some((c, u)) => (parse_rational(c).map_err(|_| bad())?, Some(u.to_string())),
                None => match parse_rational(&body) {
                    Ok(c) => (c, None),
                    Err(_) => (BigRational::one(), Some(body.clone())),
                },
            };
            let base = match unit.as_deref() {
                None => self.from_int(1),
                Some("g") => gen.clone(),
                Some("i") if self.d == -1 => self.sqrt_d(),
                Some(u) => {
                    let inner = u
                        .strip_prefix("sqrt(")
                        .and_then(|r| r.strip_suffix(')'))
                        .ok_or_else(bad)?;
                    let n: i64 = inner.parse().map_err(|_| bad())?;
                    self.sqrt_of_int(n).ok_or_else(bad)?
                }
            };
            let term = base.scale(&coef);
            acc = if neg { &acc - &term } else { &acc + &term };
        }
        Ok(acc)
    }

    /// √n as an element when n·D or n is a square.
    pub fn sqrt_of_int(&self, n: i64) -> Option<QuadElement> {
        let nb = BigInt::from(n);
        if let Some(r) = exact_sqrt_int(&nb) {
            return Some(self.from_rational(BigRational::from_integer(r)));
        }
        // n = D·m² ⇒ √n = m√D
        if n % self.d == 0 {
            if let Some(m) = exact_sqrt_int(&BigInt::from(n / self.d)) {
                return Some(self.elem(BigRational::zero(), BigRational::from_integer(m)));
            }
        }
        None
    }
}

impl fmt::Display for QuadField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(sqrt({}))", self.d)
    }
}

pub(crate) fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// a + b√D.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadElement {
    pub k: QuadField,
    pub a: BigRational,
    pub b: BigRational,
}

impl QuadElement {
    pub fn new(k: QuadField, a: BigRational, b: BigRational) -> QuadElement {
        QuadElement { k, a, b }
    }

    pub fn field(&self) -> QuadField {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> QuadElement {
        QuadElement::new(self.k, self.a.clone(), -&self.b)
    }

    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(BigInt::from(self.k.d))
    }

    pub fn trace(&self) -> BigRational {
        &self.a + &self.a
    }

    pub fn scale(&self, m: &BigRational) -> QuadElement {
        QuadElement::new(self.k, &self.a * m, &self.b * m)
    }

    pub fn square(&self) -> QuadElement {
        self * self
    }

    pub fn inv(&self) -> QuadElement {
        assert!(!self.is_zero(), "inverse of zero");
        let n = self.norm();
        QuadElement::new(self.k, &self.a / &n, -&self.b / &n)
    }

    pub fn div(&self, other: &QuadElement) -> QuadElement {
        self * &other.inv()
    }

    pub fn pow(&self, e: u32) -> QuadElement {
        let mut out = self.k.from_int(1);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// z ↦ z² + c.
    pub fn f(&self, c: &QuadElement) -> QuadElement {
        &self.square() + c
    }

    /// Coordinates (α, β) with x = α + β·ω.
    pub fn coords(&self) -> (BigRational, BigRational) {
        if self.k.omega_half() {
            let beta = &self.b + &self.b;
            (&self.a - &self.b, beta)
        } else {
            (self.a.clone(), self.b.clone())
        }
    }

    /// (u, v, m) with x = (u + v·ω)/m and m the least positive integer making mx integral.
    pub fn integral_parts(&self) -> (BigInt, BigInt, BigInt) {
        let (al, be) = self.coords();
        let m = al.denom().lcm(be.denom());
        let mr = BigRational::from_integer(m.clone());
        let u = (al * &mr).to_integer();
        let v = (be * &mr).to_integer();
        (u, v, m)
    }

    pub fn is_integral(&self) -> bool {
        self.integral_parts().2.is_one()
    }

    /// Values in the two real embeddings, √D ↦ +√D first.
    pub fn real_embeddings(&self) -> [Surd; 2] {
        assert!(self.k.is_real());
        let d = BigRational::from_integer(BigInt::from(self.k.d));
        [
            Surd::new(self.a.clone(), self.b.clone(), d.clone()),
            Surd::new(self.a.clone(), -&self.b, d),
        ]
    }

    /// Approximate complex value (re, im) in the embedding √D ↦ i√|D|, or the first real one.
    pub fn approx(&self) -> (f64, f64) {
        let a = crate::exactnum::to_f64(&self.a);
        let b = crate::exactnum::to_f64(&self.b);
        let r = (self.k.d.abs() as f64).sqrt();
        if self.k.is_real() {
            (a + b * r, 0.0)
        } else {
            (a, b * r)
        }
    }

    /// Primes p at which some prime above p has negative valuation (candidates only).
    pub fn denominator_primes(&self) -> Vec<u64> {
        let (_, _, m) = self.integral_parts();
        crate::exactnum::prime_factors(&m)
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        if self.is_rational() {
            Some(self.a.clone())
        } else {
            None
        }
    }

    /// A square root inside K, if one exists.
    pub fn sqrt(&self) -> Option<QuadElement> {
        use crate::exactnum::exact_sqrt;
        let k = self.k;
        let d = BigRational::from_integer(BigInt::from(k.d));
        if self.b.is_zero() {
            if let Some(r) = exact_sqrt(&self.a) {
                return Some(k.from_rational(r));
            }
            // (b√D)² = b²D
            return exact_sqrt(&(&self.a / &d)).map(|b| k.elem(BigRational::zero(), b));
        }
        // (s + t√D)² = x forces s² = (a ± √N(x))/2 and t = b/(2s)
        let n = exact_sqrt(&self.norm())?;
        let two = BigRational::from_integer(BigInt::from(2));
        for cand in [(&self.a + &n) / &two, (&self.a - &n) / &two] {
            if let Some(s) = exact_sqrt(&cand) {
                if s.is_zero() {
                    continue;
                }
                let t = &self.b / (&s * &two);
                return Some(k.elem(s, t));
            }
        }
        None
    }
}

impl fmt::Display for QuadElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", fmt_rational(&self.a));
        }
        let root = format!("sqrt({})", self.k.d);
        let term = if self.b.is_one() {
            root
        } else if (-&self.b).is_one() {
            format!("-{root}")
        } else {
            format!("{}*{root}", fmt_rational(&self.b))
        };
        if self.a.is_zero() {
            return write!(f, "{term}");
        }
        let sep = if self.b.is_negative() { "" } else { "+" };
        write!(f, "{}{sep}{term}", fmt_rational(&self.a))
    }
}

impl PartialOrd for QuadElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadElement {
    // lexicographic on (a, b); only used for deterministic ordering
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.k, &self.a, &self.b).cmp(&(other.k, &other.a, &other.b))
    }
}

impl<'a> Add<&'a QuadElement> for &'a QuadElement {
    type Output = QuadElement;
    fn add(self, o: &QuadElement) -> QuadElement {
        debug_assert_eq!(self.k, o.k);
        QuadElement::new(self.k, &self.a + &o.a, &self.b + &o.b)
    }
}

impl<'a> Sub<&'a QuadElement> for &'a QuadElement {
    type Output = QuadElement;
    fn sub(self, o: &QuadElement) -> QuadElement {
        debug_assert_eq!(self.k, o.k);
        QuadElement::new(self.k, &self.a - &o.a, &self.b - &o.b)
    }
}

impl<'a> Mul<&'a QuadElement> for &'a QuadElement {
    type Output = QuadElement;
    fn mul(self, o: &QuadElement) -> QuadElement {
        debug_assert_eq!(self.k, o.k);
        let d = BigInt::from(self.k.d);
        let bb = &self.b * &o.b;
        let a = &self.a * &o.a + BigRational::new(bb.numer() * d, bb.denom().clone());
        let b = &self.a * &o.b + &self.b * &o.a;
        QuadElement::new(self.k, a, b)
    }
}

impl Neg for &QuadElement {
    type Output = QuadElement;
    fn neg(self) -> QuadElement {
        QuadElement::new(self.k, -&self.a, -&self.b)
    }
}

impl Add for QuadElement {
    type Output = QuadElement;
    fn add(self, o: QuadElement) -> QuadElement {
        &self + &o
    }
}

impl Sub for QuadElement {
    type Output = QuadElement;
    fn sub(self, o: QuadElement) -> QuadElement {
        &self - &o
    }
}

impl Mul for QuadElement {
    type Output = QuadElement;
    fn mul(self, o: QuadElement) -> QuadElement {
        &self * &o
    }
}

impl Neg for QuadElement {
    type Output = QuadElement;
    fn neg(self) -> QuadElement {
        -&self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

/// A prime ideal 𝔭 of O_K above p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeIdealData {
    pub k: QuadField,
    pub p: u64,
    pub kind: Splitting,
    /// For split p: ω ≡ root mod 𝔭^precision, so that 𝔭^n = (p^n, ω − root) for n ≤ precision.
    pub hensel_root: Option<BigInt>,
    pub precision: u32,
    pub residue_field_size: u64,
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}

fn imod(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

pub(crate) fn big_mod(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

/// Legendre symbol for odd prime p.
pub fn legendre(a: u64, p: u64) -> i32 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if powmod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Square root mod an odd prime (Tonelli–Shanks); a must be a nonzero residue.
pub fn sqrt_mod(a: u64, p: u64) -> u64 {
    let a = a % p;
    if p == 2 || a == 0 {
        return a;
    }
    let mut q = p - 1;
    let mut s = 0;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while legendre(z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = powmod(z, q, p);
    let mut t = powmod(a, q, p);
    let mut r = powmod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mulmod(tt, tt, p);
            i += 1;
        }
        let b = powmod(c, 1 << (m - i - 1), p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    r
}

pub fn splitting_type(k: &QuadField, p: u64) -> Splitting {
    let disc = k.disc();
    if p == 2 {
        if disc % 2 == 0 {
            Splitting::Ramified
        } else if disc.rem_euclid(8) == 1 {
            Splitting::Split
        } else {
            Splitting::Inert
        }
    } else {
        match legendre(imod(disc, p), p) {
            0 => Splitting::Ramified,
            1 => Splitting::Split,
            _ => Splitting::Inert,
        }
    }
}

fn omega_poly_eval(k: &QuadField, t: &BigInt) -> (BigInt, BigInt) {
    let (e1, e0) = k.omega_poly();
    let g = t * t + BigInt::from(e1) * t + BigInt::from(e0);
    let dg = BigInt::from(2) * t + BigInt::from(e1);
    (g, dg)
}

fn hensel_lift(k: &QuadField, p: u64, root: u64, prec: u32) -> BigInt {
    let pb = BigInt::from(p);
    let mut r = BigInt::from(root);
    let mut cur = 1u32;
    while cur < prec {
        cur = (cur * 2).min(prec);
        let m = pb.pow(cur);
        let (g, dg) = omega_poly_eval(k, &r);
        let inv = mod_inverse(&dg, &m);
        r = (&r - g * inv).mod_floor(&m);
    }
    r.mod_floor(&pb.pow(prec))
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    assert!(e.gcd.is_one(), "not invertible");
    e.x.mod_floor(m)
}

/// The primes of O_K above p; two for split p, ordered by their Hensel roots.
pub fn primes_above(k: &QuadField, p: u64, precision: u32) -> Vec<PrimeIdealData> {
    let kind = splitting_type(k, p);
    let base = PrimeIdealData {
        k: *k,
        p,
        kind,
        hensel_root: None,
        precision: 0,
        residue_field_size: if kind == Splitting::Inert { p * p } else { p },
    };
    if kind != Splitting::Split {
        return vec![base];
    }
    let (e1, e0) = k.omega_poly();
    let roots: Vec<u64> = if p == 2 {
        vec![0, 1]
    } else {
        // t = (−e1 ± √(e1² − 4e0))/2
        let disc = imod(e1 * e1 - 4 * e0, p);
        let s = sqrt_mod(disc, p);
        let inv2 = p.div_ceil(2);
        let t1 = mulmod((imod(-e1, p) + s) % p, inv2, p);
        let t2 = mulmod((imod(-e1, p) + p - s) % p, inv2, p);
        let mut v = vec![t1, t2];
        v.sort();
        v
    };
    let prec = precision.max(1);
    roots
        .into_iter()
        .map(|r| PrimeIdealData {
            hensel_root: Some(hensel_lift(k, p, r, prec)),
            precision: prec,
            ..base.clone()
        })
        .collect()
}

impl PrimeIdealData {
    /// Same ideal with its Hensel root lifted to at least `prec`.
    pub fn refine(&self, prec: u32) -> PrimeIdealData {
        if self.kind != Splitting::Split || prec <= self.precision {
            return self.clone();
        }
        let r0 = big_mod(self.hensel_root.as_ref().unwrap(), self.p);
        PrimeIdealData {
            hensel_root: Some(hensel_lift(&self.k, self.p, r0, prec)),
            precision: prec,
            ..self.clone()
        }
    }

    /// ord_𝔭(p): 2 when ramified, else 1.
    pub fn e(&self) -> i64 {
        if self.kind == Splitting::Ramified {
            2
        } else {
            1
        }
    }

    pub fn f(&self) -> i64 {
        if self.kind == Splitting::Inert {
            2
        } else {
            1
        }
    }
}

/// ord_𝔭(x) normalized so that a uniformizer has valuation 1.
pub fn ord_ideal(x: &QuadElement, pr: &PrimeIdealData) -> Result<i64, FieldError> {
    if x.is_zero() {
        return Err(FieldError::ZeroInput);
    }
    let p = pr.p;
    match pr.kind {
        Splitting::Ramified => Ok(ord_norm(x, p)),
        Splitting::Inert => Ok(ord_norm(x, p) / 2),
        Splitting::Split => {
            let (u, v, m) = x.integral_parts();
            let n = int_norm(&x.k, &u, &v);
            let need = ord_p_int(&n, p) + 1;
            let pr = pr.refine(need);
            let modulus = BigInt::from(p).pow(need);
            let val = (u + v * pr.hensel_root.as_ref().unwrap()).mod_floor(&modulus);
            let top = if val.is_zero() { need } else { ord_p_int(&val, p) };
            Ok(top as i64 - ord_p_int(&m, p) as i64)
        }
    }
}

fn ord_norm(x: &QuadElement, p: u64) -> i64 {
    let n = x.norm();
    ord_p_int(n.numer(), p) as i64 - ord_p_int(n.denom(), p) as i64
}

/// N(u + vω) for integers u, v.
pub fn int_norm(k: &QuadField, u: &BigInt, v: &BigInt) -> BigInt {
    let (e1, e0) = k.omega_poly();
    // ω + ω̄ = −e1, ωω̄ = e0
    u * u - BigInt::from(e1) * u * v + BigInt::from(e0) * v * v
}

// residue of a 𝔭-unit in F_p, for split or ramified 𝔭
fn residue_fp(x: &QuadElement, pr: &PrimeIdealData) -> u64 {
    let p = pr.p;
    match pr.kind {
        Splitting::Ramified => {
            // ord 0 forces a to be a p-unit and b p-integral; √D lies in 𝔭
            let a = &x.a;
            let num = big_mod(a.numer(), p);
            let den = big_mod(a.denom(), p);
            mulmod(num, powmod(den, p - 2, p), p)
        }
        Splitting::Split => {
            let (u, v, m) = x.integral_parts();
            let e = ord_p_int(&m, p);
            let pr = pr.refine(e + 1);
            let modulus = BigInt::from(p).pow(e + 1);
            let val = (u + v * pr.hensel_root.as_ref().unwrap()).mod_floor(&modulus);
            let pe = BigInt::from(p).pow(e);
            let top = big_mod(&(val / &pe), p);
            let bottom = big_mod(&(m / pe), p);
            mulmod(top, powmod(bottom, p - 2, p), p)
        }
        Splitting::Inert => unreachable!(),
    }
}

/// Whether a 𝔭-unit is a square in the completion K_𝔭 (odd residue characteristic).
pub fn is_square_in_completion(u: &QuadElement, pr: &PrimeIdealData) -> Result<bool, FieldError> {
    if pr.p == 2 {
        return Err(FieldError::EvenResidueCharacteristic);
    }
    if u.is_zero() || ord_ideal(u, pr)? != 0 {
        return Err(FieldError::NotAUnit);
    }
    let p = pr.p;
    match pr.kind {
        Splitting::Inert => {
            // Euler's criterion in F_p[√D]
            let red = |x: &BigRational| {
                mulmod(big_mod(x.numer(), p), powmod(big_mod(x.denom(), p), p - 2, p), p)
            };
            let (a, b) = (red(&u.a), red(&u.b));
            let d = imod(u.k.d, p);
            let e = (p as u128 * p as u128 - 1) / 2;
            let r = fp2_pow((a, b), e, d, p);
            Ok(r == (1, 0))
        }
        _ => Ok(legendre(residue_fp(u, pr), p) == 1),
    }
}

fn fp2_mul(x: (u64, u64), y: (u64, u64), d: u64, p: u64) -> (u64, u64) {
    let a = (mulmod(x.0, y.0, p) + mulmod(mulmod(x.1, y.1, p), d, p)) % p;
    let b = (mulmod(x.0, y.1, p) + mulmod(x.1, y.0, p)) % p;
    (a, b)
}

fn fp2_pow(mut x: (u64, u64), mut e: u128, d: u64, p: u64) -> (u64, u64) {
    let mut r = (1 % p, 0);
    while e > 0 {
        if e & 1 == 1 {
            r = fp2_mul(r, x, d, p);
        }
        x = fp2_mul(x, x, d, p);
        e >>= 1;
    }
    r
}
