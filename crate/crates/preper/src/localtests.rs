//! Local obstructions to preperiodicity for f(z) = z² + c.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use qarith::enumerate::{sign_int_surd, RawElement};
use qarith::exactnum::sign_radical_sum;
use qarith::quadfield::{is_square_in_completion, ord_ideal, primes_above, Splitting};
use qarith::{PrimeIdealData, QuadElement, QuadField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reason {
    ArchimedeanEscape,
    RealGap,
    FiniteDenominator,
    ValuationMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    No(Reason),
    Maybe,
}

impl Verdict {
    pub fn is_no(&self) -> bool {
        matches!(self, Verdict::No(_))
    }
}

/// A prime ideal identified by p and, for split p, the root of ω mod p.
pub type IdealKey = (u64, Option<u64>);

pub fn ideal_key(pr: &PrimeIdealData) -> IdealKey {
    let root = pr.hensel_root.as_ref().map(|r| {
        let p = BigInt::from(pr.p);
        u64::try_from(r.mod_floor(&p)).unwrap()
    });
    (pr.p, root)
}

thread_local! {
    static PRIMES: std::cell::RefCell<std::collections::HashMap<(i64, u64), Vec<PrimeIdealData>>> =
        std::cell::RefCell::new(std::collections::HashMap::new());
}

// primes_above with Hensel data lifted once and reused
fn cached_primes_above(k: &QuadField, p: u64) -> Vec<PrimeIdealData> {
    PRIMES.with(|m| {
        m.borrow_mut()
            .entry((k.d, p))
            .or_insert_with(|| primes_above(k, p, 12))
            .clone()
    })
}

fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// p + q√D inside a real field.
#[derive(Clone, Debug)]
struct RealVal {
    p: BigRational,
    q: BigRational,
}

impl RealVal {
    fn sign(&self, d: i64) -> i32 {
        sign_radical_sum(&[(self.p.clone(), BigRational::one()), (self.q.clone(), rat_int(d))])
    }
    fn abs(self, d: i64) -> RealVal {
        if self.sign(d) < 0 {
            RealVal { p: -self.p, q: -self.q }
        } else {
            self
        }
    }
    fn add(&self, o: &RealVal) -> RealVal {
        RealVal { p: &self.p + &o.p, q: &self.q + &o.q }
    }
    fn sub(&self, o: &RealVal) -> RealVal {
        RealVal { p: &self.p - &o.p, q: &self.q - &o.q }
    }
    fn mul(&self, o: &RealVal, d: i64) -> RealVal {
        RealVal {
            p: &self.p * &o.p + &self.q * &o.q * rat_int(d),
            q: &self.p * &o.q + &self.q * &o.p,
        }
    }
    fn rational(x: BigRational) -> RealVal {
        RealVal { p: x, q: BigRational::zero() }
    }
}

fn embeddings(x: &QuadElement) -> [RealVal; 2] {
    [
        RealVal { p: x.a.clone(), q: x.b.clone() },
        RealVal { p: x.a.clone(), q: -&x.b },
    ]
}

fn quarter() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(4))
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// Everything about c that the per-point tests reuse.
#[derive(Debug, Clone)]
pub struct ParamData {
    pub c: QuadElement,
    /// Primes with ord_𝔭(c) < 0, with that valuation.
    pub poles: Vec<(PrimeIdealData, i64)>,
    pole_keys: BTreeMap<IdealKey, i64>,
}

impl ParamData {
    pub fn new(c: &QuadElement) -> ParamData {
        let k = c.field();
        let mut poles = Vec::new();
        for p in c.denominator_primes() {
            for pr in cached_primes_above(&k, p) {
                let o = ord_ideal(c, &pr).expect("c has a denominator, so c ≠ 0");
                if o < 0 {
                    poles.push((pr, o));
                }
            }
        }
        let pole_keys = poles.iter().map(|(pr, o)| (ideal_key(pr), *o)).collect();
        ParamData { c: c.clone(), poles, pole_keys }
    }

    /// Necessary local conditions on c for PrePer(f_c, K) to be nonempty.
    pub fn admissible(&self) -> bool {
        let k = self.c.field();
        if k.is_real() {
            let q = RealVal::rational(quarter());
            for s in embeddings(&self.c) {
                if s.sub(&q).sign(k.d) > 0 {
                    return false;
                }
            }
        }
        for (pr, o) in &self.poles {
            if o % 2 != 0 {
                return false;
            }
            if pr.p == 2 {
                continue;
            }
            // −c = π^{ord}·u with π = p, or √D when p ramifies
            let s = -o / 2;
            let pi = match pr.kind {
                Splitting::Ramified => rat_int(k.d),
                _ => BigRational::from_integer(BigInt::from(pr.p)),
            };
            let exp = if pr.kind == Splitting::Ramified { s } else { 2 * s };
            let u = (-&self.c).scale(&num_traits::pow(pi, exp as usize));
            if !is_square_in_completion(&u, pr).expect("u is a unit") {
                return false;
            }
        }
        true
    }

    /// The least integer m such that m·P is integral for every P passing the valuation tests.
    pub fn point_denominator(&self) -> BigInt {
        let mut need: BTreeMap<u64, i64> = BTreeMap::new();
        for (pr, o) in &self.poles {
            let k = (-o + 1) / 2;
            let e = if pr.kind == Splitting::Ramified { (k + 1) / 2 } else { k };
            let slot = need.entry(pr.p).or_insert(0);
            *slot = (*slot).max(e);
        }
        need.iter().fold(BigInt::one(), |acc, (p, e)| acc * BigInt::from(*p).pow(*e as u32))
    }

    pub fn test(&self, pt: &QuadElement) -> Verdict {
        let k = self.c.field();
        // (1) a pole of P where c is integral
        if !pt.is_zero() {
            for p in pt.denominator_primes() {
                for pr in cached_primes_above(&k, p) {
                    let o = ord_ideal(pt, &pr).unwrap();
                    if o < 0 && !self.pole_keys.contains_key(&ideal_key(&pr)) {
                        return Verdict::No(Reason::FiniteDenominator);
                    }
                }
            }
        }
        // (2) at poles of c, ord(P) = ord(c)/2
        for (pr, o) in &self.poles {
            if o % 2 != 0 || pt.is_zero() || 2 * ord_ideal(pt, pr).unwrap() != *o {
                return Verdict::No(Reason::ValuationMismatch);
            }
        }
        if k.is_real() {
            self.real_tests(pt)
        } else {
            self.complex_test(pt)
        }
    }

    fn real_tests(&self, pt: &QuadElement) -> Verdict {
        let d = self.c.field().d;
        let sc = embeddings(&self.c);
        let sp = embeddings(pt);
        for i in 0..2 {
            let x = sp[i].clone().abs(d);
            let y = sc[i].clone().abs(d);
            // (3) |σP| beyond the escape radius
            if x.mul(&x, d).sub(&x).sub(&y).sign(d) > 0 {
                return Verdict::No(Reason::ArchimedeanEscape);
            }
            let c = &sc[i];
            // (4a) σc ≤ 1/4: escape once |σP| exceeds the repelling fixed point
            if c.sub(&RealVal::rational(quarter())).sign(d) <= 0 {
                let beyond_half = x.sub(&RealVal::rational(half())).sign(d) > 0;
                if beyond_half && x.mul(&x, d).sub(&x).add(c).sign(d) > 0 {
                    return Verdict::No(Reason::ArchimedeanEscape);
                }
            }
            // (4b) σc < −2: the gap around 0 whose points escape
            if c.add(&RealVal::rational(rat_int(2))).sign(d) < 0 {
                let l = sp[i].mul(&sp[i], d).add(c).add(&RealVal::rational(half()));
                let rhs = RealVal::rational(quarter()).sub(c);
                if l.sign(d) < 0 && l.mul(&l, d).sub(&rhs).sign(d) > 0 {
                    return Verdict::No(Reason::RealGap);
                }
            }
        }
        Verdict::Maybe
    }

    fn complex_test(&self, pt: &QuadElement) -> Verdict {
        // |P|² − |P| − |c| > 0 with |z| = √N(z)
        let np = pt.norm();
        let nc = self.c.norm();
        let s = sign_radical_sum(&[
            (np.clone(), BigRational::one()),
            (-BigRational::one(), np),
            (-BigRational::one(), nc),
        ]);
        if s > 0 {
            Verdict::No(Reason::ArchimedeanEscape)
        } else {
            Verdict::Maybe
        }
    }
}

fn small_factors(mut n: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let mut p = 2;
    n = n.abs();
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn val(n: i64, p: i64) -> Option<i64> {
    if n == 0 {
        return None;
    }
    let (mut n, mut e) = (n, 0);
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    Some(e)
}

/// Cheap necessary conditions, in machine integers, for an enumerated parameter to be
/// admissible: every real embedding ≤ 1/4 and every pole of even order.
/// `false` means provably inadmissible; `true` means run the exact test.
pub fn quick_admissible(k: &QuadField, x: &RawElement) -> bool {
    let ramified = |p: i64| k.disc() % p == 0;
    match *x {
        RawElement::Rational { p, q } => {
            if k.is_real() && 4 * p > q {
                return false;
            }
            small_factors(q).iter().all(|&(r, e)| ramified(r) || e % 2 == 0)
        }
        RawElement::Quadratic { a, b, c, f } => {
            if k.is_real() && sign_int_surd(-2 * b as i128 - a as i128, 2 * f.abs() as i128, k.d as i128) > 0 {
                return false;
            }
            for (p, alpha) in small_factors(a) {
                let gamma = val(c, p).expect("c ≠ 0 for an irreducible polynomial");
                // Newton polygon through (0, γ), (1, β), (2, α)
                let split_slopes = val(b, p).filter(|&beta| 2 * beta < alpha + gamma);
                let poles: Vec<i64> = match split_slopes {
                    Some(beta) => vec![gamma - beta, beta - alpha],
                    None if ramified(p) => vec![gamma - alpha],
                    None => vec![(gamma - alpha) / 2],
                };
                if poles.iter().any(|&o| o < 0 && o % 2 != 0) {
                    return false;
                }
            }
            true
        }
    }
}

pub fn parameter_admissible(c: &QuadElement) -> bool {
    ParamData::new(c).admissible()
}

/// NO when P provably is not preperiodic for z² + c; MAYBE otherwise.
pub fn preperiodicity_test(pt: &QuadElement, c: &QuadElement) -> Verdict {
    assert_eq!(pt.field(), c.field(), "point and parameter in different fields");
    ParamData::new(c).test(pt)
}
