//! Hyperelliptic models, point counts over F_p, Chabauty-type bounds, and exact checks of points
//! on curve systems.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use qarith::exactnum::{exact_sqrt, squarefree_kernel_rat};
use qarith::quadfield::legendre;
use qarith::{make_field, QuadElement, QuadField};

use crate::param::{family, Env};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("base point is not on the curve")]
    BasePointNotOnCurve,
    #[error("not a cubic: leading coefficient is zero")]
    NotCubic,
    #[error("bad reduction at {0}")]
    BadReduction(u64),
    #[error("rank {r} is not less than genus {g}")]
    RankNotLessThanGenus { r: u32, g: u32 },
    #[error("inconsistent input: q = {0}")]
    InconsistentInput(i64),
    #[error("model has a repeated root")]
    SingularModel,
}

/// scale·y² = f(x), coefficients ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperellipticModel {
    pub f: Vec<BigRational>,
    pub scale: BigRational,
}

fn trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn poly_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let lb = b.last().unwrap();
    while r.len() >= b.len() {
        let q = r.last().unwrap() / lb;
        let sh = r.len() - b.len();
        for (i, c) in b.iter().enumerate() {
            r[sh + i] -= &q * c;
        }
        r = trim(r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn derivative(f: &[BigRational]) -> Vec<BigRational> {
    f.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(BigInt::from(i))).collect()
}

impl HyperellipticModel {
    /// From integer coefficients listed from the leading term down.
    pub fn from_desc(coeffs: &[i64]) -> HyperellipticModel {
        let f = coeffs.iter().rev().map(|&c| BigRational::from_integer(c.into())).collect();
        HyperellipticModel { f: trim(f), scale: BigRational::one() }
    }

    pub fn twisted(mut self, scale: BigRational) -> HyperellipticModel {
        self.scale = scale;
        self
    }

    pub fn degree(&self) -> usize {
        self.f.len() - 1
    }

    pub fn genus(&self) -> u32 {
        ((self.degree() - 1) / 2) as u32
    }

    pub fn eval(&self, x: &QuadElement) -> QuadElement {
        let k = x.field();
        self.f.iter().rev().fold(k.from_int(0), |acc, c| acc * x.clone() + k.from_rational(c.clone()))
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.f.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Nonzero discriminant, i.e. gcd(f, f′) is constant.
    pub fn is_squarefree(&self) -> bool {
        let (mut a, mut b) = (self.f.clone(), derivative(&self.f));
        while !b.is_empty() {
            let r = poly_rem(&a, &b);
            a = b;
            b = r;
        }
        a.len() == 1
    }

    pub fn on_curve(&self, x: &QuadElement, y: &QuadElement) -> bool {
        y.square().scale(&self.scale) == self.eval(x)
    }

    /// Rational roots of f, by the rational root theorem on the cleared-denominator polynomial.
    pub fn rational_roots(&self) -> Vec<BigRational> {
        let den = self.f.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let g: Vec<BigInt> = self.f.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect();
        let mut out = Vec::new();
        if g[0].is_zero() {
            out.push(BigRational::zero());
        }
        let low = g.iter().find(|c| !c.is_zero()).unwrap();
        let (ps, qs) = (divisors(low), divisors(g.last().unwrap()));
        for p in &ps {
            for q in &qs {
                for s in [1, -1] {
                    let r = BigRational::new(p * BigInt::from(s), q.clone());
                    if self.eval_rational(&r).is_zero() && !out.contains(&r) {
                        out.push(r);
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Parity of #X(Q) forced by the absence of rational points with y = 0; None when f has a rational root.
    pub fn forced_parity(&self) -> Option<Parity> {
        if !self.rational_roots().is_empty() {
            return None;
        }
        // non-Weierstrass points pair up under y ↦ −y; only a single point at infinity is unpaired
        Some(if self.degree() % 2 == 1 { Parity::Odd } else { Parity::Even })
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs().to_u64().expect("small coefficient");
    (1..=n).filter(|d| n.is_multiple_of(*d)).map(BigInt::from).collect()
}

fn reduce(r: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let d = r.denom().mod_floor(&pb).to_u64().unwrap();
    if d == 0 {
        return None;
    }
    let n = r.numer().mod_floor(&pb).to_u64().unwrap();
    Some(n * pow_mod(d, p - 2, p) % p)
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn squarefree_mod_p(f: &[u64], p: u64) -> bool {
    let norm = |mut v: Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    };
    let rem = |a: &[u64], b: &[u64]| {
        let mut r = a.to_vec();
        let inv = pow_mod(*b.last().unwrap(), p - 2, p);
        while r.len() >= b.len() {
            let q = r.last().unwrap() * inv % p;
            let sh = r.len() - b.len();
            for (i, c) in b.iter().enumerate() {
                r[sh + i] = (r[sh + i] + p - q * c % p) % p;
            }
            r = norm(r);
            if r.is_empty() {
                break;
            }
        }
        r
    };
    let df = norm(f.iter().enumerate().skip(1).map(|(i, c)| (i as u64 % p) * c % p).collect());
    if df.is_empty() {
        return false;
    }
    let (mut a, mut b) = (f.to_vec(), df);
    while !b.is_empty() {
        let r = rem(&a, &b);
        a = b;
        b = r;
    }
    a.len() == 1
}

/// Points on the smooth projective model over F_p; points at infinity follow the square class of
/// the leading coefficient on even-degree models.
pub fn count_points_mod_p(model: &HyperellipticModel, p: u64) -> Result<u64, CurveError> {
    if p < 3 {
        return Err(CurveError::BadReduction(p));
    }
    let f: Vec<u64> = model.f.iter().map(|c| reduce(c, p)).collect::<Option<_>>().ok_or(CurveError::BadReduction(p))?;
    let s = reduce(&model.scale, p).filter(|&s| s != 0).ok_or(CurveError::BadReduction(p))?;
    let lc = *f.last().unwrap();
    if lc == 0 || !squarefree_mod_p(&f, p) {
        return Err(CurveError::BadReduction(p));
    }
    let mut count = 0i64;
    for x in 0..p {
        let v = f.iter().rev().fold(0, |acc, c| (acc * x + c) % p);
        // s·y² = v has 1 + χ(s·v) solutions
        count += 1 + legendre(v * s % p, p) as i64;
    }
    count += if model.degree() % 2 == 1 { 1 } else { 1 + legendre(lc * s % p, p) as i64 };
    Ok(count as u64)
}

pub fn hasse_weil_holds(count: u64, p: u64, g: u32) -> bool {
    let dev = (count as f64 - (p as f64 + 1.0)).abs();
    dev <= 2.0 * g as f64 * (p as f64).sqrt() + 1e-9
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    pub coleman: Option<i64>,
    /// Exact value and its floor.
    pub lorenzini_tucker: Option<(BigRational, i64)>,
    pub stoll: Option<i64>,
}

/// Each bound on #X(Q) whose side conditions hold; `d` only affects Lorenzini–Tucker.
pub fn chabauty_bounds(g: u32, r: u32, p: u64, d: u32, count: u64) -> Result<Bounds, CurveError> {
    if r >= g {
        return Err(CurveError::RankNotLessThanGenus { r, g });
    }
    let (gi, pi, ci) = (g as i64, p as i64, count as i64);
    let coleman = (p > 2 * g as u64).then_some(ci + 2 * gi - 2);
    let lt_applies = p > d as u64 && (p as f64).powi(d as i32) > (2 * g - 1 + d) as f64;
    let lorenzini_tucker = lt_applies.then(|| {
        let b = BigRational::from_integer(ci.into())
            + BigRational::new((pi - 1).into(), (pi - d as i64).into()) * BigRational::from_integer((2 * gi - 2).into());
        let fl = b.floor().to_integer().to_i64().unwrap();
        (b, fl)
    });
    let stoll = (p > 2 * r as u64 + 2).then_some(ci + 2 * r as i64);
    Ok(Bounds { coleman, lorenzini_tucker, stoll })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

/// Largest integer ≤ bound with the given parity.
pub fn parity_tighten(bound: i64, parity: Parity) -> i64 {
    let want = if parity == Parity::Odd { 1 } else { 0 };
    if bound.rem_euclid(2) == want {
        bound
    } else {
        bound - 1
    }
}

/// q = 2j − 2 + w − c², the number of non-obvious points on a genus-2 curve whose Jacobian has
/// j rational points, with c rational points and w rational fixed points of the involution.
pub fn nonobvious_count(j: i64, c: i64, w: i64) -> Result<i64, CurveError> {
    let q = 2 * j - 2 + w - c * c;
    if q < 0 || q % 2 != 0 {
        return Err(CurveError::InconsistentInput(q));
    }
    Ok(q)
}

/// Quadratic points cut out on y² = a x³ + b x² + c x + d by the line through a rational point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadPointFamily {
    pub cubic: [BigRational; 4],
    pub base: (BigRational, BigRational),
    pub v: BigRational,
    /// m(t) = t² + A t + B
    pub a: BigRational,
    pub b: BigRational,
    /// m(t) splits over Q.
    pub degenerate: bool,
}

pub fn quad_point_family(
    cubic: [BigRational; 4],
    base: (BigRational, BigRational),
    v: BigRational,
) -> Result<QuadPointFamily, CurveError> {
    let [a, b, c, d] = cubic.clone();
    if a.is_zero() {
        return Err(CurveError::NotCubic);
    }
    let (x0, y0) = base.clone();
    if &y0 * &y0 != &a * &x0 * &x0 * &x0 + &b * &x0 * &x0 + &c * &x0 + &d {
        return Err(CurveError::BasePointNotOnCurve);
    }
    let two = BigRational::from_integer(2.into());
    let fa = (&a * &x0 - &v * &v + &b) / &a;
    let fb = (&a * &x0 * &x0 + &v * &v * &x0 + &b * &x0 - two * &y0 * &v + &c) / &a;
    let disc = &fa * &fa - BigRational::from_integer(4.into()) * &fb;
    let degenerate = exact_sqrt(&disc).is_some();
    Ok(QuadPointFamily { cubic, base, v, a: fa, b: fb, degenerate })
}

impl QuadPointFamily {
    /// The field of the roots of m(t), when m is irreducible.
    pub fn field(&self) -> Option<QuadField> {
        if self.degenerate {
            return None;
        }
        let disc = &self.a * &self.a - BigRational::from_integer(4.into()) * &self.b;
        make_field(squarefree_kernel_rat(&disc).to_i64()?).ok()
    }

    /// The two points (x, y0 + v(x − x0)) with m(x) = 0; rational when degenerate.
    pub fn points(&self) -> Vec<(QuadElement, QuadElement)> {
        let disc = &self.a * &self.a - BigRational::from_integer(4.into()) * &self.b;
        let k = self.field().unwrap_or_else(|| make_field(-1).unwrap());
        let root = match exact_sqrt(&disc) {
            Some(r) => k.from_rational(r),
            None => {
                let d = BigRational::from_integer(BigInt::from(k.d));
                let s = exact_sqrt(&(&disc / &d)).expect("disc is d times a square");
                k.sqrt_d().scale(&s)
            }
        };
        let half = BigRational::new(1.into(), 2.into());
        let xs = [(&root - &k.from_rational(self.a.clone())).scale(&half), (-&root - k.from_rational(self.a.clone())).scale(&half)];
        xs.into_iter()
            .map(|x| {
                let y = k.from_rational(self.base.1.clone()) + (&x - &k.from_rational(self.base.0.clone())).scale(&self.v);
                (x, y)
            })
            .collect()
    }

    pub fn points_on_curve(&self) -> bool {
        let model = HyperellipticModel { f: self.cubic.iter().rev().cloned().collect(), scale: BigRational::one() };
        self.points().iter().all(|(x, y)| model.on_curve(x, y))
    }
}

#[derive(Debug, Clone)]
pub enum Equation {
    /// var² ·scale = f(x)
    Model(&'static str, HyperellipticModel),
    /// var² = formula in x and earlier variables
    Formula(&'static str, &'static str),
}

/// Equations sharing the coordinate x.
#[derive(Debug, Clone)]
pub struct CurveSystem {
    pub equations: Vec<Equation>,
}

impl CurveSystem {
    /// The square conditions of a parameterized family.
    pub fn family(label: &str) -> Option<CurveSystem> {
        let fam = family(label).ok()?;
        Some(CurveSystem { equations: fam.squares.iter().map(|&(v, f)| Equation::Formula(v, f)).collect() })
    }

    pub fn single(model: HyperellipticModel) -> CurveSystem {
        CurveSystem { equations: vec![Equation::Model("y", model)] }
    }

    pub fn arity(&self) -> usize {
        self.equations.len() + 1
    }
}

/// Exact check that (x, y, z, …) satisfies every equation.
pub fn verify_point(system: &CurveSystem, point: &[QuadElement]) -> bool {
    if point.len() != system.arity() || point.iter().any(|p| p.field() != point[0].field()) {
        return false;
    }
    let mut env = Env::new(point[0].field());
    env.bind("x", point[0].clone());
    for (eq, val) in system.equations.iter().zip(&point[1..]) {
        let ok = match eq {
            Equation::Model(v, m) => {
                env.bind(v, val.clone());
                m.on_curve(&point[0], val)
            }
            Equation::Formula(v, f) => {
                env.bind(v, val.clone());
                env.eval(f).is_ok_and(|rhs| rhs == val.square())
            }
        };
        if !ok {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use qarith::exactnum::{int, rat};

    #[test]
    fn counts_and_bounds() {
        let m = HyperellipticModel::from_desc(&[1, 3, 1, -3, 1, 3, -3, 1]);
        assert_eq!((m.genus(), count_points_mod_p(&m, 3)), (3, Ok(7)));
        let b = chabauty_bounds(3, 2, 3, 2, 7).unwrap();
        assert_eq!(b.lorenzini_tucker.unwrap().1, 15);
        assert_eq!(b.coleman, None);
        assert_eq!(b.stoll, None);
        assert_eq!(parity_tighten(18, Parity::Odd), 17);
        assert_eq!(parity_tighten(21, Parity::Even), 20);
        assert_eq!(parity_tighten(16, Parity::Even), 16);
        assert_eq!(chabauty_bounds(2, 2, 7, 1, 8), Err(CurveError::RankNotLessThanGenus { r: 2, g: 2 }));
        assert_eq!(count_points_mod_p(&m, 2), Err(CurveError::BadReduction(2)));
    }

    #[test]
    fn nonobvious() {
        assert_eq!(nonobvious_count(19, 6, 0), Ok(0));
        assert_eq!(nonobvious_count(20, 6, 2), Ok(4));
        assert_eq!(nonobvious_count(21, 6, 0), Ok(4));
        assert_eq!(nonobvious_count(10, 6, 0), Err(CurveError::InconsistentInput(-18)));
        assert_eq!(nonobvious_count(19, 6, 1), Err(CurveError::InconsistentInput(1)));
    }

    #[test]
    fn line_through_base_point() {
        let cubic = [int(2), int(2), int(-2), int(2)];
        let fam = quad_point_family(cubic.clone(), (int(1), int(-2)), int(2)).unwrap();
        assert_eq!((fam.a.clone(), fam.b.clone(), fam.degenerate), (int(0), int(7), false));
        assert_eq!(fam.field().unwrap().d, -7);
        assert!(fam.points_on_curve());
        let fam = quad_point_family(cubic.clone(), (int(1), int(2)), int(0)).unwrap();
        assert_eq!((fam.a.clone(), fam.b.clone(), fam.degenerate), (int(2), int(1), true));
        assert!(fam.points_on_curve());
        assert_eq!(quad_point_family(cubic.clone(), (int(1), int(1)), int(0)), Err(CurveError::BasePointNotOnCurve));
        assert_eq!(quad_point_family([int(0), int(1), int(0), int(0)], (int(0), int(0)), int(1)), Err(CurveError::NotCubic));
    }

    #[test]
    fn ten_one_one_a_points() {
        let sys = CurveSystem::family("10(1,1)a").unwrap();
        let k = make_field(-7).unwrap();
        let x = k.sqrt_d();
        let four = k.from_int(4);
        assert!(verify_point(&sys, &[x.clone(), &(&x + &x) - &four, &(&x + &x) + &four]));
        let k2 = make_field(2).unwrap();
        assert!(verify_point(&sys, &[k2.from_int(0), k2.sqrt_d(), k2.sqrt_d()]));
        assert!(!verify_point(&sys, &[k2.from_int(1), k2.from_int(1), k2.from_int(1)]));
        assert!(!verify_point(&sys, &[k2.from_int(0), k2.sqrt_d()]));
    }

    #[test]
    fn roots_and_parity() {
        let m = HyperellipticModel::from_desc(&[3, -1, -3, 1]);
        assert_eq!(m.rational_roots(), vec![int(-1), rat(1, 3), int(1)]);
        assert_eq!(m.forced_parity(), None);
        assert!(m.is_squarefree());
        assert!(!HyperellipticModel::from_desc(&[1, -2, 1]).is_squarefree());
        assert_eq!(HyperellipticModel::from_desc(&[1, 0, 1]).forced_parity(), Some(Parity::Even));
    }
}
