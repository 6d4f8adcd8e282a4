//! Parameterizations of portraits by points on curves: the closed-form cycles and a table of
//! families, one declarative record per graph type.
//!
//! Formulas are kept as strings in a small exact expression language over a quadratic field:
//! numbers, the variables `x`, `y`, `z`, `c` and marked point names, `+ - * / ^`, and `fN(e)` for
//! the N-th iterate of z² + c applied to `e`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use qarith::exactnum::{exact_sqrt, squarefree_kernel_rat};
use qarith::{make_field, QuadElement, QuadField};

use crate::dynamics::{orbit, preperiodic_points};
use crate::portraits::Catalogue;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("{0} is a rational square; no quadratic field arises")]
    SquareDiscriminant(String),
    #[error("square conditions generate different fields: {0}")]
    InconsistentFields(String),
    #[error("no parameterized family for type {0}")]
    UnknownType(String),
    #[error("bad formula {0:?}")]
    Formula(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Expr {
    Num(BigInt),
    Var(String),
    Iter(u32, Box<Expr>),
    Neg(Box<Expr>),
    Bin(char, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn peek(&mut self) -> Option<u8> {
        while self.i < self.s.len() && self.s[self.i] == b' ' {
            self.i += 1;
        }
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, ch: u8) -> bool {
        if self.peek() == Some(ch) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Option<&str> {
        let st = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        (self.i > st).then(|| std::str::from_utf8(&self.s[st..self.i]).unwrap())
    }

    fn expr(&mut self) -> Option<Expr> {
        let mut e = self.term()?;
        loop {
            if self.eat(b'+') {
                e = Expr::Bin('+', Box::new(e), Box::new(self.term()?));
            } else if self.eat(b'-') {
                e = Expr::Bin('-', Box::new(e), Box::new(self.term()?));
            } else {
                return Some(e);
            }
        }
    }

    fn term(&mut self) -> Option<Expr> {
        let mut e = self.unary()?;
        loop {
            if self.eat(b'*') {
                e = Expr::Bin('*', Box::new(e), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                e = Expr::Bin('/', Box::new(e), Box::new(self.unary()?));
            } else {
                return Some(e);
            }
        }
    }

    fn unary(&mut self) -> Option<Expr> {
        if self.eat(b'-') {
            return Some(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            self.peek();
            let n = self.digits()?.parse().ok()?;
            return Some(Expr::Pow(Box::new(base), n));
        }
        Some(base)
    }

    fn atom(&mut self) -> Option<Expr> {
        let ch = self.peek()?;
        if self.eat(b'(') {
            let e = self.expr()?;
            return self.eat(b')').then_some(e);
        }
        if ch.is_ascii_digit() {
            return self.digits()?.parse().ok().map(Expr::Num);
        }
        if !ch.is_ascii_alphabetic() {
            return None;
        }
        let st = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_alphanumeric() {
            self.i += 1;
        }
        let name = std::str::from_utf8(&self.s[st..self.i]).unwrap().to_string();
        if let Some(n) = name.strip_prefix('f').and_then(|r| r.parse::<u32>().ok()) {
            if !self.eat(b'(') {
                return None;
            }
            let e = self.expr()?;
            return self.eat(b')').then(|| Expr::Iter(n, Box::new(e)));
        }
        Some(Expr::Var(name))
    }
}

fn parse(s: &str) -> Result<Expr, ParamError> {
    let mut p = Parser { s: s.as_bytes(), i: 0 };
    match p.expr() {
        Some(e) if p.peek().is_none() => Ok(e),
        _ => Err(ParamError::Formula(s.to_string())),
    }
}

/// Variable bindings inside one field.
#[derive(Debug, Clone)]
pub struct Env {
    pub k: QuadField,
    pub vars: BTreeMap<String, QuadElement>,
}

impl Env {
    pub fn new(k: QuadField) -> Env {
        Env { k, vars: BTreeMap::new() }
    }

    pub fn bind(&mut self, name: &str, v: QuadElement) {
        self.vars.insert(name.to_string(), v);
    }

    pub fn get(&self, name: &str) -> Option<&QuadElement> {
        self.vars.get(name)
    }

    /// Evaluates a formula; division by zero is a degenerate parameter.
    pub fn eval(&self, formula: &str) -> Result<QuadElement, ParamError> {
        self.eval_expr(&parse(formula)?)
    }

    fn eval_expr(&self, e: &Expr) -> Result<QuadElement, ParamError> {
        Ok(match e {
            Expr::Num(n) => self.k.from_rational(BigRational::from_integer(n.clone())),
            Expr::Var(v) => self
                .vars
                .get(v)
                .cloned()
                .ok_or_else(|| ParamError::Formula(format!("unbound {v}")))?,
            Expr::Iter(n, e) => {
                let c = self.vars.get("c").ok_or_else(|| ParamError::Formula("unbound c".into()))?;
                let mut z = self.eval_expr(e)?;
                for _ in 0..*n {
                    z = z.f(c);
                }
                z
            }
            Expr::Neg(e) => -self.eval_expr(e)?,
            Expr::Pow(e, n) => self.eval_expr(e)?.pow(*n),
            Expr::Bin(op, a, b) => {
                let (a, b) = (self.eval_expr(a)?, self.eval_expr(b)?);
                match op {
                    '+' => a + b,
                    '-' => a - b,
                    '*' => a * b,
                    _ => {
                        if b.is_zero() {
                            return Err(ParamError::DegenerateParameter("division by zero".into()));
                        }
                        a.div(&b)
                    }
                }
            }
        })
    }
}

/// (p, p′, c): both x + 1/2 and 1/2 − x are fixed by z² + 1/4 − x².
pub fn fixed_point_pair(x: &QuadElement) -> (QuadElement, QuadElement, QuadElement) {
    let mut env = Env::new(x.field());
    env.bind("x", x.clone());
    let v = |s| env.eval(s).unwrap();
    (v("x+1/2"), v("1/2-x"), v("1/4-x^2"))
}

/// (p, f(p), c) for the 2-cycle with c = −3/4 − x².
pub fn two_cycle(x: &QuadElement) -> Result<(QuadElement, QuadElement, QuadElement), ParamError> {
    if x.is_zero() {
        return Err(ParamError::DegenerateParameter("x = 0".into()));
    }
    let mut env = Env::new(x.field());
    env.bind("x", x.clone());
    Ok((env.eval("x-1/2")?, env.eval("-x-1/2")?, env.eval("-3/4-x^2")?))
}

/// (p, f(p), f²(p), c) for the 3-cycle family.
pub fn three_cycle(x: &QuadElement) -> Result<[QuadElement; 4], ParamError> {
    let mut env = Env::new(x.field());
    env.bind("x", x.clone());
    if env.eval("x*(x+1)*(x^2+x+1)")?.is_zero() {
        return Err(ParamError::DegenerateParameter("x(x+1)(x²+x+1) = 0".into()));
    }
    Ok([
        env.eval(P3)?,
        env.eval("(x^3-x-1)/(2*x*(x+1))")?,
        env.eval("-(x^3+2*x^2+3*x+1)/(2*x*(x+1))")?,
        env.eval(C3)?,
    ])
}

/// The 4-cycle through p and its c, from a point (x, y) on y² = F16(x).
pub fn four_cycle(x: &QuadElement, y: &QuadElement) -> Result<([QuadElement; 4], QuadElement), ParamError> {
    let mut env = Env::new(x.field());
    env.bind("x", x.clone());
    env.bind("y", y.clone());
    if y.square() != env.eval(F16)? {
        return Err(ParamError::NotOnCurve);
    }
    if env.eval("y*(x^2-1)")?.is_zero() {
        return Err(ParamError::DegenerateParameter("y(x²−1) = 0".into()));
    }
    let pts = [
        env.eval(P4)?,
        env.eval("-(x+1)/(2*(x-1))+y/(2*x*(x+1))")?,
        env.eval("(x-1)/(2*(x+1))-y/(2*x*(x-1))")?,
        env.eval("-(x+1)/(2*(x-1))-y/(2*x*(x+1))")?,
    ];
    Ok((pts, env.eval(C4)?))
}

pub const F13: &str = "x^6+2*x^5+x^4+2*x^3+6*x^2+4*x+1";
pub const F16: &str = "-x*(x^2+1)*(x^2-2*x-1)";
pub const F18: &str = "x^6+2*x^5+5*x^4+10*x^3+10*x^2+4*x+1";
const C1: &str = "-2*(x^2+1)/(x^2-1)^2";
const C2: &str = "-(x^4+2*x^3+2*x^2-2*x+1)/(x^2-1)^2";
const C3: &str = "-(x^6+2*x^5+4*x^4+8*x^3+9*x^2+4*x+1)/(4*x^2*(x+1)^2)";
const C4: &str = "(x^2-4*x-1)*(x^4+x^3+2*x^2-x+1)/(4*x*(x-1)^2*(x+1)^2)";
const C211: &str = "-(3*x^4+10*x^2+3)/(4*(x^2-1)^2)";
const P3: &str = "(x^3+2*x^2+x+1)/(2*x*(x+1))";
const P4: &str = "(x-1)/(2*(x+1))+y/(2*x*(x-1))";
const X11: &str = "2*(x^3+x^2-x+1)";
const X40: &str = "2*(x^4+2*x^3-2*x+1)";
const POONEN32: &str = "x^6-2*x^4+2*x^3+5*x^2+2*x+1";

/// A marked point and its type m_n: it enters an m-cycle after exactly n steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Marked {
    pub name: &'static str,
    pub formula: &'static str,
    pub period: usize,
    pub tail: usize,
}

const fn mk(name: &'static str, formula: &'static str, period: usize, tail: usize) -> Marked {
    Marked { name, formula, period, tail }
}

#[derive(Debug, Clone, Copy)]
pub struct Family {
    pub label: &'static str,
    /// (v, f) for each square condition v² = f, in order.
    pub squares: &'static [(&'static str, &'static str)],
    pub c: &'static str,
    pub points: &'static [Marked],
    /// Must not vanish.
    pub excluded: &'static str,
    /// Equalities "a = b" and inequalities "a != b" among iterates of marked points.
    pub relations: &'static [&'static str],
    /// Recovers x from the marked points and c.
    pub inverse_x: &'static str,
}

pub const FAMILIES: &[Family] = &[
    Family {
        label: "8(1,1)a",
        squares: &[("y", "-(x^2-3)*(x^2+1)")],
        c: C1,
        points: &[mk("a", "-2*x/(x^2-1)", 1, 2), mk("b", "y/(x^2-1)", 1, 2)],
        excluded: "x*(x^4-1)*(x^2+3)",
        relations: &["f2(a) != f2(b)"],
        inverse_x: "-a/(a^2+c)",
    },
    Family {
        label: "8(1,1)b",
        squares: &[("y", X11)],
        c: C1,
        points: &[mk("p", "y/(x^2-1)", 1, 3)],
        excluded: "x*(x^2-1)",
        relations: &[],
        inverse_x: "f1(p)/f2(p)",
    },
    Family {
        label: "8(2)a",
        squares: &[("y", X40)],
        c: C2,
        points: &[mk("a", "-(x^2+1)/(x^2-1)", 2, 2), mk("b", "y/(x^2-1)", 2, 2)],
        excluded: "x*(x^2-1)*(x^2+4*x-1)*(x^2+2*x-1)",
        relations: &["f2(a) != f2(b)"],
        inverse_x: "(a-1)/(a^2+c)",
    },
    Family {
        label: "8(2)b",
        squares: &[("y", X11)],
        c: C2,
        points: &[mk("p", "y/(x^2-1)", 2, 3)],
        excluded: "x*(x^2-1)*(x^2+4*x-1)",
        relations: &[],
        inverse_x: "(f1(p)-1)/f2(p)",
    },
    Family {
        label: "8(4)",
        squares: &[("y", F16)],
        c: C4,
        points: &[mk("p", P4, 4, 0)],
        excluded: "y*(x^2-1)",
        relations: &[],
        inverse_x: "(1+f2(p)+p)/(1-f2(p)-p)",
    },
    Family {
        label: "10(1,1)a",
        squares: &[("y", X11), ("z", "-2*(x^3-x^2-x-1)")],
        c: C1,
        points: &[mk("a", "y/(x^2-1)", 1, 3), mk("b", "z/(x^2-1)", 1, 3)],
        excluded: "x*(x^2-1)",
        relations: &["f2(a) = f2(b)", "f1(a) != f1(b)"],
        inverse_x: "f1(a)/f2(a)",
    },
    Family {
        label: "10(2,1,1)a",
        squares: &[("y", "5*x^4-8*x^3+6*x^2+8*x+5")],
        c: C211,
        points: &[mk("a", "(3*x^2+1)/(2*(x^2-1))", 1, 0), mk("b", "y/(2*(x^2-1))", 2, 2)],
        excluded: "x*(x^2-1)*(x^2-4*x-1)",
        relations: &[],
        inverse_x: "(1+2*f2(b))/(3-2*a)",
    },
    Family {
        label: "10(2,1,1)b",
        squares: &[("y", "(5*x^2-1)*(x^2+3)")],
        c: C211,
        points: &[mk("a", "y/(2*(x^2-1))", 1, 2), mk("b", "-(x^2-4*x-1)/(2*(x^2-1))", 2, 0)],
        excluded: "x*(x^2-1)*(x^2+3)",
        relations: &[],
        inverse_x: "-(1+2*f2(b))/(1+2*f2(a))",
    },
    Family {
        label: "10(3,1,1)",
        squares: &[("y", F18)],
        c: C3,
        points: &[mk("a", P3, 3, 0), mk("b", "1/2+y/(2*x*(x+1))", 1, 0)],
        excluded: "x*(x+1)*(x^2+x+1)",
        relations: &[],
        inverse_x: "a^2+a+c",
    },
    Family {
        label: "10(3,2)",
        squares: &[("y", F13)],
        c: C3,
        points: &[mk("a", P3, 3, 0), mk("b", "-1/2+y/(2*x*(x+1))", 2, 0)],
        excluded: "x*y*(x+1)*(x^2+x+1)",
        relations: &[],
        inverse_x: "a^2+a+c",
    },
    Family {
        label: "12(2)",
        squares: &[("y", X40), ("z", X11)],
        c: C2,
        points: &[mk("a", "z/(x^2-1)", 2, 3), mk("s", "y/(x^2-1)", 2, 2)],
        excluded: "x*(x^2-1)*(x^2+4*x-1)*(x^2+2*x-1)",
        relations: &["f2(s) != f3(a)"],
        inverse_x: "(f1(a)-1)/f2(a)",
    },
    Family {
        label: "12(2,1,1)a",
        squares: &[("y", X40), ("z", "5*x^4+8*x^3+6*x^2-8*x+5")],
        c: C2,
        points: &[
            mk("r", "-(x^2+1)/(x^2-1)", 2, 2),
            mk("s", "y/(x^2-1)", 2, 2),
            mk("p", "1/2+z/(2*(x^2-1))", 1, 0),
        ],
        excluded: "x*(x^2-1)*(x^2+4*x-1)*(x^2+2*x-1)",
        relations: &["f2(r) != f2(s)"],
        inverse_x: "(r-1)/(r^2+c)",
    },
    Family {
        label: "12(2,1,1)b",
        squares: &[("y", "-3*x^4+14*x^2+5"), ("z", X11)],
        c: C1,
        points: &[mk("p", "(y+1-x^2)/(2*(x^2-1))", 2, 0), mk("q", "z/(x^2-1)", 1, 3)],
        excluded: "y*(x^2-1)",
        relations: &[],
        inverse_x: "f1(q)/f2(q)",
    },
    Family {
        label: "12(4)",
        squares: &[("y", F16), ("z", "x*(-x^6+x^5+7*x^4+10*x^3-7*x^2+5*x+1)-2*x*(x-1)*(x+1)^2*y")],
        c: C4,
        points: &[mk("p", "z/(2*x*(x^2-1))", 4, 2)],
        excluded: "y*(x^2-1)*(y*(x+1)+x*(x-1)^2)",
        relations: &[],
        inverse_x: "(f4(p)+f2(p)-1)/(f4(p)+f2(p)+1)",
    },
    Family {
        label: "12(4,2)",
        squares: &[("y", F16), ("z", "-x*(x^6-3*x^4-16*x^3+3*x^2-1)")],
        c: C4,
        points: &[mk("a", "(z-x*(x^2-1))/(2*x*(x^2-1))", 2, 0), mk("b", P4, 4, 0)],
        excluded: "y*z*(x^2-1)",
        relations: &[],
        inverse_x: "(1+b+f2(b))/(1-b-f2(b))",
    },
    Family {
        label: "14(2,1,1)",
        squares: &[("y", X11), ("z", "2*x*(x^3+x^2+x-1)")],
        c: C2,
        points: &[mk("a", "y/(x^2-1)", 2, 3), mk("b", "z/(x^2-1)", 2, 3)],
        excluded: "x*(x^4-1)*(x^2+4*x-1)",
        relations: &["f2(a) = f2(b)", "f1(a) != f1(b)"],
        inverse_x: "(f1(a)-1)/f2(a)",
    },
    Family {
        label: "14(3,1,1)",
        squares: &[("y", F18), ("z", POONEN32)],
        c: C3,
        points: &[mk("a", "(y+x^2+x)/(2*x*(x+1))", 1, 0), mk("b", "z/(2*x*(x+1))", 3, 2)],
        excluded: "x*(x+1)*(x^2+x+1)*(x^3+2*x^2+x+1)",
        relations: &[],
        inverse_x: "f2(b)-f1(b)",
    },
    Family {
        label: "14(3,2)",
        squares: &[("y", F13), ("z", POONEN32)],
        c: C3,
        points: &[mk("a", "(y-x^2-x)/(2*x*(x+1))", 2, 0), mk("b", "z/(2*x*(x+1))", 3, 2)],
        excluded: "x*y*(x+1)*(x^2+x+1)*(x^3+2*x^2+x+1)",
        relations: &[],
        inverse_x: "f2(b)-f1(b)",
    },
];

pub fn family(label: &str) -> Result<&'static Family, ParamError> {
    FAMILIES.iter().find(|f| f.label == label).ok_or_else(|| ParamError::UnknownType(label.to_string()))
}

/// A generated instance: the field, c, the curve coordinates and the marked points.
#[derive(Debug, Clone)]
pub struct Instance {
    pub label: &'static str,
    pub field: QuadField,
    pub c: QuadElement,
    /// x, y, z, …
    pub coords: Vec<(String, QuadElement)>,
    pub points: Vec<(&'static str, QuadElement)>,
}

impl Family {
    /// Evaluates c and the marked points at a curve point already known in some field.
    pub fn at_point(&self, coords: &[(String, QuadElement)]) -> Result<Instance, ParamError> {
        let k = coords.first().ok_or(ParamError::NotOnCurve)?.1.field();
        let mut env = Env::new(k);
        for (n, v) in coords {
            env.bind(n, v.clone());
        }
        for (v, f) in self.squares {
            let val = env.get(v).ok_or(ParamError::NotOnCurve)?;
            if val.square() != env.eval(f)? {
                return Err(ParamError::NotOnCurve);
            }
        }
        if env.eval(self.excluded)?.is_zero() {
            return Err(ParamError::DegenerateParameter(format!("{} = 0", self.excluded)));
        }
        let c = env.eval(self.c)?;
        env.bind("c", c.clone());
        let points = self.points.iter().map(|m| Ok((m.name, env.eval(m.formula)?))).collect::<Result<_, _>>()?;
        Ok(Instance { label: self.label, field: k, c, coords: coords.to_vec(), points })
    }

    /// The instance at rational x: every square condition must be solvable in one quadratic field.
    pub fn at_rational(&self, x: &BigRational) -> Result<Instance, ParamError> {
        // rationals live in any field until one is forced
        let carrier = make_field(-1).unwrap();
        let mut k: Option<QuadField> = None;
        let mut coords: Vec<(String, QuadElement)> = vec![("x".into(), carrier.from_rational(x.clone()))];
        for (v, f) in self.squares {
            let mut env = Env::new(k.unwrap_or(carrier));
            for (n, val) in &coords {
                env.bind(n, val.clone());
            }
            let val = env.eval(f)?;
            let root = match (val.to_rational(), k) {
                (Some(r), _) if exact_sqrt(&r).is_some() => env.k.from_rational(exact_sqrt(&r).unwrap()),
                (Some(r), None) => {
                    let d = squarefree_kernel_rat(&r).to_i64().ok_or_else(|| {
                        ParamError::DegenerateParameter(format!("{v}² too large"))
                    })?;
                    let kk = make_field(d).unwrap();
                    k = Some(kk);
                    coords = coords.into_iter().map(|(n, e)| (n, rebase(&e, kk))).collect();
                    rebase(&val, kk).sqrt().expect("√r in Q(√r)")
                }
                (_, Some(kk)) => val
                    .sqrt()
                    .ok_or_else(|| ParamError::InconsistentFields(format!("{v}² = {val} is not a square in {kk}")))?,
                (None, None) => unreachable!("quadratic value before any field"),
            };
            coords.push((v.to_string(), root));
        }
        if k.is_none() {
            // a degenerate x takes precedence over the missing field
            self.at_point(&coords)?;
            let last = self.squares.last().map(|s| s.1).unwrap_or("");
            return Err(ParamError::SquareDiscriminant(last.to_string()));
        }
        self.at_point(&coords)
    }
}

fn rebase(e: &QuadElement, k: QuadField) -> QuadElement {
    let r = e.to_rational().expect("rational before the field is fixed");
    k.from_rational(r)
}

/// (period, tail) of p under z² + c when its orbit closes within `max_steps`.
pub fn point_type(p: &QuadElement, c: &QuadElement, max_steps: usize) -> Option<(usize, usize)> {
    let o = orbit(p, c, max_steps);
    if !o.repeated {
        return None;
    }
    let next = o.points.last().unwrap().f(c);
    let j = o.points.iter().position(|q| *q == next).unwrap();
    Some((o.points.len() - j, j))
}

impl Instance {
    fn env(&self) -> Env {
        let mut env = Env::new(self.field);
        for (n, v) in &self.coords {
            env.bind(n, v.clone());
        }
        for (n, v) in &self.points {
            env.bind(n, v.clone());
        }
        env.bind("c", self.c.clone());
        env
    }

    /// Checks the marked types, the relations and the inverse formula; Err names the first failure.
    pub fn check_relations(&self) -> Result<(), String> {
        let fam = family(self.label).map_err(|e| e.to_string())?;
        for (m, (_, p)) in fam.points.iter().zip(&self.points) {
            let t = point_type(p, &self.c, 64);
            if t != Some((m.period, m.tail)) {
                return Err(format!("{} has type {:?}, expected ({}, {})", m.name, t, m.period, m.tail));
            }
        }
        let env = self.env();
        for rel in fam.relations {
            let (lhs, rhs, eq) = match rel.split_once("!=") {
                Some((l, r)) => (l, r, false),
                None => {
                    let (l, r) = rel.split_once('=').ok_or_else(|| format!("bad relation {rel}"))?;
                    (l, r, true)
                }
            };
            let (l, r) = (env.eval(lhs).map_err(|e| e.to_string())?, env.eval(rhs).map_err(|e| e.to_string())?);
            if (l == r) != eq {
                return Err(format!("relation {rel} fails"));
            }
        }
        let x = env.eval(fam.inverse_x).map_err(|e| e.to_string())?;
        if Some(&x) != env.get("x") {
            return Err(format!("inverse gives x = {x}"));
        }
        Ok(())
    }
}

/// An instance checked by a full preperiodic-point computation.
#[derive(Debug, Clone)]
pub struct Verified {
    pub instance: Instance,
    pub label: String,
    /// The computed portrait has a subgraph of the family's type.
    pub contains: bool,
    pub equals_type: bool,
    /// Every marked point is among the computed preperiodic points.
    pub points_found: bool,
}

pub fn verify(inst: Instance, catalogue: &Catalogue) -> Verified {
    let pre = preperiodic_points(&inst.c);
    let portrait = pre.portrait();
    let label = catalogue.label_portrait(&portrait).to_string();
    Verified {
        contains: catalogue.contains_type(&portrait, inst.label),
        equals_type: label == inst.label,
        points_found: inst.points.iter().all(|(_, p)| pre.contains(p)),
        label,
        instance: inst,
    }
}

/// Instance of a parameterized type at rational x, with its verification pass.
pub fn instantiate(label: &str, x: &BigRational, catalogue: &Catalogue) -> Result<Verified, ParamError> {
    let inst = family(label)?.at_rational(x)?;
    Ok(verify(inst, catalogue))
}

/// Rational x with numerator and denominator bounded by n, in a fixed order.
pub fn small_rationals(n: i64) -> Vec<BigRational> {
    let mut out = Vec::new();
    for q in 1..=n {
        for p in -n..=n {
            let r = BigRational::new(BigInt::from(p), BigInt::from(q));
            if r.denom() == &BigInt::from(q) && (!r.is_zero() || q == 1) {
                out.push(r);
            }
        }
    }
    out
}

/// Whether x is a positive or negative value of f, used to pick real or imaginary fields.
pub fn sign_at(f: &str, x: &BigRational) -> i32 {
    let mut env = Env::new(make_field(-1).unwrap());
    env.bind("x", env.k.from_rational(x.clone()));
    match env.eval(f).ok().and_then(|v| v.to_rational()) {
        Some(r) if r.is_positive() => 1,
        Some(r) if r.is_negative() => -1,
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qarith::exactnum::{int, rat};

    fn q(k: QuadField, r: BigRational) -> QuadElement {
        k.from_rational(r)
    }

    #[test]
    fn parser() {
        let mut env = Env::new(make_field(5).unwrap());
        env.bind("x", q(env.k, int(3)));
        env.bind("c", q(env.k, int(-1)));
        assert_eq!(env.eval("-(x^2-1)/4+2*x").unwrap(), q(env.k, int(4)));
        assert_eq!(env.eval("f2(x)").unwrap(), q(env.k, int(63)));
        assert!(matches!(env.eval("1/(x-3)"), Err(ParamError::DegenerateParameter(_))));
        assert!(parse("x+").is_err());
        assert!(parse("f(x)").is_err());
    }

    #[test]
    fn cycles() {
        let k = make_field(5).unwrap();
        let (p, pp, c) = fixed_point_pair(&q(k, rat(1, 2)));
        assert_eq!((p, pp, c), (q(k, int(1)), q(k, int(0)), q(k, int(0))));
        let (p, pp, c) = fixed_point_pair(&q(k, rat(3, 2)));
        assert_eq!((p, pp, c), (q(k, int(2)), q(k, int(-1)), q(k, int(-2))));
        let (p, fp, c) = two_cycle(&q(k, int(1))).unwrap();
        assert_eq!((p, fp, c.clone()), (q(k, rat(1, 2)), q(k, rat(-3, 2)), q(k, rat(-7, 4))));
        assert!(two_cycle(&q(k, int(0))).is_err());
        let [p, f1, f2, c] = three_cycle(&q(k, int(1))).unwrap();
        assert_eq!([&p, &f1, &f2, &c], [&q(k, rat(5, 4)), &q(k, rat(-1, 4)), &q(k, rat(-7, 4)), &q(k, rat(-29, 16))]);
        assert_eq!(three_cycle(&q(k, int(-2))).unwrap()[3], q(k, rat(-29, 16)));
        assert!(three_cycle(&q(k, int(0))).is_err());
        let k = make_field(-455).unwrap();
        let y = k.sqrt_of_int(-1820).unwrap();
        let (pts, c) = four_cycle(&q(k, int(5)), &y).unwrap();
        assert_eq!(c, q(k, rat(199, 720)));
        assert_eq!(point_type(&pts[0], &c, 10), Some((4, 0)));
        assert_eq!(pts[0].f(&c), pts[1]);
        let k2 = make_field(2).unwrap();
        assert_eq!(four_cycle(&q(k2, int(1)), &q(k2, int(2))).unwrap_err(), ParamError::DegenerateParameter("y(x²−1) = 0".into()));
        let k = make_field(-15).unwrap();
        let (_, c) = four_cycle(&q(k, int(3)), &k.sqrt_of_int(-60).unwrap()).unwrap();
        assert_eq!(c, q(k, rat(-31, 48)));
    }

    #[test]
    fn families_generate() {
        assert_eq!(FAMILIES.len(), 18);
        let i = family("10(3,1,1)").unwrap().at_rational(&int(2)).unwrap();
        assert_eq!((i.field.d, i.c.clone()), (337, q(i.field, rat(-301, 144))));
        let i = family("10(3,2)").unwrap().at_rational(&int(1)).unwrap();
        assert_eq!((i.field.d, i.c.clone()), (17, q(i.field, rat(-29, 16))));
        assert!(matches!(family("8(4)").unwrap().at_rational(&int(0)), Err(ParamError::DegenerateParameter(_))));
        assert!(matches!(family("10(1,1)a").unwrap().at_rational(&int(2)), Err(ParamError::InconsistentFields(_))));
        assert!(matches!(family("8(4)").unwrap().at_rational(&int(-1)), Err(ParamError::DegenerateParameter(_))));
        assert!(matches!(family("3(1,1)"), Err(ParamError::UnknownType(_))));
    }

    #[test]
    fn exhibited_points() {
        // 10(1,1)a at the points with x² + 7 = 0
        let k = make_field(-7).unwrap();
        let x = k.sqrt_d();
        let coords = vec![
            ("x".to_string(), x.clone()),
            ("y".to_string(), &(&x + &x) - &q(k, int(4))),
            ("z".to_string(), &(&x + &x) + &q(k, int(4))),
        ];
        let inst = family("10(1,1)a").unwrap().at_point(&coords).unwrap();
        assert_eq!(inst.c, q(k, rat(3, 16)));
        inst.check_relations().unwrap();
    }
}
