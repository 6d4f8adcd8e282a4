//! Counting rationals of bounded height in an interval, and the growth constant.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exactnum::squarefree_kernel_rat;

/// Nonzero r = p/q in [α, β] with max(|p|, q) ≤ T.
pub fn count_rationals(t: &BigRational, alpha: &BigRational, beta: &BigRational) -> u64 {
    let t = t.floor().to_integer().to_i64().expect("T fits in i64");
    let mut n = 0;
    for q in 1..=t {
        let qb = BigRational::from_integer(q.into());
        let lo = (alpha * &qb).ceil().to_integer().to_i64().unwrap_or(i64::MIN).max(-t);
        let hi = (beta * &qb).floor().to_integer().to_i64().unwrap_or(i64::MAX).min(t);
        for p in lo..=hi {
            if p != 0 && p.gcd(&q) == 1 {
                n += 1;
            }
        }
    }
    n
}

/// S(X) = Σ_{1≤y≤X} ⌊ηy⌋ and g(X) = ηX(X+1)/2 − S(X).
pub fn lattice_count_s(x: &BigRational, eta: &BigRational) -> (BigInt, BigRational) {
    let top = x.floor().to_integer().to_u64().expect("X fits in u64");
    let mut s = BigInt::zero();
    for y in 1..=top {
        s += (eta * BigRational::from_integer(y.into())).floor().to_integer();
    }
    let g = eta * x * (x + BigRational::one()) / BigRational::from_integer(2.into()) - BigRational::from_integer(s.clone());
    (s, g)
}

/// A rational multiple of 1/ζ(2) = 6/π².
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverZeta2(pub BigRational);

impl OverZeta2 {
    pub fn to_f64(&self) -> f64 {
        self.0.numer().to_f64().unwrap() / self.0.denom().to_f64().unwrap() * 6.0 / (PI * PI)
    }
}

impl std::fmt::Display for OverZeta2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})/ζ(2)", self.0)
    }
}

/// c with N(T; α, β) ~ c·T², reduced to subintervals of [0, 1] where c = η/(2ζ(2)).
pub fn asymptotic_constant(alpha: &BigRational, beta: &BigRational) -> OverZeta2 {
    assert!(alpha < beta, "empty interval");
    let (zero, one) = (BigRational::zero(), BigRational::one());
    let half = BigRational::new(1.into(), 2.into());
    let eta = if beta <= &zero {
        // negation
        return asymptotic_constant(&-beta, &-alpha);
    } else if alpha < &zero {
        return OverZeta2(asymptotic_constant(&zero, &-alpha).0 + asymptotic_constant(&zero, beta).0);
    } else if alpha < &one && beta > &one {
        return OverZeta2(asymptotic_constant(alpha, &one).0 + asymptotic_constant(&one, beta).0);
    } else if alpha >= &one {
        // r ↦ 1/r preserves height
        alpha.recip() - beta.recip()
    } else {
        beta - alpha
    };
    OverZeta2(eta * half)
}

/// Squarefree kernel of p(x) for each x; 0 and 1 mark degenerate values (a root or a square).
pub fn field_family_kernels(poly_desc: &[i64], xs: &[BigRational]) -> Vec<BigInt> {
    xs.iter()
        .map(|x| {
            let v = poly_desc.iter().fold(BigRational::zero(), |acc, &c| acc * x + BigRational::from_integer(c.into()));
            if v.is_zero() {
                BigInt::zero()
            } else {
                squarefree_kernel_rat(&v)
            }
        })
        .collect()
}

/// Number of distinct non-degenerate kernels.
pub fn distinct_kernels(ks: &[BigInt]) -> usize {
    let mut v: Vec<_> = ks.iter().filter(|k| k.abs() > BigInt::one()).collect();
    v.sort();
    v.dedup();
    v.len()
}
