//! The exact coefficient field F = Q(pi), pi^m = p.
//!
//! Elements are m-tuples of rationals c_0 + c_1 pi + ... + c_{m-1} pi^{m-1},
//! reduced modulo pi^m - p. Since X^m - p is Eisenstein at p it is irreducible
//! over Q, so this really is a field, and the p-adic valuation normalized by
//! v(p) = 1 extends uniquely: v(pi) = 1/m.
//!
//! Distinct basis monomials have distinct valuations mod Z (v_p(c_j) + j/m),
//! so the valuation of a sum is the minimum of the term valuations. That makes
//! every valuation computed here exact, not an approximation.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// p-adic valuation of a nonzero rational; None for zero.
pub fn rational_valuation(q: &BigRational, p: u64) -> Option<BigInt> {
    if q.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let count = |mut n: BigInt| -> i64 {
        let mut v = 0i64;
        n = n.abs();
        while (&n % &p).is_zero() {
            n /= &p;
            v += 1;
        }
        v
    };
    Some(BigInt::from(
        count(q.numer().clone()) - count(q.denom().clone()),
    ))
}

pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    s.trim()
        .parse::<BigRational>()
        .map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
}

/// A valuation value: an exact rational, or +infinity (the valuation of 0).
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub enum Val {
    Finite(BigRational),
    Infinite,
}

impl Val {
    pub fn finite_ref(&self) -> Option<&BigRational> {
        match self {
            Val::Finite(q) => Some(q),
            Val::Infinite => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Val::Finite(_))
    }

    pub fn from_int(n: i64) -> Val {
        Val::Finite(BigRational::from_integer(BigInt::from(n)))
    }
}

impl PartialOrd for Val {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Val {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (self, other) {
            (Val::Infinite, Val::Infinite) => Equal,
            (Val::Infinite, Val::Finite(_)) => Greater,
            (Val::Finite(_), Val::Infinite) => Less,
            (Val::Finite(a), Val::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Finite(q) => write!(f, "{}", format_rational(q)),
            Val::Infinite => write!(f, "inf"),
        }
    }
}

/// Description of one field in the tower: the prime p and ramification m.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FieldSpec {
    p: u64,
    m: u32,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldSpec {
    pub fn new(p: u64, m: u32) -> Result<FieldSpec> {
        if !is_prime(p) {
            return Err(Error::Validation(format!("p = {p} is not prime")));
        }
        if m == 0 {
            return Err(Error::Validation("ramification index m must be >= 1".into()));
        }
        Ok(FieldSpec { p, m })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Whether self embeds into `other` by pi |-> pi'^(m'/m).
    pub fn embeds_into(&self, other: &FieldSpec) -> bool {
        self.p == other.p && other.m.is_multiple_of(self.m)
    }

    pub fn zero(&self) -> CoeffElem {
        CoeffElem {
            field: *self,
            c: vec![BigRational::zero(); self.m as usize],
        }
    }

    pub fn one(&self) -> CoeffElem {
        self.from_rational(BigRational::one())
    }

    pub fn from_rational(&self, q: BigRational) -> CoeffElem {
        let mut c = vec![BigRational::zero(); self.m as usize];
        c[0] = q;
        CoeffElem { field: *self, c }
    }

    pub fn from_int(&self, n: i64) -> CoeffElem {
        self.from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// The uniformizer pi (equals p itself when m = 1).
    pub fn pi(&self) -> CoeffElem {
        if self.m == 1 {
            self.from_int(self.p as i64)
        } else {
            let mut c = vec![BigRational::zero(); self.m as usize];
            c[1] = BigRational::one();
            CoeffElem { field: *self, c }
        }
    }

    pub fn from_coeffs(&self, c: Vec<BigRational>) -> Result<CoeffElem> {
        if c.len() != self.m as usize {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coefficients, got {}",
                self.m,
                c.len()
            )));
        }
        Ok(CoeffElem { field: *self, c })
    }

    /// An element of the given valuation, which must have denominator dividing m:
    /// a unit u times pi^(m*v). Used by the witness constructions.
    pub fn unit_times_power(&self, unit: BigRational, v: &BigRational) -> Result<CoeffElem> {
        if unit.is_zero() || rational_valuation(&unit, self.p) != Some(BigInt::zero()) {
            return Err(Error::Validation(format!(
                "{} is not a p-adic unit",
                format_rational(&unit)
            )));
        }
        let scaled = v * BigRational::from_integer(BigInt::from(self.m));
        if !scaled.denom().is_one() {
            return Err(Error::Validation(format!(
                "valuation {} not attainable in ramification {}",
                format_rational(v),
                self.m
            )));
        }
        let e: i64 = scaled
            .numer()
            .try_into()
            .map_err(|_| Error::Validation("valuation out of range".into()))?;
        Ok(self.from_rational(unit) * &self.pi().pow(e)?)
    }
}

/// One element of Q(pi).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CoeffElem {
    field: FieldSpec,
    c: Vec<BigRational>,
}

impl CoeffElem {
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|q| q.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.c[0].is_one() && self.c[1..].iter().all(|q| q.is_zero())
    }

    /// v(a) = min over nonzero terms of v_p(c_j) + j/m; +infinity for 0.
    pub fn valuation(&self) -> Val {
        let m = BigInt::from(self.field.m);
        let mut best: Option<BigRational> = None;
        for (j, q) in self.c.iter().enumerate() {
            if let Some(vp) = rational_valuation(q, self.field.p) {
                let term = BigRational::from_integer(vp)
                    + BigRational::new(BigInt::from(j as u64), m.clone());
                if best.as_ref().is_none_or(|b| term < *b) {
                    best = Some(term);
                }
            }
        }
        match best {
            Some(q) => Val::Finite(q),
            None => Val::Infinite,
        }
    }

    pub fn inv(&self) -> Result<CoeffElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let m = self.field.m as usize;
        if m == 1 {
            return Ok(self.field.from_rational(self.c[0].recip()));
        }
        // modulus X^m - p
        let mut modulus = vec![BigRational::zero(); m + 1];
        modulus[0] = -BigRational::from_integer(BigInt::from(self.field.p));
        modulus[m] = BigRational::one();
        let (g, s, _) = poly_ext_gcd(self.c.clone(), modulus.clone());
        // X^m - p is irreducible, so g is a nonzero constant
        debug_assert_eq!(poly_degree(&g), Some(0));
        let ginv = g[0].recip();
        let mut inv: Vec<BigRational> = s.into_iter().map(|q| q * &ginv).collect();
        // Bezout coefficient of the lower-degree argument already has degree < m
        inv.resize(m, BigRational::zero());
        self.field.from_coeffs(inv)
    }

    pub fn div(&self, rhs: &CoeffElem) -> Result<CoeffElem> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<CoeffElem> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = self.field.one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// Image under Q(pi) -> Q(pi'), pi |-> pi'^(m'/m).
    pub fn extend_to(&self, target: FieldSpec) -> Result<CoeffElem> {
        if !self.field.embeds_into(&target) {
            return Err(Error::IncompatibleTower {
                from_p: self.field.p,
                from_m: self.field.m,
                to_p: target.p,
                to_m: target.m,
            });
        }
        let stride = (target.m / self.field.m) as usize;
        let mut c = vec![BigRational::zero(); target.m as usize];
        for (j, q) in self.c.iter().enumerate() {
            c[j * stride] = q.clone();
        }
        target.from_coeffs(c)
    }

    fn assert_same_field(&self, rhs: &CoeffElem) {
        assert_eq!(
            self.field, rhs.field,
            "mixed coefficient fields in arithmetic"
        );
    }
}

impl fmt::Display for CoeffElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, q) in self.c.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{}", format_rational(q))?,
                1 => write!(f, "{}*pi", format_rational(q))?,
                _ => write!(f, "{}*pi^{}", format_rational(q), j)?,
            }
        }
        Ok(())
    }
}

impl Add for &CoeffElem {
    type Output = CoeffElem;
    fn add(self, rhs: &CoeffElem) -> CoeffElem {
        self.assert_same_field(rhs);
        let c = self
            .c
            .iter()
            .zip(&rhs.c)
            .map(|(a, b)| a + b)
            .collect();
        CoeffElem {
            field: self.field,
            c,
        }
    }
}

impl Sub for &CoeffElem {
    type Output = CoeffElem;
    fn sub(self, rhs: &CoeffElem) -> CoeffElem {
        self.assert_same_field(rhs);
        let c = self
            .c
            .iter()
            .zip(&rhs.c)
            .map(|(a, b)| a - b)
            .collect();
        CoeffElem {
            field: self.field,
            c,
        }
    }
}

impl Neg for &CoeffElem {
    type Output = CoeffElem;
    fn neg(self) -> CoeffElem {
        CoeffElem {
            field: self.field,
            c: self.c.iter().map(|q| -q).collect(),
        }
    }
}

impl Mul for &CoeffElem {
    type Output = CoeffElem;
    fn mul(self, rhs: &CoeffElem) -> CoeffElem {
        self.assert_same_field(rhs);
        let m = self.field.m as usize;
        let p = BigRational::from_integer(BigInt::from(self.field.p));
        let mut c = vec![BigRational::zero(); m];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let t = a * b;
                let k = i + j;
                if k < m {
                    c[k] += t;
                } else {
                    // pi^k = p * pi^(k-m) for m <= k <= 2m-2
                    c[k - m] += t * &p;
                }
            }
        }
        CoeffElem {
            field: self.field,
            c,
        }
    }
}

// owned-value conveniences
impl Add for CoeffElem {
    type Output = CoeffElem;
    fn add(self, rhs: CoeffElem) -> CoeffElem {
        &self + &rhs
    }
}

impl Sub for CoeffElem {
    type Output = CoeffElem;
    fn sub(self, rhs: CoeffElem) -> CoeffElem {
        &self - &rhs
    }
}

impl Mul for CoeffElem {
    type Output = CoeffElem;
    fn mul(self, rhs: CoeffElem) -> CoeffElem {
        &self * &rhs
    }
}

impl Mul<&CoeffElem> for CoeffElem {
    type Output = CoeffElem;
    fn mul(self, rhs: &CoeffElem) -> CoeffElem {
        &self * rhs
    }
}

impl Neg for CoeffElem {
    type Output = CoeffElem;
    fn neg(self) -> CoeffElem {
        -&self
    }
}

fn poly_degree(a: &[BigRational]) -> Option<usize> {
    a.iter().rposition(|q| !q.is_zero())
}

fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let db = poly_degree(b).expect("division by zero polynomial");
    let mut rem: Vec<BigRational> = a.to_vec();
    let mut quot = vec![BigRational::zero(); a.len()];
    let lead = b[db].clone();
    while let Some(dr) = poly_degree(&rem) {
        if dr < db {
            break;
        }
        let f = &rem[dr] / &lead;
        quot[dr - db] = f.clone();
        for i in 0..=db {
            let t = &b[i] * &f;
            rem[dr - db + i] -= t;
        }
    }
    (quot, rem)
}

fn poly_sub_mul(a: &[BigRational], q: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    // a - q*b
    let mut out = vec![BigRational::zero(); a.len().max(q.len() + b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in q.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            let t = x * y;
            out[i + j] -= t;
        }
    }
    out
}

/// Extended Euclid over Q[X]: returns (g, s, t) with s*a + t*b = g.
fn poly_ext_gcd(
    a: Vec<BigRational>,
    b: Vec<BigRational>,
) -> (Vec<BigRational>, Vec<BigRational>, Vec<BigRational>) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (vec![BigRational::one()], vec![BigRational::zero()]);
    let (mut t0, mut t1) = (vec![BigRational::zero()], vec![BigRational::one()]);
    while poly_degree(&r1).is_some() {
        let (q, r) = poly_divmod(&r0, &r1);
        let s = poly_sub_mul(&s0, &q, &s1);
        let t = poly_sub_mul(&t0, &q, &t1);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        t0 = std::mem::replace(&mut t1, t);
    }
    (r0, s0, t0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn valuation_of_p_plus_pi_is_one_half() {
        let f = FieldSpec::new(5, 2).unwrap();
        let a = f.from_int(5) + f.pi();
        assert_eq!(a.valuation(), Val::Finite(q(1, 2)));
        // cross-check by squaring: v(a^2) = 2 v(a)
        let sq = &a * &a;
        assert_eq!(sq.valuation(), Val::Finite(q(1, 1)));
    }

    #[test]
    fn valuation_axioms_hold() {
        let f = FieldSpec::new(3, 4).unwrap();
        let a = f.from_coeffs(vec![q(9, 2), q(0, 1), q(1, 3), q(6, 1)]).unwrap();
        let b = f.from_coeffs(vec![q(1, 9), q(3, 1), q(0, 1), q(0, 1)]).unwrap();
        let (va, vb) = (a.valuation(), b.valuation());
        // v(ab) = v(a) + v(b)
        let prod = (&a * &b).valuation();
        match (&va, &vb, &prod) {
            (Val::Finite(x), Val::Finite(y), Val::Finite(z)) => assert_eq!(x + y, *z),
            _ => panic!("expected finite"),
        }
        // v(a+b) >= min(v(a), v(b))
        let sum = (&a + &b).valuation();
        assert!(sum >= va.clone().min(vb.clone()));
        // v(p) = 1, v(pi) = 1/m, v(0) = inf
        assert_eq!(f.from_int(3).valuation(), Val::from_int(1));
        assert_eq!(f.pi().valuation(), Val::Finite(q(1, 4)));
        assert_eq!(f.zero().valuation(), Val::Infinite);
    }

    #[test]
    fn field_inverse_round_trips() {
        let f = FieldSpec::new(5, 3).unwrap();
        let a = f.from_coeffs(vec![q(2, 7), q(-1, 1), q(5, 2)]).unwrap();
        let inv = a.inv().unwrap();
        assert!((&a * &inv).is_one());
        // v(1/a) = -v(a)
        match (a.valuation(), inv.valuation()) {
            (Val::Finite(x), Val::Finite(y)) => assert_eq!(x + y, BigRational::zero()),
            _ => panic!("expected finite"),
        }
        assert!(matches!(
            f.zero().inv().unwrap_err(),
            Error::DivisionByZero
        ));
    }

    #[test]
    fn tower_extension_preserves_valuation_and_ops() {
        let small = FieldSpec::new(2, 2).unwrap();
        let big = FieldSpec::new(2, 6).unwrap();
        let a = small.from_coeffs(vec![q(3, 4), q(7, 1)]).unwrap();
        let b = small.from_coeffs(vec![q(0, 1), q(-1, 6)]).unwrap();
        let (ea, eb) = (a.extend_to(big).unwrap(), b.extend_to(big).unwrap());
        assert_eq!(a.valuation(), ea.valuation());
        assert_eq!(b.valuation(), eb.valuation());
        assert_eq!((&a * &b).extend_to(big).unwrap(), &ea * &eb);
        assert_eq!((&a + &b).extend_to(big).unwrap(), &ea + &eb);
        // m' must be a multiple of m over the same p
        let bad = FieldSpec::new(2, 3).unwrap();
        assert!(matches!(
            a.extend_to(bad),
            Err(Error::IncompatibleTower { .. })
        ));
        assert!(matches!(
            a.extend_to(FieldSpec::new(3, 4).unwrap()),
            Err(Error::IncompatibleTower { .. })
        ));
    }

    #[test]
    fn unit_times_power_hits_requested_valuation() {
        let f = FieldSpec::new(2, 4).unwrap();
        let a = f.unit_times_power(q(3, 1), &q(5, 4)).unwrap();
        assert_eq!(a.valuation(), Val::Finite(q(5, 4)));
        assert!(f.unit_times_power(q(2, 1), &q(1, 1)).is_err()); // 2 is not a unit
        assert!(f.unit_times_power(q(3, 1), &q(1, 3)).is_err()); // 1/3 not reachable
    }

    #[test]
    fn display_matches_documented_form() {
        let f = FieldSpec::new(5, 3).unwrap();
        let a = f.from_coeffs(vec![q(1, 2), q(0, 1), q(-3, 1)]).unwrap();
        assert_eq!(a.to_string(), "1/2 + -3*pi^2");
        assert_eq!(f.zero().to_string(), "0");
    }
}
