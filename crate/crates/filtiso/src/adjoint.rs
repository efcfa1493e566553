//! Coordinates on the adjoint quotient of GL_d and its Newton strata.
//!
//! A point is recorded by the valuations of the characteristic polynomial
//! coefficients (c_1, ..., c_d); the constant coefficient must have finite
//! valuation (the group is GL_d, not M_d). The Newton retraction reads the
//! slopes off the lower convex hull through (0, 0) and (i, v(c_i)), sign-fixed
//! so that pairing a coweight against a diagonal torus element negates the
//! valuation.

use crate::error::{Error, Result};
use crate::field::{format_rational, Val};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use std::fmt;

/// A weakly decreasing rational cocharacter of the diagonal torus.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DominantCoweight {
    entries: Vec<BigRational>,
}

impl DominantCoweight {
    pub fn new(entries: Vec<BigRational>) -> Result<DominantCoweight> {
        if entries.is_empty() {
            return Err(Error::Validation("empty coweight".into()));
        }
        for w in entries.windows(2) {
            if w[0] < w[1] {
                return Err(Error::NonDominant(format!(
                    "{} < {}",
                    format_rational(&w[0]),
                    format_rational(&w[1])
                )));
            }
        }
        Ok(DominantCoweight { entries })
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.entries
    }

    /// Pairing with the i-th fundamental weight: mu_1 + ... + mu_i (1-based).
    pub fn partial_sum(&self, i: usize) -> BigRational {
        self.entries[..i].iter().sum()
    }

    /// Dominance order: every proper partial sum <=, total sums equal.
    pub fn dominated_by(&self, other: &DominantCoweight) -> Result<bool> {
        if self.rank() != other.rank() {
            return Err(Error::DimensionMismatch(format!(
                "coweights of rank {} and {}",
                self.rank(),
                other.rank()
            )));
        }
        let d = self.rank();
        for i in 1..d {
            if self.partial_sum(i) > other.partial_sum(i) {
                return Ok(false);
            }
        }
        Ok(self.partial_sum(d) == other.partial_sum(d))
    }
}

impl fmt::Display for DominantCoweight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_rational(x))?;
        }
        write!(f, ")")
    }
}

/// Valuations (v(c_1), ..., v(c_d)) of a characteristic polynomial
/// X^d + c_1 X^{d-1} + ... + c_d over the value group.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AdjointPoint {
    vals: Vec<Val>,
}

impl AdjointPoint {
    pub fn new(vals: Vec<Val>) -> Result<AdjointPoint> {
        if vals.is_empty() {
            return Err(Error::MalformedPoint("no coefficients".into()));
        }
        if !vals.last().unwrap().is_finite() {
            return Err(Error::InfiniteConstantTerm);
        }
        Ok(AdjointPoint { vals })
    }

    pub fn dim(&self) -> usize {
        self.vals.len()
    }

    pub fn vals(&self) -> &[Val] {
        &self.vals
    }

    /// The Newton retraction: negated lower-hull slopes, listed decreasingly.
    pub fn newton_retraction(&self) -> DominantCoweight {
        let d = self.dim();
        // finite points (i, v(c_i)) plus the origin
        let mut pts: Vec<(BigRational, BigRational)> =
            vec![(BigRational::zero(), BigRational::zero())];
        for (i, v) in self.vals.iter().enumerate() {
            if let Val::Finite(q) = v {
                pts.push((
                    BigRational::from_integer(BigInt::from(i as u64 + 1)),
                    q.clone(),
                ));
            }
        }
        // monotone chain, lower hull; x-coordinates are already increasing
        let mut hull: Vec<(BigRational, BigRational)> = Vec::new();
        for p in pts {
            while hull.len() >= 2 {
                let a = &hull[hull.len() - 2];
                let b = &hull[hull.len() - 1];
                // keep only strict right-to-left convex turns
                let cross =
                    (&b.0 - &a.0) * (&p.1 - &a.1) - (&b.1 - &a.1) * (&p.0 - &a.0);
                if cross <= BigRational::zero() {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        let mut entries = Vec::with_capacity(d);
        for w in hull.windows(2) {
            let run = (&w[1].0 - &w[0].0).to_integer();
            let slope = (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0);
            let len: usize = (&run).try_into().expect("hull run fits usize");
            for _ in 0..len {
                entries.push(-slope.clone());
            }
        }
        debug_assert_eq!(entries.len(), d);
        DominantCoweight::new(entries).expect("hull slopes are monotone")
    }

    /// Membership in the closed stratum (retraction <= mu) or, with
    /// closed = false, the locally closed stratum (retraction = mu).
    pub fn in_stratum(&self, mu: &DominantCoweight, closed: bool) -> Result<bool> {
        let d = self.dim();
        if mu.rank() != d {
            return Err(Error::DimensionMismatch(format!(
                "point of dim {d} against coweight of rank {}",
                mu.rank()
            )));
        }
        for i in 1..=d {
            let threshold = Val::Finite(-mu.partial_sum(i));
            let v = &self.vals[i - 1];
            let relaxed = if closed {
                i < d
            } else {
                // alpha_i pairs to zero exactly when mu_i = mu_{i+1}
                i < d && mu.entries[i - 1] == mu.entries[i]
            };
            let ok = if relaxed {
                *v >= threshold
            } else {
                *v == threshold
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for AdjointPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.vals.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{CoeffElem, FieldSpec};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn point(vs: &[i64]) -> AdjointPoint {
        AdjointPoint::new(vs.iter().map(|&v| Val::from_int(v)).collect()).unwrap()
    }

    fn coweight(vs: &[(i64, i64)]) -> DominantCoweight {
        DominantCoweight::new(vs.iter().map(|&(n, d)| q(n, d)).collect()).unwrap()
    }

    #[test]
    fn retraction_fixtures() {
        let mu = point(&[0, 1, 3]).newton_retraction();
        assert_eq!(mu, coweight(&[(0, 1), (-1, 1), (-2, 1)]));

        let with_gap =
            AdjointPoint::new(vec![Val::Infinite, Val::from_int(1)]).unwrap();
        assert_eq!(
            with_gap.newton_retraction(),
            coweight(&[(-1, 2), (-1, 2)])
        );

        assert_eq!(point(&[4]).newton_retraction(), coweight(&[(-4, 1)]));
    }

    #[test]
    fn constant_term_must_be_finite() {
        assert!(matches!(
            AdjointPoint::new(vec![Val::from_int(0), Val::Infinite]),
            Err(Error::InfiniteConstantTerm)
        ));
    }

    #[test]
    fn dominance_is_a_partial_order() {
        let a = coweight(&[(1, 1), (0, 1), (-1, 1)]);
        let b = coweight(&[(2, 1), (0, 1), (-2, 1)]);
        let c = coweight(&[(1, 1), (1, 1), (-1, 1)]); // different total
        assert!(a.dominated_by(&b).unwrap());
        assert!(!b.dominated_by(&a).unwrap());
        assert!(a.dominated_by(&a).unwrap());
        assert!(!a.dominated_by(&c).unwrap() && !c.dominated_by(&a).unwrap());
        assert!(coweight(&[(0, 1)]).dominated_by(&coweight(&[(0, 1), (0, 1)])).is_err());
    }

    #[test]
    fn point_lies_in_the_open_stratum_of_its_own_retraction() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..200 {
            let d = rng.gen_range(1..=5);
            let mut vals: Vec<Val> = (0..d)
                .map(|_| {
                    if rng.gen_bool(0.15) {
                        Val::Infinite
                    } else {
                        Val::Finite(q(rng.gen_range(-6..=6), rng.gen_range(1..=3)))
                    }
                })
                .collect();
            vals[d - 1] = Val::Finite(q(rng.gen_range(-6..=6), 1));
            let pt = AdjointPoint::new(vals).unwrap();
            let mu = pt.newton_retraction();
            assert!(pt.in_stratum(&mu, false).unwrap(), "open stratum: {pt}");
            assert!(pt.in_stratum(&mu, true).unwrap(), "closed stratum: {pt}");
        }
    }

    #[test]
    fn closed_strata_are_nested_along_dominance() {
        let small = coweight(&[(0, 1), (-1, 1), (-2, 1)]);
        let big = coweight(&[(0, 1), (0, 1), (-3, 1)]);
        assert!(small.dominated_by(&big).unwrap());
        let mut rng = StdRng::seed_from_u64(29);
        for _ in 0..200 {
            let vals = vec![
                Val::Finite(q(rng.gen_range(-2..=6), 1)),
                Val::Finite(q(rng.gen_range(-2..=6), 1)),
                Val::Finite(q(3, 1)),
            ];
            let pt = AdjointPoint::new(vals).unwrap();
            if pt.in_stratum(&small, true).unwrap() {
                assert!(pt.in_stratum(&big, true).unwrap(), "nesting failed at {pt}");
            }
        }
    }

    /// Independent oracle: expand char(X) = prod (X - lambda_i) over Q(pi)
    /// with random eigenvalues of known valuation; the retraction of the
    /// resulting coefficient point must be the sorted negated valuations.
    #[test]
    fn retraction_agrees_with_elementary_symmetric_oracle() {
        let mut rng = StdRng::seed_from_u64(31);
        for trial in 0..200 {
            let m = rng.gen_range(1..=3u32);
            let field = FieldSpec::new([2, 3, 5][trial % 3], m).unwrap();
            let d = rng.gen_range(1..=5);
            let mut lambdas = Vec::new();
            let mut expected: Vec<BigRational> = Vec::new();
            for _ in 0..d {
                let e = rng.gen_range(0..(3 * m) as i64);
                let mut u = rng.gen_range(1i64..=9);
                while u % field.p() as i64 == 0 {
                    u += 1;
                }
                let lambda = field.from_int(u) * &field.pi().pow(e).unwrap();
                expected.push(-q(e, m as i64));
                lambdas.push(lambda);
            }
            // poly = prod (X - lambda), coefficients low-to-high
            let mut poly: Vec<CoeffElem> = vec![field.one()];
            for l in &lambdas {
                let mut next = vec![field.zero(); poly.len() + 1];
                for (k, c) in poly.iter().enumerate() {
                    next[k + 1] = &next[k + 1] + c;
                    next[k] = &next[k] - &(c * l);
                }
                poly = next;
            }
            let vals: Vec<Val> = (1..=d)
                .map(|i| poly[d - i].valuation())
                .collect();
            let pt = AdjointPoint::new(vals).unwrap();
            expected.sort();
            expected.reverse();
            assert_eq!(
                pt.newton_retraction(),
                DominantCoweight::new(expected).unwrap(),
                "oracle mismatch at trial {trial}"
            );
        }
    }

    #[test]
    fn stratum_respects_infinite_coefficients() {
        // (inf, 2): in the closed stratum of (-1, -1) and of (0, -2)
        let pt = AdjointPoint::new(vec![Val::Infinite, Val::from_int(2)]).unwrap();
        assert!(pt.in_stratum(&coweight(&[(-1, 1), (-1, 1)]), true).unwrap());
        assert!(pt.in_stratum(&coweight(&[(0, 1), (-2, 1)]), true).unwrap());
        // open stratum of (0, -2) requires v(c_1) = 0 exactly
        assert!(!pt.in_stratum(&coweight(&[(0, 1), (-2, 1)]), false).unwrap());
        // open stratum of its own retraction (-1, -1) only needs v(c_1) >= 1
        assert!(pt.in_stratum(&coweight(&[(-1, 1), (-1, 1)]), false).unwrap());
    }
}
