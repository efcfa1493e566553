//! Combinatorial filtration types and their generic-degree invariants.
//!
//! A type records, for each of the e*f embeddings, the descending jump
//! sequence x_1 > ... > x_r with the ranks n_1 < ... < n_r = d of the
//! corresponding filtration steps. The quantity `generic_degree(i)` is the
//! filtration degree of a rank-i subspace in general position:
//!
//!   sum_psi (1/ef) [ sum_{j<r} (x_j - x_{j+1}) max(0, n_j + i - d) + x_r i ]
//!
//! The final term scales the *minimal* jump by the subspace rank i, not by d:
//! every rank-i subspace lies in the bottom filtration step, which contributes
//! x_r per dimension. The brute-force oracle in the tests pins this down.

use crate::adjoint::DominantCoweight;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiltrationType {
    d: usize,
    e: u32,
    f: u32,
    /// One entry per embedding: (jump, rank) pairs, jumps strictly decreasing,
    /// ranks strictly increasing up to d.
    embeddings: Vec<Vec<(i64, usize)>>,
}

impl FiltrationType {
    pub fn new(
        d: usize,
        e: u32,
        f: u32,
        embeddings: Vec<Vec<(i64, usize)>>,
    ) -> Result<FiltrationType> {
        if d == 0 {
            return Err(Error::Validation("d must be >= 1".into()));
        }
        if e == 0 || f == 0 {
            return Err(Error::Validation("e and f must be >= 1".into()));
        }
        if embeddings.len() != (e * f) as usize {
            return Err(Error::Validation(format!(
                "expected {} embeddings, got {}",
                e * f,
                embeddings.len()
            )));
        }
        for (psi, emb) in embeddings.iter().enumerate() {
            if emb.is_empty() {
                return Err(Error::Validation(format!("embedding {psi} has no steps")));
            }
            for w in emb.windows(2) {
                if w[0].0 <= w[1].0 {
                    return Err(Error::Validation(format!(
                        "embedding {psi}: jumps must strictly decrease"
                    )));
                }
                if w[0].1 >= w[1].1 {
                    return Err(Error::Validation(format!(
                        "embedding {psi}: ranks must strictly increase"
                    )));
                }
            }
            if emb[0].1 == 0 {
                return Err(Error::Validation(format!(
                    "embedding {psi}: zero-rank step"
                )));
            }
            if emb.last().unwrap().1 != d {
                return Err(Error::Validation(format!(
                    "embedding {psi}: bottom step must have rank d = {d}"
                )));
            }
        }
        Ok(FiltrationType {
            d,
            e,
            f,
            embeddings,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn embeddings(&self) -> &[Vec<(i64, usize)>] {
        &self.embeddings
    }

    pub fn has_nonzero_final_jump(&self) -> bool {
        self.embeddings.iter().any(|emb| emb.last().unwrap().0 != 0)
    }

    /// Filtration degree of a generic rank-i subspace, 1 <= i <= d.
    pub fn generic_degree(&self, i: usize) -> Result<BigRational> {
        if i == 0 || i > self.d {
            return Err(Error::IndexOutOfRange {
                index: i,
                max: self.d,
            });
        }
        let ef = BigInt::from(self.e as u64 * self.f as u64);
        let mut total = BigRational::zero();
        for emb in &self.embeddings {
            let mut acc = BigInt::zero();
            for w in emb.windows(2) {
                let (xj, nj) = w[0];
                let xj1 = w[1].0;
                let overlap = (nj + i).saturating_sub(self.d) as i64;
                acc += BigInt::from((xj - xj1) * overlap);
            }
            let xr = emb.last().unwrap().0;
            acc += BigInt::from(xr * i as i64);
            total += BigRational::new(acc, ef.clone());
        }
        Ok(total)
    }

    pub fn generic_degrees(&self) -> Vec<BigRational> {
        (1..=self.d)
            .map(|i| self.generic_degree(i).expect("in range"))
            .collect()
    }

    /// The common filtration degree of the full space, by telescoping the
    /// graded ranks. Always equals generic_degree(d).
    pub fn total_degree(&self) -> BigRational {
        let ef = BigInt::from(self.e as u64 * self.f as u64);
        let mut total = BigRational::zero();
        for emb in &self.embeddings {
            let mut acc = BigInt::zero();
            let mut prev_rank = 0usize;
            for &(x, n) in emb {
                acc += BigInt::from(x) * BigInt::from((n - prev_rank) as u64);
                prev_rank = n;
            }
            total += BigRational::new(acc, ef.clone());
        }
        total
    }

    /// The dominant coweight whose negated partial sums are f times the
    /// generic degrees; its closed Newton stratum is where weakly admissible
    /// filtrations of this type can exist.
    pub fn stratum_coweight(&self) -> DominantCoweight {
        let f = BigRational::from_integer(BigInt::from(self.f as u64));
        let l = self.generic_degrees();
        let mut entries = Vec::with_capacity(self.d);
        let mut prev = BigRational::zero();
        for li in l {
            entries.push(-(&f * (&li - &prev)));
            prev = li;
        }
        // generic degrees are convex in the rank, so this is dominant
        DominantCoweight::new(entries).expect("generic degrees are convex")
    }

    /// -<omega_i, stratum coweight> for i = 1..d, i.e. f * generic_degree(i):
    /// the valuation bounds cutting out the closed stratum.
    pub fn stratum_thresholds(&self) -> Vec<BigRational> {
        let f = BigRational::from_integer(BigInt::from(self.f as u64));
        self.generic_degrees().into_iter().map(|l| &f * l).collect()
    }

    /// Convexity bound: from s1 >= l_i and s1 + j1 s2 >= l_{i+j1} it follows
    /// that s1 + j2 s2 >= l_{i+j2} for any 0 <= j2 <= j1. Returns the verified
    /// inequality; errors if the preconditions do not hold.
    pub fn convexity_check(
        &self,
        s1: &BigRational,
        s2: &BigRational,
        i: usize,
        j1: usize,
        j2: usize,
    ) -> Result<bool> {
        if i == 0 || i + j1 > self.d {
            return Err(Error::IndexOutOfRange {
                index: i + j1,
                max: self.d,
            });
        }
        if j2 > j1 {
            return Err(Error::Validation(format!("j2 = {j2} exceeds j1 = {j1}")));
        }
        let j1q = BigRational::from_integer(BigInt::from(j1 as u64));
        let j2q = BigRational::from_integer(BigInt::from(j2 as u64));
        if *s1 < self.generic_degree(i)? || s1 + &j1q * s2 < self.generic_degree(i + j1)? {
            return Err(Error::Validation(
                "convexity preconditions not satisfied".into(),
            ));
        }
        Ok(s1 + &j2q * s2 >= self.generic_degree(i + j2)?)
    }
}
