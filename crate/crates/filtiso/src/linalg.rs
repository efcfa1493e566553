//! Dense exact linear algebra over the coefficient field.
//!
//! Everything here is Gaussian elimination: the matrices are tiny (rank <= a
//! dozen) and the field arithmetic is exact, so there is no pivoting strategy
//! beyond "first nonzero entry".

use crate::error::{Error, Result};
use crate::field::{CoeffElem, FieldSpec};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatrixF {
    rows: usize,
    cols: usize,
    field: FieldSpec,
    e: Vec<CoeffElem>, // row-major
}

impl MatrixF {
    pub fn zero(field: FieldSpec, rows: usize, cols: usize) -> MatrixF {
        MatrixF {
            rows,
            cols,
            field,
            e: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> MatrixF {
        let mut m = MatrixF::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_fn(
        field: FieldSpec,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> CoeffElem,
    ) -> MatrixF {
        let mut e = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                e.push(f(i, j));
            }
        }
        MatrixF {
            rows,
            cols,
            field,
            e,
        }
    }

    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<CoeffElem>>) -> Result<MatrixF> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let e: Vec<CoeffElem> = rows.into_iter().flatten().collect();
        if e.iter().any(|x| x.field() != field) {
            return Err(Error::FieldMismatch("matrix entries".into()));
        }
        Ok(MatrixF {
            rows: r,
            cols: c,
            field,
            e,
        })
    }

    pub fn from_columns(field: FieldSpec, cols: Vec<Vec<CoeffElem>>) -> Result<MatrixF> {
        let m = MatrixF::from_rows(field, cols)?;
        Ok(m.transpose())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn get(&self, i: usize, j: usize) -> &CoeffElem {
        &self.e[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CoeffElem) {
        self.e[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<CoeffElem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn select_columns(&self, idx: &[usize]) -> MatrixF {
        MatrixF::from_fn(self.field, self.rows, idx.len(), |i, j| {
            self.get(i, idx[j]).clone()
        })
    }

    pub fn transpose(&self) -> MatrixF {
        MatrixF::from_fn(self.field, self.cols, self.rows, |i, j| {
            self.get(j, i).clone()
        })
    }

    pub fn hcat(&self, rhs: &MatrixF) -> MatrixF {
        assert_eq!(self.rows, rhs.rows, "hcat row mismatch");
        MatrixF::from_fn(self.field, self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                rhs.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn mul(&self, rhs: &MatrixF) -> MatrixF {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        MatrixF::from_fn(self.field, self.rows, rhs.cols, |i, j| {
            let mut acc = self.field.zero();
            for k in 0..self.cols {
                acc = &acc + &(self.get(i, k) * rhs.get(k, j));
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[CoeffElem]) -> Vec<CoeffElem> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = self.field.zero();
                for (k, vk) in v.iter().enumerate() {
                    acc = &acc + &(self.get(i, k) * vk);
                }
                acc
            })
            .collect()
    }

    pub fn scale(&self, s: &CoeffElem) -> MatrixF {
        MatrixF::from_fn(self.field, self.rows, self.cols, |i, j| self.get(i, j) * s)
    }

    pub fn sub(&self, rhs: &MatrixF) -> MatrixF {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        MatrixF::from_fn(self.field, self.rows, self.cols, |i, j| {
            self.get(i, j) - rhs.get(i, j)
        })
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(|x| x.is_zero())
    }

    /// Reduced row echelon form and the pivot column indices.
    pub fn rref(&self) -> (MatrixF, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            for j in 0..m.cols {
                let tmp = m.get(row, j).clone();
                let moved = m.get(pr, j).clone();
                m.set(row, j, moved);
                m.set(pr, j, tmp);
            }
            let inv = m.get(row, col).inv().expect("pivot is nonzero");
            for j in col..m.cols {
                m.set(row, j, m.get(row, j) * &inv);
            }
            for r in 0..m.rows {
                if r != row && !m.get(r, col).is_zero() {
                    let f = m.get(r, col).clone();
                    for j in col..m.cols {
                        let v = m.get(r, j) - &(m.get(row, j) * &f);
                        m.set(r, j, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, as columns. Empty matrix when injective.
    pub fn kernel_basis(&self) -> MatrixF {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = MatrixF::zero(self.field, self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            out.set(fc, k, self.field.one());
            for (prow, &pc) in pivots.iter().enumerate() {
                out.set(pc, k, -r.get(prow, fc));
            }
        }
        out
    }

    pub fn det(&self) -> Result<CoeffElem> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "determinant of {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = self.field.one();
        for col in 0..n {
            let Some(pr) = (col..n).find(|&r| !m.get(r, col).is_zero()) else {
                return Ok(self.field.zero());
            };
            if pr != col {
                for j in 0..n {
                    let tmp = m.get(col, j).clone();
                    let moved = m.get(pr, j).clone();
                    m.set(col, j, moved);
                    m.set(pr, j, tmp);
                }
                det = -det;
            }
            let pivot = m.get(col, col).clone();
            det = &det * &pivot;
            let inv = pivot.inv().expect("pivot is nonzero");
            for r in col + 1..n {
                if !m.get(r, col).is_zero() {
                    let f = m.get(r, col) * &inv;
                    for j in col..n {
                        let v = m.get(r, j) - &(m.get(col, j) * &f);
                        m.set(r, j, v);
                    }
                }
            }
        }
        Ok(det)
    }

    /// Solve self * X = rhs where self has full column rank.
    /// None when some column of rhs is outside the column space.
    pub fn solve_columns(&self, rhs: &MatrixF) -> Option<MatrixF> {
        assert_eq!(self.rows, rhs.rows, "solve dimension mismatch");
        let aug = self.hcat(rhs);
        let (r, pivots) = aug.rref();
        let base_rank = pivots.iter().filter(|&&c| c < self.cols).count();
        if base_rank < self.cols || pivots.iter().any(|&c| c >= self.cols) {
            // not full column rank, or inconsistent
            if pivots.iter().any(|&c| c >= self.cols) {
                return None;
            }
            panic!("solve_columns requires full column rank");
        }
        let mut x = MatrixF::zero(self.field, self.cols, rhs.cols);
        for (prow, &pc) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(pc, j, r.get(prow, self.cols + j).clone());
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Result<MatrixF> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("inverse of non-square matrix".into()));
        }
        if self.rank() < self.rows {
            return Err(Error::SingularMatrix);
        }
        Ok(self
            .solve_columns(&MatrixF::identity(self.field, self.rows))
            .expect("invertible"))
    }

    /// Entry-wise image in a larger coefficient field.
    pub fn extend_to(&self, target: FieldSpec) -> Result<MatrixF> {
        let mut e = Vec::with_capacity(self.e.len());
        for x in &self.e {
            e.push(x.extend_to(target)?);
        }
        Ok(MatrixF {
            rows: self.rows,
            cols: self.cols,
            field: target,
            e,
        })
    }
}

/// A subspace of F^n held in a canonical basis (reduced column echelon form),
/// so equal subspaces compare equal structurally.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: MatrixF, // ambient x dim, canonical
}

impl Subspace {
    pub fn zero(field: FieldSpec, ambient: usize) -> Subspace {
        Subspace {
            ambient,
            basis: MatrixF::zero(field, ambient, 0),
        }
    }

    pub fn full(field: FieldSpec, ambient: usize) -> Subspace {
        Subspace {
            ambient,
            basis: MatrixF::identity(field, ambient),
        }
    }

    /// Span of the columns; reduces to the canonical form.
    pub fn from_columns(cols: &MatrixF) -> Subspace {
        let (r, pivots) = cols.transpose().rref();
        let k = pivots.len();
        let basis = MatrixF::from_fn(cols.field(), cols.rows(), k, |i, j| r.get(j, i).clone());
        Subspace {
            ambient: cols.rows(),
            basis,
        }
    }

    pub fn from_vectors(field: FieldSpec, vs: Vec<Vec<CoeffElem>>) -> Result<Subspace> {
        Ok(Subspace::from_columns(&MatrixF::from_columns(field, vs)?))
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn field(&self) -> FieldSpec {
        self.basis.field()
    }

    pub fn basis(&self) -> &MatrixF {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn contains_vector(&self, v: &[CoeffElem]) -> bool {
        let m = MatrixF::from_columns(self.field(), vec![v.to_vec()]).expect("vector");
        self.basis.hcat(&m).rank() == self.dim()
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        assert_eq!(self.ambient, other.ambient);
        self.basis.hcat(&other.basis).rank() == self.dim()
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        Subspace::from_columns(&self.basis.hcat(&other.basis))
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        if self.is_zero() || other.is_zero() {
            return Subspace::zero(self.field(), self.ambient);
        }
        let k = self.basis.hcat(&other.basis).kernel_basis();
        // columns of basis * (top block of k) span the intersection
        let top = MatrixF::from_fn(self.field(), self.dim(), k.cols(), |i, j| {
            k.get(i, j).clone()
        });
        Subspace::from_columns(&self.basis.mul(&top))
    }

    /// Image under a linear map given by its matrix.
    pub fn apply(&self, m: &MatrixF) -> Subspace {
        Subspace::from_columns(&m.mul(&self.basis))
    }

    /// The line spanned by the first canonical basis vector (self must be nonzero).
    pub fn leading_line(&self) -> Subspace {
        assert!(!self.is_zero());
        Subspace::from_columns(&self.basis.select_columns(&[0]))
    }

    /// Columns extending self's basis to a basis of `within` (which must contain self).
    /// Deterministic: greedily picks columns of `within`'s canonical basis.
    pub fn complement_within(&self, within: &Subspace) -> MatrixF {
        debug_assert!(within.contains(self));
        let mut acc = self.basis.clone();
        let mut picked = Vec::new();
        for j in 0..within.dim() {
            if acc.cols() == within.dim() {
                break;
            }
            let cand = within.basis.select_columns(&[j]);
            let grown = acc.hcat(&cand);
            if grown.rank() > acc.rank() {
                acc = grown;
                picked.push(j);
            }
        }
        within.basis.select_columns(&picked)
    }

    pub fn extend_to(&self, target: FieldSpec) -> Result<Subspace> {
        Ok(Subspace {
            ambient: self.ambient,
            basis: self.basis.extend_to(target)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn f22() -> FieldSpec {
        FieldSpec::new(2, 2).unwrap()
    }

    fn rand_matrix(field: FieldSpec, rng: &mut StdRng, rows: usize, cols: usize) -> MatrixF {
        MatrixF::from_fn(field, rows, cols, |_, _| {
            let a = rng.gen_range(-4i64..=4);
            let b = rng.gen_range(-2i64..=2);
            field.from_int(a) + field.pi().scale_int(b)
        })
    }

    trait ScaleInt {
        fn scale_int(&self, n: i64) -> CoeffElem;
    }
    impl ScaleInt for CoeffElem {
        fn scale_int(&self, n: i64) -> CoeffElem {
            self * &self.field().from_int(n)
        }
    }

    #[test]
    fn solve_three_by_three_and_substitute() {
        let f = f22();
        let pi = f.pi();
        let a = MatrixF::from_rows(
            f,
            vec![
                vec![f.from_int(1), pi.clone(), f.from_int(0)],
                vec![f.from_int(2), f.from_int(1), -pi.clone()],
                vec![pi.clone(), f.from_int(0), f.from_int(3)],
            ],
        )
        .unwrap();
        let b = MatrixF::from_columns(f, vec![vec![f.one(), pi.clone(), f.from_int(-1)]]).unwrap();
        let x = a.solve_columns(&b).expect("consistent");
        assert_eq!(a.mul(&x), b);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), MatrixF::identity(f, 3));
    }

    #[test]
    fn rank_nullity_and_kernel_annihilation() {
        let f = f22();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..40 {
            let rows = rng.gen_range(1..=4);
            let cols = rng.gen_range(1..=4);
            let m = rand_matrix(f, &mut rng, rows, cols);
            let k = m.kernel_basis();
            assert_eq!(m.rank() + k.cols(), cols);
            assert!(m.mul(&k).is_zero());
        }
    }

    #[test]
    fn determinant_is_multiplicative() {
        let f = f22();
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..25 {
            let a = rand_matrix(f, &mut rng, 3, 3);
            let b = rand_matrix(f, &mut rng, 3, 3);
            let lhs = a.mul(&b).det().unwrap();
            let rhs = &a.det().unwrap() * &b.det().unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn subspace_lattice_is_modular() {
        let f = f22();
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..40 {
            let uc = rng.gen_range(0..=3);
            let wc = rng.gen_range(0..=3);
            let u = Subspace::from_columns(&rand_matrix(f, &mut rng, 4, uc));
            let w = Subspace::from_columns(&rand_matrix(f, &mut rng, 4, wc));
            let meet = u.intersect(&w);
            let join = u.sum(&w);
            assert_eq!(meet.dim() + join.dim(), u.dim() + w.dim());
            assert!(u.contains(&meet) && w.contains(&meet));
            assert!(join.contains(&u) && join.contains(&w));
            // canonical form: same span from a shuffled generating set compares equal
            let regen = u.sum(&u);
            assert_eq!(regen, u);
        }
    }

    #[test]
    fn complement_extends_to_full_basis() {
        let f = f22();
        let u = Subspace::from_vectors(
            f,
            vec![vec![f.one(), f.pi(), f.from_int(0), f.from_int(2)]],
        )
        .unwrap();
        let full = Subspace::full(f, 4);
        let ext = u.complement_within(&full);
        assert_eq!(ext.cols(), 3);
        assert_eq!(u.basis().hcat(&ext).rank(), 4);
    }
}
