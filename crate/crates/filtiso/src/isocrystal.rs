//! Isocrystals in standard form.
//!
//! An isocrystal with coefficients is pinned down by the matrix M of the f-th
//! Frobenius power on one distinguished component. We keep M in Jordan data:
//! a list of isotypic pieces with pairwise distinct nonzero eigenvalues, each
//! either a single Jordan block or a semisimple (scalar) piece, plus an
//! optional basis change P so that M = P J P^{-1}. Eigenvalues are supplied,
//! never computed, which keeps every slope an exact rational.
//!
//! A piece that is neither a single block nor scalar (say J_2(a) + J_1(a))
//! cannot be written with distinct eigenvalues and is rejected up front:
//! its lattice of invariant subspaces is not finitely generated in a way the
//! decision procedures downstream could scan.

use crate::error::{Error, Result};
use crate::field::{CoeffElem, FieldSpec, Val};
use crate::linalg::{MatrixF, Subspace};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use std::ops::Range;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PieceMode {
    /// One Jordan block of the given size.
    Block(usize),
    /// A scalar piece of the given multiplicity.
    Semisimple(usize),
}

impl PieceMode {
    pub fn size(&self) -> usize {
        match *self {
            PieceMode::Block(s) | PieceMode::Semisimple(s) => s,
        }
    }

    /// Whether every invariant subspace of the piece lies on the generalized
    /// eigenvector chain (true for blocks, and trivially for multiplicity 1).
    fn is_chain(&self) -> bool {
        match *self {
            PieceMode::Block(_) => true,
            PieceMode::Semisimple(s) => s == 1,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IsotypicPiece {
    pub eigenvalue: CoeffElem,
    pub mode: PieceMode,
}

/// The f-th Frobenius power on the distinguished component, in Jordan data.
#[derive(Clone, Debug)]
pub struct FrobeniusSpec {
    field: FieldSpec,
    f: u32,
    d: usize,
    pieces: Vec<IsotypicPiece>,
    offsets: Vec<usize>,
    basis_change: Option<(MatrixF, MatrixF)>, // (P, P^{-1})
}

/// A Frobenius-stable subspace together with its dimensions per piece.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StableSubspace {
    space: Subspace,
    piece_dims: Vec<usize>,
}

impl StableSubspace {
    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn piece_dims(&self) -> &[usize] {
        &self.piece_dims
    }

    pub fn rank(&self) -> usize {
        self.space.dim()
    }
}

/// One isoclinic constituent of the slope decomposition.
#[derive(Clone, Debug)]
pub struct SlopePiece {
    pub slope: BigRational,
    pub space: StableSubspace,
}

/// The stable subspaces of a Frobenius: a finite list when every piece is a
/// chain, otherwise one descriptor per dimension vector with a coordinate
/// representative (partial dimensions on a scalar piece sweep a Grassmannian).
#[derive(Clone, Debug)]
pub enum StableSubspaces {
    Finite(Vec<StableSubspace>),
    Families(Vec<Family>),
}

#[derive(Clone, Debug)]
pub struct Family {
    pub piece_dims: Vec<usize>,
    pub representative: StableSubspace,
    /// False only when some scalar piece is filled partially, i.e. the
    /// descriptor stands for infinitely many subspaces.
    pub is_single_point: bool,
}

impl FrobeniusSpec {
    pub fn new(
        field: FieldSpec,
        f: u32,
        pieces: Vec<IsotypicPiece>,
        basis_change: Option<MatrixF>,
    ) -> Result<FrobeniusSpec> {
        if f == 0 {
            return Err(Error::Validation("f must be >= 1".into()));
        }
        if pieces.is_empty() {
            return Err(Error::Validation("no isotypic pieces".into()));
        }
        for piece in &pieces {
            if piece.mode.size() == 0 {
                return Err(Error::Validation("isotypic piece of size 0".into()));
            }
            if piece.eigenvalue.field() != field {
                return Err(Error::FieldMismatch("eigenvalue".into()));
            }
            if piece.eigenvalue.is_zero() {
                return Err(Error::Validation("eigenvalue must be nonzero".into()));
            }
        }
        for (i, a) in pieces.iter().enumerate() {
            for b in &pieces[i + 1..] {
                if a.eigenvalue == b.eigenvalue {
                    return Err(Error::UnsupportedFrobenius(format!(
                        "eigenvalue {} appears in two pieces; a derogatory \
                         non-scalar isotypic piece is outside the supported classes",
                        a.eigenvalue
                    )));
                }
            }
        }
        let d: usize = pieces.iter().map(|p| p.mode.size()).sum();
        let mut offsets = Vec::with_capacity(pieces.len());
        let mut off = 0;
        for p in &pieces {
            offsets.push(off);
            off += p.mode.size();
        }
        let basis_change = match basis_change {
            None => None,
            Some(p) => {
                if p.rows() != d || p.cols() != d {
                    return Err(Error::DimensionMismatch(format!(
                        "basis change must be {d}x{d}"
                    )));
                }
                if p.field() != field {
                    return Err(Error::FieldMismatch("basis change".into()));
                }
                let inv = p.inverse()?;
                Some((p, inv))
            }
        };
        Ok(FrobeniusSpec {
            field,
            f,
            d,
            pieces,
            offsets,
            basis_change,
        })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn pieces(&self) -> &[IsotypicPiece] {
        &self.pieces
    }

    pub fn basis_change(&self) -> Option<&MatrixF> {
        self.basis_change.as_ref().map(|(p, _)| p)
    }

    pub fn piece_range(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i] + self.pieces[i].mode.size()
    }

    /// All pieces are chains: the stable-subspace lattice is finite.
    pub fn is_chain_class(&self) -> bool {
        self.pieces.iter().all(|p| p.mode.is_chain())
    }

    pub fn jordan_matrix(&self) -> MatrixF {
        let mut m = MatrixF::zero(self.field, self.d, self.d);
        for (i, piece) in self.pieces.iter().enumerate() {
            let r = self.piece_range(i);
            for k in r.clone() {
                m.set(k, k, piece.eigenvalue.clone());
            }
            if let PieceMode::Block(s) = piece.mode {
                for k in 0..s.saturating_sub(1) {
                    m.set(r.start + k, r.start + k + 1, self.field.one());
                }
            }
        }
        m
    }

    pub fn matrix(&self) -> MatrixF {
        let j = self.jordan_matrix();
        match &self.basis_change {
            None => j,
            Some((p, pinv)) => p.mul(&j).mul(pinv),
        }
    }

    pub(crate) fn to_internal(&self, s: &Subspace) -> Subspace {
        match &self.basis_change {
            None => s.clone(),
            Some((_, pinv)) => s.apply(pinv),
        }
    }

    pub(crate) fn to_ambient(&self, s: &Subspace) -> Subspace {
        match &self.basis_change {
            None => s.clone(),
            Some((p, _)) => s.apply(p),
        }
    }

    pub(crate) fn to_ambient_columns(&self, cols: &MatrixF) -> MatrixF {
        match &self.basis_change {
            None => cols.clone(),
            Some((p, _)) => p.mul(cols),
        }
    }

    /// Coordinate subspace of the Jordan frame spanned by the first dims[i]
    /// basis vectors of each piece; in external coordinates.
    pub fn chain_subspace(&self, dims: &[usize]) -> Result<StableSubspace> {
        if dims.len() != self.pieces.len() {
            return Err(Error::DimensionMismatch("one dimension per piece".into()));
        }
        let mut cols = Vec::new();
        for (i, (&k, piece)) in dims.iter().zip(&self.pieces).enumerate() {
            if k > piece.mode.size() {
                return Err(Error::DimensionMismatch(format!(
                    "piece {i} has size {}, requested {k}",
                    piece.mode.size()
                )));
            }
            let r = self.piece_range(i);
            for j in 0..k {
                let mut v = vec![self.field.zero(); self.d];
                v[r.start + j] = self.field.one();
                cols.push(v);
            }
        }
        let space = if cols.is_empty() {
            Subspace::zero(self.field, self.d)
        } else {
            let internal = MatrixF::from_columns(self.field, cols)?;
            Subspace::from_columns(&self.to_ambient_columns(&internal))
        };
        Ok(StableSubspace {
            space,
            piece_dims: dims.to_vec(),
        })
    }

    /// Internal-coordinate split of a stable subspace into its piece parts.
    /// Errors with NotStable when the subspace is not Frobenius-stable.
    pub(crate) fn split_internal(&self, internal: &Subspace) -> Result<Vec<Subspace>> {
        let mut parts = Vec::with_capacity(self.pieces.len());
        let mut total = 0;
        for (i, piece) in self.pieces.iter().enumerate() {
            let r = self.piece_range(i);
            let coord = self.coordinate_span(r.clone());
            let part = internal.intersect(&coord);
            total += part.dim();
            if piece.mode.is_chain() && !self.is_chain_prefix(&part, i) {
                return Err(Error::NotStable);
            }
            parts.push(part);
        }
        if total != internal.dim() {
            return Err(Error::NotStable);
        }
        Ok(parts)
    }

    fn coordinate_span(&self, r: Range<usize>) -> Subspace {
        if r.is_empty() {
            return Subspace::zero(self.field, self.d);
        }
        let mut cols = Vec::new();
        for j in r {
            let mut v = vec![self.field.zero(); self.d];
            v[j] = self.field.one();
            cols.push(v);
        }
        Subspace::from_columns(&MatrixF::from_columns(self.field, cols).expect("columns"))
    }

    fn is_chain_prefix(&self, part: &Subspace, piece: usize) -> bool {
        let r = self.piece_range(piece);
        let k = part.dim();
        let prefix = self.coordinate_span(r.start..r.start + k);
        *part == prefix
    }

    /// Piece dimensions of a stable subspace given in external coordinates.
    pub fn split_dims(&self, space: &Subspace) -> Result<Vec<usize>> {
        let parts = self.split_internal(&self.to_internal(space))?;
        Ok(parts.iter().map(|s| s.dim()).collect())
    }

    pub fn stable_subspace(&self, space: &Subspace) -> Result<StableSubspace> {
        Ok(StableSubspace {
            piece_dims: self.split_dims(space)?,
            space: space.clone(),
        })
    }

    /// Smallest stable subspace containing `internal` (internal coordinates).
    pub(crate) fn stable_closure_internal(&self, internal: &Subspace) -> Subspace {
        let mut cols: Vec<Vec<CoeffElem>> = Vec::new();
        for (i, piece) in self.pieces.iter().enumerate() {
            let r = self.piece_range(i);
            // projection of the subspace onto this piece's coordinates
            let mut proj_cols = Vec::new();
            for c in 0..internal.dim() {
                let col = internal.basis().column(c);
                let mut v = vec![self.field.zero(); self.d];
                let mut nonzero = false;
                for j in r.clone() {
                    if !col[j].is_zero() {
                        nonzero = true;
                    }
                    v[j] = col[j].clone();
                }
                if nonzero {
                    proj_cols.push(v);
                }
            }
            if proj_cols.is_empty() {
                continue;
            }
            let proj = Subspace::from_columns(
                &MatrixF::from_columns(self.field, proj_cols).expect("columns"),
            );
            match piece.mode {
                PieceMode::Semisimple(_) => {
                    for c in 0..proj.dim() {
                        cols.push(proj.basis().column(c));
                    }
                }
                PieceMode::Block(_) => {
                    // invariant closure inside a block: the chain up to the
                    // highest coordinate present
                    let mut top = r.start;
                    for c in 0..proj.dim() {
                        let col = proj.basis().column(c);
                        for j in r.clone() {
                            if !col[j].is_zero() {
                                top = top.max(j + 1);
                            }
                        }
                    }
                    for j in r.start..top {
                        let mut v = vec![self.field.zero(); self.d];
                        v[j] = self.field.one();
                        cols.push(v);
                    }
                }
            }
        }
        if cols.is_empty() {
            return Subspace::zero(self.field, self.d);
        }
        Subspace::from_columns(&MatrixF::from_columns(self.field, cols).expect("columns"))
    }

    /// t_N(U) = v(det M|_U) / f = (1/f) sum_i dims_i * v(eigenvalue_i).
    pub fn newton_number(&self, u: &StableSubspace) -> BigRational {
        self.newton_number_for_dims(&u.piece_dims)
    }

    /// Same, from the per-piece dimensions alone.
    pub fn newton_number_for_dims(&self, dims: &[usize]) -> BigRational {
        let mut acc = BigRational::zero();
        for (k, piece) in dims.iter().zip(&self.pieces) {
            if *k == 0 {
                continue;
            }
            let Val::Finite(v) = piece.eigenvalue.valuation() else {
                unreachable!("eigenvalues are nonzero");
            };
            acc += v * BigRational::from_integer(BigInt::from(*k as u64));
        }
        acc / BigRational::from_integer(BigInt::from(self.f as u64))
    }

    /// Span of the first caps[i] Jordan coordinates of each piece, one cap per
    /// piece; internal coordinates.
    pub(crate) fn capped_span_internal(&self, caps: &[usize]) -> Subspace {
        debug_assert_eq!(caps.len(), self.pieces.len());
        let mut cols = Vec::new();
        for (i, &k) in caps.iter().enumerate() {
            let r = self.piece_range(i);
            debug_assert!(k <= r.len());
            for j in r.start..r.start + k {
                let mut v = vec![self.field.zero(); self.d];
                v[j] = self.field.one();
                cols.push(v);
            }
        }
        if cols.is_empty() {
            return Subspace::zero(self.field, self.d);
        }
        Subspace::from_columns(&MatrixF::from_columns(self.field, cols).expect("columns"))
    }

    /// Projection onto piece i's coordinates, as a size_i x d matrix over the
    /// internal frame.
    pub(crate) fn piece_projection(&self, i: usize) -> MatrixF {
        let r = self.piece_range(i);
        MatrixF::from_fn(self.field, r.len(), self.d, |row, col| {
            if col == r.start + row {
                self.field.one()
            } else {
                self.field.zero()
            }
        })
    }

    /// Newton slope of a nonzero stable subspace: t_N(U) / rank(U).
    pub fn newton_slope(&self, u: &StableSubspace) -> Result<BigRational> {
        if u.rank() == 0 {
            return Err(Error::ZeroSubspace);
        }
        Ok(self.newton_number(u) / BigRational::from_integer(BigInt::from(u.rank() as u64)))
    }

    /// det of M restricted to a stable subspace, computed from the matrix.
    /// Slower than `newton_number` but independent of the Jordan data; the
    /// tests cross-check the two.
    pub fn restriction_det(&self, u: &Subspace) -> Result<CoeffElem> {
        if u.dim() == 0 {
            return Ok(self.field.one());
        }
        let b = u.basis();
        let mb = self.matrix().mul(b);
        let a = b.solve_columns(&mb).ok_or(Error::NotStable)?;
        a.det()
    }

    /// Isoclinic decomposition: pieces grouped by v(eigenvalue)/f, in strictly
    /// increasing slope order. Independent of the input piece order.
    pub fn slope_decomposition(&self) -> Vec<SlopePiece> {
        let f = BigRational::from_integer(BigInt::from(self.f as u64));
        let mut by_slope: Vec<(BigRational, Vec<usize>)> = Vec::new();
        for (i, piece) in self.pieces.iter().enumerate() {
            let Val::Finite(v) = piece.eigenvalue.valuation() else {
                unreachable!("eigenvalues are nonzero");
            };
            let slope = v / &f;
            match by_slope.iter_mut().find(|(s, _)| *s == slope) {
                Some((_, idx)) => idx.push(i),
                None => by_slope.push((slope, vec![i])),
            }
        }
        by_slope.sort_by(|a, b| a.0.cmp(&b.0));
        by_slope
            .into_iter()
            .map(|(slope, idx)| {
                let dims: Vec<usize> = (0..self.pieces.len())
                    .map(|i| {
                        if idx.contains(&i) {
                            self.pieces[i].mode.size()
                        } else {
                            0
                        }
                    })
                    .collect();
                SlopePiece {
                    slope,
                    space: self.chain_subspace(&dims).expect("piece dims in range"),
                }
            })
            .collect()
    }

    /// Enumerate the stable subspaces (chain class), or the dimension-vector
    /// families with coordinate representatives otherwise.
    pub fn enumerate_stable(&self) -> StableSubspaces {
        let sizes: Vec<usize> = self.pieces.iter().map(|p| p.mode.size()).collect();
        let mut vectors = vec![Vec::new()];
        for &s in &sizes {
            let mut next = Vec::with_capacity(vectors.len() * (s + 1));
            for v in &vectors {
                for k in 0..=s {
                    let mut w = v.clone();
                    w.push(k);
                    next.push(w);
                }
            }
            vectors = next;
        }
        if self.is_chain_class() {
            StableSubspaces::Finite(
                vectors
                    .into_iter()
                    .map(|dims| self.chain_subspace(&dims).expect("dims in range"))
                    .collect(),
            )
        } else {
            StableSubspaces::Families(
                vectors
                    .into_iter()
                    .map(|dims| {
                        let is_single_point = dims
                            .iter()
                            .zip(&self.pieces)
                            .all(|(&k, p)| p.mode.is_chain() || k == 0 || k == p.mode.size());
                        Family {
                            representative: self.chain_subspace(&dims).expect("dims in range"),
                            piece_dims: dims,
                            is_single_point,
                        }
                    })
                    .collect(),
            )
        }
    }

    /// Whether `map` intertwines self with `other`: map . M = M' . map.
    pub fn intertwines(&self, other: &FrobeniusSpec, map: &MatrixF) -> bool {
        map.rows() == other.d
            && map.cols() == self.d
            && self.f == other.f
            && map.mul(&self.matrix()) == other.matrix().mul(map)
    }

    /// Morphisms preserve isoclinic constituents: the image of each slope
    /// piece lands in the matching slope piece of the target (or vanishes
    /// when the target has no such slope).
    pub fn morphism_slope_check(&self, other: &FrobeniusSpec, map: &MatrixF) -> Result<bool> {
        if !self.intertwines(other, map) {
            return Err(Error::NotIntertwining);
        }
        let target = other.slope_decomposition();
        for piece in self.slope_decomposition() {
            let image = piece.space.space().apply(map);
            match target.iter().find(|t| t.slope == piece.slope) {
                Some(t) => {
                    if !t.space.space().contains(&image) {
                        return Ok(false);
                    }
                }
                None => {
                    if !image.is_zero() {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// The restriction to a stable subspace, as a spec in the subspace's own
    /// coordinates, together with the embedding columns (external coords).
    pub fn restrict_to(&self, u: &StableSubspace) -> Result<(FrobeniusSpec, MatrixF)> {
        if u.rank() == 0 {
            return Err(Error::ZeroSubspace);
        }
        let internal = self.to_internal(&u.space);
        let parts = self.split_internal(&internal)?;
        let mut pieces = Vec::new();
        let mut cols: Vec<Vec<CoeffElem>> = Vec::new();
        for (i, (piece, part)) in self.pieces.iter().zip(&parts).enumerate() {
            let k = part.dim();
            if k == 0 {
                continue;
            }
            let mode = match piece.mode {
                PieceMode::Block(_) => PieceMode::Block(k),
                PieceMode::Semisimple(_) => PieceMode::Semisimple(k),
            };
            pieces.push(IsotypicPiece {
                eigenvalue: piece.eigenvalue.clone(),
                mode,
            });
            match piece.mode {
                PieceMode::Block(_) => {
                    // chain prefix: unit vectors, in chain order
                    let r = self.piece_range(i);
                    for j in 0..k {
                        let mut v = vec![self.field.zero(); self.d];
                        v[r.start + j] = self.field.one();
                        cols.push(v);
                    }
                }
                PieceMode::Semisimple(_) => {
                    for c in 0..k {
                        cols.push(part.basis().column(c));
                    }
                }
            }
        }
        let embed_internal = MatrixF::from_columns(self.field, cols)?;
        let embed = self.to_ambient_columns(&embed_internal);
        let spec = FrobeniusSpec::new(self.field, self.f, pieces, None)?;
        Ok((spec, embed))
    }

    /// The quotient by a stable subspace, as a spec in quotient coordinates,
    /// with the projection (quotient coords <- external coords) and a lift
    /// (external coords <- quotient coords) splitting it.
    pub fn quotient_by(&self, u: &StableSubspace) -> Result<(FrobeniusSpec, MatrixF, MatrixF)> {
        let internal = self.to_internal(&u.space);
        let parts = self.split_internal(&internal)?;
        let mut pieces = Vec::new();
        let mut sub_cols: Vec<Vec<CoeffElem>> = Vec::new();
        let mut rest_cols: Vec<Vec<CoeffElem>> = Vec::new();
        for (i, (piece, part)) in self.pieces.iter().zip(&parts).enumerate() {
            let k = part.dim();
            let s = piece.mode.size();
            let r = self.piece_range(i);
            if k < s {
                let mode = match piece.mode {
                    PieceMode::Block(_) => PieceMode::Block(s - k),
                    PieceMode::Semisimple(_) => PieceMode::Semisimple(s - k),
                };
                pieces.push(IsotypicPiece {
                    eigenvalue: piece.eigenvalue.clone(),
                    mode,
                });
            }
            match piece.mode {
                PieceMode::Block(_) => {
                    for j in 0..s {
                        let mut v = vec![self.field.zero(); self.d];
                        v[r.start + j] = self.field.one();
                        if j < k {
                            sub_cols.push(v);
                        } else {
                            rest_cols.push(v);
                        }
                    }
                }
                PieceMode::Semisimple(_) => {
                    for c in 0..k {
                        sub_cols.push(part.basis().column(c));
                    }
                    let piece_span = self.coordinate_span(r.clone());
                    let ext = part.complement_within(&piece_span);
                    for c in 0..ext.cols() {
                        rest_cols.push(ext.column(c));
                    }
                }
            }
        }
        if pieces.is_empty() {
            return Err(Error::Validation("quotient by the full space".into()));
        }
        let k = sub_cols.len();
        let mut all = sub_cols;
        all.extend(rest_cols);
        let c = MatrixF::from_columns(self.field, all)?;
        let cinv = c.inverse()?;
        // last d-k rows of C^{-1}, composed with the internal-coordinate map
        let mut proj = MatrixF::from_fn(self.field, self.d - k, self.d, |i, j| {
            cinv.get(k + i, j).clone()
        });
        if let Some((_, pinv)) = &self.basis_change {
            proj = proj.mul(pinv);
        }
        let lift_internal = MatrixF::from_fn(self.field, self.d, self.d - k, |i, j| {
            c.get(i, k + j).clone()
        });
        let lift = self.to_ambient_columns(&lift_internal);
        let spec = FrobeniusSpec::new(self.field, self.f, pieces, None)?;
        Ok((spec, proj, lift))
    }

    pub fn extend_to(&self, target: FieldSpec) -> Result<FrobeniusSpec> {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                Ok(IsotypicPiece {
                    eigenvalue: p.eigenvalue.extend_to(target)?,
                    mode: p.mode.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let basis_change = match &self.basis_change {
            None => None,
            Some((p, _)) => Some(p.extend_to(target)?),
        };
        FrobeniusSpec::new(target, self.f, pieces, basis_change)
    }
}
