//! The existence theorem as an executable laboratory.
//!
//! The statement under test: a weakly admissible filtration of a given type
//! exists on an isocrystal if and only if the isocrystal's adjoint-quotient
//! point lies in the closed Newton stratum attached to the type. Concretely,
//! writing w_1 <= ... <= w_d for the Frobenius root valuations and l_i for the
//! generic degrees, existence is equivalent to
//!
//!   w_1 + ... + w_i >= f l_i   for all i, with equality at i = d.
//!
//! `wa_exists` decides the inequality, then substantiates it: a seeded random
//! search for a witness flag on the positive side, an explicit obstruction
//! (determinant mismatch or a violated subset-sum) on the negative side. The
//! obstruction is realized by a stable subspace that violates the degree
//! bound under EVERY flag of the type, because the filtration degree of a
//! rank-i subspace is at least l_i regardless of position.
//!
//! `theorem_sweep` grinds this over a deterministic grid of types and root
//! tuples and reports any anomaly: a predicted witness that the search budget
//! cannot find, or a predicted obstruction that some sampled flag survives.

use crate::adjoint::AdjointPoint;
use crate::error::{Error, Result};
use crate::field::{CoeffElem, FieldSpec, Val};
use crate::filtered::{Flag, FilteredIsocrystal, WaStatus};
use crate::filtype::FiltrationType;
use crate::isocrystal::{FrobeniusSpec, IsotypicPiece, PieceMode, StableSubspace};
use crate::linalg::Subspace;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

/// Coefficient valuations of the characteristic polynomial of the f-th
/// Frobenius power, straight from the Jordan data. Basis changes drop out.
pub fn adjoint_image(frob: &FrobeniusSpec) -> AdjointPoint {
    let field = frob.field();
    // expand prod (T - lambda)^size; coeffs[k] multiplies T^k
    let mut coeffs: Vec<CoeffElem> = vec![field.one()];
    for piece in frob.pieces() {
        for _ in 0..piece.mode.size() {
            let mut next = vec![field.zero(); coeffs.len() + 1];
            for (k, c) in coeffs.iter().enumerate() {
                next[k + 1] = &next[k + 1] + c;
                next[k] = &next[k] - &(c * &piece.eigenvalue);
            }
            coeffs = next;
        }
    }
    let d = frob.d();
    let vals: Vec<Val> = (1..=d).map(|i| coeffs[d - i].valuation()).collect();
    AdjointPoint::new(vals).expect("nonzero eigenvalues give a finite determinant")
}

/// The isocrystal with prescribed root valuations: one Jordan block per
/// valuation class, eigenvalue pi^(m v) over the smallest tower that makes
/// every valuation integral in pi.
pub fn frobenius_for_roots(p: u64, f: u32, roots: &[BigRational]) -> Result<FrobeniusSpec> {
    if roots.is_empty() {
        return Err(Error::Validation("no root valuations".into()));
    }
    let mut m = BigInt::one();
    for w in roots {
        m = m.lcm(w.denom());
    }
    let m: u32 = m
        .try_into()
        .map_err(|_| Error::Validation("valuation denominators too large".into()))?;
    let field = FieldSpec::new(p, m)?;
    let mut sorted = roots.to_vec();
    sorted.sort();
    let mut pieces: Vec<IsotypicPiece> = Vec::new();
    let mut classes: Vec<(BigRational, usize)> = Vec::new();
    for w in sorted {
        match classes.last_mut() {
            Some((v, k)) if *v == w => *k += 1,
            _ => classes.push((w, 1)),
        }
    }
    for (v, k) in classes {
        pieces.push(IsotypicPiece {
            eigenvalue: field.unit_times_power(BigRational::one(), &v)?,
            mode: PieceMode::Block(k),
        });
    }
    FrobeniusSpec::new(field, f, pieces, None)
}

/// Point of the adjoint quotient, by roots or by coefficient valuations.
#[derive(Clone, Debug)]
pub enum PointInput {
    Roots(Vec<BigRational>),
    Coefficients(Vec<Val>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Obstruction {
    /// Total root valuation differs from f times the total degree.
    Determinant { lhs: BigRational, rhs: BigRational },
    /// The i smallest roots sum below the threshold f l_i; the subspace
    /// carried by those roots is then over-filtered under every flag.
    SubsetSum {
        indices: Vec<usize>,
        sum: BigRational,
        bound: BigRational,
    },
}

#[derive(Clone, Debug)]
pub struct ExistenceReport {
    pub predicted: bool,
    /// Root valuations sorted increasingly.
    pub roots: Vec<BigRational>,
    pub frobenius: FrobeniusSpec,
    pub witness: Option<FilteredIsocrystal>,
    pub obstruction: Option<Obstruction>,
    pub seeds_tried: u32,
}

/// Decide existence of a weakly admissible filtration of the given type on
/// the isocrystal with the given adjoint point, and substantiate the verdict.
/// A positive prediction the seeded search cannot realize within `budget`
/// flags is an error, never a silent downgrade.
pub fn wa_exists(
    p: u64,
    ftype: &FiltrationType,
    point: PointInput,
    seed: u64,
    budget: u32,
) -> Result<ExistenceReport> {
    let d = ftype.d();
    let mut roots = match point {
        PointInput::Roots(r) => {
            if r.len() != d {
                return Err(Error::Validation(format!(
                    "expected {d} root valuations, got {}",
                    r.len()
                )));
            }
            r
        }
        PointInput::Coefficients(vals) => {
            let pt = AdjointPoint::new(vals)?;
            if pt.dim() != d {
                return Err(Error::Validation(format!(
                    "expected a point of rank {d}, got {}",
                    pt.dim()
                )));
            }
            pt.newton_retraction()
                .entries()
                .iter()
                .map(|mu| -mu)
                .collect()
        }
    };
    roots.sort();
    let thresholds = ftype.stratum_thresholds();
    let mut prefix = BigRational::zero();
    let mut first_violation: Option<usize> = None;
    let mut prefixes = Vec::with_capacity(d);
    for (i, w) in roots.iter().enumerate() {
        prefix += w;
        prefixes.push(prefix.clone());
        if prefix < thresholds[i] && first_violation.is_none() {
            first_violation = Some(i);
        }
    }
    let det_ok = prefixes[d - 1] == thresholds[d - 1];
    let predicted = det_ok && first_violation.is_none();
    let frobenius = frobenius_for_roots(p, ftype.f(), &roots)?;

    if !predicted {
        let obstruction = if !det_ok {
            Obstruction::Determinant {
                lhs: prefixes[d - 1].clone(),
                rhs: thresholds[d - 1].clone(),
            }
        } else {
            let i = first_violation.expect("some condition failed");
            Obstruction::SubsetSum {
                indices: (0..=i).collect(),
                sum: prefixes[i].clone(),
                bound: thresholds[i].clone(),
            }
        };
        return Ok(ExistenceReport {
            predicted: false,
            roots,
            frobenius,
            witness: None,
            obstruction: Some(obstruction),
            seeds_tried: 0,
        });
    }

    let mut rng = sampling::seeded(seed);
    for attempt in 1..=budget {
        let flags = sampling::random_flags(frobenius.field(), ftype, &mut rng);
        let obj = FilteredIsocrystal::new(frobenius.clone(), ftype.clone(), flags)
            .expect("sampled flags realize the type");
        if obj.weak_admissibility().status == WaStatus::Admissible {
            return Ok(ExistenceReport {
                predicted: true,
                roots,
                frobenius,
                witness: Some(obj),
                obstruction: None,
                seeds_tried: attempt,
            });
        }
    }
    Err(Error::SeedBudgetExhausted { budget: budget.into() })
}

/// The stable subspace carried by the `count` smallest root valuations of a
/// Frobenius built by `frobenius_for_roots` (pieces in increasing valuation
/// order). Its Newton number is the subset sum; its degree is at least
/// l_count under every flag.
pub fn obstruction_subspace(frob: &FrobeniusSpec, count: usize) -> Result<StableSubspace> {
    if count == 0 || count > frob.d() {
        return Err(Error::IndexOutOfRange {
            index: count,
            max: frob.d(),
        });
    }
    let mut remaining = count;
    let dims: Vec<usize> = frob
        .pieces()
        .iter()
        .map(|p| {
            let k = remaining.min(p.mode.size());
            remaining -= k;
            k
        })
        .collect();
    frob.chain_subspace(&dims)
}

/// Seeded sampling of flags and subspaces; deterministic given the seed.
pub mod sampling {
    use super::*;
    use crate::linalg::MatrixF;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub fn seeded(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    pub fn random_invertible<R: Rng>(field: FieldSpec, n: usize, rng: &mut R) -> MatrixF {
        loop {
            let m = MatrixF::from_fn(field, n, n, |_, _| field.from_int(rng.gen_range(-3i64..=3)));
            if m.rank() == n {
                return m;
            }
        }
    }

    pub fn random_subspace<R: Rng>(
        field: FieldSpec,
        ambient: usize,
        dim: usize,
        rng: &mut R,
    ) -> Subspace {
        let basis = random_invertible(field, ambient, rng);
        let idx: Vec<usize> = (0..dim).collect();
        Subspace::from_columns(&basis.select_columns(&idx))
    }

    /// One random flag per embedding, realizing the type exactly.
    pub fn random_flags<R: Rng>(
        field: FieldSpec,
        ftype: &FiltrationType,
        rng: &mut R,
    ) -> Vec<Flag> {
        ftype
            .embeddings()
            .iter()
            .map(|emb| {
                let basis = random_invertible(field, ftype.d(), rng);
                let steps = emb
                    .iter()
                    .map(|&(x, rank)| {
                        let idx: Vec<usize> = (0..rank).collect();
                        (x, Subspace::from_columns(&basis.select_columns(&idx)))
                    })
                    .collect();
                Flag::new(steps).expect("prefix spans are nested with the type's ranks")
            })
            .collect()
    }
}

/// A named Frobenius + filtration type pair with hand-verified behavior.
#[derive(Clone, Debug)]
pub struct ReferenceCase {
    pub name: &'static str,
    pub frobenius: FrobeniusSpec,
    pub ftype: FiltrationType,
}

/// Split rank 3: diag(1, p, p^2) with a full flag of jumps (2, 1, 0).
/// Weak admissibility holds iff F^1 misses the slope-0 line span(e1) and
/// F^2 is not inside span(e1, e2).
pub fn reference_split_rank3(p: u64) -> ReferenceCase {
    let field = FieldSpec::new(p, 1).expect("prime");
    let pieces = [0i64, 1, 2]
        .iter()
        .map(|&a| IsotypicPiece {
            eigenvalue: field.from_int(p as i64).pow(a).expect("power"),
            mode: PieceMode::Block(1),
        })
        .collect();
    ReferenceCase {
        name: "split-rank-3",
        frobenius: FrobeniusSpec::new(field, 1, pieces, None).expect("distinct eigenvalues"),
        ftype: FiltrationType::new(3, 1, 1, vec![vec![(2, 1), (1, 2), (0, 3)]]).expect("type"),
    }
}

pub fn split_rank3_predicate(obj: &FilteredIsocrystal) -> bool {
    let field = obj.frob().field();
    let steps = obj.flags()[0].steps();
    let f2 = &steps[0].1;
    let f1 = &steps[1].1;
    let e1 = Subspace::from_vectors(field, vec![unit_vec(field, 3, 0)]).expect("e1");
    let e12 = Subspace::from_vectors(field, vec![unit_vec(field, 3, 0), unit_vec(field, 3, 1)])
        .expect("e12");
    f1.intersect(&e1).dim() == 0 && !e12.contains(f2)
}

/// Repeated slope zero: diag(1, 1, p^3) with a full flag of jumps (2, 1, 0).
/// The plane F^1 always meets the slope-0 eigenplane in a line of degree
/// >= 1 > 0 = t_N, so no filtration of this type is weakly admissible.
pub fn reference_repeated_rank3(p: u64) -> ReferenceCase {
    let field = FieldSpec::new(p, 1).expect("prime");
    let pieces = vec![
        IsotypicPiece {
            eigenvalue: field.one(),
            mode: PieceMode::Semisimple(2),
        },
        IsotypicPiece {
            eigenvalue: field.from_int(p as i64).pow(3).expect("cube"),
            mode: PieceMode::Block(1),
        },
    ];
    ReferenceCase {
        name: "repeated-slope-rank-3",
        frobenius: FrobeniusSpec::new(field, 1, pieces, None).expect("distinct eigenvalues"),
        ftype: FiltrationType::new(3, 1, 1, vec![vec![(2, 1), (1, 2), (0, 3)]]).expect("type"),
    }
}

/// The eigenplane of slope 0 intersected with F^1: every certificate line
/// for the repeated case lives here.
pub fn repeated_rank3_meeting_locus(obj: &FilteredIsocrystal) -> Subspace {
    let field = obj.frob().field();
    let f1 = &obj.flags()[0].steps()[1].1;
    let e12 = Subspace::from_vectors(field, vec![unit_vec(field, 3, 0), unit_vec(field, 3, 1)])
        .expect("e12");
    f1.intersect(&e12)
}

/// Ramified rank 2: diag(1, p) over a quadratic tower, two embeddings with
/// jumps (1, 0) each. Weak admissibility holds iff no embedding's F^1 equals
/// the slope-0 line span(e1).
pub fn reference_ramified_rank2(p: u64) -> ReferenceCase {
    let field = FieldSpec::new(p, 2).expect("prime");
    let pieces = vec![
        IsotypicPiece {
            eigenvalue: field.one(),
            mode: PieceMode::Block(1),
        },
        IsotypicPiece {
            eigenvalue: field.from_int(p as i64),
            mode: PieceMode::Block(1),
        },
    ];
    ReferenceCase {
        name: "ramified-rank-2",
        frobenius: FrobeniusSpec::new(field, 1, pieces, None).expect("distinct eigenvalues"),
        ftype: FiltrationType::new(2, 2, 1, vec![vec![(1, 1), (0, 2)], vec![(1, 1), (0, 2)]])
            .expect("type"),
    }
}

pub fn ramified_rank2_predicate(obj: &FilteredIsocrystal) -> bool {
    let field = obj.frob().field();
    let e1 = Subspace::from_vectors(field, vec![unit_vec(field, 2, 0)]).expect("e1");
    obj.flags().iter().all(|flag| flag.steps()[0].1 != e1)
}

/// The two closing filtration types used for stratum geometry: a full flag
/// and a two-step flag of the same rank, with coweights (0,-1,-2) and
/// (0,-1,-1).
pub fn closing_types() -> Vec<FiltrationType> {
    vec![
        FiltrationType::new(3, 1, 1, vec![vec![(2, 1), (1, 2), (0, 3)]]).expect("full flag"),
        FiltrationType::new(3, 1, 1, vec![vec![(1, 2), (0, 3)]]).expect("two-step"),
    ]
}

pub fn reference_suite(p: u64) -> Vec<ReferenceCase> {
    vec![
        reference_split_rank3(p),
        reference_repeated_rank3(p),
        reference_ramified_rank2(p),
    ]
}

fn unit_vec(field: FieldSpec, n: usize, i: usize) -> Vec<CoeffElem> {
    (0..n)
        .map(|j| if j == i { field.one() } else { field.zero() })
        .collect()
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub p: u64,
    pub d: usize,
    pub e: u32,
    pub f: u32,
    pub seed: u64,
    /// Witness attempts per predicted-positive cell.
    pub budget: u32,
    /// Flags sampled per predicted-negative cell; each must be inadmissible.
    pub negative_samples: usize,
}

impl SweepConfig {
    pub fn new(p: u64, d: usize, e: u32, f: u32) -> SweepConfig {
        SweepConfig {
            p,
            d,
            e,
            f,
            seed: 0,
            budget: 64,
            negative_samples: 20,
        }
    }
}

#[derive(Clone, Debug)]
pub enum CellOutcome {
    /// A weakly admissible witness was found after this many seeds.
    Witness { seeds_tried: u32 },
    /// The obstruction held on every sampled flag.
    Obstruction {
        obstruction: Obstruction,
        samples_inadmissible: usize,
    },
    Anomaly { reason: String },
}

#[derive(Clone, Debug)]
pub struct SweepRecord {
    pub profiles: Vec<Vec<(i64, usize)>>,
    pub roots: Vec<BigRational>,
    pub predicted: bool,
    pub outcome: CellOutcome,
    pub elapsed_ms: u64,
}

impl SweepRecord {
    pub fn is_anomaly(&self) -> bool {
        matches!(self.outcome, CellOutcome::Anomaly { .. })
    }
}

#[derive(Clone, Debug)]
pub struct SweepSummary {
    pub records: Vec<SweepRecord>,
    pub total: usize,
    pub predicted_true: usize,
    pub predicted_false: usize,
    pub anomalies: usize,
}

/// Deterministic grid of (type, root tuple) cells for one configuration:
/// the boundary tuple of each type, sum-preserving transfers in both
/// directions, and determinant-breaking shifts. Root denominators stay <= 4.
fn sweep_cells(cfg: &SweepConfig) -> Vec<(FiltrationType, Vec<BigRational>)> {
    let profiles = type_profiles(cfg.d);
    let n_emb = (cfg.e * cfg.f) as usize;
    let mut types: Vec<FiltrationType> = profiles
        .iter()
        .map(|p| {
            FiltrationType::new(cfg.d, cfg.e, cfg.f, vec![p.clone(); n_emb])
                .expect("profiles are valid")
        })
        .collect();
    if n_emb >= 2 {
        // a few mixed-profile types
        for pair in profiles.windows(2) {
            let mut embs = vec![pair[0].clone(); n_emb];
            embs[0] = pair[1].clone();
            types.push(FiltrationType::new(cfg.d, cfg.e, cfg.f, embs).expect("mixed profiles"));
        }
    }

    let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    let mut eps_list = vec![
        q(1, 4),
        q(1, 2),
        q(3, 4),
        q(1, 1),
        q(5, 4),
        q(3, 2),
        q(7, 4),
        q(2, 1),
        q(5, 2),
        q(3, 1),
    ];
    if cfg.e * cfg.f == 1 {
        // thirds stay within denominator 4 only over integral boundaries
        eps_list.push(q(1, 3));
        eps_list.push(q(2, 3));
    }

    let mut cells = Vec::new();
    for ftype in types {
        let mu = ftype.stratum_coweight();
        let boundary: Vec<BigRational> = mu.entries().iter().map(|m| -m).collect();
        let d = boundary.len();
        let push = |roots: Vec<BigRational>, acc: &mut Vec<(FiltrationType, Vec<BigRational>)>| {
            let mut sorted = roots;
            sorted.sort();
            if !acc
                .iter()
                .any(|(t, r)| *t == ftype && *r == sorted)
            {
                acc.push((ftype.clone(), sorted));
            }
        };
        push(boundary.clone(), &mut cells);
        for eps in &eps_list {
            // sum-preserving transfers: lowering a prefix breaks existence,
            // raising it preserves existence
            let mut lower = boundary.clone();
            lower[0] -= eps;
            *lower.last_mut().unwrap() += eps;
            push(lower, &mut cells);
            let mut raise = boundary.clone();
            raise[0] += eps;
            *raise.last_mut().unwrap() -= eps;
            push(raise, &mut cells);
            if d >= 3 {
                let mut mid = boundary.clone();
                mid[0] -= eps;
                mid[1] += eps;
                push(mid, &mut cells);
            }
            // determinant breakers
            let mut high = boundary.clone();
            *high.last_mut().unwrap() += eps;
            push(high, &mut cells);
            let mut low = boundary.clone();
            low[0] -= eps;
            push(low, &mut cells);
        }
        let up: Vec<BigRational> = boundary.iter().map(|w| w + BigRational::one()).collect();
        push(up, &mut cells);
        let down: Vec<BigRational> = boundary.iter().map(|w| w - BigRational::one()).collect();
        push(down, &mut cells);
    }
    cells
}

fn type_profiles(d: usize) -> Vec<Vec<(i64, usize)>> {
    match d {
        2 => vec![
            vec![(0, 2)],
            vec![(1, 1), (0, 2)],
            vec![(2, 1), (0, 2)],
            vec![(3, 1), (0, 2)],
            // nonzero final jump
            vec![(2, 1), (1, 2)],
        ],
        3 => vec![
            vec![(0, 3)],
            vec![(1, 1), (0, 3)],
            vec![(2, 1), (0, 3)],
            vec![(1, 2), (0, 3)],
            vec![(2, 1), (1, 2), (0, 3)],
            vec![(3, 1), (1, 2), (0, 3)],
            // nonzero final jump
            vec![(3, 1), (2, 2), (1, 3)],
        ],
        _ => {
            // a full flag and a coarse flag with small jumps
            let full: Vec<(i64, usize)> = (0..d).map(|i| ((d - 1 - i) as i64, i + 1)).collect();
            let coarse = vec![(1i64, 1usize), (0, d)];
            vec![full, coarse]
        }
    }
}

fn run_cell(
    cfg: &SweepConfig,
    index: usize,
    ftype: &FiltrationType,
    roots: &[BigRational],
) -> SweepRecord {
    let started = std::time::Instant::now();
    let mut record = run_cell_inner(cfg, index, ftype, roots);
    record.elapsed_ms = started.elapsed().as_millis() as u64;
    record
}

fn run_cell_inner(
    cfg: &SweepConfig,
    index: usize,
    ftype: &FiltrationType,
    roots: &[BigRational],
) -> SweepRecord {
    let cell_seed = cfg
        .seed
        .wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let profiles = ftype.embeddings().to_vec();
    let report = match wa_exists(
        cfg.p,
        ftype,
        PointInput::Roots(roots.to_vec()),
        cell_seed,
        cfg.budget,
    ) {
        Ok(r) => r,
        Err(Error::SeedBudgetExhausted { budget }) => {
            return SweepRecord {
                profiles,
                roots: roots.to_vec(),
                elapsed_ms: 0,
                predicted: true,
                outcome: CellOutcome::Anomaly {
                    reason: format!("no witness within {budget} seeds"),
                },
            };
        }
        Err(e) => {
            return SweepRecord {
                profiles,
                roots: roots.to_vec(),
                elapsed_ms: 0,
                predicted: false,
                outcome: CellOutcome::Anomaly {
                    reason: format!("cell setup failed: {e}"),
                },
            };
        }
    };

    if report.predicted {
        // cross-check: the witness frobenius retracts onto the input point
        let retraction = adjoint_image(&report.frobenius).newton_retraction();
        // roots increase, so their negatives are already in retraction order
        let expect: Vec<BigRational> = report.roots.iter().map(|w| -w).collect();
        if retraction.entries() != expect.as_slice() {
            return SweepRecord {
                profiles,
                roots: roots.to_vec(),
                elapsed_ms: 0,
                predicted: true,
                outcome: CellOutcome::Anomaly {
                    reason: "witness frobenius does not retract onto the input point".into(),
                },
            };
        }
        return SweepRecord {
            profiles,
            roots: roots.to_vec(),
            elapsed_ms: 0,
            predicted: true,
            outcome: CellOutcome::Witness {
                seeds_tried: report.seeds_tried,
            },
        };
    }

    let obstruction = report.obstruction.clone().expect("negative cells carry one");
    let mut rng = sampling::seeded(cell_seed ^ 0x5DEE_CE66);
    let mut ok = 0usize;
    for _ in 0..cfg.negative_samples {
        let flags = sampling::random_flags(report.frobenius.field(), ftype, &mut rng);
        let obj = FilteredIsocrystal::new(report.frobenius.clone(), ftype.clone(), flags)
            .expect("sampled flags realize the type");
        if obj.weak_admissibility().status != WaStatus::Inadmissible {
            return SweepRecord {
                profiles,
                roots: roots.to_vec(),
                elapsed_ms: 0,
                predicted: false,
                outcome: CellOutcome::Anomaly {
                    reason: "a sampled flag is not inadmissible on a negative cell".into(),
                },
            };
        }
        if let Obstruction::SubsetSum { indices, .. } = &obstruction {
            let u = obstruction_subspace(&report.frobenius, indices.len())
                .expect("subset within rank");
            let deg = obj.filtration_degree(u.space()).expect("stable subspace");
            let tn = report.frobenius.newton_number(&u);
            if deg <= tn {
                return SweepRecord {
                    profiles,
                    roots: roots.to_vec(),
                    elapsed_ms: 0,
                    predicted: false,
                    outcome: CellOutcome::Anomaly {
                        reason: "obstruction subspace fails to violate the degree bound".into(),
                    },
                };
            }
        }
        ok += 1;
    }
    SweepRecord {
        profiles,
        roots: roots.to_vec(),
        elapsed_ms: 0,
        predicted: false,
        outcome: CellOutcome::Obstruction {
            obstruction,
            samples_inadmissible: ok,
        },
    }
}

/// Run the full grid for one configuration in parallel.
pub fn theorem_sweep(cfg: &SweepConfig) -> SweepSummary {
    let cells = sweep_cells(cfg);
    let records: Vec<SweepRecord> = cells
        .par_iter()
        .enumerate()
        .map(|(i, (ftype, roots))| run_cell(cfg, i, ftype, roots))
        .collect();
    let total = records.len();
    let predicted_true = records.iter().filter(|r| r.predicted).count();
    let predicted_false = total - predicted_true;
    let anomalies = records.iter().filter(|r| r.is_anomaly()).count();
    SweepSummary {
        records,
        total,
        predicted_true,
        predicted_false,
        anomalies,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn adjoint_image_of_split_rank3() {
        let case = reference_split_rank3(5);
        let pt = adjoint_image(&case.frobenius);
        let vals: Vec<Val> = vec![Val::from_int(0), Val::from_int(1), Val::from_int(3)];
        assert_eq!(pt.vals(), vals.as_slice());
        assert_eq!(
            pt.newton_retraction().entries(),
            &[q(0, 1), q(-1, 1), q(-2, 1)]
        );
    }

    // (T - 2)^2 = T^2 - 4T + 4 over p = 2: the linear coefficient has
    // valuation 2, above the subset bound 1, yet the retraction still
    // recovers the root valuations (1, 1) thanks to the hull.
    #[test]
    fn retraction_survives_binomial_cancellation() {
        let field = FieldSpec::new(2, 1).unwrap();
        let frob = FrobeniusSpec::new(
            field,
            1,
            vec![IsotypicPiece {
                eigenvalue: field.from_int(2),
                mode: PieceMode::Block(2),
            }],
            None,
        )
        .unwrap();
        let pt = adjoint_image(&frob);
        assert_eq!(pt.vals(), &[Val::from_int(2), Val::from_int(2)]);
        assert_eq!(pt.newton_retraction().entries(), &[q(-1, 1), q(-1, 1)]);
    }

    #[test]
    fn retraction_round_trip_on_random_frobenii() {
        let mut rng = sampling::seeded(91);
        for _ in 0..100 {
            let denoms = [1i64, 1, 2, 3];
            let count = rng.gen_range(1..=4usize);
            let roots: Vec<BigRational> = (0..count)
                .map(|_| {
                    let den = denoms[rng.gen_range(0..denoms.len())];
                    q(rng.gen_range(-4i64..=6), den)
                })
                .collect();
            let frob = frobenius_for_roots(3, 1, &roots).unwrap();
            let mut expect = roots.clone();
            expect.sort();
            let got: Vec<BigRational> = adjoint_image(&frob)
                .newton_retraction()
                .entries()
                .iter()
                .map(|m| -m)
                .collect();
            assert_eq!(got, expect);
        }
    }

    #[test]
    fn frobenius_construction_groups_valuation_classes() {
        let roots = vec![q(1, 2), q(0, 1), q(1, 2), q(2, 1)];
        let frob = frobenius_for_roots(5, 1, &roots).unwrap();
        assert_eq!(frob.field().m(), 2);
        let sizes: Vec<usize> = frob.pieces().iter().map(|p| p.mode.size()).collect();
        assert_eq!(sizes, vec![1, 2, 1]);
        assert!(frob.is_chain_class());
    }

    #[test]
    fn boundary_point_yields_a_witness() {
        let ftype = closing_types().remove(0);
        let report = wa_exists(
            5,
            &ftype,
            PointInput::Roots(vec![q(0, 1), q(1, 1), q(2, 1)]),
            17,
            64,
        )
        .unwrap();
        assert!(report.predicted);
        let witness = report.witness.expect("witness on the positive side");
        assert_eq!(witness.weak_admissibility().status, WaStatus::Admissible);
        assert!(report.seeds_tried >= 1);
    }

    #[test]
    fn coefficient_input_agrees_with_root_input() {
        let ftype = closing_types().remove(0);
        let by_coeffs = wa_exists(
            5,
            &ftype,
            PointInput::Coefficients(vec![
                Val::from_int(0),
                Val::from_int(1),
                Val::from_int(3),
            ]),
            17,
            64,
        )
        .unwrap();
        assert!(by_coeffs.predicted);
        assert_eq!(by_coeffs.roots, vec![q(0, 1), q(1, 1), q(2, 1)]);
    }

    #[test]
    fn subset_sum_obstruction_is_realized_on_every_sample() {
        let ftype = closing_types().remove(0); // thresholds 0, 1, 3
        let report = wa_exists(
            5,
            &ftype,
            PointInput::Roots(vec![q(-1, 2), q(1, 2), q(3, 1)]),
            3,
            8,
        )
        .unwrap();
        assert!(!report.predicted);
        let Some(Obstruction::SubsetSum { indices, sum, bound }) = report.obstruction else {
            panic!("expected a subset-sum obstruction");
        };
        assert_eq!(indices, vec![0]);
        assert_eq!(sum, q(-1, 2));
        assert_eq!(bound, q(0, 1));
        let u = obstruction_subspace(&report.frobenius, 1).unwrap();
        assert_eq!(report.frobenius.newton_number(&u), q(-1, 2));
        let mut rng = sampling::seeded(23);
        for _ in 0..10 {
            let flags = sampling::random_flags(report.frobenius.field(), &ftype, &mut rng);
            let obj =
                FilteredIsocrystal::new(report.frobenius.clone(), ftype.clone(), flags).unwrap();
            assert!(obj.filtration_degree(u.space()).unwrap() > q(-1, 2));
            assert_eq!(obj.weak_admissibility().status, WaStatus::Inadmissible);
        }
    }

    #[test]
    fn determinant_obstruction_when_sums_differ() {
        let ftype = closing_types().remove(0);
        let report = wa_exists(
            5,
            &ftype,
            PointInput::Roots(vec![q(0, 1), q(1, 1), q(3, 1)]),
            3,
            8,
        )
        .unwrap();
        assert!(!report.predicted);
        assert_eq!(
            report.obstruction,
            Some(Obstruction::Determinant {
                lhs: q(4, 1),
                rhs: q(3, 1),
            })
        );
    }

    #[test]
    fn reference_predicates_match_verdicts() {
        let split = reference_split_rank3(5);
        let mut rng = sampling::seeded(29);
        let mut seen_admissible = 0;
        let mut seen_inadmissible = 0;
        for _ in 0..40 {
            let flags = sampling::random_flags(split.frobenius.field(), &split.ftype, &mut rng);
            let obj =
                FilteredIsocrystal::new(split.frobenius.clone(), split.ftype.clone(), flags)
                    .unwrap();
            let verdict = obj.weak_admissibility();
            assert_ne!(verdict.status, WaStatus::Undecided);
            let predicted = split_rank3_predicate(&obj);
            assert_eq!(predicted, verdict.status == WaStatus::Admissible);
            if predicted {
                seen_admissible += 1;
            } else {
                seen_inadmissible += 1;
            }
        }
        assert!(seen_admissible > 0);

        let repeated = reference_repeated_rank3(5);
        for _ in 0..20 {
            let flags =
                sampling::random_flags(repeated.frobenius.field(), &repeated.ftype, &mut rng);
            let obj = FilteredIsocrystal::new(
                repeated.frobenius.clone(),
                repeated.ftype.clone(),
                flags,
            )
            .unwrap();
            let verdict = obj.weak_admissibility();
            assert_eq!(verdict.status, WaStatus::Inadmissible);
            seen_inadmissible += 1;
        }
        assert!(seen_inadmissible > 20);
    }

    #[test]
    fn mini_sweep_runs_clean() {
        let mut cfg = SweepConfig::new(5, 2, 1, 1);
        cfg.budget = 32;
        cfg.negative_samples = 5;
        cfg.seed = 7;
        let summary = theorem_sweep(&cfg);
        assert!(summary.total >= 40, "got {} cells", summary.total);
        assert_eq!(summary.anomalies, 0);
        assert!(summary.predicted_true >= 5);
        assert!(summary.predicted_false >= 10);
    }
}
