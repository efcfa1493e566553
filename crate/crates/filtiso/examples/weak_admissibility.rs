//! Weak admissibility verdicts with certificates. Includes a case where the
//! violating subspace lies across two isotypic pieces, invisible to any
//! per-piece bookkeeping, and a family the interval bound honestly leaves
//! undecided.

use filtiso::field::FieldSpec;
use filtiso::filtered::{FilteredIsocrystal, Flag, WaCertificate};
use filtiso::filtype::FiltrationType;
use filtiso::isocrystal::{FrobeniusSpec, IsotypicPiece, PieceMode};
use filtiso::linalg::Subspace;
use filtiso::theorem::reference_split_rank3;

fn main() -> filtiso::Result<()> {
    // split rank 3, standard coordinate flag: the slope-0 line sits inside
    // F^1, carrying degree 2 against Newton number 0
    let case = reference_split_rank3(5);
    let field = case.frobenius.field();
    let e = |i: usize| unit(field, 3, i);
    let standard = Flag::new(vec![
        (2, e(0)),
        (1, e(0).sum(&e(1))),
        (0, Subspace::full(field, 3)),
    ])?;
    let obj = FilteredIsocrystal::new(case.frobenius.clone(), case.ftype.clone(), vec![standard])?;
    report("standard flag", &obj);

    // a generic line avoids both failure conditions
    let line = Subspace::from_vectors(field, vec![vec![field.one(), field.one(), field.one()]])?;
    let generic = Flag::new(vec![
        (2, line.clone()),
        (1, line.sum(&e(1))),
        (0, Subspace::full(field, 3)),
    ])?;
    let obj = FilteredIsocrystal::new(case.frobenius, case.ftype, vec![generic])?;
    report("generic flag", &obj);

    // pi-eigenplane plus a unit line, F^1 the diagonal through both pieces:
    // deg(span(e1, e3)) = 1 > 1/2 = t_N, found only by hull candidates
    let ramified = FieldSpec::new(5, 2)?;
    let frob = FrobeniusSpec::new(
        ramified,
        1,
        vec![
            IsotypicPiece { eigenvalue: ramified.pi(), mode: PieceMode::Semisimple(2) },
            IsotypicPiece { eigenvalue: ramified.one(), mode: PieceMode::Block(1) },
        ],
        None,
    )?;
    let ftype = FiltrationType::new(3, 1, 1, vec![vec![(1, 1), (0, 3)]])?;
    let diag = Subspace::from_vectors(
        ramified,
        vec![vec![ramified.one(), ramified.zero(), ramified.one()]],
    )?;
    let flag = Flag::new(vec![(1, diag), (0, Subspace::full(ramified, 3))])?;
    let obj = FilteredIsocrystal::new(frob.clone(), ftype.clone(), flags_once(flag))?;
    report("cross-piece diagonal", &obj);

    // two opposed embeddings: each admits a violating member, no single
    // member violates both, and the family bound cannot close the gap
    let ftype2 = FiltrationType::new(3, 2, 1, vec![vec![(1, 1), (0, 3)], vec![(1, 1), (0, 3)]])?;
    let frob2 = FrobeniusSpec::new(
        ramified,
        1,
        vec![
            IsotypicPiece { eigenvalue: ramified.pi(), mode: PieceMode::Semisimple(2) },
            IsotypicPiece { eigenvalue: ramified.one(), mode: PieceMode::Block(1) },
        ],
        None,
    )?;
    let d1 = Subspace::from_vectors(
        ramified,
        vec![vec![ramified.one(), ramified.zero(), ramified.one()]],
    )?;
    let d2 = Subspace::from_vectors(
        ramified,
        vec![vec![ramified.zero(), ramified.one(), ramified.one()]],
    )?;
    let flags = vec![
        Flag::new(vec![(1, d1), (0, Subspace::full(ramified, 3))])?,
        Flag::new(vec![(1, d2), (0, Subspace::full(ramified, 3))])?,
    ];
    let obj = FilteredIsocrystal::new(frob2, ftype2, flags)?;
    report("opposed embeddings", &obj);
    Ok(())
}

fn report(label: &str, obj: &FilteredIsocrystal) {
    let v = obj.weak_admissibility();
    println!("{label}: {}", v.status);
    match &v.certificate {
        Some(WaCertificate::ViolatingSubspace { subspace, degree, newton_number }) => {
            println!(
                "  certificate: rank {} subspace with deg {} > t_N {}",
                subspace.rank(),
                degree,
                newton_number
            );
        }
        Some(WaCertificate::DeterminantMismatch { degree, newton_number }) => {
            println!("  determinant: deg {} != t_N {}", degree, newton_number);
        }
        None => {}
    }
    for dims in &v.undecided {
        println!("  undecided family with piece dims {dims:?}");
    }
}

fn unit(field: FieldSpec, n: usize, i: usize) -> Subspace {
    let v: Vec<_> = (0..n)
        .map(|j| if j == i { field.one() } else { field.zero() })
        .collect();
    Subspace::from_vectors(field, vec![v]).expect("unit vector")
}

fn flags_once(flag: Flag) -> Vec<Flag> {
    vec![flag]
}
