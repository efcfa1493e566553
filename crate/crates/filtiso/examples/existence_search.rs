//! One cell of the existence question: given root valuations and a
//! filtration type, predict by prefix sums, then substantiate with either a
//! found witness or an explicit obstruction.

use filtiso::filtered::FilteredIsocrystal;
use filtiso::theorem::{
    obstruction_subspace, sampling, wa_exists, Obstruction, PointInput,
};
use filtiso::filtype::FiltrationType;
use num_rational::BigRational;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn main() -> filtiso::Result<()> {
    let ftype = FiltrationType::new(3, 1, 1, vec![vec![(2, 1), (1, 2), (0, 3)]])?;

    // boundary cell: prefix sums meet the thresholds 0, 1, 3 exactly
    let report = wa_exists(5, &ftype, PointInput::Roots(vec![q(0, 1), q(1, 1), q(2, 1)]), 11, 64)?;
    println!(
        "roots (0, 1, 2): predicted {}, witness after {} seed(s)",
        report.predicted, report.seeds_tried
    );

    // first prefix dips below 0: the smallest-valuation line obstructs
    let report = wa_exists(
        5,
        &ftype,
        PointInput::Roots(vec![q(-1, 2), q(1, 2), q(3, 1)]),
        11,
        64,
    )?;
    match report.obstruction.as_ref().expect("negative cell") {
        Obstruction::SubsetSum { indices, sum, bound } => {
            println!(
                "roots (-1/2, 1/2, 3): prefix over {indices:?} is {sum} < {bound}"
            );
        }
        Obstruction::Determinant { .. } => unreachable!("sum is preserved"),
    }
    // the obstruction names a subspace over-filtered by EVERY flag of the type
    let u = obstruction_subspace(&report.frobenius, 1)?;
    let mut rng = sampling::seeded(99);
    for _ in 0..3 {
        let flags = sampling::random_flags(report.frobenius.field(), &ftype, &mut rng);
        let obj = FilteredIsocrystal::new(report.frobenius.clone(), ftype.clone(), flags)?;
        println!(
            "  sampled flag: deg = {} > t_N = {}, verdict {}",
            obj.filtration_degree(u.space())?,
            report.frobenius.newton_number(&u),
            obj.weak_admissibility().status
        );
    }

    // wrong total valuation: no flag can satisfy the determinant condition
    let report = wa_exists(
        5,
        &ftype,
        PointInput::Roots(vec![q(0, 1), q(1, 1), q(3, 1)]),
        11,
        64,
    )?;
    if let Some(Obstruction::Determinant { lhs, rhs }) = report.obstruction {
        println!("roots (0, 1, 3): determinant mismatch {lhs} != {rhs}");
    }
    Ok(())
}
