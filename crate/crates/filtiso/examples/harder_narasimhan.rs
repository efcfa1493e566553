//! Harder-Narasimhan filtrations: the canonical chain of stable subspaces
//! with strictly decreasing slopes, and semistability as the one-step case.

use filtiso::filtered::{FilteredIsocrystal, Flag};
use filtiso::linalg::Subspace;
use filtiso::theorem::reference_split_rank3;

fn main() -> filtiso::Result<()> {
    let case = reference_split_rank3(5);
    let field = case.frobenius.field();
    let e = |i: usize| {
        let v: Vec<_> = (0..3)
            .map(|j| if j == i { field.one() } else { field.zero() })
            .collect();
        Subspace::from_vectors(field, vec![v]).expect("unit vector")
    };

    // the standard flag over-filters the slope-0 line: three HN steps
    let standard = Flag::new(vec![
        (2, e(0)),
        (1, e(0).sum(&e(1))),
        (0, Subspace::full(field, 3)),
    ])?;
    let obj = FilteredIsocrystal::new(case.frobenius.clone(), case.ftype.clone(), vec![standard])?;
    println!("standard flag:");
    for (i, step) in obj.harder_narasimhan()?.iter().enumerate() {
        println!(
            "  step {}: rank {} slope {} (deg {} - t_N {})",
            i + 1,
            step.rank,
            step.slope,
            step.degree,
            step.newton_number
        );
    }
    println!("  semistable: {}", obj.is_semistable()?);

    // a weakly admissible object is exactly a semistable one of slope 0
    let line = Subspace::from_vectors(field, vec![vec![field.one(), field.one(), field.one()]])?;
    let generic = Flag::new(vec![
        (2, line.clone()),
        (1, line.sum(&e(1))),
        (0, Subspace::full(field, 3)),
    ])?;
    let obj = FilteredIsocrystal::new(case.frobenius, case.ftype, vec![generic])?;
    let hn = obj.harder_narasimhan()?;
    println!("generic flag:");
    println!("  steps {} slope {}", hn.len(), hn[0].slope);
    println!("  semistable: {}", obj.is_semistable()?);
    println!("  weakly admissible: {}", obj.weak_admissibility().holds());
    Ok(())
}
