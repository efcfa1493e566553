//! Dominance order on coweights and membership of adjoint points in closed
//! and locally closed strata.

use filtiso::adjoint::{AdjointPoint, DominantCoweight};
use filtiso::field::Val;
use num_rational::BigRational;

fn cw(entries: &[i64]) -> DominantCoweight {
    DominantCoweight::new(entries.iter().map(|&n| BigRational::from_integer(n.into())).collect())
        .expect("weakly decreasing")
}

fn pt(vals: &[i64]) -> AdjointPoint {
    AdjointPoint::new(
        vals.iter()
            .map(|&n| Val::Finite(BigRational::from_integer(n.into())))
            .collect(),
    )
    .expect("finite constant term")
}

fn main() -> filtiso::Result<()> {
    let mu = cw(&[0, -1, -2]);
    let nu = cw(&[-1, -1, -1]);
    println!("{nu} <= {mu}: {}", nu.dominated_by(&mu)?);
    println!("{mu} <= {nu}: {}", mu.dominated_by(&nu)?);

    // closed stratum: prefix sums of coefficient valuations clear the
    // thresholds 0, 1, 3; equality is forced at the last index
    for vals in [[0, 1, 3], [1, 2, 3], [0, 1, 4], [-1, 1, 3]] {
        let p = pt(&vals);
        println!(
            "point {vals:?}: closed {}  open {}  retraction {}",
            p.in_stratum(&mu, true)?,
            p.in_stratum(&mu, false)?,
            p.newton_retraction()
        );
    }
    Ok(())
}
