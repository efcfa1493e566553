//! Retraction of coefficient valuations onto a dominant coweight: lower
//! convex hull of (i, v(c_i)), negated slopes read left to right.

use filtiso::adjoint::AdjointPoint;
use filtiso::field::Val;
use num_rational::BigRational;

fn q(n: i64, d: i64) -> Val {
    Val::Finite(BigRational::new(n.into(), d.into()))
}

fn main() -> filtiso::Result<()> {
    // char poly of diag(1, 5, 25): coefficient valuations 0, 1, 3
    let pt = AdjointPoint::new(vec![q(0, 1), q(1, 1), q(3, 1)])?;
    println!("vals (0, 1, 3)   ->  {}", pt.newton_retraction());

    // (T - 2)^2 over p = 2: the middle coefficient 4 sits above the hull,
    // yet both roots of valuation 1 are recovered
    let pt = AdjointPoint::new(vec![q(2, 1), q(2, 1)])?;
    println!("vals (2, 2)      ->  {}", pt.newton_retraction());

    // an infinite coordinate just removes the lattice point
    let pt = AdjointPoint::new(vec![Val::Infinite, q(1, 1), q(3, 1)])?;
    println!("vals (inf, 1, 3) ->  {}", pt.newton_retraction());

    // fractional slopes appear for ramified eigenvalues
    let pt = AdjointPoint::new(vec![q(1, 2), q(2, 1)])?;
    println!("vals (1/2, 2)    ->  {}", pt.newton_retraction());

    // the constant term must be finite: v(c_d) = inf has no retraction
    let err = AdjointPoint::new(vec![q(0, 1), Val::Infinite]);
    println!("vals (0, inf)    ->  {}", err.unwrap_err());
    Ok(())
}
