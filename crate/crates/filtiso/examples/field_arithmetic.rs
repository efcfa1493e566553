//! Exact arithmetic in Q(pi) with pi^2 = 5, and the valuation that makes
//! v(5) = 1 and v(pi) = 1/2.

use filtiso::field::{FieldSpec, Val};
use num_bigint::BigInt;
use num_rational::BigRational;

fn main() -> filtiso::Result<()> {
    let field = FieldSpec::new(5, 2)?;
    let five = field.from_int(5);
    let pi = field.pi();

    println!("v(5)      = {}", five.valuation());
    println!("v(pi)     = {}", pi.valuation());
    println!("v(pi^3)   = {}", pi.pow(3)?.valuation());
    println!("v(0)      = {}", field.zero().valuation());

    // the valuation of a sum is at least the min, with equality off ties
    let a = &five + &pi;
    println!("v(5 + pi) = {}", a.valuation());
    assert_eq!(a.valuation(), Val::Finite(BigRational::new(1.into(), 2.into())));

    // inverses are exact; v flips sign
    let inv = a.inv()?;
    println!("(5 + pi)^-1 = {inv}");
    assert!((&a * &inv).is_one());
    assert_eq!(
        inv.valuation(),
        Val::Finite(BigRational::new(BigInt::from(-1), BigInt::from(2)))
    );

    // elements move up the tower without changing their valuation
    let wide = FieldSpec::new(5, 4)?;
    let lifted = a.extend_to(wide)?;
    assert_eq!(lifted.valuation(), a.valuation());
    println!("in Q(5^(1/4)): v = {} still", lifted.valuation());

    // arbitrary rational powers of pi, u * pi^(m v) for a chosen unit u
    let w = wide.unit_times_power(BigRational::new(3.into(), 1.into()), &BigRational::new(3.into(), 4.into()))?;
    println!("3 * 5^(3/4) = {w}, v = {}", w.valuation());
    Ok(())
}
