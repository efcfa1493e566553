//! Isocrystal structure from Jordan data: slope decomposition, Newton
//! numbers of stable subspaces, and the effect of the residue degree f.

use filtiso::field::FieldSpec;
use filtiso::isocrystal::{FrobeniusSpec, IsotypicPiece, PieceMode};

fn main() -> filtiso::Result<()> {
    let field = FieldSpec::new(5, 1)?;
    let p = |a: i64| field.from_int(5).pow(a).expect("power of p");

    // diag(1, 5, 25): three slopes 0, 1, 2
    let split = FrobeniusSpec::new(
        field,
        1,
        vec![
            IsotypicPiece { eigenvalue: p(0), mode: PieceMode::Block(1) },
            IsotypicPiece { eigenvalue: p(1), mode: PieceMode::Block(1) },
            IsotypicPiece { eigenvalue: p(2), mode: PieceMode::Block(1) },
        ],
        None,
    )?;
    for piece in split.slope_decomposition() {
        println!("slope {}: dim {}", piece.slope, piece.space.rank());
    }

    // a Jordan block contributes one slope with the block's multiplicity
    let block = FrobeniusSpec::new(
        field,
        1,
        vec![IsotypicPiece { eigenvalue: p(1), mode: PieceMode::Block(2) }],
        None,
    )?;
    let dec = block.slope_decomposition();
    println!("J_2(5): slope {} with dim {}", dec[0].slope, dec[0].space.rank());

    // f = 2 halves every slope: v(lambda) is measured against p^f
    let halved = FrobeniusSpec::new(
        field,
        2,
        vec![IsotypicPiece { eigenvalue: p(1), mode: PieceMode::Block(1) }],
        None,
    )?;
    println!("f = 2, eigenvalue 5: slope {}", halved.slope_decomposition()[0].slope);

    // Newton numbers of the chain subspaces of the block
    for dims in [vec![1], vec![2]] {
        let u = block.chain_subspace(&dims)?;
        println!("chain {:?}: t_N = {}", dims, block.newton_number(&u));
    }
    Ok(())
}
