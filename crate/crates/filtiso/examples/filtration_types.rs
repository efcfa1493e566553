//! Filtration types: jump/rank profiles per embedding, the generic degrees
//! they induce, and the coweight cutting out the matching stratum.

use filtiso::filtype::FiltrationType;

fn main() -> filtiso::Result<()> {
    // one embedding, full flag with jumps 2 > 1 > 0
    let full = FiltrationType::new(3, 1, 1, vec![vec![(2, 1), (1, 2), (0, 3)]])?;
    println!("full flag:      l = {:?}", render(&full.generic_degrees()));
    println!("                mu(nu) = {}", full.stratum_coweight());

    // coarser flag of the same rank: plane jumps to 1, everything at 0
    let coarse = FiltrationType::new(3, 1, 1, vec![vec![(1, 2), (0, 3)]])?;
    println!("two-step flag:  l = {:?}", render(&coarse.generic_degrees()));
    println!("                mu(nu) = {}", coarse.stratum_coweight());

    // two embeddings over a ramified quadratic field: degrees average with
    // weight 1/(e f)
    let ramified = FiltrationType::new(
        2,
        2,
        1,
        vec![vec![(1, 1), (0, 2)], vec![(1, 1), (0, 2)]],
    )?;
    println!("ramified pair:  l = {:?}", render(&ramified.generic_degrees()));
    println!("                thresholds = {:?}", render(&ramified.stratum_thresholds()));

    // a nonzero final jump shifts every degree; the growth follows the
    // subspace rank, so a generic line already feels it
    let shifted = FiltrationType::new(2, 1, 1, vec![vec![(2, 1), (1, 2)]])?;
    println!(
        "shifted flag:   l = {:?} (final jump 1 present: {})",
        render(&shifted.generic_degrees()),
        shifted.has_nonzero_final_jump()
    );
    Ok(())
}

fn render(qs: &[num_rational::BigRational]) -> Vec<String> {
    qs.iter().map(filtiso::field::format_rational).collect()
}
