//! Log-norms of a positive matrix cocycle over the full 2-shift are almost
//! additive. Their pressure tends to the log spectral radius of `A_0 + A_1`.

use pdim::potentials::{AlmostAdditiveSeq, PositiveMatrix};
use pdim::symbolic::weighted_word_sum;
use pdim::systems::SystemModel;

fn main() -> pdim::Result<()> {
    let sys = SystemModel::full_shift(2)?;
    let a = PositiveMatrix::new(vec![vec![1.0, 2.0], vec![0.5, 3.0]])?;
    let b = PositiveMatrix::new(vec![vec![2.0, 1.0], vec![1.0, 1.5]])?;
    let phi = AlmostAdditiveSeq::cocycle(&sys, vec![a, b])?;
    println!("almost additivity constant C = {:.4}", phi.constant());
    println!(
        "sampled defect beyond C: {:.2e}",
        phi.verify_almost_additive(8, 8, 200, 5)?
    );

    // A_0 + A_1 = [[3, 3], [1.5, 4.5]] has spectral radius 6
    for n in [5, 20, 80, 320] {
        let z = weighted_word_sum(&phi, n, n)?;
        println!(
            "n = {n:3}: log Z_n / n = {:.6}  (log 6 = {:.6})",
            z / n as f64,
            6f64.ln()
        );
    }
    Ok(())
}
