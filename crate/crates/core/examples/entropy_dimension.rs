//! Entropy dimension of a few model systems: the full 2-shift grows
//! linearly, while a contraction and an irrational rotation have
//! subexponential (bounded) orbit counts.

use pdim::dimension::entropy_dimension;
use pdim::partition::Scale;
use pdim::systems::SystemModel;

fn main() -> pdim::Result<()> {
    let ns: Vec<usize> = (1..=200).collect();
    let s_grid = [0.5, 1.0, 2.0];
    let cases = [
        (SystemModel::full_shift(2)?, vec![Scale::Dyadic(1), Scale::Dyadic(3)]),
        (
            SystemModel::contraction(0.5, 0.0)?,
            vec![Scale::Eps(0.2), Scale::Eps(0.1)],
        ),
        (
            SystemModel::rotation((5f64.sqrt() - 1.0) / 2.0)?,
            vec![Scale::Eps(0.2), Scale::Eps(0.1)],
        ),
    ];
    for (sys, scales) in cases {
        let e = entropy_dimension(&sys, &ns, &scales, &s_grid, 0.5)?;
        println!(
            "{}: dimension {:.4} ({})",
            sys.label(),
            e.estimate.s0_hat,
            e.estimate.method
        );
        for (s, v) in s_grid.iter().zip(&e.curve.values) {
            println!("  D({s}) = {v:.6}");
        }
    }
    Ok(())
}
