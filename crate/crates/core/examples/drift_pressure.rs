//! The constant potential `phi_n = a n` on the full 2-shift. The growth at
//! `s = 1` is `log 2 + a`, read off both exact estimators.

use pdim::dimension::{build_growth_table, s_pressure, BuildOptions};
use pdim::partition::{Estimator, Scale};
use pdim::potentials::AlmostAdditiveSeq;
use pdim::systems::SystemModel;

fn main() -> pdim::Result<()> {
    let sys = SystemModel::full_shift(2)?;
    let ns: Vec<usize> = (1..=128).collect();
    for a in [0.0, 0.5, -0.25] {
        let phi = AlmostAdditiveSeq::drift(&sys, a);
        for est in [Estimator::Spanning, Estimator::Separated] {
            let table = build_growth_table(&phi, est, Scale::Dyadic(0), &ns, BuildOptions::default())?;
            let v = s_pressure(&table, 1.0, 0.5)?;
            println!(
                "a = {a:5}: estimator {est} gives {v:.6} (log 2 + a = {:.6})",
                2f64.ln() + a
            );
        }
    }
    Ok(())
}
