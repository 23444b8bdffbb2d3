//! Locates the jump of `s -> PD(s)` from diverging to vanishing.

use pdim::dimension::{build_growth_table, classify_jump, pressure_curve, BuildOptions, JumpThresholds};
use pdim::partition::{Estimator, Scale};
use pdim::potentials::{AlmostAdditiveSeq, PointFn};
use pdim::systems::SystemModel;

fn main() -> pdim::Result<()> {
    let sys = SystemModel::full_shift(2)?;
    let phi = AlmostAdditiveSeq::birkhoff(&sys, PointFn::symbol_weights(2, 1, vec![0.0, 1.0])?)?;
    let ns: Vec<usize> = (1..=200).collect();
    let table = build_growth_table(
        &phi,
        Estimator::Separated,
        Scale::Dyadic(2),
        &ns,
        BuildOptions::default(),
    )?;
    let grid: Vec<f64> = (0..=15).map(|i| 0.5 + 0.1 * i as f64).collect();
    let curve = pressure_curve(&table, &grid, 0.5)?;
    let jump = classify_jump(&curve, JumpThresholds::default())?;
    for ((s, v), l) in grid.iter().zip(&curve.values).zip(&jump.labels) {
        println!("s = {s:.1}  {v:12.6}  {l:?}");
    }
    println!("jump in ({:?}, {:?})", jump.s_lo, jump.s_hi);
    Ok(())
}
