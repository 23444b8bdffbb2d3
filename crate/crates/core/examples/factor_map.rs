//! Binary expansion as a factor map from the 2-shift onto the doubling map.
//! Pulling a potential back leaves its values on orbits unchanged.

use pdim::potentials::{AlmostAdditiveSeq, PointFn};
use pdim::systems::{FactorMap, SystemModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> pdim::Result<()> {
    let pi = FactorMap::binary_expansion();
    let phi = AlmostAdditiveSeq::birkhoff(&SystemModel::Doubling, PointFn::Cos2Pi)?;
    let pulled = phi.pullback(&pi)?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let w = pi.source().sample_point(&mut rng, 40)?;
        worst = worst.max(pi.conjugacy_defect(&w)?);
        let x = pi.apply(&w)?;
        for n in [1, 5, 10] {
            worst = worst.max((pulled.eval(n, &w)? - phi.eval(n, &x)?).abs());
        }
    }
    println!("{}: worst defect over 100 samples {worst:.2e}", pi.name());
    Ok(())
}
