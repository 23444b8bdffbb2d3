//! Greedy spanning and separated bounds against exhaustive search on small
//! random instances.

use pdim::theorems::oracle_sandwich;

fn main() -> pdim::Result<()> {
    let r = oracle_sandwich(12, 100, 1)?;
    println!("{} trials, at most {} points", r.trials, r.max_points);
    println!("log Q - log P           {:+.3e}", r.q_le_p);
    println!("s - r                   {:+.3e}", r.s_le_r);
    println!("r(eps) - s(eps/2)       {:+.3e}", r.r_le_s_half);
    println!("mean greedy gap (P, Q)  {:.4} {:.4}", r.mean_gap_p, r.mean_gap_q);
    println!("greedy exact on {} of {}", r.greedy_exact, r.trials);
    println!("{}", if r.passed() { "pass" } else { "fail" });
    Ok(())
}
