//! Runs the inequality checks, once clean and once with a deliberate
//! offset added to every measured gap, which each check must catch.

use pdim::theorems::run_suite;

fn main() -> pdim::Result<()> {
    let suite = std::env::args().nth(1).unwrap_or_else(|| "all".into());
    for inject in [0.0, 0.1] {
        println!("inject = {inject}");
        for r in run_suite(&suite, 7, inject)? {
            println!(
                "  {:22} {:4} worst {:.3e} tol {:.0e}",
                r.check_id,
                r.status.as_str(),
                r.worst_violation,
                r.tolerance
            );
        }
    }
    Ok(())
}
