use pdim::theorems::{run_suite, Status, SUITES};

#[test]
fn every_suite_passes_on_a_fixed_seed() {
    for suite in SUITES {
        for r in run_suite(suite, 7, 0.0).unwrap() {
            println!(
                "{} {:?} {:.3e} tol {:.1e} {}",
                r.check_id, r.status, r.worst_violation, r.tolerance, r.notes
            );
            assert_eq!(r.status, Status::Pass, "{r:?}");
        }
    }
}

#[test]
fn injected_faults_are_detected() {
    for suite in SUITES {
        for r in run_suite(suite, 7, 0.1).unwrap() {
            assert_eq!(r.status, Status::Fail, "{} survived an injected fault", r.check_id);
        }
    }
}

#[test]
fn other_seeds_pass() {
    for seed in [1, 2, 3] {
        for suite in ["chain", "prop22", "thm32", "thm33", "thm34", "thm35"] {
            for r in run_suite(suite, seed, 0.0).unwrap() {
                assert_eq!(r.status, Status::Pass, "seed {seed}: {r:?}");
            }
        }
    }
}
