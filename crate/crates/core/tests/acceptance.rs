//! One line per acceptance criterion. Runs with the default seed and the
//! baselines compiled into the crate; exits non-zero if any criterion fails.

use std::process::ExitCode;

use palsqf::verify::{self, VerifyOptions};

/// (criterion, check id, tolerance applied inside the check)
const CRITERIA: [(u32, &str, &str); 18] = [
    (1, "palenum", "exact"),
    (2, "squarefree", "exact"),
    (3, "rho", "exact"),
    (4, "quasicover", "exact"),
    (5, "salie", "1e-9 q^2 absolute"),
    (6, "crt", "1e-9 q r absolute"),
    (7, "correlation", "1e-9 q^2 absolute"),
    (8, "gauss", "|G*| <= 1e-6"),
    (9, "moment", "1e-6 relative"),
    (10, "shift", "1e-9 q absolute"),
    (11, "sumprod", "1e-9 per summand"),
    (12, "vdc", "1e-7 N^2 absolute"),
    (13, "cong", "exact"),
    (14, "sieve", "frozen constant, 6 significant digits"),
    (15, "bs", "frozen constant, 6 significant digits"),
    (16, "squarepairs", "exact"),
    (17, "trend", "sigma_hat > 0, last max rel err < 1.0 x first"),
    (18, "determinism", "byte-identical"),
];

fn main() -> ExitCode {
    let opts = VerifyOptions::default();
    let mut failed = Vec::new();
    for (criterion, id, tolerance) in CRITERIA {
        let spec = verify::find(id).unwrap_or_else(|| panic!("no check `{id}`"));
        assert_eq!(spec.criterion, Some(criterion), "check `{id}` is registered under another criterion");
        match spec.run(&opts) {
            Ok(out) => {
                let verdict = if out.passed { "PASS" } else { "FAIL" };
                println!(
                    "criterion {criterion:>2} [{id}] {verdict} cases={} failed={} tol={tolerance} ({} ms) {}",
                    out.cases, out.failed, out.elapsed_ms, out.detail
                );
                for f in &out.failures {
                    println!("    failing case: {f}");
                }
                if !out.passed {
                    failed.push(criterion);
                }
            }
            Err(e) => {
                println!("criterion {criterion:>2} [{id}] FAIL error: {e}");
                failed.push(criterion);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 18 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
