//! Runs a subset of the numbered verification criteria and prints a summary.
//! Pass criterion ids as arguments (default: 1 6 7 10).

use raman_multiplex::experiment::verify::{run_verification, VerifySettings};

fn main() -> raman_multiplex::Result<()> {
    let ids: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let ids = if ids.is_empty() { vec![1, 6, 7, 10] } else { ids };
    let run = run_verification(&VerifySettings::default(), None, &ids)?;
    for (c, (_, secs)) in run.report.criteria.iter().zip(&run.timings) {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        println!("{:>2} {verdict} {} ({secs:.2} s)", c.id, c.title);
        for k in &c.checks {
            println!("     {:<50} {:.2e} / {:.0e}", k.name, k.residual, k.tolerance);
        }
    }
    for w in &run.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
