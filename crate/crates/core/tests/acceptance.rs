use std::io::Write;

use signlap::acceptance::{run_suite, SuiteTolerances};
use signlap::{Exec, Transmission, TwoPhaseDiskConfig};

// The two-sided bulk law measures slope ratios of 1.27 (positive side) and
// 0.94 (negative side) on [500, 2000]: the boundary and interface terms are
// still far from negligible there, so the per-side criterion is reported as
// failing.  Any other failure, or an unexpected pass, is a regression.
const EXPECTED_FAILURES: [u8; 1] = [2];

#[test]
fn acceptance_suite_on_reference_configuration() {
    let config = TwoPhaseDiskConfig::reference(Transmission::Flux);
    let report = run_suite(&config, SuiteTolerances::default(), Exec::Parallel);
    // written to the stdout handle so the lines survive libtest capture
    let mut out = std::io::stdout().lock();
    writeln!(out).unwrap();
    for c in &report.criteria {
        writeln!(out, "{}", c.line()).unwrap();
    }
    writeln!(
        out,
        "acceptance: {}/{} criteria pass",
        report.criteria.len() - report.failed().len(),
        report.criteria.len()
    )
    .unwrap();
    drop(out);
    assert_eq!(report.criteria.len(), 10);
    assert_eq!(report.failed(), EXPECTED_FAILURES.to_vec());
}
