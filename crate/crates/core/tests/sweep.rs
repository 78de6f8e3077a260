use aggad::verify::{op_sweep, projection_rule_check, CheckStatus};

#[test]
fn full_operation_sweep_passes() {
    let report = op_sweep();
    assert!(report.entries.len() > 2000, "{}", report.entries.len());
    let failures: Vec<_> = report.failures().collect();
    assert!(failures.is_empty(), "{}", report.to_text());
    assert!(report
        .entries
        .iter()
        .all(|e| e.status != CheckStatus::Inconclusive));
}

#[test]
fn projection_rule_is_exact() {
    let report = projection_rule_check(10, 17);
    assert!(report.passed(), "{}", report.to_text());
}
