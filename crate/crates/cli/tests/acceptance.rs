//! The full acceptance suite: one line per criterion.

use std::io::Write;

use lagwave::verify::acceptance;

#[test]
fn acceptance_criteria() {
    // Straight to stderr so the lines show up without --nocapture.
    let result = acceptance(|c| {
        let _ = writeln!(std::io::stderr().lock(), "{}", c.line());
    });
    let failed: Vec<String> = result.checks.iter().filter(|c| !c.passed).map(|c| c.line()).collect();
    assert_eq!(result.checks.len(), 11);
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.join("\n"));
}
