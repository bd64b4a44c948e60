//! The `validate` command.

use itemwatch::validation::{run_suite, CheckOutcome, Suite};

/// Fixed-width pass/fail table.
pub fn render_table(outcomes: &[CheckOutcome]) -> String {
    let width = outcomes
        .iter()
        .map(|o| o.name.len())
        .max()
        .unwrap_or(5)
        .max(5);
    let mut out = format!("{:<width$}  {:<6}  detail\n", "check", "result");
    for o in outcomes {
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!(
            "{:<width$}  {:<6}  {}\n",
            o.name, verdict, o.detail
        ));
    }
    out
}

/// Runs `suite`; returns the table and whether every check passed.
pub fn cmd_validate(suite: Suite) -> (String, bool) {
    let outcomes = run_suite(suite);
    let passed = outcomes.iter().all(|o| o.passed);
    (render_table(&outcomes), passed)
}
