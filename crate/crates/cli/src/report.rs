use std::path::Path;

use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &str, residual: f64, tolerance: f64) -> Self {
        // NaN residuals fail
        Check { name: name.into(), residual, tolerance, pass: residual <= tolerance }
    }
}

#[derive(Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub command: &'static str,
    pub pass: bool,
    pub checks: Vec<Check>,
    #[serde(flatten)]
    pub extra: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: &'static str, checks: Vec<Check>, extra: T) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Report { command, pass, checks, extra }
    }

    /// Write `<out>/<name>` and echo to stdout; JSON numbers that are not finite become null.
    pub fn emit(&self, out: &Path, name: &str) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).expect("report serializes");
        std::fs::write(out.join(name), &text)?;
        println!("{text}");
        for c in &self.checks {
            eprintln!("{} {:<28} {:.3e} (tol {:.1e})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.residual, c.tolerance);
        }
        Ok(())
    }
}
