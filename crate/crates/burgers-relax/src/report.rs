//! Structured pass/fail reporting with matching machine- and human-readable
//! renderings.

use serde::{Deserialize, Serialize};

/// One property suite's outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportSection {
    pub name: String,
    pub pass: bool,
    /// Worst residual or margin observed (sign convention per suite).
    pub worst: f64,
    /// Where the worst case occurred, when meaningful.
    pub location: Option<String>,
    pub detail: String,
}

/// Pass/fail report across property suites. The human rendering is derived
/// from exactly the same data as the JSON serialization.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Report {
    pub sections: Vec<ReportSection>,
}

impl Report {
    pub fn push(
        &mut self,
        name: &str,
        pass: bool,
        worst: f64,
        location: Option<String>,
        detail: impl Into<String>,
    ) {
        self.sections.push(ReportSection {
            name: name.to_string(),
            pass,
            worst,
            location,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.sections.iter().all(|s| s.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for s in &self.sections {
            let status = if s.pass { "PASS" } else { "FAIL" };
            write!(f, "{status}  {:<38} worst={:>12.3e}", s.name, s.worst)?;
            if let Some(loc) = &s.location {
                write!(f, "  at {loc}")?;
            }
            if !s.detail.is_empty() {
                write!(f, "  ({})", s.detail)?;
            }
            writeln!(f)?;
        }
        write!(
            f,
            "overall: {}",
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renderings_agree() {
        let mut r = Report::default();
        r.push("symmetry", true, 1.2e-15, None, "");
        r.push("bounds", false, -3.0e-8, Some("t=1.5, j=1".into()), "lower side");
        assert!(!r.passed());
        let text = r.to_string();
        assert!(text.contains("PASS  symmetry"));
        assert!(text.contains("FAIL  bounds"));
        assert!(text.contains("overall: FAIL"));
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back.sections.len(), 2);
        assert_eq!(back.sections[1].location.as_deref(), Some("t=1.5, j=1"));
        assert_eq!(back.passed(), r.passed());
    }
}
