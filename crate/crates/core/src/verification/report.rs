use std::fmt;

/// One evaluated sample of a check.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleRecord {
    pub seed: u64,
    /// Normalized slack; negative means the inequality was violated.
    pub margin: f64,
    /// Raw slack before normalization.
    pub slack: f64,
    pub scale: f64,
}

/// Outcome of one verification check.
///
/// `passed` always reflects `worst_margin ≥ −tolerance`; exploratory checks
/// report margins but are not counted as failures by callers.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub samples: usize,
    pub worst_margin: f64,
    pub worst_case_seed: u64,
    pub tolerance: f64,
    pub passed: bool,
    pub exploratory: bool,
    pub notes: Vec<String>,
    pub details: Vec<SampleRecord>,
}

impl CheckReport {
    /// True unless this is a non-exploratory check that failed.
    pub fn is_acceptable(&self) -> bool {
        self.passed || self.exploratory
    }

    pub fn status(&self) -> &'static str {
        match (self.passed, self.exploratory) {
            (true, false) => "PASS",
            (false, false) => "FAIL",
            (true, true) => "PASS (exploratory)",
            (false, true) => "VIOLATED (exploratory)",
        }
    }

    /// Combines sub-checks into one report: the worst margin wins, every
    /// non-exploratory part must pass.
    pub fn combine(name: impl Into<String>, parts: Vec<CheckReport>) -> CheckReport {
        let mut out = CheckReport {
            name: name.into(),
            samples: 0,
            worst_margin: f64::INFINITY,
            worst_case_seed: 0,
            tolerance: 0.0,
            passed: true,
            exploratory: !parts.is_empty() && parts.iter().all(|p| p.exploratory),
            notes: Vec::new(),
            details: Vec::new(),
        };
        let all_exploratory = out.exploratory;
        for p in parts {
            out.samples = out.samples.max(p.samples);
            if !p.exploratory {
                out.passed &= p.passed;
            }
            let counts = p.samples > 0 && (all_exploratory || !p.exploratory);
            if counts && (p.worst_margin < out.worst_margin || out.worst_margin.is_infinite()) {
                out.worst_margin = p.worst_margin;
                out.worst_case_seed = p.worst_case_seed;
                out.tolerance = p.tolerance;
            }
            out.notes.push(format!(
                "{}: {} worst_margin={:.6e} seed={}",
                p.name,
                p.status(),
                p.worst_margin,
                p.worst_case_seed
            ));
            out.notes
                .extend(p.notes.into_iter().map(|n| format!("{}: {n}", p.name)));
            out.details.extend(p.details);
        }
        if out.worst_margin.is_infinite() {
            out.worst_margin = 0.0;
        }
        if out.exploratory {
            out.passed = out.worst_margin >= -out.tolerance;
        }
        out
    }

    /// Re-judges the report against a different tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.passed = self.worst_margin >= -tolerance;
        self.notes.push(format!("tolerance overridden to {tolerance:.1e}"));
        self
    }

    /// Serializes a list of reports as the text block format.
    pub fn render_all(reports: &[CheckReport]) -> String {
        reports.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n")
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "check: {}", self.name)?;
        writeln!(f, "status: {}", self.status())?;
        writeln!(f, "samples: {}", self.samples)?;
        writeln!(f, "worst_margin: {:.6e}", self.worst_margin)?;
        writeln!(f, "worst_case_seed: {}", self.worst_case_seed)?;
        writeln!(f, "tolerance: {:.1e}", self.tolerance)?;
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        for d in &self.details {
            writeln!(
                f,
                "sample: seed={} margin={:.6e} slack={:.6e} scale={:.6e}",
                d.seed, d.margin, d.slack, d.scale
            )?;
        }
        Ok(())
    }
}

/// Running worst-case bookkeeping for a check.
#[derive(Clone, Debug)]
pub(crate) struct Tally {
    name: String,
    tolerance: f64,
    exploratory: bool,
    keep_details: bool,
    samples: usize,
    worst: f64,
    worst_seed: u64,
    notes: Vec<String>,
    details: Vec<SampleRecord>,
}

impl Tally {
    pub(crate) fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            tolerance,
            exploratory: false,
            keep_details: false,
            samples: 0,
            worst: f64::INFINITY,
            worst_seed: 0,
            notes: Vec::new(),
            details: Vec::new(),
        }
    }

    pub(crate) fn exploratory(mut self, flag: bool) -> Self {
        self.exploratory = flag;
        self
    }

    pub(crate) fn keep_details(mut self, flag: bool) -> Self {
        self.keep_details = flag;
        self
    }

    pub(crate) fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Records `slack / scale` (or the raw slack when the scale is zero).
    pub(crate) fn record(&mut self, seed: u64, slack: f64, scale: f64) {
        let margin = if scale > 0.0 && scale.is_finite() {
            slack / scale
        } else {
            slack
        };
        let margin = if margin.is_nan() { f64::NEG_INFINITY } else { margin };
        self.samples += 1;
        if margin < self.worst || self.samples == 1 {
            self.worst = margin;
            self.worst_seed = seed;
        }
        if self.keep_details {
            self.details.push(SampleRecord {
                seed,
                margin,
                slack,
                scale,
            });
        }
    }

    pub(crate) fn finish(self) -> CheckReport {
        let worst = if self.samples == 0 { 0.0 } else { self.worst };
        CheckReport {
            name: self.name,
            samples: self.samples,
            worst_margin: worst,
            worst_case_seed: self.worst_seed,
            tolerance: self.tolerance,
            passed: worst >= -self.tolerance,
            exploratory: self.exploratory,
            notes: self.notes,
            details: self.details,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_tracks_worst_seed() {
        let mut t = Tally::new("x", 1e-9);
        t.record(10, 1.0, 2.0);
        t.record(11, -1.0, 4.0);
        t.record(12, 0.0, 0.0);
        let r = t.finish();
        assert_eq!(r.samples, 3);
        assert_eq!(r.worst_case_seed, 11);
        assert_eq!(r.worst_margin, -0.25);
        assert!(!r.passed);
    }

    #[test]
    fn combine_ignores_exploratory_failures() {
        let mut a = Tally::new("a", 1e-9);
        a.record(1, 1.0, 1.0);
        let mut b = Tally::new("b", 1e-9).exploratory(true);
        b.record(2, -1.0, 1.0);
        let r = CheckReport::combine("ab", vec![a.finish(), b.finish()]);
        assert!(r.passed);
        assert!(!r.exploratory);
        assert_eq!(r.worst_case_seed, 1);
        assert_eq!(r.worst_margin, 1.0);
        assert!(r.to_string().contains("check: ab"));
    }
}
