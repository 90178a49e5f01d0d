//! Check reports: records, verdicts, text and machine rendering.
//!
//! A report is data first; both output formats are pure functions of it. The
//! machine format is a versioned header line followed by a JSON body carrying
//! the full report, so feeding a parsed machine document back through the
//! text renderer reproduces the text output byte for byte.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Header line of the machine format; bump the suffix on incompatible
/// changes.
pub const MACHINE_HEADER: &str = "pseudoalg-report v1";

/// Outcome of one law over its instance set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Every evaluated instance vanished.
    Pass,
    /// At least one instance left a nonzero residue.
    Fail,
    /// The law holds by a recorded convention and is not evaluated.
    ByConvention,
}

/// First failing instances of a law, with the nonzero residue.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// Which generators were plugged in, e.g. `(e1, e2, e3)`.
    pub instance: String,
    /// Canonical form of the residue or a description of the violation.
    pub detail: String,
}

/// One law checked over an enumerated instance set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawRecord {
    /// Stable law identifier, e.g. `jacobi` or `leibniz-left`.
    pub law: String,
    /// What the law was checked on.
    pub subject: String,
    /// Number of instances evaluated.
    pub instances: usize,
    /// Instances skipped because evaluation left the truncated range.
    pub skipped: usize,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
}

impl LawRecord {
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

/// A named group of law records plus free-form notes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub name: String,
    pub notes: Vec<String>,
    pub records: Vec<LawRecord>,
}

/// Interpretation choices the results depend on, printed with every report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convention {
    pub key: String,
    pub text: String,
}

/// Complete result of one verb run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub verb: String,
    pub conventions: Vec<Convention>,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn new(verb: &str) -> Self {
        Report {
            tool: "pseudoalg".to_string(),
            verb: verb.to_string(),
            conventions: Vec::new(),
            sections: Vec::new(),
        }
    }

    pub fn convention(&mut self, key: &str, text: &str) {
        if self.conventions.iter().any(|c| c.key == key) {
            return;
        }
        self.conventions.push(Convention { key: key.to_string(), text: text.to_string() });
    }

    pub fn section(&mut self, name: &str) -> &mut Section {
        self.sections.push(Section {
            name: name.to_string(),
            notes: Vec::new(),
            records: Vec::new(),
        });
        self.sections.last_mut().unwrap()
    }

    pub fn passed(&self) -> bool {
        self.sections
            .iter()
            .all(|s| s.records.iter().all(LawRecord::passed))
    }

    fn totals(&self) -> (usize, usize, usize) {
        let mut pass = 0;
        let mut fail = 0;
        let mut conv = 0;
        for s in &self.sections {
            for r in &s.records {
                match r.verdict {
                    Verdict::Pass => pass += 1,
                    Verdict::Fail => fail += 1,
                    Verdict::ByConvention => conv += 1,
                }
            }
        }
        (pass, fail, conv)
    }

    /// Human-readable rendering; one line per law record.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("pseudoalg report: {}\n", self.verb));
        if !self.conventions.is_empty() {
            out.push_str("conventions:\n");
            for c in &self.conventions {
                out.push_str(&format!("  {}: {}\n", c.key, c.text));
            }
        }
        for s in &self.sections {
            out.push_str(&format!("section {}\n", s.name));
            for n in &s.notes {
                out.push_str(&format!("  note: {n}\n"));
            }
            for r in &s.records {
                let tag = match r.verdict {
                    Verdict::Pass => "PASS",
                    Verdict::Fail => "FAIL",
                    Verdict::ByConvention => "CONV",
                };
                let skipped = if r.skipped > 0 {
                    format!(" skipped={}", r.skipped)
                } else {
                    String::new()
                };
                out.push_str(&format!(
                    "  [{tag}] law={} subject={} instances={}{}\n",
                    r.law, r.subject, r.instances, skipped
                ));
                for w in &r.witnesses {
                    out.push_str(&format!("    at {}: {}\n", w.instance, w.detail));
                }
            }
        }
        let (pass, fail, conv) = self.totals();
        out.push_str(&format!(
            "summary: {} checks, {} passed, {} failed, {} by convention\n",
            pass + fail + conv,
            pass,
            fail,
            conv
        ));
        out
    }

    /// Machine rendering: header line plus JSON body.
    pub fn render_machine(&self) -> String {
        let body = serde_json::to_string_pretty(self).expect("report serializes");
        format!("{MACHINE_HEADER}\n{body}\n")
    }

    /// Parses a machine document back into a report.
    pub fn parse_machine(text: &str) -> Result<Report> {
        let Some(rest) = text.strip_prefix(MACHINE_HEADER) else {
            return Err(Error::Model(format!(
                "machine report must start with '{MACHINE_HEADER}'"
            )));
        };
        serde_json::from_str(rest.trim_start())
            .map_err(|e| Error::Model(format!("machine report body: {e}")))
    }
}

/// Builds a record from an instance runner. The runner reports each failing
/// instance through the witness sink; out-of-range instances are skipped and
/// counted.
pub struct LawRun {
    pub law: String,
    pub subject: String,
    instances: usize,
    skipped: usize,
    witnesses: Vec<Witness>,
}

/// Witness cap per record; enough to act on, small enough to read.
const MAX_WITNESSES: usize = 3;

impl LawRun {
    pub fn new(law: &str, subject: &str) -> Self {
        LawRun {
            law: law.to_string(),
            subject: subject.to_string(),
            instances: 0,
            skipped: 0,
            witnesses: Vec::new(),
        }
    }

    /// Records one instance outcome: `Ok(None)` pass, `Ok(Some(detail))`
    /// fail, `Err(OutOfRange)` skip; other errors propagate.
    pub fn instance(
        &mut self,
        name: impl Fn() -> String,
        outcome: Result<Option<String>>,
    ) -> Result<()> {
        match outcome {
            Ok(None) => {
                self.instances += 1;
            }
            Ok(Some(detail)) => {
                self.instances += 1;
                if self.witnesses.len() < MAX_WITNESSES {
                    self.witnesses.push(Witness { instance: name(), detail });
                } else {
                    // Still a failure; the record keeps the count via verdict.
                    self.witnesses.truncate(MAX_WITNESSES);
                }
            }
            Err(Error::OutOfRange(_)) => {
                self.skipped += 1;
            }
            Err(e) => return Err(e),
        }
        Ok(())
    }

    pub fn has_failures(&self) -> bool {
        !self.witnesses.is_empty()
    }

    pub fn finish(self) -> LawRecord {
        let verdict = if self.witnesses.is_empty() { Verdict::Pass } else { Verdict::Fail };
        LawRecord {
            law: self.law,
            subject: self.subject,
            instances: self.instances,
            skipped: self.skipped,
            verdict,
            witnesses: self.witnesses,
        }
    }

    pub fn finish_by_convention(mut self) -> LawRecord {
        self.witnesses.clear();
        LawRecord {
            law: self.law,
            subject: self.subject,
            instances: 0,
            skipped: 0,
            verdict: Verdict::ByConvention,
            witnesses: Vec::new(),
        }
    }
}
