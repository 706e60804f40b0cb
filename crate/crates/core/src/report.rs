//! Machine-diffable verification reports.
//!
//! A report renders as UTF-8 lines `check-id<TAB>fingerprint<TAB>verdict`,
//! sorted by check id and then fingerprint, framed by `#` comment lines for
//! the header, notes and a summary.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    Indet,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Indet => "indet",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CheckLine {
    pub check: String,
    pub fingerprint: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    title: String,
    meta: Vec<(String, String)>,
    lines: Vec<CheckLine>,
    notes: Vec<String>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Report {
        Report { title: title.into(), ..Report::default() }
    }

    pub fn title(&self) -> &str {
        &self.title
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl fmt::Display) {
        self.meta.push((key.into(), value.to_string()));
    }

    pub fn push(&mut self, check: impl Into<String>, fingerprint: impl Into<String>, verdict: Verdict) {
        self.lines.push(CheckLine { check: check.into(), fingerprint: fingerprint.into(), verdict });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Appends the other report's lines and notes; its header is dropped.
    pub fn absorb(&mut self, other: Report) {
        self.lines.extend(other.lines);
        self.notes.extend(other.notes);
    }

    pub fn lines(&self) -> &[CheckLine] {
        &self.lines
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    /// Lines whose check id starts with `prefix`.
    pub fn matching<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a CheckLine> + 'a {
        self.lines.iter().filter(move |l| l.check.starts_with(prefix))
    }

    /// `(pass, fail, indet)` over the lines matching `prefix`.
    pub fn counts(&self, prefix: &str) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for l in self.matching(prefix) {
            match l.verdict {
                Verdict::Pass => c.0 += 1,
                Verdict::Fail => c.1 += 1,
                Verdict::Indet => c.2 += 1,
            }
        }
        c
    }

    /// No failing line. Indeterminate lines do not fail a report.
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.verdict != Verdict::Fail)
    }

    pub fn render(&self) -> String {
        let mut out = format!("# {}\n", self.title);
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let mut lines = self.lines.clone();
        lines.sort();
        for l in &lines {
            out.push_str(&format!("{}\t{}\t{}\n", l.check, l.fingerprint, l.verdict));
        }
        for n in &self.notes {
            out.push_str(&format!("# note: {n}\n"));
        }
        let (p, f, i) = self.counts("");
        out.push_str(&format!("# summary: pass={p} fail={f} indet={i}\n"));
        out
    }
}
