//! Report rendering: one deterministic text line per check, plus a stable
//! JSON mirror.

use serde_json::{json, Value};
use varseq::Verdict;

pub fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Zero => "PASS",
        Verdict::NonZero => "FAIL",
        Verdict::Undetermined { .. } => "UNDETERMINED",
    }
}

pub fn verdict_json(v: Verdict) -> Value {
    match v {
        Verdict::Zero => json!("zero"),
        Verdict::NonZero => json!("nonzero"),
        Verdict::Undetermined { trials } => json!({ "undetermined": { "trials": trials } }),
    }
}

/// Exit code contract: 0 on Zero verdicts, 1 on NonZero, 2 on Undetermined.
pub fn verdict_exit(v: Verdict) -> i32 {
    match v {
        Verdict::Zero => 0,
        Verdict::NonZero => 1,
        Verdict::Undetermined { .. } => 2,
    }
}

/// A flat, ordered report that renders as text or JSON.
pub struct Report {
    pub lines: Vec<(String, Value)>,
    pub verdict: Verdict,
}

impl Report {
    pub fn new() -> Report {
        Report {
            lines: Vec::new(),
            verdict: Verdict::Zero,
        }
    }

    pub fn note(&mut self, text: impl Into<String>, value: Value) {
        self.lines.push((text.into(), value));
    }

    pub fn check(&mut self, name: &str, v: Verdict) {
        self.verdict = self.verdict.combine(v);
        self.lines.push((
            format!("{}: {}", name, verdict_word(v)),
            json!({ "name": name, "verdict": verdict_json(v) }),
        ));
    }

    pub fn check_detail(&mut self, name: &str, v: Verdict, detail: &str) {
        self.verdict = self.verdict.combine(v);
        self.lines.push((
            format!("{}: {} ({})", name, verdict_word(v), detail),
            json!({ "name": name, "verdict": verdict_json(v), "detail": detail }),
        ));
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (line, _) in &self.lines {
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&format!("overall: {}\n", verdict_word(self.verdict)));
        out
    }

    pub fn render_json(&self) -> Value {
        json!({
            "checks": self.lines.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>(),
            "overall": verdict_json(self.verdict),
        })
    }
}
