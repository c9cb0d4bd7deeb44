//! Line-based report writer. The output is valid TOML: top-level keys, then
//! one `[[suite]]` table per suite with nested `[[suite.<name>]]` rows.

use std::fmt::Write as _;

pub const REPORT_SCHEMA: &str = "biquat-report/1";

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Str(String),
    Int(i64),
    Float(f64),
    Bool(bool),
    Floats(Vec<f64>),
    Ints(Vec<i64>),
    Strs(Vec<String>),
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Str(s.to_string())
    }
}
impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Str(s)
    }
}
impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}
impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}
impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}
impl From<Vec<f64>> for Value {
    fn from(v: Vec<f64>) -> Self {
        Value::Floats(v)
    }
}
impl From<Vec<usize>> for Value {
    fn from(v: Vec<usize>) -> Self {
        Value::Ints(v.into_iter().map(|x| x as i64).collect())
    }
}
impl From<Vec<String>> for Value {
    fn from(v: Vec<String>) -> Self {
        Value::Strs(v)
    }
}

/// Floats use Rust's shortest round-trip form in scientific notation, so the
/// text is deterministic and reparses to the same bits.
fn float(out: &mut String, v: f64) {
    if v.is_nan() {
        out.push_str("nan");
    } else if v.is_infinite() {
        out.push_str(if v > 0.0 { "inf" } else { "-inf" });
    } else {
        let _ = write!(out, "{v:e}");
    }
}

fn string(out: &mut String, s: &str) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

fn key(out: &mut String, k: &str) {
    if !k.is_empty() && k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        out.push_str(k);
    } else {
        string(out, k);
    }
}

fn value(out: &mut String, v: &Value) {
    match v {
        Value::Str(s) => string(out, s),
        Value::Int(i) => {
            let _ = write!(out, "{i}");
        }
        Value::Float(f) => float(out, *f),
        Value::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        Value::Floats(xs) => list(out, xs, |o, x| float(o, *x)),
        Value::Ints(xs) => list(out, xs, |o, x| {
            let _ = write!(o, "{x}");
        }),
        Value::Strs(xs) => list(out, xs, |o, x| string(o, x)),
    }
}

fn list<T>(out: &mut String, xs: &[T], f: impl Fn(&mut String, &T)) {
    out.push('[');
    for (j, x) in xs.iter().enumerate() {
        if j > 0 {
            out.push_str(", ");
        }
        f(out, x);
    }
    out.push(']');
}

/// An ordered table of fields with nested arrays of tables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Section {
    pub fields: Vec<(String, Value)>,
    pub children: Vec<(String, Vec<Section>)>,
}

impl Section {
    pub fn new() -> Self {
        Section::default()
    }

    pub fn set(&mut self, k: &str, v: impl Into<Value>) -> &mut Self {
        self.fields.push((k.to_string(), v.into()));
        self
    }

    pub fn set_opt<V: Into<Value>>(&mut self, k: &str, v: Option<V>) -> &mut Self {
        if let Some(v) = v {
            self.set(k, v);
        }
        self
    }

    pub fn push_child(&mut self, name: &str, child: Section) {
        match self.children.iter_mut().find(|(n, _)| n == name) {
            Some((_, rows)) => rows.push(child),
            None => self.children.push((name.to_string(), vec![child])),
        }
    }

    pub fn get(&self, k: &str) -> Option<&Value> {
        self.fields.iter().find(|(n, _)| n == k).map(|(_, v)| v)
    }

    fn write_fields(&self, out: &mut String) {
        for (k, v) in &self.fields {
            key(out, k);
            out.push_str(" = ");
            value(out, v);
            out.push('\n');
        }
    }

    fn write_children(&self, out: &mut String, path: &str) {
        for (name, rows) in &self.children {
            let p = format!("{path}.{name}");
            for row in rows {
                let _ = writeln!(out, "\n[[{p}]]");
                row.write_fields(out);
                row.write_children(out, &p);
            }
        }
    }
}

/// A whole report: header fields, suite sections, and per-suite timings that
/// are kept out of the numeric payload.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub header: Section,
    pub suites: Vec<Section>,
    pub timings_ms: Vec<(String, f64)>,
}

impl Report {
    /// The deterministic part of the report.
    pub fn payload(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "schema = \"{REPORT_SCHEMA}\"");
        self.header.write_fields(&mut out);
        for s in &self.suites {
            out.push_str("\n[[suite]]\n");
            s.write_fields(&mut out);
            s.write_children(&mut out, "suite");
        }
        out
    }

    /// Payload followed by a `[timing]` table.
    pub fn render(&self, with_timing: bool) -> String {
        let mut out = self.payload();
        if with_timing && !self.timings_ms.is_empty() {
            out.push_str("\n[timing]\n");
            for (id, ms) in &self.timings_ms {
                key(&mut out, id);
                out.push_str(" = ");
                let _ = write!(out, "{ms:.3}");
                out.push('\n');
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut header = Section::new();
        header.set("scenario", "demo").set("suites", 1usize);
        let mut s = Section::new();
        s.set("id", "t1/a \"b\"").set("norm", 1.25e-17).set("value", vec![0.0, -1.5, f64::INFINITY]);
        for n in [32usize, 64] {
            let mut row = Section::new();
            row.set("n", n).set("ok", true);
            s.push_child("convergence", row);
        }
        Report { header, suites: vec![s], timings_ms: vec![("t1/a \"b\"".into(), 1.5)] }
    }

    #[test]
    fn payload_is_stable_text() {
        let expected = "schema = \"biquat-report/1\"\nscenario = \"demo\"\nsuites = 1\n\n[[suite]]\nid = \"t1/a \\\"b\\\"\"\nnorm = 1.25e-17\nvalue = [0e0, -1.5e0, inf]\n\n[[suite.convergence]]\nn = 32\nok = true\n\n[[suite.convergence]]\nn = 64\nok = true\n";
        assert_eq!(sample().payload(), expected);
    }

    #[test]
    fn rendered_report_is_toml() {
        let text = sample().render(true);
        let doc: toml::Table = toml::from_str(&text).unwrap();
        let suites = doc["suite"].as_array().unwrap();
        assert_eq!(suites[0]["convergence"].as_array().unwrap().len(), 2);
        assert_eq!(suites[0]["norm"].as_float(), Some(1.25e-17));
        assert!(doc["timing"].as_table().is_some());
        assert!(sample().render(false).find("[timing]").is_none());
    }
}
