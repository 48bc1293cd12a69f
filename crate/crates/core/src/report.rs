//! Report records shared by every check, and the JSON writer used for
//! machine-readable output.

use std::io;

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter};

/// One failed check with the points or samples that witness it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub kind: String,
    pub witness: Vec<String>,
    pub detail: String,
}

impl Violation {
    pub fn new(kind: impl Into<String>, witness: Vec<String>, detail: impl Into<String>) -> Self {
        Violation {
            kind: kind.into(),
            witness,
            detail: detail.into(),
        }
    }

    fn sort_key(&self) -> (&str, &[String], &str) {
        (&self.kind, &self.witness, &self.detail)
    }
}

/// `{"check", "trials", "violations", "boundary_excluded"}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub trials: usize,
    pub violations: Vec<Violation>,
    pub boundary_excluded: usize,
}

impl CheckReport {
    pub fn new(check: impl Into<String>) -> Self {
        CheckReport {
            check: check.into(),
            trials: 0,
            violations: Vec::new(),
            boundary_excluded: 0,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.trials += other.trials;
        self.boundary_excluded += other.boundary_excluded;
        self.violations.extend(other.violations);
    }

    /// Sorts violations so the serialized form does not depend on the order
    /// in which parallel workers produced them.
    pub fn normalize(&mut self) {
        self.violations
            .sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    }
}

/// Writes floats with 17 significant digits (`{:.16e}`), which round-trips
/// every `f64` exactly. Non-finite values become `null`.
struct SigDigits<F>(F);

impl<F: Formatter> Formatter for SigDigits<F> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn write_null<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.write_null(w)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn end_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_key(w)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

fn write_with<T: Serialize, F: Formatter>(value: &T, formatter: F) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigits(formatter));
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

/// Pretty-printed JSON with 17-significant-digit floats.
pub fn to_json_pretty<T: Serialize>(value: &T) -> serde_json::Result<String> {
    write_with(value, PrettyFormatter::new())
}

/// Compact JSON with 17-significant-digit floats.
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    write_with(value, CompactFormatter)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_use_seventeen_digits_and_round_trip() {
        let vals = [3.0, 0.1, -2.5e-300, 1.0 / 3.0];
        let s = to_json(&vals).unwrap();
        assert!(s.starts_with("[3.0000000000000000e0,"), "{s}");
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vals);
        assert_eq!(to_json(&f64::NAN).unwrap(), "null");
    }

    #[test]
    fn normalize_sorts_violations() {
        let mut r = CheckReport::new("x");
        r.violations.push(Violation::new("b", vec![], ""));
        r.violations.push(Violation::new("a", vec!["2".into()], ""));
        r.violations.push(Violation::new("a", vec!["1".into()], ""));
        r.normalize();
        let kinds: Vec<_> = r
            .violations
            .iter()
            .map(|v| (v.kind.as_str(), v.witness.clone()))
            .collect();
        assert_eq!(kinds[0], ("a", vec!["1".to_string()]));
        assert_eq!(kinds[2].0, "b");
    }
}
