//! Deterministic CSV text.
//!
//! Floats are written as the shortest decimal that round-trips to the same
//! `f64` (at most 17 significant digits), in exponent form outside
//! `[1e-5, 1e16)`.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 || !x.is_finite() || (x.abs() >= 1e-5 && x.abs() < 1e16) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// A CSV document: one `#` provenance line, a header, then rows.
#[derive(Debug, Clone)]
pub struct CsvDoc {
    text: String,
}

impl CsvDoc {
    pub fn new(provenance: &str, header: &[&str]) -> Self {
        let mut text = String::new();
        let _ = writeln!(text, "# {provenance}");
        text.push_str(&header.join(","));
        text.push('\n');
        Self { text }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for f in fields {
            if !first {
                self.text.push(',');
            }
            first = false;
            self.text.push_str(f.as_ref());
        }
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    /// Writes to `path`, or to stdout when `path` is `None`.
    pub fn emit(&self, path: Option<&Path>) -> io::Result<()> {
        match path {
            Some(p) => std::fs::write(p, &self.text),
            None => {
                use io::Write;
                let mut out = io::stdout().lock();
                out.write_all(self.text.as_bytes())?;
                out.flush()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortest_roundtrip() {
        assert_eq!(fmt_f64(0.5), "0.5");
        assert_eq!(fmt_f64(1.0), "1");
        assert_eq!(fmt_f64(0.1 + 0.2), "0.30000000000000004");
        assert_eq!(fmt_f64(2.5e-12), "2.5e-12");
        assert_eq!(fmt_f64(-3e20), "-3e20");
        assert_eq!(fmt_f64(0.0), "0");
        for x in [1.0 / 3.0, 2.0f64.sqrt() * 1e-9, 123456.789, -4.7377e-7] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn document_layout() {
        let mut d = CsvDoc::new("mprk test", &["a", "b"]);
        d.row(["1", "2"]);
        assert_eq!(d.as_str(), "# mprk test\na,b\n1,2\n");
    }
}
