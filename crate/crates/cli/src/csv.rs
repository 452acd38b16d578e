//! Minimal CSV writer with round-trip number formatting.

use std::fmt::Write as _;

use threshold_ep::Real;

/// 17 significant digits in scientific notation.
pub fn num<T: Real>(x: T) -> String {
    format!("{:.16e}", x.to_f64().unwrap_or(f64::NAN))
}

/// CSV text built in memory so that output is written in one piece.
#[derive(Debug, Clone, Default)]
pub struct Table {
    text: String,
    columns: usize,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut t = Table { text: String::new(), columns: header.len() };
        t.push_fields(header.iter().map(|s| s.to_string()));
        t
    }

    fn push_fields(&mut self, fields: impl Iterator<Item = String>) {
        let mut n = 0;
        for (i, f) in fields.enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            debug_assert!(!f.contains([',', '\n', '"']), "field needs quoting: {f}");
            self.text.push_str(&f);
            n += 1;
        }
        assert_eq!(n, self.columns, "row width differs from header");
        self.text.push('\n');
    }

    pub fn row(&mut self, fields: Vec<String>) {
        self.push_fields(fields.into_iter());
    }

    pub fn comment(&mut self, line: &str) {
        let _ = writeln!(self.text, "# {line}");
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn into_string(self) -> String {
        self.text
    }
}
