//! Deterministic artifact writers: RFC-4180-style CSV ('.' decimal, LF
//! endings, leading digest comment) and binary 8-bit PGM (P5).

use std::fmt::Write as _;
use std::path::Path;

/// Assemble a CSV body: digest comment, header row, then records. Floats
/// use Rust's shortest-roundtrip formatting, so identical runs produce
/// identical bytes.
pub struct Csv {
    body: String,
}

impl Csv {
    pub fn new(command: &str, digest: u64, echo: &str, header: &[&str]) -> Csv {
        let mut body = String::new();
        let _ = writeln!(body, "# chernlab {command} digest={digest:016x} config={echo}");
        let _ = writeln!(body, "{}", header.join(","));
        Csv { body }
    }

    pub fn row(&mut self, fields: &[String]) {
        let _ = writeln!(self.body, "{}", fields.join(","));
    }

    pub fn write(self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.body)
    }

    #[cfg(test)]
    pub fn into_string(self) -> String {
        self.body
    }
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// Write an 8-bit binary PGM (P5). `pixels` is row-major, `width` fastest.
pub fn write_pgm(path: &Path, width: usize, height: usize, pixels: &[u8]) -> std::io::Result<()> {
    assert_eq!(pixels.len(), width * height);
    let mut bytes = format!("P5\n{width} {height}\n255\n").into_bytes();
    bytes.extend_from_slice(pixels);
    std::fs::write(path, bytes)
}
