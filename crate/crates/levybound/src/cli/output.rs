//! Self-describing CSV documents and ordered parallel evaluation.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Version of every CSV layout written by the CLI.
pub const SCHEMA_VERSION: u32 = 1;

/// Numbers are written with 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// `# key: value` comment lines, then a header starting with `schema_version`, then rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvDoc {
    pub name: String,
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvDoc {
    pub fn new(name: &str, header: &[&str]) -> Self {
        let mut h = vec!["schema_version".to_string()];
        h.extend(header.iter().map(|s| s.to_string()));
        CsvDoc {
            name: name.to_string(),
            comments: Vec::new(),
            header: h,
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len() + 1, self.header.len());
        let mut r = vec![SCHEMA_VERSION.to_string()];
        r.extend(row);
        self.rows.push(r);
    }

    pub fn render(&self) -> Result<String> {
        let mut out = Vec::new();
        for c in &self.comments {
            for line in c.lines() {
                writeln!(out, "# {line}").map_err(io)?;
            }
        }
        {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut out);
            w.write_record(&self.header).map_err(io)?;
            for r in &self.rows {
                w.write_record(r).map_err(io)?;
            }
            w.flush().map_err(io)?;
        }
        String::from_utf8(out).map_err(io)
    }

    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(io)?;
        std::fs::write(dir.join(format!("{}.csv", self.name)), self.render()?).map_err(io)
    }
}

fn io(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

/// Map over items on scoped worker threads; results keep the input order.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(items.len().max(1));
    if workers <= 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(workers);
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| {
                let f = &f;
                s.spawn(move || c.iter().map(f).collect::<Vec<_>>())
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_has_comments_then_header() {
        let mut d = CsvDoc::new("t", &["a", "b"]);
        d.comment("config: {}");
        d.push(vec![num(1.5), "x".into()]);
        let s = d.render().unwrap();
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines[0], "# config: {}");
        assert_eq!(lines[1], "schema_version,a,b");
        assert_eq!(lines[2], "1,1.5000000000000000e0,x");
    }

    #[test]
    fn par_map_keeps_order() {
        let v: Vec<u32> = (0..100).collect();
        assert_eq!(
            par_map(&v, |x| x * 2),
            v.iter().map(|x| x * 2).collect::<Vec<_>>()
        );
    }
}
