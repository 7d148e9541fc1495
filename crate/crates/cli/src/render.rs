//! Output formatting shared by the subcommands.

use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use robin_core::{Factorization, RealInterval};
use serde::Serialize;
use serde_json::json;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

pub struct Sink<'a> {
    pub format: Format,
    pub meta: bool,
    out: Box<dyn Write + Send + 'a>,
}

impl<'a> Sink<'a> {
    pub fn new(format: Format, meta: bool, out: Box<dyn Write + Send + 'a>) -> Self {
        Sink { format, meta, out }
    }

    pub fn write_str(&mut self, s: &str) -> std::io::Result<()> {
        self.out.write_all(s.as_bytes())?;
        self.out.flush()
    }

    /// JSON envelope `{command, meta?, result}`.
    pub fn json<T: Serialize>(&mut self, command: &str, result: &T) -> std::io::Result<()> {
        let mut v = json!({ "command": command });
        if self.meta {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            v["meta"] = json!({ "version": env!("CARGO_PKG_VERSION"), "generated_unix": secs });
        }
        v["result"] = serde_json::to_value(result).map_err(std::io::Error::other)?;
        let mut s = serde_json::to_string_pretty(&v).map_err(std::io::Error::other)?;
        s.push('\n');
        self.write_str(&s)
    }
}

/// Comma-separated rows with a header; fields containing commas or quotes
/// are quoted.
pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let esc = |f: &str| {
        if f.contains([',', '"', '\n']) {
            format!("\"{}\"", f.replace('"', "\"\""))
        } else {
            f.to_string()
        }
    };
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.iter().map(|f| esc(f)).collect::<Vec<_>>().join(","));
        s.push('\n');
    }
    s
}

/// Left-aligned columns separated by two spaces; the first column is
/// right-aligned when `numeric_first`.
pub fn aligned(header: &[&str], rows: &[Vec<String>], numeric_first: bool) -> String {
    let cols = header.len();
    let mut w: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (i, f) in r.iter().enumerate().take(cols) {
            w[i] = w[i].max(f.chars().count());
        }
    }
    let line = |fields: Vec<&str>| {
        let mut parts = Vec::new();
        for (i, f) in fields.iter().enumerate() {
            let pad = w[i] - f.chars().count();
            if i == 0 && numeric_first {
                parts.push(format!("{}{}", " ".repeat(pad), f));
            } else if i + 1 == cols {
                parts.push(f.to_string());
            } else {
                parts.push(format!("{}{}", f, " ".repeat(pad)));
            }
        }
        let mut l = parts.join("  ");
        l.push('\n');
        l
    };
    let mut s = line(header.to_vec());
    for r in rows {
        s.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    s
}

pub fn lo(iv: &RealInterval) -> String {
    iv.decimal_bounds(20).0
}

pub fn hi(iv: &RealInterval) -> String {
    iv.decimal_bounds(20).1
}

pub fn interval(iv: &RealInterval) -> String {
    let (a, b) = iv.decimal_bounds(20);
    format!("[{a}, {b}]")
}

/// Display used in the published tables: `3^3 · 5^2 · 7 … 19`. A trailing
/// run of at least five consecutive primes with exponent one is shortened
/// to its first and last member.
pub fn table_factorization(f: &Factorization) -> String {
    let fs = f.factors();
    let mut start = fs.len();
    while start > 0 && fs[start - 1].1 == 1 {
        start -= 1;
    }
    // The run must consist of consecutive primes.
    while start < fs.len() {
        let consecutive = fs[start..].windows(2).all(|w| next_prime(w[0].0) == w[1].0);
        if consecutive {
            break;
        }
        start += 1;
    }
    let term = |&(p, e): &(u64, u32)| if e == 1 { p.to_string() } else { format!("{p}^{e}") };
    if fs.len() - start >= 5 {
        let mut parts: Vec<String> = fs[..start].iter().map(term).collect();
        parts.push(format!("{} … {}", fs[start].0, fs[fs.len() - 1].0));
        parts.join(" · ")
    } else if fs.is_empty() {
        "1".into()
    } else {
        fs.iter().map(term).collect::<Vec<_>>().join(" · ")
    }
}

fn next_prime(p: u64) -> u64 {
    let mut q = p + 1;
    while !robin_core::divisors::is_prime_u64(q) {
        q += 1;
    }
    q
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condensed_runs() {
        let f: Factorization = "3^3*5^2*7*11*13*17*19".parse().unwrap();
        assert_eq!(table_factorization(&f), "3^3 · 5^2 · 7 … 19");
        let g: Factorization = "2^5*3^2*5*7*11*13".parse().unwrap();
        assert_eq!(table_factorization(&g), "2^5 · 3^2 · 5 · 7 · 11 · 13");
        let h: Factorization = "3^4*5^2*7^2*11*13*17*19*23*29*31".parse().unwrap();
        assert_eq!(table_factorization(&h), "3^4 · 5^2 · 7^2 · 11 … 31");
        assert_eq!(table_factorization(&"2".parse().unwrap()), "2");
    }

    #[test]
    fn csv_quoting() {
        let s = csv(&["a", "b"], &[vec!["1".into(), "x,y".into()]]);
        assert_eq!(s, "a,b\n1,\"x,y\"\n");
    }

    #[test]
    fn aligned_columns() {
        let s = aligned(&["M", "F"], &[vec!["2".into(), "2".into()], vec!["12".into(), "2^2 · 3".into()]], true);
        assert_eq!(s, " M  F\n 2  2\n12  2^2 · 3\n");
    }
}
