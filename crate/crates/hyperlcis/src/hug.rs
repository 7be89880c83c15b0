//! The HUG v1 text format.
//!
//! ```text
//! HUG v1 d=3 n=5 m=2
//! 0 1 2
//! 1 2 4
//! ```
//!
//! One header line, then one line per hyperedge: `d` ascending labels
//! separated by single spaces, edges in colex order. Every line ends in LF.
//! The reader accepts exactly what the writer produces.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use hyperlcis_core::{subset, Hypergraph};

#[derive(Debug, thiserror::Error)]
pub enum HugError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] hyperlcis_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn syntax(line: usize, message: impl Into<String>) -> HugError {
    HugError::Syntax {
        line,
        message: message.into(),
    }
}

/// Renders `g` as HUG text.
pub fn to_string(g: &Hypergraph) -> String {
    let mut out = format!(
        "HUG v1 d={} n={} m={}\n",
        g.arity(),
        g.order(),
        g.edge_count()
    );
    for e in g.edges() {
        let mut first = true;
        for v in e {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

pub fn write<W: Write>(g: &Hypergraph, mut w: W) -> std::io::Result<()> {
    w.write_all(to_string(g).as_bytes())
}

pub fn write_file(g: &Hypergraph, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, to_string(g))
}

/// A canonical decimal: no sign, no leading zeros.
fn number(tok: &str, line: usize, what: &str) -> Result<usize, HugError> {
    let ok = !tok.is_empty()
        && tok.bytes().all(|b| b.is_ascii_digit())
        && (tok == "0" || !tok.starts_with('0'));
    if !ok {
        return Err(syntax(line, format!("malformed {what} {tok:?}")));
    }
    tok.parse()
        .map_err(|_| syntax(line, format!("{what} {tok} is too large")))
}

fn header_field<'a>(tok: Option<&'a str>, key: &str, line: usize) -> Result<&'a str, HugError> {
    tok.and_then(|t| t.strip_prefix(key))
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| {
            syntax(
                line,
                format!("header must be `HUG v1 d=<d> n=<n> m=<m>`, missing {key}"),
            )
        })
}

pub fn parse(text: &str) -> Result<Hypergraph, HugError> {
    if !text.ends_with('\n') {
        return Err(syntax(text.lines().count().max(1), "missing final LF"));
    }
    let mut lines = text[..text.len() - 1].split('\n');
    let head = lines.next().unwrap_or_default();
    if head.contains('\r') {
        return Err(syntax(1, "CR in line ending"));
    }
    let mut toks = head.split(' ');
    if toks.next() != Some("HUG") || toks.next() != Some("v1") {
        return Err(syntax(1, "expected `HUG v1` header"));
    }
    let d = number(header_field(toks.next(), "d", 1)?, 1, "arity")?;
    let n = number(header_field(toks.next(), "n", 1)?, 1, "order")?;
    let m = number(header_field(toks.next(), "m", 1)?, 1, "edge count")?;
    if toks.next().is_some() {
        return Err(syntax(1, "trailing header fields"));
    }
    let mut g = Hypergraph::empty(d, n)?;
    let mut edges = Vec::with_capacity(m);
    let mut last: Option<usize> = None;
    let mut edge = Vec::with_capacity(d);
    for (k, body) in lines.enumerate() {
        let line = k + 2;
        if body.contains('\r') {
            return Err(syntax(line, "CR in line ending"));
        }
        edge.clear();
        for tok in body.split(' ') {
            edge.push(number(tok, line, "vertex")?);
        }
        if edge.len() != d {
            return Err(syntax(
                line,
                format!("expected {d} labels, found {}", edge.len()),
            ));
        }
        if edge.windows(2).any(|w| w[0] >= w[1]) {
            return Err(syntax(line, "labels not strictly ascending"));
        }
        if let Some(&v) = edge.iter().find(|&&v| v >= n) {
            return Err(syntax(line, format!("vertex {v} out of range for n={n}")));
        }
        let r = subset::rank(&edge);
        if last.is_some_and(|p| p >= r) {
            return Err(syntax(line, "edges not in strictly increasing colex order"));
        }
        last = Some(r);
        edges.push(edge.clone());
    }
    if edges.len() != m {
        return Err(syntax(
            1,
            format!("header says m={m}, found {} edges", edges.len()),
        ));
    }
    if !edges.is_empty() {
        g = Hypergraph::from_edges(d, n, &edges)?;
    }
    Ok(g)
}

pub fn read<R: Read>(mut r: R) -> Result<Hypergraph, HugError> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    parse(&text)
}

pub fn read_file(path: &Path) -> Result<Hypergraph, HugError> {
    parse(&std::fs::read_to_string(path)?)
}
