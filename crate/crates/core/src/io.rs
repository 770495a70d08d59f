//! Extended DIMACS shortest-path text format.
//!
//! Header `p sp <n> <m>`, arc lines `a <tail> <head> <weight>` with 1-indexed
//! vertices and decimal (possibly negative, possibly fractional) weights,
//! comment lines starting with `c`. Serialization is canonical: arcs sorted
//! by (tail, head, weight).

use crate::graph::{Graph, NegClass, Provenance, VertexId};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.msg)
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError { line, msg: msg.into() }
}

pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut g = Graph::new(0);
    let mut arcs = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut it = line.split_whitespace();
        match it.next() {
            Some("p") => {
                if header.is_some() {
                    return Err(err(ln, "duplicate header"));
                }
                if it.next() != Some("sp") {
                    return Err(err(ln, "header must read `p sp <n> <m>`"));
                }
                let n: usize = it
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err(ln, "bad vertex count"))?;
                let m: usize = it
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err(ln, "bad arc count"))?;
                if it.next().is_some() {
                    return Err(err(ln, "trailing tokens after header"));
                }
                header = Some((n, m));
                g = Graph::new(n);
            }
            Some("a") => {
                let (n, _) = header.ok_or_else(|| err(ln, "arc before header"))?;
                let tail: usize = it
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err(ln, "bad tail id"))?;
                let head: usize = it
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err(ln, "bad head id"))?;
                let w: f64 = it
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err(ln, "bad weight"))?;
                if it.next().is_some() {
                    return Err(err(ln, "trailing tokens after arc"));
                }
                if !(1..=n).contains(&tail) || !(1..=n).contains(&head) {
                    return Err(err(ln, format!("vertex id out of range 1..{n}")));
                }
                if !w.is_finite() {
                    return Err(err(ln, "weight must be finite"));
                }
                g.add_edge(
                    (tail - 1) as VertexId,
                    (head - 1) as VertexId,
                    w,
                    NegClass::for_weight(w),
                    Provenance::Input,
                )
                .map_err(|e| err(ln, format!("{e:?}")))?;
                arcs += 1;
            }
            Some(tok) => return Err(err(ln, format!("unknown line kind `{tok}`"))),
            None => unreachable!("blank lines are skipped"),
        }
    }
    let (_, m) = header.ok_or_else(|| err(text.lines().count() + 1, "missing header"))?;
    if arcs != m {
        return Err(err(text.lines().count() + 1, format!("expected {m} arcs, found {arcs}")));
    }
    Ok(g)
}

/// Prints a weight without trailing noise: integers bare, fractions as-is.
fn fmt_weight(w: f64) -> String {
    if w == w.trunc() && w.abs() < 1e15 {
        format!("{}", w as i64)
    } else {
        format!("{w}")
    }
}

pub fn serialize_graph(g: &Graph) -> String {
    let mut arcs: Vec<(VertexId, VertexId, f64)> =
        g.edges().map(|e| (e.tail, e.head, e.weight)).collect();
    arcs.sort_by(|a, b| a.partial_cmp(b).expect("finite weights"));
    let mut out = format!("p sp {} {}\n", g.vertex_count(), arcs.len());
    for (t, h, w) in arcs {
        out.push_str(&format!("a {} {} {}\n", t + 1, h + 1, fmt_weight(w)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_classifies() {
        let g = parse_graph("c demo\np sp 2 1\na 1 2 -3.5\n").unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.negative_vertices(), vec![0]);
        assert_eq!(g.get_edge(0, 1, NegClass::RealNegative).unwrap().weight, -3.5);
    }

    #[test]
    fn round_trips_canonically() {
        let text = "p sp 4 3\na 1 2 -3.5\na 2 3 0\na 4 1 7\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(serialize_graph(&g), text);
        let again = parse_graph(&serialize_graph(&g)).unwrap();
        assert_eq!(serialize_graph(&again), text);
    }

    #[test]
    fn reports_line_numbers() {
        assert_eq!(parse_graph("p sp 2 1\na 3 1 0\n").unwrap_err().line, 2);
        assert_eq!(parse_graph("p sp 2 1\np sp 2 1\n").unwrap_err().line, 2);
        assert!(parse_graph("a 1 2 0\n").unwrap_err().msg.contains("header"));
        assert!(parse_graph("p sp 2 2\na 1 2 1\n").unwrap_err().msg.contains("expected 2 arcs"));
    }
}
