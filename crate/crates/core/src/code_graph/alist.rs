//! alist parity-check matrix text format (MacKay convention).
//!
//! ```text
//! n m
//! max_var_degree max_chk_degree
//! var degrees, n entries
//! chk degrees, m entries
//! n lines: per variable, 1-based check indices, zero-padded to max_var_degree
//! m lines: per check, 1-based variable indices, zero-padded to max_chk_degree
//! ```
//!
//! [`emit_alist`] writes the canonical form — adjacency entries ascending,
//! single-space separated, zero padding at the end of each line — and
//! `load_alist(emit_alist(code))` reproduces the code exactly.

use super::{Edge, ParityCheckCode, MAX_EDGES, MAX_N};
use crate::error::{AlistErrorKind, Error, Result};

struct Lines<'a> {
    inner: std::str::Lines<'a>,
    lineno: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines(),
            lineno: 0,
        }
    }

    /// Next non-empty line, as whitespace-separated tokens.
    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        loop {
            let line = self.inner.next()?;
            self.lineno += 1;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if !toks.is_empty() {
                return Some((self.lineno, toks));
            }
        }
    }
}

fn parse_usize(tok: &str, line: usize, what: &str, kind: AlistErrorKind) -> Result<usize> {
    tok.parse::<usize>().map_err(|_| Error::AlistParse {
        line,
        kind,
        msg: format!("{what}: expected a non-negative integer, got {tok:?}"),
    })
}

fn expect_counts(
    toks: &[&str],
    want: usize,
    line: usize,
    what: &str,
    kind: AlistErrorKind,
) -> Result<()> {
    if toks.len() != want {
        return Err(Error::AlistParse {
            line,
            kind,
            msg: format!("{what}: expected {want} entries, got {}", toks.len()),
        });
    }
    Ok(())
}

/// Parse alist text into a validated [`ParityCheckCode`].
///
/// The row adjacency section must agree exactly with the column section;
/// zero padding is accepted only after the real entries of a line.
pub fn load_alist(text: &str) -> Result<ParityCheckCode> {
    let mut lines = Lines::new(text);
    let truncated = |line: usize, what: &str| Error::AlistParse {
        line,
        kind: AlistErrorKind::Truncated,
        msg: format!("missing {what}"),
    };

    let (hline, htoks) = lines
        .next_tokens()
        .ok_or_else(|| truncated(0, "header line"))?;
    expect_counts(&htoks, 2, hline, "header", AlistErrorKind::Header)?;
    let n = parse_usize(htoks[0], hline, "n", AlistErrorKind::Header)?;
    let m = parse_usize(htoks[1], hline, "m", AlistErrorKind::Header)?;
    if n == 0 || m == 0 {
        return Err(Error::AlistParse {
            line: hline,
            kind: AlistErrorKind::Header,
            msg: format!("dimensions must be positive, got n={n} m={m}"),
        });
    }
    if n > MAX_N {
        return Err(Error::AlistParse {
            line: hline,
            kind: AlistErrorKind::Header,
            msg: format!("block length {n} exceeds the supported maximum {MAX_N}"),
        });
    }

    let (dline, dtoks) = lines
        .next_tokens()
        .ok_or_else(|| truncated(hline, "max-degree line"))?;
    expect_counts(&dtoks, 2, dline, "max degrees", AlistErrorKind::Header)?;
    let max_var = parse_usize(dtoks[0], dline, "max var degree", AlistErrorKind::Header)?;
    let max_chk = parse_usize(dtoks[1], dline, "max chk degree", AlistErrorKind::Header)?;

    let (vline, vtoks) = lines
        .next_tokens()
        .ok_or_else(|| truncated(dline, "variable degree list"))?;
    expect_counts(&vtoks, n, vline, "variable degrees", AlistErrorKind::Degrees)?;
    let mut var_deg = Vec::with_capacity(n);
    for t in &vtoks {
        var_deg.push(parse_usize(t, vline, "variable degree", AlistErrorKind::Degrees)?);
    }

    let (cline, ctoks) = lines
        .next_tokens()
        .ok_or_else(|| truncated(vline, "check degree list"))?;
    expect_counts(&ctoks, m, cline, "check degrees", AlistErrorKind::Degrees)?;
    let mut chk_deg = Vec::with_capacity(m);
    for t in &ctoks {
        chk_deg.push(parse_usize(t, cline, "check degree", AlistErrorKind::Degrees)?);
    }

    if let Some(v) = var_deg.iter().position(|&d| d == 0) {
        return Err(Error::AlistParse {
            line: vline,
            kind: AlistErrorKind::ZeroColumn,
            msg: format!("variable {} has degree 0", v + 1),
        });
    }
    if let Some(c) = chk_deg.iter().position(|&d| d == 0) {
        return Err(Error::AlistParse {
            line: cline,
            kind: AlistErrorKind::ZeroRow,
            msg: format!("check {} has degree 0", c + 1),
        });
    }
    if var_deg.iter().max() != Some(&max_var) || chk_deg.iter().max() != Some(&max_chk) {
        return Err(Error::AlistParse {
            line: dline,
            kind: AlistErrorKind::Degrees,
            msg: format!(
                "declared max degrees ({max_var}, {max_chk}) disagree with degree lists ({}, {})",
                var_deg.iter().max().unwrap(),
                chk_deg.iter().max().unwrap()
            ),
        });
    }
    let total: usize = var_deg.iter().sum();
    if total != chk_deg.iter().sum::<usize>() {
        return Err(Error::AlistParse {
            line: cline,
            kind: AlistErrorKind::Degrees,
            msg: "variable and check degree sums disagree".into(),
        });
    }
    if total > MAX_EDGES {
        return Err(Error::AlistParse {
            line: vline,
            kind: AlistErrorKind::Degrees,
            msg: format!("{total} edges exceed the supported maximum {MAX_EDGES}"),
        });
    }

    // Parse one adjacency line: `deg` real 1-based entries in 1..=limit,
    // then optional zero padding up to `max`.
    let mut read_adjacency = |deg: usize, max: usize, limit: usize, what: &str| -> Result<(usize, Vec<usize>)> {
        let (line, toks) = lines
            .next_tokens()
            .ok_or_else(|| truncated(0, "adjacency line"))?;
        if toks.len() < deg || toks.len() > max.max(deg) {
            return Err(Error::AlistParse {
                line,
                kind: AlistErrorKind::Adjacency,
                msg: format!("{what}: expected {deg} entries (padded to at most {max}), got {}", toks.len()),
            });
        }
        let mut out = Vec::with_capacity(deg);
        for (i, t) in toks.iter().enumerate() {
            let x = parse_usize(t, line, what, AlistErrorKind::Adjacency)?;
            if i < deg {
                if x == 0 || x > limit {
                    return Err(Error::AlistParse {
                        line,
                        kind: AlistErrorKind::Range,
                        msg: format!("{what}: index {x} outside 1..={limit}"),
                    });
                }
                out.push(x - 1);
            } else if x != 0 {
                return Err(Error::AlistParse {
                    line,
                    kind: AlistErrorKind::Adjacency,
                    msg: format!("{what}: nonzero entry {x} in padding"),
                });
            }
        }
        Ok((line, out))
    };

    let mut edges: Vec<Edge> = Vec::with_capacity(total);
    let mut col_lines = Vec::with_capacity(n);
    for v in 0..n {
        let (line, checks) = read_adjacency(var_deg[v], max_var, m, "column list")?;
        let mut sorted = checks.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::AlistParse {
                line,
                kind: AlistErrorKind::Adjacency,
                msg: format!("column {} lists a check twice", v + 1),
            });
        }
        for &c in &sorted {
            edges.push(Edge {
                v: v as u32,
                c: c as u32,
            });
        }
        col_lines.push(line);
    }

    // Row section must mirror the column section exactly.
    let mut row_sets: Vec<Vec<usize>> = vec![Vec::new(); m];
    for e in &edges {
        row_sets[e.c as usize].push(e.v as usize);
    }
    for c in 0..m {
        let (line, vars) = read_adjacency(chk_deg[c], max_chk, n, "row list")?;
        let mut sorted = vars;
        sorted.sort_unstable();
        if sorted != row_sets[c] {
            return Err(Error::AlistParse {
                line,
                kind: AlistErrorKind::Adjacency,
                msg: format!("row {} disagrees with the column lists", c + 1),
            });
        }
    }

    // Edges were pushed in (v, c)-sorted order already.
    ParityCheckCode::from_canonical_edges(n, m, edges).map_err(|e| match e {
        Error::InvalidCode(msg) => Error::AlistParse {
            line: hline,
            kind: AlistErrorKind::Adjacency,
            msg,
        },
        other => other,
    })
}

/// Emit the canonical alist text for a code. Inverse of [`load_alist`].
pub fn emit_alist(code: &ParityCheckCode) -> String {
    let n = code.n();
    let m = code.num_checks();
    assert!(m > 0, "a code with no checks has no alist form");
    let max_var = (0..n).map(|v| code.var_degree(v)).max().unwrap_or(0);
    let max_chk = (0..m).map(|c| code.chk_degree(c)).max().unwrap_or(0);

    let mut out = String::new();
    out.push_str(&format!("{n} {m}\n{max_var} {max_chk}\n"));
    let joined = |it: Vec<String>| it.join(" ");
    out.push_str(&joined((0..n).map(|v| code.var_degree(v).to_string()).collect()));
    out.push('\n');
    out.push_str(&joined((0..m).map(|c| code.chk_degree(c).to_string()).collect()));
    out.push('\n');

    for v in 0..n {
        let mut entries: Vec<String> = code.var_edges(v)
            .map(|eid| (code.edges()[eid].c + 1).to_string())
            .collect();
        entries.resize(max_var, "0".to_string());
        out.push_str(&joined(entries));
        out.push('\n');
    }
    for c in 0..m {
        let mut entries: Vec<String> = code
            .chk_edges(c)
            .iter()
            .map(|&eid| (code.edges()[eid as usize].v + 1).to_string())
            .collect();
        entries.resize(max_chk, "0".to_string());
        out.push_str(&joined(entries));
        out.push('\n');
    }
    out
}
