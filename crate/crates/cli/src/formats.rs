//! Text formats for subshifts, measures and rectangle families.
//!
//! All three share the same lexical rules: `#` starts a comment, blank lines
//! are ignored, headers are `key: value`. The writers emit the canonical form
//! that the parsers accept back unchanged.

use std::fmt::Write as _;

use shiftdim_core::info::MeasureSpec;
use shiftdim_core::lattice::{IntRect, Point};
use shiftdim_core::subshift::{Alphabet, Certificate, Pattern, SftSpec};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{0}")]
    Invalid(#[from] shiftdim_core::Error),
}

fn syntax<T>(line: usize, col: usize, msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError::Syntax { line, col, msg: msg.into() })
}

/// A non-blank line with comments removed: 1-based number, text, and the
/// 1-based column where the text starts.
struct Line<'a> {
    number: usize,
    text: &'a str,
    offset: usize,
}

fn lines(input: &str) -> impl Iterator<Item = Line<'_>> {
    input.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let text = body.trim();
        (!text.is_empty()).then(|| Line { number: i + 1, text, offset: raw.find(text).unwrap_or(0) + 1 })
    })
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(text: &str, base: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((base + s, &text[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((base + s, &text[s..]));
    }
    out
}

/// Splits `key: value`; the value's column is returned alongside.
fn header<'a>(line: &Line<'a>) -> Option<(&'a str, &'a str, usize)> {
    let (key, rest) = line.text.split_once(':')?;
    let key = key.trim();
    if key.is_empty() || key.contains(char::is_whitespace) {
        return None;
    }
    let value = rest.trim();
    let col = line.offset + line.text.len() - rest.len() + (rest.len() - rest.trim_start().len());
    Some((key, value, col))
}

struct RawCell {
    col: usize,
    coords: Vec<i64>,
    symbol: String,
}

fn parse_cell(line: usize, col: usize, tok: &str) -> Result<RawCell, FormatError> {
    let Some(rest) = tok.strip_prefix('(') else {
        return syntax(line, col, format!("expected a cell like (m,n)=s, found {tok:?}"));
    };
    let Some((inside, symbol)) = rest.split_once(")=") else {
        return syntax(line, col, format!("expected `)=<symbol>` in {tok:?}"));
    };
    let mut coords = Vec::new();
    for part in inside.split(',') {
        match part.trim().parse::<i64>() {
            Ok(v) => coords.push(v),
            Err(_) => return syntax(line, col + 1, format!("bad coordinate {part:?}")),
        }
    }
    if symbol.is_empty() {
        return syntax(line, col, "missing symbol after `=`");
    }
    Ok(RawCell { col, coords, symbol: symbol.to_string() })
}

/// Parses the subshift grammar:
///
/// ```text
/// dimension: 2
/// alphabet: 0 1
/// certified: row-lift        # optional: full | row-lift | three-dot
/// forbidden:
/// (0,0)=1 (1,0)=1            # 1D cells are written (m)=s
/// ```
pub fn parse_sft(input: &str) -> Result<SftSpec, FormatError> {
    let mut dimension: Option<(u8, usize)> = None;
    let mut alphabet: Option<(Alphabet, usize)> = None;
    let mut certified: Option<(Certificate, usize, usize)> = None;
    let mut in_forbidden = false;
    let mut patterns: Vec<(usize, Vec<RawCell>)> = Vec::new();

    for line in lines(input) {
        let n = line.number;
        if in_forbidden && line.text.starts_with('(') {
            let cells = tokens(line.text, line.offset)
                .into_iter()
                .map(|(col, tok)| parse_cell(n, col, tok))
                .collect::<Result<Vec<_>, _>>()?;
            patterns.push((n, cells));
            continue;
        }
        let Some((key, value, col)) = header(&line) else {
            return syntax(n, line.offset, format!("expected `key: value`, found {:?}", line.text));
        };
        match key {
            "dimension" => match value {
                "1" => dimension = Some((1, n)),
                "2" => dimension = Some((2, n)),
                _ => return syntax(n, col, format!("dimension must be 1 or 2, found {value:?}")),
            },
            "alphabet" => {
                let toks = tokens(value, col);
                if toks.is_empty() {
                    return syntax(n, col, "alphabet needs at least one symbol");
                }
                for (i, (c, t)) in toks.iter().enumerate() {
                    if toks[..i].iter().any(|(_, u)| u == t) {
                        return syntax(n, *c, format!("duplicate symbol {t:?}"));
                    }
                }
                let a = Alphabet::new(toks.iter().map(|(_, t)| *t))
                    .or_else(|e| syntax(n, col, e.to_string()))?;
                alphabet = Some((a, n));
            }
            "certified" => match Certificate::from_tag(value) {
                Some(c) => certified = Some((c, n, col)),
                None => return syntax(n, col, format!("unknown certificate {value:?} (full, row-lift, three-dot)")),
            },
            "forbidden" => {
                in_forbidden = true;
                if !value.is_empty() {
                    return syntax(n, col, "forbidden patterns go on the lines after `forbidden:`");
                }
            }
            _ => return syntax(n, line.offset, format!("unknown key {key:?}")),
        }
    }

    let Some((dim, _)) = dimension else {
        return syntax(1, 1, "missing `dimension:` line");
    };
    let Some((alphabet, _)) = alphabet else {
        return syntax(1, 1, "missing `alphabet:` line");
    };
    let mut forbidden = Vec::with_capacity(patterns.len());
    for (n, cells) in patterns {
        let mut seen: Vec<Point> = Vec::new();
        let mut out = Vec::with_capacity(cells.len());
        for cell in cells {
            let p = match (dim, cell.coords.as_slice()) {
                (1, [m]) => Point::new(*m, 0),
                (2, [m, k]) => Point::new(*m, *k),
                (1, _) => return syntax(n, cell.col, "1D cells take one coordinate: (m)=s"),
                _ => return syntax(n, cell.col, "2D cells take two coordinates: (m,n)=s"),
            };
            if seen.contains(&p) {
                return syntax(n, cell.col, format!("duplicate cell ({},{}) in one pattern", p.m, p.n));
            }
            seen.push(p);
            let Some(s) = alphabet.index_of(&cell.symbol) else {
                return syntax(n, cell.col, format!("symbol {:?} is not in the alphabet", cell.symbol));
            };
            out.push((p, s));
        }
        forbidden.push(Pattern::from_cells(out)?);
    }
    let sft = SftSpec::new(dim, alphabet, forbidden)?;
    match certified {
        Some((c, n, col)) => sft.with_certificate(c).or_else(|e| syntax(n, col, e.to_string())),
        None => Ok(sft),
    }
}

/// Canonical text of a subshift.
pub fn write_sft(sft: &SftSpec) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "dimension: {}", sft.dimension());
    let _ = writeln!(s, "alphabet: {}", sft.alphabet().symbols().join(" "));
    if let Some(c) = sft.certificate() {
        let _ = writeln!(s, "certified: {c}");
    }
    if !sft.forbidden().is_empty() {
        s.push_str("forbidden:\n");
        for p in sft.forbidden() {
            let cells: Vec<String> = p
                .cells()
                .map(|(q, v)| {
                    let sym = sft.alphabet().symbol(v);
                    if sft.dimension() == 1 {
                        format!("({})={sym}", q.m)
                    } else {
                        format!("({},{})={sym}", q.m, q.n)
                    }
                })
                .collect();
            let _ = writeln!(s, "{}", cells.join(" "));
        }
    }
    s
}

fn parse_numbers(n: usize, col: usize, text: &str) -> Result<Vec<f64>, FormatError> {
    tokens(text, col)
        .into_iter()
        .map(|(c, t)| match t.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => syntax(n, c, format!("expected a number, found {t:?}")),
        })
        .collect()
}

/// Parses the measure grammar:
///
/// ```text
/// type: markov-row
/// transition:
/// 0.5 0.5
/// 1 0
/// stationary: 0.6666666666666666 0.3333333333333333   # optional
/// ```
///
/// or `type: bernoulli` with `weights: p0 p1 …`.
pub fn parse_measure(input: &str) -> Result<MeasureSpec, FormatError> {
    let mut kind: Option<(String, usize, usize)> = None;
    let mut weights: Option<(Vec<f64>, usize)> = None;
    let mut transition: Vec<Vec<f64>> = Vec::new();
    let mut transition_line: Option<usize> = None;
    let mut stationary: Option<(Vec<f64>, usize)> = None;
    let mut in_transition = false;

    for line in lines(input) {
        let n = line.number;
        if in_transition && line.text.starts_with(|c: char| c.is_ascii_digit() || c == '.' || c == '-') {
            transition.push(parse_numbers(n, line.offset, line.text)?);
            continue;
        }
        in_transition = false;
        let Some((key, value, col)) = header(&line) else {
            return syntax(n, line.offset, format!("expected `key: value`, found {:?}", line.text));
        };
        match key {
            "type" => kind = Some((value.to_string(), n, col)),
            "weights" => weights = Some((parse_numbers(n, col, value)?, n)),
            "transition" => {
                if !value.is_empty() {
                    return syntax(n, col, "transition rows go on the lines after `transition:`");
                }
                in_transition = true;
                transition_line = Some(n);
            }
            "stationary" => stationary = Some((parse_numbers(n, col, value)?, n)),
            _ => return syntax(n, line.offset, format!("unknown key {key:?}")),
        }
    }
    let Some((kind, kn, kcol)) = kind else {
        return syntax(1, 1, "missing `type:` line");
    };
    match kind.as_str() {
        "bernoulli" => {
            if transition_line.is_some() || stationary.is_some() {
                return syntax(kn, kcol, "bernoulli measures take only `weights:`");
            }
            let Some((w, wn)) = weights else {
                return syntax(kn, kcol, "bernoulli measure needs a `weights:` line");
            };
            MeasureSpec::bernoulli(w).or_else(|e| syntax(wn, 1, e.to_string()))
        }
        "markov-row" => {
            if weights.is_some() {
                return syntax(kn, kcol, "markov-row measures take `transition:`, not `weights:`");
            }
            let Some(tn) = transition_line else {
                return syntax(kn, kcol, "markov-row measure needs a `transition:` block");
            };
            let (pi, pn) = match stationary {
                Some((pi, pn)) => (Some(pi), pn),
                None => (None, tn),
            };
            MeasureSpec::markov_row(transition, pi).or_else(|e| syntax(pn, 1, e.to_string()))
        }
        other => syntax(kn, kcol, format!("unknown measure type {other:?} (bernoulli, markov-row)")),
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Canonical text of a measure; numbers use the shortest exact decimal form.
pub fn write_measure(measure: &MeasureSpec) -> String {
    match measure {
        MeasureSpec::Bernoulli { weights } => format!("type: bernoulli\nweights: {}\n", join(weights)),
        MeasureSpec::MarkovRow { transition, stationary } => {
            let mut s = String::from("type: markov-row\ntransition:\n");
            for row in transition {
                let _ = writeln!(s, "{}", join(row));
            }
            let _ = writeln!(s, "stationary: {}", join(stationary));
            s
        }
    }
}

/// One rectangle per line as four integers `a b c d`, meaning `[a,b] × [c,d]`.
pub fn parse_rects(input: &str) -> Result<Vec<IntRect>, FormatError> {
    lines(input)
        .map(|line| {
            let toks = tokens(line.text, line.offset);
            if toks.len() != 4 {
                return syntax(line.number, line.offset, "expected four integers `a b c d`");
            }
            let mut v = [0i64; 4];
            for (slot, (c, t)) in v.iter_mut().zip(&toks) {
                *slot = t.parse().or_else(|_| syntax(line.number, *c, format!("bad integer {t:?}")))?;
            }
            IntRect::new(v[0], v[1], v[2], v[3]).or_else(|e| syntax(line.number, line.offset, e.to_string()))
        })
        .collect()
}

pub fn write_rects(rects: &[IntRect]) -> String {
    rects.iter().map(|r| format!("{} {} {} {}\n", r.a(), r.b(), r.c(), r.d())).collect()
}
