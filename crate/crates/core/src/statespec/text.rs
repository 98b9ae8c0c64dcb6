//! Reader and writer for `.qsv` documents.
//!
//! ```text
//! # 4-party cat state
//! dims: 2 2 2 2
//! roles: A B C R
//! |0 0 0 0> = 1/sqrt(2)
//! |1 1 1 1> = 1/sqrt(2)
//! ```
//!
//! An amplitude is one value (real, or imaginary with an `i` suffix) or a
//! real value followed by an imaginary one, either as `RE IM` or
//! `RE + IMi`. A value is a signed float or `±p/sqrt(q)` with integers p, q.

use std::collections::HashSet;
use std::fmt::Write;

use num_complex::Complex64;
use thiserror::Error;

use super::{StateDocument, Term};
use crate::entropy::Role;
use crate::linalg::INPUT_NORM_TOL;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("duplicate ket")]
    DuplicateKet,
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("amplitudes have squared norm {0}, expected 1 (add `renormalize: true` to rescale)")]
    Normalization(f64),
    #[error("unknown role label `{0}`")]
    UnknownRole(String),
}

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    _src: &'a str,
}

type PResult<T> = std::result::Result<T, ParseError>;

impl<'a> Cursor<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        Cursor { chars: src.chars().collect(), pos: 0, line, _src: src }
    }

    fn error_at(&self, pos: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { line: self.line, column: pos + 1, kind }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.error_at(self.pos, ParseErrorKind::Syntax(msg.into()))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.chars.len()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> PResult<()> {
        self.skip_ws();
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{c}`")))
        }
    }

    fn eat_word(&mut self, word: &str) -> bool {
        let w: Vec<char> = word.chars().collect();
        if self.chars[self.pos..].starts_with(&w) {
            self.pos += w.len();
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.pos - start
    }

    fn unsigned_int(&mut self) -> PResult<usize> {
        self.skip_ws();
        let start = self.pos;
        if self.digits() == 0 {
            return Err(self.syntax("expected a non-negative integer"));
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse()
            .map_err(|_| self.error_at(start, ParseErrorKind::Syntax(format!("integer `{text}` too large"))))
    }

    /// Unsigned decimal literal; returns its value and whether it was a bare integer.
    fn unsigned_number(&mut self) -> PResult<(f64, bool)> {
        let start = self.pos;
        let mut mantissa = self.digits();
        let mut integral = true;
        if self.eat('.') {
            integral = false;
            mantissa += self.digits();
        }
        if mantissa == 0 {
            return Err(self.error_at(start, ParseErrorKind::Syntax("expected a number".into())));
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            integral = false;
            self.pos += 1;
            if !self.eat('+') {
                self.eat('-');
            }
            if self.digits() == 0 {
                return Err(self.syntax("expected exponent digits"));
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        let value = text
            .parse::<f64>()
            .map_err(|_| self.error_at(start, ParseErrorKind::Syntax(format!("bad number `{text}`"))))?;
        Ok((value, integral))
    }
}

/// One signed component of an amplitude.
struct Value {
    value: f64,
    imaginary: bool,
    detached_sign: bool,
}

fn value(cur: &mut Cursor) -> PResult<Value> {
    cur.skip_ws();
    let mut sign = 1.0;
    let mut signed = false;
    if cur.eat('-') {
        sign = -1.0;
        signed = true;
    } else if cur.eat('+') {
        signed = true;
    }
    let before = cur.pos;
    cur.skip_ws();
    let detached_sign = signed && cur.pos > before;
    let start = cur.pos;
    let (mut magnitude, integral) = cur.unsigned_number()?;
    if cur.eat('/') {
        if !integral {
            return Err(cur.error_at(start, ParseErrorKind::Syntax("numerator of p/sqrt(q) must be an integer".into())));
        }
        if !cur.eat_word("sqrt") {
            return Err(cur.syntax("expected `sqrt(`"));
        }
        cur.expect('(')?;
        let q = cur.unsigned_int()?;
        cur.expect(')')?;
        if q == 0 {
            return Err(cur.syntax("division by sqrt(0)"));
        }
        magnitude /= (q as f64).sqrt();
    }
    let imaginary = cur.eat('i');
    Ok(Value { value: sign * magnitude, imaginary, detached_sign })
}

fn amplitude(cur: &mut Cursor) -> PResult<Complex64> {
    let first = value(cur)?;
    if cur.at_end() {
        return Ok(if first.imaginary {
            Complex64::new(0.0, first.value)
        } else {
            Complex64::new(first.value, 0.0)
        });
    }
    if first.imaginary {
        return Err(cur.syntax("the imaginary part must come last"));
    }
    let second_at = cur.pos;
    let second = value(cur)?;
    if second.detached_sign && !second.imaginary {
        return Err(cur.error_at(second_at, ParseErrorKind::Syntax("write the imaginary part with an `i` suffix".into())));
    }
    if !cur.at_end() {
        return Err(cur.syntax("unexpected trailing input"));
    }
    Ok(Complex64::new(first.value, second.value))
}

fn ket(cur: &mut Cursor, dims: &[usize]) -> PResult<Vec<usize>> {
    cur.expect('|')?;
    let mut index = Vec::with_capacity(dims.len());
    loop {
        cur.skip_ws();
        if cur.eat('>') {
            break;
        }
        let at = cur.pos;
        let i = cur.unsigned_int()?;
        let k = index.len();
        if k >= dims.len() {
            return Err(cur.error_at(at, ParseErrorKind::Syntax(format!("ket has more than {} indices", dims.len()))));
        }
        if i >= dims[k] {
            return Err(cur.error_at(at, ParseErrorKind::IndexOutOfRange { index: i, dim: dims[k] }));
        }
        index.push(i);
    }
    if index.len() != dims.len() {
        return Err(cur.syntax(format!("ket has {} indices, expected {}", index.len(), dims.len())));
    }
    Ok(index)
}

struct Header {
    dims: Option<Vec<usize>>,
    roles: Option<Vec<Role>>,
    renormalize: bool,
    seen: HashSet<&'static str>,
}

fn header_line(cur: &mut Cursor, key: &'static str, header: &mut Header) -> PResult<()> {
    if !header.seen.insert(key) {
        return Err(cur.error_at(0, ParseErrorKind::Syntax(format!("repeated `{key}` header"))));
    }
    match key {
        "dims" => {
            let mut dims = Vec::new();
            while !cur.at_end() {
                let at = cur.pos;
                let d = cur.unsigned_int()?;
                if d == 0 {
                    return Err(cur.error_at(at, ParseErrorKind::Syntax("dimensions must be positive".into())));
                }
                dims.push(d);
            }
            if dims.is_empty() {
                return Err(cur.syntax("expected at least one dimension"));
            }
            header.dims = Some(dims);
        }
        "roles" => {
            let Some(dims) = &header.dims else {
                return Err(cur.error_at(0, ParseErrorKind::Syntax("`dims` must precede `roles`".into())));
            };
            let mut roles = Vec::new();
            while !cur.at_end() {
                let at = cur.pos;
                let mut word = String::new();
                while let Some(c) = cur.peek().filter(|c| !c.is_whitespace()) {
                    word.push(c);
                    cur.pos += 1;
                }
                roles.push(Role::from_letter(&word).ok_or_else(|| cur.error_at(at, ParseErrorKind::UnknownRole(word)))?);
            }
            if roles.len() != dims.len() {
                return Err(cur.syntax(format!("{} roles for {} subsystems", roles.len(), dims.len())));
            }
            header.roles = Some(roles);
        }
        _ => {
            cur.skip_ws();
            header.renormalize = if cur.eat_word("true") {
                true
            } else if cur.eat_word("false") {
                false
            } else {
                return Err(cur.syntax("expected `true` or `false`"));
            };
            if !cur.at_end() {
                return Err(cur.syntax("unexpected trailing input"));
            }
        }
    }
    Ok(())
}

pub fn parse_state(text: &str) -> Result<StateDocument, ParseError> {
    let mut header = Header { dims: None, roles: None, renormalize: false, seen: HashSet::new() };
    let mut terms: Vec<(usize, Term)> = Vec::new();
    let mut seen_kets = HashSet::new();
    let mut last_line = 0;

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        last_line = line_no;
        let content = raw.split('#').next().unwrap_or("");
        let mut cur = Cursor::new(content, line_no);
        if cur.at_end() {
            continue;
        }
        let start = cur.pos;
        if cur.peek() == Some('|') {
            let (Some(dims), Some(_)) = (&header.dims, &header.roles) else {
                return Err(cur.syntax("`dims` and `roles` headers must precede terms"));
            };
            let index = ket(&mut cur, dims)?;
            if !seen_kets.insert(index.clone()) {
                return Err(cur.error_at(start, ParseErrorKind::DuplicateKet));
            }
            cur.expect('=')?;
            let amp = amplitude(&mut cur)?;
            terms.push((line_no, Term { index, amp }));
            continue;
        }
        if !terms.is_empty() {
            return Err(cur.syntax("headers must precede terms"));
        }
        let key = ["dims", "roles", "renormalize"]
            .into_iter()
            .find(|k| cur.eat_word(k))
            .ok_or_else(|| cur.syntax("expected `dims:`, `roles:`, `renormalize:` or a ket"))?;
        cur.expect(':')?;
        header_line(&mut cur, key, &mut header)?;
    }

    let missing = |what: &str| ParseError {
        line: last_line + 1,
        column: 1,
        kind: ParseErrorKind::Syntax(format!("missing `{what}` header")),
    };
    let dims = header.dims.ok_or_else(|| missing("dims"))?;
    let roles = header.roles.ok_or_else(|| missing("roles"))?;

    let norm: f64 = terms.iter().map(|(_, t)| t.amp.norm_sqr()).sum();
    if header.renormalize {
        if !(norm.is_finite() && norm > 0.0) {
            let line = terms.last().map_or(last_line + 1, |(l, _)| *l);
            return Err(ParseError { line, column: 1, kind: ParseErrorKind::Normalization(norm) });
        }
        let scale = norm.sqrt().recip();
        terms.iter_mut().for_each(|(_, t)| t.amp *= scale);
    } else if !norm.is_finite() || (norm - 1.0).abs() > INPUT_NORM_TOL {
        let line = terms.last().map_or(last_line + 1, |(l, _)| *l);
        return Err(ParseError { line, column: 1, kind: ParseErrorKind::Normalization(norm) });
    }

    let mut terms: Vec<Term> = terms.into_iter().map(|(_, t)| t).collect();
    terms.sort_by(|a, b| a.index.cmp(&b.index));
    Ok(StateDocument { dims, roles, terms })
}

fn number(x: f64) -> String {
    format!("{x:.16e}")
}

/// Canonical text: headers, then terms in lexicographic ket order with
/// 17-significant-digit `RE IM` amplitudes. Near-zero terms are omitted.
pub fn format_state(doc: &StateDocument) -> String {
    let mut out = String::new();
    let join = |items: Vec<String>| items.join(" ");
    let _ = writeln!(out, "dims: {}", join(doc.dims.iter().map(|d| d.to_string()).collect()));
    let _ = writeln!(out, "roles: {}", join(doc.roles.iter().map(|r| r.to_string()).collect()));
    let mut terms: Vec<&Term> = doc.terms.iter().filter(|t| t.amp.norm() >= super::ZERO_AMPLITUDE).collect();
    terms.sort_by(|a, b| a.index.cmp(&b.index));
    for t in terms {
        let ket = join(t.index.iter().map(|i| i.to_string()).collect());
        let _ = writeln!(out, "|{ket}> = {} {}", number(t.amp.re), number(t.amp.im));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statespec::{make_cat, singleton_roles};

    const CAT: &str = "dims: 2 2 2 2\nroles: A B C R\n|0 0 0 0> = 1/sqrt(2)\n|1 1 1 1> = 1/sqrt(2)\n";

    fn kind(text: &str) -> ParseErrorKind {
        parse_state(text).unwrap_err().kind
    }

    #[test]
    fn cat_document_matches_constructor() {
        let doc = parse_state(CAT).unwrap();
        let state = doc.to_state().unwrap();
        let cat = make_cat(4).unwrap();
        for (a, b) in state.amps().iter().zip(cat.amps()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert_eq!(doc.roles, singleton_roles(4));
    }

    #[test]
    fn three_four_five() {
        let doc = parse_state("dims: 2\nroles: C\n|0> = 0.6\n|1> = 0.8i\n").unwrap();
        assert_eq!(doc.terms[0].amp, Complex64::new(0.6, 0.0));
        assert_eq!(doc.terms[1].amp, Complex64::new(0.0, 0.8));
    }

    #[test]
    fn amplitude_forms() {
        let parse = |amp: &str| {
            let text = format!("dims: 1\nroles: C\nrenormalize: true\n|0> = {amp}\n");
            let doc = parse_state(&text).unwrap();
            let raw = doc.terms[0].amp;
            raw / raw.norm()
        };
        let h = 0.5f64.sqrt();
        assert!((parse("1 1") - Complex64::new(h, h)).norm() < 1e-15);
        assert!((parse("1/sqrt(2) - 1/sqrt(2)i") - Complex64::new(h, -h)).norm() < 1e-15);
        assert!((parse("-3e-1 +4e-1i") - Complex64::new(-0.6, 0.8)).norm() < 1e-15);
        assert!((parse("+2.5 -2.5") - Complex64::new(h, -h)).norm() < 1e-15);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header\n\ndims: 2 2 # two qubits\nroles: C R\n\n|0 0> = 1 # only term\n";
        let doc = parse_state(text).unwrap();
        assert_eq!(doc.terms.len(), 1);
    }

    #[test]
    fn terms_are_sorted() {
        let text = "dims: 2\nroles: C\n|1> = 0.8\n|0> = 0.6\n";
        let doc = parse_state(text).unwrap();
        assert_eq!(doc.terms[0].index, vec![0]);
    }

    #[test]
    fn error_classes_and_positions() {
        let e = parse_state("dims: 2 2\nroles: C R\n|0 0> = 1\n|0 0> = 0\n").unwrap_err();
        assert_eq!((e.line, e.column, e.kind), (4, 1, ParseErrorKind::DuplicateKet));
        let e = parse_state("dims: 2 2\nroles: C R\n|0 2> = 1\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 4));
        assert_eq!(e.kind, ParseErrorKind::IndexOutOfRange { index: 2, dim: 2 });
        let e = parse_state("dims: 2 2\nroles: C Q\n").unwrap_err();
        assert_eq!((e.line, e.column, e.kind), (2, 10, ParseErrorKind::UnknownRole("Q".into())));
        assert!(matches!(kind("dims: 2\nroles: C\n|0> = 0.5\n"), ParseErrorKind::Normalization(_)));
        assert!(matches!(kind("dims: 2\nroles: C\n|0> = 1 +\n"), ParseErrorKind::Syntax(_)));
        assert!(matches!(kind("dims: 2\nroles: C\n|0> = 1.5/sqrt(2)\n"), ParseErrorKind::Syntax(_)));
        assert!(matches!(kind("dims: 2\nroles: C\n|0> = 1 - 1\n"), ParseErrorKind::Syntax(_)));
        assert!(matches!(kind("roles: C\n"), ParseErrorKind::Syntax(_)));
        assert!(matches!(kind("dims: 2\n|0> = 1\n"), ParseErrorKind::Syntax(_)));
        assert!(matches!(kind("dims: 2\nroles: C\n"), ParseErrorKind::Normalization(_)));
        assert!(matches!(kind("dims: 2 2\nroles: C\n"), ParseErrorKind::Syntax(_)));
        assert!(matches!(kind("dims: 2\nroles: C\n|0 1> = 1\n"), ParseErrorKind::Syntax(_)));
        assert!(matches!(kind("dims: 2\nroles: C\n|0> = 1\ndims: 2\n"), ParseErrorKind::Syntax(_)));
        let e = parse_state("dims: 2\nroles: C\n|0> = 1e\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 9));
    }

    #[test]
    fn renormalize_directive() {
        let doc = parse_state("dims: 2\nroles: C\nrenormalize: true\n|0> = 3\n|1> = 4i\n").unwrap();
        assert!((doc.terms[0].amp.re - 0.6).abs() < 1e-15);
        assert!((doc.terms[1].amp.im - 0.8).abs() < 1e-15);
    }

    #[test]
    fn canonical_cat_format() {
        let doc = StateDocument::from_state(&make_cat(4).unwrap(), singleton_roles(4)).unwrap();
        let text = format_state(&doc);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "dims: 2 2 2 2");
        assert_eq!(lines[1], "roles: A B C R");
        assert!(lines[2].starts_with("|0 0 0 0> = 7.0710678118654757e-1 "));
        assert!(lines[3].starts_with("|1 1 1 1> = "));
        assert_eq!(format_state(&parse_state(&text).unwrap()), text);
    }

    #[test]
    fn zero_terms_are_omitted() {
        let doc = StateDocument {
            dims: vec![2],
            roles: vec![Role::C],
            terms: vec![
                Term { index: vec![0], amp: Complex64::new(1.0, 0.0) },
                Term { index: vec![1], amp: Complex64::new(1e-17, 0.0) },
            ],
        };
        assert_eq!(format_state(&doc).lines().count(), 3);
    }
}
