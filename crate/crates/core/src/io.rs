//! Text formats for posets, elements, linear maps and preserver specs.
//!
//! All files are line based; `#` starts a comment and blank lines are
//! ignored. Errors carry the 1-based line number of the offending line.
//!
//! ```text
//! poset                      map                      spec
//! elements: a b c            field: Fp 3              field: Fp 3
//! relations: a<b b<c         poset: chain:2           poset: chain:2
//!                            1 0 0                    lambda: 1->{1} 2->{2}
//!                            0 1 0                    psi:
//!                            0 0 1                    0 0 1
//! ```
//!
//! A spec's `psi:` block holds either all `d` rows or only the `m` radical
//! rows; `xor-lambda:` replaces `lambda:` over `Fp 2`. In map and spec files
//! the `field:` and `poset:` headers may be omitted when supplied by the caller.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::FIElement;
use crate::boolean_endo::{PartitionEndo, Subset, XorEndo};
use crate::field::{FieldDesc, Scalar};
use crate::poset::Poset;
use crate::preserver::{Lambda, LinearMap, PreserverSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}line {line}: {message}", source_prefix(.file))]
pub struct ParseError {
    pub file: Option<String>,
    pub line: usize,
    pub message: String,
}

fn source_prefix(file: &Option<String>) -> String {
    file.as_ref().map(|s| format!("{s}: ")).unwrap_or_default()
}

impl ParseError {
    fn at(line: usize, message: impl ToString) -> Self {
        ParseError { file: None, line, message: message.to_string() }
    }

    pub fn in_file(mut self, path: &Path) -> Self {
        self.file = Some(path.display().to_string());
        self
    }
}

/// Non-blank lines with comments stripped, paired with their line numbers.
fn content_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect()
}

fn header<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    line.strip_prefix(key)
        .and_then(|rest| rest.trim_start().strip_prefix(':'))
        .map(str::trim)
}

pub fn parse_poset(text: &str) -> Result<Poset, ParseError> {
    let lines = content_lines(text);
    let mut it = lines.into_iter();
    match it.next() {
        Some((_, "poset")) => {}
        Some((n, other)) => return Err(ParseError::at(n, format!("expected `poset`, found `{other}`"))),
        None => return Err(ParseError::at(1, "empty poset file")),
    }
    let mut elements: Option<(usize, Vec<String>)> = None;
    let mut relations: Vec<(usize, String, String)> = Vec::new();
    for (n, line) in it {
        if let Some(rest) = header(line, "elements") {
            if elements.is_some() {
                return Err(ParseError::at(n, "duplicate `elements:` line"));
            }
            elements = Some((n, rest.split_whitespace().map(str::to_string).collect()));
        } else if let Some(rest) = header(line, "relations") {
            for token in rest.split_whitespace() {
                let parts: Vec<&str> = token.split('<').collect();
                if parts.len() < 2 || parts.iter().any(|p| p.is_empty()) {
                    return Err(ParseError::at(n, format!("bad relation `{token}`; expected a<b")));
                }
                for w in parts.windows(2) {
                    relations.push((n, w[0].to_string(), w[1].to_string()));
                }
            }
        } else {
            return Err(ParseError::at(n, format!("unexpected line `{line}`")));
        }
    }
    let (en, labels) = elements.ok_or_else(|| ParseError::at(1, "missing `elements:` line"))?;
    let mut pairs = Vec::new();
    for (n, a, b) in &relations {
        let find = |s: &str| {
            labels
                .iter()
                .position(|l| l == s)
                .ok_or_else(|| ParseError::at(*n, format!("unknown element label `{s}`")))
        };
        pairs.push((find(a)?, find(b)?));
    }
    let line = relations.last().map_or(en, |r| r.0);
    Poset::new(labels, &pairs).map_err(|e| ParseError::at(line, e))
}

/// A built-in name (`chain:3`, `v`, ...) or a path to a poset file, resolved
/// against `base` when relative.
pub fn resolve_poset(reference: &str, base: Option<&Path>) -> Result<Poset, ParseError> {
    if let Ok(p) = Poset::builtin(reference) {
        return Ok(p);
    }
    let looks_builtin = ["chain:", "antichain:"].iter().any(|b| reference.starts_with(b));
    let path = match base {
        Some(dir) if Path::new(reference).is_relative() => dir.join(reference),
        _ => PathBuf::from(reference),
    };
    match std::fs::read_to_string(&path) {
        Ok(text) => parse_poset(&text).map_err(|e| e.in_file(&path)),
        Err(_) if looks_builtin => Err(ParseError::at(0, Poset::builtin(reference).unwrap_err())),
        Err(e) => Err(ParseError::at(
            0,
            format!("`{reference}` is neither a built-in poset nor a readable file ({e})"),
        )),
    }
}

pub fn parse_field(text: &str) -> Result<FieldDesc, ParseError> {
    text.parse().map_err(|e| ParseError::at(0, e))
}

/// `2*e[a] + 1/2*e[a,b]`; a bare `e[..]` has coefficient 1 and `0` is zero.
pub fn parse_element(text: &str, poset: &Arc<Poset>, field: FieldDesc) -> Result<FIElement, ParseError> {
    let err = |m: String| ParseError::at(1, m);
    let mut out = FIElement::zero(poset, field);
    let text = text.trim();
    if text == "0" {
        return Ok(out);
    }
    for term in text.split('+').map(str::trim) {
        let (coeff, basis) = match term.split_once('*') {
            Some((c, b)) => (field.parse_scalar(c).map_err(|e| err(e.to_string()))?, b.trim()),
            None => (field.one(), term),
        };
        let inner = basis
            .strip_prefix("e[")
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(|| err(format!("bad term `{term}`; expected c*e[x] or c*e[x,y]")))?;
        let labels: Vec<&str> = inner.split(',').map(str::trim).collect();
        let pos = |l: &str| poset.position(l).ok_or_else(|| err(format!("unknown element label `{l}`")));
        let (x, y) = match labels.as_slice() {
            [x] => (pos(x)?, pos(x)?),
            [x, y] => (pos(x)?, pos(y)?),
            _ => return Err(err(format!("bad term `{term}`"))),
        };
        let e = FIElement::basis(poset, field, x, y).map_err(|e| err(e.to_string()))?;
        out = out.add(&e.scale(&coeff).expect("same field")).expect("same algebra");
    }
    Ok(out)
}

fn parse_row(line: &str, n: usize, field: FieldDesc) -> Result<Vec<Scalar>, ParseError> {
    line.split_whitespace()
        .map(|t| field.parse_scalar(t).map_err(|e| ParseError::at(n, e)))
        .collect()
}

fn parse_subset(text: &str, poset: &Poset, line: usize) -> Result<Subset, ParseError> {
    let inner = text
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| ParseError::at(line, format!("bad set `{text}`; expected {{a,b}}")))?;
    let mut s = Subset::empty(poset.len());
    for l in inner.split(',').map(str::trim).filter(|l| !l.is_empty()) {
        let x = poset
            .position(l)
            .ok_or_else(|| ParseError::at(line, format!("unknown element label `{l}`")))?;
        s = s.with(x);
    }
    Ok(s)
}

/// Images of singletons, `a->{a,b} b->{}`, in poset element order.
fn parse_images(text: &str, poset: &Poset, line: usize) -> Result<Vec<Subset>, ParseError> {
    let mut images: Vec<Option<Subset>> = vec![None; poset.len()];
    for token in text.split_whitespace() {
        let (from, to) = token
            .split_once("->")
            .ok_or_else(|| ParseError::at(line, format!("bad image `{token}`; expected x->{{..}}")))?;
        let x = poset
            .position(from)
            .ok_or_else(|| ParseError::at(line, format!("unknown element label `{from}`")))?;
        if images[x].is_some() {
            return Err(ParseError::at(line, format!("`{from}` is given twice")));
        }
        images[x] = Some(parse_subset(to, poset, line)?);
    }
    images
        .into_iter()
        .enumerate()
        .map(|(x, s)| s.ok_or_else(|| ParseError::at(line, format!("missing image of `{}`", poset.label(x)))))
        .collect()
}

/// Headers and rows common to map and spec files.
struct Body<'a> {
    kind_line: usize,
    field: Option<(usize, &'a str)>,
    poset: Option<(usize, &'a str)>,
    rest: Vec<(usize, &'a str)>,
}

fn split_body<'a>(text: &'a str, kind: &str) -> Result<Body<'a>, ParseError> {
    let lines = content_lines(text);
    let mut it = lines.into_iter().peekable();
    let kind_line = match it.peek() {
        Some(&(n, l)) if l == kind => {
            it.next();
            n
        }
        Some(&(n, _)) => n,
        None => return Err(ParseError::at(1, format!("empty {kind} file"))),
    };
    let mut body = Body { kind_line, field: None, poset: None, rest: Vec::new() };
    for (n, line) in it {
        if let Some(f) = header(line, "field") {
            body.field = Some((n, f));
        } else if let Some(p) = header(line, "poset") {
            body.poset = Some((n, p));
        } else {
            body.rest.push((n, line));
        }
    }
    Ok(body)
}

/// Field and poset from the headers, falling back to (and checked against)
/// the caller's values.
fn resolve_context(
    body: &Body<'_>,
    poset: Option<&Arc<Poset>>,
    field: Option<FieldDesc>,
    base: Option<&Path>,
) -> Result<(Arc<Poset>, FieldDesc), ParseError> {
    let field = match (body.field, field) {
        (Some((n, f)), given) => {
            let parsed: FieldDesc = f.parse().map_err(|e| ParseError::at(n, e))?;
            if let Some(g) = given {
                if g != parsed {
                    return Err(ParseError::at(n, format!("file field {parsed} differs from requested {g}")));
                }
            }
            parsed
        }
        (None, Some(g)) => g,
        (None, None) => return Err(ParseError::at(body.kind_line, "missing `field:` header")),
    };
    let poset = match (body.poset, poset) {
        (Some((n, p)), given) => {
            let parsed = resolve_poset(p, base).map_err(|e| ParseError { line: n, ..e })?;
            if let Some(g) = given {
                if **g != parsed {
                    return Err(ParseError::at(n, "file poset differs from requested poset"));
                }
                g.clone()
            } else {
                Arc::new(parsed)
            }
        }
        (None, Some(g)) => g.clone(),
        (None, None) => return Err(ParseError::at(body.kind_line, "missing `poset:` header")),
    };
    Ok((poset, field))
}

fn parse_matrix(
    rows: &[(usize, &str)],
    poset: &Arc<Poset>,
    field: FieldDesc,
    first_row: usize,
    after: usize,
) -> Result<LinearMap, ParseError> {
    let d = poset.basis_len();
    let mut map = LinearMap::zero(poset, field);
    for (k, &(n, line)) in rows.iter().enumerate() {
        let row = parse_row(line, n, field)?;
        if row.len() != d {
            return Err(ParseError::at(n, format!("row has {} entries; expected {d}", row.len())));
        }
        for (j, v) in row.into_iter().enumerate() {
            map.set_entry(first_row + k, j, v);
        }
    }
    if rows.len() + first_row != d {
        let line = rows.last().map_or(after, |r| r.0);
        return Err(ParseError::at(
            line,
            format!("matrix has {} rows; expected {}", rows.len(), d - first_row),
        ));
    }
    Ok(map)
}

pub fn parse_map(
    text: &str,
    poset: Option<&Arc<Poset>>,
    field: Option<FieldDesc>,
    base: Option<&Path>,
) -> Result<LinearMap, ParseError> {
    let body = split_body(text, "map")?;
    let (poset, field) = resolve_context(&body, poset, field, base)?;
    parse_matrix(&body.rest, &poset, field, 0, body.kind_line)
}

pub fn parse_spec(
    text: &str,
    poset: Option<&Arc<Poset>>,
    field: Option<FieldDesc>,
    base: Option<&Path>,
) -> Result<PreserverSpec, ParseError> {
    let body = split_body(text, "spec")?;
    let (poset, field) = resolve_context(&body, poset, field, base)?;
    let mut lambda = None;
    let mut psi_at = None;
    for (k, &(n, line)) in body.rest.iter().enumerate() {
        if let Some(rest) = header(line, "xor-lambda") {
            let cols = parse_images(rest, &poset, n)?;
            lambda = Some((n, XorEndo::new(cols).map(Lambda::Xor).map_err(|e| ParseError::at(n, e))?));
        } else if let Some(rest) = header(line, "lambda") {
            let blocks = parse_images(rest, &poset, n)?;
            lambda = Some((n, PartitionEndo::new(blocks).map(Lambda::Partition).map_err(|e| ParseError::at(n, e))?));
        } else if header(line, "psi").is_some() {
            psi_at = Some((n, k + 1));
            break;
        } else {
            return Err(ParseError::at(n, format!("unexpected line `{line}`")));
        }
    }
    let (ln, lambda) = lambda.ok_or_else(|| ParseError::at(body.kind_line, "missing `lambda:` or `xor-lambda:` line"))?;
    let (pn, start) = psi_at.ok_or_else(|| ParseError::at(ln, "missing `psi:` block"))?;
    let rows = &body.rest[start..];
    let n = poset.len();
    let d = poset.basis_len();
    let first_row = if rows.len() == d - n { n } else { 0 };
    let psi = parse_matrix(rows, &poset, field, first_row, pn)?;
    PreserverSpec::new(lambda, psi).map_err(|e| ParseError::at(pn, e))
}

fn write_rows(out: &mut String, rows: impl Iterator<Item = Vec<String>>) {
    for r in rows {
        let _ = writeln!(out, "{}", r.join(" "));
    }
}

/// Map file text; `poset_ref` names the poset in the header.
pub fn format_map(map: &LinearMap, poset_ref: &str) -> String {
    let mut out = format!("map\nfield: {}\nposet: {poset_ref}\n", map.field());
    write_rows(&mut out, map.rows().map(|r| r.iter().map(ToString::to_string).collect()));
    out
}

/// Spec file text with only the radical rows of `psi`.
pub fn format_spec(spec: &PreserverSpec, poset_ref: &str) -> String {
    let poset = spec.poset();
    let mut out = format!("spec\nfield: {}\nposet: {poset_ref}\n", spec.field());
    let _ = writeln!(out, "{}", spec.lambda().display(poset));
    out.push_str("psi:\n");
    write_rows(
        &mut out,
        spec.psi().rows().skip(poset.len()).map(|r| r.iter().map(ToString::to_string).collect()),
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z3: FieldDesc = FieldDesc::Prime(3);

    #[test]
    fn poset_file() {
        let p = parse_poset("poset\n# a chain\nelements: a b c\nrelations: a<b b<c\n").unwrap();
        assert!(p.lt(0, 2));
        assert_eq!(p.strict_pairs().len(), 3);
        assert_eq!(parse_poset(&p.to_string()).unwrap(), p);
        let chained = parse_poset("poset\nelements: a b c\nrelations: a<b<c").unwrap();
        assert_eq!(chained, p);
        let e = parse_poset("poset\nelements: a b\nrelations: a<b b<a").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains("cycle"));
        let e = parse_poset("poset\nelements: a b\nrelations: a<q").unwrap_err();
        assert!(e.to_string().starts_with("line 3: unknown element"));
    }

    #[test]
    fn element_literals() {
        let p = Arc::new(Poset::builtin("chain:2").unwrap());
        let a = parse_element("2*e[1] + e[2] + 1*e[1,2]", &p, Z3).unwrap();
        assert_eq!(parse_element(&a.to_string(), &p, Z3).unwrap(), a);
        let q = FieldDesc::Rationals;
        let b = parse_element("-1/2*e[1] + 3*e[1,2]", &p, q).unwrap();
        assert_eq!(parse_element(&b.to_string(), &p, q).unwrap(), b);
        assert!(parse_element("0", &p, q).unwrap().is_zero());
        assert!(parse_element("e[2,1]", &p, q).is_err());
    }

    #[test]
    fn map_file() {
        let text = "map\nfield: Fp 3\nposet: chain:2\n1 0 0\n0 1 0\n0 0 1\n";
        let m = parse_map(text, None, None, None).unwrap();
        let p = m.poset().clone();
        assert_eq!(m, LinearMap::identity(&p, Z3));
        assert_eq!(parse_map(&format_map(&m, "chain:2"), None, None, None).unwrap(), m);
        let e = parse_map("map\nfield: Fp 3\nposet: chain:2\n1 0 0\n0 1 0\n", None, None, None).unwrap_err();
        assert!(e.message.contains("2 rows; expected 3"), "{e}");
        let e = parse_map("map\n1 0\n", None, None, None).unwrap_err();
        assert!(e.message.contains("field"));
        let bare = parse_map("1 0 0\n0 1 0\n0 0 1", Some(&p), Some(Z3), None).unwrap();
        assert_eq!(bare, m);
        assert!(parse_map(text, None, Some(FieldDesc::Rationals), None).is_err());
    }

    #[test]
    fn spec_file() {
        let text = "spec\nfield: Fp 3\nposet: chain:2\nlambda: 1->{2} 2->{1}\npsi:\n0 0 1\n";
        let s = parse_spec(text, None, None, None).unwrap();
        assert!(s.lambda().is_automorphism());
        assert_eq!(parse_spec(&format_spec(&s, "chain:2"), None, None, None).unwrap(), s);
        let full = "spec\nfield: Fp 3\nposet: chain:2\nlambda: 1->{2} 2->{1}\npsi:\n0 0 0\n0 0 0\n0 0 1\n";
        assert_eq!(parse_spec(full, None, None, None).unwrap(), s);
        let bad = "spec\nfield: Fp 3\nposet: chain:2\nlambda: 1->{1} 2->{2}\npsi:\n1 0 0\n";
        let e = parse_spec(bad, None, None, None).unwrap_err();
        assert!(e.message.contains("psi must annihilate delta"), "{e}");
        let xor = "spec\nfield: Fp 2\nposet: antichain:3\nxor-lambda: 1->{1} 2->{1,2} 3->{1,3}\npsi:\n";
        let s = parse_spec(xor, None, None, None).unwrap();
        assert!(matches!(s.lambda(), Lambda::Xor(_)));
        let overlap = "spec\nfield: Fp 3\nposet: chain:2\nlambda: 1->{1,2} 2->{2}\npsi:\n0 0 1\n";
        assert_eq!(parse_spec(overlap, None, None, None).unwrap_err().line, 4);
    }

    #[test]
    fn poset_reference_files() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("v.txt"), "poset\nelements: a b c\nrelations: a<c b<c\n").unwrap();
        let p = resolve_poset("v.txt", Some(dir.path())).unwrap();
        assert_eq!(p, Poset::builtin("v").unwrap());
        assert!(resolve_poset("chain:x", None).unwrap_err().message.contains("built-in"));
        assert!(resolve_poset("missing.txt", Some(dir.path())).is_err());
    }
}
