//! Curve CSV files: `kind,k_or_n,rho,mu`, one polyline per block, blocks
//! separated by an empty line, LF endings. Reals are written with 17
//! significant digits so they parse back to the same binary64 value.

use std::io::{self, Read, Write};

use saddlefocus::{Curve, CurveKind, CurveLabel, CurveSet};

pub const HEADER: &str = "kind,k_or_n,rho,mu";

#[derive(Debug, thiserror::Error)]
pub enum CurveFileError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("malformed curve file, line {line}: {msg}")]
    Format { line: usize, msg: String },
}

/// 17 significant digits, e.g. `1.0100000000000000e0`.
pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

/// RFC 4180 quoting: only fields containing a comma, quote or line break
/// are quoted, with embedded quotes doubled.
fn field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_curves<W: Write>(set: &CurveSet, mut w: W) -> io::Result<()> {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    for (i, c) in set.curves.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let kind = field(c.label.kind.as_str());
        let index = c.label.index.map(|k| k.to_string()).unwrap_or_default();
        for &(rho, mu) in &c.points {
            out.push_str(&format!("{kind},{index},{},{}\n", real(rho), real(mu)));
        }
    }
    w.write_all(out.as_bytes())?;
    w.flush()
}

pub fn to_string(set: &CurveSet) -> String {
    let mut out = Vec::new();
    write_curves(set, &mut out).expect("writing to a Vec cannot fail");
    String::from_utf8(out).expect("curve files are ASCII")
}

/// Split one record into fields, honouring quotes.
fn split_record(line: &str, n: usize) -> Result<Vec<String>, CurveFileError> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut chars = line.chars().peekable();
    let mut quoted = false;
    while let Some(c) = chars.next() {
        match (quoted, c) {
            (true, '"') if chars.peek() == Some(&'"') => {
                cur.push('"');
                chars.next();
            }
            (true, '"') => quoted = false,
            (false, '"') if cur.is_empty() => quoted = true,
            (false, ',') => fields.push(std::mem::take(&mut cur)),
            (_, c) => cur.push(c),
        }
    }
    if quoted {
        return Err(CurveFileError::Format { line: n, msg: "unterminated quote".into() });
    }
    fields.push(cur);
    Ok(fields)
}

pub fn read_curves<R: Read>(mut r: R) -> Result<CurveSet, CurveFileError> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<CurveSet, CurveFileError> {
    let mut lines = text.split('\n').enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, h)) if h == HEADER => {}
        _ => return Err(CurveFileError::Format { line: 1, msg: format!("expected header `{HEADER}`") }),
    }
    let mut set = CurveSet::default();
    let mut current: Option<Curve> = None;
    for (n, line) in lines {
        if line.is_empty() {
            if let Some(c) = current.take() {
                set.curves.push(c);
            }
            continue;
        }
        let err = |msg: String| CurveFileError::Format { line: n, msg };
        let f = split_record(line, n)?;
        if f.len() != 4 {
            return Err(err(format!("expected 4 fields, found {}", f.len())));
        }
        let kind: CurveKind = f[0].parse().map_err(|e: saddlefocus::MapError| err(e.to_string()))?;
        let index = match f[1].as_str() {
            "" => None,
            s => Some(s.parse::<usize>().map_err(|_| err(format!("bad index `{s}`")))?),
        };
        let num = |s: &str| s.parse::<f64>().map_err(|_| err(format!("bad number `{s}`")));
        let point = (num(&f[2])?, num(&f[3])?);
        let label = CurveLabel { kind, index };
        match &mut current {
            Some(c) if c.label == label => c.points.push(point),
            _ => {
                if let Some(c) = current.replace(Curve { label, points: vec![point] }) {
                    set.curves.push(c);
                }
            }
        }
    }
    if let Some(c) = current {
        set.curves.push(c);
    }
    Ok(set)
}
