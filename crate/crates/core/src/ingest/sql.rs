//! Minimal reader for MediaWiki SQL table dumps (`categorylinks`,
//! `langlinks`): extracts the value tuples of `INSERT INTO` statements.

use std::io::BufRead;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum SqlValue {
    Int(i64),
    Float(f64),
    Text(String),
    Null,
}

impl SqlValue {
    pub fn as_u64(&self) -> Option<u64> {
        match self {
            SqlValue::Int(i) if *i >= 0 => Some(*i as u64),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            SqlValue::Text(s) => Some(s),
            _ => None,
        }
    }
}

/// Calls `f` for every value tuple inserted into `table`.
pub fn for_each_row<R, F>(reader: R, table: &str, mut f: F) -> Result<()>
where
    R: BufRead,
    F: FnMut(Vec<SqlValue>) -> Result<()>,
{
    let prefix = format!("INSERT INTO `{table}` VALUES ");
    let mut offset = 0u64;
    for line in reader.split(b'\n') {
        let line = line.map_err(|e| Error::Sql {
            offset,
            message: e.to_string(),
        })?;
        let line_len = line.len() as u64 + 1;
        if line.starts_with(prefix.as_bytes()) {
            let text = String::from_utf8_lossy(&line[prefix.len()..]);
            parse_tuples(&text, offset + prefix.len() as u64, &mut f)?;
        }
        offset += line_len;
    }
    Ok(())
}

fn parse_tuples<F>(text: &str, base: u64, f: &mut F) -> Result<()>
where
    F: FnMut(Vec<SqlValue>) -> Result<()>,
{
    let bytes = text.as_bytes();
    let err = |pos: usize, message: &str| Error::Sql {
        offset: base + pos as u64,
        message: message.to_string(),
    };
    let mut i = 0;
    loop {
        while i < bytes.len() && matches!(bytes[i], b' ' | b'\r' | b'\t') {
            i += 1;
        }
        if i >= bytes.len() {
            return Err(err(i, "statement not terminated"));
        }
        if bytes[i] != b'(' {
            return Err(err(i, "expected '('"));
        }
        i += 1;
        let mut row = Vec::new();
        loop {
            let (value, next) = parse_value(text, i).map_err(|m| err(i, m))?;
            row.push(value);
            i = next;
            match bytes.get(i) {
                Some(b',') => i += 1,
                Some(b')') => {
                    i += 1;
                    break;
                }
                _ => return Err(err(i, "expected ',' or ')'")),
            }
        }
        f(row)?;
        match bytes.get(i) {
            Some(b',') => i += 1,
            Some(b';') => return Ok(()),
            _ => return Err(err(i, "expected ',' or ';' after tuple")),
        }
    }
}

fn parse_value(text: &str, start: usize) -> std::result::Result<(SqlValue, usize), &'static str> {
    let bytes = text.as_bytes();
    match bytes.get(start) {
        Some(b'\'') => {
            let mut out = Vec::new();
            let mut i = start + 1;
            while i < bytes.len() {
                match bytes[i] {
                    b'\\' => {
                        let esc = *bytes.get(i + 1).ok_or("dangling escape")?;
                        out.push(match esc {
                            b'n' => b'\n',
                            b't' => b'\t',
                            b'r' => b'\r',
                            b'0' => 0,
                            other => other,
                        });
                        i += 2;
                    }
                    b'\'' => {
                        let s = String::from_utf8(out).map_err(|_| "invalid UTF-8 in string")?;
                        return Ok((SqlValue::Text(s), i + 1));
                    }
                    b => {
                        out.push(b);
                        i += 1;
                    }
                }
            }
            Err("unterminated string")
        }
        Some(_) => {
            let end = text[start..]
                .find([',', ')'])
                .map(|e| start + e)
                .ok_or("unterminated value")?;
            let raw = text[start..end].trim();
            let value = if raw.eq_ignore_ascii_case("NULL") {
                SqlValue::Null
            } else if let Ok(i) = raw.parse::<i64>() {
                SqlValue::Int(i)
            } else if let Ok(x) = raw.parse::<f64>() {
                SqlValue::Float(x)
            } else {
                return Err("unrecognized literal");
            };
            Ok((value, end))
        }
        None => Err("unexpected end of statement"),
    }
}
