//! Flat `key=value` parameter files for `verify`.
//!
//! One entry per line; `#` starts a comment. A key may repeat, and a value
//! is either a single item or a comma list. Function specs contain commas
//! themselves, so the `f` key takes one spec per line.

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Params {
    /// `(line, column of value, key, value)`.
    entries: Vec<(usize, usize, String, String)>,
}

impl Params {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("");
            if body.trim().is_empty() {
                continue;
            }
            let lead = body.len() - body.trim_start().len();
            let (k, v) = body
                .split_once('=')
                .ok_or_else(|| Error::parse(line, lead + 1, "expected key=value"))?;
            let key = k.trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::parse(line, lead + 1, format!("bad key '{key}'")));
            }
            entries.push((line, lead + k.len() + 2, key.to_string(), v.trim().to_string()));
        }
        Ok(Params { entries })
    }

    /// Reads a file, or treats the argument as inline text with `;` separating lines.
    pub fn load(arg: &str) -> Result<Self> {
        let path = Path::new(arg);
        if path.is_file() {
            Self::parse(&std::fs::read_to_string(path)?)
        } else if arg.contains('=') {
            Self::parse(&arg.replace(';', "\n"))
        } else {
            Err(Error::Io(format!("params file '{arg}' not found")))
        }
    }

    /// Every value of `key`, with its position.
    pub fn all(&self, key: &str) -> Vec<(usize, usize, &str)> {
        self.entries.iter().filter(|e| e.2 == key).map(|e| (e.0, e.1, e.3.as_str())).collect()
    }

    pub fn get(&self, key: &str) -> Option<(usize, usize, &str)> {
        self.all(key).into_iter().last()
    }

    /// Keys outside `known` are reported at their line.
    pub fn check_keys(&self, known: &[&str]) -> Result<()> {
        for (line, col, key, _) in &self.entries {
            if !known.contains(&key.as_str()) {
                return Err(Error::parse(*line, col - key.len() - 1, format!("unknown key '{key}' (expected one of {})", known.join(", "))));
            }
        }
        Ok(())
    }

    pub fn floats(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some((line, col, v)) = self.get(key) else { return Ok(None) };
        let mut out = Vec::new();
        let mut c = col;
        for tok in v.split(',') {
            out.push(tok.trim().parse::<f64>().map_err(|_| Error::parse(line, c, format!("bad number '{}' for {key}", tok.trim())))?);
            c += tok.len() + 1;
        }
        Ok(Some(out))
    }

    pub fn float(&self, key: &str) -> Result<Option<f64>> {
        match self.floats(key)? {
            None => Ok(None),
            Some(v) if v.len() == 1 => Ok(Some(v[0])),
            Some(_) => {
                let (line, col, _) = self.get(key).expect("present");
                Err(Error::parse(line, col, format!("{key} takes a single value")))
            }
        }
    }

    pub fn uints(&self, key: &str) -> Result<Option<Vec<usize>>> {
        let Some(v) = self.floats(key)? else { return Ok(None) };
        let (line, col, _) = self.get(key).expect("present");
        v.into_iter()
            .map(|x| {
                if x >= 0.0 && x.fract() == 0.0 {
                    Ok(x as usize)
                } else {
                    Err(Error::parse(line, col, format!("{key} takes nonnegative integers")))
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    /// `a:b` pairs in a comma list.
    pub fn pairs(&self, key: &str) -> Result<Option<Vec<(f64, f64)>>> {
        let Some((line, col, v)) = self.get(key) else { return Ok(None) };
        let mut out = Vec::new();
        let mut c = col;
        for tok in v.split(',') {
            let bad = || Error::parse(line, c, format!("expected a:b in '{}'", tok.trim()));
            let (a, b) = tok.split_once(':').ok_or_else(bad)?;
            out.push((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?));
            c += tok.len() + 1;
        }
        Ok(Some(out))
    }

    /// A value of `key` parsed by `f`, with parse errors relocated to its line.
    pub fn map_each<T>(&self, key: &str, f: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
        self.all(key)
            .into_iter()
            .map(|(line, col, v)| {
                f(v).map_err(|e| match e {
                    Error::Parse { column, message, .. } => Error::parse(line, col + column - 1, message),
                    other => Error::parse(line, col, other.to_string()),
                })
            })
            .collect()
    }
}
