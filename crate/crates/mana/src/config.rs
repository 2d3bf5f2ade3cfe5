//! `key = value` configuration files.
//!
//! A file given with `--config FILE` is turned into `--key value` arguments
//! placed in front of the explicit flags; the parser keeps the last
//! occurrence of a flag, so explicit flags win.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Parses `key = value` lines. Blank lines and lines starting with `#` are
/// skipped.
pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("line {}: expected key = value, got {raw:?}", i + 1);
        };
        let key = k.trim().trim_start_matches("--");
        if key.is_empty() {
            bail!("line {}: empty key", i + 1);
        }
        out.push((key.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn to_args(pairs: &[(String, String)]) -> Vec<OsString> {
    let mut args = Vec::new();
    for (k, v) in pairs {
        match v.as_str() {
            "true" => args.push(format!("--{k}").into()),
            "false" => {}
            _ => {
                args.push(format!("--{k}").into());
                args.push(v.into());
            }
        }
    }
    args
}

/// Splices the contents of any `--config FILE` into `argv` right after the
/// subcommand name and drops the `--config` flag itself.
pub fn expand(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut files = Vec::new();
    let mut rest = Vec::with_capacity(argv.len());
    let mut iter = argv.into_iter();
    while let Some(arg) = iter.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            let path = iter.next().context("--config needs a file name")?;
            files.push(path);
        } else if let Some(path) = s.strip_prefix("--config=") {
            files.push(path.into());
        } else {
            rest.push(arg);
        }
    }
    if files.is_empty() {
        return Ok(rest);
    }
    let mut injected = Vec::new();
    for f in &files {
        let text = std::fs::read_to_string(Path::new(f))
            .with_context(|| format!("reading config {}", Path::new(f).display()))?;
        injected.extend(to_args(&parse(&text)?));
    }
    // program name and subcommand stay in front
    let split = rest.len().min(2);
    let mut out: Vec<OsString> = rest[..split].to_vec();
    out.extend(injected);
    out.extend_from_slice(&rest[split..]);
    Ok(out)
}

/// Renders pairs in the format [`parse`] reads.
pub fn render(pairs: &[(String, String)]) -> String {
    let mut s = String::new();
    for (k, v) in pairs {
        let _ = writeln!(s, "{k} = {v}");
    }
    s
}
