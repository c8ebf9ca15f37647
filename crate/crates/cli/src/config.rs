//! `key = value` config files. Keys use the long flag names; values given on
//! the command line win over values from the file.

use std::fs;
use std::path::Path;

use regip_core::{Error, Result};

pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("config line {}: expected key = value", lineno + 1)))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(Error::InvalidParameter(format!("config line {}: bad key `{key}`", lineno + 1)));
        }
        pairs.push((key, value.trim().to_string()));
    }
    Ok(pairs)
}

pub fn load(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read config {}: {e}", path.display())))?;
    parse(&text)
}

/// Pulls `--config PATH` (or `--config=PATH`) out of `args` and splices the
/// file's settings in right after the subcommand, ahead of explicit flags.
pub fn expand(args: Vec<String>) -> Result<Vec<String>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        if arg == "--config" {
            let value = it
                .next()
                .ok_or_else(|| Error::InvalidParameter("--config needs a path".into()))?;
            path = Some(value);
        } else if let Some(value) = arg.strip_prefix("--config=") {
            path = Some(value.to_string());
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = path else { return Ok(rest) };

    let at = rest
        .iter()
        .skip(1)
        .position(|a| !a.starts_with('-'))
        .map(|i| i + 2)
        .ok_or_else(|| Error::InvalidParameter("--config given without a subcommand".into()))?;
    let injected = load(Path::new(&path))?
        .into_iter()
        .flat_map(|(k, v)| [format!("--{k}"), v]);
    rest.splice(at..at, injected);
    Ok(rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_comments_and_underscores() {
        let pairs = parse("# sweep\ntol = 1e-5\n\ntime_limit=30 # seconds\n").unwrap();
        assert_eq!(pairs, vec![("tol".into(), "1e-5".into()), ("time-limit".into(), "30".into())]);
    }

    #[test]
    fn rejects_lines_without_equals() {
        assert!(matches!(parse("tol 1e-5"), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn no_config_leaves_args_alone() {
        let args = strings(&["regip", "solve", "--problem", "QP1"]);
        assert_eq!(expand(args.clone()).unwrap(), args);
    }

    #[test]
    fn missing_file_is_a_usage_error() {
        let args = strings(&["regip", "solve", "--config", "/nonexistent/regip.conf"]);
        assert!(matches!(expand(args), Err(Error::InvalidParameter(_))));
    }
}
