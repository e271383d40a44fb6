//! Argument preprocessing: the `-lmin`/`-lmax` spellings and `--config`.
//!
//! A config file holds `key = value` lines (TOML syntax) whose keys are the
//! long flag names of the chosen subcommand. Its entries are spliced in right
//! after the subcommand name, so flags given on the command line, which come
//! later, override them.

use std::ffi::OsString;
use std::path::Path;

use super::CliError;

const SUBCOMMANDS: [&str; 6] = ["solve", "classify", "sweep", "oracle", "critical", "weak"];

pub(super) fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut args: Vec<OsString> = args
        .into_iter()
        .map(|a| match a.to_str() {
            Some("-lmin") => OsString::from("--lmin"),
            Some("-lmax") => OsString::from("--lmax"),
            _ => a,
        })
        .collect();

    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let extra = load(Path::new(&path))?;
    let Some(sub) = args
        .iter()
        .position(|a| a.to_str().is_some_and(|s| SUBCOMMANDS.contains(&s)))
    else {
        return Ok(args);
    };
    args.splice(sub + 1..sub + 1, extra);
    Ok(args)
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_str()?;
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(rest) = s.strip_prefix("--config=") {
            return Some(OsString::from(rest));
        }
    }
    None
}

fn load(path: &Path) -> Result<Vec<OsString>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("cannot read config {}: {e}", path.display())))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| CliError::Usage(format!("malformed config {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (key, value) in table {
        if key == "config" {
            return Err(CliError::Usage(
                "config files cannot include other configs".into(),
            ));
        }
        let flag = OsString::from(format!("--{key}"));
        match value {
            toml::Value::Boolean(true) => out.push(flag),
            toml::Value::Boolean(false) => {}
            toml::Value::String(s) => out.extend([flag, s.into()]),
            toml::Value::Integer(i) => out.extend([flag, i.to_string().into()]),
            toml::Value::Float(x) => out.extend([flag, x.to_string().into()]),
            toml::Value::Array(items) => {
                let joined: Vec<String> = items
                    .iter()
                    .map(|v| match v {
                        toml::Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                out.extend([flag, joined.join(",").into()]);
            }
            other => {
                return Err(CliError::Usage(format!(
                    "config key {key:?}: unsupported value {other}"
                )))
            }
        }
    }
    Ok(out)
}
