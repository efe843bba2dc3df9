//! `key=value` configuration files, merged into the argument list so that
//! clap does all validation and explicit flags take precedence.

use std::collections::BTreeMap;
use std::path::Path;

use crate::CliError;

/// Global options that take a value, needed to locate the subcommand.
const VALUE_GLOBALS: [&str; 4] = ["--seed", "--workers", "--out", "--config"];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    pub global: Vec<(String, String)>,
    pub sections: BTreeMap<String, Vec<(String, String)>>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut out = ConfigFile::default();
        let mut section: Option<String> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                section = (name != "global").then(|| name.to_string());
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {}: expected key=value, got '{line}'", lineno + 1))
            })?;
            let pair = (k.trim().to_string(), v.trim().to_string());
            if pair.0.is_empty() {
                return Err(CliError::Usage(format!("config line {}: empty key", lineno + 1)));
            }
            match &section {
                None => out.global.push(pair),
                Some(s) => out.sections.entry(s.clone()).or_default().push(pair),
            }
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

fn to_flags(pairs: &[(String, String)]) -> Vec<String> {
    pairs
        .iter()
        .filter_map(|(k, v)| {
            let flag = format!("--{}", k.replace('_', "-"));
            match v.as_str() {
                "true" => Some(flag),
                "false" => None,
                _ => Some(format!("{flag}={v}")),
            }
        })
        .collect()
}

fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn subcommand_position(argv: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < argv.len() {
        let a = argv[i].as_str();
        if VALUE_GLOBALS.contains(&a) {
            i += 2;
        } else if a.starts_with('-') {
            i += 1;
        } else {
            return Some(i);
        }
    }
    None
}

/// Splices file values in front of the user's own flags:
/// `prog <file globals> <user globals> sub <file section> <user args>`.
pub fn merge_argv(argv: &[String]) -> Result<Vec<String>, CliError> {
    let Some(path) = config_path(argv) else {
        return Ok(argv.to_vec());
    };
    let file = ConfigFile::load(Path::new(&path))?;
    let Some(pos) = subcommand_position(argv) else {
        return Ok(argv.to_vec());
    };
    let sub = &argv[pos];
    let mut out = vec![argv[0].clone()];
    out.extend(to_flags(&file.global));
    out.extend_from_slice(&argv[1..pos]);
    out.push(sub.clone());
    if let Some(pairs) = file.sections.get(sub) {
        out.extend(to_flags(pairs));
    }
    out.extend_from_slice(&argv[pos + 1..]);
    Ok(out)
}
