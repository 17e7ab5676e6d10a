use std::path::Path;

use serde::Deserialize;

pub const CONFIG_ENV: &str = "BCHROM_CONFIG";

/// Defaults shared by the subcommands; flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub fuel: Option<u64>,
    pub bound: Option<u64>,
    pub rounds: Option<u64>,
    pub depth: Option<u64>,
    pub arity: Option<u64>,
    pub alphabet: Option<u64>,
    pub vertex_bound: Option<u64>,
    pub seed: Option<u64>,
}

impl Config {
    pub fn load(explicit: Option<&Path>) -> Result<Config, String> {
        let path = match explicit {
            Some(p) => p.to_path_buf(),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) if !p.is_empty() => p.into(),
                _ => return Ok(Config::default()),
            },
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("config {}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Config, String> {
        let c: Config = toml::from_str(text).map_err(|e| e.to_string())?;
        let bounds = [
            ("fuel", c.fuel),
            ("bound", c.bound),
            ("rounds", c.rounds),
            ("depth", c.depth),
            ("arity", c.arity),
            ("alphabet", c.alphabet),
            ("vertex_bound", c.vertex_bound),
        ];
        for (name, v) in bounds {
            if v == Some(0) {
                return Err(format!("{name} must be positive"));
            }
        }
        Ok(c)
    }
}
