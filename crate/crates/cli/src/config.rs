//! INI-style key=value config files. CLI flags override file values;
//! BVLAB_SEED is the last-resort seed source.

use std::collections::HashMap;
use std::path::Path;

use bvlab_core::{Error, Result};

#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    map: HashMap<String, String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig> {
        let text = std::fs::read_to_string(path)?;
        let mut map = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::contract(format!(
                    "{}:{}: expected key=value, got {line:?}",
                    path.display(),
                    lineno + 1
                )));
            };
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(FileConfig { map })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    /// flag value > config file > fallback
    pub fn resolve<T: std::str::FromStr>(
        &self,
        flag: Option<T>,
        key: &str,
        fallback: T,
    ) -> Result<T> {
        if let Some(v) = flag {
            return Ok(v);
        }
        if let Some(raw) = self.get(key) {
            return raw
                .parse()
                .map_err(|_| Error::contract(format!("config key {key}: cannot parse {raw:?}")));
        }
        Ok(fallback)
    }

    pub fn resolve_opt<T: std::str::FromStr>(
        &self,
        flag: Option<T>,
        key: &str,
    ) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| Error::contract(format!("config key {key}: cannot parse {raw:?}"))),
        }
    }
}

/// Seed precedence: --seed flag, config `seed`, BVLAB_SEED, then 1.
pub fn resolve_seed(flag: Option<u64>, cfg: &FileConfig) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(raw) = cfg.get("seed") {
        return raw
            .parse()
            .map_err(|_| Error::contract(format!("config seed: cannot parse {raw:?}")));
    }
    if let Ok(raw) = std::env::var("BVLAB_SEED") {
        return raw
            .parse()
            .map_err(|_| Error::contract(format!("BVLAB_SEED: cannot parse {raw:?}")));
    }
    Ok(1)
}
