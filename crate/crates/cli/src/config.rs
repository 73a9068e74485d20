//! Configuration: defaults, then a `key = value` file, then flags, with the
//! resolved values echoed into every report.

use std::collections::BTreeMap;

#[derive(Clone, Debug, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

pub struct ConfigError(pub String);

impl Config {
    pub fn from_args(args: &[String]) -> Result<(String, Config), ConfigError> {
        let mut cfg = Config::default();
        // defaults shared by every experiment
        for (k, v) in [
            ("p", "5"),
            ("k", "1"),
            ("e", "1"),
            ("f", "1"),
            ("h", "2"),
            ("d", "3"),
            ("mu", "2,1,0"),
            ("c", "1"),
            ("q", ""),
            ("budget", "200000000"),
            ("seed", "42"),
            ("shards", "1"),
            ("workers", "1"),
            ("samples", "50"),
            ("emax", "40"),
            ("n", "2"),
            ("i", "1"),
            ("rmax", "4"),
            ("limit", "4096"),
            ("out", ""),
            ("ell", ""),
        ] {
            cfg.values.insert(k.to_string(), v.to_string());
        }
        let mut iter = args.iter();
        let Some(sub) = iter.next() else {
            return Err(ConfigError("missing subcommand".into()));
        };
        let mut flags: Vec<(String, String)> = Vec::new();
        while let Some(a) = iter.next() {
            let Some(key) = a.strip_prefix("--") else {
                return Err(ConfigError(format!("unexpected argument {a}")));
            };
            let Some(v) = iter.next() else {
                return Err(ConfigError(format!("flag --{key} needs a value")));
            };
            flags.push((key.to_string(), v.clone()));
        }
        // config file first, then flags on top
        for (k, v) in &flags {
            if k == "config" {
                let text = std::fs::read_to_string(v)
                    .map_err(|e| ConfigError(format!("cannot read {v}: {e}")))?;
                for (ln, line) in text.lines().enumerate() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    let Some((key, val)) = line.split_once('=') else {
                        return Err(ConfigError(format!("{v}:{}: expected key = value", ln + 1)));
                    };
                    cfg.values
                        .insert(key.trim().to_string(), val.trim().to_string());
                }
            }
        }
        for (k, v) in flags {
            if k != "config" {
                cfg.values.insert(k, v);
            }
        }
        Ok((sub.clone(), cfg))
    }

    pub fn get(&self, key: &str) -> &str {
        self.values.get(key).map(|s| s.as_str()).unwrap_or("")
    }

    pub fn usize(&self, key: &str) -> Result<usize, ConfigError> {
        self.get(key)
            .parse()
            .map_err(|_| ConfigError(format!("{key} = {:?} is not a number", self.get(key))))
    }

    pub fn u32(&self, key: &str) -> Result<u32, ConfigError> {
        self.get(key)
            .parse()
            .map_err(|_| ConfigError(format!("{key} = {:?} is not a number", self.get(key))))
    }

    pub fn u64(&self, key: &str) -> Result<u64, ConfigError> {
        self.get(key)
            .parse()
            .map_err(|_| ConfigError(format!("{key} = {:?} is not a number", self.get(key))))
    }

    pub fn i64_list(&self, key: &str) -> Result<Vec<i64>, ConfigError> {
        let raw = self.get(key);
        if raw.is_empty() {
            return Ok(Vec::new());
        }
        raw.split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| ConfigError(format!("{key} contains a non-integer: {s}")))
            })
            .collect()
    }

    /// Echo of every resolved value.
    pub fn echo(&self) -> BTreeMap<String, String> {
        self.values.clone()
    }
}
