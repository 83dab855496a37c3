use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::ChannelParams;

const KEYS: [&str; 8] = [
    "D_um2_per_s",
    "r_um",
    "r0_um",
    "ts_s",
    "L",
    "M",
    "sigma_n2",
    "seed",
];

/// Channel parameters plus the master seed, as read from a key-value file.
///
/// One `key = value` pair per line (`:` also accepted as separator); `#`
/// starts a comment. Every key is required.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig<T> {
    pub params: ChannelParams<T>,
    pub seed: u64,
}

fn parse_value<V: FromStr>(key: &str, raw: &str) -> Result<V> {
    raw.parse()
        .map_err(|_| Error::Config(format!("cannot parse {key} = {raw:?}")))
}

impl<T: Scalar> FromStr for ChannelConfig<T> {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut values: HashMap<&str, &str> = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once(['=', ':']) else {
                return Err(Error::Config(format!(
                    "line {}: expected `key = value`",
                    lineno + 1
                )));
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(Error::Config(format!("line {}: unknown key {key:?}", lineno + 1)));
            }
            if values.insert(key, value).is_some() {
                return Err(Error::Config(format!("duplicate key {key:?}")));
            }
        }
        if let Some(missing) = KEYS.iter().find(|k| !values.contains_key(*k)) {
            return Err(Error::Config(format!("missing key {missing:?}")));
        }
        let get = |k: &str| values[k];
        let params = ChannelParams {
            diffusion: parse_value("D_um2_per_s", get("D_um2_per_s"))?,
            radius: parse_value("r_um", get("r_um"))?,
            distance: parse_value("r0_um", get("r0_um"))?,
            slot: parse_value("ts_s", get("ts_s"))?,
            memory: parse_value("L", get("L"))?,
            molecules: parse_value("M", get("M"))?,
            noise_var: parse_value("sigma_n2", get("sigma_n2"))?,
        };
        params
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        Ok(ChannelConfig {
            params,
            seed: parse_value("seed", get("seed"))?,
        })
    }
}

impl<T: Scalar> ChannelConfig<T> {
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        let _ = writeln!(out, "D_um2_per_s = {}", p.diffusion);
        let _ = writeln!(out, "r_um = {}", p.radius);
        let _ = writeln!(out, "r0_um = {}", p.distance);
        let _ = writeln!(out, "ts_s = {}", p.slot);
        let _ = writeln!(out, "L = {}", p.memory);
        let _ = writeln!(out, "M = {}", p.molecules);
        let _ = writeln!(out, "sigma_n2 = {}", p.noise_var);
        let _ = writeln!(out, "seed = {}", self.seed);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# reference physics
D_um2_per_s = 79.4
r_um = 5
r0_um = 10
ts_s = 0.3
L = 40
M = 275
sigma_n2 = 0
seed: 7
";

    #[test]
    fn parses_all_keys() {
        let cfg: ChannelConfig<f64> = SAMPLE.parse().unwrap();
        assert_eq!(cfg.params, ChannelParams::reference(0.3, 275, 0.0));
        assert_eq!(cfg.seed, 7);
        let again: ChannelConfig<f64> = cfg.to_text().parse().unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn rejects_missing_unknown_and_invalid() {
        let missing = SAMPLE.replace("L = 40\n", "");
        assert!(missing.parse::<ChannelConfig<f64>>().is_err());
        let unknown = format!("{SAMPLE}extra = 1\n");
        assert!(unknown.parse::<ChannelConfig<f64>>().is_err());
        let dup = format!("{SAMPLE}M = 3\n");
        assert!(dup.parse::<ChannelConfig<f64>>().is_err());
        let bad = SAMPLE.replace("r0_um = 10", "r0_um = 2");
        assert!(bad.parse::<ChannelConfig<f64>>().is_err());
        let junk = SAMPLE.replace("M = 275", "M = lots");
        assert!(junk.parse::<ChannelConfig<f64>>().is_err());
    }
}
