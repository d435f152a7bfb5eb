//! Line-oriented `key = value` files used for species records and lattice
//! configurations.
//!
//! Blank lines and `#` comments are ignored. Values are either bare numbers in
//! SI units or numbers followed by a unit suffix, which is converted to SI.
//! Frequency suffixes (`Hz`, `kHz`, `MHz`, `GHz`, `THz`) denote cyclic
//! frequencies and convert to angular frequency in rad/s.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct KvFile {
    entries: BTreeMap<String, (usize, String)>,
}

impl KvFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    message: "empty key".into(),
                });
            }
            if entries
                .insert(key.clone(), (line_no, value.trim().to_string()))
                .is_some()
            {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    pub fn text(&self, key: &str) -> Result<&str> {
        self.raw(key)
            .ok_or_else(|| Error::MissingKey(key.to_string()))
    }

    /// Value of `key` converted to SI.
    pub fn quantity(&self, key: &str) -> Result<f64> {
        let (line, value) = self
            .entries
            .get(key)
            .ok_or_else(|| Error::MissingKey(key.to_string()))?;
        parse_quantity(value).map_err(|message| Error::Parse {
            line: *line,
            message: format!("`{key}`: {message}"),
        })
    }

    pub fn quantity_or(&self, key: &str, default: f64) -> Result<f64> {
        if self.contains(key) {
            self.quantity(key)
        } else {
            Ok(default)
        }
    }
}

/// Parses `"<number> [unit]"` into SI.
pub fn parse_quantity(value: &str) -> std::result::Result<f64, String> {
    let value = value.trim();
    let split = value
        .find(|c: char| c.is_whitespace())
        .unwrap_or(value.len());
    let (number, unit) = value.split_at(split);
    let number: f64 = number
        .parse()
        .map_err(|_| format!("cannot parse number `{number}`"))?;
    let scale = unit_scale(unit.trim())?;
    Ok(number * scale)
}

fn unit_scale(unit: &str) -> std::result::Result<f64, String> {
    let two_pi = 2.0 * PI;
    Ok(match unit {
        "" => 1.0,
        // intensity
        "W/m2" => 1.0,
        "W/cm2" => 1e4,
        "mW/cm2" => 10.0,
        "uW/cm2" => 1e-2,
        // cyclic frequency -> angular frequency
        "Hz" => two_pi,
        "kHz" => two_pi * 1e3,
        "MHz" => two_pi * 1e6,
        "GHz" => two_pi * 1e9,
        "THz" => two_pi * 1e12,
        "rad/s" | "1/s" => 1.0,
        // length
        "m" => 1.0,
        "um" => 1e-6,
        "nm" => 1e-9,
        // angle
        "rad" => 1.0,
        "deg" => PI / 180.0,
        // mass
        "kg" => 1.0,
        "amu" => crate::constants::ATOMIC_MASS_UNIT,
        // time
        "s" => 1.0,
        "ms" => 1e-3,
        "us" => 1e-6,
        other => return Err(format!("unknown unit `{other}`")),
    })
}
