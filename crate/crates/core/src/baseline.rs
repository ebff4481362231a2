//! Frozen constants for the quantities whose implied constants are not
//! explicit. Each entry stores the constant and a hash of the grid it was
//! measured on; comparing against a different grid is an error.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::equidist::hex;
use crate::{Error, Result};

const EMBEDDED: &str = include_str!("../baselines.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineEntry {
    pub constant: f64,
    pub grid_hash: String,
}

/// `check_id -> {constant, grid_hash}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Baselines(BTreeMap<String, BaselineEntry>);

/// SHA-256 of a grid description.
pub fn grid_hash(description: &str) -> String {
    hex(&Sha256::digest(description.as_bytes()))
}

/// `value` rounded away from zero to six significant digits, so a frozen
/// maximum survives last-bit differences in libm.
pub fn round_up(value: f64) -> f64 {
    round_sig(value, true)
}

/// `value` rounded toward zero to six significant digits, for lower bounds.
pub fn round_down(value: f64) -> f64 {
    round_sig(value, false)
}

fn round_sig(value: f64, up: bool) -> f64 {
    if value == 0.0 || !value.is_finite() {
        return value;
    }
    let scale = 10f64.powi(5 - value.abs().log10().floor() as i32);
    let scaled = value * scale;
    let r = if up { scaled.ceil() } else { scaled.floor() } / scale;
    // the division may round back across the original value
    match (up, r < value, r > value) {
        (true, true, _) => r.next_up(),
        (false, _, true) => r.next_down(),
        _ => r,
    }
}

/// Outcome of comparing a measurement with its frozen constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Regression {
    pub id: String,
    pub measured: f64,
    pub constant: f64,
    pub ok: bool,
}

impl Baselines {
    /// The file shipped with the crate.
    pub fn embedded() -> Self {
        serde_json::from_str(EMBEDDED).expect("embedded baselines parse")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("baselines serialize") + "\n"
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn insert(&mut self, id: &str, constant: f64, grid: &str) {
        self.0.insert(
            id.to_string(),
            BaselineEntry {
                constant,
                grid_hash: grid_hash(grid),
            },
        );
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    /// The entry for `id`, checked against the grid it is about to be used on.
    pub fn entry(&self, id: &str, grid: &str) -> Result<&BaselineEntry> {
        let entry = self
            .0
            .get(id)
            .ok_or_else(|| Error::MissingBaseline(id.to_string()))?;
        let current = grid_hash(grid);
        if entry.grid_hash != current {
            return Err(Error::BaselineGrid {
                id: id.to_string(),
                frozen: entry.grid_hash.clone(),
                current,
            });
        }
        Ok(entry)
    }

    /// `measured <= constant`.
    pub fn check_max(&self, id: &str, grid: &str, measured: f64) -> Result<Regression> {
        let constant = self.entry(id, grid)?.constant;
        Ok(Regression {
            id: id.to_string(),
            measured,
            constant,
            ok: measured <= constant,
        })
    }

    /// `measured >= constant`.
    pub fn check_min(&self, id: &str, grid: &str, measured: f64) -> Result<Regression> {
        let constant = self.entry(id, grid)?.constant;
        Ok(Regression {
            id: id.to_string(),
            measured,
            constant,
            ok: measured >= constant,
        })
    }

    /// Human-readable differences from `old` to `self`.
    pub fn diff(&self, old: &Baselines) -> Vec<String> {
        let mut out = Vec::new();
        for (id, new) in &self.0 {
            match old.0.get(id) {
                None => out.push(format!("+ {id}: {}", new.constant)),
                Some(prev) if prev != new => {
                    let grid = if prev.grid_hash == new.grid_hash { "" } else { " (grid changed)" };
                    out.push(format!("~ {id}: {} -> {}{grid}", prev.constant, new.constant));
                }
                Some(_) => {}
            }
        }
        for id in old.0.keys().filter(|id| !self.0.contains_key(*id)) {
            out.push(format!("- {id}"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_brackets_the_value() {
        for v in [1.0, 0.123456789, 98765.4321, 3.3e-7, 2.0f64.sqrt()] {
            assert!(round_up(v) >= v && round_up(v) <= v * (1.0 + 1e-5));
            assert!(round_down(v) <= v && round_down(v) >= v * (1.0 - 1e-5));
        }
    }

    #[test]
    fn missing_and_mismatched_entries_are_errors() {
        let mut b = Baselines::default();
        assert!(matches!(b.check_max("x", "g", 1.0), Err(Error::MissingBaseline(_))));
        b.insert("x", 2.0, "grid a");
        assert!(b.check_max("x", "grid a", 1.5).unwrap().ok);
        assert!(!b.check_max("x", "grid a", 2.5).unwrap().ok);
        assert!(matches!(b.check_max("x", "grid b", 1.0), Err(Error::BaselineGrid { .. })));
        let mut c = b.clone();
        c.insert("x", 3.0, "grid a");
        c.insert("y", 1.0, "grid c");
        assert_eq!(c.diff(&b).len(), 2);
    }

    #[test]
    fn embedded_file_parses() {
        let b = Baselines::embedded();
        let _ = b.ids().count();
        let round: Baselines = serde_json::from_str(&b.to_json()).unwrap();
        assert_eq!(round, b);
    }
}
