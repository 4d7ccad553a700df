//! Unit parsing for scenario quantities.
//!
//! Canonical units: data in MB (10^6 bytes), time in minutes, rates in
//! MB/min, money in USD. Scenario files may give a bare number (read as the
//! canonical unit) or a string such as `"1.6 Gbps"`, `"0.5 $/hour"` or
//! `"0.1 h/GB"`.

use serde::{Deserialize, Serialize};

/// MB per minute carried by one Gbps.
pub const MB_PER_MIN_PER_GBPS: f64 = 1e9 / 8.0 / 1e6 * 60.0;

/// Minutes per day; arrival rates are specified per day.
pub const MINUTES_PER_DAY: f64 = 1440.0;

/// A number, or a number with a unit suffix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Number(f64),
    Text(String),
}

impl From<f64> for Quantity {
    fn from(v: f64) -> Self {
        Quantity::Number(v)
    }
}

impl From<&str> for Quantity {
    fn from(v: &str) -> Self {
        Quantity::Text(v.to_string())
    }
}

/// Physical dimension a quantity is parsed against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    /// Data rate, canonical MB/min.
    Rate,
    /// Price per unit of time, canonical $/min.
    PricePerTime,
    /// Processing intensity, canonical min/MB.
    Processing,
}

impl Dimension {
    fn factor(self, unit: &str) -> Option<f64> {
        let u = unit.trim().to_ascii_lowercase().replace(' ', "");
        let f = match self {
            Dimension::Rate => match u.as_str() {
                "mb/min" => 1.0,
                "mb/s" => 60.0,
                "gb/min" => 1000.0,
                "gbps" => MB_PER_MIN_PER_GBPS,
                "mbps" => MB_PER_MIN_PER_GBPS / 1000.0,
                _ => return None,
            },
            Dimension::PricePerTime => match u.as_str() {
                "$/min" | "usd/min" => 1.0,
                "$/h" | "$/hour" | "$/hr" | "usd/h" | "usd/hour" => 1.0 / 60.0,
                "$/s" | "usd/s" => 60.0,
                _ => return None,
            },
            Dimension::Processing => match u.as_str() {
                "min/mb" => 1.0,
                "s/mb" => 1.0 / 60.0,
                "min/gb" => 1.0 / 1000.0,
                "h/gb" | "hour/gb" | "hours/gb" => 60.0 / 1000.0,
                _ => return None,
            },
        };
        Some(f)
    }

    fn canonical(self) -> &'static str {
        match self {
            Dimension::Rate => "MB/min",
            Dimension::PricePerTime => "$/min",
            Dimension::Processing => "min/MB",
        }
    }
}

/// Converts a quantity into the canonical unit of `dim`.
pub fn to_canonical(q: &Quantity, dim: Dimension) -> Result<f64, String> {
    match q {
        Quantity::Number(v) => Ok(*v),
        Quantity::Text(s) => {
            let s = s.trim();
            let split = s
                .find(|c: char| !(c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E')))
                .unwrap_or(s.len());
            let (num, unit) = s.split_at(split);
            let value: f64 = num
                .trim()
                .parse()
                .map_err(|_| format!("cannot parse number in {s:?}"))?;
            if unit.trim().is_empty() {
                return Ok(value);
            }
            let factor = dim.factor(unit).ok_or_else(|| {
                format!(
                    "unknown unit {:?} in {s:?} (expected a unit convertible to {})",
                    unit.trim(),
                    dim.canonical()
                )
            })?;
            Ok(value * factor)
        }
    }
}
