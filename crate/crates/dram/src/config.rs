use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{DramError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Standard {
    Ddr3,
    Ddr4,
}

impl fmt::Display for Standard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Standard::Ddr3 => "DDR3",
            Standard::Ddr4 => "DDR4",
        })
    }
}

impl FromStr for Standard {
    type Err = DramError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "DDR3" => Ok(Standard::Ddr3),
            "DDR4" => Ok(Standard::Ddr4),
            _ => Err(DramError::BadConfig(format!("unknown standard {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchedulerKind {
    Fcfs,
    /// First-ready, first-come-first-served over an open-row policy.
    #[default]
    FrFcfs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AddressField {
    Channel,
    Column,
    Rank,
    BankGroup,
    Bank,
    Row,
}

impl AddressField {
    fn token(self) -> &'static str {
        match self {
            AddressField::Channel => "Ch",
            AddressField::Column => "Co",
            AddressField::Rank => "Ra",
            AddressField::BankGroup => "Bg",
            AddressField::Bank => "Ba",
            AddressField::Row => "Ro",
        }
    }
}

/// Order in which the fields of a physical address are laid out above the
/// 6-bit line offset, least significant first.
///
/// The textual form lists fields most significant first with two-letter
/// tokens, e.g. `RoBaBgRaCoCh`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AddressScheme(Vec<AddressField>);

impl AddressScheme {
    pub fn fields_lsb_first(&self) -> &[AddressField] {
        &self.0
    }

    /// Channel bits lowest, then column, rank, bank group, bank, row.
    pub fn channel_first() -> Self {
        "RoBaBgRaCoCh".parse().unwrap()
    }
}

impl Default for AddressScheme {
    fn default() -> Self {
        Self::channel_first()
    }
}

impl FromStr for AddressScheme {
    type Err = DramError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || DramError::BadScheme(s.to_string());
        if s.len() % 2 != 0 || !s.is_ascii() {
            return Err(bad());
        }
        let mut msb_first = Vec::new();
        for chunk in s.as_bytes().chunks(2) {
            let field = match chunk {
                b"Ch" => AddressField::Channel,
                b"Co" => AddressField::Column,
                b"Ra" => AddressField::Rank,
                b"Bg" => AddressField::BankGroup,
                b"Ba" => AddressField::Bank,
                b"Ro" => AddressField::Row,
                _ => return Err(bad()),
            };
            if msb_first.contains(&field) {
                return Err(bad());
            }
            msb_first.push(field);
        }
        if msb_first.len() != 6 {
            return Err(bad());
        }
        msb_first.reverse();
        Ok(AddressScheme(msb_first))
    }
}

impl fmt::Display for AddressScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for field in self.0.iter().rev() {
            f.write_str(field.token())?;
        }
        Ok(())
    }
}

impl Serialize for AddressScheme {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AddressScheme {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DramConfig {
    pub standard: Standard,
    pub channels: u32,
    pub ranks: u32,
    /// JEDEC speed bin, e.g. `1600K` or `2400R`.
    pub speed: String,
    /// Device density and width, e.g. `8Gb_x16`.
    pub organization: String,
    pub scheme: AddressScheme,
    pub scheduler: SchedulerKind,
    /// Capacity of each per-channel read and write queue.
    pub queue_depth: usize,
    pub refresh: bool,
}

impl Default for DramConfig {
    fn default() -> Self {
        DramConfig::new(Standard::Ddr4, 1, 1, "2400R", "8Gb_x16")
    }
}

impl DramConfig {
    pub fn new(standard: Standard, channels: u32, ranks: u32, speed: &str, organization: &str) -> Self {
        DramConfig {
            standard,
            channels,
            ranks,
            speed: speed.to_string(),
            organization: organization.to_string(),
            scheme: AddressScheme::default(),
            scheduler: SchedulerKind::FrFcfs,
            queue_depth: 32,
            refresh: true,
        }
    }

    pub fn with_scheme(mut self, scheme: AddressScheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_refresh(mut self, refresh: bool) -> Self {
        self.refresh = refresh;
        self
    }

    pub fn with_scheduler(mut self, scheduler: SchedulerKind) -> Self {
        self.scheduler = scheduler;
        self
    }

    pub fn with_queue_depth(mut self, depth: usize) -> Self {
        self.queue_depth = depth;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_text_round_trip() {
        let s = AddressScheme::channel_first();
        assert_eq!(s.to_string(), "RoBaBgRaCoCh");
        assert_eq!(s.fields_lsb_first()[0], AddressField::Channel);
        assert_eq!(s.fields_lsb_first()[1], AddressField::Column);
        assert!("RoBaRaCoCh".parse::<AddressScheme>().is_err());
        assert!("RoRoBgRaCoCh".parse::<AddressScheme>().is_err());
        assert!("RoBaBgRaCoXx".parse::<AddressScheme>().is_err());
    }

    #[test]
    fn config_from_toml() {
        let cfg: DramConfig = toml::from_str(
            r#"
            standard = "DDR3"
            channels = 4
            ranks = 2
            speed = "1600K"
            organization = "8Gb_x16"
            scheme = "RoBaBgRaChCo"
            "#,
        )
        .unwrap();
        assert_eq!(cfg.standard, Standard::Ddr3);
        assert_eq!(cfg.queue_depth, 32);
        assert_eq!(cfg.scheme.fields_lsb_first()[0], AddressField::Column);
    }
}
