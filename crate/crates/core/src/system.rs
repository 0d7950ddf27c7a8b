//! System names: `<k>-WT<n>` for the graph model and `<q>-IR<t>` for the
//! retrieval model, e.g. `50-WT100`, `60-WTall`, `100-IR10`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ir::ThresholdMode;
use crate::vocabulary::CapMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SystemSpec {
    Wt { k: u32, cap: CapMode },
    Ir { query_size: usize, threshold: ThresholdMode },
}

impl SystemSpec {
    pub fn model(&self) -> &'static str {
        match self {
            SystemSpec::Wt { .. } => "WT",
            SystemSpec::Ir { .. } => "IR",
        }
    }
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemSpec::Wt { k, cap } => write!(f, "{k}-WT{cap}"),
            SystemSpec::Ir {
                query_size,
                threshold,
            } => write!(f, "{query_size}-IR{threshold}"),
        }
    }
}

pub fn parse_system_name(name: &str) -> Result<SystemSpec> {
    let err = || Error::SystemName {
        name: name.to_string(),
    };
    let (prefix, rest) = name.trim().split_once('-').ok_or_else(err)?;
    let lead: u32 = prefix.parse().map_err(|_| err())?;
    if lead == 0 {
        return Err(err());
    }
    if let Some(size) = rest.strip_prefix("WT") {
        if lead > 100 {
            return Err(err());
        }
        let cap = match size {
            "all" => CapMode::Top10Pct,
            s => match s.parse::<usize>() {
                Ok(n) if n > 0 && !s.starts_with('0') => CapMode::from_size(Some(n)),
                _ => return Err(err()),
            },
        };
        Ok(SystemSpec::Wt { k: lead, cap })
    } else if let Some(t) = rest.strip_prefix("IR") {
        let threshold = match t {
            "all" => ThresholdMode::All,
            "100" => ThresholdMode::MaxOver100,
            "10" => ThresholdMode::MaxOver10,
            _ => return Err(err()),
        };
        Ok(SystemSpec::Ir {
            query_size: lead as usize,
            threshold,
        })
    } else {
        Err(err())
    }
}

impl FromStr for SystemSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_system_name(s)
    }
}
