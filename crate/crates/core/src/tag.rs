use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::Error;

/// Assumption set an influence function or bound belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelTag {
    #[serde(rename = "BD")]
    Bd,
    #[serde(rename = "FD")]
    Fd,
    #[serde(rename = "TD")]
    Td,
    #[serde(rename = "BD_TD")]
    BdTd,
    #[serde(rename = "FD_TD")]
    FdTd,
    #[serde(rename = "BD_FD_TD")]
    BdFdTd,
}

impl ModelTag {
    pub const ALL: [ModelTag; 6] = [
        ModelTag::Bd,
        ModelTag::Fd,
        ModelTag::Td,
        ModelTag::BdTd,
        ModelTag::FdTd,
        ModelTag::BdFdTd,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelTag::Bd => "BD",
            ModelTag::Fd => "FD",
            ModelTag::Td => "TD",
            ModelTag::BdTd => "BD_TD",
            ModelTag::FdTd => "FD_TD",
            ModelTag::BdFdTd => "BD_FD_TD",
        }
    }
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        let norm = s.trim().to_ascii_uppercase().replace(['-', ' ', ','], "_");
        ModelTag::ALL
            .into_iter()
            .find(|t| t.as_str() == norm)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown model tag `{s}`")))
    }
}

/// Estimator identity: the naive contrast or one of the six plug-in estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EstimatorTag {
    Naive,
    Model(ModelTag),
}

impl EstimatorTag {
    pub const ALL: [EstimatorTag; 7] = [
        EstimatorTag::Naive,
        EstimatorTag::Model(ModelTag::Bd),
        EstimatorTag::Model(ModelTag::Fd),
        EstimatorTag::Model(ModelTag::Td),
        EstimatorTag::Model(ModelTag::BdTd),
        EstimatorTag::Model(ModelTag::FdTd),
        EstimatorTag::Model(ModelTag::BdFdTd),
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorTag::Naive => "NAIVE",
            EstimatorTag::Model(m) => m.as_str(),
        }
    }
}

impl fmt::Display for EstimatorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        if s.trim().eq_ignore_ascii_case("naive") {
            Ok(EstimatorTag::Naive)
        } else {
            s.parse().map(EstimatorTag::Model)
        }
    }
}

impl Serialize for EstimatorTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for EstimatorTag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_names() {
        for t in EstimatorTag::ALL {
            assert_eq!(t.as_str().parse::<EstimatorTag>().unwrap(), t);
        }
        assert_eq!("bd-fd-td".parse::<ModelTag>().unwrap(), ModelTag::BdFdTd);
        assert!("iv".parse::<ModelTag>().is_err());
    }
}
