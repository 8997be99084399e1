//! The ten relation classes: nine Wikidata properties plus `None`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

pub const NUM_CLASSES: usize = 10;

/// Relation between an ordered (seed, target) document pair.
///
/// The declaration order is the fixed class order used for indexing,
/// tie-breaking and report layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationClass {
    CountryOfCitizenship,
    DifferentFrom,
    EducatedAt,
    Employer,
    FacetOf,
    HasEffect,
    HasQuality,
    OppositeOf,
    Symptoms,
    None,
}

impl RelationClass {
    pub const ALL: [RelationClass; NUM_CLASSES] = [
        RelationClass::CountryOfCitizenship,
        RelationClass::DifferentFrom,
        RelationClass::EducatedAt,
        RelationClass::Employer,
        RelationClass::FacetOf,
        RelationClass::HasEffect,
        RelationClass::HasQuality,
        RelationClass::OppositeOf,
        RelationClass::Symptoms,
        RelationClass::None,
    ];

    /// The nine harvestable classes, i.e. everything but `None`.
    pub const POSITIVE: [RelationClass; NUM_CLASSES - 1] = [
        RelationClass::CountryOfCitizenship,
        RelationClass::DifferentFrom,
        RelationClass::EducatedAt,
        RelationClass::Employer,
        RelationClass::FacetOf,
        RelationClass::HasEffect,
        RelationClass::HasQuality,
        RelationClass::OppositeOf,
        RelationClass::Symptoms,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    /// Wikidata property id, `None` for the negative class.
    pub fn pid(self) -> Option<&'static str> {
        Some(match self {
            RelationClass::CountryOfCitizenship => "P27",
            RelationClass::DifferentFrom => "P1889",
            RelationClass::EducatedAt => "P69",
            RelationClass::Employer => "P108",
            RelationClass::FacetOf => "P1269",
            RelationClass::HasEffect => "P1542",
            RelationClass::HasQuality => "P1552",
            RelationClass::OppositeOf => "P461",
            RelationClass::Symptoms => "P780",
            RelationClass::None => return None,
        })
    }

    pub fn from_pid(pid: &str) -> Option<Self> {
        Self::POSITIVE.into_iter().find(|c| c.pid() == Some(pid))
    }

    /// Label string used in the pairs and prediction files: the PID, or `"none"`.
    pub fn label(self) -> &'static str {
        self.pid().unwrap_or("none")
    }

    /// Human-readable name as used in reports.
    pub fn name(self) -> &'static str {
        match self {
            RelationClass::CountryOfCitizenship => "country of citizenship",
            RelationClass::DifferentFrom => "different from",
            RelationClass::EducatedAt => "educated at",
            RelationClass::Employer => "employer",
            RelationClass::FacetOf => "facet of",
            RelationClass::HasEffect => "has effect",
            RelationClass::HasQuality => "has quality",
            RelationClass::OppositeOf => "opposite of",
            RelationClass::Symptoms => "symptoms",
            RelationClass::None => "none",
        }
    }

    pub fn is_positive(self) -> bool {
        self != RelationClass::None
    }
}

impl fmt::Display for RelationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for RelationClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("none") {
            return Ok(RelationClass::None);
        }
        Self::from_pid(s).ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

impl Serialize for RelationClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for RelationClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn pids_are_a_bijection_over_positive_classes() {
        let pids: HashSet<_> = RelationClass::POSITIVE.iter().map(|c| c.pid().unwrap()).collect();
        assert_eq!(pids.len(), 9);
        for c in RelationClass::POSITIVE {
            assert_eq!(RelationClass::from_pid(c.pid().unwrap()), Some(c));
        }
        assert_eq!(RelationClass::None.pid(), None);
        assert_eq!(RelationClass::from_pid("P31"), None);
    }

    #[test]
    fn index_follows_declaration_order() {
        for (i, c) in RelationClass::ALL.iter().enumerate() {
            assert_eq!(c.index(), i);
            assert_eq!(RelationClass::from_index(i), Some(*c));
        }
        assert_eq!(RelationClass::None.index(), 9);
    }

    #[test]
    fn labels_parse_back() {
        for c in RelationClass::ALL {
            assert_eq!(c.label().parse::<RelationClass>().unwrap(), c);
        }
        assert!(matches!("P999".parse::<RelationClass>(), Err(Error::UnknownLabel(_))));
        let json = serde_json::to_string(&RelationClass::HasEffect).unwrap();
        assert_eq!(json, "\"P1542\"");
    }
}
