use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::GroupingError;
use crate::taxonomy::{ChildSelector, ProjectionLevel, WheelId};

/// Selects the grouping function applied to every label before scoring.
///
/// Descriptors: `GPT:<partition>`, `M1`, `M2`, `M3-W<n>-L1`, `M3-W<n>-L2`,
/// optionally `M3-W<n>-L2:<selector>` for a non-default child selector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupingStrategy {
    GptCached { partition: String },
    M1,
    M2,
    M3 { wheel: WheelId, level: ProjectionLevel, selector: ChildSelector },
}

impl GroupingStrategy {
    pub fn m3(wheel: WheelId, level: ProjectionLevel) -> Self {
        GroupingStrategy::M3 { wheel, level, selector: ChildSelector::default() }
    }

    /// The ten M3 variants, wheel-major.
    pub fn m3_all() -> Vec<Self> {
        WheelId::ALL
            .into_iter()
            .flat_map(|w| [Self::m3(w, ProjectionLevel::L1), Self::m3(w, ProjectionLevel::L2)])
            .collect()
    }

    /// The twelve wheel-based strategies averaged by M-avg.
    pub fn wheel_based() -> Vec<Self> {
        let mut all = vec![GroupingStrategy::M1, GroupingStrategy::M2];
        all.extend(Self::m3_all());
        all
    }

    /// Parses a comma-separated list; `M3-all` expands to all ten M3 variants
    /// and `EW-all` to all twelve wheel-based strategies.
    pub fn parse_list(list: &str) -> Result<Vec<Self>, GroupingError> {
        let mut out = Vec::new();
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item.to_ascii_uppercase().as_str() {
                "M3-ALL" => out.extend(Self::m3_all()),
                "EW-ALL" => out.extend(Self::wheel_based()),
                _ => out.push(item.parse()?),
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        out.retain(|s| seen.insert(s.clone()));
        Ok(out)
    }

    /// Strategy with selector details dropped; used to match M-avg slots.
    pub(crate) fn slot(&self) -> Self {
        match self {
            GroupingStrategy::M3 { wheel, level, .. } => Self::m3(*wheel, *level),
            other => other.clone(),
        }
    }
}

impl fmt::Display for GroupingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupingStrategy::GptCached { partition } => write!(f, "GPT:{partition}"),
            GroupingStrategy::M1 => f.write_str("M1"),
            GroupingStrategy::M2 => f.write_str("M2"),
            GroupingStrategy::M3 { wheel, level, selector } => {
                write!(f, "M3-{wheel}-{level}")?;
                if *level == ProjectionLevel::L2 && *selector != ChildSelector::default() {
                    write!(f, ":{selector}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for GroupingStrategy {
    type Err = GroupingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GroupingError::BadStrategy(s.to_string());
        let trimmed = s.trim();
        if let Some((head, name)) = trimmed.split_once(':') {
            if head.eq_ignore_ascii_case("gpt") {
                let name = name.trim();
                if name.is_empty() {
                    return Err(bad());
                }
                return Ok(GroupingStrategy::GptCached { partition: name.to_string() });
            }
        }
        let (body, selector) = match trimmed.split_once(':') {
            Some((b, sel)) => (b, Some(sel.parse::<ChildSelector>().map_err(|_| bad())?)),
            None => (trimmed, None),
        };
        let upper = body.to_ascii_uppercase();
        match upper.as_str() {
            "M1" | "M2" if selector.is_some() => Err(bad()),
            "M1" => Ok(GroupingStrategy::M1),
            "M2" => Ok(GroupingStrategy::M2),
            _ => {
                let parts: Vec<&str> = upper.split('-').collect();
                if parts.len() != 3 || parts[0] != "M3" {
                    return Err(bad());
                }
                let wheel: WheelId = parts[1].parse().map_err(|_| bad())?;
                let level = match parts[2] {
                    "L1" => ProjectionLevel::L1,
                    "L2" => ProjectionLevel::L2,
                    _ => return Err(bad()),
                };
                if level == ProjectionLevel::L1 && selector.is_some() {
                    return Err(bad());
                }
                Ok(GroupingStrategy::M3 { wheel, level, selector: selector.unwrap_or_default() })
            }
        }
    }
}

impl Serialize for GroupingStrategy {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupingStrategy {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
