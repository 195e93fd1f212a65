use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::TaxonomyError;

/// A normalized emotion label.
///
/// Normalization lowercases, trims, and collapses every run of internal
/// whitespace to a single space. The empty string is never a label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(String);

impl Label {
    pub fn new(raw: &str) -> Result<Self, TaxonomyError> {
        let text = raw
            .split_whitespace()
            .map(str::to_lowercase)
            .collect::<Vec<_>>()
            .join(" ");
        if text.is_empty() {
            return Err(TaxonomyError::EmptyLabel);
        }
        Ok(Label(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Label {
    type Err = TaxonomyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Label::new(s)
    }
}

impl AsRef<str> for Label {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        Label::new(&raw).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_case_and_whitespace() {
        assert_eq!(Label::new("  Slightly\t ANGRY \n").unwrap().as_str(), "slightly angry");
        assert_eq!(Label::new("Happy ").unwrap(), Label::new("happy").unwrap());
    }

    #[test]
    fn rejects_blank() {
        assert!(matches!(Label::new(" \t "), Err(TaxonomyError::EmptyLabel)));
        assert!(Label::new("").is_err());
    }

    #[test]
    fn deserialize_normalizes() {
        let l: Label = serde_json::from_str("\"  JOY  \"").unwrap();
        assert_eq!(l.as_str(), "joy");
        assert!(serde_json::from_str::<Label>("\"   \"").is_err());
    }
}
