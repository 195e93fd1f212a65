use std::collections::{BTreeMap, BTreeSet};

use super::GroupingError;
use crate::taxonomy::Label;

/// A disjoint family of label groups, typically materialized from an LLM
/// grouping response. Group ordinals follow file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPartition {
    groups: Vec<BTreeSet<Label>>,
    index: BTreeMap<Label, usize>,
}

impl GroupPartition {
    pub fn from_groups(groups: Vec<Vec<Label>>) -> Result<Self, GroupingError> {
        let mut index = BTreeMap::new();
        let mut sets = Vec::with_capacity(groups.len());
        for (ordinal, group) in groups.into_iter().enumerate() {
            if group.is_empty() {
                return Err(GroupingError::EmptyGroup(ordinal));
            }
            let set: BTreeSet<Label> = group.into_iter().collect();
            for label in &set {
                if let Some(prev) = index.insert(label.clone(), ordinal) {
                    return Err(GroupingError::OverlappingGroups {
                        label: label.clone(),
                        first: prev,
                        second: ordinal,
                    });
                }
            }
            sets.push(set);
        }
        Ok(GroupPartition { groups: sets, index })
    }

    pub fn groups(&self) -> &[BTreeSet<Label>] {
        &self.groups
    }

    pub fn group_of(&self, label: &Label) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Partition file form: a JSON list of lists, one group per line.
    pub fn to_json(&self) -> String {
        let mut out = String::from("[\n");
        for (i, g) in self.groups.iter().enumerate() {
            let items: Vec<&str> = g.iter().map(Label::as_str).collect();
            out.push_str("  ");
            out.push_str(&serde_json::to_string(&items).expect("strings serialize"));
            if i + 1 < self.groups.len() {
                out.push(',');
            }
            out.push('\n');
        }
        out.push_str("]\n");
        out
    }
}

/// Reads a partition file (a JSON list of string lists) and validates it.
pub fn load_partition(source: &str) -> Result<GroupPartition, GroupingError> {
    let raw: Vec<Vec<String>> =
        serde_json::from_str(source).map_err(|e| GroupingError::PartitionFormat(e.to_string()))?;
    let groups = raw
        .into_iter()
        .map(|g| {
            g.iter()
                .map(|s| Label::new(s).map_err(|_| GroupingError::PartitionFormat("empty label".into())))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    GroupPartition::from_groups(groups)
}
