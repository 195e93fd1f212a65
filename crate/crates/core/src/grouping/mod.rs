//! The grouping function: every label is mapped to a group ID before
//! set-based scoring, so that differently worded labels for the same
//! emotion compare equal.
//!
//! Labels that a strategy cannot resolve become singleton groups named
//! after the deepest label the strategy did resolve. They are never dropped
//! and are counted as out of vocabulary.

mod partition;
mod strategy;

pub use partition::{load_partition, GroupPartition};
pub use strategy::GroupingStrategy;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::taxonomy::{Label, ProjectionLevel, TaxonomyBundle, WheelId};

#[derive(Debug, Error)]
pub enum GroupingError {
    #[error("invalid strategy descriptor {0:?}")]
    BadStrategy(String),
    #[error("no partition loaded under the name {0:?}")]
    UnknownPartition(String),
    #[error("wheel {0} is not part of the taxonomy bundle")]
    WheelNotLoaded(WheelId),
    #[error("partition: label {label:?} appears in groups {first} and {second}")]
    OverlappingGroups { label: Label, first: usize, second: usize },
    #[error("partition: group {0} is empty")]
    EmptyGroup(usize),
    #[error("partition: {0}")]
    PartitionFormat(String),
}

/// Group identity. Only equality matters to the metrics.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupId {
    /// A canonical representative label from the taxonomy.
    Canonical(Label),
    /// Ordinal of a group in a loaded partition.
    Partition(usize),
    /// An unresolved label standing alone.
    Singleton(Label),
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupId::Canonical(l) => write!(f, "{l}"),
            GroupId::Partition(n) => write!(f, "#{n}"),
            GroupId::Singleton(l) => write!(f, "~{l}"),
        }
    }
}

/// The image of a label set under a grouping function.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupedSet {
    pub groups: BTreeSet<GroupId>,
    pub oov_count: usize,
}

/// Named partitions available to `GPT:<name>` strategies.
pub type PartitionRegistry = BTreeMap<String, GroupPartition>;

/// Evaluates [`GroupingStrategy`] values against a bundle and a set of
/// partitions. Pure and shareable across threads.
#[derive(Debug, Clone, Copy)]
pub struct Grouper<'a> {
    bundle: &'a TaxonomyBundle,
    partitions: Option<&'a PartitionRegistry>,
}

impl<'a> Grouper<'a> {
    pub fn new(bundle: &'a TaxonomyBundle) -> Self {
        Grouper { bundle, partitions: None }
    }

    pub fn with_partitions(mut self, partitions: &'a PartitionRegistry) -> Self {
        self.partitions = Some(partitions);
        self
    }

    pub fn bundle(&self) -> &'a TaxonomyBundle {
        self.bundle
    }

    /// Fails early if `strategy` references a missing wheel or partition.
    pub fn check(&self, strategy: &GroupingStrategy) -> Result<(), GroupingError> {
        match strategy {
            GroupingStrategy::GptCached { partition } => self.partition(partition).map(|_| ()),
            GroupingStrategy::M3 { wheel, .. } if self.bundle.wheel(*wheel).is_none() => {
                Err(GroupingError::WheelNotLoaded(*wheel))
            }
            _ => Ok(()),
        }
    }

    fn partition(&self, name: &str) -> Result<&'a GroupPartition, GroupingError> {
        self.partitions
            .and_then(|p| p.get(name))
            .ok_or_else(|| GroupingError::UnknownPartition(name.to_string()))
    }

    /// Maps one label to its group, flagging fallbacks as out of vocabulary.
    pub fn group_label(
        &self,
        strategy: &GroupingStrategy,
        label: &Label,
    ) -> Result<(GroupId, bool), GroupingError> {
        Ok(match strategy {
            GroupingStrategy::GptCached { partition } => match self.partition(partition)?.group_of(label) {
                Some(n) => (GroupId::Partition(n), false),
                None => (GroupId::Singleton(label.clone()), true),
            },
            GroupingStrategy::M1 => resolved(self.bundle.canonical_form(label)),
            GroupingStrategy::M2 => resolved(self.bundle.canonical_base(label)),
            GroupingStrategy::M3 { wheel, level, selector } => {
                let wheel = self.bundle.wheel(*wheel).ok_or(GroupingError::WheelNotLoaded(*wheel))?;
                let (base, oov) = self.bundle.canonical_base(label);
                let selector = match level {
                    ProjectionLevel::L1 => Default::default(),
                    ProjectionLevel::L2 => *selector,
                };
                match wheel.map_level(&base, *level, selector) {
                    Ok(projected) if !oov => (GroupId::Canonical(projected), false),
                    _ => (GroupId::Singleton(base), true),
                }
            }
        })
    }

    /// Deduplicated image of `labels`, with the number of labels that fell back.
    pub fn group_set<'l, I>(&self, strategy: &GroupingStrategy, labels: I) -> Result<GroupedSet, GroupingError>
    where
        I: IntoIterator<Item = &'l Label>,
    {
        let mut out = GroupedSet::default();
        for label in labels {
            let (id, oov) = self.group_label(strategy, label)?;
            out.groups.insert(id);
            out.oov_count += usize::from(oov);
        }
        Ok(out)
    }
}

fn resolved((label, oov): (Label, bool)) -> (GroupId, bool) {
    if oov {
        (GroupId::Singleton(label), true)
    } else {
        (GroupId::Canonical(label), false)
    }
}
