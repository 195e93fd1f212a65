//! Emotion wheels, the synonym map, and the word-form map.
//!
//! A [`TaxonomyBundle`] is the deterministic vocabulary behind the M1, M2 and
//! M3 grouping strategies. Wheels are three rings deep; the synonym map sends
//! synonyms back to wheel labels and the form map sends word forms back to
//! their synonym.

mod bundle;
mod expansion;
mod label;
mod wheel;

pub use bundle::{build_bundle, builtin_bundle, TaxonomyBundle, BUILTIN_VERSION, BUNDLE_FORMAT};
pub use expansion::{Collision, ExpansionMap, FormMap, MapKind, MapSource, SynonymMap};
pub use label::Label;
pub use wheel::{parse_wheel, ChildSelector, EmotionWheel, Level, ProjectionLevel, WheelId};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("label is empty after normalization")]
    EmptyLabel,
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown wheel id {0:?}")]
    UnknownWheel(String),
    #[error("unknown child selector {0:?}")]
    UnknownSelector(String),
    #[error("wheel source has no rows")]
    EmptyWheel,
    #[error("{wheel}: duplicate label {label:?}")]
    DuplicateLabel { wheel: WheelId, label: Label },
    #[error("{wheel}: {label:?} has no parent")]
    MissingParent { wheel: WheelId, label: Label },
    #[error("{wheel}: level-1 label {label:?} must not have a parent (found {parent:?})")]
    UnexpectedParent { wheel: WheelId, label: Label, parent: Label },
    #[error("{wheel}: unknown parent {parent:?} for {label:?}")]
    UnknownParent { wheel: WheelId, label: Label, parent: Label },
    #[error("{wheel}: parent {parent:?} of {label:?} is on level {found}, expected {expected}")]
    ParentWrongLevel { wheel: WheelId, label: Label, parent: Label, expected: u8, found: u8 },
    #[error("{wheel}: {label:?} is not in the wheel")]
    NotInWheel { wheel: WheelId, label: Label },
    #[error("wheel {0} supplied twice")]
    DuplicateWheel(WheelId),
    #[error("synonym base {0:?} does not appear in any wheel")]
    SynonymBaseNotInWheel(Label),
    #[error("bundle: {0}")]
    BundleFormat(String),
}
