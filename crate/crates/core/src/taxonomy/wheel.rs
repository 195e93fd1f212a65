use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Label, TaxonomyError};

/// One of the five emotion wheels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum WheelId {
    W1,
    W2,
    W3,
    W4,
    W5,
}

impl WheelId {
    pub const ALL: [WheelId; 5] = [WheelId::W1, WheelId::W2, WheelId::W3, WheelId::W4, WheelId::W5];
}

impl fmt::Display for WheelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            WheelId::W1 => 1,
            WheelId::W2 => 2,
            WheelId::W3 => 3,
            WheelId::W4 => 4,
            WheelId::W5 => 5,
        };
        write!(f, "W{n}")
    }
}

impl FromStr for WheelId {
    type Err = TaxonomyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "W1" => Ok(WheelId::W1),
            "W2" => Ok(WheelId::W2),
            "W3" => Ok(WheelId::W3),
            "W4" => Ok(WheelId::W4),
            "W5" => Ok(WheelId::W5),
            _ => Err(TaxonomyError::UnknownWheel(s.to_string())),
        }
    }
}

/// Ring of a wheel, innermost first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    L1,
    L2,
    L3,
}

impl Level {
    pub fn index(self) -> usize {
        match self {
            Level::L1 => 0,
            Level::L2 => 1,
            Level::L3 => 2,
        }
    }

    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    fn from_number(n: &str) -> Option<Level> {
        match n.trim() {
            "1" => Some(Level::L1),
            "2" => Some(Level::L2),
            "3" => Some(Level::L3),
            _ => None,
        }
    }

    fn inner(self) -> Option<Level> {
        match self {
            Level::L1 => None,
            Level::L2 => Some(Level::L1),
            Level::L3 => Some(Level::L2),
        }
    }
}

/// Target ring for a level projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ProjectionLevel {
    L1,
    L2,
}

impl fmt::Display for ProjectionLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProjectionLevel::L1 => "L1",
            ProjectionLevel::L2 => "L2",
        })
    }
}

/// How an L1 label picks its L2 representative.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ChildSelector {
    /// Lexicographically smallest child.
    #[default]
    Lexicographic,
    /// Lexicographically largest child.
    LexicographicLast,
    /// Child with the most L3 descendants, ties broken lexicographically.
    MostChildren,
}

impl ChildSelector {
    pub fn name(self) -> &'static str {
        match self {
            ChildSelector::Lexicographic => "lexicographic",
            ChildSelector::LexicographicLast => "last",
            ChildSelector::MostChildren => "most-children",
        }
    }
}

impl fmt::Display for ChildSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChildSelector {
    type Err = TaxonomyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lexicographic" | "first" => Ok(ChildSelector::Lexicographic),
            "last" => Ok(ChildSelector::LexicographicLast),
            "most-children" => Ok(ChildSelector::MostChildren),
            other => Err(TaxonomyError::UnknownSelector(other.to_string())),
        }
    }
}

/// A three-ring emotion wheel with a many-to-one parent relation
/// (outer ring to the next inner ring).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmotionWheel {
    id: WheelId,
    levels: [BTreeSet<Label>; 3],
    parent: BTreeMap<Label, Label>,
    children: BTreeMap<Label, BTreeSet<Label>>,
}

impl EmotionWheel {
    /// Assembles a wheel from `(level, label, parent)` rows and checks every
    /// structural invariant.
    pub fn from_rows<I>(id: WheelId, rows: I) -> Result<Self, TaxonomyError>
    where
        I: IntoIterator<Item = (Level, Label, Option<Label>)>,
    {
        let mut levels: [BTreeSet<Label>; 3] = Default::default();
        let mut level_of: BTreeMap<Label, Level> = BTreeMap::new();
        let mut pending = Vec::new();
        for (level, label, parent) in rows {
            if level_of.insert(label.clone(), level).is_some() {
                return Err(TaxonomyError::DuplicateLabel { wheel: id, label });
            }
            levels[level.index()].insert(label.clone());
            pending.push((level, label, parent));
        }

        let mut parent_map = BTreeMap::new();
        let mut children: BTreeMap<Label, BTreeSet<Label>> = BTreeMap::new();
        for (level, label, parent) in pending {
            match (level.inner(), parent) {
                (None, None) => {}
                (None, Some(parent)) => {
                    return Err(TaxonomyError::UnexpectedParent { wheel: id, label, parent });
                }
                (Some(_), None) => return Err(TaxonomyError::MissingParent { wheel: id, label }),
                (Some(expected), Some(parent)) => match level_of.get(&parent) {
                    None => return Err(TaxonomyError::UnknownParent { wheel: id, label, parent }),
                    Some(found) if *found != expected => {
                        return Err(TaxonomyError::ParentWrongLevel {
                            wheel: id,
                            label,
                            parent,
                            expected: expected.number(),
                            found: found.number(),
                        });
                    }
                    Some(_) => {
                        children.entry(parent.clone()).or_default().insert(label.clone());
                        parent_map.insert(label, parent);
                    }
                },
            }
        }
        Ok(EmotionWheel { id, levels, parent: parent_map, children })
    }

    pub fn id(&self) -> WheelId {
        self.id
    }

    pub fn labels(&self, level: Level) -> &BTreeSet<Label> {
        &self.levels[level.index()]
    }

    pub fn level_of(&self, label: &Label) -> Option<Level> {
        [Level::L1, Level::L2, Level::L3]
            .into_iter()
            .find(|l| self.levels[l.index()].contains(label))
    }

    pub fn contains(&self, label: &Label) -> bool {
        self.level_of(label).is_some()
    }

    pub fn parent(&self, label: &Label) -> Option<&Label> {
        self.parent.get(label)
    }

    /// Children on the next outer ring (empty for L3 labels and childless L1/L2 labels).
    pub fn children(&self, label: &Label) -> impl Iterator<Item = &Label> {
        self.children.get(label).into_iter().flatten()
    }

    pub fn all_labels(&self) -> impl Iterator<Item = (Level, &Label)> {
        [Level::L1, Level::L2, Level::L3]
            .into_iter()
            .flat_map(move |l| self.levels[l.index()].iter().map(move |x| (l, x)))
    }

    /// Projects `label` onto ring L1 or L2.
    ///
    /// L1: the label itself, its parent, or its grandparent depending on
    /// its ring. L2: L3 labels go to their parent, L2 labels stay, and L1
    /// labels go to the child picked by `selector`. An L1 label without
    /// children projects onto itself.
    pub fn map_level(
        &self,
        label: &Label,
        target: ProjectionLevel,
        selector: ChildSelector,
    ) -> Result<Label, TaxonomyError> {
        let level = self.level_of(label).ok_or_else(|| TaxonomyError::NotInWheel {
            wheel: self.id,
            label: label.clone(),
        })?;
        let projected = match (target, level) {
            (ProjectionLevel::L1, Level::L1) | (ProjectionLevel::L2, Level::L2) => label,
            (ProjectionLevel::L1, Level::L2) | (ProjectionLevel::L2, Level::L3) => &self.parent[label],
            (ProjectionLevel::L1, Level::L3) => &self.parent[&self.parent[label]],
            (ProjectionLevel::L2, Level::L1) => self.select_child(label, selector).unwrap_or(label),
        };
        Ok(projected.clone())
    }

    fn select_child(&self, label: &Label, selector: ChildSelector) -> Option<&Label> {
        let mut kids = self.children(label);
        match selector {
            ChildSelector::Lexicographic => kids.next(),
            ChildSelector::LexicographicLast => kids.last(),
            ChildSelector::MostChildren => {
                // max_by_key keeps the last maximum; iterate in reverse to keep the first
                let kids: Vec<&Label> = kids.collect();
                kids.into_iter().rev().max_by_key(|k| self.children(k).count())
            }
        }
    }

    /// Emits the wheel file form, walking each L1 subtree depth first.
    pub fn to_source(&self) -> String {
        let mut out = String::new();
        let mut row = |level: Level, label: &Label, parent: Option<&Label>| {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                self.id.to_string().to_lowercase(),
                level.number(),
                label,
                parent.map(Label::as_str).unwrap_or("")
            ));
        };
        for l1 in self.labels(Level::L1) {
            row(Level::L1, l1, None);
            for l2 in self.children(l1) {
                row(Level::L2, l2, Some(l1));
                for l3 in self.children(l2) {
                    row(Level::L3, l3, Some(l2));
                }
            }
        }
        out
    }
}

/// Parses a wheel file: `wheel_id<TAB>level<TAB>label<TAB>parent`, one row
/// per line, `#` comments and blank lines ignored. Rows may reference a
/// parent defined later in the file.
pub fn parse_wheel(source: &str) -> Result<EmotionWheel, TaxonomyError> {
    let mut id: Option<WheelId> = None;
    let mut rows = Vec::new();
    for (idx, raw) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 3 || fields.len() > 4 {
            return Err(TaxonomyError::Syntax {
                line: line_no,
                message: format!("expected 4 tab-separated fields, found {}", fields.len()),
            });
        }
        let row_id: WheelId = fields[0].parse().map_err(|_| TaxonomyError::Syntax {
            line: line_no,
            message: format!("unknown wheel id {:?}", fields[0]),
        })?;
        match id {
            None => id = Some(row_id),
            Some(prev) if prev != row_id => {
                return Err(TaxonomyError::Syntax {
                    line: line_no,
                    message: format!("wheel id {row_id} differs from {prev} on earlier rows"),
                });
            }
            Some(_) => {}
        }
        let level = Level::from_number(fields[1]).ok_or_else(|| TaxonomyError::Syntax {
            line: line_no,
            message: format!("level must be 1, 2 or 3, found {:?}", fields[1]),
        })?;
        let label = Label::new(fields[2]).map_err(|_| TaxonomyError::Syntax {
            line: line_no,
            message: "empty label".into(),
        })?;
        let parent = match fields.get(3).map(|p| p.trim()) {
            None | Some("") => None,
            Some(p) => Some(Label::new(p)?),
        };
        rows.push((level, label, parent));
    }
    let id = id.ok_or(TaxonomyError::EmptyWheel)?;
    EmotionWheel::from_rows(id, rows)
}
