use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Label, TaxonomyError};

/// Raw `base -> members` entries as read from a synonym or form file.
/// Every base is a member of its own set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MapSource {
    entries: BTreeMap<Label, BTreeSet<Label>>,
}

impl MapSource {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `members` under `base`; repeated bases accumulate.
    pub fn insert<I: IntoIterator<Item = Label>>(&mut self, base: Label, members: I) {
        let set = self.entries.entry(base.clone()).or_default();
        set.insert(base);
        set.extend(members);
    }

    pub fn contains_base(&self, base: &Label) -> bool {
        self.entries.contains_key(base)
    }

    pub fn entries(&self) -> &BTreeMap<Label, BTreeSet<Label>> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parses `base<TAB>member1,member2,...` lines. A line holding only a
    /// base declares a singleton set.
    pub fn parse(source: &str) -> Result<Self, TaxonomyError> {
        let mut map = MapSource::new();
        for (idx, raw) in source.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (base, rest) = line.split_once('\t').unwrap_or((line, ""));
            let base = Label::new(base).map_err(|_| TaxonomyError::Syntax {
                line: idx + 1,
                message: "empty base label".into(),
            })?;
            if rest.contains('\t') {
                return Err(TaxonomyError::Syntax {
                    line: idx + 1,
                    message: "expected `base<TAB>members`, found extra tab".into(),
                });
            }
            let members = rest.split(',').filter_map(|m| Label::new(m).ok());
            map.insert(base, members);
        }
        Ok(map)
    }

    pub fn to_source(&self) -> String {
        let mut out = String::new();
        for (base, members) in &self.entries {
            let joined: Vec<&str> = members.iter().map(Label::as_str).collect();
            out.push_str(&format!("{}\t{}\n", base, joined.join(",")));
        }
        out
    }
}

/// Which expansion map a collision belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Synonyms,
    Forms,
}

/// A member claimed by several bases, and the base it was assigned to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collision {
    pub map: MapKind,
    pub label: Label,
    pub candidates: Vec<Label>,
    pub chosen: Label,
}

/// A forward `base -> members` map with its single-valued inverse
/// `member -> base`. Used for both the synonym map and the word-form map.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExpansionMap {
    base_to_members: BTreeMap<Label, BTreeSet<Label>>,
    member_to_base: BTreeMap<Label, Label>,
}

impl ExpansionMap {
    /// Inverts `source`. A base always maps to itself. Any other member
    /// claimed by more than one base goes to the candidate with the lowest
    /// `rank`, then the lexicographically smallest; each such choice is
    /// appended to `log`.
    pub fn build<F>(kind: MapKind, source: MapSource, rank: F, log: &mut Vec<Collision>) -> Self
    where
        F: Fn(&Label) -> u8,
    {
        let mut claims: BTreeMap<&Label, Vec<&Label>> = BTreeMap::new();
        for (base, members) in &source.entries {
            for m in members {
                claims.entry(m).or_default().push(base);
            }
        }
        let mut member_to_base = BTreeMap::new();
        for (member, candidates) in claims {
            let chosen = if source.entries.contains_key(member) {
                member
            } else {
                candidates
                    .iter()
                    .copied()
                    .min_by(|a, b| rank(a).cmp(&rank(b)).then_with(|| a.cmp(b)))
                    .expect("every member has a claimant")
            };
            if candidates.len() > 1 {
                log.push(Collision {
                    map: kind,
                    label: member.clone(),
                    candidates: candidates.iter().map(|c| (*c).clone()).collect(),
                    chosen: chosen.clone(),
                });
            }
            member_to_base.insert(member.clone(), chosen.clone());
        }
        ExpansionMap { base_to_members: source.entries, member_to_base }
    }

    /// Forward lookup (f or g).
    pub fn members(&self, base: &Label) -> Option<&BTreeSet<Label>> {
        self.base_to_members.get(base)
    }

    /// Inverse lookup (f' or g').
    pub fn base_of(&self, member: &Label) -> Option<&Label> {
        self.member_to_base.get(member)
    }

    pub fn bases(&self) -> impl Iterator<Item = &Label> {
        self.base_to_members.keys()
    }

    /// Every label in the domain of the inverse.
    pub fn domain(&self) -> impl Iterator<Item = &Label> {
        self.member_to_base.keys()
    }

    pub fn to_source(&self) -> MapSource {
        MapSource { entries: self.base_to_members.clone() }
    }
}

/// Synonym map (EW-S): wheel label to its synonyms, and back.
pub type SynonymMap = ExpansionMap;
/// Word-form map (EW-SF): synonym to its word forms, and back.
pub type FormMap = ExpansionMap;

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> Label {
        Label::new(s).unwrap()
    }

    #[test]
    fn parse_adds_base_and_merges_repeats() {
        let src = "# synonyms\njoy\tjoyful, Glad\njoy\tdelight\nsad\n";
        let m = MapSource::parse(src).unwrap();
        let joy = &m.entries()[&l("joy")];
        assert_eq!(joy.len(), 4);
        assert!(joy.contains(&l("joy")) && joy.contains(&l("glad")));
        assert_eq!(m.entries()[&l("sad")].len(), 1);
        assert_eq!(m.to_source(), "joy\tdelight,glad,joy,joyful\nsad\tsad\n");
        assert_eq!(MapSource::parse(&m.to_source()).unwrap(), m);
    }

    #[test]
    fn parse_rejects_extra_tabs() {
        assert!(matches!(
            MapSource::parse("joy\ta\tb\n"),
            Err(TaxonomyError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn collision_uses_rank_then_lexicographic() {
        let mut src = MapSource::new();
        src.insert(l("surprise"), [l("ecstatic")]);
        src.insert(l("joy"), [l("ecstatic"), l("glad")]);
        let mut log = Vec::new();
        // surprise ranked better than joy
        let m = ExpansionMap::build(MapKind::Synonyms, src.clone(), |b| if b.as_str() == "surprise" { 1 } else { 2 }, &mut log);
        assert_eq!(m.base_of(&l("ecstatic")), Some(&l("surprise")));
        assert_eq!(log.len(), 1);
        assert_eq!(log[0].candidates, vec![l("joy"), l("surprise")]);

        let mut log = Vec::new();
        let m = ExpansionMap::build(MapKind::Synonyms, src, |_| 1, &mut log);
        assert_eq!(m.base_of(&l("ecstatic")), Some(&l("joy")));
        assert_eq!(log.len(), 1);
        assert_eq!(log[0].chosen, l("joy"));
    }

    #[test]
    fn base_always_maps_to_itself() {
        let mut src = MapSource::new();
        src.insert(l("joy"), [l("happy")]);
        src.insert(l("happy"), [l("cheerful")]);
        let mut log = Vec::new();
        let m = ExpansionMap::build(MapKind::Synonyms, src, |_| 0, &mut log);
        assert_eq!(m.base_of(&l("happy")), Some(&l("happy")));
        assert_eq!(m.base_of(&l("joy")), Some(&l("joy")));
        assert_eq!(log.len(), 1);
        assert_eq!(log[0].chosen, l("happy"));
        for b in m.bases() {
            assert!(m.members(b).unwrap().contains(b));
        }
        for s in m.domain() {
            assert!(m.members(m.base_of(s).unwrap()).unwrap().contains(s));
        }
    }
}
