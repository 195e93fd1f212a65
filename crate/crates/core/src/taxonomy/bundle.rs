use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::expansion::{Collision, ExpansionMap, FormMap, MapKind, MapSource, SynonymMap};
use super::wheel::{parse_wheel, EmotionWheel, Level, WheelId};
use super::{Label, TaxonomyError};

pub const BUNDLE_FORMAT: &str = "emoset-taxonomy/1";

/// Wheels plus the synonym and word-form maps. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaxonomyBundle {
    version: String,
    wheels: BTreeMap<WheelId, EmotionWheel>,
    synonyms: SynonymMap,
    forms: FormMap,
    collision_log: Vec<Collision>,
}

type WheelRow = (u8, Label, Option<Label>);

#[derive(Serialize, Deserialize)]
struct BundleDoc {
    format: String,
    version: String,
    wheels: BTreeMap<WheelId, Vec<WheelRow>>,
    synonyms: MapSource,
    forms: MapSource,
    collision_log: Vec<Collision>,
}

pub const BUILTIN_VERSION: &str = "builtin-1";

const BUILTIN_WHEELS: [&str; 5] = [
    include_str!("../../data/wheels/w1.tsv"),
    include_str!("../../data/wheels/w2.tsv"),
    include_str!("../../data/wheels/w3.tsv"),
    include_str!("../../data/wheels/w4.tsv"),
    include_str!("../../data/wheels/w5.tsv"),
];

/// The bundle built from the wheel, synonym and form files shipped in
/// `data/`.
pub fn builtin_bundle() -> TaxonomyBundle {
    build_bundle(
        BUILTIN_VERSION,
        &BUILTIN_WHEELS,
        include_str!("../../data/synonyms.tsv"),
        include_str!("../../data/forms.tsv"),
    )
    .expect("shipped taxonomy data is valid")
}

/// Parses every source and assembles a bundle.
pub fn build_bundle(
    version: &str,
    wheel_sources: &[&str],
    synonyms: &str,
    forms: &str,
) -> Result<TaxonomyBundle, TaxonomyError> {
    let wheels = wheel_sources
        .iter()
        .map(|src| parse_wheel(src))
        .collect::<Result<Vec<_>, _>>()?;
    TaxonomyBundle::assemble(version, wheels, MapSource::parse(synonyms)?, MapSource::parse(forms)?)
}

impl TaxonomyBundle {
    /// A bundle with no wheels and empty maps: every label is out of vocabulary.
    pub fn empty() -> Self {
        TaxonomyBundle {
            version: "empty".into(),
            wheels: BTreeMap::new(),
            synonyms: ExpansionMap::default(),
            forms: ExpansionMap::default(),
            collision_log: Vec::new(),
        }
    }

    /// Every wheel label becomes a synonym base of itself, and every label in
    /// the synonym domain becomes a form base of itself, so both inverse maps
    /// are total on their vocabularies.
    pub fn assemble(
        version: &str,
        wheels: Vec<EmotionWheel>,
        mut synonyms: MapSource,
        mut forms: MapSource,
    ) -> Result<Self, TaxonomyError> {
        let mut by_id = BTreeMap::new();
        for w in wheels {
            let id = w.id();
            if by_id.insert(id, w).is_some() {
                return Err(TaxonomyError::DuplicateWheel(id));
            }
        }

        // lowest ring number across all wheels
        let mut ring: BTreeMap<Label, u8> = BTreeMap::new();
        for w in by_id.values() {
            for (level, label) in w.all_labels() {
                let e = ring.entry(label.clone()).or_insert(level.number());
                *e = (*e).min(level.number());
            }
        }
        if let Some(base) = synonyms.entries().keys().find(|b| !ring.contains_key(*b)) {
            return Err(TaxonomyError::SynonymBaseNotInWheel(base.clone()));
        }
        for label in ring.keys() {
            if !synonyms.contains_base(label) {
                synonyms.insert(label.clone(), []);
            }
        }

        let mut log = Vec::new();
        let syn_rank = |b: &Label| ring.get(b).copied().unwrap_or(u8::MAX);
        let syn_map = ExpansionMap::build(MapKind::Synonyms, synonyms, syn_rank, &mut log);

        for label in syn_map.domain() {
            if !forms.contains_base(label) {
                forms.insert(label.clone(), []);
            }
        }
        let form_rank = |b: &Label| syn_map.base_of(b).map(syn_rank).unwrap_or(u8::MAX);
        let form_map = ExpansionMap::build(MapKind::Forms, forms, form_rank, &mut log);

        Ok(TaxonomyBundle {
            version: version.to_string(),
            wheels: by_id,
            synonyms: syn_map,
            forms: form_map,
            collision_log: log,
        })
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn wheel(&self, id: WheelId) -> Option<&EmotionWheel> {
        self.wheels.get(&id)
    }

    pub fn wheels(&self) -> impl Iterator<Item = &EmotionWheel> {
        self.wheels.values()
    }

    pub fn synonyms(&self) -> &SynonymMap {
        &self.synonyms
    }

    pub fn forms(&self) -> &FormMap {
        &self.forms
    }

    pub fn collision_log(&self) -> &[Collision] {
        &self.collision_log
    }

    /// M1 canonicalization: the word-form base of `label`, or `label` itself
    /// flagged as out of vocabulary.
    pub fn canonical_form(&self, label: &Label) -> (Label, bool) {
        match self.forms.base_of(label) {
            Some(base) => (base.clone(), false),
            None => (label.clone(), true),
        }
    }

    /// M2 canonicalization: word-form base, then synonym base. Flagged when
    /// either step had to fall back to identity.
    pub fn canonical_base(&self, label: &Label) -> (Label, bool) {
        let (form, oov) = self.canonical_form(label);
        match self.synonyms.base_of(&form) {
            Some(base) => (base.clone(), oov),
            None => (form, true),
        }
    }

    pub fn to_json(&self) -> String {
        let wheels = self
            .wheels
            .iter()
            .map(|(id, w)| {
                let mut rows = Vec::new();
                for l1 in w.labels(Level::L1) {
                    rows.push((1, l1.clone(), None));
                    for l2 in w.children(l1) {
                        rows.push((2, l2.clone(), Some(l1.clone())));
                        for l3 in w.children(l2) {
                            rows.push((3, l3.clone(), Some(l2.clone())));
                        }
                    }
                }
                (*id, rows)
            })
            .collect();
        let doc = BundleDoc {
            format: BUNDLE_FORMAT.into(),
            version: self.version.clone(),
            wheels,
            synonyms: self.synonyms.to_source(),
            forms: self.forms.to_source(),
            collision_log: self.collision_log.clone(),
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("bundle serializes");
        out.push('\n');
        out
    }

    /// Reads a serialized bundle and checks that rebuilding it reproduces the
    /// stored collision log.
    pub fn from_json(text: &str) -> Result<Self, TaxonomyError> {
        let doc: BundleDoc =
            serde_json::from_str(text).map_err(|e| TaxonomyError::BundleFormat(e.to_string()))?;
        if doc.format != BUNDLE_FORMAT {
            return Err(TaxonomyError::BundleFormat(format!(
                "unsupported format {:?}, expected {BUNDLE_FORMAT:?}",
                doc.format
            )));
        }
        let mut wheels = Vec::new();
        for (id, rows) in doc.wheels {
            let rows = rows
                .into_iter()
                .map(|(n, label, parent)| {
                    let level = match n {
                        1 => Level::L1,
                        2 => Level::L2,
                        3 => Level::L3,
                        _ => return Err(TaxonomyError::BundleFormat(format!("bad level {n} in {id}"))),
                    };
                    Ok((level, label, parent))
                })
                .collect::<Result<Vec<_>, _>>()?;
            wheels.push(EmotionWheel::from_rows(id, rows)?);
        }
        let bundle = Self::assemble(&doc.version, wheels, doc.synonyms, doc.forms)?;
        if bundle.collision_log != doc.collision_log {
            return Err(TaxonomyError::BundleFormat(
                "stored collision_log does not match the rebuilt maps".into(),
            ));
        }
        Ok(bundle)
    }
}
