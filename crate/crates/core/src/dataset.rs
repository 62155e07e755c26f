//! A labelled corpus of feature vectors with session and week structure.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::features::{DirectionGroup, FeatureName, FeatureVector};

/// Sessions are identified by `doc_id`. Sessions listed in `week2_docs`
/// belong to the second recording week; all others to the first.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub vectors: Vec<FeatureVector>,
    pub week2_docs: BTreeSet<String>,
}

impl Dataset {
    pub fn new(vectors: Vec<FeatureVector>) -> Self {
        Self {
            vectors,
            week2_docs: BTreeSet::new(),
        }
    }

    pub fn with_week2(mut self, docs: impl IntoIterator<Item = impl Into<String>>) -> Self {
        self.week2_docs = docs.into_iter().map(Into::into).collect();
        self
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn week(&self, doc_id: &str) -> u8 {
        if self.week2_docs.contains(doc_id) {
            2
        } else {
            1
        }
    }

    /// Sorted, distinct user ids.
    pub fn users(&self) -> Vec<String> {
        self.vectors
            .iter()
            .map(|v| v.user_id.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// `user -> doc -> vector indices`, each session in stroke order.
    pub fn sessions(&self) -> BTreeMap<String, BTreeMap<String, Vec<usize>>> {
        let mut out: BTreeMap<String, BTreeMap<String, Vec<usize>>> = BTreeMap::new();
        for (i, v) in self.vectors.iter().enumerate() {
            out.entry(v.user_id.clone())
                .or_default()
                .entry(v.doc_id.clone())
                .or_default()
                .push(i);
        }
        for docs in out.values_mut() {
            for idx in docs.values_mut() {
                idx.sort_by_key(|&i| (self.vectors[i].stroke_index_in_session, i));
            }
        }
        out
    }

    /// A copy holding only the given users' vectors, in original order.
    pub fn restrict_users(&self, users: &BTreeSet<String>) -> Dataset {
        Dataset {
            vectors: self
                .vectors
                .iter()
                .filter(|v| users.contains(&v.user_id))
                .cloned()
                .collect(),
            week2_docs: self.week2_docs.clone(),
        }
    }

    /// Whether vector `i` can feed a classifier of `group` using `features`.
    pub fn usable(
        &self,
        i: usize,
        group: DirectionGroup,
        features: &[FeatureName],
        include_incomplete: bool,
    ) -> bool {
        let v = &self.vectors[i];
        v.group() == group
            && features.iter().all(|&f| v.get(f).is_some())
            && (include_incomplete || v.is_complete())
    }

    /// Most frequent phone per user; ties go to the smaller phone id.
    pub fn phone_of_users(&self) -> BTreeMap<String, String> {
        let mut counts: BTreeMap<&str, BTreeMap<&str, usize>> = BTreeMap::new();
        for v in &self.vectors {
            *counts
                .entry(&v.user_id)
                .or_default()
                .entry(&v.phone_id)
                .or_default() += 1;
        }
        counts
            .into_iter()
            .map(|(u, phones)| {
                let best = phones.iter().fold(
                    ("", 0),
                    |best, (&p, &c)| if c > best.1 { (p, c) } else { best },
                );
                (u.to_string(), best.0.to_string())
            })
            .collect()
    }
}
