//! Canonical role labels.
//!
//! Raw credit strings are cleaned by, in order: lowercasing, turning hyphens
//! into spaces, dropping the standalone word "by", and deleting bracketed
//! segments. Whitespace is then collapsed and trimmed.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::ingest::Dataset;

/// Label used when nothing survives cleaning.
pub const UNSPECIFIED: &str = "unspecified";

/// A cleaned, canonical role name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct RoleLabel(String);

impl RoleLabel {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Wraps `s` if it is already canonical.
    pub fn from_canonical(s: &str) -> Option<Self> {
        let n = normalize_role(s);
        (!n.warning && n.label.0 == s).then_some(n.label)
    }
}

impl fmt::Display for RoleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for RoleLabel {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedRole {
    pub label: RoleLabel,
    /// Set when cleaning left nothing and the label fell back to [`UNSPECIFIED`].
    pub warning: bool,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// Replaces every whole-word "by" with a space.
fn drop_word_by(s: &str) -> String {
    let chars: Vec<char> = s.chars().collect();
    let mut out = String::with_capacity(s.len());
    let mut i = 0;
    while i < chars.len() {
        let standalone = chars[i] == 'b'
            && chars.get(i + 1) == Some(&'y')
            && (i == 0 || !is_word_char(chars[i - 1]))
            && chars.get(i + 2).is_none_or(|&c| !is_word_char(c));
        if standalone {
            out.push(' ');
            i += 2;
        } else {
            out.push(chars[i]);
            i += 1;
        }
    }
    out
}

/// Deletes `[...]` segments. An unclosed `[` runs to the end of the string and
/// a stray `]` is dropped.
fn drop_brackets(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut depth = 0usize;
    for c in s.chars() {
        match c {
            '[' => depth += 1,
            ']' => depth = depth.saturating_sub(1),
            _ if depth == 0 => out.push(c),
            _ => {}
        }
    }
    out
}

pub fn normalize_role(raw: &str) -> NormalizedRole {
    let lowered = raw.to_lowercase();
    let dehyphenated = lowered.replace('-', " ");
    let without_by = drop_word_by(&dehyphenated);
    // Bracket removal can glue "b[..]y" into a fresh "by"; sweep once more.
    let stripped = drop_word_by(&drop_brackets(&without_by));
    let collapsed = stripped.split_whitespace().collect::<Vec<_>>().join(" ");

    if collapsed.is_empty() {
        NormalizedRole {
            label: RoleLabel(UNSPECIFIED.to_string()),
            warning: true,
        }
    } else {
        NormalizedRole {
            label: RoleLabel(collapsed),
            warning: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoleCount {
    pub role: RoleLabel,
    pub count: usize,
}

/// Role instance counts, sorted by count descending then label ascending.
pub fn role_inventory(d: &Dataset) -> Vec<RoleCount> {
    let mut counts: BTreeMap<RoleLabel, usize> = BTreeMap::new();
    for record in &d.records {
        *counts.entry(normalize_role(&record.role_raw).label).or_default() += 1;
    }
    let mut inventory: Vec<RoleCount> = counts
        .into_iter()
        .map(|(role, count)| RoleCount { role, count })
        .collect();
    inventory.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.role.cmp(&b.role)));
    inventory
}

pub fn write_inventory_csv<W: std::io::Write>(
    inventory: &[RoleCount],
    out: W,
) -> Result<(), csv::Error> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["role", "count"])?;
    for entry in inventory {
        writer.write_record([entry.role.as_str(), &entry.count.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::AssociationRecord;
    use proptest::prelude::*;

    fn label(raw: &str) -> String {
        normalize_role(raw).label.0
    }

    #[test]
    fn cleaning_rules() {
        assert_eq!(label("Written-By [co-written]"), "written");
        assert_eq!(label("producer"), "producer");
        assert_eq!(label("Mastered By"), "mastered");
        assert_eq!(label("Written [all songs]"), "written");
        assert_eq!(label("Written by"), "written");
        assert_eq!(label("Lobby Boy"), "lobby boy");
        assert_eq!(label("Guitar, Bass"), "guitar, bass");
        assert_eq!(label("Vocals [Lead"), "vocals");
        assert_eq!(label("b[x]y drums"), "drums");
    }

    #[test]
    fn empty_result_falls_back() {
        let n = normalize_role("[uncredited]");
        assert_eq!(n.label.as_str(), UNSPECIFIED);
        assert!(n.warning);
        assert!(normalize_role(" By ").warning);
    }

    #[test]
    fn canonical_wrapper() {
        assert!(RoleLabel::from_canonical("producer").is_some());
        assert!(RoleLabel::from_canonical("Producer").is_none());
        assert!(RoleLabel::from_canonical("unspecified").is_some());
    }

    fn dataset(roles: &[&str]) -> Dataset {
        Dataset::from_records(roles.iter().enumerate().map(|(i, r)| AssociationRecord {
            album_id: "a".into(),
            album_title: String::new(),
            main_artist: String::new(),
            release_year: None,
            collaborator_id: format!("c{i}"),
            collaborator_name: String::new(),
            role_raw: (*r).into(),
        }))
    }

    #[test]
    fn inventory() {
        let inv = role_inventory(&dataset(&["Producer", "producer", "PRODUCER"]));
        assert_eq!(inv.len(), 1);
        assert_eq!((inv[0].role.as_str(), inv[0].count), ("producer", 3));

        let inv = role_inventory(&dataset(&["Written-By [all songs]", "Written by"]));
        assert_eq!((inv[0].role.as_str(), inv[0].count), ("written", 2));

        assert!(role_inventory(&Dataset::default()).is_empty());

        let inv = role_inventory(&dataset(&["b", "a", "b", "c"]));
        let got: Vec<_> = inv.iter().map(|e| (e.role.as_str(), e.count)).collect();
        assert_eq!(got, vec![("b", 2), ("a", 1), ("c", 1)]);
    }

    #[test]
    fn inventory_csv() {
        let mut out = Vec::new();
        write_inventory_csv(&role_inventory(&dataset(&["Engineer", "Producer", "producer"])), &mut out)
            .unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "role,count\nproducer,2\nengineer,1\n");
    }

    proptest! {
        #[test]
        fn idempotent(raw in "\\PC{0,40}") {
            let once = normalize_role(&raw).label;
            prop_assert_eq!(normalize_role(once.as_str()).label, once);
        }

        #[test]
        fn no_forbidden_chars(raw in "[a-zA-Z \\-\\[\\]byBY]{0,30}") {
            let l = normalize_role(&raw).label;
            let s = l.as_str();
            prop_assert!(!s.contains(['[', ']', '-']));
            prop_assert_eq!(s.to_lowercase(), s);
            prop_assert!(!s.contains("  "));
            prop_assert_eq!(s.trim(), s);
            prop_assert!(!s.is_empty());
        }

        #[test]
        fn never_more_labels_than_raw(roles in proptest::collection::vec("[A-Za-z\\- ]{1,8}", 1..20)) {
            let raw: std::collections::HashSet<&String> = roles.iter().collect();
            let labels: std::collections::HashSet<RoleLabel> =
                roles.iter().map(|r| normalize_role(r).label).collect();
            prop_assert!(labels.len() <= raw.len());
        }
    }
}
