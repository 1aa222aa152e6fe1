//! Category synonym table.
//!
//! Grounding compares categories by exact string equality after mapping each
//! noun through this table, so "mug" and "cup" refer to the same category.
//! The table ships as `data/synonyms.json` (alias → canonical noun).

use std::collections::BTreeMap;

use once_cell::sync::Lazy;

static BUILTIN: Lazy<Synonyms> = Lazy::new(|| {
    Synonyms::from_json(include_str!("../data/synonyms.json"))
        .expect("bundled synonym table is valid")
});

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Synonyms {
    aliases: BTreeMap<String, String>,
}

impl Synonyms {
    pub fn builtin() -> &'static Synonyms {
        &BUILTIN
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let raw: BTreeMap<String, String> = serde_json::from_str(text)?;
        let aliases = raw
            .into_iter()
            .map(|(k, v)| (k.to_lowercase(), v.to_lowercase()))
            .collect();
        Ok(Self { aliases })
    }

    /// Lowercases `noun` and maps it to its canonical category.
    pub fn normalize(&self, noun: &str) -> String {
        let lower = noun.trim().to_lowercase();
        match self.aliases.get(&lower) {
            Some(canonical) => canonical.clone(),
            None => lower,
        }
    }

    pub fn aliases(&self) -> impl Iterator<Item = (&str, &str)> {
        self.aliases.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

/// Normalizes a category with the bundled table.
pub fn normalize_category(noun: &str) -> String {
    Synonyms::builtin().normalize(noun)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aliases_map_to_canonical() {
        assert_eq!(normalize_category("mug"), "cup");
        assert_eq!(normalize_category("Cellphone"), "phone");
        assert_eq!(normalize_category("cup"), "cup");
        assert_eq!(normalize_category("banana"), "banana");
    }

    #[test]
    fn canonical_targets_are_fixed_points() {
        let table = Synonyms::builtin();
        for (_, canonical) in table.aliases() {
            assert_eq!(table.normalize(canonical), canonical);
        }
    }
}
