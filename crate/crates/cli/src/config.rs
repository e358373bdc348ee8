//! Configuration documents.
//!
//! A document is one object (`"mode": "abstract"` or `"mode": "kummer"`) or
//! a top-level array of such objects, one per prime; the results of an
//! array are reported as a direct sum.

use std::path::Path;

use multinorm_core::group::{Character, PGroup, Subgroup};
use multinorm_core::kummer;
use multinorm_core::local::LocalData;
use multinorm_core::FieldConfig;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterSpec {
    pub label: String,
    pub target_exponent: u32,
    pub coeffs: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaceSpec {
    pub label: String,
    pub generators: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbstractConfig {
    pub p: u64,
    pub exponents: Vec<u32>,
    pub characters: Vec<CharacterSpec>,
    #[serde(default)]
    pub exceptional_places: Vec<PlaceSpec>,
    #[serde(default)]
    pub budget: Option<u64>,
    #[serde(default)]
    pub debug_monotonicity: bool,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KummerConfig {
    pub radicands: Vec<i64>,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
    #[serde(default)]
    pub budget: Option<u64>,
    #[serde(default)]
    pub debug_monotonicity: bool,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum ConfigDocument {
    Abstract(AbstractConfig),
    Kummer(KummerConfig),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConfigFile {
    Many(Vec<ConfigDocument>),
    One(ConfigDocument),
}

/// A configuration ready for computation.
#[derive(Clone, Debug)]
pub struct Part {
    pub label: String,
    pub config: FieldConfig,
    pub local: LocalData,
    pub budget: Option<u128>,
    pub debug_monotonicity: bool,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

impl AbstractConfig {
    /// Sorts the exponents into non-increasing order and permutes every
    /// coordinate vector to match.
    pub fn into_part(&self, label: String) -> Result<Part, CliError> {
        let k = self.exponents.len();
        for c in &self.characters {
            if c.coeffs.len() != k {
                return Err(invalid(format!(
                    "character {}: {} coefficients for {k} coordinates",
                    c.label,
                    c.coeffs.len()
                )));
            }
        }
        for pl in &self.exceptional_places {
            if let Some(g) = pl.generators.iter().find(|g| g.len() != k) {
                return Err(invalid(format!(
                    "place {}: generator {g:?} has the wrong length",
                    pl.label
                )));
            }
        }
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| self.exponents[b].cmp(&self.exponents[a]).then(a.cmp(&b)));
        let permute = |v: &[i64]| order.iter().map(|&j| v[j]).collect::<Vec<_>>();
        let a = PGroup::new(self.p, order.iter().map(|&j| self.exponents[j]).collect())?;
        let chars = self
            .characters
            .iter()
            .enumerate()
            .map(|(index, c)| {
                Character::new(&a, c.target_exponent, &permute(&c.coeffs)).map_err(|e| match e {
                    multinorm_core::Error::IllDefinedCharacter { target, .. } => {
                        multinorm_core::Error::IllDefinedCharacter { index, target }
                    }
                    other => other,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let labels = self.characters.iter().map(|c| c.label.clone()).collect();
        let places = self
            .exceptional_places
            .iter()
            .map(|pl| {
                let gens: Vec<Vec<i64>> = pl.generators.iter().map(|g| permute(g)).collect();
                for g in &gens {
                    a.check(g)?;
                }
                Ok((pl.label.clone(), Subgroup::span(&a, &gens)))
            })
            .collect::<Result<Vec<_>, multinorm_core::Error>>()?;
        Ok(Part {
            label,
            config: FieldConfig::new(a, chars, labels)?,
            local: LocalData::new(places)?,
            budget: self.budget.map(u128::from),
            debug_monotonicity: self.debug_monotonicity,
        })
    }
}

impl KummerConfig {
    pub fn into_part(&self, label: String) -> Result<Part, CliError> {
        let mut b = kummer::build(&self.radicands)?;
        if let Some(labels) = &self.labels {
            if labels.len() != self.radicands.len() {
                return Err(invalid(format!(
                    "{} labels for {} radicands",
                    labels.len(),
                    self.radicands.len()
                )));
            }
            b.config.labels = labels.clone();
        }
        Ok(Part {
            label,
            config: b.config,
            local: b.local,
            budget: self.budget.map(u128::from),
            debug_monotonicity: self.debug_monotonicity,
        })
    }
}

impl ConfigDocument {
    pub fn into_part(&self, label: String) -> Result<Part, CliError> {
        match self {
            ConfigDocument::Abstract(c) => c.into_part(label),
            ConfigDocument::Kummer(c) => c.into_part(label),
        }
    }

    fn prime(&self) -> u64 {
        match self {
            ConfigDocument::Abstract(c) => c.p,
            ConfigDocument::Kummer(_) => 2,
        }
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        // Try each shape explicitly so schema errors name the offending key.
        if text.trim_start().starts_with('[') {
            serde_json::from_str::<Vec<ConfigDocument>>(text).map(ConfigFile::Many)
        } else {
            serde_json::from_str::<ConfigDocument>(text).map(ConfigFile::One)
        }
        .map_err(|e| invalid(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn documents(&self) -> Vec<&ConfigDocument> {
        match self {
            ConfigFile::Many(v) => v.iter().collect(),
            ConfigFile::One(d) => vec![d],
        }
    }

    pub fn parts(&self) -> Result<Vec<Part>, CliError> {
        let docs = self.documents();
        if docs.is_empty() {
            return Err(invalid("config: empty list"));
        }
        docs.iter()
            .enumerate()
            .map(|(k, d)| {
                let label = if docs.len() == 1 {
                    format!("p={}", d.prime())
                } else {
                    format!("part {k} (p={})", d.prime())
                };
                d.into_part(label)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ABSTRACT: &str = r#"{
        "mode": "abstract", "p": 2, "exponents": [1, 2],
        "characters": [
            {"label": "A", "target_exponent": 2, "coeffs": [0, 1]},
            {"label": "B", "target_exponent": 1, "coeffs": [1, 0]},
            {"label": "C", "target_exponent": 2, "coeffs": [2, 1]}
        ],
        "exceptional_places": [{"label": "v", "generators": [[1, 0]]}]
    }"#;

    #[test]
    fn loader_sorts_exponents() {
        let f = ConfigFile::parse(ABSTRACT).unwrap();
        let parts = f.parts().unwrap();
        let p = &parts[0];
        assert_eq!(p.config.group.exponents(), &[2, 1]);
        assert_eq!(p.config.chars[0].coeffs(), &[1, 0]);
        assert_eq!(p.config.chars[1].coeffs(), &[0, 1]);
        assert_eq!(p.local.exceptional[0].d.generators()[0].0, vec![0, 1]);
        assert_eq!(p.label, "p=2");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = ABSTRACT.replace("\"p\": 2", "\"p\": 2, \"colour\": 1");
        assert!(matches!(ConfigFile::parse(&bad), Err(CliError::Validation(m)) if m.contains("colour")));
        assert!(ConfigFile::parse(r#"{"mode": "other"}"#).is_err());
        assert!(ConfigFile::parse(r#"{"mode": "kummer", "radicands": [17], "x": 1}"#).is_err());
    }

    #[test]
    fn shape_errors() {
        let bad = ABSTRACT.replace("[0, 1]}", "[0, 1, 1]}");
        assert!(matches!(
            ConfigFile::parse(&bad).unwrap().parts(),
            Err(CliError::Validation(_))
        ));
        let ill = ABSTRACT.replace(
            "\"target_exponent\": 1, \"coeffs\": [1, 0]",
            "\"target_exponent\": 2, \"coeffs\": [1, 0]",
        );
        assert!(ConfigFile::parse(&ill).unwrap().parts().is_err());
    }

    #[test]
    fn multi_prime_and_kummer() {
        let text =
            format!(r#"[{ABSTRACT}, {{"mode": "kummer", "radicands": [17, 221, 13], "labels": ["a", "b", "c"]}}]"#);
        let parts = ConfigFile::parse(&text).unwrap().parts().unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[1].label, "part 1 (p=2)");
        assert_eq!(parts[1].config.labels, vec!["a", "b", "c"]);
    }
}
