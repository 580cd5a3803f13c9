//! Label inventories and the stage/process compatibility table.
//!
//! The registry holds the canonical label set: 5 stages of change (SOC),
//! 10 processes of change (POC), and 12 conversational "other" labels,
//! together with the surface aliases seen in annotated transcripts.

mod lint;
mod matrix;

pub use lint::{lint_dialogue, track_soc, LintWarning};
pub use matrix::CompatibilityMatrix;

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// One of the three independent annotation families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Family {
    Soc,
    Poc,
    Other,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Soc, Family::Poc, Family::Other];

    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Soc => "SOC",
            Family::Poc => "POC",
            Family::Other => "OTHER",
        }
    }

    /// Case-insensitive parse of a family name.
    pub fn parse(name: &str) -> Option<Family> {
        match name.to_ascii_lowercase().as_str() {
            "soc" => Some(Family::Soc),
            "poc" => Some(Family::Poc),
            "other" => Some(Family::Other),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum TtmError {
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("alias `{alias}` is ambiguous: maps to both `{first}` and `{second}`")]
    AmbiguousAlias {
        alias: String,
        first: String,
        second: String,
    },
    #[error("missing matrix row for process `{0}`")]
    MissingRow(String),
    #[error("stage `{0}` admits no process in the matrix")]
    EmptyStage(String),
    #[error("process `{0}` lists no compatible stage")]
    EmptyProcess(String),
    #[error("matrix line {line} is not `poc-name: soc, soc, ...`")]
    BadMatrixLine { line: usize },
    #[error("override line {line} is not `canonical-label: alias, alias, ...`")]
    BadOverrideLine { line: usize },
    #[error("label `{0}` is not a stage of change")]
    NotAStage(String),
    #[error("label `{0}` is not a process of change")]
    NotAProcess(String),
}

/// A canonical label: name, family, surface aliases, short description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelDef {
    pub name: String,
    pub family: Family,
    pub aliases: Vec<String>,
    pub description: String,
}

/// The canonical label inventory with case-insensitive alias resolution.
#[derive(Debug, Clone)]
pub struct LabelRegistry {
    defs: Vec<LabelDef>,
    // lowercase name or alias -> index into defs
    by_key: HashMap<String, usize>,
}

/// (name, family, aliases, description) rows for the compiled-in registry.
const BUILTIN: &[(&str, Family, &[&str], &str)] = &[
    (
        "Precontemplation",
        Family::Soc,
        &[],
        "not yet intending to change the behavior",
    ),
    (
        "Contemplation",
        Family::Soc,
        &["Contmpltn"],
        "planning to change within the next six months",
    ),
    (
        "Preparation",
        Family::Soc,
        &["Preprtn"],
        "getting ready to act within the next month",
    ),
    (
        "Action",
        Family::Soc,
        &[],
        "actively changing the behavior and making progress",
    ),
    (
        "Maintenance",
        Family::Soc,
        &[],
        "behavior changed for six months or more, guarding against relapse",
    ),
    (
        "consciousness-raising",
        Family::Poc,
        &["CR"],
        "seeking out information about the problem behavior",
    ),
    (
        "dramatic-relief",
        Family::Poc,
        &[],
        "heightened emotion about the problem, relieved once action is possible",
    ),
    (
        "substance-use-stimulus-control",
        Family::Poc,
        &[],
        "external aids such as medication or devices; also cue management, which is rare in chat data",
    ),
    (
        "social-liberation",
        Family::Poc,
        &["SL"],
        "growing social opportunities that support the change",
    ),
    (
        "self-re-evaluation",
        Family::Poc,
        &["SR"],
        "reassessing one's self-image in light of the behavior",
    ),
    (
        "helping-relationships",
        Family::Poc,
        &[],
        "support from caring and trusting relationships",
    ),
    (
        "counter-conditioning",
        Family::Poc,
        &["CC"],
        "substituting a healthier behavior for the unwanted one",
    ),
    (
        "reinforcement-management",
        Family::Poc,
        &[],
        "rewards and consequences tied to progress",
    ),
    (
        "self-liberation",
        Family::Poc,
        &["SeLi"],
        "belief in the ability to change plus the commitment to act",
    ),
    (
        "environmental-re-evaluation",
        Family::Poc,
        &[],
        "assessing how the habit affects one's surroundings and other people",
    ),
    ("question", Family::Other, &[], "a question"),
    ("greeting", Family::Other, &["GREET"], "a greeting"),
    ("goal", Family::Other, &["GOAL"], "a stated weight loss goal"),
    (
        "time-frame",
        Family::Other,
        &["TimeFrame"],
        "a duration or point in time",
    ),
    ("bad-diet", Family::Other, &[], "an unhealthy dietary choice"),
    ("good-diet", Family::Other, &[], "a healthy dietary choice"),
    (
        "lifestyle-undesired",
        Family::Other,
        &["Lifestyle-undes"],
        "an unwanted lifestyle pattern",
    ),
    ("acknowledge", Family::Other, &[], "an acknowledgment"),
    (
        "frequency",
        Family::Other,
        &[],
        "how often a behavior happens",
    ),
    ("end", Family::Other, &[], "conversation closing"),
    ("device", Family::Other, &[], "equipment that aids weight loss"),
    (
        "current-weight",
        Family::Other,
        &["currWeight"],
        "the speaker's current weight",
    ),
];

impl LabelRegistry {
    /// The compiled-in inventory: 5 SOC, 10 POC, and 12 "other" labels.
    pub fn builtin() -> LabelRegistry {
        let mut reg = LabelRegistry {
            defs: Vec::new(),
            by_key: HashMap::new(),
        };
        for (name, family, aliases, description) in BUILTIN {
            reg.insert(LabelDef {
                name: (*name).to_string(),
                family: *family,
                aliases: aliases.iter().map(|a| a.to_string()).collect(),
                description: (*description).to_string(),
            })
            .expect("builtin registry is alias-unambiguous");
        }
        debug_assert_eq!(reg.family_labels(Family::Soc).count(), 5);
        debug_assert_eq!(reg.family_labels(Family::Poc).count(), 10);
        debug_assert_eq!(reg.family_labels(Family::Other).count(), 12);
        reg
    }

    fn insert(&mut self, def: LabelDef) -> Result<(), TtmError> {
        let idx = self.defs.len();
        let mut keys = vec![def.name.to_lowercase()];
        keys.extend(def.aliases.iter().map(|a| a.to_lowercase()));
        for key in keys {
            if let Some(&prev) = self.by_key.get(&key) {
                if prev != idx {
                    return Err(TtmError::AmbiguousAlias {
                        alias: key,
                        first: self.defs[prev].name.clone(),
                        second: def.name.clone(),
                    });
                }
            }
            self.by_key.insert(key, idx);
        }
        self.defs.push(def);
        Ok(())
    }

    /// Resolve a surface tag (canonical name or alias, any case).
    pub fn resolve(&self, tag: &str) -> Option<&LabelDef> {
        self.by_key
            .get(&tag.trim().to_lowercase())
            .map(|&i| &self.defs[i])
    }

    /// All labels, registry order.
    pub fn labels(&self) -> impl Iterator<Item = &LabelDef> {
        self.defs.iter()
    }

    /// Labels of one family, registry order.
    pub fn family_labels(&self, family: Family) -> impl Iterator<Item = &LabelDef> {
        self.defs.iter().filter(move |d| d.family == family)
    }

    /// Apply an alias override file: `canonical-label: alias, alias, ...`
    /// per line, `#` comments. Overrides may add aliases to existing
    /// labels, never new labels.
    pub fn add_alias_overrides(&mut self, text: &str) -> Result<(), TtmError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, rest) = line
                .split_once(':')
                .ok_or(TtmError::BadOverrideLine { line: lineno + 1 })?;
            let idx = match self.by_key.get(&name.trim().to_lowercase()) {
                Some(&i) => i,
                None => return Err(TtmError::UnknownLabel(name.trim().to_string())),
            };
            for alias in rest.split(',') {
                let alias = alias.trim();
                if alias.is_empty() {
                    continue;
                }
                let key = alias.to_lowercase();
                match self.by_key.get(&key) {
                    Some(&prev) if prev != idx => {
                        return Err(TtmError::AmbiguousAlias {
                            alias: alias.to_string(),
                            first: self.defs[prev].name.clone(),
                            second: self.defs[idx].name.clone(),
                        });
                    }
                    Some(_) => {}
                    None => {
                        self.by_key.insert(key, idx);
                        self.defs[idx].aliases.push(alias.to_string());
                    }
                }
            }
        }
        Ok(())
    }

    /// Every (key, label) pair the registry resolves, for exhaustive checks.
    pub fn resolution_table(&self) -> Vec<(String, &LabelDef)> {
        let mut table: Vec<(String, &LabelDef)> = self
            .by_key
            .iter()
            .map(|(k, &i)| (k.clone(), &self.defs[i]))
            .collect();
        table.sort_by(|a, b| a.0.cmp(&b.0));
        table
    }
}

/// Convenience free function mirroring the public API shape.
pub fn builtin_registry() -> LabelRegistry {
    LabelRegistry::builtin()
}
