//! Linguistic ablations: drop nouns, adjectives, both, or every word from an
//! instruction, using a part-of-speech lexicon.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::supervision::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PosTag {
    Noun,
    Adjective,
    Other,
}

impl FromStr for PosTag {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "noun" => Ok(PosTag::Noun),
            "adjective" => Ok(PosTag::Adjective),
            "other" => Ok(PosTag::Other),
            _ => Err(()),
        }
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PosTag::Noun => "noun",
            PosTag::Adjective => "adjective",
            PosTag::Other => "other",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AblationMode {
    Nouns,
    Adjectives,
    NounsAdjectives,
    All,
}

impl AblationMode {
    pub const ALL_MODES: [AblationMode; 4] = [
        AblationMode::Nouns,
        AblationMode::Adjectives,
        AblationMode::NounsAdjectives,
        AblationMode::All,
    ];

    fn drops(self, tag: PosTag) -> bool {
        match self {
            AblationMode::Nouns => tag == PosTag::Noun,
            AblationMode::Adjectives => tag == PosTag::Adjective,
            AblationMode::NounsAdjectives => tag != PosTag::Other,
            AblationMode::All => true,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AblationMode::Nouns => "nouns",
            AblationMode::Adjectives => "adjectives",
            AblationMode::NounsAdjectives => "nouns_adjectives",
            AblationMode::All => "all",
        }
    }
}

impl FromStr for AblationMode {
    type Err = LexiconError;
    fn from_str(s: &str) -> Result<Self, LexiconError> {
        AblationMode::ALL_MODES
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| LexiconError::UnknownMode(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexiconError {
    #[error("line {line}: expected `token<TAB>tag`")]
    Malformed { line: usize },
    #[error("line {line}: unknown tag `{tag}` (expected noun, adjective or other)")]
    UnknownTag { line: usize, tag: String },
    #[error("line {line}: duplicate token `{token}`")]
    Duplicate { line: usize, token: String },
    #[error("unknown ablation mode `{0}`")]
    UnknownMode(String),
}

/// Context-free token → tag table. Tokens missing from it are `Other`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PosLexicon {
    tags: BTreeMap<String, PosTag>,
}

impl PosLexicon {
    pub fn tag(&self, token: &str) -> PosTag {
        self.tags.get(token).copied().unwrap_or(PosTag::Other)
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn insert(&mut self, token: &str, tag: PosTag) -> Option<PosTag> {
        self.tags.insert(token.to_lowercase(), tag)
    }
}

/// Reads `token<TAB>tag` lines. Blank lines are skipped; tokens are
/// lowercased.
pub fn load_lexicon(text: &str) -> Result<PosLexicon, LexiconError> {
    let mut lex = PosLexicon::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let mut parts = raw.split('\t');
        let (Some(token), Some(tag), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(LexiconError::Malformed { line });
        };
        let token = token.trim().to_lowercase();
        if token.is_empty() || token.contains(char::is_whitespace) {
            return Err(LexiconError::Malformed { line });
        }
        let tag_str = tag.trim();
        let tag = tag_str.parse::<PosTag>().map_err(|_| LexiconError::UnknownTag {
            line,
            tag: tag_str.to_string(),
        })?;
        if lex.tags.insert(token.clone(), tag).is_some() {
            return Err(LexiconError::Duplicate { line, token });
        }
    }
    Ok(lex)
}

/// Tokenizes the instruction and drops every token whose tag the mode
/// removes, rejoining the rest with single spaces.
pub fn ablate(instruction: &str, mode: AblationMode, lex: &PosLexicon) -> String {
    let kept: Vec<String> = tokenize(instruction)
        .into_iter()
        .filter(|t| !mode.drops(lex.tag(t)))
        .collect();
    kept.join(" ")
}
