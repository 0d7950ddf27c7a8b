//! Multilingual preprocessing shared by vocabulary construction, indexing and
//! the domainness metrics.
//!
//! The pipeline is: Unicode word segmentation, splitting on punctuation,
//! lowercasing, removal of numeric tokens and stopwords, stemming, diacritic
//! stripping and finally a minimum-length filter. Stemming and diacritic
//! stripping are iterated to a fixed point so that every emitted token maps
//! to itself when preprocessed again.

pub mod porter;

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;
use unicode_segmentation::UnicodeSegmentation;

use crate::error::{Error, Result};

/// Upper bound on stem/strip rounds; every stemmer shipped here converges in
/// two or three.
const MAX_NORMALIZE_ROUNDS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StemmerKind {
    /// Original Porter algorithm (English).
    Porter,
    Snowball(SnowballLanguage),
    /// Identity; used for editions without a published stemmer.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnowballLanguage {
    Arabic,
    French,
    German,
    Greek,
    Romanian,
    Spanish,
}

impl SnowballLanguage {
    fn algorithm(self) -> rust_stemmers::Algorithm {
        use rust_stemmers::Algorithm;
        match self {
            SnowballLanguage::Arabic => Algorithm::Arabic,
            SnowballLanguage::French => Algorithm::French,
            SnowballLanguage::German => Algorithm::German,
            SnowballLanguage::Greek => Algorithm::Greek,
            SnowballLanguage::Romanian => Algorithm::Romanian,
            SnowballLanguage::Spanish => Algorithm::Spanish,
        }
    }
}

impl StemmerKind {
    pub fn for_lang(lang: &str) -> Self {
        match lang {
            "en" => StemmerKind::Porter,
            "ar" => StemmerKind::Snowball(SnowballLanguage::Arabic),
            "fr" => StemmerKind::Snowball(SnowballLanguage::French),
            "de" => StemmerKind::Snowball(SnowballLanguage::German),
            "el" => StemmerKind::Snowball(SnowballLanguage::Greek),
            "ro" => StemmerKind::Snowball(SnowballLanguage::Romanian),
            "es" => StemmerKind::Snowball(SnowballLanguage::Spanish),
            // ca, eu, oc and anything unknown: no stemmer available.
            _ => StemmerKind::None,
        }
    }
}

enum StemmerImpl {
    Porter,
    Snowball(rust_stemmers::Stemmer),
    None,
}

impl StemmerImpl {
    fn new(kind: StemmerKind) -> Self {
        match kind {
            StemmerKind::Porter => StemmerImpl::Porter,
            StemmerKind::Snowball(lang) => {
                StemmerImpl::Snowball(rust_stemmers::Stemmer::create(lang.algorithm()))
            }
            StemmerKind::None => StemmerImpl::None,
        }
    }

    fn stem(&self, word: &str) -> String {
        match self {
            StemmerImpl::Porter => porter::stem(word),
            StemmerImpl::Snowball(s) => s.stem(word).into_owned(),
            StemmerImpl::None => word.to_string(),
        }
    }
}

fn default_stopwords(lang: &str) -> &'static str {
    match lang {
        "en" => include_str!("../../data/stopwords/en.txt"),
        "fr" => include_str!("../../data/stopwords/fr.txt"),
        "es" => include_str!("../../data/stopwords/es.txt"),
        "de" => include_str!("../../data/stopwords/de.txt"),
        "ar" => include_str!("../../data/stopwords/ar.txt"),
        "ro" => include_str!("../../data/stopwords/ro.txt"),
        "ca" => include_str!("../../data/stopwords/ca.txt"),
        "eu" => include_str!("../../data/stopwords/eu.txt"),
        "el" => include_str!("../../data/stopwords/el.txt"),
        "oc" => include_str!("../../data/stopwords/oc.txt"),
        _ => "",
    }
}

/// Parses a stopword list: one token per line, `#` starts a comment.
pub fn parse_stopwords(text: &str) -> HashSet<String> {
    text.lines()
        .map(|line| line.split('#').next().unwrap_or("").trim())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}

pub fn load_stopwords(path: &Path) -> Result<HashSet<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_stopwords(&text))
}

pub struct PreprocessConfig {
    pub lang: String,
    pub stopwords: HashSet<String>,
    pub min_token_len: usize,
    pub stemmer: StemmerKind,
    stemmer_impl: StemmerImpl,
}

impl std::fmt::Debug for PreprocessConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PreprocessConfig")
            .field("lang", &self.lang)
            .field("stopwords", &self.stopwords.len())
            .field("min_token_len", &self.min_token_len)
            .field("stemmer", &self.stemmer)
            .finish()
    }
}

impl Clone for PreprocessConfig {
    fn clone(&self) -> Self {
        Self::new(
            &self.lang,
            self.stopwords.clone(),
            self.min_token_len,
            self.stemmer,
        )
        .expect("already validated")
    }
}

impl PreprocessConfig {
    /// Defaults for an edition: shipped stopwords, minimum length 4 (3 for
    /// Arabic) and the edition's stemmer.
    pub fn for_lang(lang: &str) -> Self {
        let min_len = if lang == "ar" { 3 } else { 4 };
        Self::new(
            lang,
            parse_stopwords(default_stopwords(lang)),
            min_len,
            StemmerKind::for_lang(lang),
        )
        .expect("defaults are valid")
    }

    pub fn new(
        lang: &str,
        stopwords: HashSet<String>,
        min_token_len: usize,
        stemmer: StemmerKind,
    ) -> Result<Self> {
        if min_token_len == 0 {
            return Err(Error::Config("min_token_len must be at least 1".into()));
        }
        let stopwords = stopwords.into_iter().map(|s| s.to_lowercase()).collect();
        Ok(Self {
            lang: lang.to_string(),
            stopwords,
            min_token_len,
            stemmer,
            stemmer_impl: StemmerImpl::new(stemmer),
        })
    }

    pub fn with_stopwords(mut self, stopwords: HashSet<String>) -> Self {
        self.stopwords = stopwords.into_iter().map(|s| s.to_lowercase()).collect();
        self
    }

    fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }
}

/// Removes combining marks after canonical decomposition.
pub fn strip_diacritics(s: &str) -> String {
    s.nfd().filter(|c| !is_combining_mark(*c)).nfc().collect()
}

fn normalize_token(token: &str, cfg: &PreprocessConfig) -> String {
    let mut current = token.to_string();
    for _ in 0..MAX_NORMALIZE_ROUNDS {
        let next = strip_diacritics(&cfg.stemmer_impl.stem(&current.to_lowercase()));
        if next == current {
            break;
        }
        current = next;
    }
    current
}

fn raw_tokens(text: &str) -> impl Iterator<Item = &str> {
    text.unicode_words().flat_map(|w| {
        w.split(|c: char| !(c.is_alphanumeric() || is_combining_mark(c)))
            .filter(|p| !p.is_empty())
    })
}

/// Ordered list of preprocessed terms of `text`.
pub fn preprocess(text: &str, cfg: &PreprocessConfig) -> Vec<String> {
    let mut out = Vec::new();
    for raw in raw_tokens(text) {
        let lower = raw.to_lowercase();
        if lower.chars().any(char::is_numeric) {
            continue;
        }
        if cfg.is_stopword(&lower) {
            continue;
        }
        let stripped = strip_diacritics(&lower);
        if cfg.is_stopword(&stripped) {
            continue;
        }
        let term = normalize_token(&lower, cfg);
        if term.chars().count() < cfg.min_token_len || cfg.is_stopword(&term) {
            continue;
        }
        if term
            .chars()
            .any(|c| !c.is_alphabetic() || is_combining_mark(c))
        {
            continue;
        }
        out.push(term);
    }
    out
}
