//! Normalization, sentence segmentation, tokenization, stemming, POS
//! tagging and misspelling detection.
//!
//! Language-specific behaviour lives in rule tables loaded at run time:
//! character and phrase maps plus spacing rules ([`NormRules`]), a suffix
//! list for the stemmer, a POS dictionary and a spelling dictionary.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use aho_corasick::{AhoCorasick, MatchKind};
use regex::Regex;
use serde::Deserialize;

use crate::error::TextError;

const MAX_NORMALIZE_PASSES: usize = 16;
const MIN_STEM_CHARS: usize = 2;
const MAX_TYPO_DISTANCE: usize = 2;

/// Characters that end a sentence.
pub const TERMINALS: [char; 5] = ['.', '!', '?', '؟', '\n'];

/// Normalization rule tables.
#[derive(Debug, Clone, Default)]
pub struct NormRules {
    char_map: BTreeMap<char, char>,
    phrases: Vec<(String, String)>,
    phrase_matcher: Option<AhoCorasick>,
    spacing_rules: Vec<(Regex, String)>,
}

#[derive(Deserialize)]
struct RulesFile {
    #[serde(default)]
    char_map: BTreeMap<String, String>,
    #[serde(default)]
    phrase_map: BTreeMap<String, String>,
    #[serde(default)]
    spacing_rules: Vec<(String, String)>,
}

fn parse_codepoint(s: &str) -> Result<char, TextError> {
    let hex = s.trim().trim_start_matches("U+").trim_start_matches("u+").trim_start_matches("0x");
    u32::from_str_radix(hex, 16)
        .ok()
        .and_then(char::from_u32)
        .ok_or_else(|| TextError::Rules(format!("invalid codepoint {s:?}")))
}

impl NormRules {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds rules, resolving character-map chains to their final target.
    /// Rejects cyclic character maps and rule sets that do not reach a fixed
    /// point on their own keys and values.
    pub fn new(
        char_map: BTreeMap<char, char>,
        phrase_map: BTreeMap<String, String>,
        spacing_rules: Vec<(String, String)>,
    ) -> Result<Self, TextError> {
        let mut closed = BTreeMap::new();
        for &start in char_map.keys() {
            let mut seen = BTreeSet::from([start]);
            let mut cur = start;
            while let Some(&next) = char_map.get(&cur) {
                if next == cur {
                    break;
                }
                if !seen.insert(next) {
                    return Err(TextError::Rules(format!("character map cycle through U+{:04X}", start as u32)));
                }
                cur = next;
            }
            if cur != start {
                closed.insert(start, cur);
            }
        }

        let mut phrases: Vec<(String, String)> = phrase_map.into_iter().filter(|(k, _)| !k.is_empty()).collect();
        phrases.sort();
        let phrase_matcher = if phrases.is_empty() {
            None
        } else {
            Some(
                AhoCorasick::builder()
                    .match_kind(MatchKind::LeftmostLongest)
                    .build(phrases.iter().map(|(k, _)| k.as_str()))
                    .map_err(|e| TextError::Rules(e.to_string()))?,
            )
        };

        let spacing_rules = spacing_rules
            .into_iter()
            .map(|(pat, rep)| {
                Regex::new(&pat).map(|re| (re, rep)).map_err(|e| TextError::Rules(format!("spacing rule {pat:?}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;

        let rules = Self { char_map: closed, phrases, phrase_matcher, spacing_rules };
        let probes: Vec<String> = rules.phrases.iter().flat_map(|(k, v)| [k.clone(), v.clone()]).collect();
        for probe in &probes {
            if rules.fixed_point(probe).is_none() {
                return Err(TextError::Rules(format!("rules do not converge on {probe:?}")));
            }
        }
        Ok(rules)
    }

    pub fn from_json(text: &str) -> Result<Self, TextError> {
        let file: RulesFile = serde_json::from_str(text).map_err(|e| TextError::Rules(e.to_string()))?;
        let mut char_map = BTreeMap::new();
        for (from, to) in &file.char_map {
            char_map.insert(parse_codepoint(from)?, parse_codepoint(to)?);
        }
        Self::new(char_map, file.phrase_map, file.spacing_rules)
    }

    pub fn load(path: &Path) -> Result<Self, TextError> {
        let text = read_resource(path)?;
        Self::from_json(&text).map_err(|e| TextError::Resource { path: path.to_path_buf(), message: e.to_string() })
    }

    pub fn is_empty(&self) -> bool {
        self.char_map.is_empty() && self.phrases.is_empty() && self.spacing_rules.is_empty()
    }

    fn single_pass(&self, input: &str) -> String {
        let mut s: String = input.chars().map(|c| *self.char_map.get(&c).unwrap_or(&c)).collect();
        if let Some(m) = &self.phrase_matcher {
            let replacements: Vec<&str> = self.phrases.iter().map(|(_, v)| v.as_str()).collect();
            s = m.replace_all(&s, &replacements);
        }
        for (re, rep) in &self.spacing_rules {
            s = re.replace_all(&s, rep.as_str()).into_owned();
        }
        s
    }

    fn fixed_point(&self, input: &str) -> Option<String> {
        let mut cur = input.to_string();
        for _ in 0..MAX_NORMALIZE_PASSES {
            let next = self.single_pass(&cur);
            if next == cur {
                return Some(cur);
            }
            cur = next;
        }
        None
    }

    /// Applies the rules until the text stops changing, which makes the
    /// result idempotent. Gives up after a fixed number of passes.
    pub fn normalize(&self, raw: &str) -> String {
        if self.is_empty() {
            return raw.to_string();
        }
        let mut cur = raw.to_string();
        for _ in 0..MAX_NORMALIZE_PASSES {
            let next = self.single_pass(&cur);
            if next == cur {
                break;
            }
            cur = next;
        }
        cur
    }
}

pub fn normalize(raw: &str, rules: &NormRules) -> String {
    rules.normalize(raw)
}

fn is_terminal_at(chars: &[char], i: usize) -> bool {
    let c = chars[i];
    if !TERMINALS.contains(&c) {
        return false;
    }
    // decimal point
    !(c == '.' && i > 0 && i + 1 < chars.len() && chars[i - 1].is_numeric() && chars[i + 1].is_numeric())
}

/// Splits normalized text into sentences. A run of terminal characters stays
/// with the sentence it ends.
pub fn segment_sentences(text: &str) -> Result<Vec<String>, TextError> {
    if text.trim().is_empty() {
        return Err(TextError::EmptyDocument);
    }
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut i = 0;
    while i < chars.len() {
        if is_terminal_at(&chars, i) {
            while i < chars.len() && is_terminal_at(&chars, i) {
                cur.push(chars[i]);
                i += 1;
            }
            push_trimmed(&mut out, &mut cur);
        } else {
            cur.push(chars[i]);
            i += 1;
        }
    }
    push_trimmed(&mut out, &mut cur);
    if out.is_empty() {
        return Err(TextError::EmptyDocument);
    }
    Ok(out)
}

fn push_trimmed(out: &mut Vec<String>, cur: &mut String) {
    let t = cur.trim();
    if !t.is_empty() {
        out.push(t.to_string());
    }
    cur.clear();
}

/// Part-of-speech classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PosTag {
    Noun,
    Verb,
    Adj,
    Adv,
    AdvTime,
    Pronoun,
    Number,
    Punct,
    Other,
}

impl PosTag {
    /// Content-word classes.
    pub fn is_lexical(self) -> bool {
        !matches!(self, PosTag::Number | PosTag::Punct)
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for PosTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let tag = match s.trim().to_ascii_lowercase().replace(['_', '-'], "").as_str() {
            "noun" | "n" => PosTag::Noun,
            "verb" | "v" => PosTag::Verb,
            "adj" | "adjective" => PosTag::Adj,
            "adv" | "adverb" => PosTag::Adv,
            "advtime" => PosTag::AdvTime,
            "pronoun" | "pro" => PosTag::Pronoun,
            "number" | "num" => PosTag::Number,
            "punct" => PosTag::Punct,
            "other" => PosTag::Other,
            other => return Err(format!("unknown POS tag {other:?}")),
        };
        Ok(tag)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    /// Case-folded surface form.
    pub normalized: String,
    pub stem: String,
    pub pos: PosTag,
    /// Character offsets `[start, end)` within the sentence text.
    pub char_span: (usize, usize),
}

impl Token {
    pub fn is_punct(&self) -> bool {
        self.pos == PosTag::Punct
    }
}

fn is_mark(c: char) -> bool {
    matches!(c as u32,
        0x0300..=0x036F | 0x0610..=0x061A | 0x064B..=0x065F | 0x0670 | 0x06D6..=0x06ED)
}

/// Letters, digits, combining marks and the zero-width (non-)joiners.
pub fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || is_mark(c) || c == '\u{200C}' || c == '\u{200D}'
}

fn is_joiner(c: char, prev: char, next: char) -> bool {
    match c {
        '\'' | '’' | '-' => is_word_char(prev) && is_word_char(next),
        '.' | ',' | '٫' => prev.is_numeric() && next.is_numeric(),
        _ => false,
    }
}

/// True for tokens made only of digits, possibly with inner decimal marks.
pub fn is_number(s: &str) -> bool {
    let chars: Vec<char> = s.chars().collect();
    match (chars.first(), chars.last()) {
        (Some(f), Some(l)) if f.is_numeric() && l.is_numeric() => {
            chars.iter().all(|c| c.is_numeric() || matches!(c, '.' | ',' | '٫'))
        }
        _ => false,
    }
}

fn make_token(surface: String, start: usize, end: usize, punct: bool) -> Token {
    let normalized = surface.to_lowercase();
    Token {
        stem: normalized.clone(),
        surface,
        normalized,
        pos: if punct { PosTag::Punct } else { PosTag::Other },
        char_span: (start, end),
    }
}

/// Splits a sentence on whitespace, then separates punctuation. Runs of the
/// same punctuation character form one token; apostrophes and hyphens
/// between letters and decimal marks between digits stay inside the word.
/// Punctuation tokens are tagged `Punct`; everything else is left `Other`.
pub fn tokenize(sentence: &str) -> Vec<Token> {
    let chars: Vec<char> = sentence.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if is_word_char(c) {
            while i < chars.len() {
                let ch = chars[i];
                let joined = i > start && i + 1 < chars.len() && is_joiner(ch, chars[i - 1], chars[i + 1]);
                if is_word_char(ch) || joined {
                    i += 1;
                } else {
                    break;
                }
            }
            tokens.push(make_token(chars[start..i].iter().collect(), start, i, false));
        } else {
            while i < chars.len() && chars[i] == c {
                i += 1;
            }
            tokens.push(make_token(chars[start..i].iter().collect(), start, i, true));
        }
    }
    tokens
}

/// Longest-suffix stripper backed by a set of known stems.
#[derive(Debug, Clone, Default)]
pub struct Stemmer {
    suffixes: Vec<String>,
    known: HashSet<String>,
}

impl Stemmer {
    pub fn new(suffixes: impl IntoIterator<Item = String>, known: impl IntoIterator<Item = String>) -> Self {
        let mut suffixes: Vec<String> = suffixes.into_iter().filter(|s| !s.is_empty()).collect();
        suffixes.sort_by(|a, b| b.chars().count().cmp(&a.chars().count()).then_with(|| a.cmp(b)));
        suffixes.dedup();
        Self { suffixes, known: known.into_iter().collect() }
    }

    pub fn add_known(&mut self, stems: impl IntoIterator<Item = String>) {
        self.known.extend(stems);
    }

    /// Known words map to themselves. Otherwise the longest suffix whose
    /// removal leaves a known stem is stripped; with no such suffix the word
    /// is returned unchanged.
    pub fn stem(&self, word: &str) -> String {
        if self.known.contains(word) {
            return word.to_string();
        }
        let len = word.chars().count();
        for suffix in &self.suffixes {
            let slen = suffix.chars().count();
            if len >= slen + MIN_STEM_CHARS && word.ends_with(suffix.as_str()) {
                let base = &word[..word.len() - suffix.len()];
                if self.known.contains(base) {
                    return base.to_string();
                }
            }
        }
        word.to_string()
    }
}

/// Stem → POS lookup table.
#[derive(Debug, Clone, Default)]
pub struct PosDictionary {
    entries: HashMap<String, PosTag>,
}

impl PosDictionary {
    pub fn new(entries: impl IntoIterator<Item = (String, PosTag)>) -> Self {
        Self { entries: entries.into_iter().collect() }
    }

    /// Parses `stem<TAB>pos` lines; blank lines and `#` comments are skipped.
    pub fn parse_tsv(text: &str, rules: &NormRules) -> Result<Self, String> {
        let mut entries = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, tag) = line.split_once('\t').ok_or_else(|| format!("line {}: expected stem<TAB>pos", i + 1))?;
            let tag: PosTag = tag.parse().map_err(|e| format!("line {}: {e}", i + 1))?;
            entries.entry(rules.normalize(word.trim()).to_lowercase()).or_insert(tag);
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path, rules: &NormRules) -> Result<Self, TextError> {
        let text = read_resource(path)?;
        Self::parse_tsv(&text, rules).map_err(|message| TextError::Resource { path: path.to_path_buf(), message })
    }

    pub fn get(&self, stem: &str) -> Option<PosTag> {
        self.entries.get(stem).copied()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Sets each token's stem.
pub fn stem_tokens(tokens: &mut [Token], stemmer: &Stemmer) {
    for t in tokens.iter_mut().filter(|t| !t.is_punct()) {
        t.stem = stemmer.stem(&t.normalized);
    }
}

/// Assigns a POS tag to every token: punctuation and numbers by form, then
/// dictionary lookup on the stem, defaulting to `Noun`.
pub fn pos_tag(tokens: &mut [Token], dict: &PosDictionary) {
    for t in tokens.iter_mut() {
        t.pos = if t.surface.chars().all(|c| !is_word_char(c)) {
            PosTag::Punct
        } else if is_number(&t.normalized) {
            PosTag::Number
        } else {
            dict.get(&t.stem).or_else(|| dict.get(&t.normalized)).unwrap_or(PosTag::Noun)
        };
    }
}

/// Known correctly-spelled stems.
#[derive(Debug, Clone)]
pub struct SpellDictionary {
    words: HashSet<String>,
    by_len: BTreeMap<usize, Vec<String>>,
}

impl SpellDictionary {
    pub fn new(words: impl IntoIterator<Item = String>) -> Result<Self, TextError> {
        let words: HashSet<String> = words.into_iter().filter(|w| !w.is_empty()).collect();
        if words.is_empty() {
            return Err(TextError::EmptyDictionary);
        }
        let mut by_len: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for w in &words {
            by_len.entry(w.chars().count()).or_default().push(w.clone());
        }
        for bucket in by_len.values_mut() {
            bucket.sort();
        }
        Ok(Self { words, by_len })
    }

    pub fn load(path: &Path, rules: &NormRules) -> Result<Self, TextError> {
        let text = read_resource(path)?;
        Self::new(word_lines(&text).map(|w| rules.normalize(w).to_lowercase()))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    /// Whether some entry is within Damerau-Levenshtein distance 2.
    pub fn has_near_miss(&self, word: &str) -> bool {
        let len = word.chars().count();
        let lo = len.saturating_sub(MAX_TYPO_DISTANCE);
        self.by_len
            .range(lo..=len + MAX_TYPO_DISTANCE)
            .flat_map(|(_, ws)| ws)
            .any(|w| strsim::damerau_levenshtein(word, w) <= MAX_TYPO_DISTANCE)
    }
}

/// A token is misspelled when it is a word, neither its normalized form nor
/// its stem is in the dictionary, and some dictionary entry is a near miss.
/// Words far from every entry count as out-of-vocabulary, not typos.
pub fn is_misspelled(token: &Token, dictionary: &SpellDictionary) -> bool {
    token.pos.is_lexical()
        && !dictionary.contains(&token.normalized)
        && !dictionary.contains(&token.stem)
        && dictionary.has_near_miss(&token.normalized)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sentence {
    pub index: usize,
    pub text: String,
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn terms(&self) -> impl Iterator<Item = &Token> {
        self.tokens.iter().filter(|t| !t.is_punct())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcessedDocument {
    pub id: String,
    pub sentences: Vec<Sentence>,
    /// Distinct stems of non-punctuation tokens.
    pub vocab: BTreeSet<String>,
    /// Number of non-punctuation tokens.
    pub term_count: usize,
}

impl ProcessedDocument {
    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flat_map(|s| s.tokens.iter())
    }

    pub fn terms(&self) -> impl Iterator<Item = &Token> {
        self.tokens().filter(|t| !t.is_punct())
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(|s| s.tokens.len()).sum()
    }
}

/// The full preprocessing chain with its rule tables.
#[derive(Debug, Clone, Default)]
pub struct TextPipeline {
    pub rules: NormRules,
    pub stemmer: Stemmer,
    pub pos_dict: PosDictionary,
}

impl TextPipeline {
    pub fn new(rules: NormRules, suffixes: Vec<String>, pos_dict: PosDictionary) -> Self {
        let known: Vec<String> = pos_dict.words().map(str::to_string).collect();
        Self { stemmer: Stemmer::new(suffixes, known), rules, pos_dict }
    }

    /// Normalizes, segments, tokenizes, stems and tags a document.
    pub fn process(&self, id: &str, raw: &str) -> Result<ProcessedDocument, TextError> {
        let text = self.rules.normalize(raw);
        let mut sentences = Vec::new();
        for (index, s) in segment_sentences(&text)?.into_iter().enumerate() {
            sentences.push(Sentence { index, tokens: self.analyze(&s), text: s });
        }
        let vocab: BTreeSet<String> = sentences.iter().flat_map(|s| s.terms()).map(|t| t.stem.clone()).collect();
        let term_count = sentences.iter().map(|s| s.terms().count()).sum();
        Ok(ProcessedDocument { id: id.to_string(), sentences, vocab, term_count })
    }

    fn analyze(&self, sentence: &str) -> Vec<Token> {
        let mut tokens = tokenize(sentence);
        stem_tokens(&mut tokens, &self.stemmer);
        pos_tag(&mut tokens, &self.pos_dict);
        tokens
    }

    /// Stems of a word or phrase, as used for lexicon and gazetteer entries.
    pub fn phrase_stems(&self, phrase: &str) -> Vec<String> {
        let text = self.rules.normalize(phrase);
        self.analyze(&text).into_iter().filter(|t| !t.is_punct()).map(|t| t.stem).collect()
    }

    /// Normalized, case-folded form without stemming.
    pub fn fold(&self, word: &str) -> String {
        self.rules.normalize(word.trim()).to_lowercase()
    }
}

pub(crate) fn read_resource(path: &Path) -> Result<String, TextError> {
    fs::read_to_string(path).map_err(|e| TextError::Resource { path: path.to_path_buf(), message: e.to_string() })
}

/// Non-empty, non-comment lines of a word list.
pub fn word_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'))
}

pub fn load_word_list(path: &Path) -> Result<Vec<String>, TextError> {
    Ok(word_lines(&read_resource(path)?).map(str::to_string).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn surfaces(tokens: &[Token]) -> Vec<&str> {
        tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    fn persian_rules() -> NormRules {
        NormRules::from_json(
            r#"{"char_map": {"064A": "06CC", "0643": "06A9"},
                "phrase_map": {"colour": "color", "mi gft": "mi‌gft"},
                "spacing_rules": [["\\s+", " "]]}"#,
        )
        .unwrap()
    }

    #[test]
    fn arabic_yeh_becomes_persian_yeh() {
        let out = normalize("\u{0639}\u{0644}\u{064A}", &persian_rules());
        assert_eq!(out, "\u{0639}\u{0644}\u{06CC}");
        assert!(!out.contains('\u{064A}'));
    }

    #[test]
    fn empty_rules_are_identity() {
        let s = "Any  text, \u{064A} unchanged!";
        assert_eq!(normalize(s, &NormRules::empty()), s);
    }

    #[test]
    fn phrase_map_and_spacing() {
        let r = persian_rules();
        assert_eq!(r.normalize("the  colour of   mi gft"), "the color of mi\u{200c}gft");
    }

    #[test]
    fn char_map_chains_are_closed() {
        let r = NormRules::new(BTreeMap::from([('a', 'b'), ('b', 'c')]), BTreeMap::new(), vec![]).unwrap();
        assert_eq!(r.normalize("ab"), "cc");
    }

    #[test]
    fn char_map_cycle_is_rejected() {
        let err = NormRules::new(BTreeMap::from([('a', 'b'), ('b', 'a')]), BTreeMap::new(), vec![]);
        assert!(matches!(err, Err(TextError::Rules(_))));
    }

    #[test]
    fn divergent_phrase_map_is_rejected() {
        let err = NormRules::new(BTreeMap::new(), BTreeMap::from([("a".into(), "aa".into())]), vec![]);
        assert!(err.is_err());
    }

    #[test]
    fn bad_codepoint_and_regex_rejected() {
        assert!(NormRules::from_json(r#"{"char_map": {"zz": "06CC"}}"#).is_err());
        assert!(NormRules::from_json(r#"{"spacing_rules": [["(", ""]]}"#).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn normalize_is_idempotent(s in "[a-e \u{064A}\u{0643}\u{06CC}]{0,40}") {
            let rules = NormRules::from_json(
                r#"{"char_map": {"064A": "06CC", "0643": "06A9"},
                    "phrase_map": {"ab": "b", "cd": "dc", "e e": "e"},
                    "spacing_rules": [["\\s+", " "], ["^ | $", ""]]}"#,
            ).unwrap();
            let once = rules.normalize(&s);
            prop_assert_eq!(rules.normalize(&once), once);
        }
    }

    #[test]
    fn segments_on_terminals() {
        assert_eq!(segment_sentences("A! B? C.").unwrap(), vec!["A!", "B?", "C."]);
        assert_eq!(segment_sentences("no terminals here").unwrap(), vec!["no terminals here"]);
        let s = segment_sentences("What????? Yes.").unwrap();
        assert_eq!(s, vec!["What?????", "Yes."]);
        assert!(s[0].ends_with("?????"));
    }

    #[test]
    fn segments_on_newline_and_arabic_question_mark() {
        assert_eq!(segment_sentences("one\ntwo؟ three").unwrap(), vec!["one", "two؟", "three"]);
        assert_eq!(segment_sentences("costs 3.5 units. ok").unwrap(), vec!["costs 3.5 units.", "ok"]);
    }

    #[test]
    fn whitespace_only_is_empty_document() {
        assert!(matches!(segment_sentences("  \n\t "), Err(TextError::EmptyDocument)));
        assert!(matches!(segment_sentences(""), Err(TextError::EmptyDocument)));
    }

    #[test]
    fn tokenizes_whitespace_and_punctuation() {
        assert_eq!(tokenize("a b  c").len(), 3);
        assert_eq!(surfaces(&tokenize("helllllloooo!")), vec!["helllllloooo", "!"]);
        assert_eq!(surfaces(&tokenize("56 items")), vec!["56", "items"]);
        assert_eq!(surfaces(&tokenize("What?????")), vec!["What", "?????"]);
        assert_eq!(surfaces(&tokenize("don't stop, (now)?!")), vec!["don't", "stop", ",", "(", "now", ")", "?", "!"]);
        assert_eq!(surfaces(&tokenize("\"quoted\"")), vec!["\"", "quoted", "\""]);
    }

    #[test]
    fn token_spans_index_the_sentence() {
        let s = "Hi, you  there!";
        let chars: Vec<char> = s.chars().collect();
        for t in tokenize(s) {
            let (a, b) = t.char_span;
            assert!(b <= chars.len());
            assert_eq!(chars[a..b].iter().collect::<String>(), t.surface);
        }
    }

    #[test]
    fn stemmer_strips_longest_known_suffix() {
        let st = Stemmer::new(["s", "es", "ing", "ings"].map(String::from), ["panic", "warn", "box"].map(String::from));
        assert_eq!(st.stem("panics"), "panic");
        assert_eq!(st.stem("warnings"), "warn");
        assert_eq!(st.stem("boxes"), "box");
        assert_eq!(st.stem("zzzs"), "zzzs");
        assert_eq!(st.stem("panic"), "panic");
    }

    #[test]
    fn pos_lookup_and_defaults() {
        let dict = PosDictionary::new([("quick".to_string(), PosTag::Adj)]);
        let mut toks = tokenize("quick zzz 56 ؟");
        pos_tag(&mut toks, &dict);
        let tags: Vec<PosTag> = toks.iter().map(|t| t.pos).collect();
        assert_eq!(tags, vec![PosTag::Adj, PosTag::Noun, PosTag::Number, PosTag::Punct]);
    }

    #[test]
    fn pos_tsv_parsing() {
        let d = PosDictionary::parse_tsv("# c\nquick\tAdj\nyesterday\tAdvTime\n\nthey\tPronoun\n", &NormRules::empty())
            .unwrap();
        assert_eq!(d.get("yesterday"), Some(PosTag::AdvTime));
        assert_eq!(d.get("they"), Some(PosTag::Pronoun));
        assert!(PosDictionary::parse_tsv("quick\tFoo\n", &NormRules::empty()).is_err());
        assert!(PosDictionary::parse_tsv("quick\n", &NormRules::empty()).is_err());
    }

    fn tagged(word: &str) -> Token {
        let mut t = tokenize(word);
        pos_tag(&mut t, &PosDictionary::default());
        t.remove(0)
    }

    /// Plain recursive optimal-string-alignment distance.
    fn naive_osa(a: &[char], b: &[char]) -> usize {
        if a.is_empty() {
            return b.len();
        }
        if b.is_empty() {
            return a.len();
        }
        let cost = usize::from(a[a.len() - 1] != b[b.len() - 1]);
        let mut best = (naive_osa(&a[..a.len() - 1], b) + 1)
            .min(naive_osa(a, &b[..b.len() - 1]) + 1)
            .min(naive_osa(&a[..a.len() - 1], &b[..b.len() - 1]) + cost);
        if a.len() > 1 && b.len() > 1 && a[a.len() - 1] == b[b.len() - 2] && a[a.len() - 2] == b[b.len() - 1] {
            best = best.min(naive_osa(&a[..a.len() - 2], &b[..b.len() - 2]) + 1);
        }
        best
    }

    #[test]
    fn misspelling_detection() {
        let dict = SpellDictionary::new(["the", "cat", "sat"].map(String::from)).unwrap();
        let teh: Vec<char> = "teh".chars().collect();
        let the: Vec<char> = "the".chars().collect();
        assert_eq!(naive_osa(&teh, &the), 1);
        assert!(is_misspelled(&tagged("teh"), &dict));
        assert!(!is_misspelled(&tagged("the"), &dict));
        assert!(!is_misspelled(&tagged("xqzvw"), &dict));
        assert!(!is_misspelled(&tagged("56"), &dict));
        assert!(!is_misspelled(&tagged("!"), &dict));
    }

    #[test]
    fn empty_spell_dictionary_is_configuration_error() {
        assert!(matches!(SpellDictionary::new(Vec::<String>::new()), Err(TextError::EmptyDictionary)));
    }

    proptest! {
        #[test]
        fn near_miss_covers_naive_distance(word in "[abc]{1,5}", dict in proptest::collection::vec("[abc]{1,5}", 1..6)) {
            let sd = SpellDictionary::new(dict.clone()).unwrap();
            let w: Vec<char> = word.chars().collect();
            // unrestricted Damerau-Levenshtein never exceeds the OSA distance
            if dict.iter().any(|d| naive_osa(&w, &d.chars().collect::<Vec<_>>()) <= 2) {
                prop_assert!(sd.has_near_miss(&word));
            }
        }

        #[test]
        fn dictionary_words_never_flagged(words in proptest::collection::vec("[a-z]{1,6}", 1..8), pick in 0usize..8) {
            let sd = SpellDictionary::new(words.clone()).unwrap();
            let w = &words[pick % words.len()];
            prop_assert!(!is_misspelled(&tagged(w), &sd));
        }

        #[test]
        fn sentence_tokens_sum_to_document(text in "[a-z!?. ]{1,60}") {
            if let Ok(doc) = TextPipeline::default().process("d", &text) {
                let total: usize = doc.sentences.iter().map(|s| s.tokens.len()).sum();
                prop_assert_eq!(total, doc.token_count());
                prop_assert_eq!(doc.term_count, doc.terms().count());
                for (i, s) in doc.sentences.iter().enumerate() {
                    prop_assert_eq!(s.index, i);
                }
                for stem in &doc.vocab {
                    prop_assert!(doc.terms().any(|t| &t.stem == stem));
                }
            }
        }
    }

    #[test]
    fn pipeline_builds_document() {
        let dict = PosDictionary::new([("panic".to_string(), PosTag::Noun), ("run".to_string(), PosTag::Verb)]);
        let p = TextPipeline::new(NormRules::empty(), vec!["s".into()], dict);
        let doc = p.process("x", "Panics spread! They run, run.").unwrap();
        assert_eq!(doc.sentences.len(), 2);
        assert_eq!(doc.sentences[0].tokens[0].stem, "panic");
        assert_eq!(doc.term_count, 5);
        assert_eq!(doc.vocab.len(), 4);
        assert_eq!(p.phrase_stems("Or else!"), vec!["or", "else"]);
    }
}
