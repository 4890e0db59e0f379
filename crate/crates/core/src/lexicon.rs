//! Named word lists behind the lexicon-driven features.
//!
//! A lexicon directory holds one `<name>.txt` file per list (one entry per
//! line, multiword entries allowed) and optionally NRC-style `*.tsv` files
//! with `word<TAB>class<TAB>0|1` rows. Entries are normalized and stemmed
//! with the active [`TextPipeline`] before storage, so matching is on stems.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::LexiconError;
use crate::textprep::{word_lines, Sentence, TextPipeline, Token};

macro_rules! lexicon_ids {
    ($($variant:ident => $file:literal,)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum LexiconId {
            $($variant,)*
        }

        impl LexiconId {
            pub const ALL: [LexiconId; 26] = [$(LexiconId::$variant,)*];

            /// File stem of the list inside a lexicon directory.
            pub const fn file_stem(self) -> &'static str {
                match self {
                    $(LexiconId::$variant => $file,)*
                }
            }
        }
    };
}

lexicon_ids! {
    Fear => "fear",
    Surprise => "surprise",
    Disgust => "disgust",
    Sadness => "sadness",
    Anger => "anger",
    Affective => "affective",
    MotionVerb => "motion_verb",
    PositiveSent => "positive_sent",
    NegativeSent => "negative_sent",
    Certainty => "certainty",
    Uncertainty => "uncertainty",
    SensoryVerb => "sensory_verb",
    QuestionWord => "question_word",
    Tentative => "tentative",
    Anticipation => "anticipation",
    ExampleWord => "example_word",
    Conditional => "conditional",
    GeneralTerm => "general_term",
    UnTrust => "un_trust",
    RelativeTime => "relative_time",
    StatWord => "stat_word",
    RequestCue => "request_cue",
    ThreatCue => "threat_cue",
    QuoteCue => "quote_cue",
    NegationPrefix => "negation_prefix",
    PronounTarget => "pronoun_target",
}

impl LexiconId {
    /// Lists whose hits count as emotion-based words.
    pub const EMOTIONS: [LexiconId; 6] = [
        LexiconId::Fear,
        LexiconId::Surprise,
        LexiconId::Disgust,
        LexiconId::Sadness,
        LexiconId::Anger,
        LexiconId::Affective,
    ];

    /// Pairs that may not share entries.
    pub const DISJOINT: [(LexiconId, LexiconId); 2] =
        [(LexiconId::Certainty, LexiconId::Uncertainty), (LexiconId::PositiveSent, LexiconId::NegativeSent)];

    /// Maps an NRC emotion/sentiment class to a list. Classes without a
    /// matching feature (trust, joy) map to `None`.
    pub fn from_nrc_class(class: &str) -> Option<Self> {
        match class.trim().to_ascii_lowercase().as_str() {
            "fear" => Some(LexiconId::Fear),
            "surprise" => Some(LexiconId::Surprise),
            "disgust" => Some(LexiconId::Disgust),
            "sadness" => Some(LexiconId::Sadness),
            "anger" => Some(LexiconId::Anger),
            "anticipation" => Some(LexiconId::Anticipation),
            "positive" => Some(LexiconId::PositiveSent),
            "negative" => Some(LexiconId::NegativeSent),
            _ => None,
        }
    }
}

impl fmt::Display for LexiconId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.file_stem())
    }
}

impl FromStr for LexiconId {
    type Err = LexiconError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LexiconId::ALL
            .into_iter()
            .find(|id| id.file_stem() == s || format!("{id:?}") == s)
            .ok_or_else(|| LexiconError::UnknownId(s.to_string()))
    }
}

/// One word list: single stems, multiword stem sequences, or affixes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    singles: HashSet<String>,
    phrases: Vec<Vec<String>>,
}

impl Lexicon {
    pub fn len(&self) -> usize {
        self.singles.len() + self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.singles.is_empty() && self.phrases.is_empty()
    }

    pub fn contains(&self, stem: &str) -> bool {
        self.singles.contains(stem)
    }

    fn insert(&mut self, mut stems: Vec<String>) {
        match stems.len() {
            0 => {}
            1 => {
                self.singles.insert(stems.remove(0));
            }
            _ => {
                if !self.phrases.contains(&stems) {
                    self.phrases.push(stems);
                }
            }
        }
    }

    /// Whether an entry starts at term position `i`.
    fn matches_at(&self, terms: &[&Token], i: usize) -> bool {
        self.singles.contains(&terms[i].stem)
            || self
                .phrases
                .iter()
                .any(|p| terms.len() - i >= p.len() && p.iter().zip(&terms[i..]).all(|(s, t)| *s == t.stem))
    }

    fn entries(&self) -> BTreeSet<String> {
        self.singles.iter().cloned().chain(self.phrases.iter().map(|p| p.join(" "))).collect()
    }
}

#[derive(Debug, Clone, Default)]
pub struct LexiconSet {
    lists: HashMap<LexiconId, Lexicon>,
    negation_affixes: Vec<String>,
}

impl LexiconSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a set from in-memory lists, e.g. for tests.
    pub fn from_lists<'a>(
        lists: impl IntoIterator<Item = (LexiconId, Vec<&'a str>)>,
        pipeline: &TextPipeline,
    ) -> Result<Self, LexiconError> {
        let mut set = Self::empty();
        for (id, words) in lists {
            for w in words {
                set.add_entry(id, w, pipeline);
            }
        }
        set.check_disjoint()?;
        Ok(set)
    }

    /// Loads every list present in `dir`. Ids in `required` must end up
    /// non-empty; other missing lists are left empty, which zeroes the
    /// features that depend on them.
    pub fn load(dir: &Path, pipeline: &TextPipeline, required: &[LexiconId]) -> Result<Self, LexiconError> {
        if !dir.is_dir() {
            return Err(LexiconError::MissingDirectory(dir.to_path_buf()));
        }
        let mut set = Self::empty();
        for id in LexiconId::ALL {
            let path = dir.join(format!("{}.txt", id.file_stem()));
            if path.is_file() {
                let text = read(&path)?;
                for w in word_lines(&text) {
                    set.add_entry(id, w, pipeline);
                }
            }
        }
        let mut tsvs: Vec<_> = fs::read_dir(dir)
            .map_err(|source| LexiconError::Io { path: dir.to_path_buf(), source })?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "tsv"))
            .collect();
        tsvs.sort();
        for path in tsvs {
            set.load_nrc(&path, pipeline)?;
        }
        for &id in required {
            if set.is_empty(id) {
                return Err(LexiconError::MissingList {
                    id: id.file_stem(),
                    path: dir.join(format!("{}.txt", id.file_stem())),
                });
            }
        }
        set.check_disjoint()?;
        Ok(set)
    }

    fn load_nrc(&mut self, path: &Path, pipeline: &TextPipeline) -> Result<(), LexiconError> {
        let text = read(path)?;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let [word, class, flag] = cols[..] else {
                return Err(LexiconError::Format {
                    path: path.to_path_buf(),
                    message: format!("line {}: expected word<TAB>class<TAB>0|1", i + 1),
                });
            };
            let on = match flag.trim() {
                "1" => true,
                "0" => false,
                other => {
                    return Err(LexiconError::Format {
                        path: path.to_path_buf(),
                        message: format!("line {}: association must be 0 or 1, found {other:?}", i + 1),
                    })
                }
            };
            if let (true, Some(id)) = (on, LexiconId::from_nrc_class(class)) {
                self.add_entry(id, word, pipeline);
            }
        }
        Ok(())
    }

    pub fn add_entry(&mut self, id: LexiconId, entry: &str, pipeline: &TextPipeline) {
        if id == LexiconId::NegationPrefix {
            let affix = pipeline.fold(entry);
            if !affix.is_empty() && !self.negation_affixes.contains(&affix) {
                self.negation_affixes.push(affix);
            }
            return;
        }
        self.lists.entry(id).or_default().insert(pipeline.phrase_stems(entry));
    }

    fn check_disjoint(&self) -> Result<(), LexiconError> {
        for (a, b) in LexiconId::DISJOINT {
            let (Some(la), Some(lb)) = (self.lists.get(&a), self.lists.get(&b)) else {
                continue;
            };
            let shared: Vec<String> = la.entries().intersection(&lb.entries()).cloned().collect();
            if !shared.is_empty() {
                return Err(LexiconError::Overlap { first: a.file_stem(), second: b.file_stem(), words: shared });
            }
        }
        Ok(())
    }

    pub fn get(&self, id: LexiconId) -> Option<&Lexicon> {
        self.lists.get(&id)
    }

    pub fn len(&self, id: LexiconId) -> usize {
        if id == LexiconId::NegationPrefix {
            self.negation_affixes.len()
        } else {
            self.lists.get(&id).map_or(0, Lexicon::len)
        }
    }

    pub fn is_empty(&self, id: LexiconId) -> bool {
        self.len(id) == 0
    }

    pub fn contains_stem(&self, id: LexiconId, stem: &str) -> bool {
        self.lists.get(&id).is_some_and(|l| l.contains(stem))
    }

    /// Single-word stems across all lists, used to seed the stemmer.
    pub fn all_stems(&self) -> impl Iterator<Item = &str> {
        self.lists.values().flat_map(|l| l.singles.iter().map(String::as_str))
    }

    fn token_has_negation(&self, t: &Token) -> bool {
        !t.is_punct() && self.negation_affixes.iter().any(|a| t.normalized.starts_with(a.as_str()))
    }

    /// Number of term positions in `tokens` where an entry of `id` starts.
    pub fn count_hits(&self, tokens: &[Token], id: LexiconId) -> usize {
        if id == LexiconId::NegationPrefix {
            return tokens.iter().filter(|t| self.token_has_negation(t)).count();
        }
        let Some(list) = self.lists.get(&id).filter(|l| !l.is_empty()) else {
            return 0;
        };
        let terms: Vec<&Token> = tokens.iter().filter(|t| !t.is_punct()).collect();
        (0..terms.len()).filter(|&i| list.matches_at(&terms, i)).count()
    }

    /// Whether any entry of `id` occurs in the sentence. For negation
    /// prefixes, whether any token starts with a listed affix.
    pub fn hits(&self, sentence: &Sentence, id: LexiconId) -> bool {
        if id == LexiconId::NegationPrefix {
            return sentence.tokens.iter().any(|t| self.token_has_negation(t));
        }
        let Some(list) = self.lists.get(&id).filter(|l| !l.is_empty()) else {
            return false;
        };
        let terms: Vec<&Token> = sentence.terms().collect();
        (0..terms.len()).any(|i| list.matches_at(&terms, i))
    }

    pub fn hits_any(&self, sentence: &Sentence, ids: &[LexiconId]) -> bool {
        ids.iter().any(|&id| self.hits(sentence, id))
    }
}

fn read(path: &Path) -> Result<String, LexiconError> {
    fs::read_to_string(path).map_err(|source| LexiconError::Io { path: path.to_path_buf(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textprep::{NormRules, PosDictionary};
    use proptest::prelude::*;

    fn pipeline() -> TextPipeline {
        TextPipeline::new(
            NormRules::empty(),
            vec!["s".into(), "ed".into()],
            PosDictionary::new([("panic".to_string(), crate::textprep::PosTag::Noun)]),
        )
    }

    fn sentence(p: &TextPipeline, text: &str) -> Sentence {
        p.process("s", text).unwrap().sentences.remove(0)
    }

    #[test]
    fn loads_word_files_with_stem_dedup() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("fear.txt"), "panic\npanics\nterror\n").unwrap();
        let set = LexiconSet::load(dir.path(), &pipeline(), &[]).unwrap();
        assert_eq!(set.len(LexiconId::Fear), 2);
        assert!(set.contains_stem(LexiconId::Fear, "panic"));
        assert!(set.is_empty(LexiconId::Anger));
    }

    #[test]
    fn overlapping_certainty_lists_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("certainty.txt"), "surely\nmaybe\n").unwrap();
        fs::write(dir.path().join("uncertainty.txt"), "maybe\nperhaps\n").unwrap();
        match LexiconSet::load(dir.path(), &pipeline(), &[]) {
            Err(e @ LexiconError::Overlap { .. }) => assert!(e.to_string().contains("maybe")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nrc_rows_map_to_lists() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("nrc.tsv"), "panic\tfear\t1\nugly\tnegative\t1\ncalm\tfear\t0\nhappy\tjoy\t1\n")
            .unwrap();
        let set = LexiconSet::load(dir.path(), &pipeline(), &[]).unwrap();
        assert!(set.contains_stem(LexiconId::Fear, "panic"));
        assert!(!set.contains_stem(LexiconId::Fear, "calm"));
        assert!(set.contains_stem(LexiconId::NegativeSent, "ugly"));
    }

    #[test]
    fn malformed_nrc_row_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("nrc.tsv"), "panic\tfear\n").unwrap();
        assert!(matches!(LexiconSet::load(dir.path(), &pipeline(), &[]), Err(LexiconError::Format { .. })));
    }

    #[test]
    fn missing_required_list_and_directory() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            LexiconSet::load(dir.path(), &pipeline(), &[LexiconId::Fear]),
            Err(LexiconError::MissingList { id: "fear", .. })
        ));
        assert!(matches!(
            LexiconSet::load(&dir.path().join("nope"), &pipeline(), &[]),
            Err(LexiconError::MissingDirectory(_))
        ));
    }

    #[test]
    fn hits_on_stems_and_phrases() {
        let p = pipeline();
        let set =
            LexiconSet::from_lists([(LexiconId::Fear, vec!["panic"]), (LexiconId::ThreatCue, vec!["or else"])], &p)
                .unwrap();
        assert!(set.hits(&sentence(&p, "Total panic here"), LexiconId::Fear));
        assert!(set.hits(&sentence(&p, "Panics everywhere"), LexiconId::Fear));
        assert!(!set.hits(&sentence(&p, "All calm"), LexiconId::Fear));
        assert!(set.hits(&sentence(&p, "Forward this now or else."), LexiconId::ThreatCue));
        assert!(!set.hits(&sentence(&p, "else or"), LexiconId::ThreatCue));
        assert!(!set.hits(&sentence(&p, "panic"), LexiconId::Anger));
    }

    #[test]
    fn negation_is_prefix_based() {
        let p = pipeline();
        let set = LexiconSet::from_lists([(LexiconId::NegationPrefix, vec!["un", "in"])], &p).unwrap();
        assert!(set.hits(&sentence(&p, "so unhappy"), LexiconId::NegationPrefix));
        assert!(!set.hits(&sentence(&p, "so happy"), LexiconId::NegationPrefix));
        assert_eq!(set.len(LexiconId::NegationPrefix), 2);
    }

    #[test]
    fn counts_occurrences() {
        let p = pipeline();
        let set = LexiconSet::from_lists([(LexiconId::Certainty, vec!["surely", "no doubt"])], &p).unwrap();
        let s = sentence(&p, "surely, no doubt, surely");
        assert_eq!(set.count_hits(&s.tokens, LexiconId::Certainty), 3);
    }

    #[test]
    fn unknown_id_string() {
        assert!(matches!("feer".parse::<LexiconId>(), Err(LexiconError::UnknownId(_))));
        assert_eq!("motion_verb".parse::<LexiconId>().unwrap(), LexiconId::MotionVerb);
    }

    proptest! {
        #[test]
        fn hits_are_monotone(words in proptest::collection::vec("[a-d]{1,3}", 1..5),
                             extra in proptest::collection::vec("[a-d]{1,3}", 0..5),
                             text in "[a-d ]{1,30}") {
            let p = TextPipeline::default();
            let Ok(doc) = p.process("d", &text) else { return Ok(()); };
            let small = LexiconSet::from_lists([(LexiconId::Fear, words.iter().map(String::as_str).collect())], &p).unwrap();
            let big = LexiconSet::from_lists(
                [(LexiconId::Fear, words.iter().chain(&extra).map(String::as_str).collect())], &p).unwrap();
            for s in &doc.sentences {
                if small.hits(s, LexiconId::Fear) {
                    prop_assert!(big.hits(s, LexiconId::Fear));
                }
            }
        }
    }
}
