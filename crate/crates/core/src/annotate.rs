//! Document annotators: speech acts, named entities and token sentiment.
//!
//! The defaults are rule- and gazetteer-based. Both sit behind traits so a
//! trained model can replace them; [`ExternalSpeechActs`] pipes documents
//! through a user-supplied executable.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Stdio};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::AnnotateError;
use crate::lexicon::{LexiconId, LexiconSet};
use crate::textprep::{ProcessedDocument, Sentence, TextPipeline, Token};

/// Document-level speech-act flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SaFlags {
    pub threat: bool,
    pub request: bool,
    pub declarative: bool,
    pub quotation: bool,
    pub question: bool,
}

impl SaFlags {
    /// Sets `declarative` when no other act fired.
    pub fn with_fallback(mut self) -> Self {
        if !(self.threat || self.request || self.quotation || self.question) {
            self.declarative = true;
        }
        self
    }
}

pub trait SpeechActClassifier: Send + Sync {
    fn classify(&self, doc: &ProcessedDocument, lex: &LexiconSet) -> Result<SaFlags, AnnotateError>;

    fn classify_batch(&self, docs: &[&ProcessedDocument], lex: &LexiconSet) -> Result<Vec<SaFlags>, AnnotateError> {
        docs.iter().map(|d| self.classify(d, lex)).collect()
    }
}

fn is_question_mark_token(t: &Token) -> bool {
    t.is_punct() && t.surface.chars().all(|c| c == '?' || c == '؟')
}

fn has_quote_pair(text: &str) -> bool {
    let count = |c: char| text.chars().filter(|&x| x == c).count();
    let ordered = |open: char, close: char| text.find(open).zip(text.rfind(close)).is_some_and(|(a, b)| a < b);
    count('"') >= 2 || ordered('«', '»') || ordered('“', '”')
}

#[derive(Debug, Clone, Copy, Default)]
struct SentenceCues {
    question: bool,
    threat: bool,
    request: bool,
    quotation: bool,
}

impl SentenceCues {
    fn any(self) -> bool {
        self.question || self.threat || self.request || self.quotation
    }
}

fn sentence_cues(s: &Sentence, lex: &LexiconSet) -> SentenceCues {
    let ends_with_qm = s.tokens.iter().rev().take_while(|t| t.is_punct()).any(is_question_mark_token);
    let leading_qw = s.terms().next().is_some_and(|t| lex.contains_stem(LexiconId::QuestionWord, &t.stem));
    SentenceCues {
        question: ends_with_qm || leading_qw,
        threat: lex.hits(s, LexiconId::ThreatCue),
        request: lex.hits(s, LexiconId::RequestCue),
        quotation: has_quote_pair(&s.text) || lex.hits(s, LexiconId::QuoteCue),
    }
}

/// Cue-based default classifier.
///
/// A document is a question if a sentence ends in a question mark or opens
/// with a question word; threat, request and quotation fire on their cue
/// lists (quotation also on a pair of quote marks). It is declarative when
/// some sentence carries none of these cues.
#[derive(Debug, Clone, Copy, Default)]
pub struct RuleBasedSpeechActs;

impl SpeechActClassifier for RuleBasedSpeechActs {
    fn classify(&self, doc: &ProcessedDocument, lex: &LexiconSet) -> Result<SaFlags, AnnotateError> {
        Ok(classify_speech_acts(doc, lex))
    }
}

pub fn classify_speech_acts(doc: &ProcessedDocument, lex: &LexiconSet) -> SaFlags {
    let mut flags = SaFlags::default();
    for s in &doc.sentences {
        let cues = sentence_cues(s, lex);
        flags.question |= cues.question;
        flags.threat |= cues.threat;
        flags.request |= cues.request;
        flags.quotation |= cues.quotation;
        flags.declarative |= !cues.any();
    }
    flags.with_fallback()
}

#[derive(Serialize)]
struct ExternalRequest<'a> {
    id: &'a str,
    text: String,
    sentences: Vec<&'a str>,
}

#[derive(Deserialize)]
struct ExternalReply {
    id: String,
    #[serde(flatten)]
    flags: SaFlags,
}

/// Runs an executable once per batch. Each input line is
/// `{"id", "text", "sentences"}`; each output line must be
/// `{"id", "threat", "request", "declarative", "quotation", "question"}`.
#[derive(Debug, Clone)]
pub struct ExternalSpeechActs {
    program: String,
    args: Vec<String>,
}

impl ExternalSpeechActs {
    pub fn new(program: impl Into<String>, args: Vec<String>) -> Self {
        Self { program: program.into(), args }
    }

    fn fail(&self, message: impl Into<String>) -> AnnotateError {
        AnnotateError::External { command: self.program.clone(), message: message.into() }
    }
}

impl SpeechActClassifier for ExternalSpeechActs {
    fn classify(&self, doc: &ProcessedDocument, lex: &LexiconSet) -> Result<SaFlags, AnnotateError> {
        Ok(self.classify_batch(&[doc], lex)?.remove(0))
    }

    fn classify_batch(&self, docs: &[&ProcessedDocument], _lex: &LexiconSet) -> Result<Vec<SaFlags>, AnnotateError> {
        let mut input = String::new();
        for d in docs {
            let sentences: Vec<&str> = d.sentences.iter().map(|s| s.text.as_str()).collect();
            let req = ExternalRequest { id: &d.id, text: sentences.join(" "), sentences };
            input.push_str(&serde_json::to_string(&req).expect("serializable"));
            input.push('\n');
        }
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| self.fail(e.to_string()))?;
        let mut stdin = child.stdin.take().expect("piped stdin");
        // written from another thread so a chatty child cannot fill its stdout pipe and stall
        let writer = std::thread::spawn(move || stdin.write_all(input.as_bytes()));
        let out = child.wait_with_output().map_err(|e| self.fail(e.to_string()))?;
        match writer.join() {
            Ok(Ok(())) => {}
            Ok(Err(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
            Ok(Err(e)) => return Err(self.fail(e.to_string())),
            Err(_) => return Err(self.fail("stdin writer panicked")),
        }
        if !out.status.success() {
            return Err(self.fail(format!("exited with {}", out.status)));
        }
        let stdout = String::from_utf8(out.stdout).map_err(|e| self.fail(e.to_string()))?;
        let mut by_id = HashMap::new();
        for line in stdout.lines().filter(|l| !l.trim().is_empty()) {
            let reply: ExternalReply =
                serde_json::from_str(line).map_err(|e| self.fail(format!("bad reply {line:?}: {e}")))?;
            by_id.insert(reply.id, reply.flags.with_fallback());
        }
        docs.iter()
            .map(|d| by_id.get(&d.id).copied().ok_or_else(|| self.fail(format!("no reply for document {:?}", d.id))))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum EntityKind {
    Person,
    Organization,
    Location,
}

impl FromStr for EntityKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "person" | "per" => Ok(EntityKind::Person),
            "organization" | "organisation" | "org" => Ok(EntityKind::Organization),
            "location" | "loc" => Ok(EntityKind::Location),
            other => Err(format!("unknown entity kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct EntitySpan {
    pub sentence_index: usize,
    /// Token indices `[start, end)` within the sentence.
    pub token_range: (usize, usize),
    pub kind: EntityKind,
}

pub trait EntityRecognizer: Send + Sync {
    fn recognize(&self, doc: &ProcessedDocument) -> Vec<EntitySpan>;
}

/// Multiword names per kind, stored as stem sequences.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    entries: Vec<(Vec<String>, EntityKind)>,
    by_first: HashMap<String, Vec<usize>>,
}

impl Gazetteer {
    pub fn new(names: impl IntoIterator<Item = (String, EntityKind)>, pipeline: &TextPipeline) -> Self {
        let mut g = Self::default();
        for (name, kind) in names {
            let stems = pipeline.phrase_stems(&name);
            if stems.is_empty() || g.entries.iter().any(|(s, _)| *s == stems) {
                continue;
            }
            g.by_first.entry(stems[0].clone()).or_default().push(g.entries.len());
            g.entries.push((stems, kind));
        }
        g
    }

    /// Parses `name<TAB>kind` lines.
    pub fn parse_tsv(text: &str, pipeline: &TextPipeline) -> Result<Self, String> {
        let mut names = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, kind) =
                line.split_once('\t').ok_or_else(|| format!("line {}: expected name<TAB>kind", i + 1))?;
            names.push((name.to_string(), kind.parse().map_err(|e| format!("line {}: {e}", i + 1))?));
        }
        Ok(Self::new(names, pipeline))
    }

    pub fn load(path: &Path, pipeline: &TextPipeline) -> Result<Self, AnnotateError> {
        let text = fs::read_to_string(path)
            .map_err(|e| AnnotateError::Gazetteer { path: path.to_path_buf(), message: e.to_string() })?;
        Self::parse_tsv(&text, pipeline)
            .map_err(|message| AnnotateError::Gazetteer { path: path.to_path_buf(), message })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Longest match over token stems: every occurrence of every name is a
/// candidate, and candidates are accepted longest first, then leftmost,
/// skipping any that overlap an accepted span.
pub fn recognize_entities(doc: &ProcessedDocument, gazetteer: &Gazetteer) -> Vec<EntitySpan> {
    let mut spans = Vec::new();
    if gazetteer.is_empty() {
        return spans;
    }
    for s in &doc.sentences {
        let mut candidates: Vec<(usize, usize, EntityKind)> = Vec::new();
        for start in 0..s.tokens.len() {
            let Some(ids) = gazetteer.by_first.get(&s.tokens[start].stem) else {
                continue;
            };
            for &id in ids {
                let (stems, kind) = &gazetteer.entries[id];
                let end = start + stems.len();
                if end <= s.tokens.len() && s.tokens[start..end].iter().zip(stems).all(|(t, st)| t.stem == *st) {
                    candidates.push((start, end, *kind));
                }
            }
        }
        candidates.sort_by(|a, b| (b.1 - b.0).cmp(&(a.1 - a.0)).then(a.0.cmp(&b.0)));
        let mut taken = vec![false; s.tokens.len()];
        let mut accepted = Vec::new();
        for (start, end, kind) in candidates {
            if taken[start..end].iter().any(|&t| t) {
                continue;
            }
            taken[start..end].iter_mut().for_each(|t| *t = true);
            accepted.push(EntitySpan { sentence_index: s.index, token_range: (start, end), kind });
        }
        accepted.sort();
        spans.extend(accepted);
    }
    spans
}

impl EntityRecognizer for Gazetteer {
    fn recognize(&self, doc: &ProcessedDocument) -> Vec<EntitySpan> {
        recognize_entities(doc, self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sentiment {
    Positive,
    Negative,
    Neutral,
}

pub fn token_sentiment(token: &Token, lex: &LexiconSet) -> Sentiment {
    if lex.contains_stem(LexiconId::PositiveSent, &token.stem) {
        Sentiment::Positive
    } else if lex.contains_stem(LexiconId::NegativeSent, &token.stem) {
        Sentiment::Negative
    } else {
        Sentiment::Neutral
    }
}

/// Annotator output consumed by feature extraction.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Annotations {
    pub speech_acts: SaFlags,
    pub entities: Vec<EntitySpan>,
}
