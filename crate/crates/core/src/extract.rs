//! Resource bundles and corpus-to-matrix extraction.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use crate::annotate::{
    recognize_entities, Annotations, ExternalSpeechActs, Gazetteer, RuleBasedSpeechActs, SpeechActClassifier,
};
use crate::corpus::{Corpus, MatrixRowOf};
use crate::error::{Error, FeatureError, TextError};
use crate::features::{extract_all, DegreeSuffixes, FeatureContext, FeatureVectorOf};
use crate::lexicon::{LexiconId, LexiconSet};
use crate::scalar::Scalar;
use crate::textprep::{load_word_list, NormRules, PosDictionary, ProcessedDocument, SpellDictionary, TextPipeline};

/// Everything feature extraction reads.
pub struct Resources {
    pub text: TextPipeline,
    pub lexicons: LexiconSet,
    pub gazetteer: Gazetteer,
    pub spell: Option<SpellDictionary>,
    pub degrees: DegreeSuffixes,
    pub speech_acts: Box<dyn SpeechActClassifier>,
}

impl std::fmt::Debug for Resources {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Resources")
            .field("gazetteer_names", &self.gazetteer.len())
            .field("spell", &self.spell.is_some())
            .finish_non_exhaustive()
    }
}

/// File locations of a resource bundle. Every path is optional except the
/// lexicon directory; absent resources leave their features at 0.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResourcePaths {
    pub lexicon_dir: PathBuf,
    pub rules: Option<PathBuf>,
    pub suffixes: Option<PathBuf>,
    pub pos_dict: Option<PathBuf>,
    pub spell_dict: Option<PathBuf>,
    pub gazetteer: Option<PathBuf>,
    pub degree_suffixes: Option<PathBuf>,
    /// Lists that must exist and be non-empty.
    pub required_lexicons: Vec<String>,
    /// External speech-act command and arguments; rule-based when empty.
    pub speech_act_command: Vec<String>,
}

impl ResourcePaths {
    /// Resolves relative paths against `base`.
    pub fn relative_to(mut self, base: &Path) -> Self {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.lexicon_dir);
        for p in [
            &mut self.rules,
            &mut self.suffixes,
            &mut self.pos_dict,
            &mut self.spell_dict,
            &mut self.gazetteer,
            &mut self.degree_suffixes,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
        self
    }
}

mod demo {
    pub const RULES: &str = include_str!("../data/demo/rules.json");
    pub const SUFFIXES: &str = include_str!("../data/demo/suffixes.txt");
    pub const POS: &str = include_str!("../data/demo/pos.tsv");
    pub const SPELLING: &str = include_str!("../data/demo/spelling.txt");
    pub const GAZETTEER: &str = include_str!("../data/demo/gazetteer.tsv");
    pub const DEGREES: &str = include_str!("../data/demo/degrees.json");

    macro_rules! lists {
        ($($name:literal),* $(,)?) => {
            pub const LEXICONS: &[(&str, &str)] = &[
                $(($name, include_str!(concat!("../data/demo/lexicons/", $name, ".txt"))),)*
            ];
        };
    }

    lists!(
        "fear",
        "surprise",
        "disgust",
        "sadness",
        "anger",
        "affective",
        "motion_verb",
        "positive_sent",
        "negative_sent",
        "certainty",
        "uncertainty",
        "sensory_verb",
        "question_word",
        "tentative",
        "anticipation",
        "example_word",
        "conditional",
        "general_term",
        "un_trust",
        "relative_time",
        "stat_word",
        "request_cue",
        "threat_cue",
        "quote_cue",
        "negation_prefix",
        "pronoun_target",
    );
}

/// Raw entries of the built-in English demo lexicons.
pub fn demo_lexicon_entries() -> Vec<(LexiconId, Vec<&'static str>)> {
    demo::LEXICONS
        .iter()
        .map(|(name, text)| (name.parse().expect("demo list name"), crate::textprep::word_lines(text).collect()))
        .collect()
}

fn finish(
    rules: NormRules,
    suffixes: Vec<String>,
    pos: PosDictionary,
    build_lex: impl FnOnce(&TextPipeline) -> Result<LexiconSet, Error>,
) -> Result<(TextPipeline, LexiconSet), Error> {
    let mut text = TextPipeline::new(rules, suffixes, pos);
    let lexicons = build_lex(&text)?;
    text.stemmer.add_known(lexicons.all_stems().map(str::to_string));
    Ok((text, lexicons))
}

impl Resources {
    /// The built-in English demo bundle with rule-based speech acts.
    pub fn demo() -> Self {
        let rules = NormRules::from_json(demo::RULES).expect("demo rules");
        let suffixes = crate::textprep::word_lines(demo::SUFFIXES).map(str::to_string).collect();
        let pos = PosDictionary::parse_tsv(demo::POS, &rules).expect("demo POS dictionary");
        let (text, lexicons) = finish(rules, suffixes, pos, |p| Ok(LexiconSet::from_lists(demo_lexicon_entries(), p)?))
            .expect("demo lexicons");
        let words = crate::textprep::word_lines(demo::SPELLING).map(|w| text.fold(w));
        let spell = SpellDictionary::new(words).expect("demo spelling list");
        let gazetteer = Gazetteer::parse_tsv(demo::GAZETTEER, &text).expect("demo gazetteer");
        let degrees = serde_json::from_str(demo::DEGREES).expect("demo degree suffixes");
        Self { text, lexicons, gazetteer, spell: Some(spell), degrees, speech_acts: Box::new(RuleBasedSpeechActs) }
    }

    pub fn load(paths: &ResourcePaths) -> Result<Self, Error> {
        let rules = match &paths.rules {
            Some(p) => NormRules::load(p)?,
            None => NormRules::empty(),
        };
        let suffixes = match &paths.suffixes {
            Some(p) => load_word_list(p)?,
            None => Vec::new(),
        };
        let pos = match &paths.pos_dict {
            Some(p) => PosDictionary::load(p, &rules)?,
            None => PosDictionary::default(),
        };
        let required: Vec<LexiconId> = paths.required_lexicons.iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
        let (text, lexicons) =
            finish(rules, suffixes, pos, |p| Ok(LexiconSet::load(&paths.lexicon_dir, p, &required)?))?;
        let spell = match &paths.spell_dict {
            Some(p) => Some(SpellDictionary::load(p, &text.rules)?),
            None => None,
        };
        let gazetteer = match &paths.gazetteer {
            Some(p) => Gazetteer::load(p, &text)?,
            None => Gazetteer::default(),
        };
        let degrees = match &paths.degree_suffixes {
            Some(p) => {
                let raw = crate::textprep::read_resource(p)?;
                serde_json::from_str(&raw)
                    .map_err(|e| TextError::Resource { path: p.clone(), message: e.to_string() })?
            }
            None => DegreeSuffixes::default(),
        };
        let speech_acts: Box<dyn SpeechActClassifier> = match paths.speech_act_command.split_first() {
            Some((prog, args)) => Box::new(ExternalSpeechActs::new(prog.clone(), args.to_vec())),
            None => Box::new(RuleBasedSpeechActs),
        };
        Ok(Self { text, lexicons, gazetteer, spell, degrees, speech_acts })
    }

    fn context<'a>(&'a self, annotations: &'a Annotations) -> FeatureContext<'a> {
        FeatureContext {
            lexicons: &self.lexicons,
            pos_dict: &self.text.pos_dict,
            degrees: &self.degrees,
            spell: self.spell.as_ref(),
            annotations,
        }
    }

    /// Features of one already processed document.
    pub fn features<T: Scalar>(&self, doc: &ProcessedDocument) -> Result<FeatureVectorOf<T>, Error> {
        let speech_acts = self.speech_acts.classify(doc, &self.lexicons)?;
        let ann = Annotations { speech_acts, entities: recognize_entities(doc, &self.gazetteer) };
        Ok(extract_all(doc, &self.context(&ann))?)
    }

    /// Processes and featurizes one raw text.
    pub fn extract_text<T: Scalar>(&self, id: &str, text: &str) -> Result<FeatureVectorOf<T>, Error> {
        self.features(&self.text.process(id, text)?)
    }
}

/// A document that produced no feature row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reject {
    pub id: String,
    pub reason: String,
}

/// Featurizes a corpus in parallel, preserving document order. Documents
/// that are empty after preprocessing or contain no terms are rejected;
/// resource failures abort.
pub fn extract_matrix<T: Scalar>(
    corpus: &Corpus,
    res: &Resources,
) -> Result<(Vec<MatrixRowOf<T>>, Vec<Reject>), Error> {
    let processed: Vec<Result<ProcessedDocument, TextError>> =
        corpus.records().par_iter().map(|r| res.text.process(&r.id, &r.text)).collect();
    let mut rejects = Vec::new();
    let mut docs = Vec::new();
    for (rec, p) in corpus.records().iter().zip(processed) {
        match p {
            Ok(d) if d.term_count > 0 => docs.push((rec, d)),
            Ok(_) => rejects.push(Reject { id: rec.id.clone(), reason: FeatureError::NoTerms.to_string() }),
            Err(TextError::EmptyDocument) => {
                rejects.push(Reject { id: rec.id.clone(), reason: TextError::EmptyDocument.to_string() })
            }
            Err(e) => return Err(e.into()),
        }
    }
    let refs: Vec<&ProcessedDocument> = docs.iter().map(|(_, d)| d).collect();
    let acts = res.speech_acts.classify_batch(&refs, &res.lexicons)?;
    let rows: Vec<Result<MatrixRowOf<T>, Error>> = docs
        .par_iter()
        .zip(acts.par_iter())
        .map(|((rec, doc), sa)| {
            let ann = Annotations { speech_acts: *sa, entities: recognize_entities(doc, &res.gazetteer) };
            let features = extract_all(doc, &res.context(&ann))?;
            Ok(MatrixRowOf { id: rec.id.clone(), features, label: rec.label })
        })
        .collect();
    Ok((rows.into_iter().collect::<Result<_, _>>()?, rejects))
}
