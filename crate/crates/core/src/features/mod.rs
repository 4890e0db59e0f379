//! Content feature extraction.
//!
//! Most features are sentence ratios: the fraction of a document's
//! sentences for which a predicate holds. The rest are document-level
//! token ratios ([`emotiveness`], [`sentiment_scores`], [`certainty_scores`],
//! [`lexical_diversity`], [`spelling_mistake_ratio`]), boundary flags and the
//! speech-act booleans.

mod id;

pub use id::{FeatureGroup, FeatureId, FeatureVectorOf, FEATURE_COUNT};

use serde::Deserialize;

use crate::annotate::{token_sentiment, Annotations, Sentiment};
use crate::error::FeatureError;
use crate::lexicon::{LexiconId, LexiconSet};
use crate::scalar::Scalar;
use crate::textprep::{
    is_misspelled, is_number, PosDictionary, PosTag, ProcessedDocument, Sentence, SpellDictionary, Token,
};

/// Minimum run of one repeated character that counts as elongation.
pub const CHAR_RUN_THRESHOLD: usize = 3;

/// Suffixes marking superlative, comparative and ordinal adjectives.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(default)]
pub struct DegreeSuffixes {
    pub superlative: Vec<String>,
    pub comparative: Vec<String>,
    pub ordinal: Vec<String>,
}

impl Default for DegreeSuffixes {
    /// Persian suffixes plus a small English set.
    fn default() -> Self {
        let v = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        Self {
            superlative: v(&["ترین", "مین", "est"]),
            comparative: v(&["تر", "er"]),
            ordinal: v(&["ام", "م", "th", "st", "nd", "rd"]),
        }
    }
}

impl DegreeSuffixes {
    pub fn none() -> Self {
        Self { superlative: vec![], comparative: vec![], ordinal: vec![] }
    }
}

/// Read-only inputs shared by every feature of one document.
#[derive(Debug, Clone, Copy)]
pub struct FeatureContext<'a> {
    pub lexicons: &'a LexiconSet,
    pub pos_dict: &'a PosDictionary,
    pub degrees: &'a DegreeSuffixes,
    /// Without a dictionary the spelling-mistake feature is 0.
    pub spell: Option<&'a SpellDictionary>,
    pub annotations: &'a Annotations,
}

#[derive(Clone, Copy, PartialEq)]
enum DegreeBase {
    Adjective,
    AdjectiveOrNumber,
    Number,
}

fn degree_match(t: &Token, suffixes: &[String], base_kind: DegreeBase, dict: &PosDictionary) -> bool {
    if !t.pos.is_lexical() {
        return false;
    }
    suffixes.iter().any(|s| {
        if t.normalized.len() <= s.len() || !t.normalized.ends_with(s.as_str()) {
            return false;
        }
        let base = &t.normalized[..t.normalized.len() - s.len()];
        let adj = t.pos == PosTag::Adj || dict.get(base) == Some(PosTag::Adj);
        let num = is_number(base) || dict.get(base) == Some(PosTag::Number);
        match base_kind {
            DegreeBase::Adjective => adj,
            DegreeBase::AdjectiveOrNumber => adj || num,
            DegreeBase::Number => num,
        }
    })
}

fn is_mark_run(t: &Token, marks: &[char]) -> bool {
    t.is_punct() && t.surface.chars().all(|c| marks.contains(&c))
}

/// Whether some word token repeats one character at least
/// [`CHAR_RUN_THRESHOLD`] times in a row.
pub fn has_char_run(word: &str) -> bool {
    let mut run = 0;
    let mut prev = None;
    for c in word.chars() {
        run = if Some(c) == prev { run + 1 } else { 1 };
        if run >= CHAR_RUN_THRESHOLD {
            return true;
        }
        prev = Some(c);
    }
    false
}

fn ratio_lexicon(id: FeatureId) -> Option<LexiconId> {
    use FeatureId as F;
    use LexiconId as L;
    Some(match id {
        F::Fr => L::Fear,
        F::Su => L::Surprise,
        F::Dsg => L::Disgust,
        F::Sad => L::Sadness,
        F::An => L::Anger,
        F::Aff => L::Affective,
        F::MV => L::MotionVerb,
        F::SV => L::SensoryVerb,
        F::QW => L::QuestionWord,
        F::Tntv => L::Tentative,
        F::Neg => L::NegationPrefix,
        F::Antcpnt => L::Anticipation,
        F::AdvExm => L::ExampleWord,
        F::If => L::Conditional,
        F::GT => L::GeneralTerm,
        F::UT => L::UnTrust,
        _ => return None,
    })
}

/// Evaluates the per-sentence predicate behind a sentence-ratio feature.
pub fn sentence_predicate(s: &Sentence, id: FeatureId, ctx: &FeatureContext<'_>) -> Result<bool, FeatureError> {
    use FeatureId as F;
    if let Some(lex) = ratio_lexicon(id) {
        return Ok(ctx.lexicons.hits(s, lex));
    }
    let toks = &s.tokens;
    let held = match id {
        F::CW => toks.windows(2).any(|w| !w[0].is_punct() && !w[1].is_punct() && w[0].stem == w[1].stem),
        F::CC => toks.iter().any(|t| t.pos.is_lexical() && has_char_run(&t.normalized)),
        F::AdjSup => {
            toks.iter().any(|t| degree_match(t, &ctx.degrees.superlative, DegreeBase::AdjectiveOrNumber, ctx.pos_dict))
        }
        F::AdjCmp => {
            toks.iter().any(|t| degree_match(t, &ctx.degrees.comparative, DegreeBase::Adjective, ctx.pos_dict))
        }
        F::AdjOrd => toks.iter().any(|t| degree_match(t, &ctx.degrees.ordinal, DegreeBase::Number, ctx.pos_dict)),
        F::RT => toks.iter().any(|t| t.pos == PosTag::AdvTime) || ctx.lexicons.hits(s, LexiconId::RelativeTime),
        F::SI => toks.iter().any(|t| t.pos == PosTag::Number) || ctx.lexicons.hits(s, LexiconId::StatWord),
        F::NE => ctx.annotations.entities.iter().any(|e| e.sentence_index == s.index),
        F::QM => toks.iter().any(|t| is_mark_run(t, &['?', '؟'])),
        F::EM => toks.iter().any(|t| is_mark_run(t, &['!'])),
        F::Pro => toks
            .iter()
            .any(|t| t.pos == PosTag::Pronoun && ctx.lexicons.contains_stem(LexiconId::PronounTarget, &t.stem)),
        other => return Err(FeatureError::NotRatioFeature(other.abbr())),
    };
    Ok(held)
}

/// Fraction of sentences satisfying the predicate of `id`.
pub fn sentence_ratio<T: Scalar>(
    doc: &ProcessedDocument,
    id: FeatureId,
    ctx: &FeatureContext<'_>,
) -> Result<T, FeatureError> {
    if !id.is_sentence_ratio() {
        return Err(FeatureError::NotRatioFeature(id.abbr()));
    }
    if doc.sentences.is_empty() {
        return Err(FeatureError::NoSentences);
    }
    let mut held = 0;
    for s in &doc.sentences {
        if sentence_predicate(s, id, ctx)? {
            held += 1;
        }
    }
    Ok(T::ratio(held, doc.sentences.len()))
}

/// (adjectives + adverbs) / (nouns + verbs), clamped to `[0, 1]`; 0 when the
/// document has no nouns or verbs. Time adverbs count as adverbs.
pub fn emotiveness<T: Scalar>(doc: &ProcessedDocument) -> T {
    let count = |tags: &[PosTag]| doc.tokens().filter(|t| tags.contains(&t.pos)).count();
    let modifiers = count(&[PosTag::Adj, PosTag::Adv, PosTag::AdvTime]);
    let heads = count(&[PosTag::Noun, PosTag::Verb]);
    T::ratio(modifiers, heads).clamp_unit()
}

/// Shares of positive and negative tokens among all sentiment tokens.
pub fn sentiment_scores<T: Scalar>(doc: &ProcessedDocument, lex: &LexiconSet) -> (T, T) {
    let (mut pos, mut neg) = (0, 0);
    for t in doc.terms() {
        match token_sentiment(t, lex) {
            Sentiment::Positive => pos += 1,
            Sentiment::Negative => neg += 1,
            Sentiment::Neutral => {}
        }
    }
    (T::ratio(pos, pos + neg), T::ratio(neg, pos + neg))
}

/// Shares of certainty and uncertainty hits among all such hits.
pub fn certainty_scores<T: Scalar>(doc: &ProcessedDocument, lex: &LexiconSet) -> (T, T) {
    let count = |id| doc.sentences.iter().map(|s| lex.count_hits(&s.tokens, id)).sum::<usize>();
    let cer = count(LexiconId::Certainty);
    let ucer = count(LexiconId::Uncertainty);
    (T::ratio(cer, cer + ucer), T::ratio(ucer, cer + ucer))
}

/// Distinct stems over term count.
pub fn lexical_diversity<T: Scalar>(doc: &ProcessedDocument) -> Result<T, FeatureError> {
    if doc.term_count == 0 {
        return Err(FeatureError::NoTerms);
    }
    Ok(T::ratio(doc.vocab.len(), doc.term_count))
}

pub fn spelling_mistake_ratio<T: Scalar>(doc: &ProcessedDocument, dict: &SpellDictionary) -> Result<T, FeatureError> {
    if doc.term_count == 0 {
        return Err(FeatureError::NoTerms);
    }
    let wrong = doc.terms().filter(|t| is_misspelled(t, dict)).count();
    Ok(T::ratio(wrong, doc.term_count))
}

/// Start flag: first sentence has an emotion word. End flag: last sentence
/// has an emotion word or a request cue.
pub fn boundary_flags<T: Scalar>(doc: &ProcessedDocument, lex: &LexiconSet) -> (T, T) {
    let flag = |b: bool| if b { T::one() } else { T::zero() };
    let (Some(first), Some(last)) = (doc.sentences.first(), doc.sentences.last()) else {
        return (T::zero(), T::zero());
    };
    let strt = lex.hits_any(first, &LexiconId::EMOTIONS);
    let end = lex.hits_any(last, &LexiconId::EMOTIONS) || lex.hits(last, LexiconId::RequestCue);
    (flag(strt), flag(end))
}

/// Computes all 41 features.
pub fn extract_all<T: Scalar>(
    doc: &ProcessedDocument,
    ctx: &FeatureContext<'_>,
) -> Result<FeatureVectorOf<T>, FeatureError> {
    if doc.sentences.is_empty() {
        return Err(FeatureError::NoSentences);
    }
    let mut fv = FeatureVectorOf::zeros();
    for id in FeatureId::ALL.into_iter().filter(|f| f.is_sentence_ratio()) {
        fv[id] = sentence_ratio(doc, id, ctx)?;
    }
    let flag = |b: bool| if b { T::one() } else { T::zero() };
    let sa = ctx.annotations.speech_acts;
    fv[FeatureId::ETag] = emotiveness(doc);
    (fv[FeatureId::PS], fv[FeatureId::NS]) = sentiment_scores(doc, ctx.lexicons);
    (fv[FeatureId::Cer], fv[FeatureId::Ucer]) = certainty_scores(doc, ctx.lexicons);
    (fv[FeatureId::Strt], fv[FeatureId::End]) = boundary_flags(doc, ctx.lexicons);
    fv[FeatureId::LD] = lexical_diversity(doc)?;
    fv[FeatureId::SM] = match ctx.spell {
        Some(dict) => spelling_mistake_ratio(doc, dict)?,
        None => T::zero(),
    };
    fv[FeatureId::SaThrt] = flag(sa.threat);
    fv[FeatureId::SaReq] = flag(sa.request);
    fv[FeatureId::SaDec] = flag(sa.declarative);
    fv[FeatureId::SaQuot] = flag(sa.quotation);
    fv[FeatureId::SaQues] = flag(sa.question);
    Ok(fv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotate::{classify_speech_acts, recognize_entities, Gazetteer};
    use crate::textprep::{NormRules, TextPipeline};
    use proptest::prelude::*;

    struct Fixture {
        pipeline: TextPipeline,
        lex: LexiconSet,
        degrees: DegreeSuffixes,
        spell: SpellDictionary,
    }

    impl Fixture {
        fn new() -> Self {
            let pos = PosDictionary::new(
                [
                    ("good", PosTag::Adj),
                    ("big", PosTag::Adj),
                    ("bigger", PosTag::Adj),
                    ("very", PosTag::Adv),
                    ("dog", PosTag::Noun),
                    ("cat", PosTag::Noun),
                    ("runs", PosTag::Verb),
                    ("they", PosTag::Pronoun),
                    ("i", PosTag::Pronoun),
                    ("today", PosTag::AdvTime),
                ]
                .map(|(w, t)| (w.to_string(), t)),
            );
            let pipeline = TextPipeline::new(NormRules::empty(), vec![], pos);
            let lex = LexiconSet::from_lists(
                [
                    (LexiconId::Fear, vec!["panic", "terror"]),
                    (LexiconId::Anger, vec!["rage"]),
                    (LexiconId::PositiveSent, vec!["good", "nice", "great"]),
                    (LexiconId::NegativeSent, vec!["bad", "ugly"]),
                    (LexiconId::Certainty, vec!["surely", "definitely"]),
                    (LexiconId::Uncertainty, vec!["maybe", "perhaps"]),
                    (LexiconId::RequestCue, vec!["please"]),
                    (LexiconId::PronounTarget, vec!["they", "we"]),
                    (LexiconId::StatWord, vec!["some"]),
                ],
                &pipeline,
            )
            .unwrap();
            let spell = SpellDictionary::new(
                ["the", "dog", "cat", "runs", "big", "good", "panic", "now", "a", "is"].map(String::from),
            )
            .unwrap();
            Self { pipeline, lex, degrees: DegreeSuffixes::default(), spell }
        }

        fn doc(&self, text: &str) -> ProcessedDocument {
            self.pipeline.process("t", text).unwrap()
        }

        fn features(&self, text: &str) -> FeatureVectorOf<f64> {
            let doc = self.doc(text);
            let ann = Annotations { speech_acts: classify_speech_acts(&doc, &self.lex), entities: vec![] };
            let ctx = self.ctx(&ann);
            extract_all(&doc, &ctx).unwrap()
        }

        fn ctx<'a>(&'a self, ann: &'a Annotations) -> FeatureContext<'a> {
            FeatureContext {
                lexicons: &self.lex,
                pos_dict: &self.pipeline.pos_dict,
                degrees: &self.degrees,
                spell: Some(&self.spell),
                annotations: ann,
            }
        }
    }

    #[test]
    fn fear_ratio_counts_sentences() {
        let f = Fixture::new().features("Panic at dawn. All calm. Terror strikes. Nothing else.");
        assert_eq!(f[FeatureId::Fr], 0.5);
        let f = Fixture::new().features("Nothing here. Or there.");
        assert_eq!(f[FeatureId::Fr], 0.0);
    }

    #[test]
    fn consecutive_words() {
        let fx = Fixture::new();
        assert_eq!(fx.features("Attention Attention now")[FeatureId::CW], 1.0);
        assert_eq!(fx.features("Attention, Attention now")[FeatureId::CW], 0.0);
    }

    #[test]
    fn consecutive_characters() {
        let fx = Fixture::new();
        assert_eq!(fx.features("helllllloooo friend!")[FeatureId::CC], 1.0);
        assert_eq!(fx.features("hello friend!!!")[FeatureId::CC], 0.0);
        assert_eq!(fx.features("worth 1000 coins")[FeatureId::CC], 0.0);
    }

    #[test]
    fn punctuation_ratios() {
        let f = Fixture::new().features("What????? Yes! Fine.");
        assert!((f[FeatureId::QM] - 1.0 / 3.0).abs() < 1e-15);
        assert!((f[FeatureId::EM] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn emotiveness_examples() {
        let fx = Fixture::new();
        // 2 Adj, 1 Adv vs 2 Noun, 1 Verb
        assert_eq!(emotiveness::<f64>(&fx.doc("good big very dog cat runs")), 1.0);
        assert_eq!(emotiveness::<f64>(&fx.doc("dog runs")), 0.0);
        assert_eq!(emotiveness::<f64>(&fx.doc("good good big")), 0.0);
        // raw ratio 3 is clamped
        assert_eq!(emotiveness::<f64>(&fx.doc("good big very dog")), 1.0);
    }

    #[test]
    fn sentiment_examples() {
        let fx = Fixture::new();
        assert_eq!(sentiment_scores::<f64>(&fx.doc("good nice great but bad"), &fx.lex), (0.75, 0.25));
        assert_eq!(sentiment_scores::<f64>(&fx.doc("plain words"), &fx.lex), (0.0, 0.0));
        assert_eq!(sentiment_scores::<f64>(&fx.doc("bad ugly"), &fx.lex), (0.0, 1.0));
    }

    #[test]
    fn certainty_examples() {
        let fx = Fixture::new();
        assert_eq!(certainty_scores::<f64>(&fx.doc("surely maybe. definitely perhaps"), &fx.lex), (0.5, 0.5));
        assert_eq!(certainty_scores::<f64>(&fx.doc("nothing"), &fx.lex), (0.0, 0.0));
    }

    #[test]
    fn lexical_diversity_examples() {
        let fx = Fixture::new();
        assert_eq!(lexical_diversity::<f64>(&fx.doc("a b a c")).unwrap(), 0.75);
        assert_eq!(lexical_diversity::<f64>(&fx.doc("a b c")).unwrap(), 1.0);
        assert_eq!(lexical_diversity::<f64>(&fx.doc("x x x x x")).unwrap(), 0.2);
        assert!(matches!(lexical_diversity::<f64>(&fx.doc("!!!")), Err(FeatureError::NoTerms)));
    }

    #[test]
    fn spelling_examples() {
        let fx = Fixture::new();
        let doc = fx.doc("teh dog is a big good cat now runs panic");
        assert_eq!(spelling_mistake_ratio::<f64>(&doc, &fx.spell).unwrap(), 0.1);
        let clean = fx.doc("the dog runs");
        assert_eq!(spelling_mistake_ratio::<f64>(&clean, &fx.spell).unwrap(), 0.0);
    }

    #[test]
    fn boundary_examples() {
        let fx = Fixture::new();
        assert_eq!(boundary_flags::<f64>(&fx.doc("Panic now. Calm later."), &fx.lex), (1.0, 0.0));
        assert_eq!(boundary_flags::<f64>(&fx.doc("Share this please"), &fx.lex), (0.0, 1.0));
        assert_eq!(boundary_flags::<f64>(&fx.doc("Panic now"), &LexiconSet::empty()), (0.0, 0.0));
    }

    #[test]
    fn degree_adjectives() {
        let fx = Fixture::new();
        let f = fx.features("The bigger dog. The 4th cat. The 2nd one.");
        assert!((f[FeatureId::AdjCmp] - 1.0 / 3.0).abs() < 1e-15);
        assert!((f[FeatureId::AdjOrd] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(f[FeatureId::AdjSup], 0.0);
        // "water" is not an adjective
        assert_eq!(fx.features("cold water")[FeatureId::AdjCmp], 0.0);
    }

    #[test]
    fn statistical_relative_time_pronoun() {
        let fx = Fixture::new();
        let f = fx.features("They said 56 died today. I ran. Some fled.");
        assert!((f[FeatureId::SI] - 2.0 / 3.0).abs() < 1e-15);
        assert!((f[FeatureId::RT] - 1.0 / 3.0).abs() < 1e-15);
        assert!((f[FeatureId::Pro] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn named_entity_sentences() {
        let fx = Fixture::new();
        let doc = fx.doc("Tehran is big. Nothing. Visit Tehran.");
        let g = Gazetteer::new([("tehran".to_string(), crate::annotate::EntityKind::Location)], &fx.pipeline);
        let ann = Annotations { speech_acts: Default::default(), entities: recognize_entities(&doc, &g) };
        let v: f64 = sentence_ratio(&doc, FeatureId::NE, &fx.ctx(&ann)).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn non_ratio_feature_rejected() {
        let fx = Fixture::new();
        let ann = Annotations::default();
        let doc = fx.doc("x");
        assert!(matches!(
            sentence_ratio::<f64>(&doc, FeatureId::LD, &fx.ctx(&ann)),
            Err(FeatureError::NotRatioFeature("LD"))
        ));
    }

    #[test]
    fn empty_lexicons_zero_lexicon_features() {
        let fx = Fixture::new();
        let doc = fx.doc("Panic, good dog! Maybe 5 rage?");
        let ann = Annotations::default();
        let empty = LexiconSet::empty();
        let ctx = FeatureContext { lexicons: &empty, ..fx.ctx(&ann) };
        let f: FeatureVectorOf<f64> = extract_all(&doc, &ctx).unwrap();
        for id in [
            FeatureId::Fr,
            FeatureId::An,
            FeatureId::PS,
            FeatureId::NS,
            FeatureId::Ucer,
            FeatureId::Cer,
            FeatureId::Strt,
        ] {
            assert_eq!(f[id], 0.0, "{id}");
        }
        assert!(f[FeatureId::ETag] > 0.0);
        assert!(f[FeatureId::LD] > 0.0);
    }

    #[test]
    fn works_in_f32() {
        let fx = Fixture::new();
        let doc = fx.doc("Panic. Calm.");
        let ann = Annotations::default();
        let v: f32 = sentence_ratio(&doc, FeatureId::Fr, &fx.ctx(&ann)).unwrap();
        assert_eq!(v, 0.5);
    }

    fn sentence_text() -> impl Strategy<Value = String> {
        proptest::collection::vec(
            prop_oneof![
                Just("panic"),
                Just("good"),
                Just("bad"),
                Just("dog"),
                Just("dog"),
                Just("they"),
                Just("maybe"),
                Just("surely"),
                Just("56"),
                Just("today"),
                Just("?"),
                Just("!"),
                Just("helllo"),
                Just("bigger"),
                Just("please"),
                Just("rage"),
                Just("some")
            ],
            1..8,
        )
        .prop_map(|ws| ws.join(" "))
    }

    proptest! {
        #[test]
        fn features_stay_in_range(sents in proptest::collection::vec(sentence_text(), 1..6)) {
            let fx = Fixture::new();
            let text = sents.join(". ");
            let doc = fx.doc(&text);
            if doc.term_count == 0 { return Ok(()); }
            let ann = Annotations { speech_acts: classify_speech_acts(&doc, &fx.lex), entities: vec![] };
            let f: FeatureVectorOf<f64> = extract_all(&doc, &fx.ctx(&ann)).unwrap();
            prop_assert!(f.is_valid());
            let ps_ns = f[FeatureId::PS] + f[FeatureId::NS];
            prop_assert!(ps_ns == 0.0 || (ps_ns - 1.0).abs() < 1e-12);
            let c = f[FeatureId::Cer] + f[FeatureId::Ucer];
            prop_assert!(c == 0.0 || (c - 1.0).abs() < 1e-12);
        }

        #[test]
        fn duplicating_sentences_keeps_ratios(sents in proptest::collection::vec(sentence_text(), 1..5)) {
            let fx = Fixture::new();
            let once = fx.doc(&format!("{}.", sents.join(". ")));
            let twice = fx.doc(&format!("{0}. {0}.", sents.join(". ")));
            let ann = Annotations::default();
            for id in FeatureId::ALL.into_iter().filter(|f| f.is_sentence_ratio()) {
                let a: f64 = sentence_ratio(&once, id, &fx.ctx(&ann)).unwrap();
                let b: f64 = sentence_ratio(&twice, id, &fx.ctx(&ann)).unwrap();
                prop_assert!((a - b).abs() < 1e-12, "{}", id);
            }
        }

        #[test]
        fn neutral_sentence_lowers_nonzero_ratios(sents in proptest::collection::vec(sentence_text(), 1..5)) {
            let fx = Fixture::new();
            let base = fx.doc(&format!("{}.", sents.join(". ")));
            let padded = fx.doc(&format!("{}. plain words here.", sents.join(". ")));
            let ann = Annotations::default();
            for id in FeatureId::ALL.into_iter().filter(|f| f.is_sentence_ratio()) {
                let a: f64 = sentence_ratio(&base, id, &fx.ctx(&ann)).unwrap();
                let b: f64 = sentence_ratio(&padded, id, &fx.ctx(&ann)).unwrap();
                if a > 0.0 {
                    prop_assert!(b < a, "{}", id);
                } else {
                    prop_assert_eq!(b, 0.0);
                }
            }
        }
    }
}
