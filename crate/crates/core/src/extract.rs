//! Free-text response parsing: verdict extraction and triple extraction.
//!
//! The parser is a deterministic pattern grammar over the controlled
//! copular fragment the problems are written in (quantified rules, named
//! facts, "Therefore ..." conclusions, "True or false: ..." subgoal
//! restatements). Pronouns resolve to the query individual, discourse
//! markers are stripped, and sentences outside the fragment are skipped
//! and counted rather than failing the parse.
//!
//! Verdicts follow default negation: no clear answer marker, or an
//! explicit "cannot be determined", scores as false. When several
//! markers appear the last one wins; "True or false" query restatements
//! never count as markers.

use regex::Regex;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

use crate::lexicon::Lexicon;
use crate::triple::{collapse_adjacent, Polarity, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedResponse {
    pub verdict: bool,
    /// Whether a clear answer marker was found. False implies a false
    /// verdict (default negation).
    pub verdict_explicit: bool,
    pub triples: Vec<Triple>,
    pub sentence_count: usize,
    /// Sentences that matched no pattern of the controlled fragment.
    pub skipped_sentences: usize,
    /// Lemmas kept verbatim because they are not in the lexicon.
    pub unknown_lemmas: Vec<String>,
}

fn regex(pattern: &str) -> Regex {
    Regex::new(pattern).expect("static pattern compiles")
}

macro_rules! static_regex {
    ($name:ident, $pattern:expr) => {
        fn $name() -> &'static Regex {
            static RE: OnceLock<Regex> = OnceLock::new();
            RE.get_or_init(|| regex($pattern))
        }
    };
}

static_regex!(true_or_false_re, r"(?i)\btrue\s+or\s+false\b");
static_regex!(
    indeterminate_re,
    r"(?i)\bcannot\s+be\s+determined\b|\bcan\s*not\s+be\s+determined\b|\bcannot\s+determine\b|\bimpossible\s+to\s+determine\b|\bnot\s+possible\s+to\s+determine\b|\bunknown\b|\bundetermined\b|\bindeterminate\b|\bnot\s+enough\s+information\b|\binsufficient\s+information\b"
);
static_regex!(
    cue_re,
    r#"(?i)\b(?:is|was|be|are|answer|answered|verdict|conclusion|therefore|thus|hence|says?|statement)\s*[:,]?\s*["'“”]?\s*(?:most\s+likely\s+|likely\s+|probably\s+|definitely\s+|clearly\s+|certainly\s+)?(true|false)\b"#
);
static_regex!(sentence_boundary_re, r"[.!?]+(?:\s+|$)|\n+");
static_regex!(emphasis_re, r"[*_`#]+");
static_regex!(
    numbered_prefix_re,
    r"(?i)^(?:\(?\d+\s*[.):\]]+\s*|step\s+\d+\s*[:.]?\s*|[-•]\s*)"
);
static_regex!(
    discourse_marker_re,
    r"(?i)^(?:(?:therefore|thus|hence|so|then|next|now|first|second|third|finally|also|additionally|furthermore|however|similarly|since|because|as|and|but)[,:]?\s+|it\s+(?:also\s+|then\s+)?states?\s+that\s+|the\s+statements?\s+says?\s+(?:that\s+)?|we\s+(?:know|see|learn|are\s+told)\s+that\s+|this\s+(?:means|implies|shows)\s+that\s+|which\s+means\s+(?:that\s+)?|given\s+that\s+|note\s+that\s+|that\s+means\s+(?:that\s+)?|meaning\s+(?:that\s+)?)"
);
static_regex!(
    no_support_prefix_re,
    r"(?i)^(?:there\s+is\s+no\s+(?:rule\s+or\s+)?(?:supporting\s+)?fact\s+(?:that\s+shows\s+|showing\s+|proving\s+|that\s+proves\s+|for\s+)?(?:that\s+)?|it\s+cannot\s+be\s+shown\s+that\s+|nothing\s+(?:shows|proves)\s+that\s+)"
);
static_regex!(subgoal_prefix_re, r"(?i)^(?:true\s+or\s+false[:,]?\s*|is\s+it\s+true\s+that\s+)");
static_regex!(
    quantified_rule_re,
    r"(?i)^(?:every|each|all|any)\s+(\w+)\s+(?:is|are)\s+(not\s+)?(?:a\s+|an\s+)?(\w+)$"
);
static_regex!(
    generic_singular_rule_re,
    r"(?i)^(?:a|an)\s+(\w+)\s+is\s+(not\s+)?(?:a\s+|an\s+)?(\w+)$"
);
static_regex!(
    bare_plural_re,
    r"(?i)^(\w+)\s+are\s+(not\s+)?(?:a\s+|an\s+)?(\w+)$"
);
static_regex!(
    copular_fact_re,
    r"(?i)^(\w+)\s+(?:is|am)\s+(not\s+)?(?:a\s+|an\s+)?(\w+)$"
);
static_regex!(
    deictic_fact_re,
    r"(?i)^(?:this|that|the)\s+(\w+)\s+is\s+(not\s+)?(?:a\s+|an\s+)?(\w+)$"
);

const PRONOUNS: [&str; 5] = ["it", "he", "she", "they", "i"];
const GENERIC_SUBJECTS: [&str; 3] = ["animal", "creature", "individual"];
/// Predicates that mark verdict clauses, never triples.
const PREDICATE_BLACKLIST: [&str; 4] = ["true", "false", "correct", "incorrect"];
const SUBJECT_BLACKLIST: [&str; 10] = [
    "answer", "query", "statement", "question", "verdict", "conclusion", "result", "step",
    "rule", "fact",
];

/// Scans for a final verdict. Returns `(verdict, explicit)`.
pub fn extract_verdict(text: &str) -> (bool, bool) {
    // blank out query restatements so their "true"/"false" never count
    let mut scrubbed = text.as_bytes().to_vec();
    for m in true_or_false_re().find_iter(text) {
        scrubbed[m.range()].fill(b' ');
    }
    let scrubbed = String::from_utf8(scrubbed).expect("blanking ascii keeps utf8 valid");

    #[derive(Clone, Copy, PartialEq)]
    enum Event {
        True,
        False,
        Indeterminate,
    }
    let mut events: Vec<(usize, Event)> = Vec::new();

    for cap in cue_re().captures_iter(&scrubbed) {
        let m = cap.get(1).expect("cue group");
        let event = if m.as_str().eq_ignore_ascii_case("true") {
            Event::True
        } else {
            Event::False
        };
        events.push((m.start(), event));
    }
    for m in indeterminate_re().find_iter(&scrubbed) {
        events.push((m.start(), Event::Indeterminate));
    }
    // standalone "True." / "False." sentences
    for (start, sentence) in split_with_offsets(&scrubbed) {
        let bare = sentence
            .trim_matches(|c: char| c.is_whitespace() || "\"'“”*_`:;,()[]".contains(c))
            .to_ascii_lowercase();
        if bare == "true" {
            events.push((start, Event::True));
        } else if bare == "false" {
            events.push((start, Event::False));
        }
    }

    events.sort_by_key(|(pos, _)| *pos);
    match events.last() {
        Some((_, Event::True)) => (true, true),
        Some((_, Event::False)) => (false, true),
        Some((_, Event::Indeterminate)) | None => (false, false),
    }
}

/// Sentence segmentation on terminal punctuation and newlines, keeping
/// byte offsets.
fn split_with_offsets(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    for boundary in sentence_boundary_re().find_iter(text) {
        if boundary.start() > start {
            out.push((start, &text[start..boundary.start()]));
        }
        start = boundary.end();
    }
    if start < text.len() {
        out.push((start, &text[start..]));
    }
    out
}

/// Lowercases, strips articles, and maps plural forms to singular lemmas
/// via the lexicon with a suffix-rule fallback. Lemmas outside the
/// lexicon are kept verbatim.
pub fn canonicalize(
    lexicon: &Lexicon,
    subject_phrase: &str,
    predicate_phrase: &str,
    negated: bool,
) -> Triple {
    Triple {
        subject: canonical_lemma(lexicon, subject_phrase).0,
        predicate: canonical_lemma(lexicon, predicate_phrase).0,
        polarity: if negated {
            Polarity::Negative
        } else {
            Polarity::Positive
        },
    }
}

/// Returns the canonical lemma and whether the lexicon knows it.
pub fn canonical_lemma(lexicon: &Lexicon, phrase: &str) -> (String, bool) {
    let mut word = phrase.trim().to_lowercase();
    for article in ["a ", "an ", "the "] {
        if let Some(rest) = word.strip_prefix(article) {
            word = rest.trim().to_string();
            break;
        }
    }
    if lexicon.contains_lemma(&word) {
        return (word, true);
    }
    if let Some(singular) = lexicon.singular_of_plural(&word) {
        return (singular.to_string(), true);
    }
    let singular = singularize(&word);
    let known = lexicon.contains_lemma(&singular);
    (singular, known)
}

/// Default plural-to-singular suffix rules, used when the lexicon has no
/// entry for the word.
fn singularize(word: &str) -> String {
    if word.len() > 4 && word.ends_with("ies") {
        return format!("{}y", &word[..word.len() - 3]);
    }
    if word.len() > 3 && word.ends_with("ves") {
        let stem = &word[..word.len() - 3];
        return match stem {
            "kni" | "wi" | "li" => format!("{stem}fe"),
            _ => format!("{stem}f"),
        };
    }
    for suffix in ["sses", "xes", "ches", "shes", "zes", "oes"] {
        if word.len() > suffix.len() && word.ends_with(suffix) {
            return word[..word.len() - 2].to_string();
        }
    }
    if word.len() > 2
        && word.ends_with('s')
        && !word.ends_with("ss")
        && !word.ends_with("us")
        && !word.ends_with("is")
    {
        return word[..word.len() - 1].to_string();
    }
    word.to_string()
}

/// Deterministic response parser bound to a lexicon.
pub struct ResponseParser<'a> {
    lexicon: &'a Lexicon,
}

impl<'a> ResponseParser<'a> {
    pub fn new(lexicon: &'a Lexicon) -> ResponseParser<'a> {
        ResponseParser { lexicon }
    }

    /// Full parse: verdict plus ordered canonical triples.
    pub fn parse(&self, text: &str, query_subject: &str) -> ParsedResponse {
        let (verdict, verdict_explicit) = extract_verdict(text);
        let mut parsed = self.extract_triples(text, query_subject);
        parsed.verdict = verdict;
        parsed.verdict_explicit = verdict_explicit;
        parsed
    }

    /// Ordered triple extraction; the verdict fields of the returned
    /// response are left at their defaults.
    pub fn extract_triples(&self, text: &str, query_subject: &str) -> ParsedResponse {
        let normalized = normalize(text);
        let mut triples: Vec<Triple> = Vec::new();
        let mut unknown: Vec<String> = Vec::new();
        let mut sentence_count = 0;
        let mut skipped = 0;

        for (_, sentence) in split_with_offsets(&normalized) {
            let sentence = sentence.trim();
            if sentence.is_empty() {
                continue;
            }
            sentence_count += 1;
            let mut matched_any = false;
            for clause in sentence.split(',') {
                if let Some(triple) = self.parse_clause(clause, query_subject, &mut unknown) {
                    triples.push(triple);
                    matched_any = true;
                }
            }
            if !matched_any {
                skipped += 1;
            }
        }

        ParsedResponse {
            verdict: false,
            verdict_explicit: false,
            triples: collapse_adjacent(&triples),
            sentence_count,
            skipped_sentences: skipped,
            unknown_lemmas: unknown,
        }
    }

    /// At most one triple per clause.
    fn parse_clause(
        &self,
        clause: &str,
        query_subject: &str,
        unknown: &mut Vec<String>,
    ) -> Option<Triple> {
        // peel discourse markers, list prefixes and no-support phrasing
        let mut work = clause.trim().to_string();
        loop {
            let mut changed = false;
            for re in [
                numbered_prefix_re(),
                discourse_marker_re(),
                no_support_prefix_re(),
            ] {
                if let Some(m) = re.find(&work) {
                    work.drain(..m.end());
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if let Some(m) = subgoal_prefix_re().find(&work) {
            work.drain(..m.end());
        }
        let clause = work.trim().trim_end_matches(['?', '!', '.']).trim();
        if clause.is_empty() {
            return None;
        }

        if let Some(cap) = quantified_rule_re()
            .captures(clause)
            .or_else(|| generic_singular_rule_re().captures(clause))
        {
            return self.rule_triple(&cap, unknown);
        }

        if let Some(cap) = bare_plural_re().captures(clause) {
            let subject = cap.get(1).unwrap().as_str().to_lowercase();
            if PRONOUNS.contains(&subject.as_str()) || subject == "we" {
                return self.fact_triple(query_subject, &cap, unknown);
            }
            if SUBJECT_BLACKLIST.contains(&subject.as_str()) {
                return None;
            }
            return self.rule_triple(&cap, unknown);
        }

        if let Some(cap) = deictic_fact_re().captures(clause) {
            // "this animal is sunny" resolves to the query individual;
            // "the answer is ..." and friends never parse as triples
            let head = cap.get(1).unwrap().as_str().to_lowercase();
            if GENERIC_SUBJECTS.contains(&head.as_str()) || self.lexicon.is_class(&head) {
                return self.fact_triple(query_subject, &cap, unknown);
            }
            return None;
        }

        if let Some(cap) = copular_fact_re().captures(clause) {
            let subject = cap.get(1).unwrap().as_str().to_lowercase();
            if SUBJECT_BLACKLIST.contains(&subject.as_str()) {
                return None;
            }
            if PRONOUNS.contains(&subject.as_str())
                || subject == "this"
                || subject == "that"
            {
                return self.fact_triple(query_subject, &cap, unknown);
            }
            return self.subject_triple(&subject, &cap, unknown);
        }

        None
    }

    fn rule_triple(&self, cap: &regex::Captures, unknown: &mut Vec<String>) -> Option<Triple> {
        let subject = cap.get(1).unwrap().as_str();
        self.subject_triple(subject, cap, unknown)
    }

    fn subject_triple(
        &self,
        subject: &str,
        cap: &regex::Captures,
        unknown: &mut Vec<String>,
    ) -> Option<Triple> {
        let negated = cap.get(2).is_some();
        let predicate = cap.get(3).unwrap().as_str();
        if PREDICATE_BLACKLIST.contains(&predicate.to_lowercase().as_str()) {
            return None;
        }
        let (subject, subject_known) = canonical_lemma(self.lexicon, subject);
        let (predicate, predicate_known) = canonical_lemma(self.lexicon, predicate);
        if !subject_known {
            unknown.push(subject.clone());
        }
        if !predicate_known {
            unknown.push(predicate.clone());
        }
        Some(Triple {
            subject,
            predicate,
            polarity: if negated {
                Polarity::Negative
            } else {
                Polarity::Positive
            },
        })
    }

    fn fact_triple(
        &self,
        query_subject: &str,
        cap: &regex::Captures,
        unknown: &mut Vec<String>,
    ) -> Option<Triple> {
        let negated = cap.get(2).is_some();
        let predicate = cap.get(3).unwrap().as_str();
        if PREDICATE_BLACKLIST.contains(&predicate.to_lowercase().as_str()) {
            return None;
        }
        let (predicate, known) = canonical_lemma(self.lexicon, predicate);
        if !known {
            unknown.push(predicate.clone());
        }
        Some(Triple {
            subject: query_subject.to_lowercase(),
            predicate,
            polarity: if negated {
                Polarity::Negative
            } else {
                Polarity::Positive
            },
        })
    }
}

/// Lowercase, expand contractions, drop markdown emphasis.
fn normalize(text: &str) -> String {
    let mut out = text.to_lowercase();
    for (from, to) in [
        ("isn't", "is not"),
        ("aren't", "are not"),
        ("wasn't", "was not"),
        ("doesn't", "does not"),
        ("don't", "do not"),
        ("can't", "cannot"),
        ("it's", "it is"),
        ("that's", "that is"),
        ("let's", "let us"),
    ] {
        out = out.replace(from, to);
    }
    emphasis_re().replace_all(&out, " ").into_owned()
}
