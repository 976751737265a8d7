//! Vocabulary pools and the curated taxonomy.
//!
//! A lexicon holds the class nouns (with plural form and article), the
//! adjectives, the individual names, and the table of subclass edges that
//! are true of the real world. It loads from a plain-text file with one
//! pool per section; the default lexicon is embedded in the binary.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use thiserror::Error;

const DEFAULT_LEXICON: &str = include_str!("data/lexicon_default.txt");

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: unknown section [{name}]")]
    UnknownSection { line: usize, name: String },
    #[error("duplicate lemma across pools: {0}")]
    DuplicateLemma(String),
    #[error("plural form {plural:?} of {lemma:?} collides with another entry")]
    PluralCollision { lemma: String, plural: String },
    #[error("article for {lemma:?} must be \"a\" or \"an\", got {article:?}")]
    BadArticle { lemma: String, article: String },
    #[error("true edge references unknown lemma {0:?}")]
    UnknownEdgeLemma(String),
    #[error("true edge source {0:?} must be a class noun")]
    BadEdgeSource(String),
    #[error("failed to read lexicon file: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassNoun {
    pub lemma: String,
    pub plural: String,
    pub article: Article,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Article {
    A,
    An,
}

impl fmt::Display for Article {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Article::A => write!(f, "a"),
            Article::An => write!(f, "an"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Lexicon {
    class_nouns: Vec<ClassNoun>,
    adjectives: Vec<String>,
    individual_names: Vec<String>,
    true_edges: Vec<(String, String)>,
    plural_to_singular: HashMap<String, String>,
    class_index: HashMap<String, usize>,
    adjective_set: HashSet<String>,
    name_index: HashMap<String, usize>,
}

impl Lexicon {
    /// The embedded default vocabulary.
    pub fn default_lexicon() -> &'static Lexicon {
        static DEFAULT: OnceLock<Lexicon> = OnceLock::new();
        DEFAULT.get_or_init(|| {
            Lexicon::parse(DEFAULT_LEXICON).expect("embedded default lexicon is valid")
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Lexicon, LexiconError> {
        Lexicon::parse(&std::fs::read_to_string(path)?)
    }

    /// Parses the sectioned plain-text format. Lines are whitespace
    /// separated; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Lexicon, LexiconError> {
        #[derive(PartialEq)]
        enum Section {
            None,
            ClassNouns,
            Adjectives,
            Names,
            TrueEdges,
        }

        let mut section = Section::None;
        let mut class_nouns = Vec::new();
        let mut adjectives = Vec::new();
        let mut individual_names: Vec<String> = Vec::new();
        let mut true_edges = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = match name {
                    "class_nouns" => Section::ClassNouns,
                    "adjectives" => Section::Adjectives,
                    "individual_names" => Section::Names,
                    "true_edges" => Section::TrueEdges,
                    other => {
                        return Err(LexiconError::UnknownSection {
                            line: line_no,
                            name: other.to_string(),
                        })
                    }
                };
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match section {
                Section::None => {
                    return Err(LexiconError::Malformed {
                        line: line_no,
                        msg: "entry before any [section] header".into(),
                    })
                }
                Section::ClassNouns => {
                    if fields.len() != 3 {
                        return Err(LexiconError::Malformed {
                            line: line_no,
                            msg: format!("expected `lemma plural article`, got {:?}", line),
                        });
                    }
                    let article = match fields[2] {
                        "a" => Article::A,
                        "an" => Article::An,
                        other => {
                            return Err(LexiconError::BadArticle {
                                lemma: fields[0].to_string(),
                                article: other.to_string(),
                            })
                        }
                    };
                    class_nouns.push(ClassNoun {
                        lemma: fields[0].to_lowercase(),
                        plural: fields[1].to_lowercase(),
                        article,
                    });
                }
                Section::Adjectives => {
                    if fields.len() != 1 {
                        return Err(LexiconError::Malformed {
                            line: line_no,
                            msg: format!("expected a single adjective, got {:?}", line),
                        });
                    }
                    adjectives.push(fields[0].to_lowercase());
                }
                Section::Names => {
                    if fields.len() != 1 {
                        return Err(LexiconError::Malformed {
                            line: line_no,
                            msg: format!("expected a single name, got {:?}", line),
                        });
                    }
                    individual_names.push(fields[0].to_string());
                }
                Section::TrueEdges => {
                    if fields.len() != 2 {
                        return Err(LexiconError::Malformed {
                            line: line_no,
                            msg: format!("expected `subclass superclass`, got {:?}", line),
                        });
                    }
                    true_edges.push((fields[0].to_lowercase(), fields[1].to_lowercase()));
                }
            }
        }

        Lexicon::build(class_nouns, adjectives, individual_names, true_edges)
    }

    fn build(
        class_nouns: Vec<ClassNoun>,
        adjectives: Vec<String>,
        individual_names: Vec<String>,
        true_edges: Vec<(String, String)>,
    ) -> Result<Lexicon, LexiconError> {
        let mut all_lemmas: HashSet<String> = HashSet::new();
        let mut class_index = HashMap::new();
        let mut plural_to_singular = HashMap::new();

        for (i, noun) in class_nouns.iter().enumerate() {
            if !all_lemmas.insert(noun.lemma.clone()) {
                return Err(LexiconError::DuplicateLemma(noun.lemma.clone()));
            }
            class_index.insert(noun.lemma.clone(), i);
        }
        for adj in &adjectives {
            if !all_lemmas.insert(adj.clone()) {
                return Err(LexiconError::DuplicateLemma(adj.clone()));
            }
        }
        let mut name_index = HashMap::new();
        for (i, name) in individual_names.iter().enumerate() {
            let lemma = name.to_lowercase();
            if !all_lemmas.insert(lemma.clone()) {
                return Err(LexiconError::DuplicateLemma(lemma));
            }
            name_index.insert(name.to_lowercase(), i);
        }

        // plural -> singular must be unambiguous and must not shadow a
        // different lemma.
        for noun in &class_nouns {
            if noun.plural != noun.lemma && all_lemmas.contains(&noun.plural) {
                return Err(LexiconError::PluralCollision {
                    lemma: noun.lemma.clone(),
                    plural: noun.plural.clone(),
                });
            }
            if let Some(prev) =
                plural_to_singular.insert(noun.plural.clone(), noun.lemma.clone())
            {
                if prev != noun.lemma {
                    return Err(LexiconError::PluralCollision {
                        lemma: noun.lemma.clone(),
                        plural: noun.plural.clone(),
                    });
                }
            }
        }

        let adjective_set: HashSet<String> = adjectives.iter().cloned().collect();
        for (src, dst) in &true_edges {
            if !class_index.contains_key(src) {
                if all_lemmas.contains(src) {
                    return Err(LexiconError::BadEdgeSource(src.clone()));
                }
                return Err(LexiconError::UnknownEdgeLemma(src.clone()));
            }
            if !class_index.contains_key(dst) && !adjective_set.contains(dst) {
                return Err(LexiconError::UnknownEdgeLemma(dst.clone()));
            }
        }

        Ok(Lexicon {
            class_nouns,
            adjectives,
            individual_names,
            true_edges,
            plural_to_singular,
            class_index,
            adjective_set,
            name_index,
        })
    }

    pub fn class_nouns(&self) -> &[ClassNoun] {
        &self.class_nouns
    }

    pub fn adjectives(&self) -> &[String] {
        &self.adjectives
    }

    pub fn individual_names(&self) -> &[String] {
        &self.individual_names
    }

    pub fn true_edges(&self) -> &[(String, String)] {
        &self.true_edges
    }

    pub fn is_class(&self, lemma: &str) -> bool {
        self.class_index.contains_key(lemma)
    }

    pub fn is_adjective(&self, lemma: &str) -> bool {
        self.adjective_set.contains(lemma)
    }

    /// True for the lowercase form of a known individual name.
    pub fn is_individual(&self, lemma: &str) -> bool {
        self.name_index.contains_key(lemma)
    }

    pub fn contains_lemma(&self, lemma: &str) -> bool {
        self.is_class(lemma) || self.is_adjective(lemma) || self.is_individual(lemma)
    }

    pub fn article(&self, class_lemma: &str) -> Option<Article> {
        self.class_index
            .get(class_lemma)
            .map(|&i| self.class_nouns[i].article)
    }

    pub fn plural(&self, class_lemma: &str) -> Option<&str> {
        self.class_index
            .get(class_lemma)
            .map(|&i| self.class_nouns[i].plural.as_str())
    }

    pub fn singular_of_plural(&self, word: &str) -> Option<&str> {
        self.plural_to_singular.get(word).map(|s| s.as_str())
    }

    /// Display form of an individual lemma ("alex" -> "Alex").
    pub fn display_name(&self, lemma: &str) -> Option<&str> {
        self.name_index
            .get(lemma)
            .map(|&i| self.individual_names[i].as_str())
    }

    pub fn is_true_edge(&self, src: &str, dst: &str) -> bool {
        self.true_edges
            .iter()
            .any(|(s, d)| s == src && d == dst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_lexicon_parses_and_indexes() {
        let lex = Lexicon::default_lexicon();
        assert!(lex.is_class("sheep"));
        assert!(lex.is_adjective("luminous"));
        assert!(lex.is_individual("alex"));
        assert_eq!(lex.display_name("alex"), Some("Alex"));
        assert_eq!(lex.article("animal"), Some(Article::An));
        assert_eq!(lex.singular_of_plural("wolves"), Some("wolf"));
        assert_eq!(lex.singular_of_plural("sheep"), Some("sheep"));
        assert!(lex.is_true_edge("cat", "feline"));
        assert!(!lex.is_true_edge("feline", "snake"));
    }

    #[test]
    fn duplicate_lemma_rejected() {
        let text = "[class_nouns]\ncat cats a\n[adjectives]\ncat\n";
        assert!(matches!(
            Lexicon::parse(text),
            Err(LexiconError::DuplicateLemma(_))
        ));
    }

    #[test]
    fn plural_shadowing_another_lemma_rejected() {
        // plural of "cow" spelled as an existing lemma
        let text = "[class_nouns]\ncow cat a\ncat cats a\n";
        assert!(matches!(
            Lexicon::parse(text),
            Err(LexiconError::PluralCollision { .. })
        ));
    }

    #[test]
    fn edges_must_reference_known_lemmas() {
        let text = "[class_nouns]\ncat cats a\n[true_edges]\ncat dragon\n";
        assert!(matches!(
            Lexicon::parse(text),
            Err(LexiconError::UnknownEdgeLemma(_))
        ));
    }
}
