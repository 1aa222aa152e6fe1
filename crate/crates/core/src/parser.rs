//! Recursive-descent parser for restricted-English referring expressions.
//!
//! ```text
//! utterance := imperative | declarative | NP
//! imperative := ACTION NP
//! declarative := NP "is" REL NP
//! NP := ["the" | "a" | "an"] ATTR* NOUN [RELCLAUSE]
//! RELCLAUSE := ["that" "is"] REL NP
//! ```
//!
//! Relation phrases match longest-first. Nouns form an open class and are
//! normalized through the category synonym table. Clarification answers use
//! a looser fragment grammar, see [`parse_answer`].

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::{RelationName, ShapeName};
use crate::lexicon::normalize_category;
use crate::refexp::{AttrConstraint, Attributes, RefExp, RelationConstraint, MAX_RELATION_DEPTH};
use crate::scene::{ColorName, SizeClass};

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("at token {position}: expected {expected}, found {found}")]
pub struct ParseError {
    pub position: usize,
    pub expected: String,
    pub found: String,
}

const END: &str = "end of input";

const ACTIONS: &[&[&str]] = &[
    &["give", "me"],
    &["hand", "me"],
    &["pick", "up"],
    &["pass", "me"],
    &["point", "to"],
];

// Longest phrases first.
const RELATION_PHRASES: &[(&[&str], RelationName)] = &[
    (&["to", "the", "right", "of"], RelationName::RightOf),
    (&["to", "the", "left", "of"], RelationName::LeftOf),
    (&["in", "front", "of"], RelationName::InFrontOf),
    (&["right", "of"], RelationName::RightOf),
    (&["left", "of"], RelationName::LeftOf),
    (&["next", "to"], RelationName::NextTo),
    (&["behind"], RelationName::Behind),
    (&["near"], RelationName::Near),
    (&["on"], RelationName::On),
];

const DETERMINERS: &[&str] = &["the", "a", "an"];

/// Words that never serve as nouns.
const RESERVED: &[&str] = &[
    "the", "a", "an", "is", "that", "one", "left", "right", "in", "front", "of", "behind", "near",
    "next", "to", "on",
];

/// Attribute words that can also name an object category.
const ATTRIBUTE_NOUNS: &[&str] = &["orange"];

const ORDINALS: &[&str] = &[
    "first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth",
];

/// Lowercases, strips punctuation and splits on whitespace. Hyphens separate
/// words.
pub fn tokenize(text: &str) -> Vec<String> {
    let cleaned: String = text
        .chars()
        .filter_map(|c| {
            if c == '-' || c.is_whitespace() {
                Some(' ')
            } else if c.is_alphanumeric() {
                Some(c)
            } else {
                None
            }
        })
        .collect();
    cleaned
        .to_lowercase()
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

pub fn attribute_word(word: &str) -> Option<AttrConstraint> {
    if let Ok(color) = word.parse::<ColorName>() {
        return Some(AttrConstraint::Color(color));
    }
    if let Some(size) = SizeClass::from_word(word) {
        return Some(AttrConstraint::Size(size));
    }
    if word == "large" {
        return Some(AttrConstraint::Size(SizeClass::Big));
    }
    ShapeName::from_word(word).map(AttrConstraint::Shape)
}

fn noun_candidate(word: &str) -> bool {
    !RESERVED.contains(&word) && attribute_word(word).is_none()
}

/// Parses an instruction or description into a referring expression.
pub fn parse(text: &str) -> Result<RefExp, ParseError> {
    let tokens = tokenize(text);
    let mut p = Parser::new(&tokens, false);
    let mut refexp = p.utterance()?;
    refexp.raw_text = text.to_string();
    Ok(refexp)
}

/// A clarification answer.
#[derive(Debug, Clone, PartialEq)]
pub enum Answer {
    /// "the first one", "second", ... (zero-based).
    Ordinal(usize),
    Fragment(Fragment),
}

/// A partial noun phrase: any of noun, attributes and relations, at least one
/// present.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Fragment {
    pub category: Option<String>,
    pub attributes: Attributes,
    pub relations: Vec<RelationConstraint>,
}

/// Parses an answer to a clarification question: a bare attribute word
/// ("blue"), an ordinal ("the first one"), a pronoun phrase ("the one behind
/// the book") or a full noun phrase.
pub fn parse_answer(text: &str) -> Result<Answer, ParseError> {
    let tokens = tokenize(text);
    let mut p = Parser::new(&tokens, true);
    p.skip_fillers();

    let start = p.pos;
    p.eat_any(DETERMINERS);
    if let Some(n) = p.peek().and_then(|w| ORDINALS.iter().position(|o| *o == w)) {
        p.pos += 1;
        p.eat("one");
        p.expect_end()?;
        return Ok(Answer::Ordinal(n));
    }
    p.pos = start;

    let fragment = p.fragment()?;
    p.expect_end()?;
    Ok(Answer::Fragment(fragment))
}

struct Parser<'a> {
    tokens: &'a [String],
    pos: usize,
    // Answer mode: the noun may be omitted or replaced by "one".
    fragment_mode: bool,
}

impl<'a> Parser<'a> {
    fn new(tokens: &'a [String], fragment_mode: bool) -> Self {
        Parser {
            tokens,
            pos: 0,
            fragment_mode,
        }
    }

    fn peek(&self) -> Option<&'a str> {
        self.peek_at(0)
    }

    fn peek_at(&self, offset: usize) -> Option<&'a str> {
        self.tokens.get(self.pos + offset).map(String::as_str)
    }

    fn eat(&mut self, word: &str) -> bool {
        if self.peek() == Some(word) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_any(&mut self, words: &[&str]) -> bool {
        match self.peek() {
            Some(w) if words.contains(&w) => {
                self.pos += 1;
                true
            }
            _ => false,
        }
    }

    fn error_at(&self, position: usize, expected: impl Into<String>) -> ParseError {
        ParseError {
            position,
            expected: expected.into(),
            found: self
                .tokens
                .get(position)
                .cloned()
                .unwrap_or_else(|| END.to_string()),
        }
    }

    fn error(&self, expected: impl Into<String>) -> ParseError {
        self.error_at(self.pos, expected)
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            Err(self.error(END))
        }
    }

    fn matches_phrase(&self, phrase: &[&str]) -> bool {
        phrase
            .iter()
            .enumerate()
            .all(|(i, w)| self.peek_at(i) == Some(*w))
    }

    fn relation(&mut self) -> Option<RelationName> {
        let (phrase, rel) = RELATION_PHRASES
            .iter()
            .find(|(phrase, _)| self.matches_phrase(phrase))?;
        self.pos += phrase.len();
        Some(*rel)
    }

    fn at_relation(&self) -> bool {
        RELATION_PHRASES
            .iter()
            .any(|(phrase, _)| self.matches_phrase(phrase))
    }

    fn skip_fillers(&mut self) {
        loop {
            if self.matches_phrase(&["i", "mean"]) {
                self.pos += 2;
            } else if !self.eat_any(&["yes", "no", "um", "uh"]) {
                break;
            }
        }
    }

    fn utterance(&mut self) -> Result<RefExp, ParseError> {
        if let Some(action) = ACTIONS.iter().find(|a| self.matches_phrase(a)) {
            self.pos += action.len();
            let np = self.noun_phrase(0)?;
            self.expect_end()?;
            return Ok(np);
        }

        let mut np = self.noun_phrase(0)?;
        if self.eat("is") {
            let rel = self
                .relation()
                .ok_or_else(|| self.error("relation phrase"))?;
            let landmark = self.noun_phrase(1)?;
            np.relations.push(RelationConstraint {
                relation: rel,
                landmark,
            });
        }
        self.expect_end()?;
        Ok(np)
    }

    /// `level` counts the relation clauses enclosing this phrase.
    fn noun_phrase(&mut self, level: usize) -> Result<RefExp, ParseError> {
        self.eat_any(DETERMINERS);
        let attributes = self.attributes()?;
        let noun = match self.peek() {
            Some(w) if noun_candidate(w) || ATTRIBUTE_NOUNS.contains(&w) => w,
            _ => return Err(self.error("noun")),
        };
        self.pos += 1;

        let mut np = RefExp {
            target_category: normalize_category(noun),
            attributes,
            relations: Vec::new(),
            raw_text: String::new(),
        };
        if let Some(clause) = self.relative_clause(level)? {
            np.relations.push(clause);
        }
        Ok(np)
    }

    fn relative_clause(&mut self, level: usize) -> Result<Option<RelationConstraint>, ParseError> {
        let start = self.pos;
        let has_that = self.matches_phrase(&["that", "is"]);
        if has_that {
            self.pos += 2;
        } else if !self.at_relation() {
            return Ok(None);
        }
        if level >= MAX_RELATION_DEPTH {
            return Err(self.error_at(
                start,
                format!("no relation nested deeper than {MAX_RELATION_DEPTH}"),
            ));
        }
        let relation = self
            .relation()
            .ok_or_else(|| self.error("relation phrase"))?;
        let landmark = self.noun_phrase(level + 1)?;
        Ok(Some(RelationConstraint { relation, landmark }))
    }

    fn attributes(&mut self) -> Result<Attributes, ParseError> {
        let mut attrs = Attributes::default();
        while let Some(word) = self.peek() {
            let Some(attr) = attribute_word(word) else {
                break;
            };
            if ATTRIBUTE_NOUNS.contains(&word) && !self.attribute_continues() {
                // Last word of the phrase: read it as the noun.
                break;
            }
            if attrs.insert(attr).is_err() {
                return Err(self.error(format!("at most one {} word", dimension(attr))));
            }
            self.pos += 1;
        }
        Ok(attrs)
    }

    /// Whether the token after the current one still belongs to the noun
    /// phrase's attribute/noun sequence.
    fn attribute_continues(&self) -> bool {
        match self.peek_at(1) {
            Some(next) => {
                attribute_word(next).is_some()
                    || noun_candidate(next)
                    || (self.fragment_mode && next == "one")
            }
            None => self.fragment_mode,
        }
    }

    fn fragment(&mut self) -> Result<Fragment, ParseError> {
        if self.at_relation() {
            let relation = self.relation().expect("checked");
            let landmark = self.noun_phrase(1)?;
            return Ok(Fragment {
                relations: vec![RelationConstraint { relation, landmark }],
                ..Fragment::default()
            });
        }

        let start = self.pos;
        self.eat_any(DETERMINERS);
        let attributes = self.attributes()?;
        let category = match self.peek() {
            Some("one") => {
                self.pos += 1;
                None
            }
            Some(w) if noun_candidate(w) || ATTRIBUTE_NOUNS.contains(&w) => {
                self.pos += 1;
                Some(normalize_category(w))
            }
            _ => None,
        };
        let mut relations = Vec::new();
        if let Some(clause) = self.relative_clause(0)? {
            relations.push(clause);
        }
        if category.is_none() && attributes.is_empty() && relations.is_empty() {
            return Err(self.error_at(start.max(self.pos), "attribute, noun, ordinal or relation"));
        }
        Ok(Fragment {
            category,
            attributes,
            relations,
        })
    }
}

fn dimension(attr: AttrConstraint) -> &'static str {
    match attr {
        AttrConstraint::Color(_) => "color",
        AttrConstraint::Size(_) => "size",
        AttrConstraint::Shape(_) => "shape",
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut words: Vec<String> = self
            .attributes
            .iter()
            .map(|a| a.word().to_string())
            .collect();
        words.push(self.category.clone().unwrap_or_else(|| "one".into()));
        for rel in &self.relations {
            words.push(rel.relation.phrase().into());
            words.push(crate::refexp::render_np(&rel.landmark));
        }
        write!(f, "the {}", words.join(" "))
    }
}
