//! A small corpus query language: bracketed token patterns with `&`-joined
//! attribute tests, `=`/`!=` against full-string regexes, a trailing `?` for
//! optional tokens, and an optional `within <s/>` suffix.
//!
//! ```text
//! [tag="VB.*"] [tag="RB"]? [tag="VVN" & lemma="stain"] [tag="IN"] within <s/>
//! ```
//!
//! A bracket holding a bare wildcard term such as `[*-stained]` is shorthand
//! for a `word` test where `*` stands for any string.

use std::fmt;

use regex::Regex;
use thiserror::Error;

use crate::conllu::{Sentence, Token};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("query parse error at offset {offset}: {msg}")]
pub struct QueryError {
    /// Character offset into the query text.
    pub offset: usize,
    pub msg: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Attribute {
    /// Fine-grained tag (xpos).
    Tag,
    Lemma,
    /// Surface form.
    Word,
}

impl Attribute {
    fn name(self) -> &'static str {
        match self {
            Attribute::Tag => "tag",
            Attribute::Lemma => "lemma",
            Attribute::Word => "word",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        match name {
            "tag" => Some(Attribute::Tag),
            "lemma" => Some(Attribute::Lemma),
            "word" => Some(Attribute::Word),
            _ => None,
        }
    }

    pub fn value_of(self, token: &Token) -> &str {
        match self {
            Attribute::Tag => &token.xpos,
            Attribute::Lemma => &token.lemma,
            Attribute::Word => &token.form,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operator {
    Matches,
    NotMatches,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AttributeTest {
    pub attribute: Attribute,
    pub operator: Operator,
    /// Regex source, matched against the whole attribute value.
    pub pattern: String,
}

impl AttributeTest {
    pub fn new(attribute: Attribute, operator: Operator, pattern: impl Into<String>) -> Self {
        AttributeTest {
            attribute,
            operator,
            pattern: pattern.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TokenPattern {
    /// Conjunction; empty matches any token.
    pub tests: Vec<AttributeTest>,
    pub optional: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Scope {
    #[default]
    Sentence,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QueryAst {
    pub sequence: Vec<TokenPattern>,
    pub scope: Scope,
}

impl fmt::Display for AttributeTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.operator {
            Operator::Matches => "=",
            Operator::NotMatches => "!=",
        };
        write!(
            f,
            "{}{}\"{}\"",
            self.attribute.name(),
            op,
            self.pattern.replace('"', "\\\"")
        )
    }
}

impl fmt::Display for TokenPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, t) in self.tests.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str("]")?;
        if self.optional {
            f.write_str("?")?;
        }
        Ok(())
    }
}

impl fmt::Display for QueryAst {
    /// Canonical text; parsing it yields the same AST.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.sequence {
            write!(f, "{p} ")?;
        }
        f.write_str("within <s/>")
    }
}

impl QueryAst {
    pub fn render(&self) -> String {
        self.to_string()
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn err<T>(&self, offset: usize, msg: impl Into<String>) -> Result<T, QueryError> {
        Err(QueryError {
            offset,
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), QueryError> {
        if self.eat(c) {
            Ok(())
        } else {
            match self.peek() {
                Some(found) => self.err(self.pos, format!("expected '{c}', found '{found}'")),
                None => self.err(self.pos, format!("expected '{c}', found end of query")),
            }
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn query(&mut self) -> Result<QueryAst, QueryError> {
        let mut sequence = Vec::new();
        self.skip_ws();
        if self.peek().is_none() {
            return self.err(0, "empty query");
        }
        while self.peek() == Some('[') {
            sequence.push(self.token_pattern()?);
            self.skip_ws();
        }
        if sequence.is_empty() {
            return self.err(self.pos, "expected '['");
        }
        if self.peek().is_some() {
            let at = self.pos;
            if self.ident() != "within" {
                return self.err(at, "expected '[' or 'within'");
            }
            self.skip_ws();
            self.expect('<')?;
            self.skip_ws();
            let at = self.pos;
            if self.ident() != "s" {
                return self.err(at, "only sentence scope <s/> is supported");
            }
            self.skip_ws();
            self.expect('/')?;
            self.skip_ws();
            self.expect('>')?;
            self.skip_ws();
            if self.peek().is_some() {
                return self.err(self.pos, "trailing input after 'within <s/>'");
            }
        }
        if sequence.iter().all(|p| p.optional) {
            return self.err(0, "at least one token pattern must be non-optional");
        }
        Ok(QueryAst {
            sequence,
            scope: Scope::Sentence,
        })
    }

    fn token_pattern(&mut self) -> Result<TokenPattern, QueryError> {
        let open = self.pos;
        self.expect('[')?;
        self.skip_ws();
        let mut tests = Vec::new();
        if self.peek() == Some(']') {
            // any token
        } else if self.at_shorthand() {
            tests.push(self.shorthand()?);
        } else {
            loop {
                tests.push(self.attribute_test()?);
                self.skip_ws();
                if !self.eat('&') {
                    break;
                }
                self.skip_ws();
            }
        }
        self.skip_ws();
        if self.peek().is_none() {
            return self.err(open, "unbalanced '['");
        }
        self.expect(']')?;
        let save = self.pos;
        self.skip_ws();
        let optional = self.eat('?');
        if !optional {
            self.pos = save;
        }
        Ok(TokenPattern { tests, optional })
    }

    /// A bare term is anything not of the form `ident (=|!=)`.
    fn at_shorthand(&mut self) -> bool {
        let save = self.pos;
        let id = self.ident();
        self.skip_ws();
        let is_test = !id.is_empty() && matches!(self.peek(), Some('=') | Some('!'));
        self.pos = save;
        !is_test
    }

    fn shorthand(&mut self) -> Result<AttributeTest, QueryError> {
        let start = self.pos;
        let mut pattern = String::new();
        while let Some(c) = self.peek() {
            if c == ']' || c.is_whitespace() {
                break;
            }
            if c == '"' || c == '[' || c == '&' {
                return self.err(self.pos, format!("unexpected '{c}' in bare term"));
            }
            if c == '*' {
                pattern.push_str(".*");
            } else {
                pattern.push_str(&regex::escape(&c.to_string()));
            }
            self.pos += 1;
        }
        if pattern.is_empty() {
            return self.err(start, "expected attribute test or bare term");
        }
        Ok(AttributeTest::new(Attribute::Word, Operator::Matches, pattern))
    }

    fn attribute_test(&mut self) -> Result<AttributeTest, QueryError> {
        let at = self.pos;
        let name = self.ident();
        let attribute = match Attribute::from_name(&name) {
            Some(a) => a,
            None if name.is_empty() => return self.err(at, "expected attribute name"),
            None => return self.err(at, format!("unknown attribute '{name}'")),
        };
        self.skip_ws();
        let operator = if self.eat('!') {
            self.expect('=')?;
            Operator::NotMatches
        } else {
            self.expect('=')?;
            Operator::Matches
        };
        self.skip_ws();
        let quote = self.pos;
        let pattern = self.quoted()?;
        if let Err(e) = anchored(&pattern) {
            return self.err(quote, format!("invalid regex \"{pattern}\": {e}"));
        }
        Ok(AttributeTest {
            attribute,
            operator,
            pattern,
        })
    }

    /// `\"` is an escaped quote; every other backslash pair is kept for the regex.
    fn quoted(&mut self) -> Result<String, QueryError> {
        let open = self.pos;
        self.expect('"')?;
        let mut value = String::new();
        loop {
            match self.peek() {
                None => return self.err(open, "unterminated string"),
                Some('"') => {
                    self.pos += 1;
                    return Ok(value);
                }
                Some('\\') => {
                    self.pos += 1;
                    match self.peek() {
                        Some('"') => value.push('"'),
                        Some(c) => {
                            value.push('\\');
                            value.push(c);
                        }
                        None => return self.err(open, "unterminated string"),
                    }
                    self.pos += 1;
                }
                Some(c) => {
                    value.push(c);
                    self.pos += 1;
                }
            }
        }
    }
}

fn anchored(pattern: &str) -> Result<Regex, regex::Error> {
    Regex::new(&format!("^(?:{pattern})$"))
}

pub fn parse_query(text: &str) -> Result<QueryAst, QueryError> {
    Parser {
        chars: text.chars().collect(),
        pos: 0,
    }
    .query()
}

#[derive(Debug, Clone)]
struct CompiledTest {
    attribute: Attribute,
    negated: bool,
    regex: Regex,
}

#[derive(Debug, Clone)]
struct CompiledPattern {
    tests: Vec<CompiledTest>,
    optional: bool,
}

impl CompiledPattern {
    fn matches(&self, token: &Token) -> bool {
        self.tests
            .iter()
            .all(|t| t.regex.is_match(t.attribute.value_of(token)) != t.negated)
    }
}

/// Executable form of a [`QueryAst`]; regexes are compiled once.
#[derive(Debug, Clone)]
pub struct CompiledQuery {
    ast: QueryAst,
    patterns: Vec<CompiledPattern>,
}

pub fn compile(ast: &QueryAst) -> CompiledQuery {
    let patterns = ast
        .sequence
        .iter()
        .map(|p| CompiledPattern {
            optional: p.optional,
            tests: p
                .tests
                .iter()
                .map(|t| CompiledTest {
                    attribute: t.attribute,
                    negated: t.operator == Operator::NotMatches,
                    regex: anchored(&t.pattern).expect("pattern validated by parse_query"),
                })
                .collect(),
        })
        .collect();
    CompiledQuery {
        ast: ast.clone(),
        patterns,
    }
}

/// Parses and compiles in one step.
pub fn compile_str(text: &str) -> Result<CompiledQuery, QueryError> {
    Ok(compile(&parse_query(text)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Binding {
    /// Index into the query's pattern sequence.
    pub pattern: usize,
    /// 1-based token index.
    pub token: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatchSpan {
    pub sentence_id: String,
    /// 1-based index of the first consumed token.
    pub start: usize,
    pub bindings: Vec<Binding>,
}

impl MatchSpan {
    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Token bound to `pattern`, or `None` if that optional pattern was skipped.
    pub fn token_for(&self, pattern: usize) -> Option<usize> {
        self.bindings.iter().find(|b| b.pattern == pattern).map(|b| b.token)
    }
}

impl CompiledQuery {
    pub fn ast(&self) -> &QueryAst {
        &self.ast
    }

    pub fn pattern_count(&self) -> usize {
        self.patterns.len()
    }

    /// Every satisfying assignment at every start position.
    ///
    /// Optional patterns are tried taken-first. Results are ordered by start,
    /// then by tokens consumed descending; ties keep taken-first order.
    pub fn scan(&self, sentence: &Sentence) -> Vec<MatchSpan> {
        let n = sentence.len();
        let table: Vec<Vec<bool>> = self
            .patterns
            .iter()
            .map(|p| sentence.tokens.iter().map(|t| p.matches(t)).collect())
            .collect();
        let mut out = Vec::new();
        let mut stack = Vec::with_capacity(self.patterns.len());
        for start in 0..n {
            let mut found = Vec::new();
            self.extend(&table, n, 0, start, &mut stack, &mut found);
            found.sort_by_key(|b: &Vec<Binding>| std::cmp::Reverse(b.len()));
            out.extend(found.into_iter().map(|bindings| MatchSpan {
                sentence_id: sentence.id.clone(),
                start: start + 1,
                bindings,
            }));
        }
        out
    }

    fn extend(
        &self,
        table: &[Vec<bool>],
        n: usize,
        pi: usize,
        pos: usize,
        stack: &mut Vec<Binding>,
        found: &mut Vec<Vec<Binding>>,
    ) {
        if pi == self.patterns.len() {
            found.push(stack.clone());
            return;
        }
        if pos < n && table[pi][pos] {
            stack.push(Binding {
                pattern: pi,
                token: pos + 1,
            });
            self.extend(table, n, pi + 1, pos + 1, stack, found);
            stack.pop();
        }
        if self.patterns[pi].optional {
            self.extend(table, n, pi + 1, pos, stack, found);
        }
    }

    /// Scans each sentence independently, results in corpus order.
    pub fn scan_all<'a>(&self, sentences: impl IntoIterator<Item = &'a Sentence>) -> Vec<MatchSpan> {
        sentences.into_iter().flat_map(|s| self.scan(s)).collect()
    }
}
