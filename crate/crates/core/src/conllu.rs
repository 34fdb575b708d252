//! Streaming CoNLL-U reader and the in-memory sentence model.
//!
//! Sentences are read one blank-line-delimited block at a time, so memory is
//! bounded by the largest sentence rather than by the file. Multiword token
//! ranges (`3-4`) and empty nodes (`3.1`) are skipped. The underscore is the
//! empty marker and is stored verbatim, which keeps serialization lossless.

use std::collections::HashSet;
use std::fmt;
use std::io::BufRead;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::tags::TagMap;

/// Value CoNLL-U uses for an unspecified field.
pub const EMPTY_MARKER: &str = "_";

#[derive(Debug, Error)]
pub enum ConlluError {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("sentence '{sentence_id}' (ending line {line}): {msg}")]
    Validation {
        sentence_id: String,
        line: usize,
        msg: String,
    },
    #[error("read error: {0}")]
    Io(#[from] std::io::Error),
}

impl ConlluError {
    /// Format and validation errors affect one sentence; IO errors end the stream.
    pub fn is_recoverable(&self) -> bool {
        !matches!(self, ConlluError::Io(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// 1-based position within the sentence.
    pub index: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: String,
    /// 0 for the root, otherwise the 1-based index of the head token.
    pub head: usize,
    pub deprel: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub id: String,
    pub tokens: Vec<Token>,
}

impl Sentence {
    /// Builds a sentence and checks the head structure.
    pub fn new(id: impl Into<String>, tokens: Vec<Token>) -> Result<Self, String> {
        let s = Sentence { id: id.into(), tokens };
        s.validate()?;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token by 1-based index.
    pub fn token(&self, index: usize) -> Option<&Token> {
        index.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    /// Checks index contiguity, head ranges and acyclicity.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.tokens.len();
        for (i, t) in self.tokens.iter().enumerate() {
            if t.index != i + 1 {
                return Err(format!(
                    "token ids must be 1..{n} in order, found {} at position {}",
                    t.index,
                    i + 1
                ));
            }
            if t.form.is_empty() || t.lemma.is_empty() {
                return Err(format!("token {} has an empty form or lemma", t.index));
            }
            if t.head > n {
                return Err(format!("token {} has head {} outside 0..={n}", t.index, t.head));
            }
            if t.head == t.index {
                return Err(format!("token {} is its own head", t.index));
            }
        }
        // 0 = unvisited, 1 = on current path, 2 = reaches root
        let mut state = vec![0u8; n + 1];
        state[0] = 2;
        for start in 1..=n {
            let mut path = Vec::new();
            let mut cur = start;
            while state[cur] == 0 {
                state[cur] = 1;
                path.push(cur);
                cur = self.tokens[cur - 1].head;
            }
            if state[cur] == 1 {
                return Err(format!("head cycle through token {cur}"));
            }
            for p in path {
                state[p] = 2;
            }
        }
        Ok(())
    }

    /// Serializes as one CoNLL-U block (with `# sent_id` and trailing blank line).
    pub fn to_conllu(&self) -> String {
        let mut out = format!("# sent_id = {}\n", self.id);
        for t in &self.tokens {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t_\t{}\t{}\t_\t_\n",
                t.index, t.form, t.lemma, t.upos, t.xpos, t.head, t.deprel
            ));
        }
        out.push('\n');
        out
    }

    /// Surface string, tokens joined by single spaces.
    pub fn text(&self) -> String {
        self.tokens
            .iter()
            .map(|t| t.form.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.id, self.text())
    }
}

/// Possessive nominal tags, in the corpus tag set plus Penn `POS`.
pub const DEFAULT_POSSESSIVE_TAGS: [&str; 5] = ["NNZ", "NNSZ", "NPZ", "NPSZ", "POS"];

/// Nominal test against a configurable possessive set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NominalTags {
    possessive: Vec<String>,
}

impl Default for NominalTags {
    fn default() -> Self {
        Self::new(DEFAULT_POSSESSIVE_TAGS.iter().map(|s| s.to_string()))
    }
}

impl NominalTags {
    pub fn new(possessive: impl IntoIterator<Item = String>) -> Self {
        NominalTags {
            possessive: possessive.into_iter().collect(),
        }
    }

    pub fn possessive(&self) -> &[String] {
        &self.possessive
    }

    pub fn is_nominal(&self, xpos: &str) -> bool {
        xpos.starts_with('N') && !self.possessive.iter().any(|p| p == xpos)
    }
}

/// Non-possessive nominal tag under the default possessive set.
pub fn is_nominal(xpos: &str) -> bool {
    xpos.starts_with('N') && !DEFAULT_POSSESSIVE_TAGS.contains(&xpos)
}

/// Lazy CoNLL-U sentence stream over any buffered reader.
///
/// Yields `Err` for a malformed block and keeps going; only IO errors end
/// the stream.
pub struct ConlluReader<R> {
    reader: R,
    tag_map: TagMap,
    line_no: usize,
    block_no: usize,
    buf: String,
    done: bool,
}

impl<R: BufRead> ConlluReader<R> {
    pub fn new(reader: R) -> Self {
        Self::with_tag_map(reader, TagMap::Identity)
    }

    pub fn with_tag_map(reader: R, tag_map: TagMap) -> Self {
        ConlluReader {
            reader,
            tag_map,
            line_no: 0,
            block_no: 0,
            buf: String::new(),
            done: false,
        }
    }

    fn next_line(&mut self) -> Result<Option<&str>, std::io::Error> {
        self.buf.clear();
        let n = self.reader.read_line(&mut self.buf)?;
        if n == 0 {
            return Ok(None);
        }
        self.line_no += 1;
        Ok(Some(self.buf.trim_end_matches(['\n', '\r'])))
    }

    fn read_block(&mut self) -> Option<Result<Sentence, ConlluError>> {
        let mut sent_id: Option<String> = None;
        let mut tokens: Vec<Token> = Vec::new();
        let mut error: Option<ConlluError> = None;
        let mut seen_any = false;
        let tag_map = self.tag_map;
        loop {
            let line_no = self.line_no + 1;
            let line = match self.next_line() {
                Ok(Some(l)) => l,
                Ok(None) => {
                    self.done = true;
                    break;
                }
                Err(e) => {
                    self.done = true;
                    return Some(Err(ConlluError::Io(e)));
                }
            };
            if line.trim().is_empty() {
                if seen_any {
                    break;
                }
                continue;
            }
            seen_any = true;
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((key, value)) = comment.split_once('=') {
                    if key.trim() == "sent_id" {
                        sent_id = Some(value.trim().to_string());
                    }
                }
                continue;
            }
            if error.is_some() {
                continue;
            }
            match parse_token_line(line, line_no, tag_map) {
                Ok(Some(t)) => tokens.push(t),
                Ok(None) => {}
                Err(e) => error = Some(e),
            }
        }
        if !seen_any {
            return None;
        }
        if error.is_none() && tokens.is_empty() {
            // comment-only block, e.g. a trailing "# newdoc"
            return if self.done { None } else { self.read_block() };
        }
        self.block_no += 1;
        if let Some(e) = error {
            return Some(Err(e));
        }
        let id = sent_id.unwrap_or_else(|| self.block_no.to_string());
        let sentence = Sentence { id, tokens };
        match sentence.validate() {
            Ok(()) => Some(Ok(sentence)),
            Err(msg) => Some(Err(ConlluError::Validation {
                sentence_id: sentence.id,
                line: self.line_no,
                msg,
            })),
        }
    }
}

impl<R: BufRead> Iterator for ConlluReader<R> {
    type Item = Result<Sentence, ConlluError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        self.read_block()
    }
}

/// Parses one token line; `Ok(None)` for skipped ranges and empty nodes.
fn parse_token_line(line: &str, line_no: usize, tag_map: TagMap) -> Result<Option<Token>, ConlluError> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 10 {
        return Err(ConlluError::Format {
            line: line_no,
            msg: format!("expected 10 tab-separated fields, found {}", cols.len()),
        });
    }
    let id = cols[0];
    if id.contains('-') || id.contains('.') {
        return Ok(None);
    }
    let index: usize = id.parse().map_err(|_| ConlluError::Format {
        line: line_no,
        msg: format!("non-integer ID '{id}'"),
    })?;
    if index == 0 {
        return Err(ConlluError::Format {
            line: line_no,
            msg: "token ID 0 is reserved for the root".into(),
        });
    }
    let head: usize = cols[6].parse().map_err(|_| ConlluError::Format {
        line: line_no,
        msg: format!("non-integer HEAD '{}'", cols[6]),
    })?;
    let lemma = cols[2].to_string();
    let xpos = tag_map.map(cols[4], &lemma);
    Ok(Some(Token {
        index,
        form: cols[1].to_string(),
        lemma,
        upos: cols[3].to_string(),
        xpos,
        head,
        deprel: cols[7].to_string(),
    }))
}

/// Parses a whole string; convenience for tests and small inputs.
pub fn parse_conllu_str(text: &str) -> ConlluReader<&[u8]> {
    ConlluReader::new(text.as_bytes())
}

/// Streaming exact-duplicate filter keyed on the token-form sequence.
///
/// Keeps a 128-bit digest per distinct sentence rather than the sentence
/// itself.
#[derive(Debug, Default)]
pub struct Deduplicator {
    seen: HashSet<[u8; 16]>,
    dropped: usize,
}

impl Deduplicator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `true` the first time a form sequence is seen.
    pub fn admit(&mut self, s: &Sentence) -> bool {
        let mut h = Sha256::new();
        for t in &s.tokens {
            h.update(t.form.as_bytes());
            h.update([0x1f]);
        }
        let digest = h.finalize();
        let mut key = [0u8; 16];
        key.copy_from_slice(&digest[..16]);
        let fresh = self.seen.insert(key);
        if !fresh {
            self.dropped += 1;
        }
        fresh
    }

    pub fn dropped(&self) -> usize {
        self.dropped
    }
}

/// Keeps the first occurrence of each distinct form sequence, order preserved.
pub fn filter_exact_duplicates(sentences: impl IntoIterator<Item = Sentence>) -> Vec<Sentence> {
    let mut dedup = Deduplicator::new();
    sentences.into_iter().filter(|s| dedup.admit(s)).collect()
}
