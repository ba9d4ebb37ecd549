//! Word lexicon and person-name lists.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::corpus::normalize_syllable;
use crate::error::{Error, Result};

/// Placeholder syllable for positions before the sentence start.
pub const BOS: &str = "<s>";
/// Placeholder syllable for positions past the sentence end.
pub const EOS: &str = "</s>";

pub fn is_sentinel(s: &str) -> bool {
    s == BOS || s == EOS
}

#[derive(Clone, Debug, Default, PartialEq)]
struct Node {
    children: HashMap<String, usize>,
    terminal: bool,
}

/// Trie over normalized syllable sequences.
#[derive(Clone, Debug)]
pub struct Lexicon {
    nodes: Vec<Node>,
    size: usize,
    max_len: usize,
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon {
            nodes: vec![Node::default()],
            size: 0,
            max_len: 0,
        }
    }
}

/// Two lexicons are equal when they hold the same entries, whatever the
/// insertion order that shaped the trie.
impl PartialEq for Lexicon {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size && self.entries() == other.entries()
    }
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a lexicon from entry lines, one word per line with syllables
    /// separated by white space.
    pub fn from_lines<'a, I>(lines: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut lex = Lexicon::new();
        for (no, line) in lines.into_iter().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let syllables: Vec<&str> = line.split_whitespace().collect();
            if line.contains('_') || syllables.iter().any(|s| is_sentinel(s)) {
                return Err(Error::MalformedEntry {
                    line: no + 1,
                    entry: line.to_string(),
                });
            }
            lex.insert(&syllables);
        }
        Ok(lex)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::resource(path, e))?;
        Lexicon::from_lines(text.lines())
    }

    /// Inserts a word given as surface syllables; they are normalized first.
    /// Empty sequences and sequences holding a sentinel are ignored.
    pub fn insert<S: AsRef<str>>(&mut self, syllables: &[S]) {
        if syllables.is_empty() || syllables.iter().any(|s| is_sentinel(s.as_ref())) {
            return;
        }
        let mut node = 0;
        for syl in syllables {
            let key = normalize_syllable(syl.as_ref());
            node = match self.nodes[node].children.get(&key) {
                Some(&next) => next,
                None => {
                    let next = self.nodes.len();
                    self.nodes.push(Node::default());
                    self.nodes[node].children.insert(key, next);
                    next
                }
            };
        }
        if !self.nodes[node].terminal {
            self.nodes[node].terminal = true;
            self.size += 1;
            self.max_len = self.max_len.max(syllables.len());
        }
    }

    /// Exact-entry membership for already-normalized syllables.
    pub fn contains<S: AsRef<str>>(&self, syllables: &[S]) -> bool {
        if syllables.is_empty() || syllables.len() > self.max_len {
            return false;
        }
        let mut node = 0;
        for syl in syllables {
            let syl = syl.as_ref();
            if is_sentinel(syl) {
                return false;
            }
            match self.nodes[node].children.get(syl) {
                Some(&next) => node = next,
                None => return false,
            }
        }
        self.nodes[node].terminal
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// Length in syllables of the longest entry.
    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// All entries as space-joined strings, sorted.
    pub fn entries(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<(usize, Vec<&str>)> = vec![(0, Vec::new())];
        while let Some((node, path)) = stack.pop() {
            if self.nodes[node].terminal {
                out.insert(path.join(" "));
            }
            for (syl, &child) in &self.nodes[node].children {
                let mut next = path.clone();
                next.push(syl);
                stack.push((child, next));
            }
        }
        out
    }

    /// SHA-256 over the sorted entry list; identifies the lexicon content
    /// independently of line order.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        for entry in self.entries() {
            hasher.update(entry.as_bytes());
            hasher.update(b"\n");
        }
        hex::encode(hasher.finalize())
    }
}

pub fn in_dict<S: AsRef<str>>(lexicon: &Lexicon, syllables: &[S]) -> bool {
    lexicon.contains(syllables)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct NameLists {
    family: HashSet<String>,
    middle: HashSet<String>,
}

impl NameLists {
    pub fn new<I, J, S, T>(family: I, middle: J) -> Self
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        NameLists {
            family: family
                .into_iter()
                .map(|s| normalize_syllable(s.as_ref()))
                .collect(),
            middle: middle
                .into_iter()
                .map(|s| normalize_syllable(s.as_ref()))
                .collect(),
        }
    }

    /// Loads either list from a file; `None` leaves that list empty.
    pub fn load(family: Option<&Path>, middle: Option<&Path>) -> Result<Self> {
        let family = family.map(load_name_list).transpose()?.unwrap_or_default();
        let middle = middle.map(load_name_list).transpose()?.unwrap_or_default();
        Ok(NameLists { family, middle })
    }

    pub fn is_family_name(&self, f: &str) -> bool {
        self.family.contains(f)
    }

    pub fn is_middle_name(&self, f: &str) -> bool {
        self.middle.contains(f)
    }

    pub fn family(&self) -> impl Iterator<Item = &str> {
        self.family.iter().map(String::as_str)
    }

    pub fn middle(&self) -> impl Iterator<Item = &str> {
        self.middle.iter().map(String::as_str)
    }
}

/// One syllable per line.
pub fn load_name_list(path: &Path) -> Result<HashSet<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::resource(path, e))?;
    parse_name_list(text.lines())
}

pub fn parse_name_list<'a, I>(lines: I) -> Result<HashSet<String>>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut out = HashSet::new();
    for (no, line) in lines.into_iter().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line.chars().any(char::is_whitespace) || line.contains('_') {
            return Err(Error::MalformedEntry {
                line: no + 1,
                entry: line.to_string(),
            });
        }
        out.insert(normalize_syllable(line));
    }
    Ok(out)
}
