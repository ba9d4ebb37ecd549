//! Feature templates for a single gap decision.
//!
//! A decision at gap `i` (between syllables `i` and `i + 1`) sees the whole
//! sentence and the labels already assigned to gaps `0..i`. Four template
//! groups are available:
//!
//! * `base`: syllable uni/bigrams in a five-syllable window, lexicon
//!   membership of 2-, 3- and 4-grams around the gap, syllable-type n-grams
//!   of non-lexicon spans, reduplication and person-name flags.
//! * `long`: lexicon membership of 5- to 9-grams covering syllable `i`.
//! * `sep`: overlap-ambiguity signals. When syllable `i` starts a word and is
//!   separable, or when the partial word ending at `i` plus syllable `i + 1`
//!   is a lexicon entry, every 2- to 5-gram in the five-syllable window from
//!   the word start is checked against the lexicon and both outcomes are
//!   recorded.
//! * `sfx`: when the next syllable is a known suffix and the partial word
//!   ending at `i` has two or three syllables, the stem, the suffix and two
//!   syllables of context on either side.
//!
//! Feature names follow a fixed grammar so that each group owns a distinct
//! prefix: `B1[-2]=hiện`, `B3[0]`, `B6=UPPER UPPER`, `B8`, `L5[4]`,
//! `A2:3g[0]=1`, `S:sfx=hoá`, `BIAS`. Out-of-range positions read as the
//! sentinels `<s>` / `</s>` with type `OTHER` and never match the lexicon.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::corpus::{Label, Sentence, SyllableType};
use crate::error::{Error, Result};
use crate::resources::{Lexicon, NameLists, BOS, EOS};
use crate::stats::DerivedStats;
use crate::svm::SparseVector;

pub const BIAS: &str = "BIAS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FeatureConfig {
    pub base: bool,
    pub long: bool,
    pub sep: bool,
    pub sfx: bool,
}

impl FeatureConfig {
    pub const fn new(base: bool, long: bool, sep: bool, sfx: bool) -> Self {
        FeatureConfig {
            base,
            long,
            sep,
            sfx,
        }
    }

    pub const fn all() -> Self {
        Self::new(true, true, true, true)
    }

    pub const fn baseline() -> Self {
        Self::new(true, false, false, false)
    }

    pub fn validate(&self) -> Result<()> {
        if self.base || self.long || self.sep || self.sfx {
            Ok(())
        } else {
            Err(Error::InvalidConfig("no feature group enabled".into()))
        }
    }

    fn groups(&self) -> Vec<&'static str> {
        [
            (self.base, "base"),
            (self.long, "long"),
            (self.sep, "sep"),
            (self.sfx, "sfx"),
        ]
        .into_iter()
        .filter_map(|(on, name)| on.then_some(name))
        .collect()
    }

    /// Comma list, e.g. `base,sep,sfx`.
    pub fn to_list(&self) -> String {
        self.groups().join(",")
    }

    /// The eight configurations that include `base`, in ablation-table order.
    pub fn ablation_grid() -> [FeatureConfig; 8] {
        [
            Self::new(true, false, false, false),
            Self::new(true, true, false, false),
            Self::new(true, false, true, false),
            Self::new(true, false, false, true),
            Self::new(true, true, true, false),
            Self::new(true, true, false, true),
            Self::new(true, false, true, true),
            Self::new(true, true, true, true),
        ]
    }
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self::all()
    }
}

/// `base + long + sep`
impl fmt::Display for FeatureConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.groups().join(" + "))
    }
}

impl FromStr for FeatureConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut cfg = FeatureConfig::new(false, false, false, false);
        for part in s.split([',', '+']).map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "base" => cfg.base = true,
                "long" => cfg.long = true,
                "sep" => cfg.sep = true,
                "sfx" => cfg.sfx = true,
                "all" => cfg = FeatureConfig::all(),
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "unknown feature group {other:?}"
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// The decision at gap `i` given labels for gaps `0..i`.
#[derive(Clone, Copy, Debug)]
pub struct GapContext<'a> {
    sentence: &'a Sentence,
    i: usize,
    prev: &'a [Label],
}

impl<'a> GapContext<'a> {
    pub fn new(sentence: &'a Sentence, i: usize, prev_labels: &'a [Label]) -> Result<Self> {
        if i + 1 >= sentence.len() || prev_labels.len() != i {
            return Err(Error::BadInput(format!(
                "gap {i} with {} previous labels in a {}-syllable sentence",
                prev_labels.len(),
                sentence.len()
            )));
        }
        Ok(GapContext {
            sentence,
            i,
            prev: prev_labels,
        })
    }

    pub fn sentence(&self) -> &'a Sentence {
        self.sentence
    }

    pub fn gap(&self) -> usize {
        self.i
    }

    pub fn prev_labels(&self) -> &'a [Label] {
        self.prev
    }

    fn f(&self, j: isize) -> &'a str {
        if j < 0 {
            BOS
        } else {
            self.sentence
                .norm()
                .get(j as usize)
                .map_or(EOS, String::as_str)
        }
    }

    fn t(&self, j: isize) -> SyllableType {
        if j < 0 {
            SyllableType::Other
        } else {
            self.sentence
                .types()
                .get(j as usize)
                .copied()
                .unwrap_or(SyllableType::Other)
        }
    }

    /// `n` normalized syllables starting at `j`, or `None` when any falls outside.
    fn gram(&self, j: isize, n: usize) -> Option<&'a [String]> {
        let start = usize::try_from(j).ok()?;
        self.sentence.norm().get(start..start + n)
    }

    fn in_dict(&self, lexicon: &Lexicon, j: isize, n: usize) -> bool {
        self.gram(j, n).is_some_and(|g| lexicon.contains(g))
    }

    fn joined(&self, from: isize, to: isize) -> String {
        (from..=to).map(|j| self.f(j)).collect::<Vec<_>>().join(" ")
    }
}

/// Multiset of feature strings in emission order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FeatureBag {
    items: Vec<String>,
}

impl FeatureBag {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, feature: String) {
        self.items.push(feature);
    }

    pub fn extend(&mut self, other: FeatureBag) {
        self.items.extend(other.items);
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.items.iter().map(String::as_str)
    }

    pub fn counts(&self) -> BTreeMap<String, u32> {
        let mut out = BTreeMap::new();
        for item in &self.items {
            *out.entry(item.clone()).or_default() += 1;
        }
        out
    }
}

pub fn extract_base(ctx: &GapContext<'_>, lexicon: &Lexicon, names: &NameLists) -> FeatureBag {
    let mut bag = FeatureBag::new();
    let i = ctx.i as isize;

    for d in -2..=2 {
        bag.push(format!("B1[{d:+}]={}", ctx.f(i + d)));
    }
    for d in -2..=1 {
        bag.push(format!("B2[{d:+}]={} {}", ctx.f(i + d), ctx.f(i + d + 1)));
    }

    for (template, n, from) in [(3, 2, i - 2), (4, 3, i - 2), (5, 4, i - 3)] {
        let to = if n == 2 { i + 1 } else { i };
        for j in from..=to {
            if ctx.in_dict(lexicon, j, n) {
                bag.push(format!("B{template}[{}]", i - j));
            }
        }
    }

    for j in (i - 2)..=(i + 1) {
        if ctx.t(j) != SyllableType::Lower && !ctx.in_dict(lexicon, j, 2) {
            bag.push(format!("B6={} {}", ctx.t(j), ctx.t(j + 1)));
        }
    }
    for j in (i - 2)..=i {
        if ctx.t(j) != SyllableType::Lower && !ctx.in_dict(lexicon, j, 3) {
            bag.push(format!("B7={} {} {}", ctx.t(j), ctx.t(j + 1), ctx.t(j + 2)));
        }
    }

    let (ti, tn) = (ctx.t(i), ctx.t(i + 1));
    if ti == SyllableType::Lower && tn == SyllableType::Lower && ctx.f(i) == ctx.f(i + 1) {
        bag.push("B8".into());
    }
    if ti == SyllableType::Upper && tn == SyllableType::Upper {
        if names.is_family_name(ctx.f(i)) {
            bag.push("B9".into());
        }
        if names.is_middle_name(ctx.f(i)) {
            bag.push("B10".into());
        }
    }
    bag
}

pub fn extract_long(ctx: &GapContext<'_>, lexicon: &Lexicon) -> FeatureBag {
    let mut bag = FeatureBag::new();
    let i = ctx.i as isize;
    for n in 5..=9usize {
        if n > lexicon.max_len() {
            break;
        }
        for j in (i - (n as isize - 1))..=i {
            if ctx.in_dict(lexicon, j, n) {
                bag.push(format!("L{n}[{}]", i - j));
            }
        }
    }
    bag
}

/// Which ambiguity case fires at this gap, and where its window starts.
/// Longer spans take priority; at most one case fires.
pub fn ambiguity_case(
    ctx: &GapContext<'_>,
    lexicon: &Lexicon,
    stats: &DerivedStats,
) -> Option<(usize, usize)> {
    let i = ctx.i;
    let prev = ctx.prev;
    for case in (2..=4).rev() {
        let Some(start) = i.checked_sub(case - 1) else {
            continue;
        };
        let opens_word = start == 0 || prev[start - 1] == Label::Space;
        let joined = prev[start..i].iter().all(|&l| l == Label::Underscore);
        if opens_word && joined && ctx.in_dict(lexicon, start as isize, case + 1) {
            return Some((case, start));
        }
    }
    let opens_word = i == 0 || prev[i - 1] == Label::Space;
    if opens_word && stats.is_separable(ctx.f(i as isize)) {
        return Some((1, i));
    }
    None
}

pub fn extract_sep(ctx: &GapContext<'_>, lexicon: &Lexicon, stats: &DerivedStats) -> FeatureBag {
    let mut bag = FeatureBag::new();
    let Some((case, start)) = ambiguity_case(ctx, lexicon, stats) else {
        return bag;
    };
    let s = start as isize;
    for n in 2..=5usize {
        for j in s..=(s + 5 - n as isize) {
            let hit = u8::from(ctx.in_dict(lexicon, j, n));
            bag.push(format!("A{case}:{n}g[{}]={hit}", j - s));
        }
    }
    bag
}

pub fn extract_sfx(ctx: &GapContext<'_>, stats: &DerivedStats) -> FeatureBag {
    let mut bag = FeatureBag::new();
    let i = ctx.i as isize;
    let next = ctx.f(i + 1);
    if !stats.is_suffix(next) {
        return bag;
    }
    let width = 1 + ctx
        .prev
        .iter()
        .rev()
        .take_while(|&&l| l == Label::Underscore)
        .count() as isize;
    if !(2..=3).contains(&width) {
        return bag;
    }
    let off = width - 2;
    bag.push(format!("S:stem={}", ctx.joined(i - 1 - off, i)));
    bag.push(format!("S:sfx={next}"));
    bag.push(format!("S:l1={}", ctx.f(i - 2 - off)));
    bag.push(format!("S:l2={}", ctx.f(i - 3 - off)));
    bag.push(format!("S:r1={}", ctx.f(i + 2)));
    bag.push(format!("S:r2={}", ctx.f(i + 3)));
    bag
}

/// Resources shared by every extraction call.
#[derive(Clone, Copy, Debug)]
pub struct Extractor<'a> {
    pub config: FeatureConfig,
    pub lexicon: &'a Lexicon,
    pub names: &'a NameLists,
    pub stats: &'a DerivedStats,
}

impl<'a> Extractor<'a> {
    pub fn new(
        config: FeatureConfig,
        lexicon: &'a Lexicon,
        names: &'a NameLists,
        stats: &'a DerivedStats,
    ) -> Self {
        Extractor {
            config,
            lexicon,
            names,
            stats,
        }
    }

    /// Enabled groups plus the constant `BIAS` feature.
    pub fn extract(&self, ctx: &GapContext<'_>) -> FeatureBag {
        let mut bag = FeatureBag::new();
        if self.config.base {
            bag.extend(extract_base(ctx, self.lexicon, self.names));
        }
        if self.config.long {
            bag.extend(extract_long(ctx, self.lexicon));
        }
        if self.config.sep {
            bag.extend(extract_sep(ctx, self.lexicon, self.stats));
        }
        if self.config.sfx {
            bag.extend(extract_sfx(ctx, self.stats));
        }
        bag.push(BIAS.into());
        bag
    }
}

/// Bidirectional feature string to index map.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FeatureVocabulary {
    index: HashMap<String, u32>,
    names: Vec<String>,
    frozen: bool,
}

impl FeatureVocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a frozen vocabulary from names in index order.
    pub fn from_names(names: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(names.len());
        for (k, name) in names.iter().enumerate() {
            if index.insert(name.clone(), k as u32).is_some() {
                return Err(Error::BadInput(format!("duplicate feature {name:?}")));
            }
        }
        Ok(FeatureVocabulary {
            index,
            names,
            frozen: true,
        })
    }

    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn get(&self, feature: &str) -> Option<u32> {
        self.index.get(feature).copied()
    }

    pub fn name(&self, index: u32) -> Option<&str> {
        self.names.get(index as usize).map(String::as_str)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Realizes `bag` as a sparse count vector. An unfrozen vocabulary
    /// assigns fresh indices to unseen features; a frozen one drops them.
    pub fn intern(&mut self, bag: &FeatureBag) -> SparseVector {
        if self.frozen {
            return self.realize(bag);
        }
        let mut pairs = Vec::with_capacity(bag.len());
        for feature in bag.iter() {
            let idx = match self.index.get(feature) {
                Some(&idx) => idx,
                None => {
                    let idx = self.names.len() as u32;
                    self.index.insert(feature.to_string(), idx);
                    self.names.push(feature.to_string());
                    idx
                }
            };
            pairs.push((idx, 1.0));
        }
        SparseVector::from_pairs(pairs)
    }

    /// Lookup-only realization; unseen features are dropped.
    pub fn realize(&self, bag: &FeatureBag) -> SparseVector {
        SparseVector::from_pairs(
            bag.iter()
                .filter_map(|f| self.get(f))
                .map(|i| (i, 1.0))
                .collect(),
        )
    }
}
