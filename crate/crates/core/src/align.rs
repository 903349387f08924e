//! One-to-one pairing of estimated mentions with reference mentions, and the
//! counts derived from it.
//!
//! Matching runs in two passes. The first pairs every estimate whose span is
//! identical to a reference span. The second pairs the leftovers greedily by
//! character overlap, largest first, breaking ties by reference start and then
//! estimate start. Entity types play no part in the pairing; they are compared
//! afterwards on the pairs.

use std::collections::{BTreeMap, HashMap};
use std::iter::Sum;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{span_overlap, EntityType, Mention, Span};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlignError {
    #[error("{0} mentions are not sorted by (start, end)")]
    Unsorted(Side),
    #[error("reference mentions {first} and {second} overlap")]
    OverlappingReferences { first: Span, second: Span },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Reference,
    Estimate,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Reference => "reference",
            Side::Estimate => "estimated",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchPair {
    pub ref_index: usize,
    pub est_index: usize,
    pub overlap_chars: usize,
    pub exact: bool,
    pub type_agrees: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alignment {
    /// Sorted by `ref_index`.
    pub pairs: Vec<MatchPair>,
    pub unmatched_refs: Vec<usize>,
    pub unmatched_ests: Vec<usize>,
}

impl Alignment {
    pub fn total_overlap(&self) -> usize {
        self.pairs.iter().map(|p| p.overlap_chars).sum()
    }
}

fn is_sorted(mentions: &[Mention]) -> bool {
    mentions
        .windows(2)
        .all(|w| (w[0].span.start(), w[0].span.end()) <= (w[1].span.start(), w[1].span.end()))
}

pub fn align(refs: &[Mention], ests: &[Mention]) -> Result<Alignment, AlignError> {
    if !is_sorted(refs) {
        return Err(AlignError::Unsorted(Side::Reference));
    }
    if !is_sorted(ests) {
        return Err(AlignError::Unsorted(Side::Estimate));
    }
    if let Some(w) = refs.windows(2).find(|w| w[1].span.start() < w[0].span.end()) {
        return Err(AlignError::OverlappingReferences {
            first: w[0].span,
            second: w[1].span,
        });
    }

    let mut ref_taken = vec![false; refs.len()];
    let mut est_taken = vec![false; ests.len()];
    let mut pairs = Vec::new();

    // Pass 1: identical spans. Reference spans are distinct because they do
    // not overlap, so a lookup by span is unambiguous.
    let by_span: HashMap<Span, usize> = refs.iter().enumerate().map(|(i, m)| (m.span, i)).collect();
    for (j, est) in ests.iter().enumerate() {
        if let Some(&i) = by_span.get(&est.span) {
            if !ref_taken[i] {
                ref_taken[i] = true;
                est_taken[j] = true;
                pairs.push(pair(refs, ests, i, j, true));
            }
        }
    }

    // Pass 2: greedy by overlap among the leftovers.
    let mut candidates = Vec::new();
    for (j, est) in ests.iter().enumerate() {
        if est_taken[j] {
            continue;
        }
        // First reference ending after the estimate starts.
        let first = refs.partition_point(|r| r.span.end() <= est.span.start());
        for (i, r) in refs.iter().enumerate().skip(first) {
            if r.span.start() >= est.span.end() {
                break;
            }
            if ref_taken[i] {
                continue;
            }
            let overlap = span_overlap(r.span, est.span);
            if overlap > 0 {
                candidates.push((overlap, i, j));
            }
        }
    }
    candidates.sort_by(|a, b| {
        b.0.cmp(&a.0)
            .then(refs[a.1].span.start().cmp(&refs[b.1].span.start()))
            .then(ests[a.2].span.start().cmp(&ests[b.2].span.start()))
            .then(a.2.cmp(&b.2))
    });
    for (_, i, j) in candidates {
        if ref_taken[i] || est_taken[j] {
            continue;
        }
        ref_taken[i] = true;
        est_taken[j] = true;
        pairs.push(pair(refs, ests, i, j, false));
    }

    pairs.sort_by_key(|p| p.ref_index);
    Ok(Alignment {
        pairs,
        unmatched_refs: (0..refs.len()).filter(|&i| !ref_taken[i]).collect(),
        unmatched_ests: (0..ests.len()).filter(|&j| !est_taken[j]).collect(),
    })
}

fn pair(refs: &[Mention], ests: &[Mention], i: usize, j: usize, exact: bool) -> MatchPair {
    MatchPair {
        ref_index: i,
        est_index: j,
        overlap_chars: span_overlap(refs[i].span, ests[j].span),
        exact,
        type_agrees: refs[i].entity_type == ests[j].entity_type,
    }
}

/// Full match, partial match, wrong hit and complete miss tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpatialCounts {
    pub fm: u64,
    pub pm: u64,
    pub wh: u64,
    pub cm: u64,
}

impl SpatialCounts {
    pub fn new(fm: u64, pm: u64, wh: u64, cm: u64) -> Self {
        SpatialCounts { fm, pm, wh, cm }
    }

    pub fn estimated(&self) -> u64 {
        self.fm + self.pm + self.wh
    }

    pub fn reference(&self) -> u64 {
        self.fm + self.pm + self.cm
    }

    /// The traditional exact-match view of the same outcome.
    pub fn to_exact(&self) -> Tally {
        Tally {
            tp: self.fm,
            fp: self.pm + self.wh,
            fn_: self.pm + self.cm,
        }
    }
}

/// True positive, false positive and false negative tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tally {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl Tally {
    pub fn new(tp: u64, fp: u64, fn_: u64) -> Self {
        Tally { tp, fp, fn_ }
    }
}

pub type ExactCounts = Tally;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypedCounts {
    pub overall: Tally,
    /// Always holds an entry for every entity type.
    pub per_type: BTreeMap<EntityType, Tally>,
}

impl Default for TypedCounts {
    fn default() -> Self {
        TypedCounts {
            overall: Tally::default(),
            per_type: EntityType::ALL.iter().map(|&t| (t, Tally::default())).collect(),
        }
    }
}

impl TypedCounts {
    /// A view holding only one type, with that type's tally as the overall row.
    pub fn scoped(&self, ty: EntityType) -> TypedCounts {
        let tally = self.per_type[&ty];
        let mut scoped = TypedCounts {
            overall: tally,
            ..TypedCounts::default()
        };
        scoped.per_type.insert(ty, tally);
        scoped
    }
}

macro_rules! additive {
    ($ty:ty, $($field:ident),+) => {
        impl AddAssign for $ty {
            fn add_assign(&mut self, rhs: Self) {
                $(self.$field += rhs.$field;)+
            }
        }

        impl Add for $ty {
            type Output = Self;

            fn add(mut self, rhs: Self) -> Self {
                self += rhs;
                self
            }
        }

        impl Sum for $ty {
            fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
                iter.fold(Self::default(), Add::add)
            }
        }
    };
}

additive!(SpatialCounts, fm, pm, wh, cm);
additive!(Tally, tp, fp, fn_);

impl AddAssign for TypedCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.overall += rhs.overall;
        for (ty, tally) in rhs.per_type {
            *self.per_type.entry(ty).or_default() += tally;
        }
    }
}

impl Add for TypedCounts {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

pub fn spatial_counts(a: &Alignment) -> SpatialCounts {
    let fm = a.pairs.iter().filter(|p| p.exact).count() as u64;
    SpatialCounts {
        fm,
        pm: a.pairs.len() as u64 - fm,
        wh: a.unmatched_ests.len() as u64,
        cm: a.unmatched_refs.len() as u64,
    }
}

pub fn exact_counts(a: &Alignment) -> ExactCounts {
    let tp = a.pairs.iter().filter(|p| p.exact).count() as u64;
    let estimated = (a.pairs.len() + a.unmatched_ests.len()) as u64;
    let reference = (a.pairs.len() + a.unmatched_refs.len()) as u64;
    Tally {
        tp,
        fp: estimated - tp,
        fn_: reference - tp,
    }
}

/// Type agreement over the pairs of `a`. A wrong-type pair is a false
/// positive under the estimated type and a false negative under the
/// reference type.
pub fn typed_counts(a: &Alignment, refs: &[Mention], ests: &[Mention]) -> TypedCounts {
    let mut out = TypedCounts::default();
    let mut bump = |ty: EntityType, f: fn(&mut Tally)| {
        f(&mut out.overall);
        f(out.per_type.entry(ty).or_default());
    };
    for p in &a.pairs {
        let (r, e) = (refs[p.ref_index].entity_type, ests[p.est_index].entity_type);
        if p.type_agrees {
            bump(r, |t| t.tp += 1);
        } else {
            bump(e, |t| t.fp += 1);
            bump(r, |t| t.fn_ += 1);
        }
    }
    for &j in &a.unmatched_ests {
        bump(ests[j].entity_type, |t| t.fp += 1);
    }
    for &i in &a.unmatched_refs {
        bump(refs[i].entity_type, |t| t.fn_ += 1);
    }
    out
}
