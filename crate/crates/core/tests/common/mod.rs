#![allow(dead_code)]

use std::path::PathBuf;

use nereval::model::{AnnotationSet, EntityType, Mention, Span};
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::Rng;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn mention(start: usize, end: usize, ty: EntityType) -> Mention {
    Mention {
        span: Span::new(start, end).unwrap(),
        entity_type: ty,
        surface: String::new(),
    }
}

pub fn sorted(mut v: Vec<Mention>) -> Vec<Mention> {
    v.sort_by_key(|m| (m.span.start(), m.span.end(), m.entity_type));
    v
}

/// Up to `max_n` non-overlapping references: alternating gaps and mention
/// lengths.
pub fn random_refs<R: Rng>(rng: &mut R, max_n: usize, max_gap: usize, max_len: usize) -> Vec<Mention> {
    let n = rng.random_range(0..=max_n);
    let mut out = Vec::with_capacity(n);
    let mut pos = 0;
    for _ in 0..n {
        pos += rng.random_range(0..=max_gap);
        let len = rng.random_range(1..=max_len);
        out.push(mention(pos, pos + len, *EntityType::ALL.choose(rng).unwrap()));
        pos += len;
    }
    out
}

/// Up to `max_n` estimates starting within `[0, limit)`, possibly overlapping
/// each other. Some copy reference spans so exact matches are common.
pub fn random_ests<R: Rng>(rng: &mut R, refs: &[Mention], max_n: usize, limit: usize, max_len: usize) -> Vec<Mention> {
    let n = rng.random_range(0..=max_n);
    let limit = limit.max(1);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let ty = *EntityType::ALL.choose(rng).unwrap();
        if !refs.is_empty() && rng.random_bool(0.3) {
            let r = refs.choose(rng).unwrap();
            out.push(mention(r.span.start(), r.span.end(), ty));
        } else {
            let start = rng.random_range(0..limit);
            let len = rng.random_range(1..=max_len);
            out.push(mention(start, start + len, ty));
        }
    }
    sorted(out)
}

pub fn extent(mentions: &[Mention]) -> usize {
    mentions.iter().map(|m| m.span.end()).max().unwrap_or(0)
}

fn overlap(a: Span, b: Span) -> usize {
    let lo = a.start().max(b.start());
    let hi = a.end().min(b.end());
    hi.saturating_sub(lo)
}

/// Maximum total overlap over all one-to-one assignments between the given
/// reference and estimate indices, by exhaustive search.
pub fn brute_force_max_overlap(refs: &[Mention], ests: &[Mention], ref_idx: &[usize], est_idx: &[usize]) -> usize {
    fn go(refs: &[Mention], ests: &[Mention], ri: &[usize], ei: &[usize], used: &mut Vec<bool>) -> usize {
        let Some((&r, rest)) = ri.split_first() else {
            return 0;
        };
        let mut best = go(refs, ests, rest, ei, used);
        for (k, &e) in ei.iter().enumerate() {
            if used[k] {
                continue;
            }
            let o = overlap(refs[r].span, ests[e].span);
            if o == 0 {
                continue;
            }
            used[k] = true;
            best = best.max(o + go(refs, ests, rest, ei, used));
            used[k] = false;
        }
        best
    }
    go(refs, ests, ref_idx, est_idx, &mut vec![false; est_idx.len()])
}

/// Number of (ref, est) couples that can be matched one-to-one on identical
/// spans.
pub fn identical_pairs(refs: &[Mention], ests: &[Mention]) -> usize {
    let mut used = vec![false; ests.len()];
    let mut n = 0;
    for r in refs {
        if let Some(k) = (0..ests.len()).find(|&k| !used[k] && ests[k].span == r.span) {
            used[k] = true;
            n += 1;
        }
    }
    n
}

pub fn arb_type() -> impl Strategy<Value = EntityType> {
    prop::sample::select(EntityType::ALL.to_vec())
}

/// (refs, ests) with refs non-overlapping and both sides sorted.
pub fn arb_instance(max_refs: usize, max_ests: usize) -> impl Strategy<Value = (Vec<Mention>, Vec<Mention>)> {
    let refs = prop::collection::vec((0usize..6, 1usize..8, arb_type()), 0..=max_refs).prop_map(|parts| {
        let mut pos = 0;
        parts
            .into_iter()
            .map(|(gap, len, ty)| {
                pos += gap;
                let m = mention(pos, pos + len, ty);
                pos += len;
                m
            })
            .collect::<Vec<_>>()
    });
    refs.prop_flat_map(move |refs| {
        let limit = extent(&refs) + 5;
        let n = refs.len();
        let est = prop_oneof![
            (0..n.max(1), arb_type()).prop_map(|(k, ty)| (Some(k), 0, 1, ty)),
            (0..limit, 1usize..12, arb_type()).prop_map(|(s, l, ty)| (None, s, l, ty)),
        ];
        let refs2 = refs.clone();
        prop::collection::vec(est, 0..=max_ests).prop_map(move |raw| {
            let ests = raw
                .into_iter()
                .map(|(k, s, l, ty)| match k {
                    Some(k) if !refs2.is_empty() => mention(refs2[k].span.start(), refs2[k].span.end(), ty),
                    _ => mention(s, s + l, ty),
                })
                .collect();
            (refs2.clone(), sorted(ests))
        })
    })
}

/// Annotation set over generated text, with surfaces that stress escaping.
pub fn arb_set() -> impl Strategy<Value = (String, AnnotationSet)> {
    let piece = prop_oneof![
        Just("a".to_string()),
        Just("Zürich".to_string()),
        Just("\t".to_string()),
        Just("\n".to_string()),
        Just("\\".to_string()),
        Just("#".to_string()),
        Just(" ".to_string()),
        Just("日本".to_string()),
        Just("\r".to_string()),
        "[a-zA-Z0-9 ]{1,6}",
    ];
    prop::collection::vec(piece, 1..40)
        .prop_map(|p| p.concat())
        .prop_flat_map(|text| {
            let len = text.chars().count();
            let spans = prop::collection::vec((0..len, 1usize..10, arb_type()), 0..12);
            (Just(text), spans)
        })
        .prop_map(|(text, spans)| {
            let len = text.chars().count();
            let mentions = spans
                .into_iter()
                .filter_map(|(s, l, ty)| Mention::from_text(&text, Span::new(s, (s + l).min(len)).ok()?, ty))
                .collect::<Vec<_>>();
            let mut mentions = mentions;
            mentions.sort_by_key(|m| (m.span.start(), m.span.end(), m.entity_type));
            mentions.dedup_by_key(|m| (m.span, m.entity_type));
            let set = AnnotationSet::with_mentions("doc", "sys", mentions);
            (text, set)
        })
}
