//! Balanced four-way evaluation sets built by pairing videos with audio clips.
//!
//! Every video and every clip is used at most once. Each category first gets
//! `min(|real videos|, |fake videos|, |real clips|, |fake clips|) / 2`
//! pairs; then, in category order, one extra pair is added to each category
//! whose pools still have items, so category sizes differ by at most one.

use std::path::Path;

use deepfuse_core::{FourWayCategory, Label, SeededRng};
use serde::{Deserialize, Serialize};

use crate::error::{io, FusionError, Result};
use crate::verdict::combine;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolItem {
    pub id: String,
    pub label: Label,
}

impl PoolItem {
    pub fn new(id: impl Into<String>, label: Label) -> Self {
        PoolItem { id: id.into(), label }
    }
}

/// One assembled pair and where it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourWaySample {
    pub sample_id: String,
    pub category: FourWayCategory,
    pub video_id: String,
    pub audio_id: String,
}

impl FourWaySample {
    pub fn video_label(&self) -> Label {
        self.category.video_label()
    }

    pub fn audio_label(&self) -> Label {
        self.category.audio_label()
    }

    /// Ground truth of the pair: deepfake if either source is.
    pub fn truth(&self) -> Label {
        combine(self.video_label(), self.audio_label())
    }
}

struct Pool {
    items: Vec<String>,
    next: usize,
}

impl Pool {
    fn new(items: &[PoolItem], label: Label, rng: &mut SeededRng) -> Pool {
        let mut items: Vec<String> = items.iter().filter(|i| i.label == label).map(|i| i.id.clone()).collect();
        items.sort();
        rng.shuffle(&mut items);
        Pool { items, next: 0 }
    }

    fn left(&self) -> usize {
        self.items.len() - self.next
    }

    fn take(&mut self) -> String {
        self.next += 1;
        self.items[self.next - 1].clone()
    }
}

pub fn assemble_fourway(videos: &[PoolItem], audios: &[PoolItem], rng: &mut SeededRng) -> Result<Vec<FourWaySample>> {
    let mut pools = [
        Pool::new(videos, Label::Real, rng),
        Pool::new(videos, Label::Deepfake, rng),
        Pool::new(audios, Label::Real, rng),
        Pool::new(audios, Label::Deepfake, rng),
    ];
    for (p, what) in pools.iter().zip(["real video", "deepfake video", "real audio", "deepfake audio"]) {
        if p.items.is_empty() {
            return Err(FusionError::EmptyPool { what });
        }
    }
    let pool_of = |c: FourWayCategory| {
        let v = if c.video_label() == Label::Real { 0 } else { 1 };
        let a = if c.audio_label() == Label::Real { 2 } else { 3 };
        (v, a)
    };
    let base = pools.iter().map(|p| p.items.len() / 2).min().unwrap();
    let mut counts = [base; 4];
    for p in &mut pools {
        p.next = 2 * base;
    }
    for c in FourWayCategory::ALL {
        let (v, a) = pool_of(c);
        if pools[v].left() > 0 && pools[a].left() > 0 {
            pools[v].next += 1;
            pools[a].next += 1;
            counts[c.index()] += 1;
        }
    }
    for p in &mut pools {
        p.next = 0;
    }
    let mut out = Vec::with_capacity(counts.iter().sum());
    for c in FourWayCategory::ALL {
        let (v, a) = pool_of(c);
        for k in 0..counts[c.index()] {
            let video_id = pools[v].take();
            let audio_id = pools[a].take();
            out.push(FourWaySample {
                sample_id: format!("{}-{k:04}", c.name()),
                category: c,
                video_id,
                audio_id,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Serialize, Deserialize)]
struct PairRow {
    sample_id: String,
    category: String,
    video_id: String,
    audio_id: String,
    video_label: u8,
    audio_label: u8,
}

pub fn write_pairs_csv(samples: &[FourWaySample], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for s in samples {
        w.serialize(PairRow {
            sample_id: s.sample_id.clone(),
            category: s.category.name().to_string(),
            video_id: s.video_id.clone(),
            audio_id: s.audio_id.clone(),
            video_label: s.video_label().as_u8(),
            audio_label: s.audio_label().as_u8(),
        })?;
    }
    w.flush().map_err(|e| io(path, e))?;
    Ok(())
}

pub fn read_pairs_csv(path: impl AsRef<Path>) -> Result<Vec<FourWaySample>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| io(path, e))?;
    let mut out = Vec::new();
    for (i, row) in csv::Reader::from_reader(file).deserialize::<PairRow>().enumerate() {
        let line = i as u64 + 2;
        let row = row?;
        let category: FourWayCategory = row
            .category
            .parse()
            .map_err(|e: String| FusionError::Manifest { line, reason: e })?;
        if category.video_label().as_u8() != row.video_label || category.audio_label().as_u8() != row.audio_label {
            return Err(FusionError::Manifest {
                line,
                reason: format!("labels {}/{} contradict category {}", row.video_label, row.audio_label, row.category),
            });
        }
        out.push(FourWaySample {
            sample_id: row.sample_id,
            category,
            video_id: row.video_id,
            audio_id: row.audio_id,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pool(prefix: &str, real: usize, fake: usize) -> Vec<PoolItem> {
        (0..real)
            .map(|i| PoolItem::new(format!("{prefix}r{i}"), Label::Real))
            .chain((0..fake).map(|i| PoolItem::new(format!("{prefix}f{i}"), Label::Deepfake)))
            .collect()
    }

    fn category_counts(s: &[FourWaySample]) -> [usize; 4] {
        let mut c = [0; 4];
        for x in s {
            c[x.category.index()] += 1;
        }
        c
    }

    #[test]
    fn two_of_each_gives_one_per_category() {
        let s = assemble_fourway(&pool("v", 2, 2), &pool("a", 2, 2), &mut SeededRng::new(1)).unwrap();
        assert_eq!(category_counts(&s), [1, 1, 1, 1]);
        for x in &s {
            assert_eq!(x.video_id.as_bytes()[1] == b'f', x.video_label() == Label::Deepfake);
            assert_eq!(x.audio_id.as_bytes()[1] == b'f', x.audio_label() == Label::Deepfake);
        }
    }

    #[test]
    fn same_seed_same_pairs() {
        let (v, a) = (pool("v", 30, 41), pool("a", 25, 60));
        let x = assemble_fourway(&v, &a, &mut SeededRng::new(4)).unwrap();
        let y = assemble_fourway(&v, &a, &mut SeededRng::new(4)).unwrap();
        assert_eq!(x, y);
        assert_ne!(x, assemble_fourway(&v, &a, &mut SeededRng::new(5)).unwrap());
    }

    #[test]
    fn empty_pool_is_an_error() {
        assert!(assemble_fourway(&pool("v", 2, 0), &pool("a", 2, 2), &mut SeededRng::new(1)).is_err());
    }

    #[test]
    fn manifest_round_trip() {
        let s = assemble_fourway(&pool("v", 5, 6), &pool("a", 7, 4), &mut SeededRng::new(2)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("pairs.csv");
        write_pairs_csv(&s, &p).unwrap();
        assert_eq!(read_pairs_csv(&p).unwrap(), s);
        std::fs::write(&p, "sample_id,category,video_id,audio_id,video_label,audio_label\nx,real-real,a,b,1,0\n").unwrap();
        assert!(matches!(read_pairs_csv(&p), Err(FusionError::Manifest { line: 2, .. })));
    }

    proptest! {
        #[test]
        fn near_balance_without_reuse(vr in 1usize..30, vf in 1usize..30, ar in 1usize..30, af in 1usize..30, seed in 0u64..1000) {
            let s = assemble_fourway(&pool("v", vr, vf), &pool("a", ar, af), &mut SeededRng::new(seed)).unwrap();
            let c = category_counts(&s);
            let (lo, hi) = (*c.iter().min().unwrap(), *c.iter().max().unwrap());
            prop_assert!(hi - lo <= 1);
            let mut vids: Vec<_> = s.iter().map(|x| &x.video_id).collect();
            let mut auds: Vec<_> = s.iter().map(|x| &x.audio_id).collect();
            let n = s.len();
            vids.sort();
            vids.dedup();
            auds.sort();
            auds.dedup();
            prop_assert_eq!(vids.len(), n);
            prop_assert_eq!(auds.len(), n);
            if vr.min(vf).min(ar).min(af) >= 2 {
                prop_assert!(lo >= 1);
            }
        }
    }
}
