use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::CocoError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Val,
}

impl Split {
    pub const ALL: [Split; 2] = [Split::Train, Split::Val];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Requested number of checks per (split, genuineness).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    pub genuine_train: usize,
    pub genuine_val: usize,
    pub forged_train: usize,
    pub forged_val: usize,
    /// Keep every writer's checks inside a single split.
    #[serde(default)]
    pub writer_disjoint: bool,
}

impl SplitConfig {
    /// 2352/1008 genuine and 700/300 forged.
    pub fn reference() -> Self {
        SplitConfig {
            genuine_train: 2352,
            genuine_val: 1008,
            forged_train: 700,
            forged_val: 300,
            writer_disjoint: false,
        }
    }

    pub fn total(&self, split: Split) -> usize {
        self.count(split, false) + self.count(split, true)
    }

    pub fn count(&self, split: Split, forged: bool) -> usize {
        match (split, forged) {
            (Split::Train, false) => self.genuine_train,
            (Split::Val, false) => self.genuine_val,
            (Split::Train, true) => self.forged_train,
            (Split::Val, true) => self.forged_val,
        }
    }
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig::reference()
    }
}

/// What split assignment needs to know about a check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitKey {
    pub forged: bool,
    pub person_id: String,
}

/// Assigns exactly the requested number of genuine and forged items to
/// each split, uniformly at random among eligible items. Unselected items
/// map to `None`.
pub fn assign_splits<R: Rng + ?Sized>(
    items: &[SplitKey],
    cfg: &SplitConfig,
    rng: &mut R,
) -> Result<Vec<Option<Split>>, CocoError> {
    for forged in [false, true] {
        let available = items.iter().filter(|k| k.forged == forged).count();
        let requested = cfg.count(Split::Train, forged) + cfg.count(Split::Val, forged);
        if available < requested {
            return Err(CocoError::Insufficient {
                class: if forged { "forged" } else { "genuine" },
                requested,
                available,
            });
        }
    }
    let mut out = vec![None; items.len()];
    if cfg.writer_disjoint {
        assign_writer_disjoint(items, cfg, rng, &mut out)?;
    } else {
        for forged in [false, true] {
            let mut pool: Vec<usize> = (0..items.len()).filter(|&i| items[i].forged == forged).collect();
            pool.shuffle(rng);
            let n_train = cfg.count(Split::Train, forged);
            let n_val = cfg.count(Split::Val, forged);
            for &i in &pool[..n_train] {
                out[i] = Some(Split::Train);
            }
            for &i in &pool[n_train..n_train + n_val] {
                out[i] = Some(Split::Val);
            }
        }
    }
    Ok(out)
}

fn assign_writer_disjoint<R: Rng + ?Sized>(
    items: &[SplitKey],
    cfg: &SplitConfig,
    rng: &mut R,
    out: &mut [Option<Split>],
) -> Result<(), CocoError> {
    // Per person: (genuine indices, forged indices).
    let mut by_person: BTreeMap<&str, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (i, k) in items.iter().enumerate() {
        let e = by_person.entry(k.person_id.as_str()).or_default();
        if k.forged {
            e.1.push(i);
        } else {
            e.0.push(i);
        }
    }
    let mut persons: Vec<&str> = by_person.keys().copied().collect();
    persons.shuffle(rng);

    let mut train_pool = (Vec::new(), Vec::new());
    let mut val_pool = (Vec::new(), Vec::new());
    for p in persons {
        let (g, f) = &by_person[p];
        let train_full = train_pool.0.len() >= cfg.genuine_train && train_pool.1.len() >= cfg.forged_train;
        let pool = if train_full { &mut val_pool } else { &mut train_pool };
        pool.0.extend_from_slice(g);
        pool.1.extend_from_slice(f);
    }
    for (split, pool) in [(Split::Train, &mut train_pool), (Split::Val, &mut val_pool)] {
        for (forged, indices) in [(false, &mut pool.0), (true, &mut pool.1)] {
            let n = cfg.count(split, forged);
            if indices.len() < n {
                return Err(CocoError::WriterDisjointInfeasible);
            }
            indices.sort_unstable();
            indices.shuffle(rng);
            for &i in &indices[..n] {
                out[i] = Some(split);
            }
        }
    }
    Ok(())
}
