//! Party sets, partitions, bipartitions and the coarser-than order.
//!
//! Blocks are bitmasks over party indices `0..m`. Canonical form sorts blocks
//! by their least party index, so a bipartition's `side_a` always holds party 0.

use std::fmt;

use crate::error::{Error, Result};

/// Largest party count for which every partition is enumerated.
pub const PARTITION_ENUMERATION_LIMIT: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartySet {
    labels: Vec<String>,
}

impl PartySet {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.len() < 2 {
            return Err(Error::InvalidPartition(format!(
                "need at least 2 parties, got {}",
                labels.len()
            )));
        }
        if labels.len() > 64 {
            return Err(Error::InvalidPartition("at most 64 parties".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() || labels[..i].contains(l) {
                return Err(Error::InvalidPartition(format!("bad or duplicate label {l:?}")));
            }
        }
        Ok(Self { labels })
    }

    /// `A1, …, Am`.
    pub fn standard(m: usize) -> Result<Self> {
        Self::new((1..=m).map(|i| format!("A{i}")).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, party: usize) -> &str {
        &self.labels[party]
    }

    fn block_label(&self, mask: u64) -> String {
        (0..self.len())
            .filter(|&p| mask & (1 << p) != 0)
            .map(|p| self.labels[p].as_str())
            .collect()
    }
}

fn full_mask(m: usize) -> u64 {
    if m == 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

fn members(mask: u64) -> Vec<usize> {
    (0..64).filter(|&p| mask & (1 << p) != 0).collect()
}

/// Division of the parties into disjoint nonempty blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    m: usize,
    blocks: Vec<u64>,
}

impl Partition {
    pub fn new(m: usize, mut blocks: Vec<u64>) -> Result<Self> {
        if !(1..=64).contains(&m) {
            return Err(Error::InvalidPartition(format!("party count {m} out of range")));
        }
        let full = full_mask(m);
        let mut seen = 0u64;
        for &b in &blocks {
            if b == 0 {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            if b & !full != 0 {
                return Err(Error::InvalidPartition("block names an unknown party".into()));
            }
            if b & seen != 0 {
                return Err(Error::InvalidPartition("blocks overlap".into()));
            }
            seen |= b;
        }
        if seen != full {
            return Err(Error::InvalidPartition("blocks do not cover every party".into()));
        }
        blocks.sort_by_key(|b| b.trailing_zeros());
        Ok(Self { m, blocks })
    }

    /// Blocks given as lists of party indices.
    pub fn from_blocks(m: usize, blocks: &[&[usize]]) -> Result<Self> {
        let masks = blocks
            .iter()
            .map(|b| {
                b.iter().try_fold(0u64, |acc, &p| {
                    if p >= m || acc & (1 << p) != 0 {
                        Err(Error::InvalidPartition(format!("bad party index {p}")))
                    } else {
                        Ok(acc | (1 << p))
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(m, masks)
    }

    /// The single-block partition `G`.
    pub fn trivial(m: usize) -> Self {
        Self {
            m,
            blocks: vec![full_mask(m)],
        }
    }

    /// Every party in its own block.
    pub fn finest(m: usize) -> Self {
        Self {
            m,
            blocks: (0..m).map(|p| 1u64 << p).collect(),
        }
    }

    pub fn num_parties(&self) -> usize {
        self.m
    }

    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }

    pub fn block_members(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|&b| members(b)).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.blocks.len() == 1
    }

    pub fn label(&self, parties: &PartySet) -> String {
        self.blocks
            .iter()
            .map(|&b| parties.block_label(b))
            .collect::<Vec<_>>()
            .join("|")
    }

    /// Parses `"A1A3|A2"`-style labels. Labels inside a block are matched
    /// longest-first.
    pub fn parse(text: &str, parties: &PartySet) -> Result<Self> {
        let mut order: Vec<usize> = (0..parties.len()).collect();
        order.sort_by_key(|&p| std::cmp::Reverse(parties.label(p).len()));
        let mut blocks = Vec::new();
        for chunk in text.split('|') {
            let mut rest = chunk.trim();
            let mut mask = 0u64;
            while !rest.is_empty() {
                let p = order
                    .iter()
                    .copied()
                    .find(|&p| rest.starts_with(parties.label(p)))
                    .ok_or_else(|| Error::InvalidPartition(format!("unknown label in {chunk:?}")))?;
                mask |= 1 << p;
                rest = &rest[parties.label(p).len()..];
            }
            blocks.push(mask);
        }
        Self::new(parties.len(), blocks)
    }

    /// True iff every block of `finer` lies inside some block of `self`.
    pub fn is_coarser_than(&self, finer: &Partition) -> Result<bool> {
        if self.m != finer.m {
            return Err(Error::PartySetMismatch(self.m, finer.m));
        }
        Ok(finer.blocks.iter().all(|&b| self.blocks.iter().any(|&x| b & !x == 0)))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match PartySet::standard(self.m.max(2)) {
            Ok(ps) => f.write_str(&self.label(&ps)),
            Err(_) => write!(f, "{:?}", self.blocks),
        }
    }
}

/// Two-block partition; `side_a` holds party 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bipartition {
    m: usize,
    side_a: u64,
}

impl Bipartition {
    pub fn new(m: usize, side: u64) -> Result<Self> {
        if !(2..=64).contains(&m) {
            return Err(Error::InvalidPartition(format!("party count {m} out of range")));
        }
        let full = full_mask(m);
        if side == 0 || side & !full != 0 || side == full {
            return Err(Error::InvalidPartition(format!("{side:#b} is not a proper side")));
        }
        let side_a = if side & 1 != 0 { side } else { full & !side };
        Ok(Self { m, side_a })
    }

    pub fn num_parties(&self) -> usize {
        self.m
    }

    pub fn side_a_mask(&self) -> u64 {
        self.side_a
    }

    pub fn side_b_mask(&self) -> u64 {
        full_mask(self.m) & !self.side_a
    }

    pub fn side_a(&self) -> Vec<usize> {
        members(self.side_a)
    }

    pub fn side_b(&self) -> Vec<usize> {
        members(self.side_b_mask())
    }

    pub fn as_partition(&self) -> Partition {
        Partition {
            m: self.m,
            blocks: vec![self.side_a, self.side_b_mask()],
        }
    }

    pub fn label(&self, parties: &PartySet) -> String {
        self.as_partition().label(parties)
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.as_partition().fmt(f)
    }
}

/// All `2^{m−1} − 1` bipartitions, ordered by `side_a` mask.
pub fn all_bipartitions(m: usize) -> Vec<Bipartition> {
    if m < 2 {
        return Vec::new();
    }
    let full = full_mask(m);
    (0..(1u64 << (m - 1)))
        .map(|rest| 1 | (rest << 1))
        .filter(|&side| side != full)
        .map(|side_a| Bipartition { m, side_a })
        .collect()
}

/// Every partition of `m` parties, enumerated as restricted-growth strings.
pub fn all_partitions(m: usize) -> Result<Vec<Partition>> {
    if m > PARTITION_ENUMERATION_LIMIT {
        return Err(Error::PartitionGuard {
            m,
            limit: PARTITION_ENUMERATION_LIMIT,
        });
    }
    if m < 2 {
        return Err(Error::InvalidPartition(format!("need at least 2 parties, got {m}")));
    }
    let mut out = Vec::new();
    // rgs[i] ≤ 1 + max(rgs[..i]); `maxes[i]` caches that prefix maximum.
    let mut rgs = vec![0usize; m];
    let mut maxes = vec![0usize; m];
    loop {
        let nblocks = maxes[m - 1] + 1;
        let mut blocks = vec![0u64; nblocks];
        for (p, &b) in rgs.iter().enumerate() {
            blocks[b] |= 1 << p;
        }
        out.push(Partition { m, blocks });

        let mut i = m - 1;
        loop {
            if i == 0 {
                return Ok(out);
            }
            if rgs[i] <= maxes[i - 1] {
                rgs[i] += 1;
                maxes[i] = maxes[i - 1].max(rgs[i]);
                for j in i + 1..m {
                    rgs[j] = 0;
                    maxes[j] = maxes[i];
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Every bipartition coarser than `x`: 2-colorings of its blocks.
pub fn coarser_bipartitions(x: &Partition) -> Result<Vec<Bipartition>> {
    if x.is_trivial() {
        return Err(Error::NoCoarserBipartition);
    }
    let k = x.blocks.len();
    // blocks[0] holds party 0 and stays on side_a.
    let mut out = Vec::with_capacity((1 << (k - 1)) - 1);
    for coloring in 0..(1u64 << (k - 1)) - 1 {
        let mut side = x.blocks[0];
        for (j, &b) in x.blocks[1..].iter().enumerate() {
            if coloring & (1 << j) != 0 {
                side |= b;
            }
        }
        out.push(Bipartition { m: x.m, side_a: side });
    }
    Ok(out)
}
