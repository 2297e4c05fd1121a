//! Set partitions of `[k] = {1, ..., k}`, the non-crossing predicate, refinement,
//! joins, index kernels and `Z_s`-colored admissibility.
//!
//! A [`Partition`] is stored as its restricted-growth string: position `r` carries
//! the label of its block, and blocks are labelled `0, 1, 2, ...` in order of
//! their minimum element. Structural equality of the labels is equality of
//! partitions, and the derived `Ord` is the lexicographic order on restricted
//! growth strings used by every enumeration in this crate.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};

const RGS_DIGITS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyz";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    labels: Vec<usize>,
    nblocks: usize,
}

impl Partition {
    /// The partition of the empty set.
    pub fn empty() -> Self {
        Partition {
            labels: Vec::new(),
            nblocks: 0,
        }
    }

    pub fn singletons(k: usize) -> Self {
        Partition {
            labels: (0..k).collect(),
            nblocks: k,
        }
    }

    pub fn one_block(k: usize) -> Self {
        Partition {
            labels: vec![0; k],
            nblocks: usize::from(k > 0),
        }
    }

    /// Canonicalizes an arbitrary labelling: positions with equal labels share a block.
    pub fn from_labels<T: PartialEq + Copy>(labels: &[T]) -> Self {
        let mut seen: Vec<T> = Vec::new();
        let mut out = Vec::with_capacity(labels.len());
        for &l in labels {
            let idx = match seen.iter().position(|&s| s == l) {
                Some(i) => i,
                None => {
                    seen.push(l);
                    seen.len() - 1
                }
            };
            out.push(idx);
        }
        Partition {
            labels: out,
            nblocks: seen.len(),
        }
    }

    /// Builds a partition of `[k]` from 1-based blocks.
    pub fn from_blocks(k: usize, blocks: &[&[usize]]) -> Result<Self> {
        let mut labels = vec![usize::MAX; k];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return domain("empty block");
            }
            for &x in block.iter() {
                if x == 0 || x > k {
                    return domain(format!("element {x} outside [1, {k}]"));
                }
                if labels[x - 1] != usize::MAX {
                    return domain(format!("element {x} appears in two blocks"));
                }
                labels[x - 1] = b;
            }
        }
        if let Some(r) = labels.iter().position(|&l| l == usize::MAX) {
            return domain(format!("element {} is not covered", r + 1));
        }
        Ok(Self::from_labels(&labels))
    }

    /// Size of the ground set.
    pub fn k(&self) -> usize {
        self.labels.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.nblocks
    }

    /// Block label of each position (0-based positions, restricted-growth form).
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Blocks as sorted lists of 1-based elements, ordered by minimum.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.nblocks];
        for (r, &l) in self.labels.iter().enumerate() {
            out[l].push(r + 1);
        }
        out
    }

    pub fn rgs(&self) -> String {
        self.labels
            .iter()
            .map(|&l| RGS_DIGITS[l] as char)
            .collect()
    }

    pub fn is_noncrossing(&self) -> bool {
        is_noncrossing(self)
    }

    /// `self ≤ other` in refinement order: every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        if self.k() != other.k() {
            return false;
        }
        let mut image = vec![usize::MAX; self.nblocks];
        for (&a, &b) in self.labels.iter().zip(&other.labels) {
            if image[a] == usize::MAX {
                image[a] = b;
            } else if image[a] != b {
                return false;
            }
        }
        true
    }

    /// Relabels the partition onto the positions `slots` of a larger ground set of size `k`.
    /// Positions outside `slots` get `None`.
    pub fn spread(&self, slots: &[usize], k: usize) -> Vec<Option<usize>> {
        debug_assert_eq!(slots.len(), self.k());
        let mut out = vec![None; k];
        for (&slot, &l) in slots.iter().zip(&self.labels) {
            out[slot] = Some(l);
        }
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, b) in self.blocks().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (j, x) in b.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Parses a restricted-growth string such as `"0011"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut labels = Vec::with_capacity(s.len());
        let mut next = 0usize;
        for c in s.bytes() {
            let l = RGS_DIGITS
                .iter()
                .position(|&d| d == c.to_ascii_lowercase())
                .ok_or_else(|| Error::Domain(format!("invalid restricted-growth digit {:?}", c as char)))?;
            if l > next {
                return domain(format!("{s:?} is not a restricted-growth string"));
            }
            if l == next {
                next += 1;
            }
            labels.push(l);
        }
        Ok(Partition {
            labels,
            nblocks: next,
        })
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.rgs())
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A word over `Z_s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColoredWord {
    s: u32,
    letters: Vec<u32>,
}

impl ColoredWord {
    pub fn new(s: u32, letters: Vec<u32>) -> Result<Self> {
        if s == 0 {
            return domain("modulus s must be positive");
        }
        if let Some(&a) = letters.iter().find(|&&a| a >= s) {
            return domain(format!("letter {a} is not in Z_{s}"));
        }
        Ok(ColoredWord { s, letters })
    }

    /// Reduces arbitrary integers into `Z_s`.
    pub fn from_ints(s: u32, letters: &[i64]) -> Result<Self> {
        if s == 0 {
            return domain("modulus s must be positive");
        }
        let m = i64::from(s);
        Self::new(s, letters.iter().map(|&a| a.rem_euclid(m) as u32).collect())
    }

    pub fn empty(s: u32) -> Self {
        ColoredWord {
            s: s.max(1),
            letters: Vec::new(),
        }
    }

    pub fn modulus(&self) -> u32 {
        self.s
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The sub-word at the given positions.
    pub fn select(&self, slots: &[usize]) -> ColoredWord {
        ColoredWord {
            s: self.s,
            letters: slots.iter().map(|&i| self.letters[i]).collect(),
        }
    }
}

impl fmt::Display for ColoredWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn bell_rgs(k: usize, out: &mut Vec<Partition>, filter: &dyn Fn(&Partition) -> bool) {
    fn rec(
        labels: &mut Vec<usize>,
        next: usize,
        k: usize,
        out: &mut Vec<Partition>,
        filter: &dyn Fn(&Partition) -> bool,
    ) {
        if labels.len() == k {
            let p = Partition {
                labels: labels.clone(),
                nblocks: next,
            };
            if filter(&p) {
                out.push(p);
            }
            return;
        }
        for l in 0..=next {
            labels.push(l);
            rec(labels, next.max(l + 1), k, out, filter);
            labels.pop();
        }
    }
    let mut labels = Vec::with_capacity(k);
    rec(&mut labels, 0, k, out, filter);
}

/// All partitions of `[k]` (or only the non-crossing ones), in lexicographic
/// order of their restricted-growth strings. `k = 0` yields the empty partition.
pub fn enumerate_partitions(k: usize, noncrossing_only: bool) -> Vec<Partition> {
    let mut out = Vec::new();
    if noncrossing_only {
        bell_rgs(k, &mut out, &|p| p.is_noncrossing());
    } else {
        bell_rgs(k, &mut out, &|_| true);
    }
    out
}

/// A partition crosses when some `a < b < c < d` have `a, c` in one block and
/// `b, d` in another.
pub fn is_noncrossing(p: &Partition) -> bool {
    let labels = &p.labels;
    let k = labels.len();
    let mut first = vec![usize::MAX; p.nblocks];
    let mut last = vec![0usize; p.nblocks];
    for (r, &l) in labels.iter().enumerate() {
        first[l] = first[l].min(r);
        last[l] = r;
    }
    // b < c with label(b) = Y != X = label(c); a crossing needs a < b in X and d > c in Y.
    for b in 0..k {
        let y = labels[b];
        for c in (b + 1)..k {
            let x = labels[c];
            if x != y && first[x] < b && last[y] > c {
                return false;
            }
        }
    }
    true
}

/// The finest partition coarser than both arguments.
pub fn join(p: &Partition, q: &Partition) -> Result<Partition> {
    if p.k() != q.k() {
        return domain(format!("join of partitions of sizes {} and {}", p.k(), q.k()));
    }
    let k = p.k();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for part in [p, q] {
        let mut rep = vec![usize::MAX; part.nblocks];
        for r in 0..k {
            let l = part.labels[r];
            if rep[l] == usize::MAX {
                rep[l] = r;
            } else {
                let a = find(&mut parent, rep[l]);
                let b = find(&mut parent, r);
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let roots: Vec<usize> = (0..k).map(|r| find(&mut parent, r)).collect();
    Ok(Partition::from_labels(&roots))
}

/// `ker i`: positions `r, s` share a block iff `i(r) = i(s)`.
pub fn kernel_of_index(index: &[usize]) -> Partition {
    Partition::from_labels(index)
}

/// `δ_p(i)`: 1 iff the multi-index is constant on every block of `p`.
pub fn delta(p: &Partition, index: &[usize]) -> Result<u8> {
    if p.k() != index.len() {
        return domain(format!(
            "index of length {} against a partition of [{}]",
            index.len(),
            p.k()
        ));
    }
    Ok(u8::from(delta_unchecked(p, index)))
}

pub(crate) fn delta_unchecked(p: &Partition, index: &[usize]) -> bool {
    let mut value = [usize::MAX; 64];
    let mut heap;
    let value: &mut [usize] = if p.nblocks <= 64 {
        &mut value[..p.nblocks]
    } else {
        heap = vec![usize::MAX; p.nblocks];
        &mut heap
    };
    for (&l, &i) in p.labels.iter().zip(index) {
        if value[l] == usize::MAX {
            value[l] = i;
        } else if value[l] != i {
            return false;
        }
    }
    true
}

/// Whether every block of `p` has letter sum `≡ 0 (mod s)` in `w`.
pub fn is_color_admissible(p: &Partition, w: &ColoredWord) -> bool {
    if p.k() != w.len() {
        return false;
    }
    let s = u64::from(w.s);
    let mut sums = vec![0u64; p.nblocks];
    for (&l, &a) in p.labels.iter().zip(&w.letters) {
        sums[l] += u64::from(a);
    }
    sums.iter().all(|&t| t % s == 0)
}

/// Non-crossing partitions of `[|w|]` whose blocks have letter sum `0` in `Z_s`.
pub fn enumerate_colored_nc(w: &ColoredWord) -> Vec<Partition> {
    let mut out = Vec::new();
    bell_rgs(w.len(), &mut out, &|p| p.is_noncrossing() && is_color_admissible(p, w));
    out
}
