//! Subsets of `{1, ..., n}` as bit masks, dispersal, and pair enumeration.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ambient order an [`IndexSet`] can describe.
pub const MAX_ORDER: usize = 64;

/// A subset of `{1, ..., n}`; bit `i` set means index `i + 1` is a member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "IndexSetRepr", into = "IndexSetRepr")]
pub struct IndexSet {
    n: usize,
    mask: u64,
}

/// Serialized as the ambient order and the one-based members.
#[derive(Serialize, Deserialize)]
struct IndexSetRepr {
    n: usize,
    members: Vec<usize>,
}

impl TryFrom<IndexSetRepr> for IndexSet {
    type Error = Error;

    fn try_from(r: IndexSetRepr) -> Result<Self> {
        IndexSet::from_indices(r.n, &r.members)
    }
}

impl From<IndexSet> for IndexSetRepr {
    fn from(s: IndexSet) -> Self {
        IndexSetRepr {
            n: s.n,
            members: s.indices(),
        }
    }
}

fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl IndexSet {
    pub fn new(n: usize, mask: u64) -> Result<Self> {
        if n == 0 || n > MAX_ORDER {
            return Err(Error::InvalidArgument(format!(
                "ambient order {n} outside 1..={MAX_ORDER}"
            )));
        }
        if mask & !full_mask(n) != 0 {
            return Err(Error::InvalidArgument(format!(
                "mask {mask} has bits outside an order-{n} ground set"
            )));
        }
        Ok(IndexSet { n, mask })
    }

    /// Builds a set from 1-based member indices.
    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        for &i in indices {
            if i == 0 || i > n {
                return Err(Error::InvalidArgument(format!(
                    "index {i} outside 1..={n}"
                )));
            }
            mask |= 1 << (i - 1);
        }
        IndexSet::new(n, mask)
    }

    pub(crate) fn from_mask_unchecked(n: usize, mask: u64) -> Self {
        debug_assert!(mask & !full_mask(n) == 0);
        IndexSet { n, mask }
    }

    pub fn empty(n: usize) -> Self {
        IndexSet { n, mask: 0 }
    }

    pub fn full(n: usize) -> Self {
        IndexSet {
            n,
            mask: full_mask(n),
        }
    }

    /// The leading set `{1, ..., k}`.
    pub fn leading(n: usize, k: usize) -> Self {
        IndexSet {
            n,
            mask: full_mask(k.min(n)) & full_mask(n),
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    /// Zero-based member positions in increasing order.
    pub fn positions(&self) -> Positions {
        Positions { rest: self.mask }
    }

    /// One-based member indices in increasing order.
    pub fn indices(&self) -> Vec<usize> {
        self.positions().map(|p| p + 1).collect()
    }

    pub fn contains(&self, position: usize) -> bool {
        position < 64 && self.mask & (1 << position) != 0
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        IndexSet {
            n: self.n,
            mask: self.mask | other.mask,
        }
    }

    pub fn intersection(&self, other: &IndexSet) -> IndexSet {
        IndexSet {
            n: self.n,
            mask: self.mask & other.mask,
        }
    }

    pub fn is_subset_of(&self, other: &IndexSet) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn without(&self, position: usize) -> IndexSet {
        IndexSet {
            n: self.n,
            mask: self.mask & !(1 << position),
        }
    }

    /// Every subset of `{1..n}` in ascending mask order, including the empty set.
    pub fn all(n: usize) -> impl Iterator<Item = IndexSet> {
        (0..=full_mask(n)).map(move |mask| IndexSet { n, mask })
    }

    /// Every subset of this set in descending mask order, ending with the empty set.
    pub fn subsets(&self) -> Subsets {
        Subsets {
            n: self.n,
            of: self.mask,
            next: Some(self.mask),
        }
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.positions().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

pub struct Positions {
    rest: u64,
}

impl Iterator for Positions {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.rest == 0 {
            return None;
        }
        let p = self.rest.trailing_zeros() as usize;
        self.rest &= self.rest - 1;
        Some(p)
    }
}

pub struct Subsets {
    n: usize,
    of: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = IndexSet;

    fn next(&mut self) -> Option<IndexSet> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            Some((cur - 1) & self.of)
        };
        Some(IndexSet {
            n: self.n,
            mask: cur,
        })
    }
}

/// `#alpha - #(alpha ∩ beta)` for two sets of equal size.
pub fn dispersal(alpha: &IndexSet, beta: &IndexSet) -> Result<usize> {
    if alpha.len() != beta.len() {
        return Err(Error::SizeMismatch {
            left: alpha.len(),
            right: beta.len(),
        });
    }
    Ok(alpha.len() - alpha.intersection(beta).len())
}

/// An unordered pair of equal-size index sets, smaller mask first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DispersalPair {
    pub alpha: IndexSet,
    pub beta: IndexSet,
    pub d: usize,
}

impl DispersalPair {
    pub fn new(a: IndexSet, b: IndexSet) -> Result<Self> {
        let d = dispersal(&a, &b)?;
        let (alpha, beta) = if a.mask <= b.mask { (a, b) } else { (b, a) };
        Ok(DispersalPair { alpha, beta, d })
    }
}

impl fmt::Display for DispersalPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.alpha, self.beta)
    }
}

/// Whether [`pairs_with_dispersal`] yields one dispersal value or all up to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DispersalMode {
    Exact,
    AtMost,
}

/// All `d`-element submasks of `mask`, ascending.
fn submasks_of_size(mask: u64, d: usize) -> Vec<u64> {
    let members: Vec<u64> = Positions { rest: mask }.map(|p| 1u64 << p).collect();
    let k = members.len();
    let mut out = Vec::new();
    if d > k {
        return out;
    }
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        out.push(idx.iter().map(|&i| members[i]).fold(0, |a, b| a | b));
        let mut i = d;
        while i > 0 && idx[i - 1] == i - 1 + k - d {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        idx[i - 1] += 1;
        for j in i..d {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out.sort_unstable();
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Number of unordered pairs with dispersal in `lo..=hi`, as a float estimate.
pub fn count_pairs(n: usize, lo: usize, hi: usize) -> f64 {
    let mut total = 0.0;
    for k in 1..=n {
        for j in lo..=hi.min(k) {
            let per_alpha = binomial(k, j) * binomial(n - k, j);
            let pairs = binomial(n, k) * per_alpha;
            total += if j == 0 { pairs } else { pairs / 2.0 };
        }
    }
    total
}

/// Streams every unordered pair `(alpha, beta)` of equal-size nonempty sets
/// whose dispersal is `d` (or at most `d`), ascending by `alpha` then `beta`.
pub fn pairs_with_dispersal(n: usize, d: usize, mode: DispersalMode) -> PairStream {
    let lo = match mode {
        DispersalMode::Exact => d,
        DispersalMode::AtMost => 0,
    };
    PairStream {
        n,
        lo,
        hi: d,
        next_alpha: 1,
        buffer: Vec::new(),
        pos: 0,
    }
}

/// Pairs with dispersal in `lo..=hi`; see [`pairs_with_dispersal`].
pub(crate) fn pairs_in_range(n: usize, lo: usize, hi: usize) -> PairStream {
    PairStream {
        n,
        lo,
        hi,
        next_alpha: 1,
        buffer: Vec::new(),
        pos: 0,
    }
}

pub struct PairStream {
    n: usize,
    lo: usize,
    hi: usize,
    next_alpha: u64,
    buffer: Vec<DispersalPair>,
    pos: usize,
}

impl PairStream {
    fn refill(&mut self) -> bool {
        let full = full_mask(self.n);
        while self.pos >= self.buffer.len() {
            if self.n == 0 || self.next_alpha > full || self.next_alpha == 0 {
                return false;
            }
            let a = self.next_alpha;
            self.next_alpha = self.next_alpha.wrapping_add(1);
            self.buffer.clear();
            self.pos = 0;
            let comp = full & !a;
            let alpha = IndexSet { n: self.n, mask: a };
            let k = a.count_ones() as usize;
            let mut betas = Vec::new();
            for j in self.lo..=self.hi.min(k).min(self.n - k) {
                if j == 0 {
                    betas.push(a);
                    continue;
                }
                let removals = submasks_of_size(a, j);
                let additions = submasks_of_size(comp, j);
                for r in &removals {
                    for s in &additions {
                        let b = (a & !r) | s;
                        if b > a {
                            betas.push(b);
                        }
                    }
                }
            }
            betas.sort_unstable();
            for b in betas {
                let beta = IndexSet { n: self.n, mask: b };
                let d = k - (a & b).count_ones() as usize;
                self.buffer.push(DispersalPair { alpha, beta, d });
            }
        }
        true
    }
}

impl Iterator for PairStream {
    type Item = DispersalPair;

    fn next(&mut self) -> Option<DispersalPair> {
        if !self.refill() {
            return None;
        }
        let p = self.buffer[self.pos];
        self.pos += 1;
        Some(p)
    }
}
