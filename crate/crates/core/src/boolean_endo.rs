//! Maps `P(X) -> P(X)` in the two normal forms used by the classification:
//! Boolean-algebra endomorphisms stored as partitions `{A_x}` (so that
//! `λ(Y) = ⊔_{y∈Y} A_y`), and additive endomorphisms of `(P(X), △)` fixing
//! `X`, stored as 0/1 matrices over `Z_2`. Arbitrary maps extracted from a
//! linear map are held as explicit tables until their structure is known.

use std::fmt;

use thiserror::Error;

use crate::poset::Poset;

/// Largest ambient set for explicit `2^|X|` tables.
pub const MAX_TABLE_ELEMENTS: usize = 12;
/// Largest ambient set for the exhaustive pair checks on tables.
pub const MAX_PAIR_CHECK_ELEMENTS: usize = 8;
/// Largest ambient set for endomorphism enumeration.
pub const MAX_ENUM_ELEMENTS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EndoError {
    #[error("size mismatch: map acts on {expected} elements, subset has {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("{op} is limited to |X| <= {max} (got {n})")]
    SizeGate { op: &'static str, n: usize, max: usize },
    #[error("blocks do not form a partition of X: {0}")]
    NotPartition(String),
    #[error("XOR matrix does not fix X (images of the singletons must XOR to X)")]
    DoesNotFixX,
    #[error("map is not a Boolean-algebra endomorphism of P(X): {0}")]
    NotBooleanEndo(String),
    #[error("map is not an additive endomorphism of (P(X), xor) fixing X: {0}")]
    NotXorEndo(String),
}

/// A subset of an ambient set of at most 32 elements, as a bitmask in
/// element order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset {
    bits: u32,
    len: u8,
}

impl Subset {
    pub fn empty(len: usize) -> Self {
        assert!(len <= 32);
        Subset { bits: 0, len: len as u8 }
    }

    pub fn full(len: usize) -> Self {
        assert!(len <= 32);
        let bits = if len == 32 { u32::MAX } else { (1u32 << len) - 1 };
        Subset { bits, len: len as u8 }
    }

    pub fn singleton(len: usize, x: usize) -> Self {
        assert!(x < len);
        Subset { bits: 1 << x, len: len as u8 }
    }

    pub fn from_bits(len: usize, bits: u32) -> Self {
        assert!(len <= 32 && (len == 32 || bits >> len == 0), "bits outside ambient set");
        Subset { bits, len: len as u8 }
    }

    pub fn from_indices(len: usize, xs: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Subset::empty(len);
        for x in xs {
            s = s.with(x);
        }
        s
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Size of the ambient set.
    pub fn ambient(&self) -> usize {
        self.len as usize
    }

    pub fn count(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_full(&self) -> bool {
        *self == Subset::full(self.ambient())
    }

    pub fn contains(&self, x: usize) -> bool {
        x < self.ambient() && self.bits >> x & 1 == 1
    }

    pub fn with(self, x: usize) -> Self {
        assert!(x < self.ambient());
        Subset { bits: self.bits | 1 << x, ..self }
    }

    fn same(&self, other: &Subset) {
        assert_eq!(self.len, other.len, "subsets of different ambient sets");
    }

    pub fn union(&self, other: &Subset) -> Subset {
        self.same(other);
        Subset { bits: self.bits | other.bits, ..*self }
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        self.same(other);
        Subset { bits: self.bits & other.bits, ..*self }
    }

    pub fn sym_diff(&self, other: &Subset) -> Subset {
        self.same(other);
        Subset { bits: self.bits ^ other.bits, ..*self }
    }

    pub fn complement(&self) -> Subset {
        Subset { bits: !self.bits & Subset::full(self.ambient()).bits, ..*self }
    }

    pub fn is_disjoint(&self, other: &Subset) -> bool {
        self.intersection(other).is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.ambient()).filter(move |&x| self.contains(x))
    }

    /// All `2^len` subsets in bitmask order.
    pub fn all(len: usize) -> impl Iterator<Item = Subset> {
        assert!(len < 32);
        (0..1u32 << len).map(move |bits| Subset::from_bits(len, bits))
    }

    /// `{a,b}` using the poset's labels.
    pub fn display<'a>(&'a self, poset: &'a Poset) -> impl fmt::Display + 'a {
        SubsetDisplay { set: self, poset }
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

struct SubsetDisplay<'a> {
    set: &'a Subset,
    poset: &'a Poset,
}

impl fmt::Display for SubsetDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.set.iter().map(|x| self.poset.label(x)).collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

/// Anything that maps subsets of an `n`-element set to subsets.
pub trait SubsetMap {
    fn ambient(&self) -> usize;

    /// `λ(a)`; `a` must live in the same ambient set.
    fn image(&self, a: Subset) -> Subset;

    fn apply(&self, a: Subset) -> Result<Subset, EndoError> {
        if a.ambient() != self.ambient() {
            return Err(EndoError::SizeMismatch {
                expected: self.ambient(),
                found: a.ambient(),
            });
        }
        Ok(self.image(a))
    }

    fn to_table(&self) -> Result<SubsetMapTable, EndoError> {
        SubsetMapTable::from_fn(self.ambient(), |a| self.image(a))
    }
}

/// Boolean endomorphism `λ(Y) = ⊔_{y∈Y} A_y`; empty blocks allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartitionEndo {
    blocks: Vec<Subset>,
}

impl PartitionEndo {
    /// `blocks[x] = A_x`; blocks must be pairwise disjoint with union `X`.
    pub fn new(blocks: Vec<Subset>) -> Result<Self, EndoError> {
        let n = blocks.len();
        let mut seen = Subset::empty(n);
        for (x, b) in blocks.iter().enumerate() {
            if b.ambient() != n {
                return Err(EndoError::SizeMismatch { expected: n, found: b.ambient() });
            }
            if !seen.is_disjoint(b) {
                return Err(EndoError::NotPartition(format!(
                    "block {x} overlaps an earlier block"
                )));
            }
            seen = seen.union(b);
        }
        if !seen.is_full() {
            return Err(EndoError::NotPartition("blocks do not cover X".into()));
        }
        Ok(PartitionEndo { blocks })
    }

    pub fn identity(n: usize) -> Self {
        PartitionEndo {
            blocks: (0..n).map(|x| Subset::singleton(n, x)).collect(),
        }
    }

    /// `owner[y] = x` places `y` in `A_x`.
    pub fn from_owner(owner: &[usize]) -> Self {
        let n = owner.len();
        let mut blocks = vec![Subset::empty(n); n];
        for (y, &x) in owner.iter().enumerate() {
            blocks[x] = blocks[x].with(y);
        }
        PartitionEndo { blocks }
    }

    pub fn blocks(&self) -> &[Subset] {
        &self.blocks
    }

    /// The unique `x` with `y ∈ A_x`.
    pub fn owner(&self, y: usize) -> usize {
        self.blocks
            .iter()
            .position(|b| b.contains(y))
            .expect("blocks cover X")
    }

    /// Injective iff no block is empty.
    pub fn is_injective(&self) -> bool {
        self.blocks.iter().all(|b| !b.is_empty())
    }

    /// The bijection `μ` with `λ(A) = μ(A)`, when every block is a singleton.
    pub fn automorphism(&self) -> Option<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| (b.count() == 1).then(|| b.iter().next().unwrap()))
            .collect()
    }

    /// `a->{a,b} b->{} c->{c}` with the poset's labels.
    pub fn display<'a>(&'a self, poset: &'a Poset) -> String {
        self.blocks
            .iter()
            .enumerate()
            .map(|(x, b)| format!("{}->{}", poset.label(x), b.display(poset)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl SubsetMap for PartitionEndo {
    fn ambient(&self) -> usize {
        self.blocks.len()
    }

    fn image(&self, a: Subset) -> Subset {
        a.iter()
            .fold(Subset::empty(self.ambient()), |acc, x| acc.union(&self.blocks[x]))
    }
}

/// Additive endomorphism of `(P(X), △)` with `λ(X) = X`; column `x` is `λ({x})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct XorEndo {
    columns: Vec<Subset>,
}

impl XorEndo {
    pub fn new(columns: Vec<Subset>) -> Result<Self, EndoError> {
        let n = columns.len();
        let mut total = Subset::empty(n);
        for c in &columns {
            if c.ambient() != n {
                return Err(EndoError::SizeMismatch { expected: n, found: c.ambient() });
            }
            total = total.sym_diff(c);
        }
        if !total.is_full() {
            return Err(EndoError::DoesNotFixX);
        }
        Ok(XorEndo { columns })
    }

    pub fn identity(n: usize) -> Self {
        XorEndo {
            columns: (0..n).map(|x| Subset::singleton(n, x)).collect(),
        }
    }

    pub fn columns(&self) -> &[Subset] {
        &self.columns
    }

    /// Matrix entry in row `y`, column `x`.
    pub fn entry(&self, y: usize, x: usize) -> bool {
        self.columns[x].contains(y)
    }

    fn rank(&self) -> usize {
        let mut rows: Vec<u32> = self.columns.iter().map(|c| c.bits()).collect();
        let mut rank = 0;
        for bit in 0..self.ambient() {
            if let Some(p) = (rank..rows.len()).find(|&i| rows[i] >> bit & 1 == 1) {
                rows.swap(rank, p);
                let pivot = rows[rank];
                for (i, r) in rows.iter_mut().enumerate() {
                    if i != rank && *r >> bit & 1 == 1 {
                        *r ^= pivot;
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    /// Injective iff the matrix is invertible over `Z_2`.
    pub fn is_injective(&self) -> bool {
        self.rank() == self.ambient()
    }

    /// The inverse group automorphism, if the matrix is invertible.
    pub fn automorphism(&self) -> Option<XorEndo> {
        let n = self.ambient();
        if !self.is_injective() {
            return None;
        }
        // Solve λ(c_x) = {x} column by column: λ is a bijection on 2^n subsets.
        let mut preimage = vec![Subset::empty(n); n];
        for a in Subset::all(n) {
            let img = self.image(a);
            if img.count() == 1 {
                preimage[img.iter().next().unwrap()] = a;
            }
        }
        Some(XorEndo { columns: preimage })
    }

    pub fn display<'a>(&'a self, poset: &'a Poset) -> String {
        self.columns
            .iter()
            .enumerate()
            .map(|(x, c)| format!("{}->{}", poset.label(x), c.display(poset)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl SubsetMap for XorEndo {
    fn ambient(&self) -> usize {
        self.columns.len()
    }

    fn image(&self, a: Subset) -> Subset {
        a.iter()
            .fold(Subset::empty(self.ambient()), |acc, x| acc.sym_diff(&self.columns[x]))
    }
}

/// Explicit table `A ↦ λ(A)` indexed by bitmask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetMapTable {
    len: usize,
    images: Vec<Subset>,
}

/// A violated Boolean-endomorphism identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BooleanViolation {
    DoesNotFixX(Subset),
    Complement { a: Subset },
    Intersection { a: Subset, b: Subset },
}

impl SubsetMapTable {
    pub fn from_fn(len: usize, f: impl Fn(Subset) -> Subset) -> Result<Self, EndoError> {
        gate("subset table", len, MAX_TABLE_ELEMENTS)?;
        let images = Subset::all(len)
            .map(|a| {
                let img = f(a);
                if img.ambient() != len {
                    Err(EndoError::SizeMismatch { expected: len, found: img.ambient() })
                } else {
                    Ok(img)
                }
            })
            .collect::<Result<_, _>>()?;
        Ok(SubsetMapTable { len, images })
    }

    pub fn images(&self) -> &[Subset] {
        &self.images
    }

    /// First disjoint pair `(A, B)` with `λ(A) ∩ λ(B) ≠ ∅`.
    pub fn separation_violation(&self) -> Result<Option<(Subset, Subset)>, EndoError> {
        gate("separating check", self.len, MAX_PAIR_CHECK_ELEMENTS)?;
        for a in Subset::all(self.len) {
            // enumerate B ⊆ X∖A
            let rest = a.complement().bits();
            let mut b = rest;
            loop {
                let bs = Subset::from_bits(self.len, b);
                if !self.image(a).is_disjoint(&self.image(bs)) {
                    return Ok(Some((a, bs)));
                }
                if b == 0 {
                    break;
                }
                b = (b - 1) & rest;
            }
        }
        Ok(None)
    }

    pub fn is_separating(&self) -> Result<bool, EndoError> {
        Ok(self.separation_violation()?.is_none())
    }

    pub fn boolean_violation(&self) -> Result<Option<BooleanViolation>, EndoError> {
        gate("Boolean endomorphism check", self.len, MAX_PAIR_CHECK_ELEMENTS)?;
        let full = Subset::full(self.len);
        if self.image(full) != full {
            return Ok(Some(BooleanViolation::DoesNotFixX(self.image(full))));
        }
        for a in Subset::all(self.len) {
            if self.image(a.complement()) != self.image(a).complement() {
                return Ok(Some(BooleanViolation::Complement { a }));
            }
        }
        for a in Subset::all(self.len) {
            for b in Subset::all(self.len) {
                if self.image(a.intersection(&b)) != self.image(a).intersection(&self.image(b)) {
                    return Ok(Some(BooleanViolation::Intersection { a, b }));
                }
            }
        }
        Ok(None)
    }

    pub fn is_boolean_endo(&self) -> Result<bool, EndoError> {
        Ok(self.boolean_violation()?.is_none())
    }

    /// First pair with `λ(A △ B) ≠ λ(A) △ λ(B)`; `(X, X)` if `λ(X) ≠ X`.
    pub fn additivity_violation(&self) -> Option<(Subset, Subset)> {
        let full = Subset::full(self.len);
        if self.image(full) != full {
            return Some((full, full));
        }
        for a in Subset::all(self.len) {
            for b in Subset::all(self.len) {
                if self.image(a.sym_diff(&b)) != self.image(a).sym_diff(&self.image(b)) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// `A_x = λ({x})`, provided the table is a Boolean endomorphism.
    pub fn to_partition(&self) -> Result<PartitionEndo, EndoError> {
        if let Some(v) = self.boolean_violation()? {
            return Err(EndoError::NotBooleanEndo(format!("{v:?}")));
        }
        let blocks = (0..self.len)
            .map(|x| self.image(Subset::singleton(self.len, x)))
            .collect();
        let p = PartitionEndo::new(blocks)?;
        debug_assert_eq!(p.to_table().as_ref(), Ok(self));
        Ok(p)
    }

    /// Matrix with columns `λ({x})`, provided the table is additive and fixes `X`.
    pub fn to_xor_endo(&self) -> Result<XorEndo, EndoError> {
        if let Some((a, b)) = self.additivity_violation() {
            return Err(EndoError::NotXorEndo(format!("A={a:?}, B={b:?}")));
        }
        XorEndo::new(
            (0..self.len)
                .map(|x| self.image(Subset::singleton(self.len, x)))
                .collect(),
        )
    }
}

impl SubsetMap for SubsetMapTable {
    fn ambient(&self) -> usize {
        self.len
    }

    fn image(&self, a: Subset) -> Subset {
        self.images[a.bits() as usize]
    }
}

fn gate(op: &'static str, n: usize, max: usize) -> Result<(), EndoError> {
    if n > max {
        Err(EndoError::SizeGate { op, n, max })
    } else {
        Ok(())
    }
}

/// True iff `⋃ λ(parts_i) = X`; `parts` must partition `X`.
pub fn check_partition_preservation(
    lambda: &impl SubsetMap,
    parts: &[Subset],
) -> Result<bool, EndoError> {
    let n = lambda.ambient();
    let mut seen = Subset::empty(n);
    for p in parts {
        if p.ambient() != n {
            return Err(EndoError::SizeMismatch { expected: n, found: p.ambient() });
        }
        if !seen.is_disjoint(p) {
            return Err(EndoError::NotPartition("parts overlap".into()));
        }
        seen = seen.union(p);
    }
    if !seen.is_full() {
        return Err(EndoError::NotPartition("parts do not cover X".into()));
    }
    let covered = parts
        .iter()
        .fold(Subset::empty(n), |acc, p| acc.union(&lambda.image(*p)));
    Ok(covered.is_full())
}

/// Which normal form to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndoRegime {
    Boolean,
    Xor,
}

pub fn count_partition_endos(n: usize) -> u64 {
    (n as u64).pow(n as u32)
}

/// Number of `n x n` `Z_2` matrices fixing the all-ones vector: `2^{n(n-1)}`.
pub fn count_xor_endos(n: usize) -> u64 {
    1u64 << (n * (n - 1))
}

/// The `index`-th Boolean endomorphism: owner function in base-`n` digits,
/// element 0 most significant.
pub fn partition_endo_at(n: usize, mut index: u64) -> PartitionEndo {
    let mut owner = vec![0usize; n];
    for y in (0..n).rev() {
        owner[y] = (index % n as u64) as usize;
        index /= n as u64;
    }
    PartitionEndo::from_owner(&owner)
}

/// The `index`-th XOR endomorphism. Row `y` of the matrix is chosen freely on
/// columns `0..n-1`; the last column fixes the row's parity to 1.
pub fn xor_endo_at(n: usize, index: u64) -> XorEndo {
    let free = n - 1;
    let mut columns = vec![Subset::empty(n); n];
    for y in 0..n {
        let shift = (n - 1 - y) * free;
        let row = (index >> shift) & ((1u64 << free) - 1);
        let mut parity = 0;
        for (x, col) in columns.iter_mut().take(free).enumerate() {
            if row >> (free - 1 - x) & 1 == 1 {
                *col = col.with(y);
                parity ^= 1;
            }
        }
        if parity == 0 {
            columns[n - 1] = columns[n - 1].with(y);
        }
    }
    XorEndo { columns }
}

pub fn partition_endos(n: usize) -> Result<impl Iterator<Item = PartitionEndo>, EndoError> {
    gate("endomorphism enumeration", n, MAX_ENUM_ELEMENTS)?;
    Ok((0..count_partition_endos(n)).map(move |i| partition_endo_at(n, i)))
}

pub fn xor_endos(n: usize) -> Result<impl Iterator<Item = XorEndo>, EndoError> {
    gate("endomorphism enumeration", n, MAX_ENUM_ELEMENTS)?;
    Ok((0..count_xor_endos(n)).map(move |i| xor_endo_at(n, i)))
}

/// All set partitions of `{0..n}` into at most `max_blocks` nonempty blocks.
pub fn set_partitions(n: usize, max_blocks: usize) -> Vec<Vec<Subset>> {
    fn rec(
        n: usize,
        max_blocks: usize,
        y: usize,
        blocks: &mut Vec<Subset>,
        out: &mut Vec<Vec<Subset>>,
    ) {
        if y == n {
            out.push(blocks.clone());
            return;
        }
        for i in 0..blocks.len() {
            let old = blocks[i];
            blocks[i] = old.with(y);
            rec(n, max_blocks, y + 1, blocks, out);
            blocks[i] = old;
        }
        if blocks.len() < max_blocks {
            blocks.push(Subset::singleton(n, y));
            rec(n, max_blocks, y + 1, blocks, out);
            blocks.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, max_blocks, 0, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: usize, xs: &[usize]) -> Subset {
        Subset::from_indices(n, xs.iter().copied())
    }

    /// λ({x}) = {x}, λ({y}) = {x,y}, λ({z}) = {x,z} on X = {x,y,z}.
    fn nonseparating() -> XorEndo {
        XorEndo::new(vec![s(3, &[0]), s(3, &[0, 1]), s(3, &[0, 2])]).unwrap()
    }

    #[test]
    fn apply_examples() {
        let id = PartitionEndo::identity(3);
        for a in Subset::all(3) {
            assert_eq!(id.apply(a).unwrap(), a);
        }
        let p = PartitionEndo::new(vec![s(2, &[0, 1]), s(2, &[])]).unwrap();
        assert_eq!(p.image(s(2, &[0])), s(2, &[0, 1]));
        assert!(p.image(s(2, &[1])).is_empty());
        assert_eq!(nonseparating().image(s(3, &[1, 2])), s(3, &[1, 2]));
        assert!(matches!(
            id.apply(Subset::empty(2)),
            Err(EndoError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn partition_validation() {
        assert!(PartitionEndo::new(vec![s(2, &[0]), s(2, &[0, 1])]).is_err());
        assert!(PartitionEndo::new(vec![s(2, &[0]), s(2, &[])]).is_err());
        assert!(XorEndo::new(vec![s(2, &[0]), s(2, &[0])]).is_err());
    }

    #[test]
    fn separating_examples() {
        for p in partition_endos(3).unwrap() {
            assert!(p.to_table().unwrap().is_separating().unwrap());
        }
        let t = nonseparating().to_table().unwrap();
        let (a, b) = t.separation_violation().unwrap().unwrap();
        assert!(a.is_disjoint(&b));
        assert!(!t.image(a).is_disjoint(&t.image(b)));
        assert!(!t.is_separating().unwrap());
        // λ(A) = ∅ for A ≠ X
        let c = SubsetMapTable::from_fn(3, |a| if a.is_full() { a } else { Subset::empty(3) })
            .unwrap();
        assert!(c.is_separating().unwrap());
    }

    #[test]
    fn boolean_endo_examples() {
        for p in partition_endos(3).unwrap() {
            assert!(p.to_table().unwrap().is_boolean_endo().unwrap());
        }
        assert!(!nonseparating().to_table().unwrap().is_boolean_endo().unwrap());
        let comp = SubsetMapTable::from_fn(3, |a| a.complement()).unwrap();
        assert_eq!(
            comp.boolean_violation().unwrap(),
            Some(BooleanViolation::DoesNotFixX(Subset::empty(3)))
        );
        let big = SubsetMapTable::from_fn(9, |a| a).unwrap();
        assert!(matches!(big.is_separating(), Err(EndoError::SizeGate { .. })));
    }

    #[test]
    fn to_partition_examples() {
        let id = SubsetMapTable::from_fn(2, |a| a).unwrap();
        assert_eq!(id.to_partition().unwrap(), PartitionEndo::identity(2));
        let t = SubsetMapTable::from_fn(2, |a| {
            if a.contains(0) { Subset::full(2) } else { Subset::empty(2) }
        })
        .unwrap();
        let p = t.to_partition().unwrap();
        assert_eq!(p.blocks(), &[Subset::full(2), Subset::empty(2)]);
        assert_eq!(p.to_table().unwrap(), t);
        let bad = nonseparating().to_table().unwrap();
        assert!(matches!(bad.to_partition(), Err(EndoError::NotBooleanEndo(_))));
    }

    #[test]
    fn injectivity_and_automorphisms() {
        assert!(PartitionEndo::identity(2).is_injective());
        let p = PartitionEndo::new(vec![s(2, &[0, 1]), s(2, &[])]).unwrap();
        assert!(!p.is_injective());
        assert_eq!(p.automorphism(), None);
        assert!(nonseparating().is_injective());
        assert_eq!(PartitionEndo::identity(3).automorphism(), Some(vec![0, 1, 2]));
        let swap = PartitionEndo::new(vec![s(2, &[1]), s(2, &[0])]).unwrap();
        assert_eq!(swap.automorphism(), Some(vec![1, 0]));

        let inv = nonseparating().automorphism().unwrap();
        for a in Subset::all(3) {
            assert_eq!(inv.image(nonseparating().image(a)), a);
        }
        let singular = XorEndo::new(vec![s(2, &[0, 1]), s(2, &[])]).unwrap();
        assert!(!singular.is_injective());
        assert!(singular.automorphism().is_none());
    }

    #[test]
    fn partition_preservation() {
        let t = nonseparating();
        assert!(check_partition_preservation(&t, &[s(3, &[0]), s(3, &[1]), s(3, &[2])]).unwrap());
        let c = SubsetMapTable::from_fn(3, |a| if a.is_full() { a } else { Subset::empty(3) })
            .unwrap();
        assert!(!check_partition_preservation(&c, &[s(3, &[0]), s(3, &[1]), s(3, &[2])]).unwrap());
        assert!(check_partition_preservation(&c, &[s(3, &[0, 1]), s(3, &[1])]).is_err());
        for p in partition_endos(3).unwrap() {
            for parts in set_partitions(3, 3) {
                assert!(check_partition_preservation(&p, &parts).unwrap());
            }
        }
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(partition_endos(2).unwrap().count(), 4);
        assert_eq!(xor_endos(2).unwrap().count(), 4);
        assert_eq!(partition_endos(1).unwrap().count(), 1);
        assert_eq!(xor_endos(1).unwrap().count(), 1);
        assert!(partition_endos(5).is_err());
        // every enumerated XOR matrix is valid and they are pairwise distinct
        let all: Vec<_> = xor_endos(3).unwrap().collect();
        assert_eq!(all.len(), 64);
        for e in &all {
            assert!(XorEndo::new(e.columns().to_vec()).is_ok());
        }
        let distinct: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), 64);
    }

    #[test]
    fn boolean_endos_of_two_point_set_are_partitions() {
        // all (2^2)^(2^2) = 256 tables on X = {1, 2}
        let mut found = Vec::new();
        for code in 0u32..256 {
            let t = SubsetMapTable::from_fn(2, |a| {
                Subset::from_bits(2, code >> (2 * a.bits()) & 3)
            })
            .unwrap();
            if t.is_boolean_endo().unwrap() {
                found.push(t);
            }
        }
        let mut expected: Vec<_> = partition_endos(2)
            .unwrap()
            .map(|p| p.to_table().unwrap())
            .collect();
        assert_eq!(found.len(), 4);
        found.sort_by_key(|t| t.images().to_vec());
        expected.sort_by_key(|t| t.images().to_vec());
        assert_eq!(found, expected);
    }

    #[test]
    fn partition_endo_identities_exhaustive() {
        for n in 1..=4 {
            for p in partition_endos(n).unwrap() {
                assert!(p.image(Subset::empty(n)).is_empty());
                assert!(p.image(Subset::full(n)).is_full());
                for a in Subset::all(n) {
                    assert_eq!(p.image(a.complement()), p.image(a).complement());
                    for b in Subset::all(n) {
                        assert_eq!(
                            p.image(a.intersection(&b)),
                            p.image(a).intersection(&p.image(b))
                        );
                    }
                }
                // automorphism ⟺ bijective on P(X)
                let images: std::collections::HashSet<_> =
                    Subset::all(n).map(|a| p.image(a)).collect();
                assert_eq!(p.automorphism().is_some(), images.len() == 1 << n);
            }
        }
    }

    #[test]
    fn xor_endo_identities_exhaustive() {
        for n in 1..=4 {
            for e in xor_endos(n).unwrap() {
                assert!(e.image(Subset::full(n)).is_full());
                for a in Subset::all(n) {
                    for b in Subset::all(n) {
                        assert_eq!(e.image(a.sym_diff(&b)), e.image(a).sym_diff(&e.image(b)));
                    }
                }
                let t = e.to_table().unwrap();
                assert_eq!(t.to_xor_endo().unwrap(), e);
            }
        }
    }

    #[test]
    fn set_partition_counts() {
        // Bell numbers and Stirling sums
        assert_eq!(set_partitions(3, 3).len(), 5);
        assert_eq!(set_partitions(4, 4).len(), 15);
        assert_eq!(set_partitions(3, 2).len(), 4);
        assert_eq!(set_partitions(1, 1).len(), 1);
    }
}
