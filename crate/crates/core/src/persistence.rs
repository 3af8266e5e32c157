//! Barcode decomposition of a filtered chain complex.
//!
//! The boundary of each degree is reduced column by column, generators taken
//! in nondecreasing filtration order. A column that reduces to zero is a
//! cycle; a surviving column `d(w')` factors as `x^m * wbar` where `wbar` is
//! the column normalized at its pivot (the entry at the highest filtration
//! level) and `m` is the gap between the levels of `w` and the pivot. Each
//! such pair spans a summand `0 -> F[x] --x^m--> F[x] -> 0`; each cycle never
//! used as a pivot spans a free summand.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::coeff::{Field, Scalar};
use crate::complex::{with_field, FilteredChainComplex, GenRef};
use crate::error::{Error, Result};
use crate::linalg::{ColumnReducer, Reduced, SparseColumn};
use crate::parallel::Execution;

/// Lifetime of a bar in filtration levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lifetime {
    Finite(u64),
    Infinite,
}

impl Lifetime {
    pub fn is_infinite(self) -> bool {
        self == Lifetime::Infinite
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Lifetime::Finite(m) => Some(m),
            Lifetime::Infinite => None,
        }
    }
}

impl fmt::Display for Lifetime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lifetime::Finite(m) => write!(f, "{m}"),
            Lifetime::Infinite => write!(f, "inf"),
        }
    }
}

/// One interval summand: a class in degree `n` born at level `s` that lives
/// for `m` levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BarEntry {
    pub n: i32,
    pub s: i64,
    pub m: Lifetime,
}

impl BarEntry {
    /// A finite bar; `m` must be at least one.
    pub fn finite(n: i32, s: i64, m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Usage("a finite bar must live at least one level".into()));
        }
        Ok(BarEntry { n, s, m: Lifetime::Finite(m) })
    }

    pub fn infinite(n: i32, s: i64) -> Self {
        BarEntry { n, s, m: Lifetime::Infinite }
    }

    /// Whether the class is still alive at level `j` (born at or before).
    fn alive_at(&self, j: i64) -> bool {
        match self.m {
            Lifetime::Infinite => true,
            Lifetime::Finite(m) => self.s + m as i64 > j,
        }
    }
}

/// A multiset of bars.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Barcode {
    entries: BTreeMap<BarEntry, usize>,
}

impl Barcode {
    pub fn new() -> Self {
        Barcode::default()
    }

    pub fn add(&mut self, entry: BarEntry, count: usize) {
        if count > 0 {
            *self.entries.entry(entry).or_insert(0) += count;
        }
    }

    /// `(entry, multiplicity)` in ascending `(n, s, m)` order.
    pub fn iter(&self) -> impl Iterator<Item = (&BarEntry, usize)> {
        self.entries.iter().map(|(e, c)| (e, *c))
    }

    pub fn count(&self, entry: &BarEntry) -> usize {
        self.entries.get(entry).copied().unwrap_or(0)
    }

    /// Number of bars counted with multiplicity.
    pub fn total(&self) -> usize {
        self.entries.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The bars of degree `n`.
    pub fn in_degree(&self, n: i32) -> Barcode {
        Barcode { entries: self.entries.iter().filter(|(e, _)| e.n == n).map(|(e, c)| (*e, *c)).collect() }
    }

    pub fn min_birth(&self) -> Option<i64> {
        self.entries.keys().map(|e| e.s).min()
    }

    /// Longest finite lifetime, if any.
    pub fn max_finite_lifetime(&self) -> Option<u64> {
        self.entries.keys().filter_map(|e| e.m.finite()).max()
    }

    pub fn degrees(&self) -> Vec<i32> {
        let mut d: Vec<i32> = self.entries.keys().map(|e| e.n).collect();
        d.dedup();
        d
    }
}

impl FromIterator<(BarEntry, usize)> for Barcode {
    fn from_iter<I: IntoIterator<Item = (BarEntry, usize)>>(iter: I) -> Self {
        let mut b = Barcode::new();
        for (e, c) in iter {
            b.add(e, c);
        }
        b
    }
}

/// `w` in degree `n + 1` paired with `wbar` in degree `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pair {
    pub source: GenRef,
    /// The generator carrying the pivot of `wbar`.
    pub target: GenRef,
    /// Reduced boundary normalized to coefficient one at `target`; rows index
    /// degree-`n` generators.
    pub wbar: SparseColumn<Scalar>,
    /// The reduced source `w' = w + (earlier generators)`; rows index
    /// degree-`n + 1` generators. `d(w') = scale * wbar`.
    pub chain: SparseColumn<Scalar>,
    pub scale: Scalar,
    /// Filtration gap `s(w) - s(target)`.
    pub gap: u64,
}

impl Pair {
    /// Zero-gap pairs split off a contractible summand and contribute no bar.
    pub fn is_cancelled(&self) -> bool {
        self.gap == 0
    }
}

/// The reduction witness: essential cycles and the `(w, wbar)` pairs,
/// including cancelled zero-gap pairs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Pairing {
    pub essentials: Vec<GenRef>,
    pub pairs: Vec<Pair>,
}

struct DegreeReduction {
    cycles: Vec<GenRef>,
    pairs: Vec<Pair>,
}

/// Barcode and pairing of `c`, using the default execution policy.
pub fn decompose(c: &FilteredChainComplex) -> Result<(Pairing, Barcode)> {
    decompose_with(c, Execution::default())
}

/// Barcode and pairing of `c`. Degrees are reduced independently and may run
/// concurrently; the output does not depend on `exec`.
pub fn decompose_with(c: &FilteredChainComplex, exec: Execution) -> Result<(Pairing, Barcode)> {
    c.validate().map_err(Error::Invalid)?;
    let degrees: Vec<i32> = c.degrees().collect();
    let reductions = exec.map(&degrees, |&n| with_field!(c.field(), |f| reduce_degree(c, &f, n)));

    let hit: HashSet<GenRef> = reductions.iter().flat_map(|r| r.pairs.iter().map(|p| p.target)).collect();
    let mut pairing = Pairing::default();
    let mut barcode = Barcode::new();
    for red in reductions {
        for v in red.cycles {
            if !hit.contains(&v) {
                barcode.add(BarEntry::infinite(v.degree, c.generator(v).filtration), 1);
                pairing.essentials.push(v);
            }
        }
        for p in red.pairs {
            if !p.is_cancelled() {
                let s = c.generator(p.target).filtration;
                barcode.add(BarEntry { n: p.target.degree, s, m: Lifetime::Finite(p.gap) }, 1);
            }
            pairing.pairs.push(p);
        }
    }
    Ok((pairing, barcode))
}

/// Generator ids of `degree` in processing order: ascending `(level, id)`.
fn processing_order(c: &FilteredChainComplex, degree: i32) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..c.rank_in_degree(degree)).collect();
    let gens = c.generators(degree);
    ids.sort_by_key(|&i| (gens[i].filtration, i));
    ids
}

fn reduce_degree<F: Field>(c: &FilteredChainComplex, field: &F, n: i32) -> DegreeReduction {
    let lower = processing_order(c, n - 1);
    // rows are renumbered so that the largest row index is the highest
    // (level, id) among degree n-1 generators
    let mut position = vec![0usize; lower.len()];
    for (pos, &id) in lower.iter().enumerate() {
        position[id] = pos;
    }
    let d = c.boundary_matrix(field, n);
    let gens = c.generators(n);
    let mut reducer = ColumnReducer::new(field, lower.len(), true);
    let mut out = DegreeReduction { cycles: Vec::new(), pairs: Vec::new() };
    let to_scalars = |col: &SparseColumn<F::Elem>| {
        SparseColumn::from_sorted_unchecked(col.entries().iter().map(|(r, x)| (*r, field.to_scalar(x))).collect())
    };
    for w in processing_order(c, n) {
        let column = d.columns()[w].map_rows(|r| position[r]);
        match reducer.push(column, SparseColumn::unit(field, w)) {
            Reduced::Zero { .. } => out.cycles.push(GenRef { degree: n, id: w }),
            Reduced::Pivot { row, scale, column, chain } => {
                let target = GenRef { degree: n - 1, id: lower[row] };
                let gap = gens[w].filtration - c.generator(target).filtration;
                debug_assert!(gap >= 0, "validated complex");
                out.pairs.push(Pair {
                    source: GenRef { degree: n, id: w },
                    target,
                    wbar: to_scalars(&column.map_rows(|pos| lower[pos])),
                    chain: to_scalars(&chain),
                    scale: field.to_scalar(&scale),
                    gap: gap as u64,
                });
            }
        }
    }
    out
}

/// Persistent Betti number: the number of bars of degree `n` born at or
/// before `i` and still alive at `j`.
pub fn betti(b: &Barcode, n: i32, i: i64, j: i64) -> Result<usize> {
    if i > j {
        return Err(Error::Usage(format!("betti needs i <= j, got i = {i}, j = {j}")));
    }
    Ok(b.iter().filter(|(e, _)| e.n == n && e.s <= i && e.alive_at(j)).map(|(_, c)| c).sum())
}

/// Persistent multiplicity: the number of degree-`n` classes born at `i` and
/// dying at `j` (`None` for classes that never die).
pub fn multiplicity(b: &Barcode, n: i32, i: i64, j: Option<i64>) -> Result<usize> {
    let m = match j {
        None => Lifetime::Infinite,
        Some(j) if j > i => Lifetime::Finite((j - i) as u64),
        Some(j) => return Err(Error::Usage(format!("multiplicity needs i < j, got i = {i}, j = {j}"))),
    };
    Ok(b.count(&BarEntry { n, s: i, m }))
}
