//! Sparse exact linear algebra, column-major.
//!
//! Everything is built on one kernel, [`ColumnReducer`]: columns are pushed
//! left to right and each is reduced against the pivots seen so far. Rank,
//! kernels and the persistence pairing are all read off that loop.

use crate::coeff::Field;
use crate::error::{Error, Result};

/// A sparse vector with strictly increasing row indices and no stored zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseColumn<E> {
    entries: Vec<(usize, E)>,
}

impl<E: Clone> SparseColumn<E> {
    pub fn new() -> Self {
        SparseColumn { entries: Vec::new() }
    }

    /// Sorts, merges repeated rows and drops zeros.
    pub fn from_entries<F: Field<Elem = E>>(field: &F, mut entries: Vec<(usize, E)>) -> Self {
        entries.sort_by_key(|(row, _)| *row);
        let mut out: Vec<(usize, E)> = Vec::with_capacity(entries.len());
        for (row, c) in entries {
            match out.last_mut() {
                Some((r, acc)) if *r == row => *acc = field.add(acc, &c),
                _ => out.push((row, c)),
            }
        }
        out.retain(|(_, c)| !field.is_zero(c));
        SparseColumn { entries: out }
    }

    /// Wraps entries already in canonical form.
    pub(crate) fn from_sorted_unchecked(entries: Vec<(usize, E)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        SparseColumn { entries }
    }

    pub fn unit<F: Field<Elem = E>>(field: &F, row: usize) -> Self {
        SparseColumn { entries: vec![(row, field.one())] }
    }

    pub fn entries(&self) -> &[(usize, E)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(usize, E)> {
        self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Coefficient at `row`, if nonzero.
    pub fn get(&self, row: usize) -> Option<&E> {
        self.entries.binary_search_by_key(&row, |(r, _)| *r).ok().map(|i| &self.entries[i].1)
    }

    /// The entry with the largest row index.
    pub fn last(&self) -> Option<&(usize, E)> {
        self.entries.last()
    }

    pub fn scale<F: Field<Elem = E>>(&self, field: &F, c: &E) -> Self {
        if field.is_zero(c) {
            return SparseColumn::new();
        }
        SparseColumn { entries: self.entries.iter().map(|(r, x)| (*r, field.mul(c, x))).collect() }
    }

    /// Applies `f` to every row index. `f` must be injective; the result is
    /// re-sorted.
    pub fn map_rows(&self, mut f: impl FnMut(usize) -> usize) -> Self {
        let mut entries: Vec<(usize, E)> = self.entries.iter().map(|(r, c)| (f(*r), c.clone())).collect();
        entries.sort_by_key(|(r, _)| *r);
        SparseColumn { entries }
    }

    /// Keeps only the entries whose row satisfies `keep`.
    pub fn filter_rows(&self, mut keep: impl FnMut(usize) -> bool) -> Self {
        SparseColumn { entries: self.entries.iter().filter(|(r, _)| keep(*r)).cloned().collect() }
    }
}

/// `target + c * source`, canonical.
pub fn axpy<F: Field>(
    field: &F,
    target: &SparseColumn<F::Elem>,
    c: &F::Elem,
    source: &SparseColumn<F::Elem>,
) -> SparseColumn<F::Elem> {
    if field.is_zero(c) || source.is_empty() {
        return target.clone();
    }
    let (a, b) = (&target.entries, &source.entries);
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let (ra, ca) = &a[i];
        let (rb, cb) = &b[j];
        if ra < rb {
            out.push((*ra, ca.clone()));
            i += 1;
        } else if rb < ra {
            out.push((*rb, field.mul(c, cb)));
            j += 1;
        } else {
            let v = field.add(ca, &field.mul(c, cb));
            if !field.is_zero(&v) {
                out.push((*ra, v));
            }
            i += 1;
            j += 1;
        }
    }
    out.extend(a[i..].iter().cloned());
    out.extend(b[j..].iter().map(|(r, cb)| (*r, field.mul(c, cb))));
    SparseColumn { entries: out }
}

/// A column-major sparse matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix<E> {
    n_rows: usize,
    columns: Vec<SparseColumn<E>>,
}

impl<E: Clone> SparseMatrix<E> {
    pub fn new(n_rows: usize, columns: Vec<SparseColumn<E>>) -> Result<Self> {
        if let Some(bad) = columns.iter().flat_map(|c| c.entries.last()).find(|(r, _)| *r >= n_rows) {
            return Err(Error::Usage(format!("row index {} out of range for {n_rows} rows", bad.0)));
        }
        Ok(SparseMatrix { n_rows, columns })
    }

    pub fn zero(n_rows: usize, n_cols: usize) -> Self {
        SparseMatrix { n_rows, columns: vec![SparseColumn::new(); n_cols] }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[SparseColumn<E>] {
        &self.columns
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &SparseMatrix<E>) -> Result<Self> {
        if self.n_rows != other.n_rows {
            return Err(Error::Usage(format!("ambient dimensions differ: {} vs {}", self.n_rows, other.n_rows)));
        }
        let mut columns = self.columns.clone();
        columns.extend(other.columns.iter().cloned());
        Ok(SparseMatrix { n_rows: self.n_rows, columns })
    }
}

/// Outcome of pushing one column through a [`ColumnReducer`].
#[derive(Clone, Debug, PartialEq)]
pub enum Reduced<E> {
    /// The column reduced to zero; `chain` is the combination of input
    /// columns that produced it (a kernel vector).
    Zero { chain: SparseColumn<E> },
    /// The column survived with pivot `row`. `column` has coefficient one at
    /// `row`, and the combination of input columns in `chain` has image
    /// `scale * column`.
    Pivot { row: usize, scale: E, column: SparseColumn<E>, chain: SparseColumn<E> },
}

/// Left-to-right column reduction with a pivot-row table.
///
/// Each pushed column is reduced exhaustively: every entry whose row is an
/// existing pivot is eliminated, highest row first, so a surviving column's
/// rows are all non-pivot rows. The pivot of a surviving column is its
/// largest row index.
pub struct ColumnReducer<'f, F: Field> {
    field: &'f F,
    pivot_of_row: Vec<Option<usize>>,
    // normalized so the pivot coefficient is one
    columns: Vec<SparseColumn<F::Elem>>,
    chains: Vec<SparseColumn<F::Elem>>,
    track: bool,
}

impl<'f, F: Field> ColumnReducer<'f, F> {
    /// A reducer over an ambient space of `n_rows` rows. With `track`, the
    /// combination of input columns is carried along for every column.
    pub fn new(field: &'f F, n_rows: usize, track: bool) -> Self {
        ColumnReducer { field, pivot_of_row: vec![None; n_rows], columns: Vec::new(), chains: Vec::new(), track }
    }

    pub fn rank(&self) -> usize {
        self.columns.len()
    }

    pub fn is_pivot(&self, row: usize) -> bool {
        self.pivot_of_row[row].is_some()
    }

    /// Reduces `column`, whose starting chain is `chain` (ignored unless
    /// tracking).
    pub fn push(&mut self, column: SparseColumn<F::Elem>, chain: SparseColumn<F::Elem>) -> Reduced<F::Elem> {
        let field = self.field;
        let mut col = column;
        let mut chain = if self.track { chain } else { SparseColumn::new() };
        loop {
            let hit = col.entries.iter().rev().find_map(|(r, c)| self.pivot_of_row[*r].map(|slot| (slot, c.clone())));
            let Some((slot, coeff)) = hit else { break };
            let factor = field.neg(&coeff);
            col = axpy(field, &col, &factor, &self.columns[slot]);
            if self.track {
                chain = axpy(field, &chain, &factor, &self.chains[slot]);
            }
        }
        match col.last().cloned() {
            None => Reduced::Zero { chain },
            Some((row, lead)) => {
                let inv = field.inv(&lead);
                let normalized = col.scale(field, &inv);
                self.pivot_of_row[row] = Some(self.columns.len());
                self.columns.push(normalized.clone());
                if self.track {
                    self.chains.push(chain.scale(field, &inv));
                }
                Reduced::Pivot { row, scale: lead, column: normalized, chain }
            }
        }
    }
}

/// Rank of `m` over `field`.
pub fn rank<F: Field>(m: &SparseMatrix<F::Elem>, field: &F) -> usize {
    let mut reducer = ColumnReducer::new(field, m.n_rows, false);
    for c in &m.columns {
        reducer.push(c.clone(), SparseColumn::new());
    }
    reducer.rank()
}

/// `dim((span A + span B) / span B)`, i.e. `rank([A|B]) - rank(B)`.
pub fn subquotient_dim<F: Field>(
    numerator_gens: &SparseMatrix<F::Elem>,
    denominator_gens: &SparseMatrix<F::Elem>,
    field: &F,
) -> Result<usize> {
    if numerator_gens.n_rows != denominator_gens.n_rows {
        return Err(Error::Usage(format!(
            "subquotient ambient dimensions differ: {} vs {}",
            numerator_gens.n_rows, denominator_gens.n_rows
        )));
    }
    // denominator first so its rank is read off midway through one pass
    let mut reducer = ColumnReducer::new(field, numerator_gens.n_rows, false);
    for c in &denominator_gens.columns {
        reducer.push(c.clone(), SparseColumn::new());
    }
    let base = reducer.rank();
    for c in &numerator_gens.columns {
        reducer.push(c.clone(), SparseColumn::new());
    }
    Ok(reducer.rank() - base)
}

/// A basis of the kernel of `m`, as vectors indexed by column.
pub fn kernel_basis<F: Field>(m: &SparseMatrix<F::Elem>, field: &F) -> Vec<SparseColumn<F::Elem>> {
    let mut reducer = ColumnReducer::new(field, m.n_rows, true);
    let mut kernel = Vec::new();
    for (j, c) in m.columns.iter().enumerate() {
        if let Reduced::Zero { chain } = reducer.push(c.clone(), SparseColumn::unit(field, j)) {
            kernel.push(chain);
        }
    }
    kernel
}

/// `m * v` for a vector `v` indexed by the columns of `m`.
pub fn apply<F: Field>(m: &SparseMatrix<F::Elem>, v: &SparseColumn<F::Elem>, field: &F) -> SparseColumn<F::Elem> {
    v.entries.iter().fold(SparseColumn::new(), |acc, (j, c)| axpy(field, &acc, c, &m.columns[*j]))
}
