//! Finite filtered chain complexes.
//!
//! A complex is a set of generators, each living in one homological degree
//! `n` and one filtration level `s`, together with a boundary column over the
//! generators of degree `n - 1`. The level of a generator fixes which graded
//! piece of the filtration it spans; nothing else about the filtration needs
//! to be stored.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::coeff::{Field, FieldSpec, Scalar};
use crate::error::{Error, Result};
use crate::linalg::{axpy, rank, SparseColumn, SparseMatrix};

/// Runs `$body` with `$f` bound to the concrete [`Field`] for `$spec`.
macro_rules! with_field {
    ($spec:expr, |$f:ident| $body:expr) => {
        match $spec {
            $crate::coeff::FieldSpec::Prime(p) => {
                let $f = $crate::coeff::PrimeField::from_checked(p);
                $body
            }
            $crate::coeff::FieldSpec::Rational => {
                let $f = $crate::coeff::RationalField;
                $body
            }
        }
    };
}
pub(crate) use with_field;

/// Reference to a generator: its degree and its dense id within that degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenRef {
    pub degree: i32,
    pub id: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub id: usize,
    pub name: Option<String>,
    pub degree: i32,
    pub filtration: i64,
}

impl Generator {
    pub fn gen_ref(&self) -> GenRef {
        GenRef { degree: self.degree, id: self.id }
    }

    /// The name used in text output; unnamed generators get `g<degree>_<id>`.
    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| format!("g{}_{}", self.degree, self.id))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct DegreeBlock {
    generators: Vec<Generator>,
    boundary: Vec<SparseColumn<Scalar>>,
}

/// A filtered chain complex over a single field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredChainComplex {
    field: FieldSpec,
    blocks: BTreeMap<i32, DegreeBlock>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// A boundary entry points to a higher filtration level than its source.
    FiltrationIncrease { target: GenRef, target_filtration: i64, source_filtration: i64 },
    /// `d(d(g))` is nonzero.
    BoundarySquaredNonzero,
}

/// A single failed invariant, located at a generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub degree: i32,
    pub id: usize,
    pub name: String,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ViolationKind::FiltrationIncrease { target_filtration, source_filtration, .. } => write!(
                f,
                "degree-{} generator {}: target filtration {} > source filtration {}",
                self.degree, self.name, target_filtration, source_filtration
            ),
            ViolationKind::BoundarySquaredNonzero => {
                write!(f, "d∘d ≠ 0 at degree-{} generator {}", self.degree, self.name)
            }
        }
    }
}

impl FilteredChainComplex {
    pub fn empty(field: FieldSpec) -> Self {
        FilteredChainComplex { field, blocks: BTreeMap::new() }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    /// Total number of generators.
    pub fn len(&self) -> usize {
        self.blocks.values().map(|b| b.generators.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Degrees holding at least one generator, ascending.
    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.blocks.iter().filter(|(_, b)| !b.generators.is_empty()).map(|(n, _)| *n)
    }

    pub fn generators(&self, degree: i32) -> &[Generator] {
        self.blocks.get(&degree).map(|b| b.generators.as_slice()).unwrap_or(&[])
    }

    pub fn all_generators(&self) -> impl Iterator<Item = &Generator> {
        self.blocks.values().flat_map(|b| b.generators.iter())
    }

    pub fn generator(&self, g: GenRef) -> &Generator {
        &self.blocks[&g.degree].generators[g.id]
    }

    /// Boundary of `g`, with rows indexing generators of degree `g.degree - 1`.
    pub fn boundary(&self, g: GenRef) -> &SparseColumn<Scalar> {
        &self.blocks[&g.degree].boundary[g.id]
    }

    pub fn rank_in_degree(&self, degree: i32) -> usize {
        self.generators(degree).len()
    }

    /// Smallest and largest filtration level present.
    pub fn level_range(&self) -> Option<(i64, i64)> {
        let mut it = self.all_generators().map(|g| g.filtration);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), s| (lo.min(s), hi.max(s))))
    }

    /// `max level - min level`, zero when empty.
    pub fn filtration_span(&self) -> u64 {
        self.level_range().map(|(lo, hi)| (hi - lo) as u64).unwrap_or(0)
    }

    /// Filtration levels of the generators of `degree`, indexed by id.
    pub fn filtrations(&self, degree: i32) -> Vec<i64> {
        self.generators(degree).iter().map(|g| g.filtration).collect()
    }

    /// Boundary matrix `d_n: C_n -> C_{n-1}` converted into `field`.
    pub(crate) fn boundary_matrix<F: Field>(&self, field: &F, degree: i32) -> SparseMatrix<F::Elem> {
        let rows = self.rank_in_degree(degree - 1);
        let columns = match self.blocks.get(&degree) {
            None => Vec::new(),
            Some(block) => block
                .boundary
                .iter()
                .map(|col| {
                    let entries = col
                        .entries()
                        .iter()
                        .map(|(r, c)| (*r, field.from_scalar(c).expect("complex scalars match its field")))
                        .collect();
                    SparseColumn::from_sorted_unchecked(entries)
                })
                .collect(),
        };
        SparseMatrix::new(rows, columns).expect("boundary rows in range")
    }

    /// Checks filtration compatibility and `d∘d = 0`, reporting every failure.
    pub fn validate(&self) -> std::result::Result<(), Vec<Violation>> {
        let mut violations = Vec::new();
        let field = self.field;
        for (&n, block) in &self.blocks {
            let lower = self.filtrations(n - 1);
            for (g, col) in block.generators.iter().zip(&block.boundary) {
                for (r, _) in col.entries() {
                    if lower[*r] > g.filtration {
                        violations.push(Violation {
                            degree: n,
                            id: g.id,
                            name: g.display_name(),
                            kind: ViolationKind::FiltrationIncrease {
                                target: GenRef { degree: n - 1, id: *r },
                                target_filtration: lower[*r],
                                source_filtration: g.filtration,
                            },
                        });
                    }
                }
                let dd = col.entries().iter().fold(SparseColumn::new(), |acc, (r, c)| {
                    axpy(&field, &acc, c, self.boundary(GenRef { degree: n - 1, id: *r }))
                });
                if !dd.is_empty() {
                    violations.push(Violation {
                        degree: n,
                        id: g.id,
                        name: g.display_name(),
                        kind: ViolationKind::BoundarySquaredNonzero,
                    });
                }
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    /// The associated graded complex: same generators, keeping only the
    /// boundary entries between generators at the same level.
    pub fn associated_graded(&self) -> Result<FilteredChainComplex> {
        self.validate().map_err(Error::Invalid)?;
        let mut out = self.clone();
        for (&n, block) in out.blocks.iter_mut() {
            let lower = self.filtrations(n - 1);
            for (g, col) in block.generators.iter().zip(block.boundary.iter_mut()) {
                *col = col.filter_rows(|r| lower[r] == g.filtration);
            }
        }
        Ok(out)
    }

    /// `dim H_n(C, d)` of the underlying unfiltered complex.
    pub fn homology_dim(&self, degree: i32) -> usize {
        let count = self.rank_in_degree(degree);
        if count == 0 {
            return 0;
        }
        with_field!(self.field, |f| {
            count - rank(&self.boundary_matrix(&f, degree), &f) - rank(&self.boundary_matrix(&f, degree + 1), &f)
        })
    }

    /// `dim H_n` of the associated graded complex at filtration level `level`.
    pub fn graded_homology_dim(&self, degree: i32, level: i64) -> usize {
        let at = |n: i32| -> Vec<usize> {
            self.generators(n).iter().filter(|g| g.filtration == level).map(|g| g.id).collect()
        };
        let here = at(degree);
        if here.is_empty() {
            return 0;
        }
        with_field!(self.field, |f| {
            let block_rank = |n: i32| -> usize {
                let cols = at(n);
                let lower = self.filtrations(n - 1);
                let d = self.boundary_matrix(&f, n);
                let columns = cols.iter().map(|&j| d.columns()[j].filter_rows(|r| lower[r] == level)).collect();
                rank(&SparseMatrix::new(d.n_rows(), columns).expect("rows in range"), &f)
            };
            here.len() - block_rank(degree) - block_rank(degree + 1)
        })
    }

    /// Rebuilds the complex with the generators of each degree reordered:
    /// `order[&n][k]` is the old id of the generator that gets new id `k`.
    pub fn reindexed(&self, order: &BTreeMap<i32, Vec<usize>>) -> FilteredChainComplex {
        let mut new_id: HashMap<GenRef, usize> = HashMap::new();
        for (&n, perm) in order {
            for (k, &old) in perm.iter().enumerate() {
                new_id.insert(GenRef { degree: n, id: old }, k);
            }
        }
        let lookup = |degree: i32, id: usize| new_id.get(&GenRef { degree, id }).copied().unwrap_or(id);
        let mut blocks = BTreeMap::new();
        for (&n, block) in &self.blocks {
            let len = block.generators.len();
            let mut gens: Vec<Option<Generator>> = vec![None; len];
            let mut cols: Vec<SparseColumn<Scalar>> = vec![SparseColumn::new(); len];
            for (g, col) in block.generators.iter().zip(&block.boundary) {
                let k = lookup(n, g.id);
                gens[k] = Some(Generator { id: k, ..g.clone() });
                cols[k] = col.map_rows(|r| lookup(n - 1, r));
            }
            let generators = gens.into_iter().map(|g| g.expect("order is a permutation")).collect();
            blocks.insert(n, DegreeBlock { generators, boundary: cols });
        }
        FilteredChainComplex { field: self.field, blocks }
    }
}

/// Incremental construction of a [`FilteredChainComplex`].
#[derive(Debug)]
pub struct ComplexBuilder {
    field: FieldSpec,
    blocks: BTreeMap<i32, DegreeBlock>,
    pending: BTreeMap<GenRef, Vec<(usize, Scalar)>>,
    names: HashMap<String, GenRef>,
}

impl ComplexBuilder {
    pub fn new(field: FieldSpec) -> Self {
        ComplexBuilder { field, blocks: BTreeMap::new(), pending: BTreeMap::new(), names: HashMap::new() }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    /// Adds a generator; names must be unique across the whole complex.
    pub fn generator(&mut self, name: Option<&str>, degree: i32, filtration: i64) -> Result<GenRef> {
        let block = self.blocks.entry(degree).or_default();
        let r = GenRef { degree, id: block.generators.len() };
        if let Some(name) = name {
            if self.names.insert(name.to_string(), r).is_some() {
                return Err(Error::Usage(format!("duplicate generator name '{name}'")));
            }
        }
        block.generators.push(Generator { id: r.id, name: name.map(str::to_string), degree, filtration });
        block.boundary.push(SparseColumn::new());
        Ok(r)
    }

    pub fn lookup(&self, name: &str) -> Option<GenRef> {
        self.names.get(name).copied()
    }

    /// Adds terms `coeff * target` to the boundary of `source`. Repeated
    /// calls accumulate.
    pub fn boundary(&mut self, source: GenRef, terms: impl IntoIterator<Item = (Scalar, GenRef)>) -> Result<()> {
        self.check_ref(source)?;
        for (c, t) in terms {
            self.check_ref(t)?;
            if t.degree != source.degree - 1 {
                return Err(Error::Usage(format!(
                    "boundary of a degree-{} generator must target degree {}, got {}",
                    source.degree,
                    source.degree - 1,
                    t.degree
                )));
            }
            if !self.field.owns(&c) {
                return Err(Error::Usage(format!("coefficient {c} is not in field {}", self.field)));
            }
            self.pending.entry(source).or_default().push((t.id, c));
        }
        Ok(())
    }

    fn check_ref(&self, g: GenRef) -> Result<()> {
        match self.blocks.get(&g.degree) {
            Some(b) if g.id < b.generators.len() => Ok(()),
            _ => Err(Error::Usage(format!("unknown generator {g:?}"))),
        }
    }

    /// Assembles the complex without checking its invariants.
    pub fn build_unchecked(mut self) -> FilteredChainComplex {
        for (src, entries) in std::mem::take(&mut self.pending) {
            let col = SparseColumn::from_entries(&self.field, entries);
            self.blocks.get_mut(&src.degree).expect("checked").boundary[src.id] = col;
        }
        FilteredChainComplex { field: self.field, blocks: self.blocks }
    }

    /// Assembles and validates.
    pub fn build(self) -> Result<FilteredChainComplex> {
        let c = self.build_unchecked();
        c.validate().map_err(Error::Invalid)?;
        Ok(c)
    }
}

/// The two-generator model complex whose only bar is `(n, s, m)`:
/// a degree-`n` cycle at level `s`, killed `m` levels later by a degree
/// `n + 1` generator. `m = None` gives the single essential generator.
pub fn model_complex(field: FieldSpec, n: i32, s: i64, m: Option<u64>) -> FilteredChainComplex {
    let mut b = ComplexBuilder::new(field);
    let v = b.generator(Some("v"), n, s).expect("fresh name");
    if let Some(m) = m {
        let w = b.generator(Some("w"), n + 1, s + m as i64).expect("fresh name");
        b.boundary(w, [(field.one(), v)]).expect("degrees match");
    }
    b.build().expect("model complex is valid")
}

/// Three vertices at level 0, edges at levels 1, 1, 2.
#[cfg(test)]
pub(crate) fn triangle(field: FieldSpec) -> FilteredChainComplex {
    let mut b = ComplexBuilder::new(field);
    let v: Vec<GenRef> = (0..3).map(|i| b.generator(Some(&format!("v{i}")), 0, 0).unwrap()).collect();
    let one = field.one();
    let minus = field.from_i64(-1);
    for (name, i, j, s) in [("e01", 0, 1, 1), ("e12", 1, 2, 1), ("e02", 0, 2, 2)] {
        let e = b.generator(Some(name), 1, s).unwrap();
        b.boundary(e, [(one.clone(), v[j]), (minus.clone(), v[i])]).unwrap();
    }
    b.build().unwrap()
}
