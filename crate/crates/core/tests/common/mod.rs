//! Brute-force reference computations for the integration tests.
//!
//! Everything here works on dense matrices with its own elimination and its
//! own field arithmetic, so it shares no code with the sparse reducers under
//! test. Only the input complex is read through the library.

#![allow(dead_code, clippy::needless_range_loop)]

use num_rational::BigRational;
use num_traits::{One, Zero};
use spectra_persist::{random_complex, BarEntry, Barcode, FieldSpec, FilteredChainComplex, GenRef, Lifetime, Scalar};

#[derive(Clone, Debug, PartialEq)]
enum V {
    P(u64),
    Q(BigRational),
}

#[derive(Clone, Copy)]
struct Arith(FieldSpec);

impl Arith {
    fn convert(&self, s: &Scalar) -> V {
        match s {
            Scalar::Mod { residue, .. } => V::P(*residue),
            Scalar::Rational(q) => V::Q(q.clone()),
        }
    }

    fn zero(&self) -> V {
        match self.0 {
            FieldSpec::Prime(_) => V::P(0),
            FieldSpec::Rational => V::Q(BigRational::zero()),
        }
    }

    fn is_zero(a: &V) -> bool {
        match a {
            V::P(x) => *x == 0,
            V::Q(x) => x.is_zero(),
        }
    }

    fn p(&self) -> u128 {
        match self.0 {
            FieldSpec::Prime(p) => p as u128,
            FieldSpec::Rational => unreachable!(),
        }
    }

    /// `a - c * b`
    fn sub_mul(&self, a: &V, c: &V, b: &V) -> V {
        match (a, c, b) {
            (V::P(a), V::P(c), V::P(b)) => {
                let p = self.p();
                V::P(((*a as u128 + p * p - (*c as u128 * *b as u128) % p) % p) as u64)
            }
            (V::Q(a), V::Q(c), V::Q(b)) => V::Q(a - c * b),
            _ => unreachable!(),
        }
    }

    /// `a / b` for nonzero `b`.
    fn div(&self, a: &V, b: &V) -> V {
        match (a, b) {
            (V::P(a), V::P(b)) => {
                // Fermat inverse
                let p = self.p();
                let (mut base, mut e, mut inv) = (*b as u128, p - 2, 1u128);
                while e > 0 {
                    if e & 1 == 1 {
                        inv = inv * base % p;
                    }
                    base = base * base % p;
                    e >>= 1;
                }
                V::P((*a as u128 * inv % p) as u64)
            }
            (V::Q(a), V::Q(b)) => V::Q(a / b),
            _ => unreachable!(),
        }
    }

    fn one(&self) -> V {
        match self.0 {
            FieldSpec::Prime(_) => V::P(1),
            FieldSpec::Rational => V::Q(BigRational::one()),
        }
    }
}

/// Column vectors of a common length.
type Cols = Vec<Vec<V>>;

/// Rank by row reduction of the transpose (columns as rows).
fn rank(ar: Arith, cols: &Cols) -> usize {
    let mut rows = cols.clone();
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&r| !Arith::is_zero(&rows[r][col])) else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in 0..rows.len() {
            if r != rank && !Arith::is_zero(&rows[r][col]) {
                let factor = ar.div(&rows[r][col], &rows[rank][col]);
                for k in col..width {
                    rows[r][k] = ar.sub_mul(&rows[r][k], &factor, &rows[rank][k]);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Null space of a `rows x cols` matrix given column-major, via reduced row
/// echelon form.
fn kernel(ar: Arith, n_rows: usize, cols: &Cols) -> Cols {
    let n_cols = cols.len();
    let mut m: Vec<Vec<V>> = (0..n_rows).map(|r| (0..n_cols).map(|c| cols[c][r].clone()).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n_cols {
        let Some(p) = (row..n_rows).find(|&r| !Arith::is_zero(&m[r][col])) else {
            continue;
        };
        m.swap(row, p);
        let lead = m[row][col].clone();
        for k in 0..n_cols {
            m[row][k] = ar.div(&m[row][k], &lead);
        }
        for r in 0..n_rows {
            if r != row && !Arith::is_zero(&m[r][col]) {
                let factor = m[r][col].clone();
                for k in 0..n_cols {
                    m[r][k] = ar.sub_mul(&m[r][k], &factor, &m[row][k]);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..n_cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![ar.zero(); n_cols];
            v[f] = ar.one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = ar.sub_mul(&ar.zero(), &m[r][f], &ar.one());
            }
            v
        })
        .collect()
}

/// Dense view of a complex: per degree, each generator's level and its
/// boundary column over the generators one degree down.
pub struct Dense {
    ar: Arith,
    c: FilteredChainComplex,
}

impl Dense {
    pub fn new(c: &FilteredChainComplex) -> Self {
        Dense { ar: Arith(c.field()), c: c.clone() }
    }

    fn levels(&self, n: i32) -> Vec<i64> {
        self.c.generators(n).iter().map(|g| g.filtration).collect()
    }

    fn column(&self, n: i32, id: usize) -> Vec<V> {
        let mut v = vec![self.ar.zero(); self.c.rank_in_degree(n - 1)];
        for (row, x) in self.c.boundary(GenRef { degree: n, id }).entries() {
            v[*row] = self.ar.convert(x);
        }
        v
    }

    /// Cycles of `F^i C_n`, as vectors over all of `C_n`.
    fn cycles(&self, n: i32, i: i64) -> Cols {
        let levels = self.levels(n);
        let ids: Vec<usize> = (0..levels.len()).filter(|&k| levels[k] <= i).collect();
        let cols: Cols = ids.iter().map(|&k| self.column(n, k)).collect();
        kernel(self.ar, self.c.rank_in_degree(n - 1), &cols)
            .into_iter()
            .map(|v| {
                let mut full = vec![self.ar.zero(); levels.len()];
                for (pos, &k) in ids.iter().enumerate() {
                    full[k] = v[pos].clone();
                }
                full
            })
            .collect()
    }

    /// Boundaries of `F^j C_{n+1}`.
    fn boundaries(&self, n: i32, j: i64) -> Cols {
        let levels = self.levels(n + 1);
        (0..levels.len()).filter(|&k| levels[k] <= j).map(|k| self.column(n + 1, k)).collect()
    }

    /// `dim im(H_n(F^i) -> H_n(F^j))` for `i <= j`.
    pub fn betti(&self, n: i32, i: i64, j: i64) -> usize {
        assert!(i <= j);
        let b = self.boundaries(n, j);
        let mut both = self.cycles(n, i);
        both.extend(b.iter().cloned());
        rank(self.ar, &both) - rank(self.ar, &b)
    }

    pub fn homology(&self, n: i32) -> usize {
        let top = self.c.level_range().map_or(0, |(_, hi)| hi);
        self.betti(n, top, top)
    }

    /// Homology at level `s` of the associated graded: only boundary
    /// entries between generators of level exactly `s` survive.
    pub fn graded_homology(&self, n: i32, s: i64) -> usize {
        let restrict = |deg: i32| -> Cols {
            let here = self.levels(deg);
            let below = self.levels(deg - 1);
            (0..here.len())
                .filter(|&k| here[k] == s)
                .map(|k| {
                    let col = self.column(deg, k);
                    (0..below.len()).filter(|&r| below[r] == s).map(|r| col[r].clone()).collect()
                })
                .collect()
        };
        let rows = self.levels(n - 1).iter().filter(|&&l| l == s).count();
        let cycles = kernel(self.ar, rows, &restrict(n)).len();
        cycles - rank(self.ar, &restrict(n + 1))
    }

    /// Barcode from persistent Betti numbers by inclusion-exclusion:
    /// `nu_{n,i,j-i} = b^{i,j-1} - b^{i,j} - b^{i-1,j-1} + b^{i-1,j}`.
    pub fn barcode(&self) -> Barcode {
        let mut out = Barcode::new();
        let Some((lo, hi)) = self.c.level_range() else {
            return out;
        };
        for n in self.c.degrees() {
            let b = |i: i64, j: i64| if i < lo { 0 } else { self.betti(n, i, j.min(hi)) as i64 };
            for i in lo..=hi {
                let inf = b(i, hi) - b(i - 1, hi);
                assert!(inf >= 0);
                out.add(BarEntry::infinite(n, i), inf as usize);
                for j in i + 1..=hi {
                    let nu = b(i, j - 1) - b(i, j) - b(i - 1, j - 1) + b(i - 1, j);
                    assert!(nu >= 0, "negative multiplicity");
                    out.add(BarEntry { n, s: i, m: Lifetime::Finite((j - i) as u64) }, nu as usize);
                }
            }
        }
        out
    }
}

pub const FIELDS: [FieldSpec; 4] =
    [FieldSpec::Prime(2), FieldSpec::Prime(5), FieldSpec::Prime(32003), FieldSpec::Rational];

/// The shared random corpus: `count` complexes of 1 to `max_size`
/// generators, cycling through [`FIELDS`].
pub fn corpus(count: usize, max_size: usize, salt: u64) -> Vec<FilteredChainComplex> {
    (0..count)
        .map(|k| {
            let seed = salt.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(k as u64);
            let size = 1 + (seed.wrapping_mul(2_654_435_761) >> 7) as usize % max_size;
            random_complex(FIELDS[k % FIELDS.len()], size, seed)
        })
        .collect()
}
