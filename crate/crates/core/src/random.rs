//! Seeded random filtered chain complexes.
//!
//! Degrees are drawn from `-1..=3` and levels from `-3..=6`. Boundaries are
//! built degree by degree: a generator at level `s` receives either zero or
//! a random combination of one to three basis cycles of `F^s C_{n-1}`, so
//! `d∘d = 0` and filtration compatibility hold without any rejection step.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeff::{FieldSpec, Scalar};
use crate::complex::{ComplexBuilder, FilteredChainComplex, GenRef};
use crate::linalg::{axpy, kernel_basis, SparseColumn, SparseMatrix};

pub const DEGREES: std::ops::RangeInclusive<i32> = -1..=3;
pub const LEVELS: std::ops::RangeInclusive<i64> = -3..=6;

/// Probability that a generator is given the zero boundary outright.
const ZERO_BOUNDARY: f64 = 0.3;

/// A valid complex with `size` generators, determined by `seed`.
pub fn random_complex(field: FieldSpec, size: usize, seed: u64) -> FilteredChainComplex {
    random_complex_with(&mut ChaCha8Rng::seed_from_u64(seed), field, size)
}

pub fn random_complex_with<R: Rng>(rng: &mut R, field: FieldSpec, size: usize) -> FilteredChainComplex {
    let mut b = ComplexBuilder::new(field);
    // levels of each degree's generators, indexed by id
    let mut levels: BTreeMap<i32, Vec<i64>> = BTreeMap::new();
    for k in 0..size {
        let (degree, level) = (rng.gen_range(DEGREES), rng.gen_range(LEVELS));
        b.generator(Some(&format!("g{k}")), degree, level).expect("fresh name");
        levels.entry(degree).or_default().push(level);
    }
    let mut boundaries: BTreeMap<i32, Vec<SparseColumn<Scalar>>> = BTreeMap::new();
    for (&n, here) in &levels {
        let below = levels.get(&(n - 1)).map_or(&[][..], Vec::as_slice);
        let below_boundaries = boundaries.get(&(n - 1)).map_or(&[][..], Vec::as_slice);
        let rows = levels.get(&(n - 2)).map_or(0, Vec::len);
        let mut columns = Vec::with_capacity(here.len());
        for (id, &s) in here.iter().enumerate() {
            let col = if below.is_empty() || rng.gen_bool(ZERO_BOUNDARY) {
                SparseColumn::new()
            } else {
                let ids: Vec<usize> = (0..below.len()).filter(|&i| below[i] <= s).collect();
                let m = SparseMatrix::new(rows, ids.iter().map(|&i| below_boundaries[i].clone()).collect())
                    .expect("rows in range");
                random_combination(rng, field, &kernel_basis(&m, &field)).map_rows(|pos| ids[pos])
            };
            let terms = col.entries().iter().map(|(t, c)| (c.clone(), GenRef { degree: n - 1, id: *t }));
            b.boundary(GenRef { degree: n, id }, terms.collect::<Vec<_>>()).expect("degrees match");
            columns.push(col);
        }
        boundaries.insert(n, columns);
    }
    b.build().expect("random complexes are valid by construction")
}

fn random_combination<R: Rng>(rng: &mut R, field: FieldSpec, basis: &[SparseColumn<Scalar>]) -> SparseColumn<Scalar> {
    let mut out = SparseColumn::new();
    if basis.is_empty() {
        return out;
    }
    let k = rng.gen_range(1..=basis.len().min(3));
    for i in sample(rng, basis.len(), k) {
        let c = random_unit(rng, field);
        out = axpy(&field, &out, &c, &basis[i]);
    }
    out
}

/// A random nonzero scalar: an integer in `-3..=3` over `Q`, any residue
/// over `GF(p)`.
fn random_unit<R: Rng>(rng: &mut R, field: FieldSpec) -> Scalar {
    match field {
        FieldSpec::Rational => {
            let v = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
            field.from_i64(v)
        }
        FieldSpec::Prime(p) => field.from_i64(rng.gen_range(1..p) as i64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_sized() {
        for field in [FieldSpec::Prime(2), FieldSpec::Prime(32003), FieldSpec::Rational] {
            let a = random_complex(field, 40, 7);
            assert_eq!(a.len(), 40);
            assert_eq!(a, random_complex(field, 40, 7));
            assert!(a.validate().is_ok());
        }
        assert!(random_complex(FieldSpec::Prime(5), 0, 1).is_empty());
    }

    #[test]
    fn ranges_respected() {
        let c = random_complex(FieldSpec::Rational, 200, 3);
        assert!(c.all_generators().all(|g| DEGREES.contains(&g.degree) && LEVELS.contains(&g.filtration)));
        // enough nonzero boundaries to produce finite bars
        let nonzero = c.all_generators().filter(|g| !c.boundary(g.gen_ref()).is_empty()).count();
        assert!(nonzero > 20, "{nonzero}");
    }
}
