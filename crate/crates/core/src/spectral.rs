//! Spectral-sequence page dimensions.
//!
//! Two engines compute the same table. [`pages_from_barcode`] counts, for
//! every bar, the page entries its summand contributes: an essential bar
//! `(n, s, inf)` gives one dimension at `(n, s)` on every page, a finite bar
//! `(n, s, m)` gives one at `(n, s)` and one at `(n + 1, s + m)` on pages
//! `1..=m` and nothing afterwards. [`pages_direct`] never looks at the
//! barcode; it evaluates
//!
//! ```text
//! E^r_{n,s} = Z^r_{n,s} / (Z^{r-1}_{n,s-1} + d Z^{r-1}_{n+1,s+r-1})
//! Z^r_{n,s} = { c in F^s C_n : dc in F^{s-r} C_{n-1} }
//! ```
//!
//! by rank computations, and the infinite page as the graded pieces of the
//! image filtration on `H_n(C)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::coeff::Field;
use crate::complex::{with_field, FilteredChainComplex};
use crate::error::{Error, Result};
use crate::linalg::{apply, kernel_basis, subquotient_dim, SparseColumn, SparseMatrix};
use crate::parallel::Execution;
use crate::persistence::{betti, decompose_with, multiplicity, BarEntry, Barcode, Lifetime};

/// A page index: `1, 2, ...` or the limit page.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Page {
    Finite(u64),
    Infinity,
}

impl fmt::Display for Page {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Page::Finite(r) => write!(f, "{r}"),
            Page::Infinity => write!(f, "inf"),
        }
    }
}

/// Dimensions of `E^r_{n,s}` for `r = 1..=r_max` and `r = inf`. Only nonzero
/// entries are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PageTable {
    r_max: u64,
    dims: BTreeMap<(Page, i32, i64), usize>,
}

impl PageTable {
    pub fn new(r_max: u64) -> Result<Self> {
        if r_max == 0 {
            return Err(Error::Usage("r_max must be at least 1".into()));
        }
        Ok(PageTable { r_max, dims: BTreeMap::new() })
    }

    pub fn r_max(&self) -> u64 {
        self.r_max
    }

    /// `1..=r_max` followed by the limit page.
    pub fn pages(&self) -> impl Iterator<Item = Page> {
        (1..=self.r_max).map(Page::Finite).chain(std::iter::once(Page::Infinity))
    }

    pub fn set(&mut self, page: Page, n: i32, s: i64, dim: usize) -> Result<()> {
        if let Page::Finite(r) = page {
            if r == 0 || r > self.r_max {
                return Err(Error::Usage(format!("page {r} outside 1..={}", self.r_max)));
            }
        }
        if dim == 0 {
            self.dims.remove(&(page, n, s));
        } else {
            self.dims.insert((page, n, s), dim);
        }
        Ok(())
    }

    fn bump(&mut self, page: Page, n: i32, s: i64, by: usize) {
        *self.dims.entry((page, n, s)).or_insert(0) += by;
    }

    /// Absent entries read as zero.
    pub fn dim(&self, page: Page, n: i32, s: i64) -> usize {
        self.dims.get(&(page, n, s)).copied().unwrap_or(0)
    }

    /// Nonzero entries in ascending `(page, n, s)` order.
    pub fn iter(&self) -> impl Iterator<Item = (Page, i32, i64, usize)> + '_ {
        self.dims.iter().map(|(&(p, n, s), &d)| (p, n, s, d))
    }

    /// Bidegrees with a nonzero entry on some page.
    pub fn support(&self) -> BTreeSet<(i32, i64)> {
        self.dims.keys().map(|&(_, n, s)| (n, s)).collect()
    }

    /// `sum_s dim E^r_{n,s}`.
    pub fn total(&self, page: Page, n: i32) -> usize {
        self.iter().filter(|&(p, m, _, _)| p == page && m == n).map(|(_, _, _, d)| d).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    /// Entries where the two tables disagree, as `(page, n, s, self, other)`.
    pub fn diff(&self, other: &PageTable) -> Vec<(Page, i32, i64, usize, usize)> {
        let keys: BTreeSet<(Page, i32, i64)> = self.dims.keys().chain(other.dims.keys()).copied().collect();
        keys.into_iter()
            .filter_map(|(p, n, s)| {
                let (a, b) = (self.dim(p, n, s), other.dim(p, n, s));
                (a != b).then_some((p, n, s, a, b))
            })
            .collect()
    }
}

/// The default page range for `c`: one more than its filtration span, which
/// exceeds every finite lifetime.
pub fn default_r_max(c: &FilteredChainComplex) -> u64 {
    c.filtration_span() + 1
}

/// Page table predicted by the barcode.
pub fn pages_from_barcode(b: &Barcode, r_max: u64) -> Result<PageTable> {
    let mut table = PageTable::new(r_max)?;
    for (e, count) in b.iter() {
        match e.m {
            Lifetime::Infinite => {
                for page in (1..=r_max).map(Page::Finite).chain([Page::Infinity]) {
                    table.bump(page, e.n, e.s, count);
                }
            }
            Lifetime::Finite(m) => {
                for r in 1..=m.min(r_max) {
                    table.bump(Page::Finite(r), e.n, e.s, count);
                    table.bump(Page::Finite(r), e.n + 1, e.s + m as i64, count);
                }
            }
        }
    }
    Ok(table)
}

/// Page table of `c` by direct subquotient computation, default execution.
pub fn pages_direct(c: &FilteredChainComplex, r_max: u64) -> Result<PageTable> {
    pages_direct_with(c, r_max, Execution::default())
}

/// Page table of `c` by direct subquotient computation. Bidegrees are
/// independent and may be evaluated concurrently.
pub fn pages_direct_with(c: &FilteredChainComplex, r_max: u64, exec: Execution) -> Result<PageTable> {
    let mut table = PageTable::new(r_max)?;
    c.validate().map_err(Error::Invalid)?;
    // E^r_{n,s} is a subquotient of F^s C_n / F^{s-1} C_n, so only bidegrees
    // holding a generator can be nonzero
    let cells: Vec<(i32, i64)> =
        c.all_generators().map(|g| (g.degree, g.filtration)).collect::<BTreeSet<_>>().into_iter().collect();
    let columns = with_field!(c.field(), |f| {
        let engine = DirectEngine::new(c, &f);
        exec.map(&cells, |&(n, s)| engine.cell(n, s, r_max))
    });
    for (&(n, s), dims) in cells.iter().zip(columns) {
        for (page, d) in dims {
            table.set(page, n, s, d)?;
        }
    }
    Ok(table)
}

struct DirectEngine<'a, F: Field> {
    field: &'a F,
    boundary: BTreeMap<i32, SparseMatrix<F::Elem>>,
    levels: BTreeMap<i32, Vec<i64>>,
}

impl<'a, F: Field> DirectEngine<'a, F> {
    fn new(c: &FilteredChainComplex, field: &'a F) -> Self {
        let mut boundary = BTreeMap::new();
        let mut levels = BTreeMap::new();
        let degrees: BTreeSet<i32> = c.degrees().flat_map(|n| [n - 1, n, n + 1]).collect();
        for n in degrees {
            boundary.insert(n, c.boundary_matrix(field, n));
            levels.insert(n, c.filtrations(n));
        }
        DirectEngine { field, boundary, levels }
    }

    fn d(&self, n: i32) -> &SparseMatrix<F::Elem> {
        &self.boundary[&n]
    }

    fn lv(&self, n: i32) -> &[i64] {
        &self.levels[&n]
    }

    /// Basis of `{ c in F^s C_n : dc in F^t C_{n-1} }`, indexed by degree-`n`
    /// generator ids.
    fn relative_cycles(&self, n: i32, s: i64, t: i64) -> SparseMatrix<F::Elem> {
        let here = self.lv(n);
        let below = self.lv(n - 1);
        let cols: Vec<usize> = (0..here.len()).filter(|&j| here[j] <= s).collect();
        let d = self.d(n);
        let restricted = cols.iter().map(|&j| d.columns()[j].filter_rows(|r| below[r] > t)).collect();
        let m = SparseMatrix::new(d.n_rows(), restricted).expect("rows in range");
        let basis = kernel_basis(&m, self.field).into_iter().map(|v| v.map_rows(|pos| cols[pos])).collect();
        SparseMatrix::new(here.len(), basis).expect("kernel vectors in range")
    }

    fn image(&self, n: i32, chains: &SparseMatrix<F::Elem>) -> Vec<SparseColumn<F::Elem>> {
        chains.columns().iter().map(|v| apply(self.d(n), v, self.field)).collect()
    }

    fn cell(&self, n: i32, s: i64, r_max: u64) -> Vec<(Page, usize)> {
        let ambient = self.lv(n).len();
        let mut out = Vec::with_capacity(r_max as usize + 1);
        for r in 1..=r_max {
            let r = r as i64;
            let numerator = self.relative_cycles(n, s, s.saturating_sub(r));
            let mut denominator = self.relative_cycles(n, s - 1, s.saturating_sub(r)).columns().to_vec();
            denominator.extend(self.image(n + 1, &self.relative_cycles(n + 1, s.saturating_add(r - 1), s)));
            let denominator = SparseMatrix::new(ambient, denominator).expect("rows in range");
            let dim = subquotient_dim(&numerator, &denominator, self.field).expect("same ambient space");
            out.push((Page::Finite(r as u64), dim));
        }
        let boundaries = SparseMatrix::new(ambient, self.d(n + 1).columns().to_vec()).expect("rows in range");
        let image_dim = |level: i64| {
            subquotient_dim(&self.relative_cycles(n, level, i64::MIN), &boundaries, self.field).expect("same ambient")
        };
        out.push((Page::Infinity, image_dim(s) - image_dim(s - 1)));
        out
    }
}

/// First page from which the entry at `(n, s)` equals its limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Collapse {
    At(u64),
    /// The last computed page still differs from the limit page.
    NotStabilized,
}

impl fmt::Display for Collapse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Collapse::At(r) => write!(f, "{r}"),
            Collapse::NotStabilized => write!(f, "not stabilized within r_max"),
        }
    }
}

pub fn collapse_page(p: &PageTable, n: i32, s: i64) -> Collapse {
    let limit = p.dim(Page::Infinity, n, s);
    let mut first = None;
    for r in (1..=p.r_max()).rev() {
        if p.dim(Page::Finite(r), n, s) != limit {
            break;
        }
        first = Some(r);
    }
    first.map_or(Collapse::NotStabilized, Collapse::At)
}

/// Reads the barcode back off a page table whose bars are all born at or
/// after `s_min`.
///
/// Essential bars are the limit page. Finite bars are peeled off level by
/// level, lowest first: the drop from page `m` to page `m + 1` at `(n, s)`
/// counts the bars `(n, s, m)` plus the bars `(n - 1, s - m, m)` ending
/// there, and the latter are already known because `s - m < s`.
pub fn recover_barcode(p: &PageTable, s_min: i64) -> Result<Barcode> {
    let support = p.support();
    if let Some(&(n, s)) = support.iter().find(|&&(_, s)| s < s_min) {
        return Err(Error::InconsistentTable(format!("entry at (n={n}, s={s}) lies below s_min = {s_min}")));
    }
    let mut barcode = Barcode::new();
    let Some(s_max) = support.iter().map(|&(_, s)| s).max() else {
        return Ok(barcode);
    };
    let degrees: BTreeSet<i32> = support.iter().map(|&(n, _)| n).collect();
    let r_max = p.r_max();
    let mut finite: BTreeMap<(i32, i64, u64), usize> = BTreeMap::new();
    for s in s_min..=s_max {
        for &n in &degrees {
            let inf = p.dim(Page::Infinity, n, s);
            barcode.add(BarEntry::infinite(n, s), inf);
            for m in 1..r_max {
                let drop = p.dim(Page::Finite(m), n, s) as i64 - p.dim(Page::Finite(m + 1), n, s) as i64;
                let ending = finite.get(&(n - 1, s - m as i64, m)).copied().unwrap_or(0) as i64;
                let nu = drop - ending;
                if nu < 0 {
                    return Err(Error::InconsistentTable(format!(
                        "negative multiplicity {nu} for bar (n={n}, s={s}, m={m})"
                    )));
                }
                if nu > 0 {
                    finite.insert((n, s, m), nu as usize);
                    barcode.add(BarEntry { n, s, m: Lifetime::Finite(m) }, nu as usize);
                }
            }
        }
    }
    for &(n, s) in &support {
        let last = p.dim(Page::Finite(r_max), n, s);
        let limit = p.dim(Page::Infinity, n, s);
        if last > limit {
            return Err(Error::InsufficientRMax(format!(
                "entry (n={n}, s={s}) is still {last} on page {r_max} but {limit} in the limit"
            )));
        }
    }
    let predicted = pages_from_barcode(&barcode, r_max)?;
    if let Some((page, n, s, want, got)) = p.diff(&predicted).into_iter().next() {
        return Err(Error::InconsistentTable(format!(
            "no barcode reproduces the table: page {page} at (n={n}, s={s}) is {want}, recovered bars give {got}"
        )));
    }
    Ok(barcode)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of [`verify`]: one entry per identity checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub r_max: u64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.passed).count()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        write!(f, "{}/{} checks passed", self.passed(), self.checks.len())
    }
}

pub fn verify(c: &FilteredChainComplex, r_max: u64) -> Result<VerifyReport> {
    verify_with(c, r_max, Execution::default())
}

/// Cross-checks the barcode against the directly computed pages.
pub fn verify_with(c: &FilteredChainComplex, r_max: u64, exec: Execution) -> Result<VerifyReport> {
    let (_, barcode) = decompose_with(c, exec)?;
    let predicted = pages_from_barcode(&barcode, r_max)?;
    let direct = pages_direct_with(c, r_max, exec)?;
    let mut checks = Vec::new();

    let diff = predicted.diff(&direct);
    checks.push(Check {
        name: "dual-engine pages",
        passed: diff.is_empty(),
        detail: match diff.first() {
            None => format!("{} nonzero entries agree", direct.iter().count()),
            Some((p, n, s, a, b)) => {
                format!("{} entries differ, first at page {p} (n={n}, s={s}): barcode {a}, direct {b}", diff.len())
            }
        },
    });

    let cells: BTreeSet<(i32, i64)> =
        c.all_generators().map(|g| (g.degree, g.filtration)).chain(predicted.support()).collect();
    let e1_bad: Vec<_> =
        cells.iter().filter(|&&(n, s)| predicted.dim(Page::Finite(1), n, s) != c.graded_homology_dim(n, s)).collect();
    checks.push(Check {
        name: "E1 = graded homology",
        passed: e1_bad.is_empty(),
        detail: match e1_bad.first() {
            None => format!("{} bidegrees", cells.len()),
            Some((n, s)) => format!("{} bidegrees differ, first (n={n}, s={s})", e1_bad.len()),
        },
    });

    let degrees: BTreeSet<i32> = c.degrees().flat_map(|n| [n - 1, n]).collect();
    let inf_bad: Vec<i32> =
        degrees.iter().copied().filter(|&n| direct.total(Page::Infinity, n) != c.homology_dim(n)).collect();
    checks.push(Check {
        name: "Einf = total homology",
        passed: inf_bad.is_empty(),
        detail: match inf_bad.first() {
            None => format!("{} degrees", degrees.len()),
            Some(n) => format!(
                "degree {n}: sum of limit page {} vs homology {}",
                direct.total(Page::Infinity, *n),
                c.homology_dim(*n)
            ),
        },
    });

    let totals = totalized_mismatches(c, &barcode, &direct)?;
    checks.push(Check {
        name: "totalized page dimensions",
        passed: totals.is_empty(),
        detail: match totals.first() {
            None => format!("{} degrees x {} pages", degrees.len(), r_max),
            Some((n, r, lhs, rhs)) => format!("degree {n}, page {r}: pages {lhs} vs bars {rhs}"),
        },
    });

    let s_min = c.level_range().map_or(0, |(lo, _)| lo);
    let (passed, detail) = match recover_barcode(&direct, s_min) {
        Ok(b) if b == barcode => (true, format!("{} bars recovered", b.total())),
        Ok(b) => (false, format!("recovered {} bars, expected {}", b.total(), barcode.total())),
        Err(e) => (false, e.to_string()),
    };
    checks.push(Check { name: "barcode recovery", passed, detail });

    Ok(VerifyReport { r_max, checks })
}

/// `sum_s dim E^r_{n,s}` against `b_n + sum_{s, m >= r} (nu_{n,s,m} + nu_{n-1,s,m})`,
/// with the right side assembled from persistent Betti numbers and
/// multiplicities.
fn totalized_mismatches(
    c: &FilteredChainComplex,
    barcode: &Barcode,
    direct: &PageTable,
) -> Result<Vec<(i32, u64, usize, usize)>> {
    let mut out = Vec::new();
    let Some((lo, hi)) = c.level_range() else {
        return Ok(out);
    };
    let degrees: BTreeSet<i32> = c.degrees().flat_map(|n| [n - 1, n, n + 1]).collect();
    for &n in &degrees {
        let essential = betti(barcode, n, hi, hi)?;
        for r in 1..=direct.r_max() {
            let mut rhs = essential;
            for s in lo..=hi {
                for m in r..=(hi - lo) as u64 {
                    let j = Some(s + m as i64);
                    rhs += multiplicity(barcode, n, s, j)? + multiplicity(barcode, n - 1, s, j)?;
                }
            }
            let lhs = direct.total(Page::Finite(r), n);
            if lhs != rhs {
                out.push((n, r, lhs, rhs));
            }
        }
    }
    Ok(out)
}
