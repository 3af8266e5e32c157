//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{corpus, Dense, FIELDS};
use spectra_persist::{
    betti, decompose, default_r_max, model_complex, multiplicity, pages_direct, pages_from_barcode, parse_complex,
    recover_barcode, rips, serialize_complex, simplicial_to_chain, write_barcode, BarEntry, Barcode, FieldSpec,
    FilteredChainComplex, Lifetime, OutputFormat, Page, PageTable, PointCloud,
};

/// Wall-clock limits, pinned here.
const AC1_LIMIT: Duration = Duration::from_secs(1);
const AC2_TARGET: Duration = Duration::from_secs(60);
const AC8_LIMIT: Duration = Duration::from_secs(5);

const CORPUS_SIZE: usize = 1000;
const CORPUS_MAX_GENERATORS: usize = 50;
const CORPUS_SALT: u64 = 2024;

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn r_max(c: &FilteredChainComplex) -> u64 {
    default_r_max(c)
}

/// Page table of a single bar, written out by hand.
fn model_table(n: i32, s: i64, m: Option<u64>, r_max: u64) -> PageTable {
    let mut t = PageTable::new(r_max).unwrap();
    match m {
        None => {
            for r in 1..=r_max {
                t.set(Page::Finite(r), n, s, 1).unwrap();
            }
            t.set(Page::Infinity, n, s, 1).unwrap();
        }
        Some(m) => {
            for r in 1..=r_max.min(m) {
                t.set(Page::Finite(r), n, s, 1).unwrap();
                t.set(Page::Finite(r), n + 1, s + m as i64, 1).unwrap();
            }
        }
    }
    t
}

fn ac1() -> Verdict {
    let start = Instant::now();
    let mut cases = 0;
    for field in [FieldSpec::Prime(2), FieldSpec::Prime(5), FieldSpec::Rational] {
        for n in [-1, 0, 1, 2] {
            for s in [-2, 0, 3] {
                for m in [Some(1), Some(2), Some(5), None] {
                    let c = model_complex(field, n, s, m);
                    let (_, bars) = decompose(&c).map_err(|e| e.to_string())?;
                    let entry = BarEntry { n, s, m: m.map_or(Lifetime::Infinite, Lifetime::Finite) };
                    let expect: Barcode = [(entry, 1)].into_iter().collect();
                    ensure(bars == expect, || format!("barcode of U({n},{s},{m:?}) over {field}: {bars:?}"))?;
                    // cover pages past the death of the bar
                    let r_max = 7;
                    let table = model_table(n, s, m, r_max);
                    ensure(pages_from_barcode(&bars, r_max).unwrap() == table, || {
                        format!("barcode pages of U({n},{s},{m:?})")
                    })?;
                    ensure(pages_direct(&c, r_max).unwrap() == table, || format!("direct pages of U({n},{s},{m:?})"))?;
                    cases += 1;
                }
            }
        }
    }
    let t = start.elapsed();
    ensure(t < AC1_LIMIT, || format!("took {t:?}, limit {AC1_LIMIT:?}"))?;
    Ok(format!("{cases} model complexes exact, {t:.2?}"))
}

struct Corpus {
    complexes: Vec<FilteredChainComplex>,
    barcodes: Vec<Barcode>,
    direct: Vec<PageTable>,
    elapsed: Duration,
}

fn build_corpus() -> Corpus {
    let start = Instant::now();
    let complexes = corpus(CORPUS_SIZE, CORPUS_MAX_GENERATORS, CORPUS_SALT);
    let barcodes = complexes.iter().map(|c| decompose(c).unwrap().1).collect();
    let direct = complexes.iter().map(|c| pages_direct(c, r_max(c)).unwrap()).collect();
    Corpus { complexes, barcodes, direct, elapsed: start.elapsed() }
}

fn ac2(k: &Corpus) -> Verdict {
    let start = Instant::now();
    for (i, c) in k.complexes.iter().enumerate() {
        let predicted = pages_from_barcode(&k.barcodes[i], r_max(c)).unwrap();
        let diff = predicted.diff(&k.direct[i]);
        ensure(diff.is_empty(), || {
            format!("complex {i} ({} over {}): first difference {:?}", c.len(), c.field(), diff[0])
        })?;
    }
    let t = k.elapsed + start.elapsed();
    ensure(t < AC2_TARGET, || format!("took {t:?}, target {AC2_TARGET:?}"))?;
    let sizes: usize = k.complexes.iter().map(FilteredChainComplex::len).sum();
    let finite: usize =
        k.barcodes.iter().flat_map(|b| b.iter()).filter(|(e, _)| !e.m.is_infinite()).map(|(_, c)| c).sum();
    let longest = k.barcodes.iter().filter_map(Barcode::max_finite_lifetime).max().unwrap_or(0);
    Ok(format!(
        "{} complexes ({sizes} generators, {finite} finite bars up to length {longest}) over {} fields agree, {t:.2?}",
        k.complexes.len(),
        FIELDS.len()
    ))
}

fn ac3(k: &Corpus) -> Verdict {
    for (i, c) in k.complexes.iter().enumerate() {
        let s_min = c.level_range().map_or(0, |(lo, _)| lo);
        let back = recover_barcode(&k.direct[i], s_min).map_err(|e| format!("complex {i}: {e}"))?;
        ensure(back == k.barcodes[i], || format!("complex {i}: recovered {back:?}"))?;
    }
    Ok(format!("{} barcodes recovered exactly", k.complexes.len()))
}

fn ac4(k: &Corpus) -> Verdict {
    let mut cells = 0;
    for (i, c) in k.complexes.iter().enumerate() {
        let oracle = Dense::new(c);
        let graded = c.associated_graded().unwrap();
        let (lo, hi) = c.level_range().unwrap();
        for n in c.degrees().flat_map(|n| [n - 1, n]).collect::<std::collections::BTreeSet<_>>() {
            for s in lo..=hi {
                let e1 = k.direct[i].dim(Page::Finite(1), n, s);
                let want = oracle.graded_homology(n, s);
                ensure(e1 == want, || format!("complex {i}: E1({n},{s}) = {e1}, graded homology {want}"))?;
                ensure(graded.graded_homology_dim(n, s) == want, || {
                    format!("complex {i}: associated graded at ({n},{s})")
                })?;
                cells += 1;
            }
            let total = k.direct[i].total(Page::Infinity, n);
            let h = oracle.homology(n);
            ensure(total == h, || format!("complex {i}: sum of Einf in degree {n} is {total}, homology {h}"))?;
        }
    }
    Ok(format!("E1 exact on {cells} bidegrees, Einf sums exact"))
}

fn ac5(k: &Corpus) -> Verdict {
    let mut checks = 0;
    for (i, c) in k.complexes.iter().enumerate() {
        let oracle = Dense::new(c);
        let bars = &k.barcodes[i];
        let (lo, hi) = c.level_range().unwrap();
        for n in c.degrees().flat_map(|n| [n - 1, n, n + 1]).collect::<std::collections::BTreeSet<_>>() {
            for r in 1..=r_max(c) {
                let lhs = k.direct[i].total(Page::Finite(r), n);
                let mut rhs = oracle.homology(n);
                for s in lo..=hi {
                    for m in r..=(hi - lo) as u64 {
                        let j = Some(s + m as i64);
                        rhs += multiplicity(bars, n, s, j).unwrap() + multiplicity(bars, n - 1, s, j).unwrap();
                    }
                }
                ensure(lhs == rhs, || format!("complex {i}, degree {n}, page {r}: {lhs} vs {rhs}"))?;
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} (degree, page) totals exact"))
}

/// The same complex with its lines shuffled, read back from text.
fn shuffled(c: &FilteredChainComplex, rng: &mut ChaCha8Rng) -> FilteredChainComplex {
    let text = serialize_complex(c);
    let mut lines: Vec<&str> = text.lines().collect();
    lines.shuffle(rng);
    parse_complex(&lines.join("\n"), c.field()).unwrap()
}

fn ac6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let complexes = corpus(100, CORPUS_MAX_GENERATORS, 6);
    for (i, c) in complexes.iter().enumerate() {
        let (_, base) = decompose(c).unwrap();
        for p in 0..10 {
            let other = if p % 2 == 0 {
                let order: BTreeMap<i32, Vec<usize>> = c
                    .degrees()
                    .map(|n| {
                        let mut ids: Vec<usize> = (0..c.rank_in_degree(n)).collect();
                        ids.shuffle(&mut rng);
                        (n, ids)
                    })
                    .collect();
                c.reindexed(&order)
            } else {
                shuffled(c, &mut rng)
            };
            let (_, bars) = decompose(&other).unwrap();
            ensure(bars == base, || format!("complex {i}, permutation {p}: barcode changed"))?;
        }
    }
    Ok("100 complexes x 10 permutations give identical barcodes".into())
}

fn ac7() -> Verdict {
    let complexes = corpus(100, 25, 7);
    let mut pairs = 0;
    for (k, c) in complexes.iter().enumerate() {
        let oracle = Dense::new(c);
        let (_, bars) = decompose(c).unwrap();
        let (lo, hi) = c.level_range().unwrap();
        for n in c.degrees() {
            for i in lo - 1..=hi + 1 {
                for j in i..=hi + 1 {
                    let got = betti(&bars, n, i, j).unwrap();
                    let want = oracle.betti(n, i, j);
                    ensure(got == want, || format!("complex {k}: b_{n}^({i},{j}) = {got}, oracle {want}"))?;
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("{pairs} persistent Betti numbers match the rank oracle"))
}

fn ac8() -> Verdict {
    let start = Instant::now();
    let points = (0..8)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / 8.0;
            vec![t.cos(), t.sin()]
        })
        .collect();
    let fsc = rips(&PointCloud::from_points(points).unwrap(), 2, Some(1.6));
    let c = simplicial_to_chain(&fsc, FieldSpec::Prime(2)).map_err(|e| e.to_string())?;
    let (_, bars) = decompose(&c).unwrap();
    let essential0: usize = bars.in_degree(0).iter().filter(|(e, _)| e.m.is_infinite()).map(|(_, n)| n).sum();
    ensure(essential0 == 1, || format!("{essential0} essential bars in degree 0"))?;
    let oracle = Dense::new(&c).barcode();
    ensure(bars.in_degree(1) == oracle.in_degree(1), || {
        format!("degree 1: {:?} vs oracle {:?}", bars.in_degree(1), oracle.in_degree(1))
    })?;
    ensure(bars.in_degree(1).total() == 1, || format!("degree 1 has {} bars", bars.in_degree(1).total()))?;
    let t = start.elapsed();
    ensure(t < AC8_LIMIT, || format!("took {t:?}, limit {AC8_LIMIT:?}"))?;
    let h1 = write_barcode(&bars.in_degree(1), OutputFormat::Text);
    Ok(format!("{} simplices, one essential H0 bar, H1 = [{}], {t:.2?}", fsc.len(), h1.trim()))
}

fn main() {
    let mut failed = 0;
    let mut report = |name: &str, title: &str, v: Verdict| match &v {
        Ok(detail) => println!("PASS {name} {title}: {detail}"),
        Err(why) => {
            failed += 1;
            println!("FAIL {name} {title}: {why}");
        }
    };
    report("AC1", "model-complex golden tests", ac1());
    let k = build_corpus();
    report("AC2", "dual-engine page equality", ac2(&k));
    report("AC3", "barcode recovery round-trip", ac3(&k));
    report("AC4", "E1 and Einf identities", ac4(&k));
    report("AC5", "totalized page dimensions", ac5(&k));
    report("AC6", "barcode uniqueness under permutation", ac6());
    report("AC7", "persistent Betti rank oracle", ac7());
    report("AC8", "Rips circle smoke test", ac8());
    println!("{} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
