//! Text formats and geometric constructions that produce filtered complexes.
//!
//! Chain-complex format, one directive per line, `#` starts a comment:
//!
//! ```text
//! gen <name> <degree> <filtration>
//! bnd <source> <coeff> <target> [<coeff> <target> ...]
//! ```
//!
//! Generators may be declared after the boundaries that mention them, and
//! repeated `bnd` lines for one source accumulate. Simplicial input uses
//! `simp <value> <v0> ... <vk>` lines with real values, and point clouds are
//! either `pt <x1> ... <xd>` lines or a `dist <n>` header followed by an
//! `n x n` matrix.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Write as _;

use crate::coeff::FieldSpec;
use crate::complex::{ComplexBuilder, FilteredChainComplex, GenRef};
use crate::error::{Error, Result};
use crate::parallel::Execution;

/// Non-blank lines with comments stripped, paired with 1-based line numbers.
fn directives(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_token<T: std::str::FromStr>(line: usize, token: &str, what: &str) -> Result<T> {
    token.parse().map_err(|_| parse_err(line, format!("invalid {what} '{token}'")))
}

/// Parses and validates a complex in the chain-complex format.
pub fn parse_complex(text: &str, field: FieldSpec) -> Result<FilteredChainComplex> {
    let c = parse_complex_unchecked(text, field)?;
    c.validate().map_err(Error::Invalid)?;
    Ok(c)
}

/// Parses without checking `d∘d = 0` or filtration compatibility.
pub fn parse_complex_unchecked(text: &str, field: FieldSpec) -> Result<FilteredChainComplex> {
    let mut b = ComplexBuilder::new(field);
    let lines: Vec<_> = directives(text).collect();
    for (line, tokens) in &lines {
        match tokens[0] {
            "gen" => {
                let [_, name, degree, filtration] = tokens[..] else {
                    return Err(parse_err(*line, "expected 'gen <name> <degree> <filtration>'"));
                };
                let degree = parse_token(*line, degree, "degree")?;
                let filtration = parse_token(*line, filtration, "filtration")?;
                b.generator(Some(name), degree, filtration).map_err(|e| e.at_line(*line))?;
            }
            "bnd" => {}
            other => return Err(parse_err(*line, format!("unknown directive '{other}'"))),
        }
    }
    for (line, tokens) in lines.iter().filter(|(_, t)| t[0] == "bnd") {
        if tokens.len() < 2 || tokens.len() % 2 != 0 {
            return Err(parse_err(*line, "expected 'bnd <source> <coeff> <target> ...'"));
        }
        let lookup = |name: &str| b.lookup(name).ok_or_else(|| parse_err(*line, format!("unknown generator '{name}'")));
        let source = lookup(tokens[1])?;
        let terms = tokens[2..]
            .chunks(2)
            .map(|pair| Ok((field.parse_scalar(pair[0]).map_err(|e| e.at_line(*line))?, lookup(pair[1])?)))
            .collect::<Result<Vec<_>>>()?;
        b.boundary(source, terms).map_err(|e| e.at_line(*line))?;
    }
    Ok(b.build_unchecked())
}

/// `true` when the first directive of `text` is a `simp` line.
pub fn is_simplicial(text: &str) -> bool {
    directives(text).next().is_some_and(|(_, t)| t[0] == "simp")
}

/// Parses either format, choosing by the first directive. Simplicial input
/// is converted with [`simplicial_to_chain`].
pub fn parse_any(text: &str, field: FieldSpec) -> Result<FilteredChainComplex> {
    if is_simplicial(text) {
        simplicial_to_chain(&parse_simplicial(text)?, field)
    } else {
        parse_complex(text, field)
    }
}

/// Canonical text form: generators in `(degree, id)` order, then one `bnd`
/// line per nonzero boundary with terms in target order.
pub fn serialize_complex(c: &FilteredChainComplex) -> String {
    let mut out = String::new();
    let gens: Vec<_> = c.all_generators().collect();
    for g in &gens {
        writeln!(out, "gen {} {} {}", g.display_name(), g.degree, g.filtration).unwrap();
    }
    for g in &gens {
        let col = c.boundary(g.gen_ref());
        if col.is_empty() {
            continue;
        }
        write!(out, "bnd {}", g.display_name()).unwrap();
        for (id, coeff) in col.entries() {
            let target = c.generator(GenRef { degree: g.degree - 1, id: *id });
            write!(out, " {coeff} {}", target.display_name()).unwrap();
        }
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct Simplex {
    /// Strictly ascending vertex labels.
    pub vertices: Vec<usize>,
    pub value: f64,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    fn name(&self) -> String {
        let labels: Vec<String> = self.vertices.iter().map(usize::to_string).collect();
        format!("s{}", labels.join("-"))
    }
}

/// A simplicial complex with a real value on every simplex, closed under
/// faces and monotone along them.
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredSimplicialComplex {
    simplices: Vec<Simplex>,
    levels: Vec<f64>,
}

impl FilteredSimplicialComplex {
    /// Checks closure and monotonicity. Vertex lists may come in any order.
    pub fn new(simplices: impl IntoIterator<Item = (Vec<usize>, f64)>) -> Result<Self> {
        let mut list = Vec::new();
        for (mut vertices, value) in simplices {
            if vertices.is_empty() {
                return Err(Error::Domain("empty simplex".into()));
            }
            if !value.is_finite() {
                return Err(Error::Domain(format!("simplex value {value} is not finite")));
            }
            vertices.sort_unstable();
            if vertices.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Domain(format!("simplex {vertices:?} repeats a vertex")));
            }
            list.push(Simplex { vertices, value });
        }
        list.sort_by(|a, b| (a.dim(), &a.vertices).cmp(&(b.dim(), &b.vertices)));
        if let Some(w) = list.windows(2).find(|w| w[0].vertices == w[1].vertices) {
            return Err(Error::Domain(format!("duplicate simplex {:?}", w[0].vertices)));
        }
        let index: HashMap<&[usize], f64> = list.iter().map(|s| (s.vertices.as_slice(), s.value)).collect();
        for s in list.iter().filter(|s| s.dim() > 0) {
            for i in 0..s.vertices.len() {
                let face = drop_vertex(&s.vertices, i);
                match index.get(face.as_slice()) {
                    None => return Err(Error::Closure(format!("face {face:?} of {:?} is missing", s.vertices))),
                    Some(&v) if v > s.value => {
                        return Err(Error::Closure(format!(
                            "face {face:?} has value {v} above its coface {:?} at {}",
                            s.vertices, s.value
                        )))
                    }
                    Some(_) => {}
                }
            }
        }
        let mut levels: Vec<f64> = list.iter().map(|s| s.value).collect();
        levels.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        levels.dedup();
        Ok(FilteredSimplicialComplex { simplices: list, levels })
    }

    /// Simplices ordered by dimension, then vertex list.
    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Distinct values in increasing order; entry `k` is the value of level `k`.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Integer level of a value present in the complex.
    pub fn level_of(&self, value: f64) -> Option<i64> {
        self.levels.binary_search_by(|x| x.partial_cmp(&value).unwrap_or(Ordering::Less)).ok().map(|k| k as i64)
    }
}

fn drop_vertex(vertices: &[usize], i: usize) -> Vec<usize> {
    vertices.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect()
}

/// Parses `simp` lines. A vertex that only appears inside larger simplices
/// is added at the smallest value among them.
pub fn parse_simplicial(text: &str) -> Result<FilteredSimplicialComplex> {
    let mut simplices: Vec<(Vec<usize>, f64)> = Vec::new();
    for (line, tokens) in directives(text) {
        if tokens[0] != "simp" || tokens.len() < 3 {
            return Err(parse_err(line, "expected 'simp <value> <v0> ... <vk>'"));
        }
        let value: f64 = parse_token(line, tokens[1], "value")?;
        if !value.is_finite() {
            return Err(parse_err(line, format!("value {value} is not finite")));
        }
        let vertices = tokens[2..].iter().map(|t| parse_token(line, t, "vertex")).collect::<Result<Vec<usize>>>()?;
        simplices.push((vertices, value));
    }
    let declared: std::collections::HashSet<usize> =
        simplices.iter().filter(|(v, _)| v.len() == 1).map(|(v, _)| v[0]).collect();
    let mut implied: std::collections::BTreeMap<usize, f64> = Default::default();
    for (vertices, value) in simplices.iter().filter(|(v, _)| v.len() > 1) {
        for &v in vertices.iter().filter(|v| !declared.contains(v)) {
            let slot = implied.entry(v).or_insert(*value);
            *slot = slot.min(*value);
        }
    }
    simplices.extend(implied.into_iter().map(|(v, value)| (vec![v], value)));
    FilteredSimplicialComplex::new(simplices)
}

/// One generator per simplex in degree `dim` at the integer level of its
/// value, with the alternating-sign face boundary.
pub fn simplicial_to_chain(fsc: &FilteredSimplicialComplex, field: FieldSpec) -> Result<FilteredChainComplex> {
    let mut b = ComplexBuilder::new(field);
    let mut index: HashMap<&[usize], GenRef> = HashMap::new();
    for s in fsc.simplices() {
        let level = fsc.level_of(s.value).expect("value is a level");
        let g = b.generator(Some(&s.name()), s.dim() as i32, level)?;
        index.insert(&s.vertices, g);
    }
    for s in fsc.simplices().iter().filter(|s| s.dim() > 0) {
        let terms = (0..s.vertices.len())
            .map(|i| {
                let face = drop_vertex(&s.vertices, i);
                let target = index
                    .get(face.as_slice())
                    .copied()
                    .ok_or_else(|| Error::Closure(format!("face {face:?} of {:?} is missing", s.vertices)))?;
                Ok((field.from_i64(if i % 2 == 0 { 1 } else { -1 }), target))
            })
            .collect::<Result<Vec<_>>>()?;
        b.boundary(index[s.vertices.as_slice()], terms)?;
    }
    b.build()
}

/// Chain-complex text for a simplicial complex, headed by comments giving
/// the real value of every level.
pub fn serialize_simplicial(fsc: &FilteredSimplicialComplex, field: FieldSpec) -> Result<String> {
    let c = simplicial_to_chain(fsc, field)?;
    let mut out = String::new();
    for (k, v) in fsc.levels().iter().enumerate() {
        writeln!(out, "# level {k} = {v}").unwrap();
    }
    out.push_str(&serialize_complex(&c));
    Ok(out)
}

/// Points in Euclidean space or an explicit metric.
#[derive(Clone, Debug, PartialEq)]
pub enum PointCloud {
    Points(Vec<Vec<f64>>),
    Distances(Vec<Vec<f64>>),
}

impl PointCloud {
    pub fn from_points(points: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(first) = points.first() {
            if points.iter().any(|p| p.len() != first.len()) {
                return Err(Error::Domain("points have different dimensions".into()));
            }
        }
        if points.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Domain("coordinates must be finite".into()));
        }
        Ok(PointCloud::Points(points))
    }

    pub fn from_distances(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let n = matrix.len();
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Domain(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            if row[i] != 0.0 {
                return Err(Error::Domain(format!("diagonal entry {i} is {}, expected 0", row[i])));
            }
            for (j, &d) in row.iter().enumerate() {
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::Domain(format!("distance ({i}, {j}) = {d} is not a finite nonnegative number")));
                }
                if d != matrix[j][i] {
                    return Err(Error::Domain(format!("distance matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(PointCloud::Distances(matrix))
    }

    pub fn len(&self) -> usize {
        match self {
            PointCloud::Points(p) => p.len(),
            PointCloud::Distances(d) => d.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        match self {
            PointCloud::Points(p) => p[i].iter().zip(&p[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt(),
            PointCloud::Distances(d) => d[i][j],
        }
    }
}

/// Parses `pt` lines or a `dist <n>` block.
pub fn parse_point_cloud(text: &str) -> Result<PointCloud> {
    let lines: Vec<_> = directives(text).collect();
    match lines.first() {
        None => PointCloud::from_points(Vec::new()),
        Some((_, t)) if t[0] == "dist" => parse_dist_block(&lines),
        Some(_) => {
            let mut points = Vec::new();
            for (line, tokens) in &lines {
                if tokens[0] != "pt" {
                    return Err(parse_err(*line, "expected 'pt <x1> ... <xd>'"));
                }
                points.push(parse_reals(*line, &tokens[1..])?);
            }
            PointCloud::from_points(points).map_err(|e| e.at_line(lines[0].0))
        }
    }
}

/// A distance matrix, with or without the `dist <n>` header. Without it the
/// number of rows fixes `n`.
pub fn parse_distance_matrix(text: &str) -> Result<PointCloud> {
    let lines: Vec<_> = directives(text).collect();
    match lines.first() {
        Some((_, t)) if t[0] == "dist" => parse_dist_block(&lines),
        _ => {
            let rows = lines.iter().map(|(line, tokens)| parse_reals(*line, tokens)).collect::<Result<Vec<_>>>()?;
            PointCloud::from_distances(rows)
        }
    }
}

fn parse_dist_block(lines: &[(usize, Vec<&str>)]) -> Result<PointCloud> {
    let (header, tokens) = &lines[0];
    let [_, n] = tokens[..] else {
        return Err(parse_err(*header, "expected 'dist <n>'"));
    };
    let n: usize = parse_token(*header, n, "matrix size")?;
    let mut values = Vec::new();
    for (line, tokens) in &lines[1..] {
        values.extend(parse_reals(*line, tokens)?);
    }
    if values.len() != n * n {
        return Err(parse_err(*header, format!("expected {} matrix entries, found {}", n * n, values.len())));
    }
    let rows = if n == 0 { Vec::new() } else { values.chunks(n).map(<[f64]>::to_vec).collect() };
    PointCloud::from_distances(rows).map_err(|e| e.at_line(*header))
}

fn parse_reals(line: usize, tokens: &[&str]) -> Result<Vec<f64>> {
    tokens.iter().map(|t| parse_token(line, t, "number")).collect()
}

/// Vietoris–Rips filtration, default execution.
pub fn rips(pc: &PointCloud, max_dim: usize, threshold: Option<f64>) -> FilteredSimplicialComplex {
    rips_with(pc, max_dim, threshold, Execution::default())
}

/// Every simplex of dimension at most `max_dim` whose diameter is at most
/// `threshold`, valued by its diameter. Vertices sit at 0. Candidate
/// cofaces of each dimension are generated concurrently.
pub fn rips_with(
    pc: &PointCloud,
    max_dim: usize,
    threshold: Option<f64>,
    exec: Execution,
) -> FilteredSimplicialComplex {
    let n = pc.len();
    let within = |d: f64| threshold.is_none_or(|t| d <= t);
    let mut layer: Vec<(Vec<usize>, f64)> = (0..n).map(|v| (vec![v], 0.0)).collect();
    let mut all = layer.clone();
    for _ in 0..max_dim {
        let next: Vec<Vec<(Vec<usize>, f64)>> = exec.map(&layer, |(simplex, diam)| {
            let last = *simplex.last().expect("nonempty");
            (last + 1..n)
                .filter_map(|v| {
                    let reach = simplex.iter().map(|&u| pc.distance(u, v)).fold(*diam, f64::max);
                    within(reach).then(|| {
                        let mut s = simplex.clone();
                        s.push(v);
                        (s, reach)
                    })
                })
                .collect()
        });
        layer = next.into_iter().flatten().collect();
        if layer.is_empty() {
            break;
        }
        all.extend(layer.iter().cloned());
    }
    FilteredSimplicialComplex::new(all).expect("Rips complexes are closed and monotone")
}
