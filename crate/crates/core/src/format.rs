//! Serialized forms of barcodes and page tables.
//!
//! Text output is one space-separated record per line, TSV is the same with
//! tabs and a header row, and JSON carries a `"format"` version key. Page
//! tables in text and TSV start with a `# r_max <N>` comment so that a table
//! whose last pages are zero still reads back with its full range. Only
//! nonzero entries are written.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::persistence::{BarEntry, Barcode, Lifetime};
use crate::spectral::{Page, PageTable};

pub const JSON_FORMAT: &str = "spectra-persist/1";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Text,
    Tsv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "tsv" => Ok(OutputFormat::Tsv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Usage(format!("unknown format '{other}' (expected text, tsv or json)"))),
        }
    }
}

/// `m` or `r` on the wire: a number, or the string `"inf"`.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Index {
    Finite(u64),
    Named(String),
}

impl Index {
    fn finite(self, what: &str) -> Result<Option<u64>> {
        match self {
            Index::Finite(v) => Ok(Some(v)),
            Index::Named(s) if s == "inf" => Ok(None),
            Index::Named(s) => Err(Error::Parse { line: 0, message: format!("invalid {what} '{s}'") }),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct BarRecord {
    n: i32,
    s: i64,
    m: Index,
    multiplicity: usize,
}

#[derive(Serialize, Deserialize)]
struct BarcodeDoc {
    format: String,
    bars: Vec<BarRecord>,
}

#[derive(Serialize, Deserialize)]
struct PageRecord {
    r: Index,
    n: i32,
    s: i64,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct PagesDoc {
    format: String,
    r_max: u64,
    entries: Vec<PageRecord>,
}

fn lifetime_index(m: Lifetime) -> Index {
    match m {
        Lifetime::Finite(m) => Index::Finite(m),
        Lifetime::Infinite => Index::Named("inf".into()),
    }
}

fn page_index(p: Page) -> Index {
    match p {
        Page::Finite(r) => Index::Finite(r),
        Page::Infinity => Index::Named("inf".into()),
    }
}

fn join(fields: &[String], fmt: OutputFormat) -> String {
    fields.join(if fmt == OutputFormat::Tsv { "\t" } else { " " })
}

pub fn write_barcode(b: &Barcode, fmt: OutputFormat) -> String {
    if fmt == OutputFormat::Json {
        let bars =
            b.iter().map(|(e, c)| BarRecord { n: e.n, s: e.s, m: lifetime_index(e.m), multiplicity: c }).collect();
        let doc = BarcodeDoc { format: JSON_FORMAT.into(), bars };
        return serde_json::to_string_pretty(&doc).expect("serializable") + "\n";
    }
    let mut out = String::new();
    if fmt == OutputFormat::Tsv {
        out.push_str("n\ts\tm\tmultiplicity\n");
    }
    for (e, c) in b.iter() {
        writeln!(out, "{}", join(&[e.n.to_string(), e.s.to_string(), e.m.to_string(), c.to_string()], fmt)).unwrap();
    }
    out
}

pub fn write_pages(p: &PageTable, fmt: OutputFormat) -> String {
    if fmt == OutputFormat::Json {
        let entries = p.iter().map(|(r, n, s, dim)| PageRecord { r: page_index(r), n, s, dim }).collect();
        let doc = PagesDoc { format: JSON_FORMAT.into(), r_max: p.r_max(), entries };
        return serde_json::to_string_pretty(&doc).expect("serializable") + "\n";
    }
    let mut out = format!("# r_max {}\n", p.r_max());
    if fmt == OutputFormat::Tsv {
        out.push_str("r\tn\ts\tdim\n");
    }
    for (r, n, s, d) in p.iter() {
        writeln!(out, "{}", join(&[r.to_string(), n.to_string(), s.to_string(), d.to_string()], fmt)).unwrap();
    }
    out
}

fn is_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

fn check_version(found: &str) -> Result<()> {
    if found != JSON_FORMAT {
        return Err(Error::Parse {
            line: 0,
            message: format!("unsupported format '{found}', expected '{JSON_FORMAT}'"),
        });
    }
    Ok(())
}

/// Records of a whitespace-separated table, skipping comments and a header
/// row that starts with `header`.
fn records<'a>(text: &'a str, header: &'a str) -> impl Iterator<Item = (usize, Vec<&'a str>)> {
    text.lines().enumerate().filter_map(move |(i, line)| {
        let tokens: Vec<&str> = line.split('#').next().unwrap_or("").split_whitespace().collect();
        (!tokens.is_empty() && tokens[0] != header).then_some((i + 1, tokens))
    })
}

fn field<T: FromStr>(line: usize, token: &str, what: &str) -> Result<T> {
    token.parse().map_err(|_| Error::Parse { line, message: format!("invalid {what} '{token}'") })
}

fn optional(line: usize, token: &str, what: &str) -> Result<Option<u64>> {
    if token == "inf" {
        Ok(None)
    } else {
        field(line, token, what).map(Some)
    }
}

/// Reads any of the three barcode forms.
pub fn parse_barcode(text: &str) -> Result<Barcode> {
    let mut b = Barcode::new();
    let mut push = |line: usize, n: i32, s: i64, m: Option<u64>, c: usize| -> Result<()> {
        let entry = match m {
            None => BarEntry::infinite(n, s),
            Some(m) => BarEntry::finite(n, s, m).map_err(|e| e.at_line(line))?,
        };
        b.add(entry, c);
        Ok(())
    };
    if is_json(text) {
        let doc: BarcodeDoc = serde_json::from_str(text)?;
        check_version(&doc.format)?;
        for r in doc.bars {
            push(0, r.n, r.s, r.m.finite("lifetime")?, r.multiplicity)?;
        }
    } else {
        for (line, t) in records(text, "n") {
            let [n, s, m, c] = t[..] else {
                return Err(Error::Parse { line, message: "expected 'n s m multiplicity'".into() });
            };
            push(
                line,
                field(line, n, "degree")?,
                field(line, s, "level")?,
                optional(line, m, "lifetime")?,
                field(line, c, "multiplicity")?,
            )?;
        }
    }
    Ok(b)
}

/// Reads any of the three page-table forms. Text without a `# r_max`
/// comment takes the largest page mentioned, or 1.
pub fn parse_pages(text: &str) -> Result<PageTable> {
    let mut entries = Vec::new();
    let r_max = if is_json(text) {
        let doc: PagesDoc = serde_json::from_str(text)?;
        check_version(&doc.format)?;
        for e in doc.entries {
            entries.push((0, e.r.finite("page")?, e.n, e.s, e.dim));
        }
        Some(doc.r_max)
    } else {
        let mut declared = None;
        for (i, line) in text.lines().enumerate() {
            let t: Vec<&str> = line.trim_start().trim_start_matches('#').split_whitespace().collect();
            if line.trim_start().starts_with('#') && t.first() == Some(&"r_max") {
                let [_, v] = t[..] else {
                    return Err(Error::Parse { line: i + 1, message: "expected '# r_max <N>'".into() });
                };
                declared = Some(field(i + 1, v, "r_max")?);
            }
        }
        for (line, t) in records(text, "r") {
            let [r, n, s, d] = t[..] else {
                return Err(Error::Parse { line, message: "expected 'r n s dim'".into() });
            };
            entries.push((
                line,
                optional(line, r, "page")?,
                field(line, n, "degree")?,
                field(line, s, "level")?,
                field(line, d, "dimension")?,
            ));
        }
        declared
    };
    let r_max = r_max.unwrap_or_else(|| entries.iter().filter_map(|e| e.1).max().unwrap_or(1));
    let mut table = PageTable::new(r_max).map_err(|e| e.at_line(0))?;
    for (line, r, n, s, d) in entries {
        let page = r.map_or(Page::Infinity, Page::Finite);
        if table.dim(page, n, s) != 0 {
            return Err(Error::Parse { line, message: format!("duplicate entry for page {page} at ({n}, {s})") });
        }
        table.set(page, n, s, d).map_err(|e| e.at_line(line))?;
    }
    Ok(table)
}
