use std::collections::{HashMap, HashSet};
use std::io::Read;

use super::{AttrKind, Attribute, Column, Dataset, Datum};
use crate::error::{Error, Result};

/// Share of non-missing cells that must parse as numbers for a quantitative column.
const QUANTITATIVE_SHARE: f64 = 0.95;
/// Upper bound on distinct values for a discrete quantitative column.
const DISCRETE_MAX_DISTINCT: usize = 12;

#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub id: String,
    pub delimiter: u8,
    pub has_header: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions { id: "dataset".to_string(), delimiter: b',', has_header: true }
    }
}

impl CsvOptions {
    pub fn named(id: impl Into<String>) -> Self {
        CsvOptions { id: id.into(), ..Default::default() }
    }
}

fn is_missing(raw: &str) -> bool {
    let t = raw.trim();
    t.is_empty() || t == "NA"
}

fn parse_number(raw: &str) -> Option<f64> {
    raw.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parse delimited text into a typed [`Dataset`].
///
/// A column is quantitative when at least 95% of its non-missing cells parse
/// as finite numbers; the cells that do not parse are flagged missing. A
/// quantitative column is also discrete when it holds at most 12 distinct
/// integer values and no more distinct values than half its known cells.
pub fn load_csv<R: Read>(source: R, options: &CsvOptions) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(options.has_header)
        .flexible(false)
        .from_reader(source);

    let malformed = |e: csv::Error| Error::MalformedCsv(e.to_string());

    let mut names: Vec<String> = Vec::new();
    if options.has_header {
        let header = reader.headers().map_err(malformed)?;
        if header.is_empty() {
            return Err(Error::MalformedCsv("empty input".into()));
        }
        names = header.iter().map(|h| h.trim().to_string()).collect();
    }

    let mut raw: Vec<Vec<String>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(malformed)?;
        if names.is_empty() {
            names = (1..=record.len()).map(|i| format!("column_{i}")).collect();
        }
        if record.len() != names.len() {
            return Err(Error::MalformedCsv(format!(
                "row {} has {} fields, expected {}",
                raw.len() + 1,
                record.len(),
                names.len()
            )));
        }
        raw.push(record.iter().map(str::to_string).collect());
    }
    if names.is_empty() {
        return Err(Error::MalformedCsv("empty input".into()));
    }

    let mut seen = HashSet::new();
    for n in &names {
        if !seen.insert(n.as_str()) {
            return Err(Error::DuplicateAttributeName(n.clone()));
        }
    }

    let row_count = raw.len();
    let mut attributes = Vec::with_capacity(names.len());
    let mut columns = Vec::with_capacity(names.len());
    for (ci, name) in names.into_iter().enumerate() {
        let cells = raw.iter().map(|r| r[ci].as_str());
        let (attr, col) = type_column(name, cells, row_count);
        attributes.push(attr);
        columns.push(col);
    }
    Ok(Dataset::from_parts(options.id.clone(), attributes, columns, row_count))
}

fn type_column<'a>(
    name: String,
    cells: impl Iterator<Item = &'a str> + Clone,
    row_count: usize,
) -> (Attribute, Column) {
    let known = cells.clone().filter(|c| !is_missing(c)).count();
    let parsed = cells.clone().filter(|c| !is_missing(c) && parse_number(c).is_some()).count();
    let quantitative = known > 0 && parsed as f64 >= QUANTITATIVE_SHARE * known as f64;

    if quantitative {
        let numbers: Vec<Option<f64>> =
            cells.map(|c| if is_missing(c) { None } else { parse_number(c) }).collect();
        let mut order: Vec<f64> = Vec::new();
        let mut index: HashMap<u64, u32> = HashMap::new();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut all_integer = true;
        for v in numbers.iter().flatten() {
            lo = lo.min(*v);
            hi = hi.max(*v);
            all_integer &= v.fract() == 0.0;
            let key = if *v == 0.0 { 0f64.to_bits() } else { v.to_bits() };
            index.entry(key).or_insert_with(|| {
                order.push(*v);
                (order.len() - 1) as u32
            });
        }
        let distinct = order.len();
        let discrete = all_integer && distinct <= DISCRETE_MAX_DISTINCT && distinct * 2 <= parsed;
        let codes = if discrete {
            numbers
                .iter()
                .map(|v| v.map(|v| index[&if v == 0.0 { 0f64.to_bits() } else { v.to_bits() }]))
                .collect()
        } else {
            Vec::new()
        };
        let missing = numbers.iter().filter(|v| v.is_none()).count();
        let attr = Attribute {
            name,
            kind: AttrKind::Quantitative,
            discrete,
            distinct_count: distinct,
            missing_count: missing,
            extent: Some([lo, hi]),
            categories: if discrete { order.into_iter().map(Datum::Num).collect() } else { Vec::new() },
        };
        (attr, Column { numbers, codes })
    } else {
        let mut categories: Vec<Datum> = Vec::new();
        let mut index: HashMap<&str, u32> = HashMap::new();
        let codes: Vec<Option<u32>> = cells
            .map(|c| {
                if is_missing(c) {
                    return None;
                }
                Some(*index.entry(c).or_insert_with(|| {
                    categories.push(Datum::Text(c.to_string()));
                    (categories.len() - 1) as u32
                }))
            })
            .collect();
        let attr = Attribute {
            name,
            kind: AttrKind::Categorical,
            discrete: false,
            distinct_count: categories.len(),
            missing_count: row_count - known,
            extent: None,
            categories,
        };
        (attr, Column { numbers: Vec::new(), codes })
    }
}
