//! Brute-force reference for the four intent functions on small tables.
//! Works from raw CSV text and re-derives every predicate by scanning rows.

use std::collections::BTreeSet;

use blendvis_core::data::Datum;
use blendvis_core::spec::{FilterForm, SortDirection};

#[derive(Debug, Clone, PartialEq)]
pub enum Key {
    Color(String),
    Size(String),
    Filter(String),
    Sort(String, SortDirection),
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        format!("{self:?}").cmp(&format!("{other:?}"))
    }
}

/// Filter forms compared through their JSON text.
pub fn filter_key(form: &FilterForm) -> Key {
    Key::Filter(serde_json::to_string(form).unwrap())
}

pub struct Column {
    pub name: String,
    pub cells: Vec<String>,
    pub numeric: bool,
    pub discrete: bool,
    pub categories: Vec<String>,
}

impl Column {
    fn num(&self, row: usize) -> f64 {
        self.cells[row].parse().unwrap()
    }

    fn categorical_like(&self) -> bool {
        !self.numeric || self.discrete
    }
}

pub struct Table {
    pub columns: Vec<Column>,
    pub rows: usize,
}

impl Table {
    pub fn parse(csv: &str) -> Table {
        let mut lines = csv.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        let body: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
        let rows = body.len();
        let columns = header
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let cells: Vec<String> = body.iter().map(|r| r[i].trim().to_string()).collect();
                let numeric = cells.iter().all(|c| c.parse::<f64>().is_ok());
                let mut categories: Vec<String> = Vec::new();
                for c in &cells {
                    if !categories.contains(c) {
                        categories.push(c.clone());
                    }
                }
                let integral = numeric && cells.iter().all(|c| c.parse::<f64>().unwrap().fract() == 0.0);
                let discrete = integral && categories.len() <= 12 && categories.len() * 2 <= rows;
                Column { name: name.to_string(), cells, numeric, discrete, categories }
            })
            .collect();
        Table { columns, rows }
    }

    pub fn column(&self, name: &str) -> &Column {
        self.columns.iter().find(|c| c.name == name).unwrap()
    }

    fn datum(&self, col: &Column, value: &str) -> Datum {
        if col.numeric {
            Datum::Num(value.parse().unwrap())
        } else {
            Datum::from(value)
        }
    }
}

/// Color: groups are (color, rows). `None` means the demonstration is invalid.
pub fn color(t: &Table, visible: &[bool], groups: &[Vec<usize>]) -> Option<BTreeSet<Key>> {
    let all: Vec<usize> = groups.iter().flatten().copied().collect();
    if groups.is_empty() || groups.iter().any(|g| g.is_empty()) || !rows_ok(visible, &all) {
        return None;
    }
    let mut out = BTreeSet::new();
    for col in &t.columns {
        let consistent = if col.categorical_like() {
            let mut seen: Vec<&String> = Vec::new();
            groups.iter().all(|g| {
                let first = &col.cells[g[0]];
                let single = g.iter().all(|r| &col.cells[*r] == first);
                let fresh = !seen.contains(&first);
                seen.push(first);
                single && fresh
            })
        } else {
            let spans: Vec<(f64, f64)> = groups
                .iter()
                .map(|g| {
                    let vals: Vec<f64> = g.iter().map(|r| col.num(*r)).collect();
                    (vals.iter().copied().fold(f64::MAX, f64::min), vals.iter().copied().fold(f64::MIN, f64::max))
                })
                .collect();
            (0..spans.len())
                .all(|i| (0..spans.len()).all(|j| i == j || spans[i].1 < spans[j].0 || spans[j].1 < spans[i].0))
        };
        if consistent {
            out.insert(Key::Color(col.name.clone()));
        }
    }
    Some(out)
}

/// Size on a scatterplot: `sized` is (row, size).
pub fn size(t: &Table, visible: &[bool], sized: &[(usize, f64)]) -> Option<BTreeSet<Key>> {
    let rows: Vec<usize> = sized.iter().map(|p| p.0).collect();
    let distinct: BTreeSet<u64> = sized.iter().map(|p| p.1.to_bits()).collect();
    if sized.len() < 2 || distinct.len() < 2 || !rows_ok(visible, &rows) {
        return None;
    }
    let mut out = BTreeSet::new();
    for col in t.columns.iter().filter(|c| c.numeric) {
        let monotone = sized.iter().all(|(p, sp)| {
            sized.iter().all(|(q, sq)| sp >= sq || col.num(*p) < col.num(*q))
        });
        if monotone {
            out.insert(Key::Size(col.name.clone()));
        }
    }
    Some(out)
}

/// Drag-out on a scatterplot with axes `x` and `y`; new rules get `rule_id`.
pub fn drag_out(t: &Table, visible: &[bool], x: &str, y: &str, selection: &[usize]) -> Option<BTreeSet<Key>> {
    if selection.is_empty() || !rows_ok(visible, selection) {
        return None;
    }
    let sel: BTreeSet<usize> = selection.iter().copied().collect();
    let mut out = BTreeSet::new();
    out.insert(filter_key(&FilterForm::PointSet { rows: sel.iter().copied().collect() }));
    for axis in [x, y] {
        let col = t.column(axis);
        let vals: Vec<f64> = sel.iter().map(|r| col.num(*r)).collect();
        let lo = vals.iter().copied().fold(f64::MAX, f64::min);
        let hi = vals.iter().copied().fold(f64::MIN, f64::max);
        out.insert(filter_key(&FilterForm::Range { attribute: axis.to_string(), lo, hi, exclude: true }));
    }
    for col in t.columns.iter().filter(|c| c.categorical_like()) {
        let picked: BTreeSet<&String> = sel.iter().map(|r| &col.cells[*r]).collect();
        let extension: BTreeSet<usize> = (0..t.rows).filter(|r| visible[*r] && picked.contains(&col.cells[*r])).collect();
        if extension == sel {
            let kept = col.categories.iter().filter(|c| !picked.contains(c)).map(|c| t.datum(col, c)).collect();
            out.insert(filter_key(&FilterForm::ValueSet { attribute: col.name.clone(), values: kept }));
        }
    }
    Some(out)
}

/// Bar drag on a bar chart over `x`. `None` when the category has no bar.
pub fn drag_bar(t: &Table, visible: &[bool], x: &str, category: &str, right: bool) -> Option<BTreeSet<Key>> {
    let xc = t.column(x);
    let bars: Vec<&String> =
        xc.categories.iter().filter(|c| (0..t.rows).any(|r| visible[r] && &xc.cells[r] == *c)).collect();
    if !bars.iter().any(|b| *b == category) {
        return None;
    }
    let mut out = BTreeSet::new();
    for col in t.columns.iter().filter(|c| c.numeric && c.name != x) {
        let mean = |cat: &String| {
            let vals: Vec<f64> = (0..t.rows).filter(|r| visible[*r] && &xc.cells[*r] == cat).map(|r| col.num(r)).collect();
            vals.iter().sum::<f64>() / vals.len() as f64
        };
        for dir in [SortDirection::Ascending, SortDirection::Descending] {
            // insertion sort keeps equal means in their original order
            let mut order: Vec<&String> = Vec::new();
            for b in &bars {
                let m = mean(b);
                let pos = order
                    .iter()
                    .position(|o| if dir == SortDirection::Ascending { mean(o) > m } else { mean(o) < m })
                    .unwrap_or(order.len());
                order.insert(pos, b);
            }
            let landed = if right { order.last() } else { order.first() };
            if landed.is_some_and(|b| *b == category) {
                out.insert(Key::Sort(col.name.clone(), dir));
            }
        }
    }
    Some(out)
}

fn rows_ok(visible: &[bool], rows: &[usize]) -> bool {
    let unique: BTreeSet<&usize> = rows.iter().collect();
    unique.len() == rows.len() && rows.iter().all(|r| *r < visible.len() && visible[*r])
}
