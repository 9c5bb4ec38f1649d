//! Typed tabular datasets.
//!
//! Datasets are stored column-wise. Categorical and discrete attributes keep
//! a dense code per cell (index into `Attribute::categories`) so grouping and
//! consistency checks never compare strings.

mod datum;
mod load;
pub mod synth;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use datum::{fmt_num, Datum};
pub use load::{load_csv, CsvOptions};

pub type RowId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttrKind {
    Quantitative,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub kind: AttrKind,
    /// Quantitative with few distinct integer values; usable as a category.
    pub discrete: bool,
    pub distinct_count: usize,
    pub missing_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extent: Option<[f64; 2]>,
    /// First-appearance order. Empty for continuous quantitative attributes.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub categories: Vec<Datum>,
}

impl Attribute {
    pub fn is_quantitative(&self) -> bool {
        self.kind == AttrKind::Quantitative
    }

    /// Categorical or discrete: has a category list and per-cell codes.
    pub fn is_categorical_like(&self) -> bool {
        self.kind == AttrKind::Categorical || self.discrete
    }

    pub fn category_index(&self, value: &Datum) -> Option<usize> {
        self.categories.iter().position(|c| c == value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Column {
    /// Parsed numbers; empty for categorical attributes.
    pub numbers: Vec<Option<f64>>,
    /// Category codes; empty for continuous quantitative attributes.
    pub codes: Vec<Option<u32>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    id: String,
    attributes: Vec<Attribute>,
    columns: Vec<Column>,
    row_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub id: RowId,
    pub cells: BTreeMap<String, Option<Datum>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeStats {
    pub attribute: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extent: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub categories: Option<Vec<Datum>>,
    pub distinct_count: usize,
    pub missing_count: usize,
}

impl Dataset {
    pub(crate) fn from_parts(
        id: String,
        attributes: Vec<Attribute>,
        columns: Vec<Column>,
        row_count: usize,
    ) -> Self {
        Dataset { id, attributes, columns, row_count }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn attribute(&self, name: &str) -> Result<&Attribute> {
        self.attribute_index(name)
            .map(|i| &self.attributes[i])
            .ok_or_else(|| Error::UnknownAttribute(name.to_string()))
    }

    pub(crate) fn resolve(&self, name: &str) -> Result<usize> {
        self.attribute_index(name).ok_or_else(|| Error::UnknownAttribute(name.to_string()))
    }

    /// Numeric value of a quantitative attribute.
    #[inline]
    pub fn number(&self, attr: usize, row: RowId) -> Option<f64> {
        self.columns[attr].numbers.get(row).copied().flatten()
    }

    /// Category code of a categorical or discrete attribute.
    #[inline]
    pub fn code(&self, attr: usize, row: RowId) -> Option<u32> {
        self.columns[attr].codes.get(row).copied().flatten()
    }

    pub fn datum(&self, attr: usize, row: RowId) -> Option<Datum> {
        let a = &self.attributes[attr];
        if a.is_categorical_like() {
            self.code(attr, row).map(|c| a.categories[c as usize].clone())
        } else {
            self.number(attr, row).map(Datum::Num)
        }
    }

    pub fn is_missing(&self, attr: usize, row: RowId) -> bool {
        let col = &self.columns[attr];
        if !col.codes.is_empty() {
            col.codes[row].is_none()
        } else {
            col.numbers[row].is_none()
        }
    }

    pub fn row(&self, id: RowId) -> Option<Row> {
        (id < self.row_count).then(|| Row {
            id,
            cells: self
                .attributes
                .iter()
                .enumerate()
                .map(|(i, a)| (a.name.clone(), self.datum(i, id)))
                .collect(),
        })
    }

    pub fn attribute_stats(&self, name: &str) -> Result<AttributeStats> {
        let a = self.attribute(name)?;
        Ok(AttributeStats {
            attribute: a.name.clone(),
            extent: a.extent,
            categories: a.is_categorical_like().then(|| a.categories.clone()),
            distinct_count: a.distinct_count,
            missing_count: a.missing_count,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const MINI8: &str = include_str!("../../../../data/mini8.csv");

    fn mini8() -> Dataset {
        load_csv(MINI8.as_bytes(), &CsvOptions::named("mini8")).unwrap()
    }

    #[test]
    fn mini8_typing() {
        let ds = mini8();
        assert_eq!(ds.row_count(), 8);
        let cyl = ds.attribute("Cylinders").unwrap();
        assert_eq!(cyl.kind, AttrKind::Quantitative);
        assert!(cyl.discrete);
        assert_eq!(cyl.distinct_count, 3);
        assert_eq!(cyl.categories, vec![Datum::Num(4.0), Datum::Num(6.0), Datum::Num(8.0)]);
        let origin = ds.attribute("Origin").unwrap();
        assert_eq!(origin.kind, AttrKind::Categorical);
        assert_eq!(origin.categories, vec![Datum::from("J"), Datum::from("E"), Datum::from("U")]);
        for name in ["MPG", "Horsepower", "Displacement"] {
            let a = ds.attribute(name).unwrap();
            assert_eq!(a.kind, AttrKind::Quantitative);
            assert!(!a.discrete, "{name} should be continuous");
        }
    }

    #[test]
    fn horsepower_extent() {
        let ds = mini8();
        let s = ds.attribute_stats("Horsepower").unwrap();
        assert_eq!(s.extent, Some([65.0, 160.0]));
        assert_eq!(s.distinct_count, 8);
        assert_eq!(s.missing_count, 0);
        assert!(s.categories.is_none());
    }

    #[test]
    fn constant_column() {
        let ds = load_csv("a,b\n3,x\n3,y\n3,z\n".as_bytes(), &CsvOptions::default()).unwrap();
        let s = ds.attribute_stats("a").unwrap();
        assert_eq!(s.extent, Some([3.0, 3.0]));
        assert_eq!(s.distinct_count, 1);
    }

    #[test]
    fn unknown_attribute() {
        assert_eq!(
            mini8().attribute_stats("Weight"),
            Err(Error::UnknownAttribute("Weight".into()))
        );
    }

    #[test]
    fn row_view() {
        let ds = mini8();
        let r = ds.row(2).unwrap();
        assert_eq!(r.cells["Origin"], Some(Datum::from("E")));
        assert_eq!(r.cells["Horsepower"], Some(Datum::Num(80.0)));
        assert!(ds.row(8).is_none());
    }
}
