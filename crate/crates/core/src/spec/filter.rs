use super::{FilterForm, VisSpec};
use crate::data::{Dataset, RowId};
use crate::error::Result;
use crate::exec::Execution;

/// A filter rule resolved against a dataset for fast per-row evaluation.
/// Rows with a missing value on the filtered attribute always pass.
#[derive(Debug, Clone)]
pub enum CompiledFilter {
    Range { attr: usize, lo: f64, hi: f64, exclude: bool },
    ValueSet { attr: usize, allowed: Vec<bool> },
    PointSet { rows: Vec<RowId> },
}

impl CompiledFilter {
    pub fn compile(form: &FilterForm, ds: &Dataset) -> Result<Self> {
        Ok(match form {
            FilterForm::Range { attribute, lo, hi, exclude } => {
                CompiledFilter::Range { attr: ds.resolve(attribute)?, lo: *lo, hi: *hi, exclude: *exclude }
            }
            FilterForm::ValueSet { attribute, values } => {
                let attr = ds.resolve(attribute)?;
                let cats = &ds.attributes()[attr].categories;
                let allowed = cats.iter().map(|c| values.contains(c)).collect();
                CompiledFilter::ValueSet { attr, allowed }
            }
            FilterForm::PointSet { rows } => {
                let mut rows = rows.clone();
                rows.sort_unstable();
                CompiledFilter::PointSet { rows }
            }
        })
    }

    #[inline]
    pub fn passes(&self, ds: &Dataset, row: RowId) -> bool {
        match self {
            CompiledFilter::Range { attr, lo, hi, exclude } => match ds.number(*attr, row) {
                None => true,
                Some(v) => (v >= *lo && v <= *hi) != *exclude,
            },
            CompiledFilter::ValueSet { attr, allowed } => match ds.code(*attr, row) {
                None => true,
                Some(c) => allowed[c as usize],
            },
            CompiledFilter::PointSet { rows } => rows.binary_search(&row).is_err(),
        }
    }
}

/// Row visibility mask: a row is visible iff it passes every filter.
pub fn visible_rows(spec: &VisSpec, ds: &Dataset, exec: Execution) -> Result<Vec<bool>> {
    let compiled = spec
        .filters
        .iter()
        .map(|f| CompiledFilter::compile(&f.form, ds))
        .collect::<Result<Vec<_>>>()?;
    Ok(exec.map_range(ds.row_count(), |row| compiled.iter().all(|f| f.passes(ds, row))))
}
