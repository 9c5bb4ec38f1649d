//! Demonstrations and the intent functions that turn them into ranked
//! candidate spec changes.

mod encode;
mod filter;
mod sort;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::color::Rgb;
use crate::data::{Dataset, Datum, RowId};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::spec::{check_renderable, visible_rows, SpecChange, VisSpec};

pub use encode::{infer_color_candidates, infer_size_candidates};
pub use filter::infer_filter_candidates;
pub use sort::infer_sort_candidates;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionOrigin {
    #[default]
    Lasso,
    Click,
    RubberBand,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub row_ids: Vec<RowId>,
    #[serde(default)]
    pub origin: SelectionOrigin,
}

impl Selection {
    pub fn new(row_ids: impl IntoIterator<Item = RowId>) -> Self {
        Selection { row_ids: row_ids.into_iter().collect(), origin: SelectionOrigin::Lasso }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorGroup {
    pub color: Rgb,
    pub selection: Selection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizedPoint {
    pub row: RowId,
    pub size: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BarTarget {
    ExtremeLeft,
    ExtremeRight,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Demonstration {
    Recolor { groups: Vec<ColorGroup> },
    Resize { sized: Vec<SizedPoint> },
    DragOutToFilter { selection: Selection },
    DragBar { category: Datum, target: BarTarget },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateKind {
    Encoding,
    Filter,
    Sort,
}

/// Which generator produced a candidate; the declaration order is the
/// final tie-break when ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Template {
    ColorMapping,
    SizeMapping,
    PointSet,
    XRange,
    YRange,
    ValueSet,
    SortAscending,
    SortDescending,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub type_affinity: f64,
    pub separation: f64,
    pub parsimony: f64,
    /// Rows a filter candidate removes from the current view.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extension: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub kind: CandidateKind,
    pub template: Template,
    pub attribute: Option<String>,
    pub change: SpecChange,
    pub score: f64,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankWeights {
    pub type_affinity: f64,
    pub separation: f64,
    pub parsimony: f64,
}

impl Default for RankWeights {
    fn default() -> Self {
        RankWeights { type_affinity: 0.4, separation: 0.4, parsimony: 0.2 }
    }
}

impl RankWeights {
    /// Weighted mean of the three components, so scores stay in [0,1].
    pub fn score(&self, e: &Evidence) -> f64 {
        let total = self.type_affinity + self.separation + self.parsimony;
        if total <= 0.0 {
            return 0.0;
        }
        (self.type_affinity * e.type_affinity + self.separation * e.separation + self.parsimony * e.parsimony)
            / total
    }
}

/// Everything an intent function reads.
#[derive(Debug, Clone, Copy)]
pub struct IntentContext<'a> {
    pub dataset: &'a Dataset,
    pub spec: &'a VisSpec,
    pub weights: &'a RankWeights,
    pub exec: Execution,
}

impl<'a> IntentContext<'a> {
    pub fn new(dataset: &'a Dataset, spec: &'a VisSpec, weights: &'a RankWeights) -> Self {
        IntentContext { dataset, spec, weights, exec: Execution::default() }
    }

    pub fn with_exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    fn visible(&self) -> Result<Vec<bool>> {
        visible_rows(self.spec, self.dataset, self.exec)
    }

    fn candidate(
        &self,
        kind: CandidateKind,
        template: Template,
        attribute: Option<String>,
        change: SpecChange,
        evidence: Evidence,
    ) -> Candidate {
        Candidate { kind, template, attribute, change, score: self.weights.score(&evidence), evidence }
    }
}

/// Rows must exist, be visible and appear once across the demonstration.
fn check_rows<'r>(
    ds: &Dataset,
    visible: &[bool],
    rows: impl IntoIterator<Item = &'r RowId>,
) -> Result<()> {
    let mut seen = HashSet::new();
    for r in rows {
        if *r >= ds.row_count() {
            return Err(Error::InvalidDemonstration(format!("row {r} does not exist")));
        }
        if !visible[*r] {
            return Err(Error::InvalidDemonstration(format!("row {r} is not visible")));
        }
        if !seen.insert(*r) {
            return Err(Error::InvalidDemonstration(format!("row {r} demonstrated twice")));
        }
    }
    Ok(())
}

/// Score descending, then attribute name (attribute-less first), then template.
pub fn rank(candidates: &mut [Candidate]) {
    candidates.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.attribute.cmp(&b.attribute))
            .then_with(|| a.template.cmp(&b.template))
    });
}

/// Dispatch `demo` to its intent function; the result is ranked.
/// Demonstrations act on rendered marks, so the spec must render.
pub fn infer(ctx: &IntentContext, demo: &Demonstration) -> Result<Vec<Candidate>> {
    check_renderable(ctx.spec, ctx.dataset)?;
    match demo {
        Demonstration::Recolor { groups } => infer_color_candidates(ctx, groups),
        Demonstration::Resize { sized } => infer_size_candidates(ctx, sized),
        Demonstration::DragOutToFilter { selection } => infer_filter_candidates(ctx, selection),
        Demonstration::DragBar { category, target } => infer_sort_candidates(ctx, category, *target),
    }
}
