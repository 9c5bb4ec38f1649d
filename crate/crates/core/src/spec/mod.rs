//! The canonical visualization specification and everything derived from it.
//!
//! A [`VisSpec`] is an immutable value: [`VisSpec::apply`] returns a new spec
//! with the revision bumped. Serialization is canonical (fixed field order,
//! channels in X/Y/Color/Size order, filters in insertion order) so two specs
//! can be compared byte-for-byte.

mod change;
mod filter;
mod render;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::color::ColorPalette;
use crate::data::{Datum, RowId};

pub use change::SpecChange;
pub use filter::{visible_rows, CompiledFilter};
pub use render::{check_renderable, render, Axis, AxisScale, Mark, MarkSource, ViewModel, DEFAULT_SIZE};
pub(crate) use render::{bar_layout, order_bars};
pub use validate::{binding_legality, validate, Violation, ViolationKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VisType {
    Scatterplot,
    BarChart,
    StackedBarChart,
}

impl VisType {
    pub const ALL: [VisType; 3] = [VisType::Scatterplot, VisType::BarChart, VisType::StackedBarChart];

    pub fn is_bar(self) -> bool {
        matches!(self, VisType::BarChart | VisType::StackedBarChart)
    }
}

impl fmt::Display for VisType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VisType::Scatterplot => "Scatterplot",
            VisType::BarChart => "BarChart",
            VisType::StackedBarChart => "StackedBarChart",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Channel {
    X,
    Y,
    Color,
    Size,
}

impl Channel {
    pub const ALL: [Channel; 4] = [Channel::X, Channel::Y, Channel::Color, Channel::Size];
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Channel::X => "X",
            Channel::Y => "Y",
            Channel::Color => "Color",
            Channel::Size => "Size",
        })
    }
}

/// Which paradigm produced a piece of state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Mvs,
    Vbd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelBinding {
    pub channel: Channel,
    pub attribute: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub palette: Option<ColorPalette>,
    pub provenance: Provenance,
}

impl ChannelBinding {
    pub fn new(channel: Channel, attribute: impl Into<String>, provenance: Provenance) -> Self {
        ChannelBinding { channel, attribute: attribute.into(), palette: None, provenance }
    }

    pub fn with_palette(mut self, palette: ColorPalette) -> Self {
        self.palette = Some(palette);
        self
    }

    pub fn is_customized(&self) -> bool {
        self.palette.as_ref().is_some_and(|p| p.custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum FilterForm {
    /// Keeps rows with `lo <= value <= hi`, or drops exactly those when `exclude`.
    Range { attribute: String, lo: f64, hi: f64, exclude: bool },
    /// Keeps rows whose value is one of `values` (category order).
    ValueSet { attribute: String, values: Vec<Datum> },
    /// Drops the listed rows (ascending ids).
    PointSet { rows: Vec<RowId> },
}

impl FilterForm {
    pub fn attribute(&self) -> Option<&str> {
        match self {
            FilterForm::Range { attribute, .. } | FilterForm::ValueSet { attribute, .. } => Some(attribute),
            FilterForm::PointSet { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterRule {
    pub id: String,
    pub form: FilterForm,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortDirection {
    Ascending,
    Descending,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortState {
    pub by_attribute: Option<String>,
    pub direction: SortDirection,
}

impl SortState {
    pub fn none() -> Self {
        SortState { by_attribute: None, direction: SortDirection::None }
    }

    /// Direction `None` always drops the attribute so equal states serialize equally.
    pub fn new(attribute: impl Into<String>, direction: SortDirection) -> Self {
        match direction {
            SortDirection::None => SortState::none(),
            d => SortState { by_attribute: Some(attribute.into()), direction: d },
        }
    }

    pub fn is_active(&self) -> bool {
        self.direction != SortDirection::None && self.by_attribute.is_some()
    }
}

impl Default for SortState {
    fn default() -> Self {
        SortState::none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregate {
    #[default]
    Mean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisSpec {
    pub revision: u64,
    pub vis_type: VisType,
    pub bindings: BTreeMap<Channel, ChannelBinding>,
    pub filters: Vec<FilterRule>,
    pub sort: SortState,
    #[serde(default)]
    pub aggregate: Aggregate,
}

impl Default for VisSpec {
    fn default() -> Self {
        VisSpec {
            revision: 0,
            vis_type: VisType::Scatterplot,
            bindings: BTreeMap::new(),
            filters: Vec::new(),
            sort: SortState::none(),
            aggregate: Aggregate::Mean,
        }
    }
}

impl VisSpec {
    pub fn binding(&self, channel: Channel) -> Option<&ChannelBinding> {
        self.bindings.get(&channel)
    }

    pub fn attribute_on(&self, channel: Channel) -> Option<&str> {
        self.bindings.get(&channel).map(|b| b.attribute.as_str())
    }

    pub fn filter(&self, id: &str) -> Option<&FilterRule> {
        self.filters.iter().find(|f| f.id == id)
    }

    /// Next free filter id: one past the largest numeric `f{n}` suffix.
    pub fn next_filter_id(&self) -> String {
        let max = self
            .filters
            .iter()
            .filter_map(|f| f.id.strip_prefix('f').and_then(|n| n.parse::<u64>().ok()))
            .max()
            .unwrap_or(0);
        format!("f{}", max + 1)
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("VisSpec always serializes")
    }

    /// Copy with revision zeroed.
    pub fn without_revision(&self) -> VisSpec {
        VisSpec { revision: 0, ..self.clone() }
    }

    /// Copy with revision zeroed and every provenance set to `mvs`; the form
    /// used to compare specs reached through different paradigms.
    pub fn content(&self) -> VisSpec {
        let mut s = self.without_revision();
        for b in s.bindings.values_mut() {
            b.provenance = Provenance::Mvs;
        }
        for f in &mut s.filters {
            f.provenance = Provenance::Mvs;
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_field_order() {
        let mut spec = VisSpec::default();
        spec.bindings.insert(Channel::Y, ChannelBinding::new(Channel::Y, "MPG", Provenance::Mvs));
        spec.bindings.insert(Channel::X, ChannelBinding::new(Channel::X, "HP", Provenance::Mvs));
        let json = spec.canonical_json();
        assert!(json.starts_with(r#"{"revision":0,"vis_type":"Scatterplot","bindings":{"X":"#), "{json}");
        let back: VisSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn sort_none_is_normalized() {
        assert_eq!(SortState::new("MPG", SortDirection::None), SortState::none());
    }

    #[test]
    fn filter_ids() {
        let mut spec = VisSpec::default();
        assert_eq!(spec.next_filter_id(), "f1");
        spec.filters.push(FilterRule {
            id: "f4".into(),
            form: FilterForm::PointSet { rows: vec![1] },
            provenance: Provenance::Vbd,
        });
        assert_eq!(spec.next_filter_id(), "f5");
    }
}
