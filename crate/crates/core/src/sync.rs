//! State shared between the two paradigms: filter widgets derived from the
//! spec's rules, encoding shelves, palette memory and the command log.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::color::ColorPalette;
use crate::data::{Dataset, Datum, RowId};
use crate::error::{Error, Result};
use crate::spec::{Channel, CompiledFilter, FilterForm, FilterRule, Provenance, SpecChange, VisSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Widget {
    /// `exclude` flips the slider from keeping to removing the selected span.
    RangeSlider { domain: [f64; 2], selected: [f64; 2], exclude: bool },
    CheckboxSet { values: Vec<Datum>, checked: Vec<bool> },
    /// Read-only chip for a point filter.
    PointChip { rows: Vec<RowId> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterWidgetModel {
    pub rule_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attribute: Option<String>,
    pub provenance: Provenance,
    pub editable: bool,
    pub widget: Widget,
    /// Rows passing this rule on its own.
    pub visible_count: usize,
    /// Rows failing this rule on its own.
    pub excluded_count: usize,
}

/// A widget's new selection, as sent by the filter panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WidgetSelection {
    Range {
        lo: f64,
        hi: f64,
        /// Keeps the rule's current mode when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exclude: Option<bool>,
    },
    Values {
        checked: Vec<Datum>,
    },
}

/// The widget for one rule. Pure: depends only on the rule and the dataset.
pub fn widget_for(rule: &FilterRule, ds: &Dataset) -> Result<FilterWidgetModel> {
    let compiled = CompiledFilter::compile(&rule.form, ds)?;
    let visible_count = (0..ds.row_count()).filter(|r| compiled.passes(ds, *r)).count();
    let widget = match &rule.form {
        FilterForm::Range { attribute, lo, hi, exclude } => {
            let a = ds.attribute(attribute)?;
            let domain = a.extent.unwrap_or([*lo, *hi]);
            Widget::RangeSlider { domain, selected: [*lo, *hi], exclude: *exclude }
        }
        FilterForm::ValueSet { attribute, values } => {
            let a = ds.attribute(attribute)?;
            Widget::CheckboxSet {
                values: a.categories.clone(),
                checked: a.categories.iter().map(|c| values.contains(c)).collect(),
            }
        }
        FilterForm::PointSet { rows } => Widget::PointChip { rows: rows.clone() },
    };
    Ok(FilterWidgetModel {
        rule_id: rule.id.clone(),
        attribute: rule.form.attribute().map(String::from),
        provenance: rule.provenance,
        editable: !matches!(rule.form, FilterForm::PointSet { .. }),
        widget,
        visible_count,
        excluded_count: ds.row_count() - visible_count,
    })
}

/// The filter panel: one widget per rule, in rule order.
pub fn filter_widgets(spec: &VisSpec, ds: &Dataset) -> Result<Vec<FilterWidgetModel>> {
    spec.filters.iter().map(|r| widget_for(r, ds)).collect()
}

/// The rule that results from moving a widget to `selection`.
pub fn apply_selection(rule: &FilterRule, selection: &WidgetSelection, ds: &Dataset) -> Result<FilterRule> {
    let form = match (&rule.form, selection) {
        (FilterForm::Range { attribute, exclude, .. }, WidgetSelection::Range { lo, hi, exclude: new_exclude }) => {
            let a = ds.attribute(attribute)?;
            let [dlo, dhi] = a.extent.unwrap_or([*lo, *hi]);
            if !(lo <= hi && *lo >= dlo && *hi <= dhi) {
                return Err(Error::OutOfDomain(format!(
                    "[{}, {}] not within [{}, {}]",
                    crate::data::fmt_num(*lo),
                    crate::data::fmt_num(*hi),
                    crate::data::fmt_num(dlo),
                    crate::data::fmt_num(dhi)
                )));
            }
            FilterForm::Range { attribute: attribute.clone(), lo: *lo, hi: *hi, exclude: new_exclude.unwrap_or(*exclude) }
        }
        (FilterForm::ValueSet { attribute, .. }, WidgetSelection::Values { checked }) => {
            let a = ds.attribute(attribute)?;
            if let Some(v) = checked.iter().find(|v| a.category_index(v).is_none()) {
                return Err(Error::OutOfDomain(format!("`{v}` is not a value of `{attribute}`")));
            }
            let values = a.categories.iter().filter(|c| checked.contains(c)).cloned().collect();
            FilterForm::ValueSet { attribute: attribute.clone(), values }
        }
        (FilterForm::PointSet { .. }, _) => {
            return Err(Error::IllegalChange(vec![format!("point filter `{}` is not editable", rule.id)]))
        }
        _ => return Err(Error::OutOfDomain(format!("selection does not fit the widget of `{}`", rule.id))),
    };
    Ok(FilterRule { id: rule.id.clone(), form, provenance: rule.provenance })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shelf {
    pub channel: Channel,
    pub attribute: String,
    /// Attribute name, suffixed with "(customized)" for a demonstrated palette.
    pub label: String,
    pub provenance: Provenance,
}

pub fn encoding_shelves(spec: &VisSpec) -> Vec<Shelf> {
    spec.bindings
        .values()
        .map(|b| Shelf {
            channel: b.channel,
            attribute: b.attribute.clone(),
            label: if b.is_customized() { format!("{} (customized)", b.attribute) } else { b.attribute.clone() },
            provenance: b.provenance,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CorollaryUpdate {
    FilterWidget { widget: FilterWidgetModel },
    EncodingShelf { shelf: Shelf },
}

/// MVS-side state to display for a demonstrated change committed into
/// `spec`. Changes made through MVS need no corollary and yield nothing.
pub fn corollary_state(change: &SpecChange, spec: &VisSpec, ds: &Dataset) -> Vec<CorollaryUpdate> {
    let mut out = Vec::new();
    collect_corollary(change, spec, ds, &mut out);
    out
}

fn collect_corollary(change: &SpecChange, spec: &VisSpec, ds: &Dataset, out: &mut Vec<CorollaryUpdate>) {
    match change {
        SpecChange::AddFilter { rule, .. } | SpecChange::UpdateFilter { rule } if rule.provenance == Provenance::Vbd => {
            if let Some(rule) = spec.filter(&rule.id) {
                if let Ok(widget) = widget_for(rule, ds) {
                    out.push(CorollaryUpdate::FilterWidget { widget });
                }
            }
        }
        SpecChange::SetBinding { binding } if binding.provenance == Provenance::Vbd => {
            if let Some(shelf) = encoding_shelves(spec).into_iter().find(|s| s.channel == binding.channel) {
                out.push(CorollaryUpdate::EncodingShelf { shelf });
            }
        }
        SpecChange::Batch { changes } => {
            for c in changes {
                collect_corollary(c, spec, ds, out);
            }
        }
        _ => {}
    }
}

/// Last user-customized palette per attribute.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PaletteMemory(BTreeMap<String, ColorPalette>);

impl PaletteMemory {
    /// Stores `palette` when it carries demonstrated assignments; returns
    /// whether it was stored.
    pub fn remember(&mut self, attribute: &str, palette: &ColorPalette) -> bool {
        if !palette.custom {
            return false;
        }
        self.0.insert(attribute.to_string(), palette.clone());
        true
    }

    pub fn recall(&self, attribute: &str) -> Option<&ColorPalette> {
        self.0.get(attribute)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    /// Revision the change produced when first committed.
    pub revision: u64,
    pub change: SpecChange,
    pub paradigm: Provenance,
    pub inverse: SpecChange,
}

/// Committed changes with an undo cursor: entries before the cursor are in
/// effect, entries after it can be redone.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CommandLog {
    entries: Vec<LogEntry>,
    cursor: usize,
}

impl CommandLog {
    pub fn entries(&self) -> &[LogEntry] {
        &self.entries
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    /// Appends after the cursor, discarding any redo tail.
    pub fn record(&mut self, entry: LogEntry) {
        self.entries.truncate(self.cursor);
        self.entries.push(entry);
        self.cursor += 1;
    }

    /// The inverse to apply for an undo; moves the cursor back.
    pub fn undo(&mut self) -> Result<&LogEntry> {
        if self.cursor == 0 {
            return Err(Error::NothingToUndo);
        }
        self.cursor -= 1;
        Ok(&self.entries[self.cursor])
    }

    /// The change to re-apply for a redo; moves the cursor forward.
    pub fn redo(&mut self) -> Result<&LogEntry> {
        if self.cursor == self.entries.len() {
            return Err(Error::NothingToRedo);
        }
        self.cursor += 1;
        Ok(&self.entries[self.cursor - 1])
    }

    /// Validates the cursor after deserialization.
    pub fn is_consistent(&self) -> bool {
        self.cursor <= self.entries.len()
    }

    /// `initial` with the first `cursor` entries applied.
    pub fn replay(&self, initial: &VisSpec, ds: &Dataset) -> Result<VisSpec> {
        self.entries[..self.cursor].iter().try_fold(initial.clone(), |spec, e| spec.apply(ds, &e.change))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{load_csv, CsvOptions};
    use crate::spec::ChannelBinding;

    fn mini8() -> Dataset {
        load_csv(include_str!("../../../data/mini8.csv").as_bytes(), &CsvOptions::named("mini8")).unwrap()
    }

    fn rule(form: FilterForm, provenance: Provenance) -> FilterRule {
        FilterRule { id: "f1".into(), form, provenance }
    }

    #[test]
    fn checkbox_widget_for_value_set() {
        let ds = mini8();
        let r = rule(
            FilterForm::ValueSet { attribute: "Cylinders".into(), values: vec![Datum::Num(6.0), Datum::Num(8.0)] },
            Provenance::Vbd,
        );
        let w = widget_for(&r, &ds).unwrap();
        assert_eq!(
            w.widget,
            Widget::CheckboxSet {
                values: vec![Datum::Num(4.0), Datum::Num(6.0), Datum::Num(8.0)],
                checked: vec![false, true, true]
            }
        );
        assert_eq!((w.visible_count, w.excluded_count), (5, 3));
    }

    #[test]
    fn slider_selection_bounds() {
        let ds = mini8();
        let r = rule(
            FilterForm::Range { attribute: "Horsepower".into(), lo: 65.0, hi: 160.0, exclude: false },
            Provenance::Mvs,
        );
        let w = widget_for(&r, &ds).unwrap();
        assert_eq!(w.excluded_count, 0);
        let moved = apply_selection(&r, &WidgetSelection::Range { lo: 100.0, hi: 160.0, exclude: None }, &ds).unwrap();
        assert_eq!(widget_for(&moved, &ds).unwrap().visible_count, 5);
        let err = apply_selection(&r, &WidgetSelection::Range { lo: 10.0, hi: 160.0, exclude: None }, &ds);
        assert!(matches!(err, Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn point_chip_is_read_only() {
        let ds = mini8();
        let r = rule(FilterForm::PointSet { rows: vec![1, 2] }, Provenance::Vbd);
        let w = widget_for(&r, &ds).unwrap();
        assert!(!w.editable);
        assert_eq!(w.excluded_count, 2);
        assert!(apply_selection(&r, &WidgetSelection::Values { checked: vec![] }, &ds).is_err());
    }

    #[test]
    fn corollary_only_for_demonstrated_changes() {
        let ds = mini8();
        let r = rule(
            FilterForm::Range { attribute: "Horsepower".into(), lo: 65.0, hi: 80.0, exclude: true },
            Provenance::Vbd,
        );
        let change = SpecChange::AddFilter { rule: r.clone(), index: None };
        let spec = VisSpec::default().apply(&ds, &change).unwrap();
        let updates = corollary_state(&change, &spec, &ds);
        assert!(matches!(&updates[..], [CorollaryUpdate::FilterWidget { widget }]
            if matches!(widget.widget, Widget::RangeSlider { .. })));

        let mvs = SpecChange::AddFilter { rule: FilterRule { provenance: Provenance::Mvs, ..r }, index: None };
        let spec = VisSpec::default().apply(&ds, &mvs).unwrap();
        assert!(corollary_state(&mvs, &spec, &ds).is_empty());
    }

    #[test]
    fn palette_memory_last_write_wins() {
        let cats = [Datum::Num(4.0), Datum::Num(6.0)];
        let a = ColorPalette::custom_categorical(&cats, &[(Datum::Num(4.0), "#ff0000".parse().unwrap())]);
        let b = ColorPalette::custom_categorical(&cats, &[(Datum::Num(4.0), "#00ff00".parse().unwrap())]);
        let mut mem = PaletteMemory::default();
        assert!(mem.recall("Cylinders").is_none());
        assert!(!mem.remember("Cylinders", &ColorPalette::default_categorical(&cats)));
        assert!(mem.remember("Cylinders", &a));
        assert!(mem.remember("Cylinders", &b));
        assert_eq!(mem.recall("Cylinders"), Some(&b));
    }

    #[test]
    fn log_truncates_redo_tail() {
        let ds = mini8();
        let mut log = CommandLog::default();
        let mut spec = VisSpec::default();
        for attr in ["Horsepower", "MPG", "Displacement"] {
            let change = SpecChange::SetBinding { binding: ChannelBinding::new(Channel::X, attr, Provenance::Mvs) };
            let inverse = spec.inverse_of(&ds, &change).unwrap();
            spec = spec.apply(&ds, &change).unwrap();
            log.record(LogEntry { revision: spec.revision, change, paradigm: Provenance::Mvs, inverse });
        }
        log.undo().unwrap();
        log.undo().unwrap();
        assert_eq!(log.replay(&VisSpec::default(), &ds).unwrap().attribute_on(Channel::X), Some("Horsepower"));
        let change = SpecChange::SetBinding { binding: ChannelBinding::new(Channel::Y, "MPG", Provenance::Mvs) };
        log.record(LogEntry { revision: 9, change: change.clone(), paradigm: Provenance::Mvs, inverse: change });
        assert_eq!(log.entries().len(), 2);
        assert_eq!(log.redo().unwrap_err(), Error::NothingToRedo);
    }
}
