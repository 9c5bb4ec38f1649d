use serde::{Deserialize, Serialize};

use super::validate::{binding_legality, validate, ViolationKind};
use super::{Channel, ChannelBinding, FilterForm, FilterRule, SortState, VisSpec, VisType};
use crate::data::Dataset;
use crate::error::{Error, Result};

/// The unit both paradigms commit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SpecChange {
    SetBinding {
        binding: ChannelBinding,
    },
    RemoveBinding {
        channel: Channel,
    },
    /// Keeps every binding still legal under the new type and drops the rest.
    SetVisType {
        vis_type: VisType,
    },
    AddFilter {
        rule: FilterRule,
        /// Insert position; appends when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        index: Option<usize>,
    },
    UpdateFilter {
        rule: FilterRule,
    },
    RemoveFilter {
        rule_id: String,
    },
    SetSort {
        sort: SortState,
    },
    /// Applied in order; legality is checked once at the end.
    Batch {
        changes: Vec<SpecChange>,
    },
}

impl VisSpec {
    /// Pure application of `change`: a new spec with `revision + 1`.
    pub fn apply(&self, ds: &Dataset, change: &SpecChange) -> Result<VisSpec> {
        let mut next = self.clone();
        next.apply_in_place(ds, change)?;
        let illegal: Vec<String> = validate(&next, ds)
            .into_iter()
            .filter(|v| v.kind == ViolationKind::Illegal)
            .map(|v| v.message)
            .collect();
        if !illegal.is_empty() {
            return Err(Error::IllegalChange(illegal));
        }
        next.revision = self.revision + 1;
        Ok(next)
    }

    /// Like [`VisSpec::apply`] but refuses changes built against another revision.
    pub fn apply_at(&self, ds: &Dataset, change: &SpecChange, base_revision: u64) -> Result<VisSpec> {
        if base_revision != self.revision {
            return Err(Error::StaleRevision { expected: base_revision, actual: self.revision });
        }
        self.apply(ds, change)
    }

    /// Bindings that switching to `target` would drop.
    pub fn dropped_by_switch(&self, ds: &Dataset, target: VisType) -> Vec<ChannelBinding> {
        self.bindings
            .values()
            .filter(|b| match ds.attribute(&b.attribute) {
                Ok(a) => binding_legality(target, b.channel, a).is_err(),
                Err(_) => true,
            })
            .cloned()
            .collect()
    }

    /// The change that undoes `change` when applied to `self.apply(change)`.
    pub fn inverse_of(&self, ds: &Dataset, change: &SpecChange) -> Result<SpecChange> {
        Ok(match change {
            SpecChange::SetBinding { binding } => match self.bindings.get(&binding.channel) {
                Some(prev) => SpecChange::SetBinding { binding: prev.clone() },
                None => SpecChange::RemoveBinding { channel: binding.channel },
            },
            SpecChange::RemoveBinding { channel } => {
                let prev = self.bindings.get(channel).ok_or(Error::ChannelUnbound(*channel))?;
                SpecChange::SetBinding { binding: prev.clone() }
            }
            SpecChange::SetVisType { vis_type } => {
                let dropped = self.dropped_by_switch(ds, *vis_type);
                let restore = SpecChange::SetVisType { vis_type: self.vis_type };
                if dropped.is_empty() {
                    restore
                } else {
                    let mut changes = vec![restore];
                    changes.extend(dropped.into_iter().map(|binding| SpecChange::SetBinding { binding }));
                    SpecChange::Batch { changes }
                }
            }
            SpecChange::AddFilter { rule, .. } => SpecChange::RemoveFilter { rule_id: rule.id.clone() },
            SpecChange::UpdateFilter { rule } => {
                let prev = self.filter(&rule.id).ok_or_else(|| Error::UnknownRule(rule.id.clone()))?;
                SpecChange::UpdateFilter { rule: prev.clone() }
            }
            SpecChange::RemoveFilter { rule_id } => {
                let index = self
                    .filters
                    .iter()
                    .position(|f| &f.id == rule_id)
                    .ok_or_else(|| Error::UnknownRule(rule_id.clone()))?;
                SpecChange::AddFilter { rule: self.filters[index].clone(), index: Some(index) }
            }
            SpecChange::SetSort { .. } => SpecChange::SetSort { sort: self.sort.clone() },
            SpecChange::Batch { changes } => {
                let mut cursor = self.clone();
                let mut inverses = Vec::with_capacity(changes.len());
                for c in changes {
                    inverses.push(cursor.inverse_of(ds, c)?);
                    cursor.apply_in_place(ds, c)?;
                }
                inverses.reverse();
                SpecChange::Batch { changes: inverses }
            }
        })
    }

    fn apply_in_place(&mut self, ds: &Dataset, change: &SpecChange) -> Result<()> {
        match change {
            SpecChange::SetBinding { binding } => {
                ds.resolve(&binding.attribute)?;
                self.bindings.insert(binding.channel, binding.clone());
            }
            SpecChange::RemoveBinding { channel } => {
                self.bindings.remove(channel).ok_or(Error::ChannelUnbound(*channel))?;
            }
            SpecChange::SetVisType { vis_type } => {
                for dropped in self.dropped_by_switch(ds, *vis_type) {
                    self.bindings.remove(&dropped.channel);
                }
                self.vis_type = *vis_type;
            }
            SpecChange::AddFilter { rule, index } => {
                if self.filter(&rule.id).is_some() {
                    return Err(Error::IllegalChange(vec![format!("filter id `{}` already in use", rule.id)]));
                }
                let rule = normalize_rule(rule, ds)?;
                match index {
                    Some(i) if *i <= self.filters.len() => self.filters.insert(*i, rule),
                    _ => self.filters.push(rule),
                }
            }
            SpecChange::UpdateFilter { rule } => {
                let slot = self
                    .filters
                    .iter_mut()
                    .find(|f| f.id == rule.id)
                    .ok_or_else(|| Error::UnknownRule(rule.id.clone()))?;
                *slot = normalize_rule(rule, ds)?;
            }
            SpecChange::RemoveFilter { rule_id } => {
                let index = self
                    .filters
                    .iter()
                    .position(|f| &f.id == rule_id)
                    .ok_or_else(|| Error::UnknownRule(rule_id.clone()))?;
                self.filters.remove(index);
            }
            SpecChange::SetSort { sort } => {
                self.sort = match &sort.by_attribute {
                    Some(a) => SortState::new(a.clone(), sort.direction),
                    None => SortState::none(),
                };
            }
            SpecChange::Batch { changes } => {
                for c in changes {
                    self.apply_in_place(ds, c)?;
                }
            }
        }
        Ok(())
    }
}

/// Value sets in category order, point sets ascending and deduplicated.
fn normalize_rule(rule: &FilterRule, ds: &Dataset) -> Result<FilterRule> {
    let mut rule = rule.clone();
    match &mut rule.form {
        FilterForm::ValueSet { attribute, values } => {
            let attr = ds.attribute(attribute)?;
            values.sort_by_key(|v| attr.category_index(v).unwrap_or(usize::MAX));
        }
        FilterForm::PointSet { rows } => {
            rows.sort_unstable();
            rows.dedup();
        }
        FilterForm::Range { attribute, .. } => {
            ds.resolve(attribute)?;
        }
    }
    Ok(rule)
}
