use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{Channel, ChannelBinding, FilterForm, VisSpec, VisType};
use crate::data::{AttrKind, Attribute, Dataset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// State that may never exist; changes producing it are rejected.
    Illegal,
    /// A required channel is still unbound; the spec cannot render yet.
    Incomplete,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
}

impl Violation {
    fn illegal(message: impl Into<String>) -> Self {
        Violation { kind: ViolationKind::Illegal, message: message.into() }
    }
}

fn describe(a: &Attribute) -> &'static str {
    match (a.kind, a.discrete) {
        (AttrKind::Categorical, _) => "categorical",
        (AttrKind::Quantitative, true) => "discrete quantitative",
        (AttrKind::Quantitative, false) => "continuous quantitative",
    }
}

/// Whether `attr` may sit on `channel` under `vis_type`.
pub fn binding_legality(vis_type: VisType, channel: Channel, attr: &Attribute) -> Result<(), String> {
    let quantitative = attr.is_quantitative();
    let categorical = attr.is_categorical_like();
    let (ok, needs) = match (vis_type, channel) {
        (VisType::Scatterplot, Channel::X | Channel::Y | Channel::Size) => (quantitative, "a quantitative"),
        (_, Channel::Size) => return Err(format!("Size invalid for {vis_type}")),
        (VisType::Scatterplot | VisType::BarChart, Channel::Color) => (true, "any"),
        (VisType::StackedBarChart, Channel::Color) => (categorical, "a categorical or discrete"),
        (_, Channel::X) => (categorical, "a categorical or discrete"),
        (_, Channel::Y) => (quantitative, "a quantitative"),
    };
    if ok {
        Ok(())
    } else {
        Err(format!(
            "{channel} on {vis_type} requires {needs} attribute, `{}` is {}",
            attr.name,
            describe(attr)
        ))
    }
}

fn check_binding(vis_type: VisType, binding: &ChannelBinding, ds: &Dataset, out: &mut Vec<Violation>) {
    let Ok(attr) = ds.attribute(&binding.attribute) else {
        out.push(Violation::illegal(format!("unknown attribute `{}` on {}", binding.attribute, binding.channel)));
        return;
    };
    if let Err(msg) = binding_legality(vis_type, binding.channel, attr) {
        out.push(Violation::illegal(msg));
    }
    if let Some(p) = &binding.palette {
        if binding.channel != Channel::Color {
            out.push(Violation::illegal(format!("palette attached to {}", binding.channel)));
        }
        if !p.is_disjoint() {
            out.push(Violation::illegal(format!("palette for `{}` has overlapping assignments", attr.name)));
        }
    }
}

/// Every legality violation of `spec` against `ds`; empty means ok.
pub fn validate(spec: &VisSpec, ds: &Dataset) -> Vec<Violation> {
    let mut out = Vec::new();
    for (channel, binding) in &spec.bindings {
        if *channel != binding.channel {
            out.push(Violation::illegal(format!("binding for {} stored under {channel}", binding.channel)));
        }
        check_binding(spec.vis_type, binding, ds, &mut out);
    }
    if spec.vis_type == VisType::StackedBarChart && !spec.bindings.contains_key(&Channel::Color) {
        out.push(Violation {
            kind: ViolationKind::Incomplete,
            message: "StackedBarChart requires Color".into(),
        });
    }

    let mut ids = HashSet::new();
    for rule in &spec.filters {
        if !ids.insert(rule.id.as_str()) {
            out.push(Violation::illegal(format!("duplicate filter id `{}`", rule.id)));
        }
        match &rule.form {
            FilterForm::Range { attribute, lo, hi, .. } => match ds.attribute(attribute) {
                Err(_) => out.push(Violation::illegal(format!("unknown filter attribute `{attribute}`"))),
                Ok(a) if !a.is_quantitative() => {
                    out.push(Violation::illegal(format!("range filter on non-quantitative `{attribute}`")))
                }
                Ok(_) if !(lo.is_finite() && hi.is_finite() && lo <= hi) => {
                    out.push(Violation::illegal(format!("range filter on `{attribute}` needs lo <= hi")))
                }
                Ok(_) => {}
            },
            FilterForm::ValueSet { attribute, values } => match ds.attribute(attribute) {
                Err(_) => out.push(Violation::illegal(format!("unknown filter attribute `{attribute}`"))),
                Ok(a) if !a.is_categorical_like() => {
                    out.push(Violation::illegal(format!("value filter on continuous `{attribute}`")))
                }
                Ok(a) => {
                    let mut seen = HashSet::new();
                    for v in values {
                        if a.category_index(v).is_none() {
                            out.push(Violation::illegal(format!("`{v}` is not a value of `{attribute}`")));
                        }
                        if !seen.insert(v) {
                            out.push(Violation::illegal(format!("`{v}` listed twice for `{attribute}`")));
                        }
                    }
                }
            },
            FilterForm::PointSet { rows } => {
                if let Some(r) = rows.iter().find(|r| **r >= ds.row_count()) {
                    out.push(Violation::illegal(format!("row {r} does not exist")));
                }
                if rows.windows(2).any(|w| w[0] >= w[1]) {
                    out.push(Violation::illegal("point filter rows must be strictly ascending"));
                }
            }
        }
    }

    if let Some(attr) = &spec.sort.by_attribute {
        match ds.attribute(attr) {
            Err(_) => out.push(Violation::illegal(format!("unknown sort attribute `{attr}`"))),
            Ok(a) if !a.is_quantitative() => {
                out.push(Violation::illegal(format!("sort attribute `{attr}` is not quantitative")))
            }
            Ok(_) => {}
        }
    }
    out
}
