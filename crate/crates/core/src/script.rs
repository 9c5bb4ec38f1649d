//! Replay scripts: ordered commands with optional expectations, run against a
//! session. The same [`Command`] vocabulary is used by the HTTP ops.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::Datum;
use crate::error::{Error, Result};
use crate::intent::{Demonstration, Template};
use crate::recommend::{Division, Presentation};
use crate::session::Session;
use crate::spec::{Channel, SortDirection, SortState, ViewModel, VisType};
use crate::sync::{FilterWidgetModel, Widget, WidgetSelection};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Command {
    SetAxis {
        channel: Channel,
        attribute: String,
    },
    SetMark {
        channel: Channel,
        attribute: String,
    },
    Switch {
        vis_type: VisType,
    },
    /// Adds (or focuses) the filter widget for an attribute.
    Filter {
        attribute: String,
    },
    /// Targets the rule by id, or the widget filtering on `attribute`.
    UpdateFilter {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rule_id: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        attribute: Option<String>,
        selection: WidgetSelection,
    },
    RemoveFilter {
        rule_id: String,
    },
    Sort {
        direction: SortDirection,
    },
    Remove {
        channel: Channel,
    },
    Demonstrate {
        demonstration: Demonstration,
    },
    /// Rank counts from 1 over the full ranked list.
    Accept {
        rank: usize,
    },
    Reject {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rank: Option<usize>,
    },
    Preview {
        rank: usize,
    },
    Undo,
    Redo,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SetAxis { .. } => "set_axis",
            Command::SetMark { .. } => "set_mark",
            Command::Switch { .. } => "switch",
            Command::Filter { .. } => "filter",
            Command::UpdateFilter { .. } => "update_filter",
            Command::RemoveFilter { .. } => "remove_filter",
            Command::Sort { .. } => "sort",
            Command::Remove { .. } => "remove",
            Command::Demonstrate { .. } => "demonstrate",
            Command::Accept { .. } => "accept",
            Command::Reject { .. } => "reject",
            Command::Preview { .. } => "preview",
            Command::Undo => "undo",
            Command::Redo => "redo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidgetKind {
    RangeSlider,
    CheckboxSet,
    PointChip,
}

impl WidgetKind {
    fn of(w: &Widget) -> Self {
        match w {
            Widget::RangeSlider { .. } => WidgetKind::RangeSlider,
            Widget::CheckboxSet { .. } => WidgetKind::CheckboxSet,
            Widget::PointChip { .. } => WidgetKind::PointChip,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WidgetExpect {
    pub attribute: String,
    #[serde(default)]
    pub kind: Option<WidgetKind>,
    /// Number of checkbox values.
    #[serde(default)]
    pub values: Option<usize>,
}

/// Assertions checked after a step. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    #[serde(default)]
    pub error: Option<String>,
    #[serde(default)]
    pub revision: Option<u64>,
    #[serde(default)]
    pub vis_type: Option<VisType>,
    #[serde(default)]
    pub bindings: Option<BTreeMap<Channel, String>>,
    #[serde(default)]
    pub sort: Option<SortState>,
    #[serde(default)]
    pub filter_count: Option<usize>,
    #[serde(default)]
    pub widget: Option<WidgetExpect>,
    #[serde(default)]
    pub visible_rows: Option<usize>,
    #[serde(default)]
    pub bar_order_first: Option<Datum>,
    #[serde(default)]
    pub bar_order_last: Option<Datum>,
    #[serde(default)]
    pub division: Option<Division>,
    #[serde(default)]
    pub recommendation_count: Option<usize>,
    /// Attributes that must appear among the presented recommendations.
    #[serde(default)]
    pub presented_attributes: Option<Vec<String>>,
    /// Templates that must appear among the presented recommendations.
    #[serde(default)]
    pub presented_templates: Option<Vec<Template>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    #[serde(flatten)]
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expect>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Script {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// CSV file name, resolved against the data directory by callers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset: Option<String>,
    #[serde(default)]
    pub steps: Vec<Step>,
}

impl Script {
    pub fn parse(json: &str) -> Result<Script> {
        serde_json::from_str(json).map_err(|e| Error::Script(format!("cannot parse script: {e}")))
    }
}

/// Result of one executed command.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum Outcome {
    Committed { revision: u64 },
    Widget { widget: FilterWidgetModel },
    Recommendations { presentation: Presentation },
    Preview { view: ViewModel },
    Rejected,
}

/// Resolves the recommendation id a rank refers to in the pending set.
pub fn rec_id_for_rank(session: &Session, rank: usize) -> Result<String> {
    let set = session.recommendations().ok_or_else(|| Error::UnknownRecommendation(format!("rank {rank}")))?;
    set.by_rank(rank)
        .map(|r| r.rec_id.clone())
        .ok_or_else(|| Error::UnknownRecommendation(format!("rank {rank}")))
}

fn rule_for(session: &Session, rule_id: &Option<String>, attribute: &Option<String>) -> Result<String> {
    match (rule_id, attribute) {
        (Some(id), _) => Ok(id.clone()),
        (None, Some(a)) => session
            .spec()
            .filters
            .iter()
            .find(|r| r.form.attribute() == Some(a.as_str()))
            .map(|r| r.id.clone())
            .ok_or_else(|| Error::UnknownRule(format!("filter on `{a}`"))),
        (None, None) => Err(Error::Script("update_filter needs rule_id or attribute".into())),
    }
}

pub fn execute(session: &mut Session, command: &Command) -> Result<Outcome> {
    let committed = |c: crate::session::Commit| Outcome::Committed { revision: c.revision };
    Ok(match command {
        Command::SetAxis { channel, attribute } => committed(session.set_axis(*channel, attribute)?),
        Command::SetMark { channel, attribute } => committed(session.set_mark_encoding(*channel, attribute)?),
        Command::Switch { vis_type } => committed(session.switch_vis_type(*vis_type)?),
        Command::Filter { attribute } => Outcome::Widget { widget: session.add_attribute_filter(attribute)? },
        Command::UpdateFilter { rule_id, attribute, selection } => {
            let id = rule_for(session, rule_id, attribute)?;
            committed(session.update_filter_widget(&id, selection)?)
        }
        Command::RemoveFilter { rule_id } => committed(session.remove_filter(rule_id)?),
        Command::Sort { direction } => committed(session.sort_bars(*direction)?),
        Command::Remove { channel } => committed(session.remove_encoding(*channel)?),
        Command::Demonstrate { demonstration } => {
            session.demonstrate(demonstration)?;
            Outcome::Recommendations { presentation: session.presentation().expect("set just generated") }
        }
        Command::Accept { rank } => {
            let id = rec_id_for_rank(session, *rank)?;
            committed(session.accept(&id)?)
        }
        Command::Reject { rank: Some(rank) } => {
            let id = rec_id_for_rank(session, *rank)?;
            session.reject(&id)?;
            Outcome::Rejected
        }
        Command::Reject { rank: None } => {
            session.reject_all();
            Outcome::Rejected
        }
        Command::Preview { rank } => {
            let id = rec_id_for_rank(session, *rank)?;
            Outcome::Preview { view: session.preview(&id)? }
        }
        Command::Undo => committed(session.undo()?),
        Command::Redo => committed(session.redo()?),
    })
}

fn mismatch(what: &str, expected: impl std::fmt::Debug, actual: impl std::fmt::Debug) -> String {
    format!("{what}: expected {expected:?}, got {actual:?}")
}

/// Checks `expect` against the session after a step; returns every mismatch.
pub fn check(session: &Session, expect: &Expect) -> Vec<String> {
    let mut out = Vec::new();
    let spec = session.spec();
    if let Some(r) = expect.revision {
        if spec.revision != r {
            out.push(mismatch("revision", r, spec.revision));
        }
    }
    if let Some(v) = expect.vis_type {
        if spec.vis_type != v {
            out.push(mismatch("vis_type", v, spec.vis_type));
        }
    }
    if let Some(b) = &expect.bindings {
        let actual: BTreeMap<Channel, String> =
            spec.bindings.iter().map(|(c, b)| (*c, b.attribute.clone())).collect();
        if &actual != b {
            out.push(mismatch("bindings", b, actual));
        }
    }
    if let Some(s) = &expect.sort {
        if &spec.sort != s {
            out.push(mismatch("sort", s, &spec.sort));
        }
    }
    if let Some(n) = expect.filter_count {
        if spec.filters.len() != n {
            out.push(mismatch("filter_count", n, spec.filters.len()));
        }
    }
    if let Some(w) = &expect.widget {
        match session.filters() {
            Err(e) => out.push(format!("widgets: {e}")),
            Ok(widgets) => match widgets.iter().find(|m| m.attribute.as_deref() == Some(w.attribute.as_str())) {
                None => out.push(format!("no filter widget for `{}`", w.attribute)),
                Some(m) => {
                    let kind = WidgetKind::of(&m.widget);
                    if w.kind.is_some_and(|k| k != kind) {
                        out.push(mismatch("widget kind", w.kind, kind));
                    }
                    if let Some(n) = w.values {
                        match &m.widget {
                            Widget::CheckboxSet { values, .. } if values.len() == n => {}
                            Widget::CheckboxSet { values, .. } => out.push(mismatch("widget values", n, values.len())),
                            _ => out.push(format!("widget for `{}` has no values", w.attribute)),
                        }
                    }
                }
            },
        }
    }
    if expect.visible_rows.is_some() || expect.bar_order_first.is_some() || expect.bar_order_last.is_some() {
        match session.view() {
            Err(e) => out.push(format!("view: {e}")),
            Ok(view) => {
                if let Some(n) = expect.visible_rows {
                    if view.visible_rows != n {
                        out.push(mismatch("visible_rows", n, view.visible_rows));
                    }
                }
                let order = view.bar_order.unwrap_or_default();
                if let Some(d) = &expect.bar_order_first {
                    if order.first() != Some(d) {
                        out.push(mismatch("first bar", d, order.first()));
                    }
                }
                if let Some(d) = &expect.bar_order_last {
                    if order.last() != Some(d) {
                        out.push(mismatch("last bar", d, order.last()));
                    }
                }
            }
        }
    }
    let wants_recs = expect.division.is_some()
        || expect.recommendation_count.is_some()
        || expect.presented_attributes.is_some()
        || expect.presented_templates.is_some();
    if wants_recs {
        match (session.recommendations(), session.presentation()) {
            (Some(set), Some(p)) => {
                if let Some(n) = expect.recommendation_count {
                    if set.items.len() != n {
                        out.push(mismatch("recommendation_count", n, set.items.len()));
                    }
                }
                if let Some(d) = expect.division {
                    if !p.divisions.iter().any(|x| x.division == d) {
                        out.push(format!("no {d:?} division"));
                    }
                }
                let presented: Vec<&crate::recommend::Recommendation> = p
                    .divisions
                    .iter()
                    .flat_map(|d| &d.recommendations)
                    .filter_map(|r| set.get(&r.rec_id))
                    .collect();
                for a in expect.presented_attributes.iter().flatten() {
                    if !presented.iter().any(|r| r.candidate.attribute.as_deref() == Some(a.as_str())) {
                        out.push(format!("`{a}` not among presented recommendations"));
                    }
                }
                for t in expect.presented_templates.iter().flatten() {
                    if !presented.iter().any(|r| r.candidate.template == *t) {
                        out.push(format!("{t:?} not among presented recommendations"));
                    }
                }
            }
            _ => out.push("no recommendation set".into()),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepReport {
    pub index: usize,
    pub op: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<Outcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
}

impl StepReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs every step, stopping at the first failure. A step whose `expect`
/// names an error passes when the command fails with that error code.
pub fn run(session: &mut Session, script: &Script) -> (Vec<StepReport>, Result<()>) {
    let mut reports = Vec::new();
    for (index, step) in script.steps.iter().enumerate() {
        let result = execute(session, &step.command);
        let expected_error = step.expect.as_ref().and_then(|e| e.error.clone());
        let mut report = StepReport { index, op: step.command.name(), outcome: None, error: None, failures: Vec::new() };
        match (result, expected_error) {
            (Ok(outcome), None) => report.outcome = Some(outcome),
            (Ok(outcome), Some(code)) => {
                report.outcome = Some(outcome);
                report.failures.push(format!("expected error {code}, step succeeded"));
            }
            (Err(e), Some(code)) if e.code() == code => report.error = Some(e.to_string()),
            (Err(e), _) => {
                report.failures.push(format!("{} ({})", e, e.code()));
                report.error = Some(e.to_string());
            }
        }
        if report.passed() {
            if let Some(expect) = &step.expect {
                report.failures.extend(check(session, expect));
            }
        }
        let failed = !report.passed();
        let message = failed.then(|| format!("step {index} ({}): {}", report.op, report.failures.join("; ")));
        reports.push(report);
        if let Some(message) = message {
            return (reports, Err(Error::Script(message)));
        }
    }
    (reports, Ok(()))
}
