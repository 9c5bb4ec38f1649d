//! One user's working state: the dataset, the committed spec, pending
//! recommendations, the command log and palette memory. Every operation of
//! both paradigms goes through here.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::color::ColorPalette;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::intent::{infer, Demonstration, IntentContext, RankWeights};
use crate::recommend::{Presentation, RecState, RecommendationSet, PRESENTED_PER_DIVISION};
use crate::spec::{
    render, Channel, ChannelBinding, FilterForm, FilterRule, Provenance, SortDirection, SortState, SpecChange,
    ViewModel, VisSpec, VisType,
};
use crate::sync::{
    apply_selection, corollary_state, encoding_shelves, filter_widgets, widget_for, CommandLog, CorollaryUpdate,
    FilterWidgetModel, LogEntry, PaletteMemory, Shelf, WidgetSelection,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    #[serde(default)]
    pub weights: RankWeights,
    #[serde(default)]
    pub exec: Execution,
    #[serde(default = "default_limit")]
    pub presented_per_division: usize,
}

fn default_limit() -> usize {
    PRESENTED_PER_DIVISION
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            weights: RankWeights::default(),
            exec: Execution::default(),
            presented_per_division: PRESENTED_PER_DIVISION,
        }
    }
}

/// What a committed change did.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Commit {
    pub revision: u64,
    pub change: SpecChange,
    pub paradigm: Provenance,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub corollary: Vec<CorollaryUpdate>,
    /// Bindings a vis-type switch dropped.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dropped: Vec<ChannelBinding>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRef {
    pub id: String,
    pub row_count: usize,
}

/// Everything needed to rebuild a session given its dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSnapshot {
    pub session_id: String,
    pub dataset: DatasetRef,
    pub initial_spec: VisSpec,
    pub revision: u64,
    pub log: CommandLog,
    pub palette_memory: PaletteMemory,
    /// Last recommendation set number, so ids stay unique after a reload.
    #[serde(default)]
    pub recommendation_seq: u64,
    #[serde(default)]
    pub config: SessionConfig,
}

#[derive(Debug, Clone)]
pub struct Session {
    id: String,
    dataset: Arc<Dataset>,
    initial: VisSpec,
    spec: VisSpec,
    pending: Option<RecommendationSet>,
    set_seq: u64,
    log: CommandLog,
    palettes: PaletteMemory,
    config: SessionConfig,
}

impl Session {
    pub fn new(id: impl Into<String>, dataset: Arc<Dataset>) -> Self {
        Session::with_config(id, dataset, SessionConfig::default())
    }

    pub fn with_config(id: impl Into<String>, dataset: Arc<Dataset>, config: SessionConfig) -> Self {
        Session {
            id: id.into(),
            dataset,
            initial: VisSpec::default(),
            spec: VisSpec::default(),
            pending: None,
            set_seq: 0,
            log: CommandLog::default(),
            palettes: PaletteMemory::default(),
            config,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dataset(&self) -> &Arc<Dataset> {
        &self.dataset
    }

    pub fn spec(&self) -> &VisSpec {
        &self.spec
    }

    pub fn revision(&self) -> u64 {
        self.spec.revision
    }

    pub fn initial_spec(&self) -> &VisSpec {
        &self.initial
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn log(&self) -> &CommandLog {
        &self.log
    }

    pub fn palette_memory(&self) -> &PaletteMemory {
        &self.palettes
    }

    pub fn view(&self) -> Result<ViewModel> {
        render(&self.spec, &self.dataset, self.config.exec)
    }

    pub fn filters(&self) -> Result<Vec<FilterWidgetModel>> {
        filter_widgets(&self.spec, &self.dataset)
    }

    pub fn shelves(&self) -> Vec<Shelf> {
        encoding_shelves(&self.spec)
    }

    pub fn recommendations(&self) -> Option<&RecommendationSet> {
        self.pending.as_ref()
    }

    /// The pending set grouped for display, truncated per the session config.
    pub fn presentation(&self) -> Option<Presentation> {
        self.pending.as_ref().map(|s| s.presentation(Some(self.config.presented_per_division)))
    }

    fn commit(&mut self, change: SpecChange, paradigm: Provenance) -> Result<Commit> {
        let inverse = self.spec.inverse_of(&self.dataset, &change)?;
        let next = self.spec.apply(&self.dataset, &change)?;
        self.log.record(LogEntry { revision: next.revision, change: change.clone(), paradigm, inverse });
        Ok(self.install(next, change, paradigm))
    }

    /// Makes `next` current and runs the cross-paradigm bookkeeping.
    fn install(&mut self, next: VisSpec, change: SpecChange, paradigm: Provenance) -> Commit {
        let dropped = match &change {
            SpecChange::SetVisType { vis_type } => self.spec.dropped_by_switch(&self.dataset, *vis_type),
            _ => Vec::new(),
        };
        self.spec = next;
        self.remember_palettes(&change);
        if let Some(set) = &mut self.pending {
            set.settle_pending(RecState::Expired);
        }
        Commit {
            revision: self.spec.revision,
            corollary: corollary_state(&change, &self.spec, &self.dataset),
            change,
            paradigm,
            dropped,
        }
    }

    fn remember_palettes(&mut self, change: &SpecChange) {
        match change {
            SpecChange::SetBinding { binding } => {
                if let Some(p) = &binding.palette {
                    self.palettes.remember(&binding.attribute, p);
                }
            }
            SpecChange::Batch { changes } => {
                for c in changes {
                    self.remember_palettes(c);
                }
            }
            _ => {}
        }
    }

    // ---- MVS operations ----

    /// Binds X or Y; an occupied shelf is replaced.
    pub fn set_axis(&mut self, channel: Channel, attribute: &str) -> Result<Commit> {
        if !matches!(channel, Channel::X | Channel::Y) {
            return Err(Error::WrongChannel(channel));
        }
        self.dataset.attribute(attribute)?;
        let binding = ChannelBinding::new(channel, attribute, Provenance::Mvs);
        self.commit(SpecChange::SetBinding { binding }, Provenance::Mvs)
    }

    /// Binds Color or Size. Color reuses a remembered custom palette for the
    /// attribute, otherwise gets the default one.
    pub fn set_mark_encoding(&mut self, channel: Channel, attribute: &str) -> Result<Commit> {
        if !matches!(channel, Channel::Color | Channel::Size) {
            return Err(Error::WrongChannel(channel));
        }
        let a = self.dataset.attribute(attribute)?;
        let mut binding = ChannelBinding::new(channel, attribute, Provenance::Mvs);
        if channel == Channel::Color {
            let palette = match self.palettes.recall(attribute) {
                Some(p) => p.clone(),
                None if a.is_categorical_like() => ColorPalette::default_categorical(&a.categories),
                None => ColorPalette::default_ramp(a.extent.unwrap_or([0.0, 0.0])),
            };
            binding = binding.with_palette(palette);
        }
        self.commit(SpecChange::SetBinding { binding }, Provenance::Mvs)
    }

    pub fn switch_vis_type(&mut self, target: VisType) -> Result<Commit> {
        self.commit(SpecChange::SetVisType { vis_type: target }, Provenance::Mvs)
    }

    /// Widget for `attribute`, creating a rule that excludes nothing unless
    /// one already filters on it.
    pub fn add_attribute_filter(&mut self, attribute: &str) -> Result<FilterWidgetModel> {
        let a = self.dataset.attribute(attribute)?.clone();
        if let Some(existing) = self
            .spec
            .filters
            .iter()
            .find(|r| r.form.attribute() == Some(attribute))
        {
            return widget_for(existing, &self.dataset);
        }
        let form = if a.is_categorical_like() {
            FilterForm::ValueSet { attribute: a.name.clone(), values: a.categories.clone() }
        } else {
            let [lo, hi] = a.extent.unwrap_or([0.0, 0.0]);
            FilterForm::Range { attribute: a.name.clone(), lo, hi, exclude: false }
        };
        let rule = FilterRule { id: self.spec.next_filter_id(), form, provenance: Provenance::Mvs };
        let id = rule.id.clone();
        self.commit(SpecChange::AddFilter { rule, index: None }, Provenance::Mvs)?;
        widget_for(self.spec.filter(&id).expect("rule just added"), &self.dataset)
    }

    /// Works on rules from either paradigm; the rule keeps its provenance.
    pub fn update_filter_widget(&mut self, rule_id: &str, selection: &WidgetSelection) -> Result<Commit> {
        let rule = self.spec.filter(rule_id).ok_or_else(|| Error::UnknownRule(rule_id.to_string()))?;
        let rule = apply_selection(rule, selection, &self.dataset)?;
        self.commit(SpecChange::UpdateFilter { rule }, Provenance::Mvs)
    }

    pub fn remove_filter(&mut self, rule_id: &str) -> Result<Commit> {
        self.commit(SpecChange::RemoveFilter { rule_id: rule_id.to_string() }, Provenance::Mvs)
    }

    /// Sorts bars by the current Y attribute.
    pub fn sort_bars(&mut self, direction: SortDirection) -> Result<Commit> {
        if !self.spec.vis_type.is_bar() {
            return Err(Error::WrongVisType(self.spec.vis_type));
        }
        let y = self.spec.attribute_on(Channel::Y).ok_or(Error::ChannelUnbound(Channel::Y))?;
        let sort = SortState::new(y, direction);
        self.commit(SpecChange::SetSort { sort }, Provenance::Mvs)
    }

    /// X and Y can only be replaced, as can Color on a stacked bar chart.
    pub fn remove_encoding(&mut self, channel: Channel) -> Result<Commit> {
        if self.spec.binding(channel).is_none() {
            return Err(Error::ChannelUnbound(channel));
        }
        let required = matches!(channel, Channel::X | Channel::Y)
            || (channel == Channel::Color && self.spec.vis_type == VisType::StackedBarChart);
        if required {
            return Err(Error::RequiredChannel { channel, vis_type: self.spec.vis_type });
        }
        self.commit(SpecChange::RemoveBinding { channel }, Provenance::Mvs)
    }

    pub fn remember_palette(&mut self, attribute: &str, palette: &ColorPalette) -> bool {
        self.palettes.remember(attribute, palette)
    }

    pub fn recall_palette(&self, attribute: &str) -> Option<&ColorPalette> {
        self.palettes.recall(attribute)
    }

    // ---- VbD ----

    /// Runs the matching intent function and replaces the pending set. On
    /// error the previous set is left alone.
    pub fn demonstrate(&mut self, demo: &Demonstration) -> Result<&RecommendationSet> {
        let ctx = IntentContext::new(&self.dataset, &self.spec, &self.config.weights).with_exec(self.config.exec);
        let candidates = infer(&ctx, demo)?;
        self.set_seq += 1;
        let set_id = format!("{}.{}", self.id, self.set_seq);
        self.pending = Some(RecommendationSet::build(set_id, self.spec.revision, candidates, &self.dataset));
        Ok(self.pending.as_ref().expect("just set"))
    }

    /// The current set, or the reason `rec_id` cannot be acted on.
    fn set_for(&self, rec_id: &str) -> Result<&RecommendationSet> {
        let unknown = || Error::UnknownRecommendation(rec_id.to_string());
        let (set_id, _) = rec_id.rsplit_once('.').ok_or_else(unknown)?;
        let (session, seq) = set_id.rsplit_once('.').ok_or_else(unknown)?;
        let seq: u64 = seq.parse().map_err(|_| unknown())?;
        if session != self.id || seq > self.set_seq || seq == 0 {
            return Err(unknown());
        }
        match &self.pending {
            Some(set) if set.set_id == set_id => Ok(set),
            _ => Err(Error::Expired(rec_id.to_string())),
        }
    }

    /// The view that accepting `rec_id` would produce; commits nothing.
    pub fn preview(&self, rec_id: &str) -> Result<ViewModel> {
        let rec = self.set_for(rec_id)?.live(rec_id, self.spec.revision)?;
        let next = self.spec.apply(&self.dataset, &rec.candidate.change)?;
        render(&next, &self.dataset, self.config.exec)
    }

    pub fn accept(&mut self, rec_id: &str) -> Result<Commit> {
        let change = self.set_for(rec_id)?.live(rec_id, self.spec.revision)?.candidate.change.clone();
        let commit = self.commit(change, Provenance::Vbd)?;
        if let Some(set) = &mut self.pending {
            set.set_state(rec_id, RecState::Accepted);
        }
        Ok(commit)
    }

    pub fn reject(&mut self, rec_id: &str) -> Result<()> {
        let revision = self.spec.revision;
        self.set_for(rec_id)?.live(rec_id, revision)?;
        if let Some(set) = &mut self.pending {
            set.set_state(rec_id, RecState::Rejected);
        }
        Ok(())
    }

    pub fn reject_all(&mut self) {
        if let Some(set) = &mut self.pending {
            set.settle_pending(RecState::Rejected);
        }
    }

    // ---- history ----

    pub fn undo(&mut self) -> Result<Commit> {
        let entry = self.log.undo()?.clone();
        self.step_history(entry.inverse, entry.paradigm, true)
    }

    pub fn redo(&mut self) -> Result<Commit> {
        let entry = self.log.redo()?.clone();
        self.step_history(entry.change, entry.paradigm, false)
    }

    fn step_history(&mut self, change: SpecChange, paradigm: Provenance, undoing: bool) -> Result<Commit> {
        match self.spec.apply(&self.dataset, &change) {
            Ok(next) => Ok(self.install(next, change, paradigm)),
            Err(e) => {
                // put the cursor back so the log still matches the spec
                let _ = if undoing { self.log.redo().map(|_| ()) } else { self.log.undo().map(|_| ()) };
                Err(e)
            }
        }
    }

    /// The spec obtained by replaying the log from the initial spec.
    pub fn replayed_spec(&self) -> Result<VisSpec> {
        self.log.replay(&self.initial, &self.dataset)
    }

    pub fn snapshot(&self) -> SessionSnapshot {
        SessionSnapshot {
            session_id: self.id.clone(),
            dataset: DatasetRef { id: self.dataset.id().to_string(), row_count: self.dataset.row_count() },
            initial_spec: self.initial.clone(),
            revision: self.spec.revision,
            log: self.log.clone(),
            palette_memory: self.palettes.clone(),
            recommendation_seq: self.set_seq,
            config: self.config,
        }
    }

    /// Rebuilds a session from a snapshot; pending recommendations are not kept.
    pub fn restore(snapshot: SessionSnapshot, dataset: Arc<Dataset>) -> Result<Session> {
        if snapshot.dataset.row_count != dataset.row_count() {
            return Err(Error::Script(format!(
                "snapshot expects {} rows, dataset `{}` has {}",
                snapshot.dataset.row_count,
                dataset.id(),
                dataset.row_count()
            )));
        }
        if !snapshot.log.is_consistent() {
            return Err(Error::Script("snapshot log cursor out of range".into()));
        }
        let mut spec = snapshot.log.replay(&snapshot.initial_spec, &dataset)?;
        spec.revision = snapshot.revision;
        Ok(Session {
            id: snapshot.session_id,
            dataset,
            initial: snapshot.initial_spec,
            spec,
            pending: None,
            set_seq: snapshot.recommendation_seq,
            log: snapshot.log,
            palettes: snapshot.palette_memory,
            config: snapshot.config,
        })
    }
}
