//! Seeded random sessions and commands, mostly legal against the current state.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use blendvis_core::color::Rgb;
use blendvis_core::data::Dataset;
use blendvis_core::intent::{BarTarget, ColorGroup, Demonstration, Selection, SizedPoint};
use blendvis_core::script::Command;
use blendvis_core::spec::{visible_rows, Channel, SortDirection, VisType};
use blendvis_core::sync::{Widget, WidgetSelection};
use blendvis_core::{Execution, Session};

pub const SWATCH: [Rgb; 4] = [Rgb([0xe4, 0x57, 0x56]), Rgb([0x4c, 0x78, 0xa8]), Rgb([0x54, 0xa2, 0x4b]), Rgb([0xf5, 0x85, 0x18])];

pub fn quantitative(ds: &Dataset) -> Vec<String> {
    ds.attributes().iter().filter(|a| a.is_quantitative()).map(|a| a.name.clone()).collect()
}

pub fn categorical_like(ds: &Dataset) -> Vec<String> {
    ds.attributes().iter().filter(|a| a.is_categorical_like()).map(|a| a.name.clone()).collect()
}

fn any_attr(rng: &mut StdRng, ds: &Dataset) -> String {
    ds.attributes().choose(rng).unwrap().name.clone()
}

pub fn visible(s: &Session) -> Vec<usize> {
    let mask = visible_rows(s.spec(), s.dataset(), Execution::Sequential).unwrap();
    mask.iter().enumerate().filter(|(_, v)| **v).map(|(r, _)| r).collect()
}

/// A session with axes bound and a few random filters; scatterplot unless `bars`.
pub fn random_session(rng: &mut StdRng, id: &str, ds: &std::sync::Arc<Dataset>, bars: bool) -> Session {
    let mut s = Session::new(id, ds.clone());
    let quant = quantitative(ds);
    if bars {
        s.switch_vis_type(VisType::BarChart).unwrap();
        s.set_axis(Channel::X, categorical_like(ds).choose(rng).unwrap()).unwrap();
    } else {
        s.set_axis(Channel::X, quant.choose(rng).unwrap()).unwrap();
    }
    s.set_axis(Channel::Y, quant.choose(rng).unwrap()).unwrap();
    for _ in 0..rng.gen_range(0..3) {
        let attr = any_attr(rng, ds);
        let Ok(widget) = s.add_attribute_filter(&attr) else { continue };
        if let Some(sel) = random_selection(rng, &widget.widget, 0.3) {
            let _ = s.update_filter_widget(&widget.rule_id, &sel);
        }
    }
    if visible(&s).len() < 8 {
        while !s.spec().filters.is_empty() {
            let id = s.spec().filters[0].id.clone();
            s.remove_filter(&id).unwrap();
        }
    }
    s
}

/// A widget selection that keeps most of the domain.
pub fn random_selection(rng: &mut StdRng, widget: &Widget, trim: f64) -> Option<WidgetSelection> {
    match widget {
        Widget::RangeSlider { domain: [lo, hi], .. } => {
            let w = hi - lo;
            let a = lo + rng.gen_range(0.0..=trim) * w;
            let b = hi - rng.gen_range(0.0..=trim) * w;
            Some(WidgetSelection::Range { lo: a.min(b), hi: a.max(b), exclude: Some(rng.gen_bool(0.2)) })
        }
        Widget::CheckboxSet { values, .. } => {
            let checked = values.iter().filter(|_| rng.gen_bool(0.8)).cloned().collect();
            Some(WidgetSelection::Values { checked })
        }
        Widget::PointChip { .. } => None,
    }
}

/// Groups of visible rows sharing a value of a random attribute, so most
/// recolorings have at least one explanation.
pub fn recolor(rng: &mut StdRng, s: &Session) -> Demonstration {
    let ds = s.dataset();
    let rows = visible(s);
    let cats = categorical_like(ds);
    let attr = ds.attribute_index(cats.choose(rng).unwrap()).unwrap();
    let mut by_code: std::collections::BTreeMap<u32, Vec<usize>> = Default::default();
    for r in &rows {
        if let Some(c) = ds.code(attr, *r) {
            by_code.entry(c).or_default().push(*r);
        }
    }
    let mut codes: Vec<u32> = by_code.keys().copied().collect();
    codes.shuffle(rng);
    let n_groups = rng.gen_range(1..=codes.len().clamp(1, 3));
    let groups = codes
        .iter()
        .take(n_groups)
        .zip(SWATCH)
        .map(|(code, color)| {
            let members = &by_code[code];
            let k = rng.gen_range(1..=members.len().min(4));
            ColorGroup { color, selection: Selection::new(members.choose_multiple(rng, k).copied()) }
        })
        .collect();
    Demonstration::Recolor { groups }
}

pub fn drag_out(rng: &mut StdRng, s: &Session) -> Demonstration {
    let rows = visible(s);
    let k = rng.gen_range(1..=rows.len().min(6));
    Demonstration::DragOutToFilter { selection: Selection::new(rows.choose_multiple(rng, k).copied()) }
}

pub fn resize(rng: &mut StdRng, s: &Session) -> Demonstration {
    let rows = visible(s);
    let k = rng.gen_range(2..=rows.len().clamp(2, 4));
    let sized = rows
        .choose_multiple(rng, k)
        .enumerate()
        .map(|(i, r)| SizedPoint { row: *r, size: [0.25, 0.5, 0.75, 1.0][i % 4] })
        .collect();
    Demonstration::Resize { sized }
}

pub fn drag_bar(rng: &mut StdRng, s: &Session) -> Option<Demonstration> {
    let order = s.view().ok()?.bar_order?;
    let category = order.choose(rng)?.clone();
    let target = if rng.gen_bool(0.5) { BarTarget::ExtremeLeft } else { BarTarget::ExtremeRight };
    Some(Demonstration::DragBar { category, target })
}

/// One demonstration suited to the current vis type.
pub fn demonstration(rng: &mut StdRng, s: &Session) -> Option<Demonstration> {
    if visible(s).len() < 2 {
        return None;
    }
    if s.spec().vis_type.is_bar() {
        return match rng.gen_range(0..3) {
            0 => Some(recolor(rng, s)),
            1 => Some(drag_out(rng, s)),
            _ => drag_bar(rng, s),
        };
    }
    Some(match rng.gen_range(0..3) {
        0 => recolor(rng, s),
        1 => drag_out(rng, s),
        _ => resize(rng, s),
    })
}

/// A random MVS or VbD command, undo or redo.
pub fn command(rng: &mut StdRng, s: &Session) -> Command {
    let ds = s.dataset();
    let pending = s.recommendations().map(|set| set.pending().count()).unwrap_or(0);
    let total = s.recommendations().map(|set| set.items.len()).unwrap_or(0);
    loop {
        let cmd = match rng.gen_range(0..14) {
            0 => Command::SetAxis {
                channel: *[Channel::X, Channel::Y].choose(rng).unwrap(),
                attribute: quantitative(ds).choose(rng).unwrap().clone(),
            },
            1 => Command::SetMark { channel: Channel::Color, attribute: any_attr(rng, ds) },
            2 => Command::SetMark { channel: Channel::Size, attribute: quantitative(ds).choose(rng).unwrap().clone() },
            3 => Command::Switch { vis_type: *VisType::ALL.choose(rng).unwrap() },
            4 if s.spec().vis_type.is_bar() => Command::SetAxis {
                channel: Channel::X,
                attribute: categorical_like(ds).choose(rng).unwrap().clone(),
            },
            4 => Command::Filter { attribute: any_attr(rng, ds) },
            5 => {
                let Ok(widgets) = s.filters() else { continue };
                let Some(w) = widgets.choose(rng) else { continue };
                let Some(selection) = random_selection(rng, &w.widget, 0.4) else { continue };
                Command::UpdateFilter { rule_id: Some(w.rule_id.clone()), attribute: None, selection }
            }
            6 => {
                let Some(rule) = s.spec().filters.choose(rng) else { continue };
                Command::RemoveFilter { rule_id: rule.id.clone() }
            }
            7 => Command::Sort {
                direction: *[SortDirection::Ascending, SortDirection::Descending, SortDirection::None].choose(rng).unwrap(),
            },
            8 => Command::Remove { channel: *[Channel::Color, Channel::Size].choose(rng).unwrap() },
            9 | 10 => match demonstration(rng, s) {
                Some(demonstration) => Command::Demonstrate { demonstration },
                None => continue,
            },
            11 if pending > 0 => Command::Accept { rank: rng.gen_range(1..=total) },
            11 => continue,
            12 => Command::Undo,
            _ => Command::Redo,
        };
        return cmd;
    }
}
