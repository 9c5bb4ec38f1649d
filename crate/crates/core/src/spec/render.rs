use serde::{Deserialize, Serialize};

use super::validate::{validate, ViolationKind};
use super::{visible_rows, Channel, ChannelBinding, SortDirection, SortState, VisSpec, VisType};
use crate::color::{ColorPalette, PaletteScale, Rgb, DEFAULT_MARK};
use crate::data::{Attribute, Dataset, Datum, RowId};
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Mark size when Size is unbound.
pub const DEFAULT_SIZE: f64 = 0.5;
const SIZE_MIN: f64 = 0.2;
const SIZE_MAX: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkSource {
    Row(RowId),
    Category(Datum),
    Segment { category: Datum, color_value: Datum },
}

/// One drawable mark in normalized [0,1] coordinates. Bars and segments
/// carry their baseline in `y0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mark {
    pub mark_id: String,
    pub source: MarkSource,
    pub x: f64,
    pub y: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y0: Option<f64>,
    pub size: f64,
    pub color: Rgb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisScale {
    Linear,
    Band,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub attribute: String,
    pub scale: AxisScale,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub categories: Option<Vec<Datum>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axes {
    pub x: Axis,
    pub y: Axis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewModel {
    pub revision: u64,
    pub vis_type: VisType,
    pub visible_rows: usize,
    pub axes: Axes,
    pub marks: Vec<Mark>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bar_order: Option<Vec<Datum>>,
}

impl ViewModel {
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("ViewModel always serializes")
    }
}

fn normalize(v: f64, [lo, hi]: [f64; 2]) -> f64 {
    if hi > lo {
        (v - lo) / (hi - lo)
    } else {
        0.5
    }
}

/// The palette a binding renders with; unpaletted bindings get the default.
pub(crate) fn effective_palette(binding: &ChannelBinding, attr: &Attribute) -> ColorPalette {
    match &binding.palette {
        Some(p) => p.clone(),
        None if attr.is_categorical_like() => ColorPalette::default_categorical(&attr.categories),
        None => ColorPalette::default_ramp(attr.extent.unwrap_or([0.0, 0.0])),
    }
}

struct Encoded {
    attr: usize,
    palette: Option<ColorPalette>,
    extent: [f64; 2],
}

fn encoding(spec: &VisSpec, ds: &Dataset, channel: Channel) -> Result<Option<Encoded>> {
    let Some(b) = spec.binding(channel) else { return Ok(None) };
    let attr = ds.resolve(&b.attribute)?;
    let a = &ds.attributes()[attr];
    Ok(Some(Encoded {
        attr,
        palette: (channel == Channel::Color).then(|| effective_palette(b, a)),
        extent: a.extent.unwrap_or([0.0, 0.0]),
    }))
}

/// A bar: one X category and the visible rows that have every bound channel.
#[derive(Debug, Clone)]
pub(crate) struct Bar {
    pub code: u32,
    pub members: Vec<RowId>,
}

fn participates(spec: &VisSpec, ds: &Dataset, attrs: &[usize], row: RowId) -> bool {
    let _ = spec;
    attrs.iter().all(|a| !ds.is_missing(*a, row))
}

fn bound_attrs(spec: &VisSpec, ds: &Dataset) -> Result<Vec<usize>> {
    spec.bindings.values().map(|b| ds.resolve(&b.attribute)).collect()
}

/// Bars in category order; categories without participating rows are omitted.
pub(crate) fn bar_layout(spec: &VisSpec, ds: &Dataset, visible: &[bool]) -> Result<Vec<Bar>> {
    let x_name = spec.attribute_on(Channel::X).ok_or(Error::MissingAxes)?;
    let x = ds.resolve(x_name)?;
    let attrs = bound_attrs(spec, ds)?;
    let n_cats = ds.attributes()[x].categories.len();
    let mut members: Vec<Vec<RowId>> = vec![Vec::new(); n_cats];
    for (row, vis) in visible.iter().enumerate() {
        if !vis || !participates(spec, ds, &attrs, row) {
            continue;
        }
        if let Some(code) = ds.code(x, row) {
            members[code as usize].push(row);
        }
    }
    Ok(members
        .into_iter()
        .enumerate()
        .filter(|(_, m)| !m.is_empty())
        .map(|(code, members)| Bar { code: code as u32, members })
        .collect())
}

pub(crate) fn mean_of(ds: &Dataset, attr: usize, rows: &[RowId]) -> Option<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for r in rows {
        if let Some(v) = ds.number(attr, *r) {
            sum += v;
            n += 1;
        }
    }
    (n > 0).then(|| sum / n as f64)
}

/// Stable sort of bars by the mean of `attr`; bars without a mean go last.
pub(crate) fn order_bars(bars: &mut [Bar], ds: &Dataset, attr: usize, direction: SortDirection) {
    if direction == SortDirection::None {
        return;
    }
    let mut keyed: Vec<(Option<f64>, Bar)> =
        bars.iter().map(|b| (mean_of(ds, attr, &b.members), b.clone())).collect();
    keyed.sort_by(|(a, _), (b, _)| match (a, b) {
        (Some(a), Some(b)) => match direction {
            SortDirection::Descending => b.total_cmp(a),
            _ => a.total_cmp(b),
        },
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    for (slot, (_, bar)) in bars.iter_mut().zip(keyed) {
        *slot = bar;
    }
}

fn apply_sort(bars: &mut [Bar], ds: &Dataset, sort: &SortState) -> Result<()> {
    if let (true, Some(name)) = (sort.is_active(), &sort.by_attribute) {
        order_bars(bars, ds, ds.resolve(name)?, sort.direction);
    }
    Ok(())
}

/// Render `spec` into its abstract view model. Deterministic: equal inputs
/// give byte-identical output under either execution strategy.
pub fn render(spec: &VisSpec, ds: &Dataset, exec: Execution) -> Result<ViewModel> {
    check_renderable(spec, ds)?;
    let visible = visible_rows(spec, ds, exec)?;
    let visible_count = visible.iter().filter(|v| **v).count();
    match spec.vis_type {
        VisType::Scatterplot => render_scatter(spec, ds, exec, &visible, visible_count),
        VisType::BarChart | VisType::StackedBarChart => render_bars(spec, ds, &visible, visible_count),
    }
}

/// The error `render` would return for `spec`, without computing marks.
pub fn check_renderable(spec: &VisSpec, ds: &Dataset) -> Result<()> {
    let violations = validate(spec, ds);
    let illegal: Vec<String> =
        violations.iter().filter(|v| v.kind == ViolationKind::Illegal).map(|v| v.message.clone()).collect();
    if !illegal.is_empty() {
        return Err(Error::InvalidSpec(illegal));
    }
    if spec.binding(Channel::X).is_none() || spec.binding(Channel::Y).is_none() {
        return Err(Error::MissingAxes);
    }
    if !violations.is_empty() {
        return Err(Error::InvalidSpec(violations.into_iter().map(|v| v.message).collect()));
    }
    Ok(())
}

fn render_scatter(
    spec: &VisSpec,
    ds: &Dataset,
    exec: Execution,
    visible: &[bool],
    visible_count: usize,
) -> Result<ViewModel> {
    let x = encoding(spec, ds, Channel::X)?.ok_or(Error::MissingAxes)?;
    let y = encoding(spec, ds, Channel::Y)?.ok_or(Error::MissingAxes)?;
    let color = encoding(spec, ds, Channel::Color)?;
    let size = encoding(spec, ds, Channel::Size)?;
    let attrs = bound_attrs(spec, ds)?;

    let marks = exec.filter_map_range(ds.row_count(), |row| {
        if !visible[row] || !participates(spec, ds, &attrs, row) {
            return None;
        }
        let xv = ds.number(x.attr, row)?;
        let yv = ds.number(y.attr, row)?;
        let color = match &color {
            Some(c) => c.palette.as_ref().expect("color encoding has a palette").color_of(&ds.datum(c.attr, row)?),
            None => DEFAULT_MARK,
        };
        let size = match &size {
            Some(s) => {
                let v = ds.number(s.attr, row)?;
                if s.extent[1] > s.extent[0] {
                    SIZE_MIN + (SIZE_MAX - SIZE_MIN) * normalize(v, s.extent)
                } else {
                    (SIZE_MIN + SIZE_MAX) / 2.0
                }
            }
            None => DEFAULT_SIZE,
        };
        Some(Mark {
            mark_id: format!("r{row}"),
            source: MarkSource::Row(row),
            x: normalize(xv, x.extent),
            y: normalize(yv, y.extent),
            y0: None,
            size,
            color,
        })
    });

    Ok(ViewModel {
        revision: spec.revision,
        vis_type: spec.vis_type,
        visible_rows: visible_count,
        axes: Axes {
            x: Axis {
                attribute: ds.attributes()[x.attr].name.clone(),
                scale: AxisScale::Linear,
                domain: Some(x.extent),
                categories: None,
            },
            y: Axis {
                attribute: ds.attributes()[y.attr].name.clone(),
                scale: AxisScale::Linear,
                domain: Some(y.extent),
                categories: None,
            },
        },
        marks,
        bar_order: None,
    })
}

fn majority_code(ds: &Dataset, attr: usize, rows: &[RowId]) -> Option<u32> {
    let n = ds.attributes()[attr].categories.len();
    let mut counts = vec![0usize; n];
    for r in rows {
        if let Some(c) = ds.code(attr, *r) {
            counts[c as usize] += 1;
        }
    }
    let best = counts.iter().copied().max().filter(|m| *m > 0)?;
    counts.iter().position(|c| *c == best).map(|i| i as u32)
}

fn render_bars(spec: &VisSpec, ds: &Dataset, visible: &[bool], visible_count: usize) -> Result<ViewModel> {
    let x = encoding(spec, ds, Channel::X)?.ok_or(Error::MissingAxes)?;
    let y = encoding(spec, ds, Channel::Y)?.ok_or(Error::MissingAxes)?;
    let color = encoding(spec, ds, Channel::Color)?;
    let x_attr = &ds.attributes()[x.attr];

    let mut bars = bar_layout(spec, ds, visible)?;
    apply_sort(&mut bars, ds, &spec.sort)?;
    let means: Vec<f64> = bars.iter().map(|b| mean_of(ds, y.attr, &b.members).unwrap_or(0.0)).collect();

    // Stacked segments: (bar index, color code, height) in color-category order.
    let mut segments: Vec<Vec<(u32, f64)>> = Vec::new();
    if spec.vis_type == VisType::StackedBarChart {
        let c = color.as_ref().ok_or_else(|| Error::InvalidSpec(vec!["StackedBarChart requires Color".into()]))?;
        let n_colors = ds.attributes()[c.attr].categories.len();
        for bar in &bars {
            let mut sums = vec![0.0; n_colors];
            let mut seen = vec![false; n_colors];
            for r in &bar.members {
                let code = ds.code(c.attr, *r).expect("participating rows have a color value") as usize;
                sums[code] += ds.number(y.attr, *r).expect("participating rows have a Y value");
                seen[code] = true;
            }
            let n = bar.members.len() as f64;
            segments.push(
                (0..n_colors).filter(|i| seen[*i]).map(|i| (i as u32, sums[i] / n)).collect(),
            );
        }
    }

    let mut lo = 0.0f64;
    let mut hi = 0.0f64;
    if segments.is_empty() {
        for m in &means {
            lo = lo.min(*m);
            hi = hi.max(*m);
        }
    } else {
        for segs in &segments {
            let mut pos = 0.0f64;
            let mut neg = 0.0f64;
            for (_, h) in segs {
                if *h >= 0.0 {
                    pos += h
                } else {
                    neg += h
                }
            }
            lo = lo.min(neg);
            hi = hi.max(pos);
        }
    }
    if hi <= lo {
        hi = lo + 1.0;
    }
    let y_domain = [lo, hi];
    let n = bars.len().max(1) as f64;

    let mut marks = Vec::new();
    for (i, bar) in bars.iter().enumerate() {
        let category = x_attr.categories[bar.code as usize].clone();
        let xpos = (i as f64 + 0.5) / n;
        if spec.vis_type == VisType::StackedBarChart {
            let c = color.as_ref().expect("checked above");
            let palette = c.palette.as_ref().expect("color encoding has a palette");
            let c_attr = &ds.attributes()[c.attr];
            let (mut pos, mut neg) = (0.0f64, 0.0f64);
            for (code, h) in &segments[i] {
                let value = c_attr.categories[*code as usize].clone();
                let base = if *h >= 0.0 { &mut pos } else { &mut neg };
                let y0 = *base;
                *base += h;
                marks.push(Mark {
                    mark_id: format!("seg:{category}:{value}"),
                    color: palette.color_of(&value),
                    source: MarkSource::Segment { category: category.clone(), color_value: value },
                    x: xpos,
                    y: normalize(*base, y_domain),
                    y0: Some(normalize(y0, y_domain)),
                    size: DEFAULT_SIZE,
                });
            }
        } else {
            let color = match &color {
                None => DEFAULT_MARK,
                Some(c) => {
                    let palette = c.palette.as_ref().expect("color encoding has a palette");
                    if c.attr == x.attr {
                        palette.color_of(&category)
                    } else if palette.scale == PaletteScale::Ramp || !ds.attributes()[c.attr].is_categorical_like() {
                        match mean_of(ds, c.attr, &bar.members) {
                            Some(m) => palette.color_of(&Datum::Num(m)),
                            None => palette.default_color,
                        }
                    } else {
                        match majority_code(ds, c.attr, &bar.members) {
                            Some(code) => palette.color_of(&ds.attributes()[c.attr].categories[code as usize]),
                            None => palette.default_color,
                        }
                    }
                }
            };
            marks.push(Mark {
                mark_id: format!("bar:{category}"),
                source: MarkSource::Category(category),
                x: xpos,
                y: normalize(means[i], y_domain),
                y0: Some(normalize(0.0, y_domain)),
                size: DEFAULT_SIZE,
                color,
            });
        }
    }

    let order: Vec<Datum> = bars.iter().map(|b| x_attr.categories[b.code as usize].clone()).collect();
    Ok(ViewModel {
        revision: spec.revision,
        vis_type: spec.vis_type,
        visible_rows: visible_count,
        axes: Axes {
            x: Axis {
                attribute: x_attr.name.clone(),
                scale: AxisScale::Band,
                domain: None,
                categories: Some(order.clone()),
            },
            y: Axis {
                attribute: ds.attributes()[y.attr].name.clone(),
                scale: AxisScale::Linear,
                domain: Some(y_domain),
                categories: None,
            },
        },
        marks,
        bar_order: Some(order),
    })
}
