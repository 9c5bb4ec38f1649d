use std::collections::BTreeSet;

use super::{check_rows, rank, Candidate, CandidateKind, ColorGroup, Evidence, IntentContext, SizedPoint, Template};
use crate::color::{ColorPalette, Rgb};
use crate::data::{Attribute, Dataset, RowId};
use crate::error::{Error, Result};
use crate::spec::{binding_legality, Channel, ChannelBinding, Provenance, SpecChange, VisType};

/// [min, max] of the known values of `attr` over `rows`.
fn interval(ds: &Dataset, attr: usize, rows: &[RowId]) -> Option<[f64; 2]> {
    rows.iter().filter_map(|r| ds.number(attr, *r)).fold(None, |acc, v| match acc {
        None => Some([v, v]),
        Some([lo, hi]) => Some([lo.min(v), hi.max(v)]),
    })
}

/// Smallest gap between consecutive intervals (sorted by lower bound), or
/// `None` when two intervals touch or overlap.
fn min_gap(intervals: &mut [[f64; 2]]) -> Option<f64> {
    intervals.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let mut gap = f64::INFINITY;
    for w in intervals.windows(2) {
        if w[0][1] >= w[1][0] {
            return None;
        }
        gap = gap.min(w[1][0] - w[0][1]);
    }
    Some(gap)
}

fn separation(gap: f64, attr: &Attribute, groups: usize) -> f64 {
    if groups < 2 {
        return 0.0;
    }
    match attr.extent {
        Some([lo, hi]) if hi > lo => (gap / (hi - lo)).min(1.0),
        _ => 0.0,
    }
}

fn parsimony(attr: &Attribute) -> f64 {
    1.0 / attr.distinct_count.max(1) as f64
}

fn color_candidate(ctx: &IntentContext, attr: usize, groups: &[(Rgb, &[RowId])]) -> Option<Candidate> {
    let ds = ctx.dataset;
    let a = &ds.attributes()[attr];
    binding_legality(ctx.spec.vis_type, Channel::Color, a).ok()?;
    let (palette, evidence) = if a.is_categorical_like() {
        let mut used = BTreeSet::new();
        let mut assigned = Vec::with_capacity(groups.len());
        for (color, rows) in groups {
            let codes: BTreeSet<u32> = rows.iter().filter_map(|r| ds.code(attr, *r)).collect();
            let [code] = codes.into_iter().collect::<Vec<_>>()[..] else { return None };
            if !used.insert(code) {
                return None;
            }
            assigned.push((a.categories[code as usize].clone(), *color));
        }
        let evidence = Evidence {
            type_affinity: 1.0,
            separation: if groups.len() >= 2 { 1.0 } else { 0.0 },
            parsimony: parsimony(a),
            extension: None,
        };
        (ColorPalette::custom_categorical(&a.categories, &assigned), evidence)
    } else {
        let mut anchors = Vec::with_capacity(groups.len());
        for (color, rows) in groups {
            anchors.push((interval(ds, attr, rows)?, *color));
        }
        let mut intervals: Vec<[f64; 2]> = anchors.iter().map(|(iv, _)| *iv).collect();
        let gap = min_gap(&mut intervals)?;
        let evidence = Evidence {
            type_affinity: 0.5,
            separation: separation(gap, a, groups.len()),
            parsimony: parsimony(a),
            extension: None,
        };
        (ColorPalette::custom_ramp(anchors), evidence)
    };
    let binding = ChannelBinding::new(Channel::Color, a.name.clone(), Provenance::Vbd).with_palette(palette);
    Some(ctx.candidate(
        CandidateKind::Encoding,
        Template::ColorMapping,
        Some(a.name.clone()),
        SpecChange::SetBinding { binding },
        evidence,
    ))
}

/// One candidate per attribute whose values separate the demonstrated color
/// groups; each carries a palette reproducing the demonstrated colors.
pub fn infer_color_candidates(ctx: &IntentContext, groups: &[ColorGroup]) -> Result<Vec<Candidate>> {
    let ds = ctx.dataset;
    if groups.is_empty() {
        return Err(Error::InvalidDemonstration("recolor needs at least one group".into()));
    }
    if groups.iter().any(|g| g.selection.row_ids.is_empty()) {
        return Err(Error::EmptySelection);
    }
    let colors: BTreeSet<Rgb> = groups.iter().map(|g| g.color).collect();
    if colors.len() != groups.len() {
        return Err(Error::InvalidDemonstration("two groups share a color".into()));
    }
    let visible = ctx.visible()?;
    check_rows(ds, &visible, groups.iter().flat_map(|g| &g.selection.row_ids))?;

    let groups: Vec<(Rgb, &[RowId])> = groups.iter().map(|g| (g.color, &g.selection.row_ids[..])).collect();
    let attrs: Vec<usize> = (0..ds.attributes().len()).collect();
    let mut out: Vec<Candidate> =
        ctx.exec.map(&attrs, |a| color_candidate(ctx, *a, &groups)).into_iter().flatten().collect();
    rank(&mut out);
    Ok(out)
}

fn size_candidate(ctx: &IntentContext, attr: usize, sized: &[SizedPoint]) -> Option<Candidate> {
    let ds = ctx.dataset;
    let a = &ds.attributes()[attr];
    binding_legality(ctx.spec.vis_type, Channel::Size, a).ok()?;
    // Rows grouped into size levels, ascending; rows missing the attribute are ignored.
    let mut levels: Vec<(f64, Vec<RowId>)> = Vec::new();
    let mut known: Vec<&SizedPoint> = sized.iter().filter(|p| ds.number(attr, p.row).is_some()).collect();
    known.sort_by(|x, y| x.size.total_cmp(&y.size));
    for p in known {
        match levels.last_mut() {
            Some((s, rows)) if *s == p.size => rows.push(p.row),
            _ => levels.push((p.size, vec![p.row])),
        }
    }
    if levels.len() < 2 {
        return None;
    }
    let intervals: Vec<[f64; 2]> = levels.iter().map(|(_, rows)| interval(ds, attr, rows)).collect::<Option<_>>()?;
    let mut gap = f64::INFINITY;
    for w in intervals.windows(2) {
        if w[0][1] >= w[1][0] {
            return None;
        }
        gap = gap.min(w[1][0] - w[0][1]);
    }
    let evidence = Evidence {
        type_affinity: 0.5,
        separation: separation(gap, a, levels.len()),
        parsimony: parsimony(a),
        extension: None,
    };
    let binding = ChannelBinding::new(Channel::Size, a.name.clone(), Provenance::Vbd);
    Some(ctx.candidate(
        CandidateKind::Encoding,
        Template::SizeMapping,
        Some(a.name.clone()),
        SpecChange::SetBinding { binding },
        evidence,
    ))
}

/// One candidate per quantitative attribute that increases strictly with the
/// demonstrated sizes. Points sharing a size may hold any values.
pub fn infer_size_candidates(ctx: &IntentContext, sized: &[SizedPoint]) -> Result<Vec<Candidate>> {
    let ds = ctx.dataset;
    if ctx.spec.vis_type != VisType::Scatterplot {
        return Err(Error::WrongVisType(ctx.spec.vis_type));
    }
    if sized.len() < 2 {
        return Err(Error::InvalidDemonstration("resize needs at least two points".into()));
    }
    if let Some(p) = sized.iter().find(|p| !(p.size > 0.0 && p.size <= 1.0)) {
        return Err(Error::InvalidDemonstration(format!("size {} of row {} outside (0,1]", p.size, p.row)));
    }
    if sized.iter().all(|p| p.size == sized[0].size) {
        return Err(Error::InvalidDemonstration("resize needs at least two distinct sizes".into()));
    }
    let visible = ctx.visible()?;
    check_rows(ds, &visible, sized.iter().map(|p| &p.row))?;

    let attrs: Vec<usize> = (0..ds.attributes().len()).collect();
    let mut out: Vec<Candidate> =
        ctx.exec.map(&attrs, |a| size_candidate(ctx, *a, sized)).into_iter().flatten().collect();
    rank(&mut out);
    Ok(out)
}
