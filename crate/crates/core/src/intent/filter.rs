use std::collections::BTreeSet;

use super::{check_rows, rank, Candidate, CandidateKind, Evidence, IntentContext, Selection, Template};
use crate::data::RowId;
use crate::error::{Error, Result};
use crate::spec::{Channel, FilterForm, FilterRule, Provenance, SpecChange};

/// Candidates from the template pool: the exact points, a range on the X and
/// on the Y attribute spanning the selection, and value sets on categorical or
/// discrete attributes whose extension is exactly the selection. Every
/// candidate removes all selected rows.
pub fn infer_filter_candidates(ctx: &IntentContext, selection: &Selection) -> Result<Vec<Candidate>> {
    let ds = ctx.dataset;
    if selection.row_ids.is_empty() {
        return Err(Error::EmptySelection);
    }
    let visible = ctx.visible()?;
    check_rows(ds, &visible, &selection.row_ids)?;
    let selected: BTreeSet<RowId> = selection.row_ids.iter().copied().collect();
    let n_sel = selected.len();
    let id = ctx.spec.next_filter_id();
    let make = |form: FilterForm| SpecChange::AddFilter {
        rule: FilterRule { id: id.clone(), form, provenance: Provenance::Vbd },
        index: None,
    };

    let mut out = Vec::new();
    out.push(ctx.candidate(
        CandidateKind::Filter,
        Template::PointSet,
        None,
        make(FilterForm::PointSet { rows: selected.iter().copied().collect() }),
        Evidence { type_affinity: 1.0, separation: 1.0, parsimony: 1.0 / n_sel as f64, extension: Some(n_sel) },
    ));

    let mut ranged: Vec<&str> = Vec::new();
    for (channel, template) in [(Channel::X, Template::XRange), (Channel::Y, Template::YRange)] {
        let Some(name) = ctx.spec.attribute_on(channel) else { continue };
        if ranged.contains(&name) {
            continue;
        }
        ranged.push(name);
        let attr = ds.resolve(name)?;
        if !ds.attributes()[attr].is_quantitative() {
            continue;
        }
        let values: Option<Vec<f64>> = selected.iter().map(|r| ds.number(attr, *r)).collect();
        let Some(values) = values else { continue };
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let extension = ctx
            .exec
            .filter_map_range(ds.row_count(), |r| {
                (visible[r] && ds.number(attr, r).is_some_and(|v| v >= lo && v <= hi)).then_some(r)
            })
            .len();
        let exact = extension == n_sel;
        out.push(ctx.candidate(
            CandidateKind::Filter,
            template,
            Some(name.to_string()),
            make(FilterForm::Range { attribute: name.to_string(), lo, hi, exclude: true }),
            Evidence {
                type_affinity: if exact { 1.0 } else { 0.5 },
                separation: n_sel as f64 / extension as f64,
                parsimony: 1.0,
                extension: Some(extension),
            },
        ));
    }

    let attrs: Vec<usize> = (0..ds.attributes().len()).filter(|a| ds.attributes()[*a].is_categorical_like()).collect();
    let value_sets = ctx.exec.map(&attrs, |attr| {
        let attr = *attr;
        let a = &ds.attributes()[attr];
        let codes: Option<BTreeSet<u32>> = selected.iter().map(|r| ds.code(attr, *r)).collect();
        let codes = codes?;
        let exact = (0..ds.row_count())
            .filter(|r| visible[*r] && ds.code(attr, *r).is_some_and(|c| codes.contains(&c)))
            .eq(selected.iter().copied());
        if !exact {
            return None;
        }
        let values = (0..a.categories.len() as u32)
            .filter(|c| !codes.contains(c))
            .map(|c| a.categories[c as usize].clone())
            .collect();
        Some(ctx.candidate(
            CandidateKind::Filter,
            Template::ValueSet,
            Some(a.name.clone()),
            make(FilterForm::ValueSet { attribute: a.name.clone(), values }),
            Evidence {
                type_affinity: 1.0,
                separation: 1.0,
                parsimony: 1.0 / codes.len() as f64,
                extension: Some(n_sel),
            },
        ))
    });
    out.extend(value_sets.into_iter().flatten());
    rank(&mut out);
    Ok(out)
}
