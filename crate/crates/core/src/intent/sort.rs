use super::{rank, BarTarget, Candidate, CandidateKind, Evidence, IntentContext, Template};
use crate::data::Datum;
use crate::error::{Error, Result};
use crate::spec::{bar_layout, order_bars, Channel, SortDirection, SortState, SpecChange};

/// One candidate per (quantitative attribute, direction) whose sort lands the
/// dragged bar at the demonstrated extreme. The category-axis attribute is
/// never offered; the current Y attribute comes first when it qualifies.
pub fn infer_sort_candidates(ctx: &IntentContext, category: &Datum, target: BarTarget) -> Result<Vec<Candidate>> {
    let ds = ctx.dataset;
    let spec = ctx.spec;
    if !spec.vis_type.is_bar() {
        return Err(Error::WrongVisType(spec.vis_type));
    }
    let x_name = spec.attribute_on(Channel::X).ok_or(Error::MissingAxes)?;
    let x = ds.resolve(x_name)?;
    let visible = ctx.visible()?;
    let bars = bar_layout(spec, ds, &visible)?;
    let code = ds.attributes()[x]
        .category_index(category)
        .map(|c| c as u32)
        .filter(|c| bars.iter().any(|b| b.code == *c))
        .ok_or_else(|| Error::UnknownCategory(category.to_string()))?;

    let attrs: Vec<usize> =
        (0..ds.attributes().len()).filter(|a| *a != x && ds.attributes()[*a].is_quantitative()).collect();
    let found = ctx.exec.map(&attrs, |attr| {
        let name = &ds.attributes()[*attr].name;
        [(SortDirection::Ascending, Template::SortAscending), (SortDirection::Descending, Template::SortDescending)]
            .into_iter()
            .filter_map(|(direction, template)| {
                let mut ordered = bars.clone();
                order_bars(&mut ordered, ds, *attr, direction);
                let landed = match target {
                    BarTarget::ExtremeLeft => ordered.first(),
                    BarTarget::ExtremeRight => ordered.last(),
                };
                landed.is_some_and(|b| b.code == code).then(|| {
                    ctx.candidate(
                        CandidateKind::Sort,
                        template,
                        Some(name.clone()),
                        SpecChange::SetSort { sort: SortState::new(name.clone(), direction) },
                        Evidence { type_affinity: 0.5, separation: 1.0, parsimony: 1.0, extension: None },
                    )
                })
            })
            .collect::<Vec<_>>()
    });
    let mut out: Vec<Candidate> = found.into_iter().flatten().collect();
    rank(&mut out);
    if let Some(y) = spec.attribute_on(Channel::Y) {
        // stable partition: current Y attribute first
        out.sort_by_key(|c| c.attribute.as_deref() != Some(y));
    }
    Ok(out)
}
