//! Recommendation sets: ranked, explained candidates grouped into divisions,
//! with a per-item lifecycle.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::data::{fmt_num, Dataset};
use crate::error::{Error, Result};
use crate::intent::{Candidate, CandidateKind};
use crate::spec::{FilterForm, SortDirection, SpecChange};

/// How many recommendations per division are presented by default.
pub const PRESENTED_PER_DIVISION: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Division {
    #[serde(rename = "Recommended Encodings")]
    Encodings,
    #[serde(rename = "Recommended Filters")]
    Filters,
    #[serde(rename = "Recommended Sorts")]
    Sorts,
}

impl From<CandidateKind> for Division {
    fn from(kind: CandidateKind) -> Self {
        match kind {
            CandidateKind::Encoding => Division::Encodings,
            CandidateKind::Filter => Division::Filters,
            CandidateKind::Sort => Division::Sorts,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecState {
    Pending,
    Accepted,
    Rejected,
    Expired,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub rec_id: String,
    /// 1-based position in the full ranked list.
    pub rank: usize,
    pub division: Division,
    pub explanation: String,
    pub score: f64,
    pub state: RecState,
    pub base_revision: u64,
    pub candidate: Candidate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationSet {
    pub set_id: String,
    pub base_revision: u64,
    pub items: Vec<Recommendation>,
}

/// Wire form of one presented recommendation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresentedRecommendation {
    pub rec_id: String,
    pub explanation: String,
    pub score: f64,
    pub change: SpecChange,
    pub state: RecState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresentedDivision {
    pub division: Division,
    pub recommendations: Vec<PresentedRecommendation>,
    /// Size of the division before truncation.
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Presentation {
    pub set_id: String,
    pub base_revision: u64,
    /// Empty when there is nothing to suggest.
    pub divisions: Vec<PresentedDivision>,
}

impl RecommendationSet {
    /// Wraps ranked candidates; ids are `{set_id}.{rank}`.
    pub fn build(set_id: String, base_revision: u64, candidates: Vec<Candidate>, ds: &Dataset) -> Self {
        let items = candidates
            .into_iter()
            .enumerate()
            .map(|(i, candidate)| Recommendation {
                rec_id: format!("{set_id}.{}", i + 1),
                rank: i + 1,
                division: candidate.kind.into(),
                explanation: explain(&candidate, ds),
                score: candidate.score,
                state: RecState::Pending,
                base_revision,
                candidate,
            })
            .collect();
        RecommendationSet { set_id, base_revision, items }
    }

    pub fn get(&self, rec_id: &str) -> Option<&Recommendation> {
        self.items.iter().find(|r| r.rec_id == rec_id)
    }

    pub fn by_rank(&self, rank: usize) -> Option<&Recommendation> {
        rank.checked_sub(1).and_then(|i| self.items.get(i))
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn pending(&self) -> impl Iterator<Item = &Recommendation> {
        self.items.iter().filter(|r| r.state == RecState::Pending)
    }

    /// A pending recommendation that is still valid against `revision`.
    pub fn live(&self, rec_id: &str, revision: u64) -> Result<&Recommendation> {
        let rec = self.get(rec_id).ok_or_else(|| Error::UnknownRecommendation(rec_id.to_string()))?;
        if rec.state != RecState::Pending || rec.base_revision != revision {
            return Err(Error::Expired(rec_id.to_string()));
        }
        Ok(rec)
    }

    pub(crate) fn set_state(&mut self, rec_id: &str, state: RecState) {
        if let Some(r) = self.items.iter_mut().find(|r| r.rec_id == rec_id) {
            r.state = state;
        }
    }

    /// Moves every pending item to `state`.
    pub(crate) fn settle_pending(&mut self, state: RecState) {
        for r in &mut self.items {
            if r.state == RecState::Pending {
                r.state = state;
            }
        }
    }

    /// Grouped view, at most `limit` per division (all when `None`).
    pub fn presentation(&self, limit: Option<usize>) -> Presentation {
        let mut divisions: Vec<PresentedDivision> = Vec::new();
        for division in [Division::Encodings, Division::Filters, Division::Sorts] {
            let members: Vec<&Recommendation> = self.items.iter().filter(|r| r.division == division).collect();
            if members.is_empty() {
                continue;
            }
            divisions.push(PresentedDivision {
                division,
                total: members.len(),
                recommendations: members
                    .into_iter()
                    .take(limit.unwrap_or(usize::MAX))
                    .map(|r| PresentedRecommendation {
                        rec_id: r.rec_id.clone(),
                        explanation: r.explanation.clone(),
                        score: r.score,
                        change: r.candidate.change.clone(),
                        state: r.state,
                    })
                    .collect(),
            });
        }
        Presentation { set_id: self.set_id.clone(), base_revision: self.base_revision, divisions }
    }
}

#[derive(Debug, Deserialize)]
struct Templates {
    color: String,
    size: String,
    point_set: String,
    range_exclude: String,
    range_keep: String,
    value_set: String,
    sort: String,
    value_separator: String,
}

fn templates() -> &'static Templates {
    static TEMPLATES: OnceLock<Templates> = OnceLock::new();
    TEMPLATES.get_or_init(|| {
        toml::from_str(include_str!("../assets/explanations.toml")).expect("bundled explanation templates parse")
    })
}

fn fill(template: &str, vars: &[(&str, String)]) -> String {
    let mut out = template.to_string();
    for (k, v) in vars {
        out = out.replace(&format!("{{{k}}}"), v);
    }
    out
}

/// Natural-language description of a candidate, filled from the bundled templates.
pub fn explain(candidate: &Candidate, ds: &Dataset) -> String {
    let t = templates();
    match &candidate.change {
        SpecChange::SetBinding { binding } => {
            let template = match binding.channel {
                crate::spec::Channel::Size => &t.size,
                _ => &t.color,
            };
            fill(template, &[("attribute", binding.attribute.clone())])
        }
        SpecChange::AddFilter { rule, .. } => match &rule.form {
            FilterForm::PointSet { rows } => fill(&t.point_set, &[("count", rows.len().to_string())]),
            FilterForm::Range { attribute, lo, hi, exclude } => fill(
                if *exclude { &t.range_exclude } else { &t.range_keep },
                &[("attribute", attribute.clone()), ("lo", fmt_num(*lo)), ("hi", fmt_num(*hi))],
            ),
            FilterForm::ValueSet { attribute, values } => {
                let excluded: Vec<String> = ds
                    .attribute(attribute)
                    .map(|a| a.categories.iter().filter(|c| !values.contains(c)).map(|c| c.to_string()).collect())
                    .unwrap_or_default();
                fill(
                    &t.value_set,
                    &[("attribute", attribute.clone()), ("values", excluded.join(&t.value_separator))],
                )
            }
        },
        SpecChange::SetSort { sort } => {
            let direction = match sort.direction {
                SortDirection::Ascending => "ascending",
                SortDirection::Descending => "descending",
                SortDirection::None => "unsorted",
            };
            fill(
                &t.sort,
                &[
                    ("attribute", sort.by_attribute.clone().unwrap_or_default()),
                    ("direction", direction.to_string()),
                ],
            )
        }
        other => serde_json::to_string(other).unwrap_or_default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{load_csv, CsvOptions, Datum};
    use crate::intent::{Evidence, Template};
    use crate::spec::{FilterRule, Provenance, SortState};

    fn mini8() -> Dataset {
        load_csv(include_str!("../../../data/mini8.csv").as_bytes(), &CsvOptions::named("mini8")).unwrap()
    }

    fn cand(kind: CandidateKind, change: SpecChange) -> Candidate {
        Candidate {
            kind,
            template: Template::PointSet,
            attribute: None,
            change,
            score: 0.5,
            evidence: Evidence { type_affinity: 0.5, separation: 0.5, parsimony: 0.5, extension: None },
        }
    }

    fn filter(form: FilterForm) -> SpecChange {
        SpecChange::AddFilter { rule: FilterRule { id: "f1".into(), form, provenance: Provenance::Vbd }, index: None }
    }

    #[test]
    fn explanations() {
        let ds = mini8();
        let sort = cand(
            CandidateKind::Sort,
            SpecChange::SetSort { sort: SortState::new("MPG", SortDirection::Ascending) },
        );
        assert_eq!(explain(&sort, &ds), "Sort bars by MPG, ascending");
        let points = cand(CandidateKind::Filter, filter(FilterForm::PointSet { rows: vec![0, 1, 2] }));
        assert_eq!(explain(&points, &ds), "Filter out the 3 selected points");
        let values = cand(
            CandidateKind::Filter,
            filter(FilterForm::ValueSet {
                attribute: "Cylinders".into(),
                values: vec![Datum::Num(6.0), Datum::Num(8.0)],
            }),
        );
        assert_eq!(explain(&values, &ds), "Filter out points with Cylinders = 4");
        let range = cand(
            CandidateKind::Filter,
            filter(FilterForm::Range { attribute: "Horsepower".into(), lo: 65.0, hi: 80.0, exclude: true }),
        );
        assert_eq!(explain(&range, &ds), "Filter out all points with Horsepower between 65 and 80");
    }

    #[test]
    fn presentation_truncates_per_division() {
        let ds = mini8();
        let cands: Vec<Candidate> = (0..7)
            .map(|_| cand(CandidateKind::Filter, filter(FilterForm::PointSet { rows: vec![1] })))
            .collect();
        let set = RecommendationSet::build("s1.1".into(), 3, cands, &ds);
        assert_eq!(set.items[6].rec_id, "s1.1.7");
        let p = set.presentation(Some(PRESENTED_PER_DIVISION));
        assert_eq!(p.divisions.len(), 1);
        assert_eq!(p.divisions[0].recommendations.len(), 5);
        assert_eq!(p.divisions[0].total, 7);
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains(r#""division":"Recommended Filters""#), "{json}");
        assert_eq!(set.presentation(None).divisions[0].recommendations.len(), 7);
    }

    #[test]
    fn liveness() {
        let ds = mini8();
        let c = cand(CandidateKind::Filter, filter(FilterForm::PointSet { rows: vec![1] }));
        let mut set = RecommendationSet::build("s.1".into(), 2, vec![c], &ds);
        assert!(set.live("s.1.1", 2).is_ok());
        assert_eq!(set.live("s.1.1", 3).unwrap_err(), Error::Expired("s.1.1".into()));
        assert_eq!(set.live("s.1.9", 2).unwrap_err(), Error::UnknownRecommendation("s.1.9".into()));
        set.set_state("s.1.1", RecState::Accepted);
        assert!(set.live("s.1.1", 2).is_err());
    }
}
