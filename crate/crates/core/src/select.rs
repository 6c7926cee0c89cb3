//! From a scale labelling to an optimal segmentation under a segment budget.
//!
//! Keeping only the extrema labelled at or above a threshold yields an
//! alternating sequence; segmenting at those extrema (with the first and
//! last replaced by the series endpoints) is optimal for its segment count.
//! The threshold is the smallest label value that keeps at most `K + 1`
//! extrema.
//!
//! That count can fall short of the budget. Keeping the first or last
//! selected extremum as a boundary, instead of replacing it by the series
//! endpoint, spends one more segment on the stretch before the first (or
//! after the last) significant extremum. [`select_optimal`] weighs the
//! plain selection against those variants and keeps the best.

use crate::error::{Error, Result};
use crate::scale::{scale_label, LabelledExtremum};
use crate::series::{omafe_segmentation, Direction, Segmentation, Series};

/// Boundaries chosen for a budget, in deduplicated index space.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub boundaries: Vec<usize>,
    /// Smallest kept label, or `None` when falling back to one segment.
    pub threshold: Option<f64>,
}

impl Selection {
    fn single(n: usize) -> Self {
        Self {
            boundaries: vec![0, n - 1],
            threshold: None,
        }
    }
}

/// The `capacity` largest labels as `(scale, position)`, by decreasing
/// scale. Sorted insertion into a bounded list: `O(n * capacity)` time,
/// `O(capacity)` memory.
fn top_labels(labels: &[LabelledExtremum], capacity: usize) -> Vec<(f64, usize)> {
    let mut top: Vec<(f64, usize)> = Vec::with_capacity(capacity + 1);
    for l in labels {
        if top.len() == capacity && l.scale <= top[capacity - 1].0 {
            continue;
        }
        let at = top.partition_point(|(s, _)| *s >= l.scale);
        top.insert(at, (l.scale, l.index));
        top.truncate(capacity);
    }
    top
}

/// Picks at most `budget + 1` boundaries from a labelling of a deduplicated
/// sequence of length `n`.
///
/// Keeps the `budget + 2` largest labels, then drops every entry sharing the
/// smallest kept scale, unless all extrema fit in the budget already. The
/// first and last survivors are replaced by `0` and `n - 1`.
pub fn select_boundaries(
    labels: &[LabelledExtremum],
    n: usize,
    budget: usize,
) -> Result<Selection> {
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    if n == 0 {
        return Err(Error::EmptySeries);
    }
    let mut top = top_labels(labels, budget + 2);
    if labels.len() > budget + 1 {
        let cut = top[top.len() - 1].0;
        top.retain(|(s, _)| *s > cut);
    }
    if top.len() < 2 {
        return Ok(Selection::single(n));
    }
    let threshold = top[top.len() - 1].0;
    let mut boundaries: Vec<usize> = top.into_iter().map(|(_, i)| i).collect();
    boundaries.sort_unstable();
    let last = boundaries.len() - 1;
    boundaries[0] = 0;
    boundaries[last] = n - 1;
    Ok(Selection {
        boundaries,
        threshold: Some(threshold),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ends {
    Replace,
    KeepFirst,
    KeepLast,
    KeepBoth,
}

impl Ends {
    const ALL: [Ends; 4] = [
        Ends::Replace,
        Ends::KeepFirst,
        Ends::KeepLast,
        Ends::KeepBoth,
    ];

    fn keeps_first(self) -> bool {
        matches!(self, Ends::KeepFirst | Ends::KeepBoth)
    }

    fn keeps_last(self) -> bool {
        matches!(self, Ends::KeepLast | Ends::KeepBoth)
    }
}

/// Boundaries from sorted significant positions, with the ends either
/// replaced by the sequence endpoints or kept in addition to them.
fn boundaries_for(selected: &[usize], n: usize, ends: Ends) -> Vec<usize> {
    let m = selected.len();
    let mut out = Vec::with_capacity(m + 2);
    out.push(0);
    if ends.keeps_first() && selected[0] != 0 {
        out.push(selected[0]);
    }
    out.extend_from_slice(&selected[1..m - 1]);
    if ends.keeps_last() && selected[m - 1] != n - 1 {
        out.push(selected[m - 1]);
    }
    out.push(n - 1);
    out
}

fn alternating(values: &[f64], boundaries: &[usize]) -> bool {
    if boundaries.len() <= 2 {
        return true;
    }
    let mut previous = Direction::Flat;
    for w in boundaries.windows(2) {
        let d = Direction::between(values[w[0]], values[w[1]]);
        if d == Direction::Flat || d == previous {
            return false;
        }
        previous = d;
    }
    true
}

/// Optimal alternating segmentation boundaries for at most `budget`
/// segments over a deduplicated sequence.
///
/// For the plain threshold selection and for each way of keeping the first
/// and/or last significant extremum, takes the smallest threshold whose
/// segmentation fits the budget and alternates, then returns the candidate
/// with the lowest OMAFE. Ties keep the plain selection. `O(n K)` time.
pub fn select_optimal(
    values: &[f64],
    labels: &[LabelledExtremum],
    budget: usize,
) -> Result<Selection> {
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    let n = values.len();
    if n == 0 {
        return Err(Error::EmptySeries);
    }
    if n == 1 {
        return Ok(Selection::single(1));
    }

    // Threshold classes whose members all fit in the budget: `(scale, end)`
    // where `top[..end]` holds every label at or above `scale`.
    let top = top_labels(labels, budget + 2);
    let mut classes: Vec<(f64, usize)> = Vec::new();
    for (i, (scale, _)) in top.iter().enumerate() {
        let closes_class = i + 1 == top.len() || top[i + 1].0 != *scale;
        if closes_class && i < budget + 1 {
            classes.push((*scale, i + 1));
        }
    }

    let mut candidates: Vec<Selection> = Vec::with_capacity(Ends::ALL.len() + 1);
    for ends in Ends::ALL {
        // Smallest thresholds first.
        for &(scale, end) in classes.iter().rev() {
            let mut selected: Vec<usize> = top[..end].iter().map(|(_, i)| *i).collect();
            if selected.len() < 2 {
                continue;
            }
            selected.sort_unstable();
            let boundaries = boundaries_for(&selected, n, ends);
            if boundaries.len() - 1 > budget || !alternating(values, &boundaries) {
                continue;
            }
            if !candidates.iter().any(|c| c.boundaries == boundaries) {
                candidates.push(Selection {
                    boundaries,
                    threshold: Some(scale),
                });
            }
            break;
        }
    }
    if candidates.is_empty() {
        return Ok(Selection::single(n));
    }
    if candidates.len() == 1 {
        return Ok(candidates.pop().unwrap());
    }

    let mut best: Option<(f64, Selection)> = None;
    for c in candidates {
        let omafe = omafe_segmentation(values, &c.boundaries)?.omafe;
        if best.as_ref().is_none_or(|(e, _)| omafe < *e) {
            best = Some((omafe, c));
        }
    }
    Ok(best.map(|(_, c)| c).unwrap())
}

/// Result of [`segment`] together with the selection threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentResult {
    pub segmentation: Segmentation,
    pub threshold: Option<f64>,
}

/// Optimal alternating segmentation of `series` into at most `budget`
/// segments.
pub fn segment(series: &Series, budget: usize) -> Result<Segmentation> {
    Segmenter::new(series)
        .segment(budget)
        .map(|r| r.segmentation)
}

/// Labelling computed once, reusable across budgets.
#[derive(Debug, Clone)]
pub struct Segmenter<'a> {
    series: &'a Series,
    deduped: Vec<f64>,
    origin: Vec<usize>,
    labels: Vec<LabelledExtremum>,
}

impl<'a> Segmenter<'a> {
    pub fn new(series: &'a Series) -> Self {
        let d = series.dedup();
        let labels = scale_label(&d);
        Self {
            series,
            deduped: d.values,
            origin: d.origin,
            labels,
        }
    }

    pub fn labels(&self) -> &[LabelledExtremum] {
        &self.labels
    }

    pub fn segment(&self, budget: usize) -> Result<SegmentResult> {
        let selection = select_optimal(&self.deduped, &self.labels, budget)?;
        let n = self.series.len();
        let mut boundaries: Vec<usize> = selection
            .boundaries
            .iter()
            .map(|&i| self.origin[i])
            .collect();
        // A trailing run of equal values belongs to the last segment.
        if let Some(last) = boundaries.last_mut() {
            *last = n - 1;
        }
        if n == 1 {
            boundaries = vec![0, 0];
        }
        let segmentation = omafe_segmentation(self.series.values(), &boundaries)?;
        Ok(SegmentResult {
            segmentation,
            threshold: selection.threshold,
        })
    }

    /// OMAFE for every budget in `1..=max_budget`.
    pub fn spectrum(&self, max_budget: usize) -> Result<Vec<SpectrumPoint>> {
        if max_budget == 0 {
            return Err(Error::ZeroBudget);
        }
        (1..=max_budget)
            .map(|k| {
                let s = self.segment(k)?.segmentation;
                Ok(SpectrumPoint {
                    k,
                    omafe: s.omafe,
                    segments_used: s.segment_count(),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub k: usize,
    pub omafe: f64,
    pub segments_used: usize,
}

/// OMAFE as a function of the segment budget, for budgets `1..=max_budget`.
pub fn spectrum(series: &Series, max_budget: usize) -> Result<Vec<SpectrumPoint>> {
    Segmenter::new(series).spectrum(max_budget)
}
