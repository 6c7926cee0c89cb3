//! Sampled functions, extrema and the monotone approximation error (OMAFE).
//!
//! The best monotone approximation of a segment in the max-norm is the
//! midpoint of two envelopes. For an increasing fit the upper envelope is the
//! running maximum of past values and the lower envelope the running minimum
//! of values to come; a decreasing fit swaps the roles. Half the largest gap
//! between the envelopes is the approximation error.
//!
//! Values are compared exactly. No tolerance is applied anywhere here.

use crate::error::{Error, Result};

/// A sampled function over strictly increasing abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    xs: Option<Vec<f64>>,
    ys: Vec<f64>,
}

impl Series {
    /// Builds a series with implicit abscissae `0..n`.
    pub fn new(ys: Vec<f64>) -> Result<Self> {
        check_values(&ys)?;
        Ok(Self { xs: None, ys })
    }

    pub fn with_abscissae(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        check_values(&ys)?;
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch {
                xs: xs.len(),
                ys: ys.len(),
            });
        }
        if let Some(index) = xs.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if let Some(w) = xs.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::UnorderedAbscissae { index: w + 1 });
        }
        Ok(Self { xs: Some(xs), ys })
    }

    pub fn len(&self) -> usize {
        self.ys.len()
    }

    /// Always false; a series holds at least one sample.
    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.ys
    }

    /// Abscissa of sample `i`.
    pub fn x(&self, i: usize) -> f64 {
        match &self.xs {
            Some(xs) => xs[i],
            None => i as f64,
        }
    }

    pub fn has_explicit_abscissae(&self) -> bool {
        self.xs.is_some()
    }

    pub fn dedup(&self) -> DedupedSeries {
        dedup(&self.ys)
    }

    /// Keeps the first `cap` samples.
    pub fn truncate(&mut self, cap: usize) {
        let cap = cap.max(1);
        self.ys.truncate(cap);
        if let Some(xs) = &mut self.xs {
            xs.truncate(cap);
        }
    }
}

fn check_values(ys: &[f64]) -> Result<()> {
    if ys.is_empty() {
        return Err(Error::EmptySeries);
    }
    if let Some(index) = ys.iter().position(|y| !y.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Ok(())
}

/// Ordinates with runs of equal consecutive values collapsed to their first
/// element.
#[derive(Debug, Clone, PartialEq)]
pub struct DedupedSeries {
    pub values: Vec<f64>,
    /// Source index of each retained value.
    pub origin: Vec<usize>,
}

impl DedupedSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Collapses each run of equal consecutive values to its first element.
pub fn dedup(values: &[f64]) -> DedupedSeries {
    let mut kept = Vec::with_capacity(values.len());
    let mut origin = Vec::with_capacity(values.len());
    for (i, &v) in values.iter().enumerate() {
        if kept.last() != Some(&v) {
            kept.push(v);
            origin.push(i);
        }
    }
    DedupedSeries {
        values: kept,
        origin,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Increasing,
    Decreasing,
    /// Endpoint values are equal.
    Flat,
}

impl Direction {
    /// Direction of a segment from its endpoint values.
    pub fn between(first: f64, last: f64) -> Self {
        if last > first {
            Direction::Increasing
        } else if last < first {
            Direction::Decreasing
        } else {
            Direction::Flat
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Direction::Increasing => Direction::Decreasing,
            Direction::Decreasing => Direction::Increasing,
            Direction::Flat => Direction::Flat,
        }
    }

    /// Short name used in reports: `inc`, `dec` or `flat`.
    pub fn short_name(self) -> &'static str {
        match self {
            Direction::Increasing => "inc",
            Direction::Decreasing => "dec",
            Direction::Flat => "flat",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtremumKind {
    Minimum,
    Maximum,
    /// The only sample of a one-sample sequence.
    Level,
}

impl ExtremumKind {
    pub fn short_name(self) -> &'static str {
        match self {
            ExtremumKind::Minimum => "min",
            ExtremumKind::Maximum => "max",
            ExtremumKind::Level => "level",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Extremum {
    /// Position in the deduplicated sequence.
    pub index: usize,
    pub kind: ExtremumKind,
}

/// Lists the strict local extrema of a sequence without consecutive repeats.
///
/// Endpoints are always extrema; their kind follows from their single
/// neighbour. Kinds alternate along the output.
pub fn find_extrema(values: &[f64]) -> Vec<Extremum> {
    let n = values.len();
    match n {
        0 => return Vec::new(),
        1 => {
            return vec![Extremum {
                index: 0,
                kind: ExtremumKind::Level,
            }]
        }
        _ => {}
    }
    let mut out = Vec::new();
    for i in 0..n {
        let above_left = i == 0 || values[i] > values[i - 1];
        let above_right = i == n - 1 || values[i] > values[i + 1];
        let below_left = i == 0 || values[i] < values[i - 1];
        let below_right = i == n - 1 || values[i] < values[i + 1];
        if above_left && above_right {
            out.push(Extremum {
                index: i,
                kind: ExtremumKind::Maximum,
            });
        } else if below_left && below_right {
            out.push(Extremum {
                index: i,
                kind: ExtremumKind::Minimum,
            });
        }
    }
    out
}

/// Upper and lower monotone envelopes and their midpoint fit.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneEnvelope {
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub fit: Vec<f64>,
    pub error: f64,
}

/// Best monotone approximation of `values` in the max-norm.
pub fn monotone_fit(values: &[f64], direction: Direction) -> Result<MonotoneEnvelope> {
    if values.is_empty() {
        return Err(Error::EmptySeries);
    }
    let (upper, lower) = match direction {
        Direction::Increasing => (prefix_max(values), suffix_min(values)),
        Direction::Decreasing => (suffix_max(values), prefix_min(values)),
        Direction::Flat => return Err(Error::FlatDirection),
    };
    let fit: Vec<f64> = upper
        .iter()
        .zip(&lower)
        .map(|(u, l)| midpoint(*u, *l))
        .collect();
    let error = upper
        .iter()
        .zip(&lower)
        .map(|(u, l)| (u - l) / 2.0)
        .fold(0.0, f64::max);
    Ok(MonotoneEnvelope {
        upper,
        lower,
        fit,
        error,
    })
}

fn midpoint(a: f64, b: f64) -> f64 {
    (a + b) / 2.0
}

fn prefix_max(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .scan(f64::NEG_INFINITY, |m, &v| {
            *m = m.max(v);
            Some(*m)
        })
        .collect()
}

fn prefix_min(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .scan(f64::INFINITY, |m, &v| {
            *m = m.min(v);
            Some(*m)
        })
        .collect()
}

fn suffix_max(values: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = values
        .iter()
        .rev()
        .scan(f64::NEG_INFINITY, |m, &v| {
            *m = m.max(v);
            Some(*m)
        })
        .collect();
    out.reverse();
    out
}

fn suffix_min(values: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = values
        .iter()
        .rev()
        .scan(f64::INFINITY, |m, &v| {
            *m = m.min(v);
            Some(*m)
        })
        .collect();
    out.reverse();
    out
}

/// Error of the best monotone fit without materialising the envelopes.
///
/// The largest envelope gap is the largest violating drop (or rise) between
/// an earlier and a later sample, so one pass with a running extreme is
/// enough. Yields the same value as [`monotone_fit`] bit for bit.
pub(crate) fn monotone_error(values: &[f64], direction: Direction) -> f64 {
    let mut worst = 0.0_f64;
    match direction {
        Direction::Increasing => {
            let mut high = f64::NEG_INFINITY;
            for &v in values {
                high = high.max(v);
                worst = worst.max(high - v);
            }
        }
        Direction::Decreasing => {
            let mut low = f64::INFINITY;
            for &v in values {
                low = low.min(v);
                worst = worst.max(v - low);
            }
        }
        Direction::Flat => return flat_error(values),
    }
    worst / 2.0
}

fn flat_error(values: &[f64]) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    (hi - lo) / 2.0
}

/// Direction and OMAFE of a single segment.
///
/// The direction is the sign of last minus first value. A segment without
/// direction is approximated by its midrange, with error half its range.
pub fn omafe_segment(values: &[f64]) -> Result<(Direction, f64)> {
    let (first, last) = match (values.first(), values.last()) {
        (Some(f), Some(l)) => (*f, *l),
        _ => return Err(Error::EmptySeries),
    };
    let direction = Direction::between(first, last);
    Ok((direction, monotone_error(values, direction)))
}

/// Midrange level used to approximate a segment without direction.
pub fn flat_level(values: &[f64]) -> Option<f64> {
    let lo = values.iter().copied().reduce(f64::min)?;
    let hi = values.iter().copied().reduce(f64::max)?;
    Some(midpoint(lo, hi))
}

/// Segmentation of a series into consecutive segments sharing their
/// boundary samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    /// Source indices; segment `k` covers `boundaries[k]..=boundaries[k + 1]`.
    pub boundaries: Vec<usize>,
    pub directions: Vec<Direction>,
    pub segment_omafe: Vec<f64>,
    pub omafe: f64,
}

impl Segmentation {
    pub fn segment_count(&self) -> usize {
        self.directions.len()
    }
}

/// Validates boundary indices for a series of length `n`.
///
/// A one-sample series accepts `[0, 0]` as its single degenerate segment.
pub fn check_boundaries(n: usize, boundaries: &[usize]) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptySeries);
    }
    if n == 1 && boundaries == [0, 0] {
        return Ok(());
    }
    if boundaries.len() < 2 {
        return Err(Error::InvalidBoundaries(format!(
            "need at least two boundaries, got {}",
            boundaries.len()
        )));
    }
    if boundaries[0] != 0 {
        return Err(Error::InvalidBoundaries(format!(
            "first boundary must be 0, got {}",
            boundaries[0]
        )));
    }
    let last = boundaries[boundaries.len() - 1];
    if last != n - 1 {
        return Err(Error::InvalidBoundaries(format!(
            "last boundary must be {}, got {last}",
            n - 1
        )));
    }
    if let Some(w) = boundaries.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::InvalidBoundaries(format!(
            "boundaries must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Evaluates a segmentation given by its boundaries. The total OMAFE is the
/// largest per-segment error.
pub fn omafe_segmentation(values: &[f64], boundaries: &[usize]) -> Result<Segmentation> {
    check_boundaries(values.len(), boundaries)?;
    let mut directions = Vec::with_capacity(boundaries.len() - 1);
    let mut segment_omafe = Vec::with_capacity(boundaries.len() - 1);
    for w in boundaries.windows(2) {
        let (direction, error) = omafe_segment(&values[w[0]..=w[1]])?;
        directions.push(direction);
        segment_omafe.push(error);
    }
    let omafe = segment_omafe.iter().copied().fold(0.0, f64::max);
    Ok(Segmentation {
        boundaries: boundaries.to_vec(),
        directions,
        segment_omafe,
        omafe,
    })
}
