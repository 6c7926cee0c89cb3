//! Linear-time scale labelling of extrema.
//!
//! Each extremum is labelled with the largest value difference of the
//! maximal pairs it terminates: the scale down to which it stays
//! significant. The labelling runs over the extrema with a stack in which
//! minima are strictly increasing and maxima strictly decreasing from the
//! bottom up. Whenever a new extremum reaches or passes the second entry
//! from the top, the top two entries close a maximal pair and are labelled.
//!
//! The comparisons are non-strict, so of two equal-valued same-sense
//! extrema with nothing more significant between them, the earlier one
//! takes the scale of the pair it closes with the opposite extremum that
//! follows it. That keeps the significant extrema at any threshold
//! alternating.

use crate::series::{find_extrema, DedupedSeries, Extremum, ExtremumKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelledExtremum {
    /// Position in the deduplicated sequence.
    pub index: usize,
    /// Position in the original series.
    pub source_index: usize,
    pub kind: ExtremumKind,
    pub scale: f64,
}

/// Labels every extremum of `d` with its scale, in position order.
///
/// Returns an empty labelling when `d` has fewer than two samples.
pub fn scale_label(d: &DedupedSeries) -> Vec<LabelledExtremum> {
    let values = &d.values;
    if values.len() < 2 {
        return Vec::new();
    }
    let extrema = find_extrema(values);
    let scales = label_extrema(values, &extrema);
    extrema
        .iter()
        .zip(scales)
        .map(|(e, scale)| LabelledExtremum {
            index: e.index,
            source_index: d.origin[e.index],
            kind: e.kind,
            scale,
        })
        .collect()
}

/// Runs the stack pass; returns one scale per entry of `extrema`.
fn label_extrema(values: &[f64], extrema: &[Extremum]) -> Vec<f64> {
    let mut scales = vec![f64::NAN; extrema.len()];
    // Holds ordinals into `extrema`; the top is the last element.
    let mut stack: Vec<usize> = Vec::with_capacity(16);
    let value = |ordinal: usize| values[extrema[ordinal].index];
    let top_gap = |stack: &[usize]| {
        let len = stack.len();
        (value(stack[len - 1]) - value(stack[len - 2])).abs()
    };

    let mut running_max = f64::NEG_INFINITY;
    let mut running_min = f64::INFINITY;

    for (ordinal, e) in extrema.iter().enumerate() {
        let v = values[e.index];
        let reaches_second = |stack: &[usize]| {
            let second = value(stack[stack.len() - 2]);
            match e.kind {
                ExtremumKind::Minimum => v <= second,
                ExtremumKind::Maximum => v >= second,
                ExtremumKind::Level => false,
            }
        };

        while stack.len() > 2 && reaches_second(&stack) {
            let delta = top_gap(&stack);
            let first = stack.pop().unwrap();
            let second = stack.pop().unwrap();
            scales[first] = delta;
            scales[second] = delta;
        }
        if stack.len() == 2 && reaches_second(&stack) {
            scales[stack[0]] = top_gap(&stack);
            stack.remove(0);
        }
        stack.push(ordinal);

        if cfg!(debug_assertions) {
            running_max = running_max.max(v);
            running_min = running_min.min(v);
            check_stack(&stack, value, running_max, running_min);
        }
    }

    while stack.len() > 2 {
        let delta = top_gap(&stack);
        let first = stack.pop().unwrap();
        scales[first] = delta;
    }
    if stack.len() == 2 {
        let delta = top_gap(&stack);
        scales[stack[0]] = delta;
        scales[stack[1]] = delta;
    }
    debug_assert!(scales.iter().all(|s| *s > 0.0));
    scales
}

/// Stack invariants after a push, checked in O(1).
fn check_stack(stack: &[usize], value: impl Fn(usize) -> f64, max: f64, min: f64) {
    let len = stack.len();
    if len >= 3 {
        // The new top and the entry two below it have the same sense.
        let (top, below) = (value(stack[len - 1]), value(stack[len - 3]));
        let between = value(stack[len - 2]);
        if top > between {
            debug_assert!(top < below, "maxima must decrease up the stack");
        } else {
            debug_assert!(top > below, "minima must increase up the stack");
        }
    }
    if len >= 2 {
        let (a, b) = (value(stack[0]), value(stack[1]));
        debug_assert!(
            (a == max && b == min) || (a == min && b == max),
            "bottom of the stack must hold the running extremes"
        );
    }
}
