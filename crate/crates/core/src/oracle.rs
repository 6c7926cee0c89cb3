//! Brute-force reference implementations for tests.
//!
//! Everything here favours being obviously correct over being fast:
//! quadratic pair scans for the approximation error, literal enumeration of
//! pairs for the scale labelling, exhaustive search over boundary subsets
//! for optimal alternating segmentations.

use crate::error::{Error, Result};
use crate::scale::LabelledExtremum;
use crate::series::{find_extrema, DedupedSeries, Direction, ExtremumKind};

/// Largest input accepted by [`best_alternating`].
pub const MAX_ORACLE_LEN: usize = 16;

/// OMAFE by pair enumeration: half the largest violating difference between
/// an earlier and a later sample. For `Flat`, half the largest difference of
/// any pair.
pub fn omafe_pairwise(values: &[f64], direction: Direction) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptySeries);
    }
    let mut worst = 0.0_f64;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            let violation = match direction {
                Direction::Increasing => values[i] - values[j],
                Direction::Decreasing => values[j] - values[i],
                Direction::Flat => (values[i] - values[j]).abs(),
            };
            worst = worst.max(violation);
        }
    }
    Ok(worst / 2.0)
}

/// Best alternating segmentation with at most `budget` segments, by
/// exhaustive search. Returns its OMAFE and boundaries.
///
/// Multi-segment candidates must have non-flat, alternating directions. The
/// single segment is always a candidate. Ties go to the lexicographically
/// smallest boundary list.
pub fn best_alternating(values: &[f64], budget: usize) -> Result<(f64, Vec<usize>)> {
    let n = values.len();
    if n == 0 {
        return Err(Error::EmptySeries);
    }
    if n > MAX_ORACLE_LEN {
        return Err(Error::OracleTooLarge {
            n,
            limit: MAX_ORACLE_LEN,
        });
    }
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    if n == 1 {
        return Ok((0.0, vec![0, 0]));
    }

    // error[i][j] for the segment i..=j
    let mut error = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let seg = &values[i..=j];
            let dir = Direction::between(seg[0], seg[seg.len() - 1]);
            error[i][j] = omafe_pairwise(seg, dir)?;
        }
    }

    let interior = n - 2;
    let mut best: Option<(f64, Vec<usize>)> = None;
    for mask in 0u32..(1u32 << interior) {
        if mask.count_ones() as usize >= budget {
            continue;
        }
        let mut boundaries = vec![0];
        boundaries.extend(
            (0..interior)
                .filter(|b| mask & (1 << b) != 0)
                .map(|b| b + 1),
        );
        boundaries.push(n - 1);

        if boundaries.len() > 2 && !alternates(values, &boundaries) {
            continue;
        }
        let omafe = boundaries
            .windows(2)
            .map(|w| error[w[0]][w[1]])
            .fold(0.0, f64::max);
        let better = match &best {
            None => true,
            Some((e, b)) => omafe < *e || (omafe == *e && boundaries < *b),
        };
        if better {
            best = Some((omafe, boundaries));
        }
    }
    Ok(best.expect("the single segment is always a candidate"))
}

fn alternates(values: &[f64], boundaries: &[usize]) -> bool {
    let dirs: Vec<Direction> = boundaries
        .windows(2)
        .map(|w| Direction::between(values[w[0]], values[w[1]]))
        .collect();
    dirs.iter().all(|d| *d != Direction::Flat) && dirs.windows(2).all(|w| w[0] != w[1])
}

/// A pair of positions whose values differ by `scale` with every sample
/// strictly between them valued strictly between the two ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarPair {
    pub start: usize,
    pub end: usize,
    pub scale: f64,
    pub direction: Direction,
    /// Infinitesimal part of the scale under tie-breaking; zero otherwise.
    tie: i64,
}

impl StarPair {
    pub fn contains(&self, other: &StarPair) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    fn larger_than(&self, other: &StarPair) -> bool {
        (self.scale, self.tie) > (other.scale, other.tie)
    }
}

/// Comparison key of a sample: its value, then an infinitesimal offset.
type Key = (f64, i64);

fn exact_keys(values: &[f64]) -> Vec<Key> {
    values.iter().map(|&v| (v, 0)).collect()
}

/// Keys that make each extremum infinitesimally more extreme than every
/// earlier extremum of the same sense and value.
fn tie_broken_keys(values: &[f64]) -> Vec<Key> {
    let mut keys = exact_keys(values);
    if values.len() >= 2 {
        for e in find_extrema(values) {
            let i = e.index as i64;
            keys[e.index].1 = match e.kind {
                ExtremumKind::Maximum => i,
                ExtremumKind::Minimum => -i,
                ExtremumKind::Level => 0,
            };
        }
    }
    keys
}

fn lt(a: Key, b: Key) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

fn pairs_for_keys(keys: &[Key]) -> Vec<StarPair> {
    let mut out = Vec::new();
    for x in 0..keys.len() {
        for y in x + 1..keys.len() {
            let (a, b) = (keys[x], keys[y]);
            if a == b {
                continue;
            }
            let (low, high) = if lt(a, b) { (a, b) } else { (b, a) };
            let inside = keys[x + 1..y].iter().all(|&z| lt(low, z) && lt(z, high));
            if inside {
                let increasing = lt(a, b);
                out.push(StarPair {
                    start: x,
                    end: y,
                    scale: high.0 - low.0,
                    direction: if increasing {
                        Direction::Increasing
                    } else {
                        Direction::Decreasing
                    },
                    tie: high.1 - low.1,
                });
            }
        }
    }
    out
}

fn maximal_among(pairs: &[StarPair]) -> Vec<StarPair> {
    pairs
        .iter()
        .filter(|p| {
            pairs
                .iter()
                .filter(|q| q.direction == p.direction && q.larger_than(p) && q.contains(p))
                .all(|q| {
                    pairs.iter().any(|w| {
                        w.direction == p.direction.opposite() && q.contains(w) && w.contains(p)
                    })
                })
        })
        .copied()
        .collect()
}

/// Every pair of a sequence without consecutive repeats.
pub fn star_pairs(values: &[f64]) -> Vec<StarPair> {
    pairs_for_keys(&exact_keys(values))
}

/// Pairs such that any larger same-direction pair containing them also
/// contains an opposite-direction pair that contains them.
pub fn maximal_pairs(values: &[f64]) -> Vec<StarPair> {
    maximal_among(&star_pairs(values))
}

fn label_from_pairs(d: &DedupedSeries, maximal: &[StarPair]) -> Vec<LabelledExtremum> {
    find_extrema(&d.values)
        .into_iter()
        .map(|e| {
            let best = maximal
                .iter()
                .filter(|p| p.start == e.index || p.end == e.index)
                .fold(None::<&StarPair>, |acc, p| match acc {
                    Some(a) if !p.larger_than(a) => Some(a),
                    _ => Some(p),
                });
            LabelledExtremum {
                index: e.index,
                source_index: d.origin[e.index],
                kind: e.kind,
                scale: best.map_or(f64::NAN, |p| p.scale),
            }
        })
        .collect()
}

/// Scale labelling straight from the definition: each extremum gets the
/// largest scale among the maximal pairs it terminates. Extrema that end no
/// maximal pair are labelled `NaN`.
pub fn definitional_label(d: &DedupedSeries) -> Vec<LabelledExtremum> {
    if d.len() < 2 {
        return Vec::new();
    }
    label_from_pairs(d, &maximal_pairs(&d.values))
}

/// The definitional labelling of the sequence perturbed so that, among
/// equal-valued same-sense extrema, later ones are infinitesimally more
/// extreme. Scales are reported without the infinitesimal part.
pub fn tie_broken_label(d: &DedupedSeries) -> Vec<LabelledExtremum> {
    if d.len() < 2 {
        return Vec::new();
    }
    let pairs = pairs_for_keys(&tie_broken_keys(&d.values));
    label_from_pairs(d, &maximal_among(&pairs))
}

/// Resolves equal-valued same-sense extrema in a definitional labelling.
///
/// Left to right, each extremum `z1` is paired with the next extremum `z2`
/// of the same sense and value. If every extremum strictly between them is
/// labelled below `z1`, then `z2` inherits the larger of the two labels and
/// `z1` takes the largest label of the opposite-sense extrema between them.
/// Later pairs see the labels updated by earlier ones.
pub fn relabel_equal_extrema(values: &[f64], labels: &[LabelledExtremum]) -> Vec<LabelledExtremum> {
    let mut out = labels.to_vec();
    for i in 0..out.len() {
        let z1 = out[i];
        let mut between_max = f64::NEG_INFINITY;
        let mut opposite_max = f64::NEG_INFINITY;
        for j in i + 1..out.len() {
            let z2 = out[j];
            if z2.kind == z1.kind && values[z2.index] == values[z1.index] {
                if between_max < z1.scale {
                    out[j].scale = z2.scale.max(z1.scale);
                    out[i].scale = opposite_max;
                }
                break;
            }
            between_max = between_max.max(z2.scale);
            if z2.kind != z1.kind {
                opposite_max = opposite_max.max(z2.scale);
            }
        }
    }
    out
}
