//! Top-down piecewise linear regression baseline.
//!
//! Starting from one segment, repeatedly split the segment with the largest
//! least-squares line error at the point that minimises the children's
//! total error. Each segment gets its own line; neighbouring lines need not
//! meet. Segment errors come from prefix sums in constant time. Consecutive
//! segments with the same endpoint sign are merged afterwards so the result
//! can be scored as an alternating monotone segmentation.

use crate::error::{Error, Result};
use crate::series::{check_boundaries, omafe_segmentation, Segmentation, Series};

/// Prefix sums of `1, x, x², y, xy, y²`; entry `i` sums samples `0..i`.
///
/// Each sum also carries its rounding residue so that range sums and their
/// centred moments stay accurate when the prefix values dwarf the range.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeMoments {
    pub count: Vec<f64>,
    pub sum_x: Vec<f64>,
    pub sum_xx: Vec<f64>,
    pub sum_y: Vec<f64>,
    pub sum_xy: Vec<f64>,
    pub sum_yy: Vec<f64>,
    residue: [Vec<f64>; 5],
}

/// Sums over one range, read off the prefix arrays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSums {
    pub count: f64,
    pub x: f64,
    pub xx: f64,
    pub y: f64,
    pub xy: f64,
    pub yy: f64,
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, Default)]
struct Wide {
    hi: f64,
    lo: f64,
}

impl Wide {
    fn exact(v: f64) -> Self {
        Wide { hi: v, lo: 0.0 }
    }

    fn product(a: f64, b: f64) -> Self {
        let hi = a * b;
        Wide {
            hi,
            lo: a.mul_add(b, -hi),
        }
    }

    fn add(self, other: Wide) -> Self {
        let (s, e) = two_sum(self.hi, other.hi);
        let (hi, lo) = quick_two_sum(s, e + self.lo + other.lo);
        Wide { hi, lo }
    }

    fn neg(self) -> Self {
        Wide {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn mul(self, other: Wide) -> Self {
        let p = Wide::product(self.hi, other.hi);
        let (hi, lo) = quick_two_sum(p.hi, p.lo + self.hi * other.lo + self.lo * other.hi);
        Wide { hi, lo }
    }

    fn div(self, d: f64) -> Self {
        let q = self.hi / d;
        let r = self.add(Wide::product(q, d).neg());
        let (hi, lo) = quick_two_sum(q, r.hi / d);
        Wide { hi, lo }
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

impl RangeMoments {
    pub fn new(series: &Series) -> Self {
        let n = series.len();
        let column = || {
            let mut v = Vec::with_capacity(n + 1);
            v.push(0.0);
            v
        };
        let mut m = RangeMoments {
            count: column(),
            sum_x: column(),
            sum_xx: column(),
            sum_y: column(),
            sum_xy: column(),
            sum_yy: column(),
            residue: [column(), column(), column(), column(), column()],
        };
        let mut acc = [Wide::default(); 5];
        for (i, &y) in series.values().iter().enumerate() {
            let x = series.x(i);
            let terms = [
                Wide::exact(x),
                Wide::product(x, x),
                Wide::exact(y),
                Wide::product(x, y),
                Wide::product(y, y),
            ];
            for (a, t) in acc.iter_mut().zip(terms) {
                *a = a.add(t);
            }
            m.count.push((i + 1) as f64);
            m.sum_x.push(acc[0].hi);
            m.sum_xx.push(acc[1].hi);
            m.sum_y.push(acc[2].hi);
            m.sum_xy.push(acc[3].hi);
            m.sum_yy.push(acc[4].hi);
            for (r, a) in m.residue.iter_mut().zip(&acc) {
                r.push(a.lo);
            }
        }
        m
    }

    /// Number of samples covered.
    pub fn len(&self) -> usize {
        self.count.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check(&self, start: usize, end: usize) -> Result<()> {
        if start >= end || end > self.len() {
            return Err(Error::EmptyRange { start, end });
        }
        Ok(())
    }

    fn wide_range(&self, start: usize, end: usize) -> [Wide; 5] {
        let sums = [
            &self.sum_x,
            &self.sum_xx,
            &self.sum_y,
            &self.sum_xy,
            &self.sum_yy,
        ];
        std::array::from_fn(|k| {
            let at = |i: usize| Wide {
                hi: sums[k][i],
                lo: self.residue[k][i],
            };
            at(end).add(at(start).neg())
        })
    }

    /// Sums over samples `start..end`.
    pub fn range(&self, start: usize, end: usize) -> Result<RangeSums> {
        self.check(start, end)?;
        let [x, xx, y, xy, yy] = self.wide_range(start, end).map(Wide::value);
        Ok(RangeSums {
            count: (end - start) as f64,
            x,
            xx,
            y,
            xy,
            yy,
        })
    }

    /// Residual sum of squares of the least-squares line over samples
    /// `start..end`.
    pub fn sse(&self, start: usize, end: usize) -> Result<f64> {
        self.check(start, end)?;
        if end - start <= 2 {
            return Ok(0.0);
        }
        let c = (end - start) as f64;
        let [x, xx, y, xy, yy] = self.wide_range(start, end);
        // Centred second moments.
        let sxx = xx.add(x.mul(x).div(c).neg()).value();
        let sxy = xy.add(x.mul(y).div(c).neg()).value();
        let syy = yy.add(y.mul(y).div(c).neg()).value();
        if sxx <= 0.0 {
            return Ok(syy.max(0.0));
        }
        Ok((syy - sxy * sxy / sxx).max(0.0))
    }
}

pub fn build_moments(series: &Series) -> RangeMoments {
    RangeMoments::new(series)
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    /// First and last sample, inclusive.
    start: usize,
    end: usize,
    sse: f64,
}

impl Piece {
    fn new(moments: &RangeMoments, start: usize, end: usize) -> Self {
        let sse = moments.sse(start, end + 1).unwrap_or(0.0);
        Self { start, end, sse }
    }

    fn splittable(&self) -> bool {
        self.end - self.start >= 2
    }
}

/// Best split point of `piece` and the children's total error. Smallest
/// index on ties.
fn best_split(moments: &RangeMoments, piece: &Piece) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for c in piece.start + 1..piece.end {
        let left = moments.sse(piece.start, c + 1).ok()?;
        let right = moments.sse(c, piece.end + 1).ok()?;
        let total = left + right;
        if best.is_none_or(|(_, t)| total < t) {
            best = Some((c, total));
        }
    }
    best
}

/// Boundaries of a top-down linear spline with at most `budget` pieces.
///
/// Adjacent pieces share their boundary sample. A piece of two samples
/// cannot be split; splitting stops early when no piece can.
pub fn topdown_spline(series: &Series, budget: usize) -> Result<Vec<usize>> {
    let mut last = Vec::new();
    grow(series, budget, |b| last = b)?;
    Ok(last)
}

/// Boundaries after each split: entry `k - 1` holds the spline for budget
/// `k`, for every `k` in `1..=max_budget`.
pub fn topdown_splines(series: &Series, max_budget: usize) -> Result<Vec<Vec<usize>>> {
    let mut all = Vec::with_capacity(max_budget);
    grow(series, max_budget, |b| all.push(b))?;
    while all.len() < max_budget {
        let last = all[all.len() - 1].clone();
        all.push(last);
    }
    Ok(all)
}

/// Runs the greedy splitting, reporting the boundaries after every step.
fn grow(series: &Series, budget: usize, mut report: impl FnMut(Vec<usize>)) -> Result<()> {
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    let n = series.len();
    if n < 2 {
        return Err(Error::TooShort { needed: 2, got: n });
    }
    let moments = RangeMoments::new(series);
    let boundaries = |pieces: &[Piece]| {
        let mut b: Vec<usize> = pieces.iter().map(|p| p.start).collect();
        b.push(n - 1);
        b
    };
    // Kept in position order.
    let mut pieces = vec![Piece::new(&moments, 0, n - 1)];
    report(boundaries(&pieces));
    for _ in 1..budget {
        let worst = pieces
            .iter()
            .enumerate()
            .filter(|(_, p)| p.splittable())
            .fold(None::<(usize, f64)>, |acc, (i, p)| match acc {
                Some((_, sse)) if p.sse <= sse => acc,
                _ => Some((i, p.sse)),
            });
        let Some((at, _)) = worst else { break };
        let piece = pieces[at];
        let Some((split, _)) = best_split(&moments, &piece) else {
            break;
        };
        pieces[at] = Piece::new(&moments, piece.start, split);
        pieces.insert(at + 1, Piece::new(&moments, split, piece.end));
        report(boundaries(&pieces));
    }
    Ok(())
}

/// Merges runs of consecutive segments whose endpoint differences share a
/// sign (zero counts as positive) and scores the result.
pub fn aggregate_signs(series: &Series, boundaries: &[usize]) -> Result<Segmentation> {
    let values = series.values();
    check_boundaries(values.len(), boundaries)?;
    if boundaries.len() <= 2 {
        return omafe_segmentation(values, boundaries);
    }
    let rising = |w: &[usize]| values[w[1]] >= values[w[0]];
    let mut merged = vec![boundaries[0]];
    let signs: Vec<bool> = boundaries.windows(2).map(rising).collect();
    for (k, pair) in signs.windows(2).enumerate() {
        if pair[0] != pair[1] {
            merged.push(boundaries[k + 1]);
        }
    }
    merged.push(boundaries[boundaries.len() - 1]);
    omafe_segmentation(values, &merged)
}
