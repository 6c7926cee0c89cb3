//! Segmentation of numeric sequences into alternating quasi-monotonic
//! segments with minimal monotone approximation error, plus a top-down
//! linear-regression baseline.

pub mod cli;
pub mod error;
#[cfg(any(test, feature = "oracle"))]
pub mod oracle;
pub mod scale;
pub mod select;
pub mod series;
pub mod topdown;

pub use error::{Error, Result};
pub use scale::{scale_label, LabelledExtremum};
pub use select::{
    segment, select_boundaries, select_optimal, spectrum, SegmentResult, Segmenter, Selection,
    SpectrumPoint,
};
pub use series::{
    dedup, find_extrema, monotone_fit, omafe_segment, omafe_segmentation, DedupedSeries, Direction,
    Extremum, ExtremumKind, MonotoneEnvelope, Segmentation, Series,
};
pub use topdown::{aggregate_signs, build_moments, topdown_spline, topdown_splines, RangeMoments};
