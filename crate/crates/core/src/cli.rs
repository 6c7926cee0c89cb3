//! Command-line front end: ingestion, synthetic signals and reports.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::select::Segmenter;
use crate::series::Series;
use crate::topdown::{aggregate_signs, topdown_spline, topdown_splines};

/// Failure of a command, split by exit status.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

fn input_error(e: impl fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Scale of every extremum.
    Label,
    /// Optimal segmentation for one budget.
    Segment,
    /// Error against budget, next to the top-down baseline.
    Spectrum,
    /// Median wall time of both algorithms.
    Bench,
    /// Emit a synthetic series.
    Synth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "monoseg",
    version,
    about = "Quasi-monotonic segmentation of numeric series"
)]
struct Args {
    command: Command,
    /// CSV or one-value-per-line file; `-` reads stdin.
    #[arg(long, value_name = "PATH")]
    input: Option<String>,
    /// Synthetic source, e.g. `piecewise:segments=70,samples=4000,noise=0`.
    #[arg(long, value_name = "SPEC")]
    synth: Option<String>,
    /// Value column, by header name or 0-based index [default: last numeric column].
    #[arg(long, value_name = "NAME|IDX")]
    column: Option<String>,
    /// Keep at most this many samples.
    #[arg(long, value_name = "N")]
    cap: Option<usize>,
    /// Segment budget.
    #[arg(long, value_name = "K")]
    k: Option<usize>,
    /// Largest budget for `spectrum` and `bench`.
    #[arg(long, value_name = "K")]
    kmax: Option<usize>,
    #[arg(long, value_name = "R", default_value_t = 3)]
    repeats: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Seed for synthetic sources.
    #[arg(long, value_name = "S", default_value_t = 0)]
    seed: u64,
    /// Report destination; `-` is stdout.
    #[arg(long, value_name = "PATH|-")]
    output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Index(usize),
    Name(String),
}

impl FromStr for ColumnSelector {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => ColumnSelector::Index(i),
            Err(_) => ColumnSelector::Name(s.to_string()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    Piecewise,
    EcgLike,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub kind: SynthKind,
    pub segments: usize,
    pub samples: usize,
    pub noise: f64,
}

impl FromStr for SynthSpec {
    type Err = CliError;

    /// Parses `kind:key=value,...` with keys `segments`, `samples` and
    /// `noise`.
    fn from_str(s: &str) -> CliResult<Self> {
        let (kind, params) = s.split_once(':').unwrap_or((s, ""));
        let kind = match kind.trim() {
            "piecewise" => SynthKind::Piecewise,
            "ecg-like" => SynthKind::EcgLike,
            other => return Err(CliError::Usage(format!("unknown synthetic kind '{other}'"))),
        };
        let mut spec = SynthSpec {
            kind,
            segments: 10,
            samples: 1000,
            noise: 0.0,
        };
        for item in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let bad = || CliError::Usage(format!("bad synthetic parameter '{item}'"));
            let (key, value) = item.split_once('=').ok_or_else(bad)?;
            match key.trim() {
                "segments" => spec.segments = value.trim().parse().map_err(|_| bad())?,
                "samples" => spec.samples = value.trim().parse().map_err(|_| bad())?,
                "noise" => spec.noise = value.trim().parse().map_err(|_| bad())?,
                _ => return Err(bad()),
            }
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Path(PathBuf),
    Stdin,
    Synth(SynthSpec),
}

/// Validated settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub source: Source,
    pub column: Option<ColumnSelector>,
    pub cap: Option<usize>,
    pub k: Option<usize>,
    pub kmax: Option<usize>,
    pub repeats: usize,
    pub format: Format,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    fn from_args(a: Args) -> CliResult<Self> {
        let source = match (a.input, a.synth) {
            (Some(_), Some(_)) => {
                return Err(CliError::Usage(
                    "give either --input or --synth, not both".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Usage(
                    "an input source is required: --input or --synth".into(),
                ))
            }
            (Some(p), None) if p == "-" => Source::Stdin,
            (Some(p), None) => Source::Path(p.into()),
            (None, Some(s)) => Source::Synth(s.parse()?),
        };
        if a.command == Command::Synth && !matches!(source, Source::Synth(_)) {
            return Err(CliError::Usage("synth needs --synth".into()));
        }
        if a.k == Some(0) || a.kmax == Some(0) {
            return Err(CliError::Usage("K must be at least 1".into()));
        }
        if a.repeats == 0 {
            return Err(CliError::Usage("--repeats must be at least 1".into()));
        }
        if a.cap == Some(0) {
            return Err(CliError::Usage("--cap must be at least 1".into()));
        }
        match a.command {
            Command::Segment if a.k.is_none() => {
                return Err(CliError::Usage("segment needs --k".into()))
            }
            Command::Spectrum if a.kmax.is_none() => {
                return Err(CliError::Usage("spectrum needs --kmax".into()))
            }
            Command::Bench if a.k.is_none() && a.kmax.is_none() => {
                return Err(CliError::Usage("bench needs --k or --kmax".into()))
            }
            _ => {}
        }
        Ok(RunConfig {
            command: a.command,
            source,
            column: a.column.map(|c| c.parse().unwrap()),
            cap: a.cap,
            k: a.k,
            kmax: a.kmax,
            repeats: a.repeats,
            format: a.format,
            seed: a.seed,
            output: a.output.filter(|o| o != "-").map(PathBuf::from),
        })
    }

    /// Budgets covered by `bench`: `--k` alone, else `1..=kmax`.
    fn bench_budgets(&self) -> Vec<usize> {
        match (self.k, self.kmax) {
            (Some(k), _) => vec![k],
            (None, Some(m)) => (1..=m).collect(),
            (None, None) => Vec::new(),
        }
    }
}

/// Parses `text` as CSV or one value per line and returns the selected
/// column. A first row whose selected field is not numeric is a header.
pub fn parse_values(text: &str, column: Option<&ColumnSelector>) -> CliResult<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let line = |r: &csv::StringRecord| r.position().map_or(0, |p| p.line());
    let read =
        |r: Option<Result<csv::StringRecord, csv::Error>>| r.transpose().map_err(input_error);

    let Some(first) = read(records.next())? else {
        return Err(CliError::Input("empty input".into()));
    };
    let numeric = |s: &str| s.parse::<f64>().is_ok();
    let (index, header) = match column {
        Some(ColumnSelector::Name(name)) => {
            let i = first.iter().position(|f| f == name).ok_or_else(|| {
                CliError::Input(format!("row {}: no column named '{name}'", line(&first)))
            })?;
            (Some(i), true)
        }
        Some(ColumnSelector::Index(i)) => {
            let header = first.get(*i).is_some_and(|f| !numeric(f));
            (Some(*i), header)
        }
        None => (None, !first.iter().any(numeric)),
    };

    let mut values = Vec::new();
    let mut index = index;
    let mut rows = std::iter::once(Ok(first))
        .chain(records)
        .skip(usize::from(header));
    while let Some(record) = read(rows.next())? {
        let row = line(&record);
        let i = *index.get_or_insert_with(|| {
            let last_numeric = record.iter().enumerate().filter(|(_, f)| numeric(f)).last();
            last_numeric.map_or(record.len() - 1, |(i, _)| i)
        });
        let field = record
            .get(i)
            .ok_or_else(|| CliError::Input(format!("row {row}: missing column {i}")))?;
        let v: f64 = field
            .parse()
            .map_err(|_| CliError::Input(format!("row {row}: '{field}' is not a number")))?;
        if !v.is_finite() {
            return Err(CliError::Input(format!(
                "row {row}: non-finite value '{field}'"
            )));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(CliError::Input("no samples in input".into()));
    }
    Ok(values)
}

/// Reads the configured source into a series, honouring the sample cap.
pub fn ingest(config: &RunConfig) -> CliResult<Series> {
    let mut series = match &config.source {
        Source::Synth(spec) => synth(spec, config.seed)?,
        Source::Path(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            Series::new(parse_values(&text, config.column.as_ref())?).map_err(input_error)?
        }
        Source::Stdin => {
            let mut text = String::new();
            io::stdin().read_to_string(&mut text).map_err(input_error)?;
            Series::new(parse_values(&text, config.column.as_ref())?).map_err(input_error)?
        }
    };
    if let Some(cap) = config.cap {
        series.truncate(cap);
    }
    Ok(series)
}

/// Deterministic synthetic series.
///
/// `piecewise` joins `segments` alternating strictly monotone ramps, each
/// rising or falling by at least `max(4 * noise, 1)`, and adds uniform noise
/// in `[-noise, noise]`. `ecg-like` tiles `ceil(segments / 5)` pulses with
/// five extrema each over the samples.
pub fn synth(spec: &SynthSpec, seed: u64) -> CliResult<Series> {
    let (m, n, a) = (spec.segments, spec.samples, spec.noise);
    if m == 0 {
        return Err(CliError::Usage(
            "synthetic segments must be at least 1".into(),
        ));
    }
    if n < 2 * m {
        return Err(CliError::Usage(format!(
            "synthetic samples must be at least twice the segments ({n} < {})",
            2 * m
        )));
    }
    if !(a >= 0.0 && a.is_finite()) {
        return Err(CliError::Usage(
            "synthetic noise must be finite and non-negative".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ys = match spec.kind {
        SynthKind::Piecewise => piecewise(&mut rng, m, n, a),
        SynthKind::EcgLike => ecg_like(&mut rng, m.div_ceil(5), n),
    };
    if a > 0.0 {
        for y in &mut ys {
            *y += rng.random_range(-a..=a);
        }
    }
    Series::new(ys).map_err(input_error)
}

fn piecewise(rng: &mut ChaCha8Rng, m: usize, n: usize, a: f64) -> Vec<f64> {
    let step = (4.0 * a).max(1.0);
    let cut = |k: usize| (k * (n - 1) + m / 2) / m;
    let mut ys = vec![0.0; n];
    let mut level = 0.0;
    for k in 0..m {
        let amplitude = step * rng.random_range(1.0..2.0);
        let next = if k % 2 == 0 {
            level + amplitude
        } else {
            level - amplitude
        };
        let (start, end) = (cut(k), cut(k + 1));
        let len = (end - start) as f64;
        for (t, y) in ys[start..=end].iter_mut().enumerate() {
            *y = level + (next - level) * (t as f64 / len);
        }
        ys[end] = next;
        level = next;
    }
    ys
}

/// One heartbeat: P, Q, R, S and T waves as Gaussian bumps over `[0, 1)`,
/// given as (centre, width, height).
const PULSE: [(f64, f64, f64); 5] = [
    (0.18, 0.035, 0.15),
    (0.36, 0.012, -0.12),
    (0.40, 0.014, 1.0),
    (0.44, 0.012, -0.25),
    (0.68, 0.06, 0.3),
];

fn ecg_like(rng: &mut ChaCha8Rng, pulses: usize, n: usize) -> Vec<f64> {
    let period = n as f64 / pulses as f64;
    let gains: Vec<f64> = (0..pulses).map(|_| rng.random_range(0.9..1.1)).collect();
    (0..n)
        .map(|i| {
            let t = i as f64 / period;
            let beat = (t.floor() as usize).min(pulses - 1);
            let phase = t - beat as f64;
            let wave: f64 = PULSE
                .iter()
                .map(|(c, w, h)| h * (-((phase - c) / w).powi(2) / 2.0).exp())
                .sum();
            gains[beat] * wave
        })
        .collect()
}

#[derive(Serialize)]
struct LabelRow {
    index: usize,
    value: f64,
    kind: &'static str,
    scale: f64,
}

#[derive(Serialize)]
struct SegmentReport {
    n: usize,
    k: usize,
    boundaries: Vec<usize>,
    directions: Vec<&'static str>,
    segment_omafe: Vec<f64>,
    omafe: f64,
}

#[derive(Serialize)]
struct SegmentRow {
    segment: usize,
    start: usize,
    end: usize,
    direction: &'static str,
    omafe: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub k: usize,
    pub omafe_scale: f64,
    pub omafe_topdown: f64,
    pub segments_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchRow {
    pub k: usize,
    pub n: usize,
    pub time_scale_ms: f64,
    pub time_topdown_ms: f64,
    pub repeats: usize,
}

#[derive(Serialize)]
struct SampleRow {
    index: usize,
    value: f64,
}

fn write_rows<T: Serialize>(rows: &[T], format: Format, out: &mut dyn Write) -> CliResult<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in rows {
                w.serialize(row).map_err(input_error)?;
            }
            w.flush().map_err(input_error)
        }
        Format::Json => {
            serde_json::to_writer(&mut *out, rows).map_err(input_error)?;
            writeln!(out).map_err(input_error)
        }
    }
}

/// Scale-based and top-down error for every budget in `1..=max_budget`.
pub fn spectrum_rows(series: &Series, max_budget: usize) -> CliResult<Vec<SpectrumRow>> {
    let scale = Segmenter::new(series)
        .spectrum(max_budget)
        .map_err(input_error)?;
    let topdown: Vec<f64> = if series.len() < 2 {
        vec![0.0; max_budget]
    } else {
        topdown_splines(series, max_budget)
            .map_err(input_error)?
            .iter()
            .map(|b| aggregate_signs(series, b).map(|s| s.omafe))
            .collect::<Result<_, _>>()
            .map_err(input_error)?
    };
    Ok(scale
        .iter()
        .zip(topdown)
        .map(|(p, t)| SpectrumRow {
            k: p.k,
            omafe_scale: p.omafe,
            omafe_topdown: t,
            segments_used: p.segments_used,
        })
        .collect())
}

fn median_ms(repeats: usize, mut run: impl FnMut() -> CliResult<()>) -> CliResult<f64> {
    let mut times = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let start = Instant::now();
        run()?;
        times.push(start.elapsed().as_secs_f64() * 1e3);
    }
    times.sort_by(f64::total_cmp);
    let mid = times.len() / 2;
    Ok(if times.len() % 2 == 1 {
        times[mid]
    } else {
        (times[mid - 1] + times[mid]) / 2.0
    })
}

/// Median wall time of both algorithms at budget `k`. The scale-based time
/// includes labelling; the top-down time includes sign aggregation.
pub fn bench_row(series: &Series, k: usize, repeats: usize) -> CliResult<BenchRow> {
    if series.len() < 2 {
        return Err(CliError::Input("bench needs at least 2 samples".into()));
    }
    let time_scale_ms = median_ms(repeats, || {
        let s = Segmenter::new(series).segment(k).map_err(input_error)?;
        std::hint::black_box(s);
        Ok(())
    })?;
    let time_topdown_ms = median_ms(repeats, || {
        let b = topdown_spline(series, k).map_err(input_error)?;
        std::hint::black_box(aggregate_signs(series, &b).map_err(input_error)?);
        Ok(())
    })?;
    Ok(BenchRow {
        k,
        n: series.len(),
        time_scale_ms,
        time_topdown_ms,
        repeats,
    })
}

/// Runs one command and writes its report to `out`.
pub fn run_command(config: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let series = ingest(config)?;
    let values = series.values();
    match config.command {
        Command::Synth => {
            let rows: Vec<SampleRow> = values
                .iter()
                .enumerate()
                .map(|(index, &value)| SampleRow { index, value })
                .collect();
            write_rows(&rows, config.format, out)
        }
        Command::Label => {
            let segmenter = Segmenter::new(&series);
            let rows: Vec<LabelRow> = segmenter
                .labels()
                .iter()
                .map(|l| LabelRow {
                    index: l.source_index,
                    value: values[l.source_index],
                    kind: l.kind.short_name(),
                    scale: l.scale,
                })
                .collect();
            write_rows(&rows, config.format, out)
        }
        Command::Segment => {
            let k = config.k.unwrap_or(1);
            let s = Segmenter::new(&series)
                .segment(k)
                .map_err(input_error)?
                .segmentation;
            let directions: Vec<&str> = s.directions.iter().map(|d| d.short_name()).collect();
            match config.format {
                Format::Json => {
                    let report = SegmentReport {
                        n: series.len(),
                        k,
                        boundaries: s.boundaries,
                        directions,
                        segment_omafe: s.segment_omafe,
                        omafe: s.omafe,
                    };
                    serde_json::to_writer(&mut *out, &report).map_err(input_error)?;
                    writeln!(out).map_err(input_error)
                }
                Format::Csv => {
                    let rows: Vec<SegmentRow> = (0..directions.len())
                        .map(|i| SegmentRow {
                            segment: i,
                            start: s.boundaries[i],
                            end: s.boundaries[i + 1],
                            direction: directions[i],
                            omafe: s.segment_omafe[i],
                        })
                        .collect();
                    write_rows(&rows, Format::Csv, out)
                }
            }
        }
        Command::Spectrum => {
            let rows = spectrum_rows(&series, config.kmax.unwrap_or(1))?;
            write_rows(&rows, config.format, out)
        }
        Command::Bench => {
            let rows = config
                .bench_budgets()
                .into_iter()
                .map(|k| bench_row(&series, k, config.repeats))
                .collect::<CliResult<Vec<_>>>()?;
            write_rows(&rows, config.format, out)
        }
    }
}

/// Parses a command line into a validated configuration.
pub fn parse_args<I, T>(args: I) -> Result<RunConfig, ParseOutcome>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Args::try_parse_from(args) {
        Ok(a) => RunConfig::from_args(a).map_err(ParseOutcome::Error),
        Err(e) => match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                Err(ParseOutcome::Info(e.to_string()))
            }
            _ => {
                let first = e.to_string().lines().next().unwrap_or("").to_string();
                Err(ParseOutcome::Error(CliError::Usage(first)))
            }
        },
    }
}

/// Non-configuration results of argument parsing.
#[derive(Debug)]
pub enum ParseOutcome {
    /// Help or version text to print before exiting successfully.
    Info(String),
    Error(CliError),
}

/// Entry point shared by the binary and tests. Returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match parse_args(args) {
        Ok(c) => c,
        Err(ParseOutcome::Info(text)) => {
            let _ = write!(stdout, "{text}");
            return 0;
        }
        Err(ParseOutcome::Error(e)) => {
            let _ = writeln!(stderr, "monoseg: {e}");
            return e.exit_code();
        }
    };
    let result = match &config.output {
        None => run_command(&config, stdout),
        Some(path) => File::create(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
            .and_then(|f| {
                let mut w = BufWriter::new(f);
                run_command(&config, &mut w)?;
                w.flush().map_err(input_error)
            }),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "monoseg: {e}");
            e.exit_code()
        }
    }
}
