//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! with a failure status if any fails.

mod common;

use std::io::Write as _;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use monoseg::cli::{self, bench_row, spectrum_rows, SpectrumRow, SynthKind, SynthSpec};
use monoseg::oracle::{best_alternating, definitional_label, omafe_pairwise};
use monoseg::{dedup, monotone_fit, scale_label, Direction, Segmenter, Series};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, elapsed: Duration) -> Result<(), String> {
    check(elapsed < limit, || {
        format!("took {elapsed:?}, limit {limit:?}")
    })
}

fn scales_of(values: &[f64]) -> Vec<f64> {
    scale_label(&dedup(values))
        .iter()
        .map(|l| l.scale)
        .collect()
}

fn label_fixtures() -> Outcome {
    let start = Instant::now();
    let stack = scales_of(&[1.0, 3.0, 2.0, 4.0]);
    let definitional: Vec<f64> = definitional_label(&dedup(&[0.0, 10.0, 9.0, 10.0, 0.0]))
        .iter()
        .map(|l| l.scale)
        .collect();
    let equal_maxima = scales_of(&[0.0, 10.0, 9.0, 10.0, 0.0]);
    let elapsed = start.elapsed();

    check(stack == [3.0, 1.0, 1.0, 3.0], || {
        format!("[1,3,2,4] -> {stack:?}")
    })?;
    check(definitional == [10.0, 10.0, 1.0, 10.0, 10.0], || {
        format!("definitional [0,10,9,10,0] -> {definitional:?}")
    })?;
    check(equal_maxima == [10.0, 1.0, 1.0, 10.0, 10.0], || {
        format!("stack [0,10,9,10,0] -> {equal_maxima:?}")
    })?;
    within(Duration::from_millis(1), elapsed)?;

    // Same fixture through the command line.
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("fixture.csv");
    std::fs::write(&path, "1\n3\n2\n4\n").map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    let code = cli::run(
        ["monoseg", "label", "--input", path.to_str().unwrap()],
        &mut out,
        &mut std::io::sink(),
    );
    let text = String::from_utf8(out).map_err(|e| e.to_string())?;
    let column: Vec<&str> = text
        .lines()
        .skip(1)
        .filter_map(|l| l.rsplit(',').next())
        .collect();
    check(code == 0 && column == ["3.0", "1.0", "1.0", "3.0"], || {
        format!("label command exit {code}, output {text:?}")
    })?;
    Ok(format!(
        "3,1,1,3 | 10,10,1,10,10 | 10,1,1,10,10 in {elapsed:?}"
    ))
}

/// Every short sequence up to length 9, then an evenly strided sample of
/// each longer length up to 12.
fn sampled_sequences() -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for n in 1..=12 {
        let total = common::count(n);
        let stride = if n <= 9 { 1 } else { total.div_ceil(40_000) };
        // Odd offset so the stride does not lock onto the first value.
        let offset = if stride > 1 { (stride / 2) | 1 } else { 0 };
        out.extend(
            (offset..total)
                .step_by(stride)
                .map(|j| common::sequence(n, j)),
        );
    }
    out
}

fn optimality_sample() -> Outcome {
    let start = Instant::now();
    let sample = sampled_sequences();
    let mut cases = 0usize;
    for v in &sample {
        let s = Series::new(v.clone()).unwrap();
        let segmenter = Segmenter::new(&s);
        for k in 1..=5 {
            let got = segmenter
                .segment(k)
                .map_err(|e| e.to_string())?
                .segmentation
                .omafe;
            let (want, _) = best_alternating(v, k).map_err(|e| e.to_string())?;
            check(got == want, || {
                format!("{v:?}, K = {k}: {got} vs optimum {want}")
            })?;
            cases += 1;
        }
    }
    let elapsed = start.elapsed();
    check(cases >= 10_000, || format!("only {cases} cases"))?;
    within(Duration::from_secs(30), elapsed)?;
    Ok(format!(
        "{cases} cases over {} sequences in {elapsed:.1?}",
        sample.len()
    ))
}

fn envelope_matches_pairwise() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let trials = 10_000;
    for t in 0..trials {
        let n = rng.random_range(1..=64);
        let integer = rng.random_bool(0.5);
        let v: Vec<f64> = (0..n)
            .map(|_| {
                if integer || rng.random_bool(0.3) {
                    f64::from(rng.random_range(-6i32..=6))
                } else {
                    rng.random_range(-1e3..1e3)
                }
            })
            .collect();
        for dir in [Direction::Increasing, Direction::Decreasing] {
            let fast = monotone_fit(&v, dir).map_err(|e| e.to_string())?.error;
            let slow = omafe_pairwise(&v, dir).map_err(|e| e.to_string())?;
            check(fast == slow, || {
                format!("trial {t}, {dir:?}: {fast} vs {slow} on {v:?}")
            })?;
        }
    }
    Ok(format!("{trials} sequences, both directions, exact"))
}

fn piecewise(noise: f64, seed: u64) -> Series {
    let spec = SynthSpec {
        kind: SynthKind::Piecewise,
        segments: 70,
        samples: 4000,
        noise,
    };
    cli::synth(&spec, seed).unwrap()
}

fn non_increasing(rows: &[SpectrumRow]) -> bool {
    rows.windows(2)
        .all(|w| w[1].omafe_scale <= w[0].omafe_scale)
}

fn spectrum_knee() -> Outcome {
    let start = Instant::now();
    let clean = Segmenter::new(&piecewise(0.0, 1))
        .spectrum(100)
        .map_err(|e| e.to_string())?;
    check(clean[68].omafe > 0.0, || {
        format!("K = 69 already exact: {:?}", clean[68])
    })?;
    for p in &clean[69..] {
        check(p.omafe == 0.0, || format!("clean data, {p:?}"))?;
    }
    let mut worst = 0.0f64;
    for (seed, a) in [(2, 0.5), (3, 2.0), (4, 10.0)] {
        let noisy = Segmenter::new(&piecewise(a, seed))
            .spectrum(100)
            .map_err(|e| e.to_string())?;
        for p in &noisy[69..] {
            check(p.omafe <= a, || format!("noise {a}, {p:?}"))?;
            worst = worst.max(p.omafe / a);
        }
    }
    let elapsed = start.elapsed();
    within(Duration::from_secs(5), elapsed)?;
    Ok(format!(
        "zero from K = 70 on clean data; noisy error <= {worst:.3} a beyond the knee; {elapsed:.1?}"
    ))
}

fn dominance() -> Outcome {
    let mut ratios = Vec::new();
    for (seed, a) in [(1, 0.0), (2, 0.5), (3, 2.0)] {
        let rows = spectrum_rows(&piecewise(a, seed), 100).map_err(|e| e.to_string())?;
        for r in &rows {
            check(r.omafe_scale <= r.omafe_topdown, || {
                format!("noise {a}: {r:?}")
            })?;
        }
        let r = rows[59];
        ratios.push(format!("{:.1}", r.omafe_topdown / r.omafe_scale));
    }
    Ok(format!(
        "K = 1..100 on three signals; top-down / scale error at K = 60: {}",
        ratios.join(", ")
    ))
}

fn monotone_spectrum() -> Outcome {
    let mut inputs: Vec<Series> = vec![piecewise(0.0, 1), piecewise(0.5, 2), piecewise(2.0, 3)];
    let ecg = SynthSpec {
        kind: SynthKind::EcgLike,
        segments: 70,
        samples: 4000,
        noise: 0.01,
    };
    inputs.push(cli::synth(&ecg, 7).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..300 {
        let n = rng.random_range(1..300);
        let v: Vec<f64> = (0..n)
            .map(|_| f64::from(rng.random_range(-8i32..8)))
            .collect();
        inputs.push(Series::new(v).unwrap());
    }
    for s in &inputs {
        let rows = spectrum_rows(s, 40).map_err(|e| e.to_string())?;
        check(non_increasing(&rows), || format!("increase in {rows:?}"))?;
        for r in &rows {
            check(r.segments_used <= r.k, || format!("{r:?}"))?;
        }
    }
    Ok(format!("{} inputs, K = 1..40", inputs.len()))
}

fn complexity() -> Outcome {
    let start = Instant::now();
    let noisy = |n: usize| {
        let spec = SynthSpec {
            kind: SynthKind::Piecewise,
            segments: 70,
            samples: n,
            noise: 0.5,
        };
        cli::synth(&spec, 11).unwrap()
    };
    let small = bench_row(&noisy(4000), 70, 5).map_err(|e| e.to_string())?;
    check(small.time_scale_ms < small.time_topdown_ms, || {
        format!("n = 4000: {small:?}")
    })?;

    let mut times = Vec::new();
    for n in [100_000, 200_000, 400_000] {
        let row = bench_row(&noisy(n), 70, 5).map_err(|e| e.to_string())?;
        times.push(row.time_scale_ms);
    }
    let ratios: Vec<f64> = times.windows(2).map(|w| w[1] / w[0]).collect();
    for r in &ratios {
        check((1.5..=3.0).contains(r), || {
            format!("doubling ratios {ratios:?}, times {times:?} ms")
        })?;
    }
    let elapsed = start.elapsed();
    within(Duration::from_secs(60), elapsed)?;
    Ok(format!(
        "n = 4000: {:.3} ms vs top-down {:.3} ms; doubling ratios {:.2}, {:.2}; {elapsed:.1?}",
        small.time_scale_ms, small.time_topdown_ms, ratios[0], ratios[1]
    ))
}

fn threshold_contract() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let (mut checked, mut segments) = (0, 0);
    // Violations of the error bound, split by where the segment sits.
    let mut at_ends = Vec::new();
    let mut inside = Vec::new();
    for t in 0..1000 {
        let n = rng.random_range(2..200);
        let integer = rng.random_bool(0.5);
        let v: Vec<f64> = (0..n)
            .map(|_| {
                if integer {
                    f64::from(rng.random_range(-10i32..10))
                } else {
                    rng.random_range(-10.0..10.0)
                }
            })
            .collect();
        let k = rng.random_range(1..=20);
        let s = Series::new(v.clone()).unwrap();
        let r = Segmenter::new(&s).segment(k).map_err(|e| e.to_string())?;
        let Some(delta) = r.threshold else { continue };
        let seg = &r.segmentation;
        let last = seg.segment_omafe.len() - 1;
        for (i, &e) in seg.segment_omafe.iter().enumerate() {
            segments += 1;
            if e >= delta / 2.0 {
                let note = format!("trial {t}, K = {k}: segment {i} error {e}, threshold {delta}");
                if i == 0 || i == last {
                    at_ends.push(note);
                } else {
                    inside.push(note);
                }
            }
        }
        let b = &seg.boundaries;
        for w in b[1..b.len() - 1].windows(2) {
            let drop = (v[w[1]] - v[w[0]]).abs();
            check(drop >= delta, || {
                format!("trial {t}, K = {k}: drop {drop} between {w:?} vs threshold {delta}")
            })?;
        }
        checked += 1;
    }
    check(inside.is_empty(), || {
        format!("{} interior segments, first: {}", inside.len(), inside[0])
    })?;
    check(at_ends.is_empty(), || {
        format!(
            "{} of {segments} segments reach the bound, all first or last segments (first: {}); \
             interior segments and boundary drops hold on all {checked} inputs",
            at_ends.len(),
            at_ends[0]
        )
    })?;
    Ok(format!(
        "{segments} segments over {checked} inputs selected by threshold"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("label fixtures", label_fixtures),
        ("optimality against brute force (sample)", optimality_sample),
        (
            "monotone fit equals pairwise error",
            envelope_matches_pairwise,
        ),
        ("spectrum knee on synthetic ramps", spectrum_knee),
        ("dominance over top-down", dominance),
        ("non-increasing spectrum", monotone_spectrum),
        ("linear scaling and speed", complexity),
        ("threshold contract", threshold_contract),
    ];
    let mut failed = 0;
    let stdout = std::io::stdout();
    for (name, run) in criteria {
        let line = match run() {
            Ok(detail) => format!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                format!("FAIL {name}: {why}")
            }
        };
        let mut lock = stdout.lock();
        let _ = writeln!(lock, "{line}");
        let _ = lock.flush();
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
