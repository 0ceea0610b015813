//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use cpci_core::critical::{classify_field, classify_vertex, CriticalType};
use cpci_core::egf::save_ensemble;
use cpci_core::render::{render_glyph, render_map, GlyphStyle};
use cpci_core::stats::{beta_quantile, coverage_experiment, jeffreys_interval, regularized_incomplete_beta, summarize};
use cpci_core::synth::{estimate_moments, ground_truth_probabilities, sample_ensemble};
use cpci_core::{
    build_link, count_types, ConfidenceLevel, Ensemble, GridTopology, MomentModel, ScalarField, Seed, TypeCounts,
    VertexIndex,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

// 1. Classification oracle

fn oracle_from_signs(higher: &[bool; 6]) -> CriticalType {
    let changes = (0..6).filter(|&k| higher[k] != higher[(k + 1) % 6]).count();
    match changes {
        0 if higher[0] => CriticalType::Minimum,
        0 => CriticalType::Maximum,
        2 => CriticalType::Regular,
        _ => CriticalType::Saddle,
    }
}

fn swap_extrema(t: CriticalType) -> CriticalType {
    match t {
        CriticalType::Minimum => CriticalType::Maximum,
        CriticalType::Maximum => CriticalType::Minimum,
        other => other,
    }
}

fn classification() -> Outcome {
    let t = GridTopology::new(3, 3).unwrap();
    let center = VertexIndex::new(1, 1);
    let link = build_link(&t, center).unwrap();
    for pattern in 0u32..64 {
        let higher: [bool; 6] = std::array::from_fn(|k| pattern & (1 << k) != 0);
        let mut values = vec![0.0; 9];
        for (k, &u) in link.neighbors.iter().enumerate() {
            values[t.linear(u)] = if higher[k] { 1.0 } else { -1.0 };
        }
        let f = ScalarField::new(values).unwrap();
        let got = classify_vertex(&f, &link, t.linear(center), &t);
        ensure(got == oracle_from_signs(&higher), || {
            format!("sign pattern {pattern:06b}: {got:?}")
        })?;
    }

    let t = GridTopology::new(8, 8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for trial in 0..1000 {
        let mut values: Vec<f64> = (0..64).map(|k| k as f64 - 32.0).collect();
        values.shuffle(&mut rng);
        let f = ScalarField::new(values).unwrap();
        let base = classify_field(&f, &t).unwrap();
        let neg = classify_field(&f.map(|v| -v).unwrap(), &t).unwrap();
        ensure(base.iter().zip(&neg).all(|(a, b)| swap_extrema(*a) == *b), || {
            format!("negation duality fails on field {trial}")
        })?;
        for g in [|v: f64| 2.0 * v + 5.0, |v: f64| v * v * v] {
            let mapped = classify_field(&f.map(g).unwrap(), &t).unwrap();
            ensure(mapped == base, || format!("monotone invariance fails on field {trial}"))?;
        }
    }
    Ok("64 sign patterns, 1000 random 8x8 fields".into())
}

// 2. Special functions

fn special_functions() -> Outcome {
    let ib = |x, a, b| regularized_incomplete_beta(x, a, b).unwrap();
    let mut worst: f64 = 0.0;
    for &x in &[0.0, 0.1, 0.3, 0.7, 1.0] {
        worst = worst.max((ib(x, 1.0, 1.0) - x).abs());
        for &a in &[0.5, 2.0, 9.5, 50.0] {
            worst = worst.max((ib(x, a, 1.0) - f64::powf(x, a)).abs());
        }
    }
    let shapes = [0.5, 1.5, 9.5, 50.5, 100.5];
    for &a in &shapes {
        worst = worst.max((ib(0.5, a, a) - 0.5).abs());
        for &b in &shapes {
            for &x in &[0.001, 0.05, 0.3, 0.5, 0.8, 0.999] {
                worst = worst.max((ib(x, a, b) - (1.0 - ib(1.0 - x, b, a))).abs());
            }
        }
    }
    ensure(worst <= 1e-12, || format!("identity error {worst:e}"))?;

    let mut roundtrip: f64 = 0.0;
    for &q in &[0.005, 0.025, 0.5, 0.975, 0.995] {
        for &a in &shapes {
            for &b in &shapes {
                let x = beta_quantile(q, a, b).unwrap();
                roundtrip = roundtrip.max((ib(x, a, b) - q).abs());
            }
        }
    }
    ensure(roundtrip <= 1e-9, || format!("quantile roundtrip error {roundtrip:e}"))?;
    Ok(format!("identity error {worst:.1e}, roundtrip error {roundtrip:.1e}"))
}

// 3. Jeffreys contract

fn jeffreys_contract() -> Outcome {
    let mut worst: f64 = 0.0;
    for gamma in [0.95, 0.99] {
        let level = ConfidenceLevel::new(gamma).unwrap();
        let half = level.alpha() / 2.0;
        for m in [9usize, 49, 100] {
            for c in 1..m {
                let e = jeffreys_interval(c, m, level).unwrap();
                let (a, b) = (c as f64 + 0.5, (m - c) as f64 + 0.5);
                worst = worst.max((regularized_incomplete_beta(e.p_lower, a, b).unwrap() - half).abs());
                worst = worst.max((regularized_incomplete_beta(e.p_upper, a, b).unwrap() - (1.0 - half)).abs());
            }
        }
        for m in 1..=200usize {
            ensure(jeffreys_interval(0, m, level).unwrap().p_lower == 0.0, || {
                format!("c=0 m={m}")
            })?;
            ensure(jeffreys_interval(m, m, level).unwrap().p_upper == 1.0, || {
                format!("c=m={m}")
            })?;
            for c in 0..=m {
                let e = jeffreys_interval(c, m, level).unwrap();
                ensure(e.p_lower <= e.p_hat && e.p_hat <= e.p_upper, || {
                    format!("containment c={c} m={m} gamma={gamma}")
                })?;
            }
        }
    }
    ensure(worst <= 1e-9, || format!("equitail error {worst:e}"))?;
    Ok(format!("equitail error {worst:.1e}"))
}

// 4. Coverage

fn coverage() -> Outcome {
    let level = ConfidenceLevel::new(0.95).unwrap();
    let mut cells = Vec::new();
    let mut failures = Vec::new();
    for p in [0.05, 0.1, 0.3, 0.5, 0.9] {
        for m in [9, 49] {
            let r = coverage_experiment(p, m, level, 10_000, 2024).unwrap();
            let cov = r.empirical_coverage();
            let cell = format!("p={p} m={m}: {cov:.4}");
            if !(0.91..=0.99).contains(&cov) {
                failures.push(cell.clone());
            }
            cells.push(cell);
        }
    }
    if failures.is_empty() {
        Ok(cells.join(", "))
    } else {
        Err(format!("outside [0.91, 0.99]: {}", failures.join(", ")))
    }
}

// 5. Width shrinkage

fn width_shrinkage() -> Outcome {
    let level = ConfidenceLevel::new(0.95).unwrap();
    let width = |m: usize| {
        let lo = jeffreys_interval(m / 2, m, level).unwrap().width();
        let hi = jeffreys_interval(m.div_ceil(2), m, level).unwrap().width();
        0.5 * (lo + hi)
    };
    let ratio = width(49) / width(9);
    let target = (9.0f64 / 49.0).sqrt();
    ensure((ratio - target).abs() <= 0.08, || {
        format!("ratio {ratio:.4} vs {target:.4}")
    })?;
    Ok(format!("ratio {ratio:.4} vs {target:.4}"))
}

// 6. Synthetic study

/// Sum of random Gaussian bumps plus a random linear trend.
fn smooth_field(nx: usize, ny: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let bumps: Vec<(f64, f64, f64, f64)> = (0..5)
        .map(|_| {
            (
                rng.gen_range(0.0..nx as f64),
                rng.gen_range(0.0..ny as f64),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(2.5..5.0),
            )
        })
        .collect();
    let (gx, gy) = (rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05));
    let mut values = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (x, y) = (i as f64, j as f64);
            let bump: f64 = bumps
                .iter()
                .map(|&(cx, cy, amp, s)| amp * (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * s * s)).exp())
                .sum();
            values.push(bump + gx * x + gy * y);
        }
    }
    values
}

/// Shared smooth base field plus independent smooth perturbations, mimicking
/// a climatology with year-to-year variability.
fn seed_ensemble(nx: usize, ny: usize, m: usize, seed: u64) -> Ensemble {
    let t = GridTopology::new(nx, ny).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = smooth_field(nx, ny, &mut rng);
    let members = (0..m)
        .map(|_| {
            let noise = smooth_field(nx, ny, &mut rng);
            ScalarField::new(base.iter().zip(&noise).map(|(b, n)| b + 0.3 * n).collect()).unwrap()
        })
        .collect();
    Ensemble::new(t, members).unwrap()
}

fn synthetic_study() -> Outcome {
    let level = ConfidenceLevel::new(0.95).unwrap();
    let model = estimate_moments(&seed_ensemble(16, 16, 10, 3)).unwrap();
    let truth = ground_truth_probabilities(&model, 100_000, Seed(99), level).unwrap();
    let mut report = Vec::new();
    let mut ordinal = 0;
    for m in [9, 49] {
        let (mut flagged, mut below) = (0usize, 0usize);
        for _ in 0..10 {
            let e = sample_ensemble(&model, m, Seed(1000).offset(ordinal)).unwrap();
            ordinal += 1;
            for (c, t) in count_types(&e).iter().zip(&truth) {
                let s = summarize(c, level).unwrap();
                for kind in [CriticalType::Minimum, CriticalType::Maximum, CriticalType::Saddle] {
                    let est = s.get(kind).unwrap();
                    if est.p_lower > 0.0 {
                        flagged += 1;
                        if t.get(kind).unwrap().p_hat < est.p_lower {
                            below += 1;
                        }
                    }
                }
            }
        }
        let rate = below as f64 / flagged.max(1) as f64;
        report.push((m, flagged, below, rate));
    }
    let text = report
        .iter()
        .map(|(m, n, b, r)| format!("m={m}: {b}/{n} = {:.2}%", 100.0 * r))
        .collect::<Vec<_>>()
        .join(", ");
    ensure(report.iter().all(|&(_, n, _, r)| n > 0 && r <= 0.05), || text.clone())?;
    Ok(text)
}

// 7. Sampler moments

fn sampler_moments() -> Outcome {
    let t = GridTopology::new(3, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let members: Vec<ScalarField> = (0..4)
        .map(|_| ScalarField::new((0..9).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap())
        .collect();
    let e = Ensemble::new(t, members).unwrap();
    let model = estimate_moments(&e).unwrap();
    let mean: Vec<f64> = (0..9)
        .map(|k| e.members().iter().map(|f| f.value(k)).sum::<f64>() / 4.0)
        .collect();
    let mut worst: f64 = 0.0;
    for u in 0..9 {
        for v in 0..9 {
            let brute = e
                .members()
                .iter()
                .map(|f| (f.value(u) - mean[u]) * (f.value(v) - mean[v]))
                .sum::<f64>()
                / 3.0;
            worst = worst.max((model.covariance(u, v) - brute).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("covariance error {worst:e}"))?;

    let model = MomentModel::new(
        GridTopology::new(2, 2).unwrap(),
        vec![1.0, -0.5, 0.0, 2.0],
        vec![vec![1.0, 0.5, 0.0, -0.3], vec![0.0, 0.8, 0.6, 0.2]],
    )
    .unwrap();
    let n = 100_000;
    let sample = sample_ensemble(&model, n, Seed(2024)).unwrap();
    let nf = n as f64;
    let mut worst_z: f64 = 0.0;
    for u in 0..4 {
        let mu = model.mean()[u];
        let var = model.covariance(u, u);
        let mean = sample.members().iter().map(|f| f.value(u)).sum::<f64>() / nf;
        worst_z = worst_z.max((mean - mu).abs() / (var / nf).sqrt());
        for v in 0..4 {
            let target = model.covariance(u, v);
            let cov = sample
                .members()
                .iter()
                .map(|f| (f.value(u) - mu) * (f.value(v) - model.mean()[v]))
                .sum::<f64>()
                / nf;
            let se = ((var * model.covariance(v, v) + target * target) / nf).sqrt();
            worst_z = worst_z.max((cov - target).abs() / se);
        }
    }
    ensure(worst_z <= 4.0, || format!("moment deviation {worst_z:.2} SE"))?;
    Ok(format!("covariance error {worst:.1e}, worst deviation {worst_z:.2} SE"))
}

// 8. Rendering

fn render_fixture() -> (GridTopology, Vec<cpci_core::ProbabilitySummary>) {
    let t = GridTopology::new(4, 4).unwrap();
    let level = ConfidenceLevel::default();
    let summaries = (0..16)
        .map(|k| {
            let counts = TypeCounts::new(k % 5, (k * 3) % 7, (k * 7) % 4, 20).unwrap();
            summarize(&counts, level).unwrap()
        })
        .collect();
    (t, summaries)
}

fn rendering() -> Outcome {
    let (t, summaries) = render_fixture();
    let style = GlyphStyle::default();
    let first = render_map(&summaries, &t, &style).unwrap();
    let second = render_map(&summaries, &t, &style).unwrap();
    ensure(first == second, || "map differs between runs".into())?;
    let golden_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/golden.svg");
    let golden = std::fs::read_to_string(&golden_path).map_err(|e| format!("{}: {e}", golden_path.display()))?;
    ensure(first == golden, || "map differs from golden file".into())?;

    let s = summarize(&TypeCounts::new(3, 9, 5, 30).unwrap(), ConfidenceLevel::default()).unwrap();
    let glyph = render_glyph(&s, &style, (50.0, 50.0)).unwrap();
    let mut order = Vec::new();
    let mut worst: f64 = 0.0;
    for line in glyph.lines() {
        let attr = |name: &str| {
            let key = format!("{name}=\"");
            let start = line.find(&key).map(|p| p + key.len())?;
            Some(&line[start..start + line[start..].find('"')?])
        };
        let (kind, role, d) = (
            attr("data-type").unwrap(),
            attr("data-role").unwrap(),
            attr("d").unwrap(),
        );
        let mut tokens = d.split_whitespace();
        tokens.find(|&tok| tok == "A");
        let r: f64 = tokens.next().unwrap().parse().unwrap();
        let t = match kind {
            "min" => CriticalType::Minimum,
            "max" => CriticalType::Maximum,
            _ => CriticalType::Saddle,
        };
        let e = s.get(t).unwrap();
        let p = match role {
            "upper" => e.p_upper,
            "lower" => e.p_lower,
            _ => e.p_hat,
        };
        worst = worst.max(((r / style.r_max).powi(2) - p).abs() / p);
        order.push(format!("{kind}:{role}"));
    }
    let expected: Vec<String> = ["max", "min", "saddle"]
        .iter()
        .flat_map(|k| ["upper", "lower", "estimate"].map(|r| format!("{k}:{r}")))
        .collect();
    ensure(order == expected, || format!("paint order {order:?}"))?;
    ensure(worst <= 1e-6, || format!("radius parse-back error {worst:e}"))?;
    Ok(format!("golden identical, parse-back error {worst:.1e}"))
}

// 9. End-to-end determinism

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cpci"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!(
            "cpci {} failed: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn pipeline(dir: &Path, seed_file: &Path) -> Result<(Vec<u8>, Vec<u8>), String> {
    let p = |name: &str| dir.join(name).to_string_lossy().into_owned();
    let seed = seed_file.to_string_lossy().into_owned();
    run_cli(&["synth", "fit", "--input", &seed, "--output", &p("model.mmf")])?;
    run_cli(&[
        "synth",
        "sample",
        "--input",
        &p("model.mmf"),
        "--output",
        &p("ens"),
        "--sizes",
        "9",
        "--seed",
        "17",
    ])?;
    let ens = p("ens/ensemble_m9_00.egf");
    run_cli(&["estimate", "--input", &ens, "--output", &p("summary.csv")])?;
    run_cli(&["render", "--input", &p("summary.csv"), "--output", &p("map.svg")])?;
    let read = |name: &str| std::fs::read(dir.join(name)).map_err(|e| format!("{name}: {e}"));
    Ok((read("summary.csv")?, read("map.svg")?))
}

fn determinism() -> Outcome {
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let seed_file = root.path().join("seed.egf");
    let file = std::fs::File::create(&seed_file).map_err(|e| e.to_string())?;
    save_ensemble(&seed_ensemble(12, 10, 8, 4), file).map_err(|e| e.to_string())?;
    let runs = ["a", "b"]
        .iter()
        .map(|name| {
            let dir = root.path().join(name);
            std::fs::create_dir(&dir).map_err(|e| e.to_string())?;
            pipeline(&dir, &seed_file)
        })
        .collect::<Result<Vec<_>, String>>()?;
    ensure(runs[0].0 == runs[1].0, || "summary CSV differs".into())?;
    ensure(runs[0].1 == runs[1].1, || "SVG differs".into())?;
    Ok(format!(
        "{} CSV bytes, {} SVG bytes identical",
        runs[0].0.len(),
        runs[0].1.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 classification oracle", Duration::from_secs(5), classification),
        ("2 special functions", Duration::from_secs(5), special_functions),
        ("3 Jeffreys contract", Duration::MAX, jeffreys_contract),
        ("4 coverage", Duration::from_secs(60), coverage),
        ("5 width shrinkage", Duration::MAX, width_shrinkage),
        ("6 synthetic study", Duration::from_secs(120), synthetic_study),
        ("7 sampler moments", Duration::MAX, sampler_moments),
        ("8 rendering", Duration::MAX, rendering),
        ("9 end-to-end determinism", Duration::MAX, determinism),
    ];
    let mut failed = 0;
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; took {elapsed:.2?} > {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({elapsed:.2?}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name} ({elapsed:.2?}): {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
