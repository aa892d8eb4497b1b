//! Acceptance suite. Prints one line per criterion and exits non-zero if
//! any criterion fails.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::collections::HashSet;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use melif_core::bench::{run_cell, BenchOptions, RunConfig, ThreadSpec};
use melif_core::dataset::{planted, PlantedSpec};
use melif_core::evaluator::{EvalService, GridPoint, GridSpacing, StubObjective};
use melif_core::filters::{fit_criterion_scores, spearman_scores, symmetric_uncertainty_scores, vdm_scores};
use melif_core::optim::{self, ArmState, HaltTracker, OptimizerConfig, OptimizerKind};
use melif_core::{Dataset, EvalConfig, HaltReason, HaltSpec, SearchResult};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::oracles;
use support::problems::{hashed_score, Quadratic};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn stub_search<F>(kind: OptimizerKind, dim: usize, f: F, threads: usize, halt: HaltSpec) -> Result<SearchResult, String>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    let svc = EvalService::new(StubObjective::new(dim, f), GridSpacing::default());
    let cfg = OptimizerConfig::new(dim).with_threads(threads).with_halt(halt);
    optim::run(kind, &svc, &cfg).map_err(|e| e.to_string())
}

/// No point computed twice, q* is the best visited score, p* its earliest visit.
fn check_invariants(res: &SearchResult) -> Result<(), String> {
    let fresh: Vec<&GridPoint> = res.visits.iter().filter(|v| v.fresh).map(|v| &v.record.point).collect();
    let unique: HashSet<&GridPoint> = fresh.iter().copied().collect();
    ensure(unique.len() == fresh.len(), || format!("{} duplicate evaluations", fresh.len() - unique.len()))?;
    let q = res.visits.iter().map(|v| v.record.score).fold(f64::NEG_INFINITY, f64::max);
    ensure(res.best_score == q, || format!("q* {} != max visited {q}", res.best_score))?;
    let earliest = res
        .visits
        .iter()
        .filter(|v| v.record.score == q)
        .min_by_key(|v| v.record.seq)
        .ok_or("no visits")?;
    ensure(earliest.record.point == res.best_point, || "p* is not the earliest best visit".into())
}

fn random_dataset(rng: &mut ChaCha8Rng) -> Dataset {
    let n = rng.random_range(10..=50);
    let d = rng.random_range(1..=30);
    let classes = rng.random_range(2..=3.min(n / 4));
    let labels: Vec<usize> = (0..n).map(|i| i % classes).collect();
    let features = Array2::from_shape_fn((n, d), |(_, j)| {
        if j % 4 == 0 {
            rng.random_range(0..4) as f64
        } else {
            rng.random_range(-3.0..3.0)
        }
    });
    Dataset::from_parts("random", features, labels).expect("valid dataset")
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let ds = random_dataset(&mut rng);
        let sp = spearman_scores(&ds);
        let su = symmetric_uncertainty_scores(&ds, 10);
        let fc = fit_criterion_scores(&ds, 1e-12);
        let vdm = vdm_scores(&ds, 10);
        for j in 0..ds.feature_count() {
            let x = ds.column(j).to_vec();
            let y = ds.labels();
            let pairs = [
                (sp[j], oracles::spearman(&x, y)),
                (su[j], oracles::symmetric_uncertainty(&x, y, 10)),
                (fc[j], oracles::fit_criterion(&x, y, 1e-12)),
                (vdm[j], oracles::vdm(&x, y, 10)),
            ];
            for (got, expect) in pairs {
                worst = worst.max((got - expect).abs());
            }
        }
    }
    ensure(worst <= 1e-9, || format!("max |diff| {worst:e} > 1e-9"))?;
    Ok(format!("100 datasets, 4 measures, max |diff| {worst:e} <= 1e-9"))
}

fn criterion_2() -> Outcome {
    let steps = GridSpacing::default().steps_per_unit();
    for seed in 0..20u64 {
        let dim = 2 + (seed % 3) as usize;
        let quad = Quadratic::random(1000 + seed, dim);
        let best = oracles::grid_max(dim, 12, steps, &|w| quad.value(w));
        let runs = [
            (OptimizerKind::Melif, HaltSpec::default()),
            (OptimizerKind::PriorityQueue, HaltSpec::max_points(300)),
            (OptimizerKind::Bandit, HaltSpec::max_points(300)),
        ];
        for (kind, halt) in runs {
            let q = quad.clone();
            let res = stub_search(kind, dim, move |w| q.value(w), 1, halt)?;
            ensure(res.best_score == best, || {
                format!("{kind} quadratic {seed} (dim {dim}): {} vs grid optimum {best}", res.best_score)
            })?;
        }
    }
    Ok("20 quadratics, dims 2-4, melif/pq/ma (max_points 300) match the grid optimum exactly".into())
}

fn criterion_3() -> Outcome {
    let time = |threads: usize| -> Result<f64, String> {
        let quad = Quadratic::random(7, 4);
        let stub = StubObjective::new(4, move |w: &[f64]| quad.value(w)).with_sleep(Duration::from_millis(50));
        let svc = EvalService::new(stub, GridSpacing::default());
        let cfg = OptimizerConfig::new(4)
            .with_threads(threads)
            .with_halt(HaltSpec::max_points(96));
        let t0 = Instant::now();
        let res = optim::run(OptimizerKind::PriorityQueue, &svc, &cfg).map_err(|e| e.to_string())?;
        ensure(res.points_evaluated() == 96, || format!("T={threads}: {} points", res.points_evaluated()))?;
        Ok(t0.elapsed().as_secs_f64())
    };
    let serial = time(1)?;
    let parallel = time(8)?;
    let ratio = parallel / serial;
    let detail = format!("T=8 {parallel:.2}s / T=1 {serial:.2}s = {ratio:.3} (limit 0.30)");
    ensure(ratio <= 0.30, || detail.clone())?;
    Ok(detail)
}

fn criterion_4() -> Outcome {
    let opts = BenchOptions {
        threads: ThreadSpec::Fixed(1),
        eval: EvalConfig {
            m: 10,
            ..EvalConfig::default()
        },
        ..BenchOptions::default()
    };
    let configs = RunConfig::parse_list("B,PQ100,MA100").map_err(|e| e.to_string())?;
    let mut worst_gap = f64::NEG_INFINITY;
    let mut lines = Vec::new();
    for seed in 0..10u64 {
        let spec = PlantedSpec {
            shift: 1.0,
            ..PlantedSpec::new(60, 1000, 10, seed)
        };
        let (ds, _) = planted(&spec).map_err(|e| e.to_string())?;
        let f1: Vec<f64> = configs
            .iter()
            .map(|c| run_cell(&ds, c, &opts).map(|row| row.best_f1))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let gap = (f1[0] - f1[1]).max(f1[0] - f1[2]);
        worst_gap = worst_gap.max(gap);
        lines.push(format!("{:.3}/{:.3}/{:.3}", f1[0], f1[1], f1[2]));
        ensure(gap <= 0.02, || {
            format!("dataset {seed}: MeLiF {:.4}, PQ100 {:.4}, MA100 {:.4}", f1[0], f1[1], f1[2])
        })?;
    }
    Ok(format!(
        "10 planted datasets, max(MeLiF - variant) {worst_gap:+.4} <= 0.02; F1 B/PQ100/MA100: {}",
        lines.join(" ")
    ))
}

fn criterion_5() -> Outcome {
    // Tracker-level semantics.
    let mut t = HaltTracker::new(HaltSpec::default());
    ensure(t.observe(0.999_999_999, false).is_none(), || "halted below 1.0".into())?;
    ensure(t.observe(1.0, false) == Some(HaltReason::Perfect), || "no halt at exactly 1.0".into())?;

    let mut t = HaltTracker::new(HaltSpec::stagnation(32));
    for i in 0..10 {
        t.observe(0.1 * i as f64 / 10.0, false);
    }
    let mut fired_at = None;
    for i in 0..100 {
        if t.observe(0.0, false).is_some() {
            fired_at = Some(i + 1);
            break;
        }
    }
    ensure(fired_at == Some(32), || format!("stagnation fired after {fired_at:?}"))?;

    // Perfect halt inside a search.
    let peak = |w: &[f64]| 1.0 - (w[0] - 0.5).powi(2) - (w[1] - 0.5).powi(2);
    for kind in [OptimizerKind::Melif, OptimizerKind::PriorityQueue, OptimizerKind::Bandit] {
        let res = stub_search(kind, 2, peak, 1, HaltSpec::max_points(500))?;
        ensure(res.halt_reason == HaltReason::Perfect && res.best_score == 1.0, || {
            format!("{kind}: {:?} at {}", res.halt_reason, res.best_score)
        })?;
    }

    // Budget halts.
    for kind in [OptimizerKind::PriorityQueue, OptimizerKind::Bandit] {
        for limit in [75, 100, 125] {
            for threads in [1, 4] {
                let res = stub_search(kind, 3, hashed_score, threads, HaltSpec::max_points(limit))?;
                let n = res.points_evaluated();
                let ok = if threads == 1 { n == limit } else { n.abs_diff(limit) <= threads };
                ensure(ok && res.halt_reason == HaltReason::Limit, || {
                    format!("{kind} limit {limit} T={threads}: {n} evaluations, {:?}", res.halt_reason)
                })?;
            }
        }
    }

    // Stagnation inside a search: 3 starting points, then 32 non-improving points.
    for kind in [OptimizerKind::PriorityQueue, OptimizerKind::Bandit] {
        let res = stub_search(kind, 2, |_| 0.5, 1, HaltSpec::stagnation(32))?;
        ensure(res.halt_reason == HaltReason::Stagnation && res.points_evaluated() == 35, || {
            format!("{kind}: {:?} after {}", res.halt_reason, res.points_evaluated())
        })?;
    }
    Ok("perfect at exactly 1.0; limits 75/100/125 exact at T=1, within T at T=4; stagnation after 32".into())
}

fn criterion_6() -> Outcome {
    let mut min_share = 1.0f64;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let means = [0.9, 0.1];
        let mut arms: Vec<ArmState> = (0..2).map(ArmState::new).collect();
        for arm in &mut arms {
            arm.queue.push(GridPoint::new(vec![arm.id as i64]), 1.0);
        }
        let mut high = 0usize;
        for _ in 0..200 {
            let i = optim::ucb_select(&arms, 1.0).map_err(|e| e.to_string())?;
            if i == 0 {
                high += 1;
            }
            let reward = if rng.random_bool(means[i]) { 1.0 } else { 0.0 };
            arms[i].record(reward);
        }
        let share = high as f64 / 200.0;
        min_share = min_share.min(share);
        ensure(share >= 0.6, || format!("seed {seed}: high arm share {share:.3}"))?;
    }

    // Cold start: every arm is pulled once before any is repeated.
    let mut arms: Vec<ArmState> = (0..5).map(ArmState::new).collect();
    for arm in &mut arms {
        arm.queue.push(GridPoint::new(vec![arm.id as i64]), 1.0);
    }
    let mut first = Vec::new();
    for _ in 0..5 {
        let i = optim::ucb_select(&arms, 1.0).map_err(|e| e.to_string())?;
        first.push(i);
        arms[i].record(1.0);
    }
    ensure(first == [0, 1, 2, 3, 4], || format!("cold-start order {first:?}"))?;
    Ok(format!("20 seeds x 200 selections, min high-arm share {min_share:.3} >= 0.60; cold start covers all arms"))
}

fn criterion_7() -> Outcome {
    let mut runs = 0;
    for seed in 0..50u64 {
        for threads in [2usize, 4, 8] {
            for kind in [OptimizerKind::MelifPlus, OptimizerKind::PriorityQueue, OptimizerKind::Bandit] {
                let (tx, rx) = mpsc::channel();
                thread::spawn(move || {
                    let f = move |w: &[f64]| {
                        let mut key = w.to_vec();
                        key.push(seed as f64);
                        hashed_score(&key)
                    };
                    let _ = tx.send(stub_search(kind, 3, f, threads, HaltSpec::max_points(60)));
                });
                let res = rx
                    .recv_timeout(Duration::from_secs(20))
                    .map_err(|_| format!("{kind} T={threads} seed {seed}: no termination within 20 s"))??;
                check_invariants(&res).map_err(|e| format!("{kind} T={threads} seed {seed}: {e}"))?;
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} runs (melif+/pq/ma x T in {{2,4,8}} x 50 seeds): no duplicates, q*/p* invariants hold, all terminated"))
}

fn melif(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_melif"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("melif {}: {}", args.join(" "), String::from_utf8_lossy(&out.stderr))
    })
}

fn f1_columns(csv: &str) -> Vec<Vec<String>> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let keep: Vec<usize> = (0..header.len())
        .filter(|&i| i == 0 || header[i].starts_with("f1_"))
        .collect();
    lines
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            keep.iter().map(|&i| cells[i].to_string()).collect()
        })
        .collect()
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let root = dir.path();
    let manifest = root.join("manifest.txt");
    let m = manifest.to_str().ok_or("path")?;
    for seed in ["1", "2"] {
        let out = root.join(format!("planted_{seed}.csv"));
        melif(&[
            "synth", "--n", "60", "--d", "300", "--k", "10", "--seed", seed,
            "--out", out.to_str().ok_or("path")?, "--manifest", m,
        ])?;
    }
    let bench = |name: &str, redact: bool| -> Result<String, String> {
        let csv = root.join(name);
        let mut args = vec![
            "bench", "--manifest", m, "--threads", "1", "--seed", "11", "--m", "10",
            "--out-csv", csv.to_str().ok_or("path")?,
        ];
        if redact {
            args.push("--redact-time");
        }
        melif(&args)?;
        read(&csv)
    };
    let a = bench("a.csv", true)?;
    let b = bench("b.csv", true)?;
    ensure(a == b, || "redacted reports differ".into())?;
    let c = bench("c.csv", false)?;
    let d = bench("d.csv", false)?;
    ensure(f1_columns(&c) == f1_columns(&d), || "F1 columns of timed reports differ".into())?;
    ensure(f1_columns(&a) == f1_columns(&c), || "redaction changed F1 columns".into())?;
    Ok(format!(
        "2-dataset manifest x 10 configs at T=1: redacted CSVs byte-identical ({} bytes), timed F1 columns identical",
        a.len()
    ))
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("filter measures match naive oracles", Duration::from_secs(10), criterion_1),
        ("optimizers reach the grid optimum", Duration::from_secs(30), criterion_2),
        ("parallel speedup of the priority-queue search", Duration::from_secs(30), criterion_3),
        ("parallel variants no worse than sequential descent", Duration::from_secs(300), criterion_4),
        ("halting semantics", Duration::from_secs(5), criterion_5),
        ("UCB1 arm selection", Duration::from_secs(5), criterion_6),
        ("concurrency safety", Duration::from_secs(120), criterion_7),
        ("end-to-end CLI determinism", Duration::from_secs(60), criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.into_iter().enumerate() {
        let t0 = Instant::now();
        let outcome = check();
        let elapsed = t0.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; took {elapsed:.1?}, budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("[PASS] criterion {}: {name}: {detail} ({elapsed:.1?})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] criterion {}: {name}: {detail} ({elapsed:.1?})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
