//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use perfect_heap::counter::DigitCounter;
use perfect_heap::replay::Replay;
use perfect_heap::sort::heapsort;
use perfect_heap::workload::generate;
use perfect_heap::{run_differential, AuditMode, FixPolicy, Natural, Queue};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, elapsed: Duration) -> Result<(), String> {
    check(elapsed < limit, || {
        format!("took {elapsed:.2?}, limit {limit:?}")
    })
}

fn relaxed() -> FixPolicy {
    FixPolicy::relaxed(1).unwrap()
}

const LONG_OPS: usize = 100_000;
const LONG_SEEDS: u64 = 10;

/// Findings from one long randomized run, kept per criterion.
#[derive(Default)]
struct LongRun {
    /// Tall rearrangement steps and how many lowered φ by exactly one.
    tall_steps: u64,
    unit_drops: u64,
    step_problem: Option<String>,
    max_digit: usize,
    digit_problem: Option<String>,
    tree_problem: Option<String>,
    identity_problem: Option<String>,
    rearrangements: u64,
}

/// Replays a generated workload, checking after every operation:
/// the potential change measured by walking every tree against the
/// ledger's step counts, the digit bound, and (eager only) the tree count.
fn long_run(seed: u64, policy: FixPolicy) -> LongRun {
    let script = generate(LONG_OPS, seed);
    let mut replay = Replay::new(policy, Natural);
    let mut out = LongRun::default();
    let mut prev_phi = 0u64;
    let (mut prev_structural, mut prev_single, mut prev_tall) = (0i64, 0u64, 0u64);
    for (i, op) in script.ops.iter().enumerate() {
        replay.apply(op);
        let q = replay.queue();
        let ledger = q.ledger();

        let phi = q.forest().recompute_phi(q.arena());
        let single = ledger.singleton_steps() - prev_single;
        let tall = ledger.tall_steps() - prev_tall;
        let structural = ledger.structural_total() - prev_structural;
        // Height-0 steps raise φ by one; every other step must lower it by one.
        let want = phi as i64 - prev_phi as i64;
        let got = structural + single as i64 - tall as i64;
        if want != got && out.step_problem.is_none() {
            out.step_problem = Some(format!(
                "seed {seed} op {i}: measured Δφ {want}, structural {structural} + {single} singleton - {tall} tall steps = {got}"
            ));
        }
        prev_phi = phi;
        prev_single = ledger.singleton_steps();
        prev_tall = ledger.tall_steps();
        prev_structural = ledger.structural_total();

        let digit = q.forest().max_digit();
        out.max_digit = out.max_digit.max(digit);
        if digit > policy.digit_bound() && out.digit_problem.is_none() {
            out.digit_problem = Some(format!("seed {seed} op {i}: digits {:?}", q.digits()));
        }
        let n = q.len();
        if q.is_eager() && n >= 1 {
            let bound = Queue::<i64, usize>::eager_tree_bound(n);
            if q.tree_count() > bound && out.tree_problem.is_none() {
                out.tree_problem = Some(format!(
                    "seed {seed} op {i}: {} trees, n = {n}, bound {bound}",
                    q.tree_count()
                ));
            }
        }
    }

    let q = replay.queue();
    let ledger = q.ledger();
    out.tall_steps = ledger.tall_steps();
    out.unit_drops = ledger.unit_drops();
    out.rearrangements = ledger.rearrangements();

    // Amortized identity, summed independently from the per-op records.
    let phi_final = q.forest().recompute_phi(q.arena()) as i64;
    let steps: u64 = ledger.records().iter().map(|r| r.rearrangements).sum();
    let amortized: i64 = ledger
        .records()
        .iter()
        .map(|r| r.rearrangements as i64 + r.structural_delta + r.rearrangement_delta)
        .sum();
    let r = ledger.rearrangements() as i64;
    if steps != ledger.rearrangements() {
        out.identity_problem = Some(format!("seed {seed}: records hold {steps} steps, R = {r}"));
    } else if r != amortized - phi_final || phi_final < 0 {
        out.identity_problem = Some(format!(
            "seed {seed}: R = {r}, Σ amortized = {amortized}, φ_final = {phi_final}"
        ));
    } else if !q.audit().is_clean() {
        out.identity_problem = Some(format!("seed {seed}: audit {:?}", q.audit().failures));
    }
    out
}

struct LongRuns {
    eager: Vec<LongRun>,
    relaxed: Vec<LongRun>,
    eager_time: Duration,
}

fn long_runs() -> LongRuns {
    let start = Instant::now();
    let eager = (0..LONG_SEEDS)
        .map(|s| long_run(s, FixPolicy::eager()))
        .collect();
    let eager_time = start.elapsed();
    let relaxed = (0..LONG_SEEDS).map(|s| long_run(s, relaxed())).collect();
    LongRuns {
        eager,
        relaxed,
        eager_time,
    }
}

fn first_problem<'a>(
    runs: impl IntoIterator<Item = &'a LongRun>,
    pick: impl Fn(&LongRun) -> &Option<String>,
) -> Result<(), String> {
    match runs.into_iter().find_map(|r| pick(r).clone()) {
        Some(p) => Err(p),
        None => Ok(()),
    }
}

fn criterion_1(runs: &LongRuns) -> Outcome {
    first_problem(&runs.eager, |r| &r.step_problem)?;
    let tall: u64 = runs.eager.iter().map(|r| r.tall_steps).sum();
    let drops: u64 = runs.eager.iter().map(|r| r.unit_drops).sum();
    check(tall == drops, || {
        format!("{drops} of {tall} tall steps dropped φ by one")
    })?;
    check(tall > 0, || "no tall steps happened".into())?;
    within(Duration::from_secs(10), runs.eager_time)?;
    Ok(format!(
        "{tall} steps on height >= 1 each lowered φ by exactly 1 ({LONG_SEEDS} seeds x {LONG_OPS} ops, {:.2?})",
        runs.eager_time
    ))
}

fn criterion_2(runs: &LongRuns) -> Outcome {
    first_problem(runs.eager.iter().chain(&runs.relaxed), |r| &r.digit_problem)?;
    let max_e = runs.eager.iter().map(|r| r.max_digit).max().unwrap_or(0);
    let max_r = runs.relaxed.iter().map(|r| r.max_digit).max().unwrap_or(0);
    Ok(format!(
        "largest digit seen: eager {max_e} (bound 2), relaxed {max_r} (bound 4)"
    ))
}

fn criterion_3(runs: &LongRuns) -> Outcome {
    first_problem(&runs.eager, |r| &r.tree_problem)?;
    Ok(format!(
        "eager tree count <= 2*floor(log2(n+1)) after all {} ops",
        LONG_SEEDS as usize * LONG_OPS
    ))
}

fn criterion_4(runs: &LongRuns) -> Outcome {
    first_problem(runs.eager.iter().chain(&runs.relaxed), |r| {
        &r.identity_problem
    })?;
    let r: u64 = runs
        .eager
        .iter()
        .chain(&runs.relaxed)
        .map(|r| r.rearrangements)
        .sum();
    Ok(format!(
        "R = Σ amortized - φ_final with φ_final >= 0 on all {} runs ({r} steps)",
        2 * LONG_SEEDS
    ))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut runs = 0;
    for seed in 0..100 {
        let script = generate(10_000, seed);
        for policy in [FixPolicy::eager(), relaxed()] {
            let verdict = run_differential(&script, policy, AuditMode::Final);
            if let Some(d) = verdict.divergence {
                return Err(format!("seed {seed}, {policy:?}: {d}"));
            }
            runs += 1;
        }
    }
    let elapsed = start.elapsed();
    within(Duration::from_secs(60), elapsed)?;
    Ok(format!(
        "{runs} runs of 10000 ops agree with the oracle ({elapsed:.2?})"
    ))
}

fn criterion_6() -> Outcome {
    let n = 100_000usize;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let keys: Vec<i64> = (0..n).map(|_| i64::from(rng.gen::<u32>())).collect();
    let start = Instant::now();
    let run = heapsort(&keys, FixPolicy::eager());
    let elapsed = start.elapsed();
    let mut reference = keys.clone();
    reference.sort_unstable();
    check(run.sorted == reference, || {
        "output differs from the reference sort".into()
    })?;
    let ceiling = 4.0 * n as f64 * (n as f64).log2();
    check((run.comparisons as f64) <= ceiling, || {
        format!("{} comparisons > {ceiling:.0}", run.comparisons)
    })?;
    within(Duration::from_secs(5), elapsed)?;
    Ok(format!(
        "sorted {n} keys with {} comparisons (ceiling {ceiling:.0}, {:.2} n log2 n) in {elapsed:.2?}",
        run.comparisons,
        run.comparisons as f64 / (n as f64 * (n as f64).log2())
    ))
}

fn criterion_7() -> Outcome {
    let n = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for policy in [
        FixPolicy::eager(),
        FixPolicy::relaxed(1).unwrap(),
        FixPolicy::relaxed(2).unwrap(),
    ] {
        let mut q: Queue<u32, ()> = Queue::new(policy);
        let mut counter = DigitCounter::new(policy);
        for k in 1..=n {
            q.insert(rng.gen(), ());
            counter.increment();
            check(q.digits() == counter.digits(), || {
                format!(
                    "{policy:?} n = {k}: queue {:?}, counter {:?}",
                    q.digits(),
                    counter.digits()
                )
            })?;
            check(q.ledger().rearrangements() == counter.carries(), || {
                format!(
                    "{policy:?} n = {k}: R = {}, carries = {}",
                    q.ledger().rearrangements(),
                    counter.carries()
                )
            })?;
        }
    }
    Ok(format!(
        "digits and R match the counter for every n <= {n} (eager, relaxed budgets 1 and 2)"
    ))
}

fn criterion_8() -> Outcome {
    let mut runs = 0;
    for seed in 0..5 {
        let script = generate(10_000, 800 + seed);
        for policy in [FixPolicy::eager(), relaxed()] {
            let verdict = run_differential(&script, policy, AuditMode::Always);
            if let Some(d) = verdict.divergence {
                return Err(format!("seed {}, {policy:?}: {d}", 800 + seed));
            }
            runs += 1;
        }
    }
    Ok(format!(
        "full validation and audit clean after every op of {runs} runs of 10000 ops"
    ))
}

fn panic_message(e: Box<dyn std::any::Any + Send>) -> String {
    let msg = e
        .downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_default();
    format!("panicked: {msg}")
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| Err(panic_message(e)))
}

fn main() -> ExitCode {
    let runs = panic::catch_unwind(long_runs).map_err(panic_message);
    let on_runs = |f: fn(&LongRuns) -> Outcome| match &runs {
        Ok(r) => guarded(|| f(r)),
        Err(e) => Err(e.clone()),
    };

    let results = [
        ("rearrangement potential drop", on_runs(criterion_1)),
        ("digit bounds", on_runs(criterion_2)),
        ("logarithmic forest", on_runs(criterion_3)),
        ("amortized identity", on_runs(criterion_4)),
        ("differential correctness", guarded(criterion_5)),
        ("heapsort", guarded(criterion_6)),
        ("number-system faithfulness", guarded(criterion_7)),
        ("structural soundness", guarded(criterion_8)),
    ];

    let mut failed = 0;
    for (i, (name, result)) in results.iter().enumerate() {
        match result {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
