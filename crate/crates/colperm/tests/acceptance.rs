//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use colperm::bench::timed_run;
use colperm::wilcoxon::{wilcoxon_signed_rank, wilcoxon_signed_rank_with, Alternative, Method};
use colperm_core::delta::{EvalState, SetKind, SetUpdate};
use colperm_core::exact::{brute_force_optimum, build_q, evaluate_full};
use colperm_core::fixtures::{example_instance, example_order_a, example_order_b};
use colperm_core::indirect::evaluate_indirect;
use colperm_core::rng::{seeded, SearchRng};
use colperm_core::search::{self, Backend, Procedure};
use colperm_core::{Instance, Permutation};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;
/// Name, body and wall-clock budget.
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn random_instance(rng: &mut SearchRng, max_m: usize, max_n: usize) -> Instance {
    let m = rng.random_range(2..=max_m);
    let n = rng.random_range(2..=max_n);
    let density = f64::from(rng.random_range(1..=9u32)) / 10.0;
    Instance::generate(m, n, density, rng.random())
}

fn one_based(xs: &[usize]) -> Vec<usize> {
    xs.iter().map(|x| x + 1).collect()
}

fn golden_example() -> Outcome {
    let inst = example_instance();
    for (perm, value, columns) in [
        (example_order_a(), 3, vec![2, 4, 6, 3]),
        (example_order_b(), 6, vec![5, 4]),
    ] {
        let full = evaluate_full(&inst, &perm);
        let indirect = evaluate_indirect(&inst, &perm);
        let st = EvalState::new(&inst, perm.clone()).unwrap();
        ensure!(full.value == value, "full {} != {value}", full.value);
        ensure!(indirect.value == value, "indirect {} != {value}", indirect.value);
        ensure!(st.objective() == value, "delta {} != {value}", st.objective());
        let got = one_based(&full.critical_columns(&perm));
        ensure!(got == columns, "critical columns {got:?} != {columns:?}");
    }
    Ok("objectives 3 and 6, critical columns {2,4,6,3} and {5,4}".into())
}

fn fill_ins() -> Outcome {
    let inst = example_instance();
    // Per row, the 0-based stages holding a fill-in.
    let cases: [(Permutation, [&[usize]; 6]); 2] = [
        (example_order_a(), [&[2, 3, 4], &[], &[1], &[], &[], &[]]),
        (
            example_order_b(),
            [&[1, 2, 3, 4], &[1, 2, 3], &[], &[2], &[3, 4], &[2, 3]],
        ),
    ];
    let mut total = 0;
    for (perm, want) in cases {
        let q = build_q(&inst, &perm);
        for (r, w) in want.iter().enumerate() {
            let got = q.fill_ins(r);
            ensure!(got == *w, "row {} fill-ins {got:?} != {w:?}", r + 1);
            total += got.len();
        }
    }
    Ok(format!("{total} fill-in positions match"))
}

fn oracle_walks() -> Outcome {
    let steps: u64 = (0..1000u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = seeded(10_000 + k);
            let inst = random_instance(&mut rng, 10, 10);
            let n = inst.cols();
            let mut st = EvalState::new(&inst, Permutation::random(n, rng.random())).unwrap();
            for step in 0..200 {
                let s = rng.random_range(0..n - 1);
                st.swap_adjacent(s).unwrap();
                let want = evaluate_full(&inst, st.permutation());
                ensure!(
                    st.stage_sums() == &want.stage_sums[..] && st.objective() == want.value,
                    "instance {k} step {step}: {:?} != {:?}",
                    st.stage_sums(),
                    want.stage_sums
                );
            }
            Ok(200)
        })
        .collect::<Result<Vec<_>, _>>()?
        .iter()
        .sum();
    Ok(format!("{steps} swaps checked"))
}

/// Visits every permutation of `0..n` by Heap's algorithm.
fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize]) -> Result<(), String>) -> Result<u64, String> {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0; n];
    let mut count = 1;
    f(&a)?;
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a)?;
            count += 1;
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(count)
}

fn exhaustive_small() -> Outcome {
    let perms: u64 = (0..50u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = seeded(20_000 + k);
            let inst = random_instance(&mut rng, 10, 6);
            let mut st = EvalState::new(&inst, Permutation::identity(inst.cols())).unwrap();
            for_each_permutation(inst.cols(), |order| {
                let perm = Permutation::new(order.to_vec()).unwrap();
                let full = evaluate_full(&inst, &perm);
                let indirect = evaluate_indirect(&inst, &perm);
                st.reset(perm.clone()).unwrap();
                ensure!(indirect == full, "instance {k} {order:?}: indirect differs");
                ensure!(
                    st.stage_sums() == &full.stage_sums[..] && st.objective() == full.value,
                    "instance {k} {order:?}: fresh sets differ"
                );
                Ok(())
            })
        })
        .collect::<Result<Vec<_>, _>>()?
        .iter()
        .sum();
    Ok(format!("{perms} permutations over 50 instances"))
}

fn shuffled_updates(rng: &mut SearchRng) -> [SetUpdate; 8] {
    let mut order = SetUpdate::ALL;
    order.shuffle(rng);
    order
}

fn involutions() -> Outcome {
    const CASES: u64 = 10_000;
    let mut rng = seeded(30_000);
    for case in 0..CASES {
        let inst = random_instance(&mut rng, 40, 40);
        let n = inst.cols();
        let mut st = EvalState::new(&inst, Permutation::random(n, rng.random())).unwrap();
        // A few random moves so the state is not a fresh build.
        for _ in 0..rng.random_range(0..5) {
            st.swap_adjacent(rng.random_range(0..n - 1)).unwrap();
        }
        let sets = st.sets().clone();
        let sums = st.stage_sums().to_vec();
        let hist = st.histogram().to_vec();
        let perm = st.permutation().clone();
        let value = st.objective();
        let same = |st: &EvalState<'_>| {
            st.sets() == &sets
                && st.stage_sums() == &sums[..]
                && st.histogram() == &hist[..]
                && st.permutation() == &perm
                && st.objective() == value
        };

        let s = rng.random_range(0..n - 1);
        st.swap_adjacent(s).unwrap();
        let swapped = st.sets().clone();
        st.swap_adjacent(s).unwrap();
        ensure!(same(&st), "case {case}: swap {s} twice changed the state");

        let mut one = sets.clone();
        one.apply_swap(s, &shuffled_updates(&mut rng));
        let mut two = sets.clone();
        two.apply_swap(s, &shuffled_updates(&mut rng));
        ensure!(
            one == two && one == swapped,
            "case {case}: update order matters at stage {s}"
        );
        for stage in [s, s + 1] {
            for a in [SetKind::Leading, SetKind::Trailing, SetKind::Intermediate] {
                for b in [SetKind::Trailing, SetKind::Intermediate, SetKind::Consecutive] {
                    if a != b {
                        let overlap = one.set(a, stage).iter().zip(one.set(b, stage)).any(|(x, y)| x & y != 0);
                        ensure!(!overlap, "case {case}: {a:?} and {b:?} overlap at stage {stage}");
                    }
                }
            }
        }

        let (a, b) = {
            let (x, y) = (rng.random_range(0..n), rng.random_range(0..n));
            (x.min(y), x.max(y))
        };
        st.reverse_segment(a, b).unwrap();
        st.reverse_segment(a, b).unwrap();
        ensure!(same(&st), "case {case}: reversing {a}..={b} twice changed the state");
    }
    Ok(format!("{CASES} cases, each checking swap, update order and reversal"))
}

fn cross_backend() -> Outcome {
    let runs: usize = (0..50u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = seeded(40_000 + k);
            let inst = random_instance(&mut rng, 40, 40);
            let mut runs = 0;
            for p in Procedure::ALL {
                for seed in 1..=10 {
                    let r: Vec<_> = Backend::ALL
                        .iter()
                        .map(|&b| search::run(&inst, p, b, seed, || Duration::ZERO))
                        .collect();
                    for (b, x) in Backend::ALL.iter().zip(&r).skip(1) {
                        ensure!(
                            x.objective == r[0].objective
                                && x.improvements == r[0].improvements
                                && x.permutation == r[0].permutation,
                            "instance {k} {p} seed {seed}: {b} gives {}/{} improvements, matrix {}/{}",
                            x.objective,
                            x.improvements,
                            r[0].objective,
                            r[0].improvements
                        );
                    }
                    runs += 1;
                }
            }
            Ok(runs)
        })
        .collect::<Result<Vec<_>, String>>()?
        .iter()
        .sum();
    Ok(format!("{runs} runs identical across matrix, indirect and delta"))
}

fn descent_vs_optimum() -> Outcome {
    let runs: usize = (0..40u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = seeded(50_000 + k);
            let inst = random_instance(&mut rng, 10, 8);
            let (opt, _) = brute_force_optimum(&inst, 8).unwrap();
            let mut runs = 0;
            for p in Procedure::ALL {
                for seed in 1..=10 {
                    let r = search::run(&inst, p, Backend::Delta, seed, || Duration::ZERO);
                    ensure!(
                        r.objective >= opt,
                        "instance {k} {p} seed {seed}: {} < optimum {opt}",
                        r.objective
                    );
                    runs += 1;
                }
            }
            Ok(runs)
        })
        .collect::<Result<Vec<_>, String>>()?
        .iter()
        .sum();
    let inst = example_instance();
    let (opt, _) = brute_force_optimum(&inst, 8).unwrap();
    ensure!(opt == 3, "6x6 example optimum {opt} != 3");
    let mut hits = 0;
    let mut total = 0;
    for p in Procedure::ALL {
        for seed in 1..=10 {
            let r = search::run(&inst, p, Backend::Delta, seed, || Duration::ZERO);
            ensure!(r.objective >= opt, "6x6 example {p} seed {seed}: {} < 3", r.objective);
            hits += usize::from(r.objective == opt);
            total += 1;
        }
    }
    ensure!(hits > 0, "no 6x6 example run reached the optimum");
    Ok(format!(
        "{runs} runs >= optimum; 6x6 example optimum 3 reached in {hits}/{total} runs"
    ))
}

fn large_trend() -> Outcome {
    const INSTANCES: u64 = 5;
    let mut good = 0;
    let mut lines = Vec::new();
    for k in 1..=INSTANCES {
        let inst = Instance::generate(400, 400, 0.05, k);
        let (mut t_delta, mut t_ind) = (Duration::ZERO, Duration::ZERO);
        let (mut e_delta, mut e_ind) = (0u64, 0u64);
        for seed in 1..=10 {
            let d = timed_run(&inst, Procedure::BestInsertion, Backend::Delta, seed);
            let i = timed_run(&inst, Procedure::BestInsertion, Backend::Indirect, seed);
            ensure!(
                d.objective == i.objective && d.improvements == i.improvements,
                "instance {k} seed {seed}: backends disagree"
            );
            t_delta += d.elapsed;
            t_ind += i.elapsed;
            e_delta += d.counters.evaluations;
            e_ind += i.counters.evaluations;
        }
        let ratio = e_ind as f64 / e_delta as f64;
        let ok = t_delta < t_ind && ratio >= 100.0;
        good += u64::from(ok);
        lines.push(format!(
            "s{k}: {:.2}s vs {:.2}s, evals {e_delta} vs {e_ind} ({ratio:.0}x)",
            t_delta.as_secs_f64(),
            t_ind.as_secs_f64()
        ));
    }
    let detail = lines.join("; ");
    ensure!(good * 5 >= INSTANCES * 4, "trend holds on {good}/{INSTANCES}: {detail}");
    Ok(format!("trend holds on {good}/{INSTANCES}: {detail}"))
}

/// Midranks of absolute values computed by counting.
fn midranks(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            let less = x.iter().filter(|&&w| w < v).count() as f64;
            let equal = x.iter().filter(|&&w| w == v).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

fn wilcoxon() -> Outcome {
    let mut rng = seeded(60_000);
    let mut checked = 0;
    for case in 0..3000 {
        let n = rng.random_range(1..=12);
        let a: Vec<f64> = (0..n).map(|_| f64::from(rng.random_range(0..8u32))).collect();
        let b: Vec<f64> = (0..n).map(|_| f64::from(rng.random_range(0..8u32))).collect();
        let d: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).filter(|&x| x != 0.0).collect();
        if d.is_empty() {
            continue;
        }
        let ranks = midranks(&d.iter().map(|x| x.abs()).collect::<Vec<_>>());
        let v: f64 = ranks.iter().zip(&d).filter(|(_, &x)| x > 0.0).map(|(r, _)| r).sum();
        let (mut le, mut ge) = (0u64, 0u64);
        for mask in 0u32..1 << d.len() {
            let s: f64 = (0..d.len()).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
            le += u64::from(s <= v);
            ge += u64::from(s >= v);
        }
        let all = (1u64 << d.len()) as f64;
        let (le, ge) = (le as f64 / all, ge as f64 / all);
        for (alt, want) in [
            (Alternative::TwoSided, (2.0 * le.min(ge)).min(1.0)),
            (Alternative::Less, le),
            (Alternative::Greater, ge),
        ] {
            let r = wilcoxon_signed_rank_with(&a, &b, alt, Method::Exact).map_err(|e| format!("case {case}: {e}"))?;
            ensure!(r.v == v, "case {case}: V {} != {v}", r.v);
            ensure!(
                (r.p_value - want).abs() <= 1e-12,
                "case {case} {alt:?}: p {} != {want}",
                r.p_value
            );
        }
        checked += 1;
    }
    let delta = [0.11, 0.2, 0.05, 0.4, 0.3, 0.09, 0.12, 0.2, 0.15, 0.3];
    let indirect = [2.24, 3.1, 1.7, 4.0, 2.9, 1.1, 2.0, 2.5, 1.9, 3.3];
    let r = wilcoxon_signed_rank(&delta, &indirect, Alternative::TwoSided).map_err(|e| e.to_string())?;
    ensure!(
        r.v == 0.0 && r.v.is_sign_positive(),
        "V {} for all-negative differences",
        r.v
    );
    ensure!((r.p_value - 2.0 / 1024.0).abs() <= 1e-12, "p {} != 2/1024", r.p_value);
    Ok(format!(
        "{checked} samples match enumeration; all-negative gives V = 0, p = 2/1024"
    ))
}

fn main() {
    const MS: Duration = Duration::from_millis(1);
    const MIN: Duration = Duration::from_secs(60);
    let criteria: [Criterion; 9] = [
        (
            "golden objectives of the 6x6 example and critical columns",
            golden_example,
            Some(MS),
        ),
        ("fill-in positions of the 6x6 example", fill_ins, Some(MS)),
        (
            "delta sums equal the exact evaluator on 1000 random walks",
            oracle_walks,
            Some(MIN),
        ),
        ("exhaustive equivalence for n <= 6", exhaustive_small, Some(MIN)),
        ("involution and update-order properties", involutions, None),
        ("cross-backend trajectory equality", cross_backend, Some(5 * MIN)),
        ("descent never beats the optimum", descent_vs_optimum, None),
        (
            "delta faster with 100x fewer evaluations on 400x400",
            large_trend,
            Some(10 * MIN),
        ),
        ("Wilcoxon V and exact p", wilcoxon, None),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = t0.elapsed();
        let secs = elapsed.as_secs_f64();
        let outcome = match (outcome, budget) {
            (Ok(_), Some(b)) if elapsed > *b => Err(format!("took {secs:.3}s, budget {:.3}s", b.as_secs_f64())),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS {}. {name} [{secs:.3}s]: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name} [{secs:.3}s]: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
