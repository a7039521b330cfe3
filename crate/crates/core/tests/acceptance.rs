//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use lcextract::bench::{bench_bmy_total, bench_local_bit, BenchConfig, BenchOp};
use lcextract::extract::CountingTable;
use lcextract::verify::{
    count_bad_hitters, estimate_distance, hitter_bounds, sample_tests, stream_rng, FlatProfile,
    SourceKind, SourceSpec, TableStream, TestFamily,
};
use lcextract::{
    circular_from_permutation, derive_params, extract_local, extract_local_bit, override_params,
    permutation_from_function, Error, ExtractorKind, Permutation, Seed, TruthTable,
};
use rand::Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:.2?}, limit {limit:?}"))
}

fn c1_permutation_soundness() -> Check {
    let start = Instant::now();
    let mut reached = BTreeSet::new();
    for idx in 0..256u64 {
        let t = TruthTable::from_index(2, idx).map_err(|e| e.to_string())?;
        let pi = permutation_from_function(&t);
        Permutation::new(pi.values().to_vec()).map_err(|e| format!("table {idx}: {e}"))?;
        let c = circular_from_permutation(&pi).map_err(|e| e.to_string())?;
        ensure(c.is_single_cycle(), || format!("table {idx}: not a 4-cycle"))?;
        reached.insert(pi.values().to_vec());
    }
    ensure(reached.len() == 6, || format!("{} of 6 permutations reached", reached.len()))?;
    for n_tilde in [4u32, 8] {
        let mut rng = stream_rng(1, n_tilde as u64);
        for j in 0..10_000 {
            let t = TruthTable::random(n_tilde, &mut rng);
            let pi = permutation_from_function(&t);
            Permutation::new(pi.values().to_vec())
                .map_err(|e| format!("N={} table {j}: {e}", 1 << n_tilde))?;
            let c = circular_from_permutation(&pi).map_err(|e| e.to_string())?;
            ensure(c.is_single_cycle(), || format!("N={} table {j}: not a single cycle", 1 << n_tilde))?;
        }
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!(
        "256 tables at N=4 (6/6 permutations), 2x10^4 random at N=16,256 in {:.2?}",
        start.elapsed()
    ))
}

fn c2_preimage_bound() -> Check {
    let start = Instant::now();
    let census = lcextract::perm::preimage_census(4).map_err(|e| e.to_string())?;
    ensure(census.total() == 256, || format!("total {}", census.total()))?;
    ensure(census.max() <= 256, || format!("max {} > 256", census.max()))?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("total=256, max={} <= 2^(2N)=256", census.max()))
}

fn c3_bitwise_locality() -> Check {
    let p = override_params(8, 4, 16, 0.5).map_err(|e| e.to_string())?;
    let mut rng = stream_rng(3, 0);
    for trial in 0..1000 {
        let t = TruthTable::random(8, &mut rng);
        let seed = Seed::random(&p, &mut rng);
        let i = rng.gen_range(0..p.m);
        let full = extract_local(&t, &seed, &p).map_err(|e| e.to_string())?;
        let counting = CountingTable::new(&t);
        let bit = extract_local_bit(&counting, &seed, &p, i).map_err(|e| e.to_string())?;
        ensure(bit == full.get(i as usize), || format!("trial {trial}: bit {i} differs"))?;
        ensure(counting.lookups() == p.ell, || {
            format!("trial {trial}: {} lookups, ell={}", counting.lookups(), p.ell)
        })?;
    }
    Ok("1000/1000 bits agree, exactly 4 lookups each".into())
}

fn c4_degenerate_source() -> Check {
    let start = Instant::now();
    let p = override_params(8, 4, 8, 0.5).map_err(|e| e.to_string())?;
    let spec = SourceSpec::new(SourceKind::Constant { value: 0xa5 }, None, 0);
    let e = estimate_distance(ExtractorKind::Local, &spec, &p, 100_000, 4).map_err(|e| e.to_string())?;
    let floor = 1.0 - 2f64.powi(-7) - e.radius;
    ensure(e.estimate >= floor, || format!("estimate {} < {floor}", e.estimate))?;
    within(start, Duration::from_secs(10))?;
    Ok(format!(
        "estimate={:.6} >= {:.6} (radius {:.6}) in {:.2?}",
        e.estimate,
        floor,
        e.radius,
        start.elapsed()
    ))
}

fn c5_uniform_source() -> Check {
    let start = Instant::now();
    let p = override_params(8, 4, 4, 0.5).map_err(|e| e.to_string())?;
    let spec = SourceSpec::new(SourceKind::Uniform, None, 0);
    let mut parts = Vec::new();
    for kind in [ExtractorKind::Local, ExtractorKind::Bmy] {
        let e = estimate_distance(kind, &spec, &p, 1_000_000, 5).map_err(|e| e.to_string())?;
        ensure(e.estimate <= 0.01, || format!("{kind}: estimate {} > 0.01", e.estimate))?;
        parts.push(format!("{kind}={:.6}", e.estimate));
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{} (<= 0.01) in {:.2?}", parts.join(" "), start.elapsed()))
}

fn c6_flat_source_check() -> Check {
    let start = Instant::now();
    let epsilon = 0.25;
    let mut instances = 0;
    let mut tests = 0;
    let mut worst_ratio = 0.0f64;
    for m in [1u32, 2] {
        let p = override_params(2, 1, m as u64, epsilon).map_err(|e| e.to_string())?;
        let mut ws = sample_tests(TestFamily::Random, m, 20, 60 + m as u64);
        ws.extend(sample_tests(TestFamily::Parity, m, 4, 70 + m as u64));
        ws.extend(sample_tests(TestFamily::Prefix, m, 4, 80 + m as u64));
        for kind in [ExtractorKind::Local, ExtractorKind::Bmy] {
            for (j, w) in ws.iter().enumerate() {
                let bad = count_bad_hitters(kind, w, epsilon, &p, TableStream::Exhaustive)
                    .map_err(|e| e.to_string())?;
                ensure(bad.total == 256, || format!("{} tables", bad.total))?;
                let profile = FlatProfile::new(kind, w, &p).map_err(|e| e.to_string())?;
                ensure(profile.bad_hitters(epsilon) == bad.bad, || "bad-hitter routes disagree".into())?;
                let list = hitter_bounds(kind, w, epsilon, &p).map_err(|e| e.to_string())?;
                ensure(!list.is_empty(), || format!("m={m} {kind} W{j}: no admissible t"))?;
                for i in &list {
                    ensure(i.bad <= 1u64 << i.t, || "t below the bad-hitter count".into())?;
                    ensure(i.holds(), || {
                        format!(
                            "m={m} {kind} W{j}: bad={} t={} worst flat at k={} is {} > {}",
                            i.bad, i.t, i.k, i.worst, i.bound
                        )
                    })?;
                    worst_ratio = worst_ratio.max(i.worst / i.bound);
                    instances += 1;
                }
                tests += 1;
            }
        }
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!(
        "{tests} (kind, m, W) cases, {instances} (t, k) instances, max worst/2eps={worst_ratio:.4} in {:.2?}",
        start.elapsed()
    ))
}

fn c7_parameter_engine() -> Check {
    let p = derive_params(20, 0.9, 0.2, 0.05, 16, 0.5).map_err(|e| e.to_string())?;
    let delta = p.delta.ok_or("delta unset")?;
    ensure((delta - 0.025).abs() < 1e-12, || format!("delta {delta}"))?;
    ensure(p.ell == 720 && p.d == 28800, || format!("ell={} d={}", p.ell, p.d))?;
    let cases: [(&str, f64, f64, f64, u64, f64); 4] = [
        ("alpha >= lambda/3", 0.9, 0.3, 0.05, 16, 0.5),
        ("beta >= (lambda - 3*alpha)/4", 0.9, 0.2, 0.075, 16, 0.5),
        ("m > N^alpha", 0.9, 0.2, 0.05, 17, 0.5),
        ("epsilon < N^-beta", 0.9, 0.2, 0.05, 16, 0.4),
    ];
    for (name, lambda, alpha, beta, m, epsilon) in cases {
        match derive_params(20, lambda, alpha, beta, m, epsilon) {
            Err(Error::Constraint(msg)) if msg.contains(name) => {}
            other => return Err(format!("{name}: got {other:?}")),
        }
    }
    Ok("delta=0.025, ell=720, d=28800; 4/4 violations named".into())
}

fn c8_complexity_trend() -> Check {
    let cfg = BenchConfig {
        sizes: vec![12, 16, 20],
        reps: 21,
        ell: 4,
        ms: vec![16, 256],
        rng_seed: 8,
        batch: 4096,
    };
    let local = bench_local_bit(&cfg).map_err(|e| e.to_string())?;
    let mut ratios = Vec::new();
    for &n in &cfg.sizes {
        let r = local.m_ratio(BenchOp::LocalBit, n, 16, 256).ok_or("missing row")?;
        ensure((0.8..=1.25).contains(&r), || format!("local-bit ñ={n}: m16/m256 ratio {r:.3}"))?;
        ratios.push(format!("{r:.3}"));
    }
    let bmy_cfg = BenchConfig { reps: 11, ..cfg.clone() };
    let bmy = bench_bmy_total(&bmy_cfg).map_err(|e| e.to_string())?;
    let growth = bmy.growth_per_doubling(BenchOp::BmyTotal, 16).ok_or("missing rows")?;
    ensure((1.8..=2.6).contains(&growth), || format!("bmy growth per doubling {growth:.3}"))?;

    let again = BenchConfig { reps: 1, ..cfg.clone() };
    ensure(bench_local_bit(&again).map_err(|e| e.to_string())?.counts() == local.counts(), || {
        "local-bit counts differ between runs".into()
    })?;
    ensure(bench_bmy_total(&again).map_err(|e| e.to_string())?.counts() == bmy.counts(), || {
        "bmy counts differ between runs".into()
    })?;
    Ok(format!(
        "local-bit m-ratios [{}] in [0.8,1.25]; bmy growth/doubling {growth:.3} in [1.8,2.6]; counts reproducible",
        ratios.join(", ")
    ))
}

fn c9_cli_determinism() -> Check {
    let exe = env!("CARGO_BIN_EXE_lcextract");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let table = dir.path().join("x.xtt");
    let table = table.to_str().ok_or("non-utf8 temp path")?;
    let run = |args: &[&str]| -> Result<Vec<u8>, String> {
        let out = Command::new(exe).args(args).output().map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
        }
        Ok(out.stdout)
    };
    let gen = [
        "gen-source", "--kind", "flat-random-subset", "--k", "40", "--ntilde", "8", "--rng-seed", "9",
        "--out", table,
    ];
    run(&gen)?;
    let first = std::fs::read(table).map_err(|e| e.to_string())?;
    run(&gen)?;
    ensure(std::fs::read(table).map_err(|e| e.to_string())? == first, || "gen-source not reproducible".into())?;

    let seed = "0123456789abcdef";
    for kind in ["local", "bmy"] {
        let args = [
            "extract", "--kind", kind, "--source", table, "--seed", seed, "--no-strict", "--ell", "4",
            "--m", "64",
        ];
        ensure(run(&args)? == run(&args)?, || format!("extract --kind {kind} differs"))?;
    }

    let mut reports = Vec::new();
    for workers in [None, Some("1"), Some("4")] {
        let mut args = vec![
            "verify", "--mode", "mc", "--kind", "local", "--ntilde", "8", "--source-kind",
            "flat-random-subset", "--k", "100", "--samples", "50000", "--rng-seed", "42",
            "--no-strict", "--ell", "4", "--m", "6",
        ];
        if let Some(w) = workers {
            args.extend(["--workers", w]);
        }
        reports.push(run(&args)?);
        reports.push(run(&args)?);
    }
    ensure(reports.windows(2).all(|w| w[0] == w[1]), || "verify reports differ".into())?;
    Ok("gen-source, extract (both kinds) and verify byte-identical across runs and 1/4/default workers".into())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("1 permutation soundness", c1_permutation_soundness),
        ("2 preimage bound", c2_preimage_bound),
        ("3 bitwise locality consistency", c3_bitwise_locality),
        ("4 degenerate-source separation", c4_degenerate_source),
        ("5 near-uniform on full-entropy source", c5_uniform_source),
        ("6 exact bad-hitter/flat-source check", c6_flat_source_check),
        ("7 parameter engine", c7_parameter_engine),
        ("8 complexity trend", c8_complexity_trend),
        ("9 determinism", c9_cli_determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
