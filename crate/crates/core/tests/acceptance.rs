//! Acceptance suite. Runs as a plain binary so every criterion prints one
//! PASS/FAIL line; the process fails if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use channel_resource::discrimination::{
    advantage, helstrom, p_succ_free_probes, p_succ_vs_class, verify_incoherent_povm_collapse,
    GameClass,
};
use channel_resource::linalg::{trace_norm, ComplexMatrix};
use channel_resource::measures::{
    c_robustness, c_trace, c_trace_sdp, distance, e1_ppt_bound, omega, DistanceMeasure, FreeStateSet,
};
use channel_resource::objects::{is_dio, is_mio, is_sio_kraus, ClassTag, DensityMatrix, FreeChannelClass, QuantumChannel};
use channel_resource::power::{increasing_power_search, omega_1, property_suite, SearchSettings};
use channel_resource::random::{
    haar_unitary, random_channel, random_class_channel, random_density_matrix, random_pure_state, Rng,
};

const TOL: f64 = 1e-8;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn probe(rng: &mut Rng, d: usize, k: usize) -> DensityMatrix {
    if k % 2 == 0 {
        random_pure_state(rng, d)
    } else {
        random_density_matrix(rng, d)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// `½‖ρ − diag(p, 1−p)‖₁` minimized on a grid, using the 2×2 eigenvalue
/// formula `±√(a² + |b|²)` for a traceless Hermitian `[[a, b], [b*, −a]]`.
fn grid_c1(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let b = m[(0, 1)].norm();
    (0..=20_000)
        .map(|k| {
            let p = k as f64 / 20_000.0;
            let a = m[(0, 0)].re - p;
            (a * a + b * b).sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// `min Tr D − 1` over diagonal `D ⪰ ρ` on a grid: for `D₀₀ = ρ₀₀ + t`,
/// the smallest admissible `D₁₁` is `ρ₁₁ + |ρ₀₁|²/t`.
fn grid_robustness(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let b2 = m[(0, 1)].norm_sqr();
    if b2 == 0.0 {
        return 0.0;
    }
    (1..=200_000)
        .map(|k| {
            let t = k as f64 / 100_000.0;
            t + b2 / t
        })
        .fold(f64::INFINITY, f64::min)
}

fn grid_measure(measure: DistanceMeasure, rho: &DensityMatrix) -> f64 {
    (0..=4000)
        .map(|k| {
            let p = k as f64 / 4000.0;
            let s = DensityMatrix::diagonal(&[p, 1.0 - p]).expect("valid populations");
            distance(measure, rho, &s).expect("matching dimensions")
        })
        .fold(f64::INFINITY, f64::min)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let h = QuantumChannel::hadamard();
    let c1 = omega_1(&h, TOL).map_err(err)?.generating;
    let p = p_succ_free_probes(&h, ClassTag::Mio, TOL).map_err(err)?.value;
    let elapsed = start.elapsed();
    check(
        (c1 - 0.5).abs() <= 1e-4 && (p - 0.75).abs() <= 1e-4 && elapsed < Duration::from_secs(10),
        format!("C1(H) = {c1:.9}, p_succ = {p:.9}, {elapsed:.2?}"),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut count = 0;
    for (d, n) in [(2usize, 50usize), (3, 20)] {
        for k in 0..n {
            let mut rng = Rng::for_trial(200 + d as u64, k as u64);
            let ch = random_channel(&mut rng, d, 1 + k % 3);
            let route_a = 0.5 + 0.5 * omega_1(&ch, TOL).map_err(err)?.generating;
            for tag in ClassTag::ALL {
                let route_b = (0..d)
                    .map(|i| p_succ_vs_class(&ch, tag, &DensityMatrix::basis(d, i), TOL).map(|r| r.p_succ))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(err)?
                    .into_iter()
                    .fold(f64::NEG_INFINITY, f64::max);
                worst = worst.max((route_a - route_b).abs());
                count += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    check(
        worst <= 1e-4 && elapsed < Duration::from_secs(600),
        format!("{count} comparisons, max |a − b| = {worst:.3e}, {elapsed:.2?}"),
    )
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    for k in 0..30 {
        let mut rng = Rng::for_trial(300, k);
        let ch = random_channel(&mut rng, 2, 2);
        let g = omega_1(&ch, TOL).map_err(err)?.generating;
        let settings = SearchSettings {
            restarts: 32,
            iterations: 500,
            seed: 300 + k,
            basis_starts: false,
        };
        let s = increasing_power_search(&ch, DistanceMeasure::TraceDistance, &settings, TOL)
            .map_err(err)?
            .value;
        worst = worst.max((g - s).abs());
    }
    check(worst <= 1e-3, format!("30 channels, max |search − generating| = {worst:.3e}"))
}

fn criterion_4() -> Outcome {
    let mio = FreeChannelClass::mio(2);
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for k in 0..30 {
        let mut rng = Rng::for_trial(400, k);
        let n1 = random_channel(&mut rng, 2, 1 + (k as usize) % 3);
        let n2 = random_channel(&mut rng, 2, 2);
        let m1 = random_class_channel(&mut rng, &mio).map_err(err)?;
        let m2 = random_class_channel(&mut rng, &mio).map_err(err)?;
        if !(is_mio(&m1, 1e-8) && is_mio(&m2, 1e-8)) {
            return Err("sampled free channel is not MIO".into());
        }
        let p = rng.uniform();
        let rep = property_suite(&n1, &n2, &m1, &m2, p, 1e-6, TOL).map_err(err)?;
        violations += rep.checks.iter().filter(|c| !c.passed).count();
        worst = worst.max(rep.max_violation());
    }
    check(
        violations == 0,
        format!("30 instances x 5 clauses, {violations} violations, max excess {worst:.3e}"),
    )
}

fn criterion_5() -> Outcome {
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for k in 0..200 {
        let mut rng = Rng::for_trial(500, k);
        let ch = random_channel(&mut rng, 2, 1 + (k as usize) % 3);
        let rho = probe(&mut rng, 2, k as usize);
        let tag = if k % 2 == 0 { ClassTag::Mio } else { ClassTag::Dio };
        let r = advantage(&ch, tag, &rho, TOL).map_err(err)?;
        // independent recomputation of both ceilings
        let c1 = c_trace(&rho, TOL).map_err(err)?.value;
        let omega = omega_1(&ch, TOL).map_err(err)?.generating;
        let adv_excess = r.p_succ_probe - r.p_succ_free - 0.5 * c1;
        let total_excess = r.p_succ_probe - (0.5 + 0.5 * omega + 0.5 * c1);
        worst = worst.max(adv_excess).max(total_excess);
        if adv_excess > 1e-6 || total_excess > 1e-6 || !r.passed() {
            violations += 1;
        }
    }
    check(
        violations == 0,
        format!("200 pairs, {violations} violations, max excess {worst:.3e}"),
    )
}

fn criterion_6() -> Outcome {
    let mut worst = 0.0f64;
    let mut failures = 0;
    for class in GameClass::ALL {
        for k in 0..50 {
            let mut rng = Rng::for_trial(600, k);
            let ch = random_channel(&mut rng, 2, 1 + (k as usize) % 3);
            let rho = probe(&mut rng, 2, k as usize);
            let rep = verify_incoherent_povm_collapse(&ch, class, &rho, TOL).map_err(err)?;
            // independent membership and value checks on the witness
            let w = &rep.witness;
            let member = is_mio(w, 1e-8) && is_dio(w, 1e-8) && is_sio_kraus(&w.kraus_operators(), 1e-8);
            let a = ch.apply(&rho).map_err(err)?;
            let b = w.apply(&rho).map_err(err)?;
            let direct = 0.5 + 0.25 * (0..2).map(|i| (a.matrix()[(i, i)].re - b.matrix()[(i, i)].re).abs()).sum::<f64>();
            worst = worst.max((direct - 0.5).abs());
            if let Some(v) = rep.solver_value {
                worst = worst.max((v - 0.5).abs());
            }
            if !(rep.passed && member) || (direct - 0.5).abs() > 1e-8 {
                failures += 1;
            }
        }
    }
    check(
        failures == 0 && worst <= 1e-8,
        format!("4 classes x 50 pairs, {failures} failures, max |p − 1/2| = {worst:.3e}"),
    )
}

fn criterion_7() -> Outcome {
    let mut worst = 0.0f64;
    for k in 0..100 {
        let mut rng = Rng::for_trial(700, k);
        let u = haar_unitary(&mut rng, 2);
        let closed = (0..2).map(|i| (u[(i, 0)] * u[(i, 1)]).norm()).fold(0.0, f64::max);
        let ch = QuantumChannel::unitary(&u).map_err(err)?;
        let solver = omega_1(&ch, TOL).map_err(err)?.generating;
        worst = worst.max((closed - solver).abs());
    }
    check(worst <= 1e-6, format!("100 unitaries, max deviation {worst:.3e}"))
}

fn criterion_8() -> Outcome {
    let mut worst_bound = f64::NEG_INFINITY;
    for d in 2..=5usize {
        for k in 0..100 {
            let mut rng = Rng::for_trial(800 + d as u64, k);
            let rho = probe(&mut rng, d, k as usize);
            let c1 = c_trace(&rho, TOL).map_err(err)?.value;
            worst_bound = worst_bound.max(c1 - (1.0 - 1.0 / d as f64));
        }
    }
    // qubit factors: pinned against grid oracles first
    let mut worst_grid = 0.0f64;
    for k in 0..10 {
        let mut rng = Rng::for_trial(890, k);
        let rho = random_density_matrix(&mut rng, 2);
        let c1 = c_trace_sdp(&rho, TOL).map_err(err)?.value;
        let cr = c_robustness(&rho, TOL).map_err(err)?.value;
        worst_grid = worst_grid.max((c1 - grid_c1(&rho)).abs()).max((cr - grid_robustness(&rho)).abs());
    }
    let mut worst_rel = 0.0f64;
    for k in 0..100 {
        let mut rng = Rng::for_trial(880, k);
        let rho = probe(&mut rng, 2, k as usize);
        let m = rho.matrix();
        let l1 = 2.0 * m[(0, 1)].norm();
        let c1 = c_trace_sdp(&rho, TOL).map_err(err)?.value;
        let cr = c_robustness(&rho, TOL).map_err(err)?.value;
        worst_rel = worst_rel.max((c1 - l1 / 2.0).abs()).max((cr - 2.0 * c1).abs());
    }
    check(
        worst_bound <= 1e-9 && worst_grid <= 1e-4 && worst_rel <= 1e-6,
        format!(
            "max C1 − (1 − 1/d) = {worst_bound:.3e}; grid deviation {worst_grid:.3e}; qubit relations {worst_rel:.3e}"
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut gaps: Vec<(&str, f64)> = Vec::new();
    let mut grid = 0.0f64;
    for k in 0..10u64 {
        let mut rng = Rng::for_trial(900, k);
        for d in 2..=4 {
            let rho = random_density_matrix(&mut rng, d);
            gaps.push(("trace coherence", c_trace_sdp(&rho, TOL).map_err(err)?.gap));
            gaps.push(("robustness", c_robustness(&rho, TOL).map_err(err)?.gap));
            for m in [DistanceMeasure::FidelityDistance, DistanceMeasure::MaxRelativeEntropy] {
                gaps.push((m.as_str(), omega(m, FreeStateSet::Incoherent(d), &rho, TOL).map_err(err)?.gap));
            }
        }
        let two = random_density_matrix(&mut rng, 4);
        gaps.push(("ppt trace distance", e1_ppt_bound(&two, (2, 2), TOL).map_err(err)?.gap));
        for d in 2..=3 {
            let ch = random_channel(&mut rng, d, 2);
            let rho = random_density_matrix(&mut rng, d);
            for tag in ClassTag::ALL {
                gaps.push(("class game", p_succ_vs_class(&ch, tag, &rho, TOL).map_err(err)?.certificate_gap));
                let c = verify_incoherent_povm_collapse(&ch, tag.into(), &rho, TOL).map_err(err)?;
                gaps.push(("diagonal game", c.solver_gap));
            }
        }

        // qubit-scale problems against grid oracles
        let rho = random_density_matrix(&mut rng, 2);
        grid = grid.max((c_trace_sdp(&rho, TOL).map_err(err)?.value - grid_c1(&rho)).abs());
        grid = grid.max((c_robustness(&rho, TOL).map_err(err)?.value - grid_robustness(&rho)).abs());
        for m in [DistanceMeasure::FidelityDistance, DistanceMeasure::MaxRelativeEntropy] {
            let v = omega(m, FreeStateSet::Incoherent(2), &rho, TOL).map_err(err)?.value;
            grid = grid.max((v - grid_measure(m, &rho)).abs());
        }
        let ch = random_channel(&mut rng, 2, 2);
        let zero = DensityMatrix::basis(2, 0);
        let game = p_succ_vs_class(&ch, ClassTag::Mio, &zero, TOL).map_err(err)?;
        let out = ch.apply(&zero).map_err(err)?;
        grid = grid.max((game.p_succ - (0.5 + 0.5 * grid_c1(&out))).abs());
        // the returned POVM attains the two-channel value
        let worst = game.worst_free_channel.expect("class game returns its minimizer");
        let h = helstrom(&ch, &worst, &zero).map_err(err)?;
        let a = out.matrix();
        let b = worst.apply(&zero).map_err(err)?;
        let comp = &ComplexMatrix::identity(2) - &h.optimal_povm;
        let achieved = 0.5 * (h.optimal_povm.trace_product(a).re + comp.trace_product(b.matrix()).re);
        let formula = 0.5 + 0.25 * trace_norm(&(a - b.matrix())).map_err(err)?;
        if (achieved - formula).abs() > 1e-9 {
            return Err(format!("POVM achieves {achieved}, formula gives {formula}"));
        }
    }
    let (name, worst_gap) = gaps
        .iter()
        .copied()
        .fold(("", 0.0f64), |acc, (n, g)| if g > acc.1 { (n, g) } else { acc });
    check(
        worst_gap <= 1e-6 && grid <= 1e-4,
        format!(
            "{} optimizations, max gap {worst_gap:.3e} ({}); grid deviation {grid:.3e}",
            gaps.len(),
            if name.is_empty() { "-" } else { name }
        ),
    )
}

fn criterion_10() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_chanres");
    let run = |args: &[&str]| -> Result<(Vec<u8>, Option<i32>), String> {
        let out = Command::new(bin).args(args).output().map_err(err)?;
        Ok((out.stdout, out.status.code()))
    };
    let mut compared = 0;
    for args in [
        &["verify", "thm2", "--dim", "2", "--trials", "10", "--seed", "7"][..],
        &["verify", "thm9", "--trials", "10", "--seed", "7", "--out", "csv"][..],
        &["verify", "prop3", "--trials", "3", "--seed", "11"][..],
    ] {
        let (a, ca) = run(args)?;
        let (b, cb) = run(args)?;
        if a != b || ca != cb || a.is_empty() {
            return Err(format!("`{}` differs between runs", args.join(" ")));
        }
        compared += 1;
    }
    Ok(format!("{compared} verify invocations byte-identical across two runs"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("Hadamard datapoint", criterion_1),
        ("free-probe routes agree", criterion_2),
        ("increasing power equals generating power", criterion_3),
        ("generating power properties", criterion_4),
        ("advantage and ceiling bounds", criterion_5),
        ("incoherent measurements collapse to 1/2", criterion_6),
        ("qubit unitary closed form", criterion_7),
        ("coherence bounds and qubit relations", criterion_8),
        ("solver certificates and grid oracles", criterion_9),
        ("reproducible verify reports", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{t:.1?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{t:.1?}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
