//! Acceptance suite. Prints one line per criterion and exits non-zero if any fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use serde_json::Value;

use qpca_core::choi::{choi_state, QuantumChannel};
use qpca_core::discrim::{
    build_clusters, coarse_grained_tv, exact_distribution, qpe_distribution, run_trials, Assignment, Label,
};
use qpca_core::dmexp::{evolve_swap_channel, exact_conjugation, partial_swap_step, SwapSchedule};
use qpca_core::gram::{build_encoding, Dataset};
use qpca_core::linalg::io::{matrix_json_string, state_json_string};
use qpca_core::linalg::{
    hermitian_eig, hermitian_eigenvalues, partial_trace, trace_distance, ComplexMatrix, DensityMatrix, PureState,
    Subsystem,
};
use qpca_core::qpca::{
    eigenspace_fidelity, low_rank_projection_error, principal_components, qpe_decompose, sample_decomposition,
    QpeConfig,
};
use qpca_core::random::{density_with_spectrum, seeded_density, seeded_kraus, seeded_pure_state, Seeded};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn core<T>(r: qpca_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.max_abs_diff(b)
}

fn criterion_1() -> Outcome {
    let mut rng = Seeded::new(11);
    let rho = seeded_density(&mut rng, 2, 2);
    let sigma = seeded_density(&mut rng, 2, 2);
    let comm = rho.matrix().commutator(sigma.matrix());
    let mut ratios = Vec::new();
    for dt in [0.1, 0.05, 0.025] {
        let step = core(partial_swap_step(&rho, &sigma, dt))?;
        let linear = sigma.matrix() - &comm.scale(Complex64::new(0.0, dt));
        ratios.push(max_diff(step.matrix(), &linear) / (dt * dt));
    }
    for w in ratios.windows(2) {
        let change = (w[1] / w[0] - 1.0).abs();
        ensure(change <= 0.15, || format!("remainder/Δt² moved by {:.1}%: {ratios:?}", 100.0 * change))?;
    }
    Ok(format!("remainder/Δt² = {:.4}, {:.4}, {:.4}", ratios[0], ratios[1], ratios[2]))
}

fn swap_error(rho: &DensityMatrix, sigma: &DensityMatrix, t: f64, n: usize) -> Result<f64, String> {
    let out = core(evolve_swap_channel(rho, sigma, &core(SwapSchedule::new(t, n))?))?;
    core(trace_distance(&out, &core(exact_conjugation(rho, sigma, t))?))
}

fn criterion_2() -> Outcome {
    let mut rng = Seeded::new(22);
    let rho = seeded_density(&mut rng, 2, 2);
    let sigma = seeded_density(&mut rng, 2, 2);
    let errors: Vec<f64> = [32, 64, 128, 256].iter().map(|&n| swap_error(&rho, &sigma, 1.0, n)).collect::<Result<_, _>>()?;
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[0] / w[1]).collect();
    for r in &ratios {
        ensure((1.6..=2.4).contains(r), || format!("doubling ratio {r:.3} outside [1.6, 2.4]: {ratios:?}"))?;
    }
    let t_ratio = swap_error(&rho, &sigma, 1.0, 128)? / swap_error(&rho, &sigma, 0.5, 128)?;
    ensure((3.2..=4.8).contains(&t_ratio), || format!("t ratio {t_ratio:.3} outside [3.2, 4.8]"))?;
    Ok(format!(
        "doubling ratios {:.3}/{:.3}/{:.3}, t=1 vs t=0.5 ratio {t_ratio:.3}",
        ratios[0], ratios[1], ratios[2]
    ))
}

fn criterion_3() -> Outcome {
    let rho = core(DensityMatrix::from_real_diagonal(&[0.75, 0.25]))?;
    let est = core(qpe_decompose(&rho, &rho, &QpeConfig::exact(4)))?;
    let oracle = core(hermitian_eig(rho.matrix()))?;
    let mut worst_fid: f64 = 1.0;
    for (value, v) in oracle.eigenvalues().iter().zip(oracle.eigenvectors()) {
        let bin = est.bin_near(*value).ok_or_else(|| format!("no bin near {value}"))?;
        ensure((bin.mass - value).abs() <= 1e-9, || format!("mass {} for eigenvalue {value}", bin.mass))?;
        let fid = bin.state.fidelity_with_pure(v);
        ensure(fid >= 1.0 - 1e-9, || format!("conditional-state fidelity {fid}"))?;
        worst_fid = worst_fid.min(fid);
    }
    ensure(est.bins.len() == 2, || format!("{} bins carry mass", est.bins.len()))?;
    Ok(format!("masses exact to 1e-9, worst fidelity 1 - {:.1e}", 1.0 - worst_fid))
}

fn criterion_4() -> Outcome {
    let rho = seeded_density(&mut Seeded::new(44), 2, 2);
    let exact = core(qpe_decompose(&rho, &rho, &QpeConfig::exact(4)))?;
    let swap_cfg = QpeConfig::swap_channel(4, 512);
    let swap = core(qpe_decompose(&rho, &rho, &swap_cfg))?;
    let tv = core(swap.total_variation(&exact))?;
    ensure(tv <= 0.05, || format!("total variation {tv:.4}"))?;
    ensure(swap.copies_consumed == swap_cfg.swap_copy_count(), || "copy count mismatch".into())?;
    Ok(format!("b=4, 512 steps per unit time, {} copies, TV {tv:.2e}", swap.copies_consumed))
}

fn std_dev(xs: &[f64]) -> f64 {
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

fn criterion_5() -> Outcome {
    let rho = core(DensityMatrix::from_real_diagonal(&[0.75, 0.25]))?;
    let cfg = QpeConfig::exact(4);
    let top = (0..cfg.outcomes()).find(|&k| (cfg.estimate_for(k) - 0.75).abs() < 1e-12).expect("0.75 is dyadic");
    let spread = |m: u64| -> Result<f64, String> {
        let freqs: Vec<f64> = (0..100u64)
            .map(|seed| {
                let rec = core(sample_decomposition(&rho, &cfg, m, seed))?;
                Ok(*rec.counts.get(&top).unwrap_or(&0) as f64 / m as f64)
            })
            .collect::<Result<_, String>>()?;
        Ok(std_dev(&freqs))
    };
    let ratio = spread(400)? / spread(1600)?;
    ensure((1.6..=2.4).contains(&ratio), || format!("std ratio {ratio:.3} outside 2 ± 0.4"))?;
    Ok(format!("std(m=400)/std(m=1600) = {ratio:.3}"))
}

fn criterion_6() -> Outcome {
    let mut worst_entry: f64 = 0.0;
    let mut worst_spec: f64 = 0.0;
    for seed in 0..8u64 {
        let mut rng = Seeded::new(600 + seed);
        let complex = seed % 2 == 1;
        let vectors: Vec<Vec<Complex64>> = (0..4)
            .map(|_| {
                (0..4)
                    .map(|_| if complex { rng.complex_gaussian() } else { Complex64::new(rng.gaussian(), 0.0) })
                    .collect()
            })
            .collect();
        let data = core(Dataset::new(vectors, None))?;
        let enc = core(build_encoding(&data))?;
        let reduced = core(partial_trace(&enc.purification.projector(), Subsystem::Second, 4, 4))?;
        let a = data.column_matrix();
        let ata = a.adjoint().dot(&a);
        let tr = ata.trace().re;
        // for complex data the register holds the transpose of A†A
        let target = if complex { ata.transpose() } else { ata }.scale_real(1.0 / tr);
        worst_entry = worst_entry.max(max_diff(&reduced, &target));
        worst_entry = worst_entry.max(max_diff(enc.gram_density.matrix(), &target));
        let g = core(hermitian_eigenvalues(enc.gram_density.matrix()))?;
        let c = core(hermitian_eigenvalues(enc.covariance_density.matrix()))?;
        for (x, y) in g.iter().zip(&c) {
            worst_spec = worst_spec.max((x - y).abs());
        }
    }
    ensure(worst_entry <= 1e-10, || format!("entrywise deviation {worst_entry:.2e}"))?;
    ensure(worst_spec <= 1e-9, || format!("spectral deviation {worst_spec:.2e}"))?;
    Ok(format!("entrywise {worst_entry:.1e}, spectra {worst_spec:.1e} over 8 datasets"))
}

fn criterion_7() -> Outcome {
    let rho = density_with_spectrum(&mut Seeded::new(77), 8, &[0.75, 0.25]);
    let oracle = core(hermitian_eig(rho.matrix()))?;
    let pcs = core(principal_components(&rho, &QpeConfig::exact(4), 2))?;
    ensure(pcs.components.len() == 2, || format!("{} components recovered", pcs.components.len()))?;
    let mut fids = Vec::new();
    for c in &pcs.components {
        let fid = eigenspace_fidelity(&c.eigenvector, &oracle, c.estimate);
        ensure(fid >= 0.99, || format!("fidelity {fid} at estimate {}", c.estimate))?;
        fids.push(fid);
    }
    let err = core(low_rank_projection_error(&rho, 2))?;
    ensure(err <= 1e-9, || format!("projection error {err:.2e}"))?;
    Ok(format!("fidelities {:.12}/{:.12}, projection error {err:.1e}", fids[0], fids[1]))
}

fn criterion_8() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in 2..=4 {
        let id = core(hermitian_eigenvalues(core(choi_state(&QuantumChannel::identity(d)))?.matrix()))?;
        worst = worst.max((id[0] - 1.0).abs());
        for v in &id[1..] {
            worst = worst.max(v.abs());
        }
        let dep = core(hermitian_eigenvalues(core(choi_state(&QuantumChannel::depolarizing(d)))?.matrix()))?;
        let flat = 1.0 / (d * d) as f64;
        for v in &dep {
            worst = worst.max((v - flat).abs());
        }
    }
    ensure(worst <= 1e-10, || format!("spectrum deviation {worst:.2e}"))?;
    let mut rng = Seeded::new(88);
    let a = core(QuantumChannel::new(seeded_kraus(&mut rng, 3, 2)))?;
    let b = core(QuantumChannel::new(seeded_kraus(&mut rng, 3, 3)))?;
    let w = 0.3;
    let mixed = core(choi_state(&core(QuantumChannel::mixture(&[(w, &a), (1.0 - w, &b)]))?))?;
    let combo = &core(choi_state(&a))?.matrix().scale_real(w) + &core(choi_state(&b))?.matrix().scale_real(1.0 - w);
    let lin = max_diff(mixed.matrix(), &combo);
    ensure(lin <= 1e-10, || format!("mixture linearity deviation {lin:.2e}"))?;
    Ok(format!("spectra within {worst:.1e}, mixture linearity {lin:.1e}"))
}

fn near(rng: &mut Seeded, index: usize) -> PureState {
    let mut v: Vec<Complex64> = (0..2).map(|_| rng.complex_gaussian() * 0.4).collect();
    v[index] += 1.0;
    PureState::normalized(v).expect("nonzero")
}

fn criterion_9() -> Outcome {
    let singles = core(build_clusters(&[PureState::basis(2, 0)], &[PureState::basis(2, 1)]))?;
    let exact = core(exact_distribution(&PureState::basis(2, 0), &singles))?;
    let a = Assignment::from_draw(exact, 0.5);
    ensure(a.label == Label::First && a.confidence == 1.0, || format!("singleton assignment {a:?}"))?;
    ensure((a.probability_of(Label::First) - 1.0).abs() <= 1e-12, || "singleton probability below 1".into())?;

    let mut rng = Seeded::new(99);
    let set_a: Vec<_> = (0..8).map(|_| near(&mut rng, 0)).collect();
    let set_b: Vec<_> = (0..8).map(|_| near(&mut rng, 1)).collect();
    let clusters = core(build_clusters(&set_a, &set_b))?;
    let chi = seeded_pure_state(&mut rng, 2);
    let exact = core(exact_distribution(&chi, &clusters))?;
    let p: f64 = exact.iter().filter(|(x, _)| *x > 0.0).map(|(_, q)| q).sum();
    let trials = 10_000;
    let summary = run_trials(&exact, trials, 9);
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    let dev = (summary.frequency(Label::First) - p).abs();
    ensure(dev <= 3.0 * sigma, || format!("frequency off by {:.2}σ", dev / sigma))?;

    let (qpe, _) = core(qpe_distribution(&chi, &clusters, &QpeConfig::exact(6)))?;
    let tv = coarse_grained_tv(&qpe, &exact);
    ensure(tv <= 0.05, || format!("exact vs QPE total variation {tv:.4}"))?;
    Ok(format!("singletons certain, frequency within {:.2}σ, exact vs QPE TV {tv:.4}", dev / sigma))
}

fn manifest_hashes(dir: &Path) -> Result<BTreeMap<String, String>, String> {
    let text = fs::read_to_string(dir.join("manifest.json")).map_err(|e| e.to_string())?;
    let value: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let mut out = BTreeMap::new();
    for a in value["artifacts"].as_array().ok_or("manifest without artifacts")? {
        out.insert(a["path"].as_str().unwrap_or_default().to_string(), a["sha256"].as_str().unwrap_or_default().to_string());
    }
    Ok(out)
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    fs::write(dir.join(name), text).expect("write fixture");
    dir.join(name).display().to_string()
}

fn criterion_10() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = tmp.path();
    let mut rng = Seeded::new(1010);
    let rho = write(dir, "rho.json", &core(matrix_json_string(seeded_density(&mut rng, 2, 2).matrix()))?);
    let sigma = write(dir, "sigma.json", &core(matrix_json_string(seeded_density(&mut rng, 2, 2).matrix()))?);
    let chi = write(dir, "chi.json", &core(state_json_string(&seeded_pure_state(&mut rng, 2)))?);
    let data = write(
        dir,
        "data.json",
        r#"{"vectors": [[[1, 0], [0.2, 0.1]], [[0.9, 0], [0, -0.3]], [[0.1, 0], [1, 0]], [[0.3, 0.2], [0.8, 0]]],
            "labels": ["left", "left", "right", "right"]}"#,
    );
    let channel = write(dir, "channel.json", &core(QuantumChannel::amplitude_damping(0.3).and_then(|c| c.to_json_string()))?);
    let runs: Vec<(&str, Vec<String>)> = vec![
        ("exponentiate", vec!["--rho".into(), rho.clone(), "--sigma".into(), sigma.clone(), "--time".into(), "1".into(), "--epsilon".into(), "0.05".into()]),
        ("error-curve", vec!["--rho".into(), rho.clone(), "--sigma".into(), sigma, "--time".into(), "1".into(), "--steps".into(), "16,32,64".into(), "--record-timing".into(), "false".into()]),
        ("qpca", vec!["--rho".into(), rho, "--bits".into(), "5".into(), "--top-k".into(), "2".into(), "--trials".into(), "2000".into()]),
        ("qpca", vec!["--dataset".into(), data.clone(), "--backend".into(), "swap_channel".into(), "--bits".into(), "2".into(), "--steps-per-unit-time".into(), "32".into()]),
        ("discriminate", vec!["--dataset".into(), data, "--chi".into(), chi, "--mode".into(), "qpe".into(), "--trials".into(), "5000".into()]),
        ("choi", vec!["--channel".into(), channel, "--top-k".into(), "2".into()]),
    ];
    let mut files = 0;
    for (i, (cmd, args)) in runs.iter().enumerate() {
        let mut hashes = Vec::new();
        for rep in 0..2 {
            let out = dir.join(format!("run{i}_{rep}"));
            let status = Command::new(env!("CARGO_BIN_EXE_qpca"))
                .arg(cmd)
                .args(args)
                .args(["--seed", "17", "--out"])
                .arg(&out)
                .output()
                .map_err(|e| e.to_string())?;
            ensure(status.status.success(), || {
                format!("{cmd} failed: {}", String::from_utf8_lossy(&status.stderr).trim())
            })?;
            let h = manifest_hashes(&out)?;
            for (name, sha) in &h {
                let bytes = fs::read(out.join(name)).map_err(|e| e.to_string())?;
                ensure(&qpca_sha(&bytes) == sha, || format!("{cmd}: {name} does not match its manifest hash"))?;
            }
            hashes.push(h);
        }
        ensure(hashes[0] == hashes[1], || format!("{cmd} outputs differ between runs"))?;
        files += hashes[0].len();
    }
    Ok(format!("{} runs repeated, {files} artifacts hash-identical", runs.len()))
}

fn qpca_sha(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(bytes))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("partial-swap expansion remainder is O(Δt²)", Duration::from_secs(1), criterion_1),
        ("copy-count law n = O(t²/ε)", Duration::from_secs(10), criterion_2),
        ("phase estimation is exact on dyadic spectra", Duration::from_secs(1), criterion_3),
        ("swap-channel and exact backends agree", Duration::from_secs(300), criterion_4),
        ("sampling error shrinks as 1/√m", Duration::from_secs(30), criterion_5),
        ("Gram register identity", Duration::from_secs(1), criterion_6),
        ("principal components end to end", Duration::from_secs(10), criterion_7),
        ("Choi states", Duration::from_secs(1), criterion_8),
        ("cluster assignment", Duration::from_secs(60), criterion_9),
        ("CLI determinism", Duration::from_secs(120), criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = result.and_then(|detail| {
            if elapsed > *budget {
                Err(format!("{detail}; took {elapsed:.2?}, budget {budget:?}"))
            } else {
                Ok(detail)
            }
        });
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({elapsed:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} ({elapsed:.2?})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
