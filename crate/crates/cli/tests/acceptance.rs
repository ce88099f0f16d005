//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torus_wigner::wigner::secondary_peak_ratio;
use torus_wigner::{
    baker_eigen_wigner, build_baker, build_kernel, classical_image, classical_step, enumerate_orbits,
    fourier_cut_transform, orbit_to_pixels, point_to_pixel, propagator_columns, scar_scan, to_doubled, wigner_inverse,
    wigner_of_state, wigner_propagator_direct, wigner_propagator_spectral, wigner_transform, AxisConvention,
    ColumnRoute, Complex64, DensityMatrix, PhasePoint, PureState, UnitaryMap,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DensityMatrix {
    DensityMatrix::from_fn(n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> DensityMatrix {
    let a = random_matrix(rng, n);
    DensityMatrix::from_fn(n, |i, j| a.get(i, j) + a.get(j, i).conj())
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> UnitaryMap {
    let a = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    UnitaryMap::new(a.qr().q()).expect("QR factor is unitary")
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for x in values {
        let t = sum + x;
        c += if sum.abs() >= x.abs() {
            (sum - t) + x
        } else {
            (x - t) + sum
        };
        sum = t;
    }
    sum + c
}

/// Independent kernel oracle: the box kernel as the frequency sum
/// `(1/N) sum_{j<N} exp(i pi k (2j - N) / 2N)`, with phases reduced exactly
/// in integer arithmetic and compensated summation.
fn kernel_oracle(n: usize, k: i64) -> Complex64 {
    let four_n = 4 * n as i64;
    let angles: Vec<f64> = (0..n as i64)
        .map(|j| {
            let r = (k * (2 * j - n as i64)).rem_euclid(four_n);
            std::f64::consts::PI * r as f64 / (2 * n) as f64
        })
        .collect();
    let re = compensated_sum(angles.iter().map(|a| a.cos()));
    let im = compensated_sum(angles.iter().map(|a| a.sin()));
    Complex64::new(re, im) / n as f64
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut even_exact = true;
    for n in 1..=32usize {
        let kernel = build_kernel(n).unwrap();
        for (k, value) in kernel.entries() {
            if k % 2 == 0 {
                let expected = if k == 0 { 1.0 } else { 0.0 };
                even_exact &= value == Complex64::new(expected, 0.0);
            } else {
                worst = worst.max((value - kernel_oracle(n, k)).norm());
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-14 && even_exact && elapsed < Duration::from_secs(1),
        format!(
            "max odd-k error {worst:.2e} (tol 1e-14), even branch exact: {even_exact}, {:.3} s (< 1 s)",
            secs(elapsed)
        ),
    )
}

/// Shared instance set of criteria 2 and 3.
fn random_instances() -> Vec<DensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    (1..=16)
        .flat_map(|n| (0..50).map(|_| random_matrix(&mut rng, n)).collect::<Vec<_>>())
        .collect()
}

fn criterion_2(instances: &[DensityMatrix]) -> Outcome {
    let start = Instant::now();
    let worst = instances
        .iter()
        .map(|rho| {
            let w = wigner_transform(rho).unwrap();
            wigner_inverse(&w).unwrap().grid().max_abs_diff(rho.grid())
        })
        .fold(0.0, f64::max);
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-10 && elapsed < Duration::from_secs(30),
        format!(
            "{} matrices, N = 1..16, max round-trip error {worst:.2e} (tol 1e-10), {:.3} s (< 30 s)",
            instances.len(),
            secs(elapsed)
        ),
    )
}

fn criterion_3(instances: &[DensityMatrix]) -> Outcome {
    let worst = instances
        .iter()
        .map(|rho| {
            wigner_transform(rho)
                .unwrap()
                .max_abs_diff(&fourier_cut_transform(rho).unwrap())
        })
        .fold(0.0, f64::max);
    outcome(
        worst <= 1e-10,
        format!(
            "{} matrices, max convolution vs block-cut discrepancy {worst:.2e} (tol 1e-10)",
            instances.len()
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut imag, mut norm) = (0.0f64, 0.0f64);
    for n in 1..=16 {
        for _ in 0..50 {
            let rho = random_hermitian(&mut rng, n);
            let w = wigner_transform(&rho).unwrap();
            imag = imag.max(w.max_abs_imag());
            norm = norm.max((w.sum() - rho.trace()).norm());
        }
    }
    outcome(
        imag <= 1e-10 && norm <= 1e-10,
        format!("N = 1..16, max |Im W| {imag:.2e}, max |sum W - Tr rho| {norm:.2e} (tol 1e-10)"),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut routes, mut semigroup, mut identity) = (0.0f64, 0.0f64, 0.0f64);
    let mut cases = 0;
    for n in [2usize, 4, 6, 8, 10, 12] {
        let mut maps = vec![build_baker(n).unwrap()];
        maps.extend((0..5).map(|_| random_unitary(&mut rng, n)));
        for u in &maps {
            let direct: Vec<_> = (0..=3).map(|t| wigner_propagator_direct(u, t).unwrap()).collect();
            let spectral: Vec<_> = (0..=3).map(|t| wigner_propagator_spectral(u, t).unwrap()).collect();
            for (d, s) in direct.iter().zip(&spectral) {
                routes = routes.max(d.max_abs_diff(s));
            }
            identity = identity
                .max(direct[0].identity_defect())
                .max(spectral[0].identity_defect());
            for ks in [&direct, &spectral] {
                semigroup = semigroup.max(ks[1].compose(&ks[1]).unwrap().max_abs_diff(&ks[2]));
                semigroup = semigroup.max(ks[2].compose(&ks[1]).unwrap().max_abs_diff(&ks[3]));
            }
            cases += 1;
        }
    }
    let elapsed = start.elapsed();
    let pass = routes <= 1e-8 && semigroup <= 1e-8 && identity <= 1e-8 && elapsed < Duration::from_secs(300);
    outcome(
        pass,
        format!(
            "{cases} maps x t = 0..3, route discrepancy {routes:.2e}, semigroup {semigroup:.2e}, t=0 identity {identity:.2e} (tol 1e-8), {:.2} s (< 300 s)",
            secs(elapsed)
        ),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let n = 16;
    let (mut double_min, mut single_max) = (f64::INFINITY, 0.0f64);
    let mut ridge_ok = true;
    for n0 in 0..n {
        let psi = PureState::basis(n, n0).unwrap();
        let doubled = to_doubled(&DensityMatrix::from_pure(&psi)).unwrap();
        double_min = double_min.min(secondary_peak_ratio(&doubled.position_marginal_abs()));
        let w = wigner_of_state(&psi).unwrap();
        let marginal = w.position_marginal_abs();
        single_max = single_max.max(secondary_peak_ratio(&marginal));
        let peak = (0..n).max_by(|&a, &b| marginal[a].total_cmp(&marginal[b])).unwrap();
        ridge_ok &= peak == n0;
    }
    let elapsed = start.elapsed();
    outcome(
        double_min >= 0.5 && single_max <= 0.2 && ridge_ok && elapsed < Duration::from_secs(1),
        format!(
            "N = 16, all n0: W_double replica ratio >= {double_min:.3} (need >= 0.5), W secondary ratio <= {single_max:.2e} (need <= 0.2), peak at n0: {ridge_ok}, {:.3} s (< 1 s)",
            secs(elapsed)
        ),
    )
}

fn artifact_dir() -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let n = 200;
    let (_, grids) = baker_eigen_wigner(n).unwrap();
    let eigen_time = start.elapsed();
    let orbits = enumerate_orbits(3).unwrap();
    let scan = scar_scan(&grids, &orbits, AxisConvention::Pq).unwrap();
    let best = scan.ranking[0];
    let dir = artifact_dir();
    for &a in scan.ranking.iter().take(3) {
        let re = grids[a].grid().real_parts();
        std::fs::write(
            dir.join(format!("scar_eigen_{a:03}.pgm")),
            torus_wigner_cli::io::pgm(n, n, &re, false),
        )
        .unwrap();
    }
    let z = scan.z_max;
    outcome(
        z >= 3.0 && eigen_time < Duration::from_secs(600),
        format!(
            "N = 200, eigen Wigner functions in {:.2} s (< 600 s); best state {best} score {:.3}, median {:.3}, sample std {:.3}, z = {z:.2} (need >= 3); PGMs of top states in {} for the manual visual check",
            secs(eigen_time),
            scan.max_score,
            scan.median,
            scan.std,
            dir.display()
        ),
    )
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let n = 42;
    let m_prime = (6usize, 25usize);
    let steps = [1u32, 2];
    let u = build_baker(n).unwrap();
    let columns = propagator_columns(&u, m_prime, &steps, ColumnRoute::Direct).unwrap();
    let thresholds: Vec<f64> = columns
        .iter()
        .map(|c| {
            let mut mags: Vec<f64> = c.grid().data().iter().map(|z| z.norm()).collect();
            mags.sort_by(|a, b| b.total_cmp(a));
            let top = (mags.len() as f64 * 0.01).ceil() as usize;
            mags[top - 1]
        })
        .collect();
    let cycle_points: Vec<PhasePoint> = enumerate_orbits(3)
        .unwrap()
        .into_iter()
        .flat_map(|o| o.points)
        .collect();
    let mut report = Vec::new();
    let mut pass = false;
    for conv in [AxisConvention::Pq, AxisConvention::Qp] {
        let Some(&start_point) = cycle_points.iter().find(|&&x| {
            let p = point_to_pixel(x, n, conv);
            p.lambda.abs_diff(m_prime.0) <= 1 && p.n.abs_diff(m_prime.1) <= 1
        }) else {
            report.push(format!("{conv}: m' not on a period-3 orbit pixel"));
            continue;
        };
        let mut all = true;
        for ((&t, col), &thr) in steps.iter().zip(&columns).zip(&thresholds) {
            let image = point_to_pixel(classical_image(start_point, t).unwrap(), n, conv);
            let hit = (-1i64..=1).any(|dl| {
                (-1i64..=1).any(|dn| {
                    let l = (image.lambda as i64 + dl).rem_euclid(n as i64) as usize;
                    let m = (image.n as i64 + dn).rem_euclid(n as i64) as usize;
                    col.get(l, m).norm() >= thr
                })
            });
            all &= hit;
            report.push(format!(
                "{conv} t={t} image ({},{}) top-1%: {hit}",
                image.lambda, image.n
            ));
        }
        pass |= all;
    }
    let elapsed = start.elapsed();
    outcome(
        pass && elapsed < Duration::from_secs(120),
        format!(
            "N = 42, m' = (6,25): {}; {:.2} s (< 120 s)",
            report.join(", "),
            secs(elapsed)
        ),
    )
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let three = enumerate_orbits(3).unwrap();
    let target = PhasePoint::new(Ratio::new(1, 7), Ratio::new(4, 7));
    let three_ok = three.len() == 2 && three.iter().filter(|o| o.points.contains(&target)).count() == 1;
    let mut verified = 0;
    let mut closure_ok = true;
    for k in 1..=8 {
        for orbit in enumerate_orbits(k).unwrap() {
            for (j, &x) in orbit.points.iter().enumerate() {
                closure_ok &= classical_step(x).unwrap() == orbit.points[(j + 1) % k];
            }
            let pixels = orbit_to_pixels(&orbit, 42, AxisConvention::Pq).unwrap();
            closure_ok &= pixels.len() == k;
            verified += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        three_ok && closure_ok && elapsed < Duration::from_secs(1),
        format!("two 3-cycles with (1/7,4/7): {three_ok}; {verified} orbits (k <= 8) closed exactly: {closure_ok}; {:.3} s (< 1 s)", secs(elapsed)),
    )
}

type Snapshot = (String, BTreeMap<String, Vec<u8>>);
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn run_cli(dir: &Path, args: &[&str], threads: Option<&str>) -> Snapshot {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_torus-wigner"));
    cmd.current_dir(dir).args(args).arg("--out").arg("out");
    match threads {
        Some(t) => cmd.env(torus_wigner_cli::THREADS_ENV, t),
        None => cmd.env_remove(torus_wigner_cli::THREADS_ENV),
    };
    let output = cmd.output().expect("binary runs");
    assert!(
        output.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let out_dir = dir.join("out");
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(&out_dir).unwrap() {
        let path = entry.unwrap().path();
        files.insert(
            path.file_name().unwrap().to_string_lossy().into_owned(),
            std::fs::read(&path).unwrap(),
        );
    }
    std::fs::remove_dir_all(&out_dir).unwrap();
    (String::from_utf8(output.stdout).unwrap(), files)
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let state: String = (0..8)
        .map(|n| format!("{n},{},{}\n", if n == 3 { 0.6 } else { 0.1 }, 0.05 * n as f64))
        .collect();
    std::fs::write(dir.path().join("state.csv"), state).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let rho = random_matrix(&mut rng, 5);
    let w = wigner_transform(&rho).unwrap();
    std::fs::write(
        dir.path().join("grid.csv"),
        torus_wigner_cli::io::complex_grid_csv(w.grid(), "# grid"),
    )
    .unwrap();
    let invocations: Vec<Vec<&str>> = vec![
        vec!["kernel", "--n", "7"],
        vec!["wigner", "--input", "state.csv", "--check", "--format", "both"],
        vec![
            "wigner",
            "--input",
            "state.csv",
            "--double",
            "--format",
            "both",
            "--symmetric",
        ],
        vec!["inverse", "--input", "grid.csv"],
        vec![
            "baker-eigen",
            "--n",
            "16",
            "--select",
            "top:2",
            "--pair",
            "0,1",
            "--period",
            "2,3",
            "--format",
            "both",
        ],
        vec![
            "propagate",
            "--n",
            "10",
            "--m-prime",
            "2,6",
            "--t",
            "0,1,2",
            "--route",
            "both",
            "--full",
            "--format",
            "both",
        ],
        vec!["orbits", "--period", "4", "--n", "42", "--axis-convention", "qp"],
        vec!["selftest", "--n-max", "4"],
    ];
    let mut failures = Vec::new();
    for args in &invocations {
        let first = run_cli(dir.path(), args, None);
        let second = run_cli(dir.path(), args, None);
        let single = run_cli(dir.path(), args, Some("1"));
        let many = run_cli(dir.path(), args, Some("4"));
        if first.1.is_empty() || first != second || first != single || first != many {
            failures.push(args[0]);
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{} invocations covering all 7 subcommands, each run 4 times (default, repeat, 1 thread, 4 threads): {}",
            invocations.len(),
            if failures.is_empty() {
                "byte-identical".to_string()
            } else {
                format!("differences in {failures:?}")
            }
        ),
    )
}

fn main() {
    let instances = random_instances();
    let criteria: Vec<Criterion> = vec![
        ("kernel exactness", Box::new(criterion_1)),
        ("transform bijectivity", Box::new(|| criterion_2(&instances))),
        ("transform route equivalence", Box::new(|| criterion_3(&instances))),
        ("reality and normalization", Box::new(criterion_4)),
        ("propagator route equivalence", Box::new(criterion_5)),
        ("ghost-image removal", Box::new(criterion_6)),
        ("baker eigenfunction scars (N=200)", Box::new(criterion_7)),
        ("propagator localization on orbit (N=42)", Box::new(criterion_8)),
        ("classical periodic orbits", Box::new(criterion_9)),
        ("CLI determinism", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = run();
        if !result.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {} - {}",
            i + 1,
            if result.pass { "PASS" } else { "FAIL" },
            name,
            result.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
